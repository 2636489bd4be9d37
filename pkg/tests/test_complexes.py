from fractions import Fraction

import pytest

from gch import operators
from gch.complexes import (Certificate, ComplexSpec, DimensionTable, Engine, NoPairInWindow,
                           Window, cancellation_pair, check_identity, cohomology_dims,
                           cohomology_representatives, euler_check, gc_table, quasi_iso_check,
                           verify_acyclic)
from gch.graphs import LabeledGraph, decode
from gch.operators import GraphVector

from oracles import dense_rank

THETA = decode("G 2 3 0 | 1>2 1>2 1>2 |")
L3 = decode("G 3 3 0 | 1>2 1>3 2>3 |")
HAIRY_THETA = decode("G 2 2 1 | 1>2 1>2 | 2")


@pytest.fixture(scope="module")
def engine():
    return Engine(field="q")


def test_spec_validation():
    with pytest.raises(ValueError):
        ComplexSpec("GC", "chi", Window(4, 5, 0))
    with pytest.raises(ValueError):
        ComplexSpec("XGC", "delta", Window(4, 5, 0))
    assert ComplexSpec("HGC", "delta+Delta", Window(4, 5, 2)).components == ("delta", "Delta_r")


def test_slot_gradings():
    spec = ComplexSpec("H>=0GC", "delta+Delta", Window(3, 4, 1))
    assert spec.slot_gradings(1, 5) == [(2, 3, 0), (3, 3, 1)]
    assert spec.slot_complete(1, 5)
    assert not spec.slot_complete(1, 6)


def test_low_rows(engine):
    # rows 0-2 with at most 7 vertices, plus the first class of row 3
    t = gc_table(range(0, 3), range(3, 12), engine)
    t = {k: x for k, x in t.entries.items() if k[1] - 1 - 2 * k[0] <= 7}
    assert {k for k, x in t.items() if x} == {(0, 4), (0, 8), (1, 5), (2, 9)}
    assert all(x in (0, 1) for x in t.values()) and t[(1, 6)] == 0
    row3 = gc_table([3], [12, 13], engine)
    assert row3[(3, 12)] == 0 and row3[(3, 13)] == 1


def test_unknown_at_window_edge(engine):
    t = cohomology_dims(ComplexSpec("GC", "delta", Window(4, 6, 0)), engine)
    assert t[(0, 4)] == 1
    # (4, 6) is the last computed grading, so its slot is truncated
    assert t[(2, 9)] is None


def test_enlarging_window_keeps_known_dims(engine):
    small = cohomology_dims(ComplexSpec("H>=0GC", "delta+Delta", Window(4, 6, 2)), engine).known()
    big = cohomology_dims(ComplexSpec("H>=0GC", "delta+Delta", Window(5, 7, 3)), engine).known()
    assert small and all(big[k] == x for k, x in small.items())


def test_dims_match_dense_oracle(engine):
    spec = ComplexSpec("H>=0GC", "delta+Delta", Window(4, 6, 2))
    t = cohomology_dims(spec, engine)
    for (r, d), x in t.known().items():
        n = engine.slot_dim(spec, r, d)
        out = engine.slot_matrix(spec, r, d).to_dense()
        inc = engine.slot_matrix(spec, r, d - 1).to_dense()
        assert x == n - dense_rank(out) - dense_rank(inc)


def test_modular_and_rational_agree():
    spec = ComplexSpec("H>=0GC", "delta+Delta", Window(5, 7, 2))
    assert cohomology_dims(spec, Engine(field="q")) == cohomology_dims(spec, Engine(field="p2", seed=3))


def test_table_formats_roundtrip():
    t = DimensionTable("g", {(0, 4): 1, (1, 5): None, (1, 6): 0})
    assert t.to_csv().splitlines() == ["g,d,dim", "0,4,1", "1,5,?", "1,6,0"]
    assert DimensionTable.from_csv(t.to_csv()) == t
    assert DimensionTable.from_json(t.to_json()) == t
    assert "?" in t.pretty()
    assert DimensionTable().to_csv() == "b,d,dim\n"


def test_empty_window_gives_empty_table():
    t = cohomology_dims(ComplexSpec("GC", "delta", Window(0, 0, 0)))
    assert t.entries == {}


@pytest.mark.parametrize("space,diff", [("HGC", "delta+Delta"), ("H>=0GC", "chi"),
                                        ("H>=0GC", "delta+chi"), ("H>=0GC", "delta+Delta+chi")])
def test_acyclic_small(space, diff, engine):
    rep = verify_acyclic(ComplexSpec(space, diff, Window(5, 7, 3)), engine)
    assert rep.ok and rep.interior


def test_quasi_iso_small(engine):
    rep = quasi_iso_check(Window(5, 7, 3), engine)
    assert rep.ok
    dims = {k: (a, b) for k, a, b in rep.compared}
    assert dims[(0, 4)] == (1, 1) and dims[(1, 5)] == (1, 1) and dims[(1, 6)] == (0, 0)


def test_euler(engine):
    spec = ComplexSpec("GC", "delta", Window(8, 10, 0))
    assert euler_check(spec, 1, range(5, 11), engine)
    assert euler_check(spec, 2, range(7, 13), engine)
    with pytest.raises(ValueError, match="refused"):
        euler_check(ComplexSpec("GC", "delta", Window(5, 7, 0)), 2, range(7, 13), engine)


def test_identities_small(engine):
    for name in ["d2", "Delta2", "chi2", "anticommute", "homotopy"]:
        rep = check_identity(name, Window(4, 6, 2), engine)
        assert rep.ok and rep.checked


def test_identity_suite_catches_wrong_sign(monkeypatch):
    # hair adding without the vertex-parity twist commutes with delta
    def bad_chi(b):
        return operators._collect(operators._chi_terms(b), Fraction(1))

    monkeypatch.setitem(operators.MAPS, "chi", bad_chi)
    rep = check_identity("anticommute", Window(4, 6, 2), Engine())
    assert not rep.ok
    assert any("chi" in label for _, label, _ in rep.failures)


def test_representatives_theta(engine):
    reps = cohomology_representatives((2, 3, 0), engine)
    assert len(reps) == 1 and set(reps[0]) == {THETA}


def test_l3_certificate(engine):
    cert = cancellation_pair(GraphVector.basis(L3), Window(4, 5, 2), engine=engine)
    assert isinstance(cert, Certificate)
    assert cert.coefficient == -3
    assert cert.gamma2 == GraphVector.basis(THETA)
    assert cert.witness == 3 * GraphVector.basis(HAIRY_THETA)
    assert cert.verified


def test_certificate_sign_follows_representative(engine):
    flipped = GraphVector.from_graph(LabeledGraph(3, ((1, 2), (2, 3), (3, 1))))
    assert flipped == -GraphVector.basis(L3)
    cert = cancellation_pair(flipped, Window(4, 5, 2), engine=engine)
    assert cert.coefficient == 3


def test_certificate_json_selfcheck(engine):
    cert = cancellation_pair(GraphVector.basis(L3), Window(4, 5, 2), engine=engine)
    again = Certificate.from_json(cert.to_json())
    assert again.verify()
    assert '"coefficient": "-3/1"' in cert.to_json()
    again.coefficient = Fraction(-2)
    assert not again.verify()


def test_zero_certificate():
    cert = cancellation_pair(GraphVector(), Window(4, 5, 2))
    assert cert.coefficient == 0 and not cert.witness and cert.verified


def test_non_cocycle_rejected():
    g = GraphVector.basis(decode("G 4 5 0 | 1>2 1>3 1>4 1>4 2>3 |"))
    with pytest.raises(ValueError, match="not delta-closed"):
        cancellation_pair(g, Window(5, 6, 2))


def test_hairy_input_rejected():
    with pytest.raises(ValueError, match="hairless"):
        cancellation_pair(GraphVector.basis(HAIRY_THETA), Window(4, 5, 2))


def test_window_edge_gives_no_pair():
    res = cancellation_pair(GraphVector.basis(L3), Window(2, 4, 1))
    assert isinstance(res, NoPairInWindow)
    assert "d=5" in res.reason


def test_theta_outcome_recorded(engine):
    # the partner slot of the theta class is empty; whatever the solver
    # finds must verify
    res = cancellation_pair(GraphVector.basis(THETA), Window(4, 6, 2), engine=engine)
    assert isinstance(res, Certificate) and res.verify()
    assert res.coefficient == 0

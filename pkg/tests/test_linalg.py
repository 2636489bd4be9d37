import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gch.linalg import (SparseMatrix, format_matrix, kernel_basis, parse_matrix, random_primes,
                        rank, rank_auto, rank_modp, rank_modp_crosscheck, rank_record, read_matrix,
                        solve, write_matrix)

from oracles import dense_rank


def random_matrix(rng, m, n, density=0.3, lo=-3, hi=3, frac=False):
    rows = []
    for _ in range(m):
        row = []
        for _ in range(n):
            if rng.random() < density:
                x = rng.randint(lo, hi)
                if frac:
                    x = Fraction(x, rng.randint(1, 4))
                row.append(x)
            else:
                row.append(0)
        rows.append(row)
    return rows


def low_rank(rng, m, n, r):
    a = random_matrix(rng, m, r, 0.6)
    b = random_matrix(rng, r, n, 0.6)
    return [[sum(a[i][k] * b[k][j] for k in range(r)) for j in range(n)] for i in range(m)]


@pytest.mark.parametrize("seed", range(25))
def test_rank_matches_dense_oracle(seed):
    rng = random.Random(seed)
    m, n = rng.randint(1, 40), rng.randint(1, 40)
    if seed % 2:
        rows = low_rank(rng, m, n, rng.randint(1, min(m, n)))
    else:
        rows = random_matrix(rng, m, n, rng.choice([0.1, 0.3, 0.8]), frac=seed % 3 == 0)
    M = SparseMatrix.from_dense(rows)
    assert rank(M) == dense_rank(rows)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_rank_permutation_and_transpose_invariant(seed):
    rng = random.Random(seed)
    rows = low_rank(rng, 12, 9, 4)
    M = SparseMatrix.from_dense(rows)
    rp = list(range(12))
    cp = list(range(9))
    rng.shuffle(rp)
    rng.shuffle(cp)
    assert rank(M.permuted(rp, cp)) == rank(M) == rank(M.transpose())


@pytest.mark.parametrize("seed", range(10))
def test_rank_nullity(seed):
    rng = random.Random(100 + seed)
    rows = low_rank(rng, 15, 20, rng.randint(1, 10))
    M = SparseMatrix.from_dense(rows)
    ker = kernel_basis(M)
    assert rank(M) + len(ker) == M.ncols
    for vec in ker:
        assert M.apply(vec) == {}


@pytest.mark.parametrize("seed", range(10))
def test_modular_rank_bounded_by_rational(seed):
    rng = random.Random(200 + seed)
    rows = random_matrix(rng, 20, 20, 0.4, -50, 50)
    M = SparseMatrix.from_dense(rows)
    for p in (2, 3, 5, 7, 2147483647):
        assert rank_modp(M, p) <= rank(M)


def test_escalation_on_disagreement():
    M = SparseMatrix.from_dense([[2, 0], [0, 3]])
    res = rank_modp_crosscheck(M, [3, 5])
    assert res.ranks == {3: 1, 5: 2} and not res.agree
    assert rank_auto(M, "p2", [3, 5]) == 2
    assert rank_auto(M, "q") == 2


def test_denominator_prime_skipped():
    M = SparseMatrix.from_dense([[Fraction(1, 3), 1], [1, 1]])
    res = rank_modp_crosscheck(M, [3, 7])
    assert res.skipped == [3]
    assert rank_auto(M, "p2", [3, 7]) == 2


def test_crosscheck_needs_two_primes():
    with pytest.raises(ValueError):
        rank_modp_crosscheck(SparseMatrix.identity(2), [3])


def test_random_primes_seeded():
    a = random_primes(2, 42)
    assert a == random_primes(2, 42) and len(set(a)) == 2
    assert all(p > 2 ** 30 for p in a)


def test_empty_and_zero():
    assert rank(SparseMatrix.zeros(0, 5)) == 0
    assert rank(SparseMatrix.zeros(4, 0)) == 0
    assert rank(SparseMatrix.zeros(3, 3)) == 0
    assert len(kernel_basis(SparseMatrix.zeros(0, 3))) == 3


def test_identity_rank():
    assert rank(SparseMatrix.identity(7)) == 7


def test_solve_feasible_and_not():
    A = SparseMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
    x = solve(A, {0: 2, 1: 3})
    assert A.apply(x) == {0: 2, 1: 3}
    B = SparseMatrix.from_dense([[1, 1], [2, 2]])
    assert solve(B, {0: 1, 1: 3}) is None
    assert solve(B, {}) == {}


@pytest.mark.parametrize("seed", range(10))
def test_solve_random(seed):
    rng = random.Random(300 + seed)
    rows = low_rank(rng, 10, 14, 6)
    A = SparseMatrix.from_dense(rows)
    x0 = {j: Fraction(rng.randint(-3, 3)) for j in range(14)}
    rhs = A.apply(x0)
    x = solve(A, rhs)
    assert x is not None and A.apply(x) == rhs


def test_matrix_algebra():
    A = SparseMatrix.from_dense([[1, 2], [3, 4]])
    B = SparseMatrix.identity(2)
    assert (A @ B) == A
    assert (A - A).is_zero()
    assert (A + A) == A.scaled(2)
    assert A.transpose().to_dense() == [[1, 3], [2, 4]]
    assert A.reduce_mod(2).to_dense() == [[1, 0], [1, 0]]
    with pytest.raises(ZeroDivisionError):
        SparseMatrix.from_dense([[Fraction(1, 2)]]).reduce_mod(2)


def test_matrix_file_roundtrip(tmp_path):
    M = SparseMatrix.from_dense([[0, Fraction(1, 2)], [-3, 0], [0, 4]])
    text = format_matrix(M, "delta", (3, 3, 0), (4, 4, 0))
    assert text.splitlines()[0] == "# gch-matrix map=delta src=(3,3,0) dst=(4,4,0) rows=3 cols=2"
    assert text.splitlines()[1:] == ["1 0 -3/1", "0 1 1/2", "2 1 4/1"]
    again, name, src, dst = parse_matrix(text)
    assert again == M and name == "delta" and src == (3, 3, 0) and dst == (4, 4, 0)
    p = tmp_path / "m.txt"
    write_matrix(p, M, "delta", (3, 3, 0), (4, 4, 0))
    assert read_matrix(p)[0] == M


def test_rank_record_fields():
    rec = rank_record("chi", (3, 3, 0), (3, 3, 1), SparseMatrix.from_dense([[3]]))
    assert set(rec) == {"map", "src", "dst", "field", "rank", "elapsed_ms"}
    assert rec["rank"] == 1

"""Chain complexes built from graph bases: cohomology tables, acyclicity and
quasi-isomorphism checks, and cancellation certificates.

A complex is a space (``GC`` hairless, ``HGC`` with at least one hair,
``H>=0GC`` any number of hairs) together with a differential made of the
maps in :mod:`gch.operators`.  It splits into finite *slots* ``(row, d)``:
``d = 1 - v + 2e + s`` is the degree and ``row`` is a grading preserved by
every component of the differential.  A slot is *complete* when every
grading that could contribute to it lies in the window box, and a
cohomology dimension is reported only when the slot and both neighbours are
complete.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple, Optional, Sequence, Union

from .graphs import BasisElement, Grading, decode, encode, generate_basis
from .linalg import SparseMatrix, kernel_basis, random_primes, rank, rank_auto, solve
from .operators import (GraphVector, LinearMapSpec, apply_map, assemble_matrix,
                        target_grading)

__all__ = [
    "Window",
    "ComplexSpec",
    "DimensionTable",
    "Engine",
    "Certificate",
    "NoPairInWindow",
    "cohomology_dims",
    "verify_acyclic",
    "quasi_iso_check",
    "cancellation_pair",
    "euler_check",
    "gc_table",
    "IDENTITIES",
    "check_identity",
    "cohomology_representatives",
]

SPACES = ("GC", "HGC", "H>=0GC")
DIFFERENTIALS = {
    "delta": ("delta",),
    "delta+Delta": ("delta", "Delta"),
    "chi": ("chi",),
    "delta+chi": ("delta", "chi"),
    "delta+Delta+chi": ("delta", "Delta", "chi"),
}


class Window(NamedTuple):
    """Box ``v <= v, e <= e, s <= s`` of computed gradings."""

    v: int
    e: int
    s: int

    def contains(self, g) -> bool:
        return g[0] <= self.v and g[1] <= self.e and g[2] <= self.s


def _possible(v: int, e: int, s: int) -> bool:
    # cheap necessary condition for a nonempty basis
    return v >= 2 and e >= v and 0 <= s <= v


@dataclass(frozen=True)
class ComplexSpec:
    space: str
    differential: str
    window: Window

    def __post_init__(self):
        if self.space not in SPACES:
            raise ValueError(f"unknown space {self.space!r}; expected one of {SPACES}")
        if self.differential not in DIFFERENTIALS:
            raise ValueError(f"unknown differential {self.differential!r}")
        if self.space == "GC" and self.differential != "delta":
            raise ValueError("the hairless complex only carries delta")

    @property
    def components(self) -> tuple:
        comps = DIFFERENTIALS[self.differential]
        if self.space == "HGC":
            comps = tuple("Delta_r" if c == "Delta" else c for c in comps)
        return comps

    @property
    def row_label(self) -> str:
        return "b" if self.differential in ("delta", "chi", "delta+chi") else "g"

    def row(self, g) -> int:
        """The secondary grading preserved by every component."""
        v, e, s = g
        if self.differential in ("delta", "chi", "delta+chi"):
            return e - v
        if self.differential == "delta+Delta":
            return e - v + s
        return 0

    def allows(self, s: int) -> bool:
        if self.space == "GC":
            return s == 0
        if self.space == "HGC":
            return s >= 1
        return s >= 0

    def slot_gradings(self, row: int, d: int) -> list[Grading]:
        """Every grading of the slot that could be nonempty."""
        out = []
        for e in range(0, max(d, 0) + 1):
            for s in range(0, max(d, 0) + 1):
                v = 1 + 2 * e + s - d
                if self.allows(s) and _possible(v, e, s) and self.row((v, e, s)) == row:
                    out.append(Grading(v, e, s))
        return out

    def slot_complete(self, row: int, d: int) -> bool:
        return all(self.window.contains(g) for g in self.slot_gradings(row, d))

    def window_gradings(self) -> list[Grading]:
        w = self.window
        return [Grading(v, e, s)
                for v in range(2, w.v + 1) for e in range(v, w.e + 1)
                for s in range(0, min(w.s, v) + 1) if self.allows(s)]

    def slots(self) -> list[tuple[int, int]]:
        return sorted({(self.row(g), g.degree) for g in self.window_gradings()})


class DimensionTable:
    """Cohomology dimensions keyed by ``(row, d)``; ``None`` marks UNKNOWN."""

    def __init__(self, label: str = "b", entries: Optional[dict] = None):
        self.label = label
        self.entries: dict = dict(entries or {})

    def __getitem__(self, key):
        return self.entries[key]

    def get(self, key, default=None):
        return self.entries.get(key, default)

    def known(self) -> dict:
        return {k: x for k, x in self.entries.items() if x is not None}

    def __eq__(self, other) -> bool:
        return (isinstance(other, DimensionTable) and self.label == other.label
                and self.entries == other.entries)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([self.label, "d", "dim"])
        for (r, d), x in sorted(self.entries.items()):
            w.writerow([r, d, "?" if x is None else x])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "DimensionTable":
        rows = list(csv.reader(io.StringIO(text)))
        label = rows[0][0]
        entries = {(int(r), int(d)): None if x == "?" else int(x) for r, d, x in rows[1:]}
        return cls(label, entries)

    def to_json(self) -> str:
        data = {"label": self.label,
                "entries": [[r, d, x] for (r, d), x in sorted(self.entries.items())]}
        return json.dumps(data, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DimensionTable":
        data = json.loads(text)
        return cls(data["label"], {(r, d): x for r, d, x in data["entries"]})

    def pretty(self) -> str:
        """Rows are the secondary grading, columns the degree; blank cells are
        outside the table, ``?`` is unknown."""
        if not self.entries:
            return ""
        rows = sorted({r for r, _ in self.entries})
        ds = sorted({d for _, d in self.entries})
        width = max(3, max(len(str(d)) for d in ds) + 1)
        lines = [f"{self.label:>4}|" + "".join(f"{d:>{width}}" for d in ds)]
        lines.append("-" * len(lines[0]))
        for r in rows:
            cells = []
            for d in ds:
                if (r, d) not in self.entries:
                    cells.append(" " * width)
                else:
                    x = self.entries[(r, d)]
                    cells.append(f"{'?' if x is None else x:>{width}}")
            lines.append(f"{r:>4}|" + "".join(cells))
        return "\n".join(lines)


class Engine:
    """Memoizes bases, matrices and ranks; optionally backed by a disk store."""

    def __init__(self, field: str = "p2", seed: int = 0, jobs: int = 1, store=None,
                 prime_count: int = 2):
        if field not in ("q", "p2"):
            raise ValueError(f"unknown field policy {field!r}")
        self.field = field
        self.seed = seed
        self.jobs = jobs
        self.store = store
        self.primes = random_primes(prime_count, seed) if field == "p2" else []
        self._bases: dict = {}
        self._index: dict = {}
        self._mats: dict = {}
        self._ranks: dict = {}

    def basis(self, g) -> list[BasisElement]:
        g = Grading(*g)
        if g not in self._bases:
            if g.v < 1 or g.e < 0 or g.s < 0:
                self._bases[g] = []
            elif self.store is not None:
                self._bases[g] = self.store.basis(g)
            else:
                self._bases[g] = generate_basis(*g)
        return self._bases[g]

    def index(self, g) -> dict:
        g = Grading(*g)
        if g not in self._index:
            self._index[g] = {b: i for i, b in enumerate(self.basis(g))}
        return self._index[g]

    def matrix(self, name: str, src) -> SparseMatrix:
        key = (name, Grading(*src))
        if key not in self._mats:
            spec = LinearMapSpec(name, Grading(*src))
            if self.store is not None:
                M = self.store.matrix(spec, self)
            else:
                M = assemble_matrix(spec, self.basis(spec.source), self.basis(spec.target),
                                    jobs=self.jobs)
            self._mats[key] = M
        return self._mats[key]

    def rank(self, key, M: SparseMatrix) -> int:
        if key not in self._ranks:
            self._ranks[key] = rank_auto(M, self.field, self.primes)
        return self._ranks[key]

    # -- slot machinery -----------------------------------------------------

    def slot_basis(self, spec: ComplexSpec, row: int, d: int) -> list[tuple[Grading, int]]:
        """``(grading, offset)`` blocks of the slot's concatenated basis."""
        out, off = [], 0
        for g in spec.slot_gradings(row, d):
            n = len(self.basis(g))
            if n:
                out.append((g, off))
                off += n
        return out

    def slot_dim(self, spec: ComplexSpec, row: int, d: int) -> int:
        return sum(len(self.basis(g)) for g, _ in self.slot_basis(spec, row, d))

    def slot_matrix(self, spec: ComplexSpec, row: int, d: int) -> SparseMatrix:
        """The differential from slot ``(row, d)`` to ``(row, d+1)``."""
        src = self.slot_basis(spec, row, d)
        tgt = self.slot_basis(spec, row, d + 1)
        toff = dict(tgt)
        nrows = sum(len(self.basis(g)) for g, _ in tgt)
        ncols = sum(len(self.basis(g)) for g, _ in src)
        entries = {}
        for g, coff in src:
            for name in spec.components:
                t = target_grading(name, g)
                if t not in toff:
                    continue
                roff = toff[t]
                for (i, j), x in self.matrix(name, g).entries.items():
                    entries[(roff + i, coff + j)] = entries.get((roff + i, coff + j), 0) + x
        return SparseMatrix(nrows, ncols, entries)

    def slot_rank(self, spec: ComplexSpec, row: int, d: int) -> int:
        if not self.slot_basis(spec, row, d) or not self.slot_basis(spec, row, d + 1):
            return 0
        key = (spec.space, spec.differential, row, d)
        if key not in self._ranks:
            self._ranks[key] = rank_auto(self.slot_matrix(spec, row, d), self.field, self.primes)
        return self._ranks[key]

    def slot_vector(self, spec: ComplexSpec, row: int, d: int, vec: GraphVector) -> dict:
        blocks = dict(self.slot_basis(spec, row, d))
        out = {}
        for b, c in vec.items():
            g = b.grading
            if g not in blocks:
                raise ValueError(f"{encode(b)} is not in slot ({row}, {d})")
            out[blocks[g] + self.index(g)[b]] = c
        return out

    def slot_graph_vector(self, spec: ComplexSpec, row: int, d: int, coords: dict) -> GraphVector:
        out = {}
        for g, off in self.slot_basis(spec, row, d):
            basis = self.basis(g)
            for k, b in enumerate(basis):
                c = coords.get(off + k)
                if c:
                    out[b] = c
        return GraphVector(out)


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------

def cohomology_dims(spec: ComplexSpec, engine: Optional[Engine] = None) -> DimensionTable:
    """Dimension of cohomology at every slot meeting the window; slots whose
    neighbourhood is truncated are UNKNOWN."""
    engine = engine or Engine()
    table = DimensionTable(spec.row_label)
    for row, d in spec.slots():
        if not all(spec.slot_complete(row, dd) for dd in (d - 1, d, d + 1)):
            table.entries[(row, d)] = None
            continue
        n = engine.slot_dim(spec, row, d)
        if n == 0:
            table.entries[(row, d)] = 0
            continue
        table.entries[(row, d)] = (n - engine.slot_rank(spec, row, d)
                                   - engine.slot_rank(spec, row, d - 1))
    return table


def gc_window(rows: Iterable[int], degrees: Iterable[int]) -> Window:
    """Smallest box making every ``(b, d)`` slot of the hairless complex interior."""
    vmax, emax = 2, 2
    for b in rows:
        for d in degrees:
            v = d - 2 * b  # slot d+1
            vmax = max(vmax, v)
            emax = max(emax, v + b)
    return Window(vmax, emax, 0)


def gc_table(rows: Iterable[int], degrees: Iterable[int],
             engine: Optional[Engine] = None) -> DimensionTable:
    """Cohomology of (GC, delta) at the requested loop orders and degrees."""
    rows, degrees = list(rows), list(degrees)
    if not rows or not degrees:
        return DimensionTable("b")
    spec = ComplexSpec("GC", "delta", gc_window(rows, degrees))
    full = cohomology_dims(spec, engine)
    out = DimensionTable("b")
    for b in rows:
        for d in degrees:
            if spec.slot_gradings(b, d) or (b, d) in full.entries:
                out.entries[(b, d)] = full.entries.get((b, d), 0)
    return out


@dataclass
class AcyclicityReport:
    spec: ComplexSpec
    interior: list
    nonzero: list

    @property
    def ok(self) -> bool:
        return not self.nonzero


def verify_acyclic(spec: ComplexSpec, engine: Optional[Engine] = None) -> AcyclicityReport:
    table = cohomology_dims(spec, engine)
    known = table.known()
    return AcyclicityReport(spec, sorted(known),
                            sorted((k, x) for k, x in known.items() if x != 0))


@dataclass
class QuasiIsoReport:
    compared: list
    mismatches: list

    @property
    def ok(self) -> bool:
        return not self.mismatches


def quasi_iso_check(window: Window, engine: Optional[Engine] = None) -> QuasiIsoReport:
    """Compare H(GC, delta) with H(H>=0GC, delta+Delta) slot by slot."""
    engine = engine or Engine()
    gc = cohomology_dims(ComplexSpec("GC", "delta", window), engine).known()
    hz = cohomology_dims(ComplexSpec("H>=0GC", "delta+Delta", window), engine).known()
    compared, bad = [], []
    for key in sorted(set(gc) | set(hz)):
        if key in gc and key in hz:
            compared.append((key, gc[key], hz[key]))
            if gc[key] != hz[key]:
                bad.append((key, gc[key], hz[key]))
    return QuasiIsoReport(compared, bad)


def euler_check(spec: ComplexSpec, row: int, degrees: Optional[Sequence[int]] = None,
                engine: Optional[Engine] = None) -> bool:
    """Euler characteristic of the column truncated to ``degrees`` computed two
    ways: from chain dimensions, and from cohomology whose kernels come from
    exact rational null spaces and whose images come from the rank routine."""
    engine = engine or Engine()
    if degrees is None:
        degrees = sorted(d for r, d in spec.slots() if r == row)
    degrees = sorted(degrees)
    if not degrees:
        return True
    for d in degrees:
        if not spec.slot_complete(row, d):
            raise ValueError(f"slot ({row}, {d}) is truncated by the window; check refused")
    lo, hi = degrees[0], degrees[-1]
    chain = sum((-1) ** d * engine.slot_dim(spec, row, d) for d in degrees)
    total = 0
    for d in degrees:
        n = engine.slot_dim(spec, row, d)
        if d < hi and n:
            ker = len(kernel_basis(engine.slot_matrix(spec, row, d)))
        else:
            ker = n
        im = rank(engine.slot_matrix(spec, row, d - 1)) if d > lo else 0
        total += (-1) ** d * (ker - im)
    return chain == total


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

def _frac(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass
class Certificate:
    """Witness ``w`` with ``(delta+Delta) w = chi(gamma1) - coefficient * gamma2``."""

    gamma1: GraphVector
    coefficient: Fraction
    gamma2: GraphVector
    witness: GraphVector
    verified: bool = False

    def residual(self) -> GraphVector:
        lhs = apply_map("delta", self.witness) + apply_map("Delta", self.witness)
        return lhs + self.coefficient * self.gamma2 - apply_map("chi", self.gamma1)

    def verify(self) -> bool:
        ok = (not self.residual()
              and not apply_map("delta", self.gamma1)
              and not apply_map("delta", self.gamma2))
        self.verified = ok
        return ok

    def to_json(self) -> str:
        data = {"gamma1": self.gamma1.to_json(), "coefficient": _frac(self.coefficient),
                "gamma2": self.gamma2.to_json(), "witness": self.witness.to_json(),
                "verified": self.verified}
        return json.dumps(data, sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        data = json.loads(text)
        return cls(GraphVector.from_json(data["gamma1"]), Fraction(data["coefficient"]),
                   GraphVector.from_json(data["gamma2"]), GraphVector.from_json(data["witness"]),
                   bool(data["verified"]))


@dataclass
class NoPairInWindow:
    reason: str
    slot: Optional[tuple] = None


def cohomology_representatives(grading, engine: Engine) -> list[GraphVector]:
    """delta-cocycles at a hairless grading that are independent modulo
    coboundaries (one per cohomology class)."""
    v, e, s = grading
    basis = engine.basis(grading)
    if not basis:
        return []
    D_out = engine.matrix("delta", grading)
    D_in = engine.matrix("delta", (v - 1, e - 1, s)) if v > 1 and e > 0 else SparseMatrix(len(basis), 0)
    cols = D_in.columns()
    current = rank(SparseMatrix.from_columns(len(basis), cols)) if cols else 0
    reps = []
    for vec in kernel_basis(D_out):
        trial = cols + [vec]
        r = rank(SparseMatrix.from_columns(len(basis), trial))
        if r > current:
            cols, current = trial, r
            reps.append(GraphVector({basis[i]: c for i, c in vec.items()}))
    return reps


def cancellation_pair(gamma1: GraphVector, window: Window,
                      partners: Optional[Sequence[GraphVector]] = None,
                      engine: Optional[Engine] = None) -> Union[Certificate, NoPairInWindow]:
    """Solve ``(delta+Delta) w = chi(gamma1) - sum_i c_i gamma2_i`` in one
    linear system over the hairy slot of ``chi(gamma1)``."""
    engine = engine or Engine()
    if not gamma1:
        return Certificate(GraphVector(), Fraction(0), GraphVector(), GraphVector(), True)
    g1 = gamma1.grading
    if g1.s != 0:
        raise ValueError("gamma1 must be hairless")
    image = apply_map("delta", gamma1)
    if image:
        raise ValueError(f"gamma1 is not delta-closed: delta(gamma1) = {image!r}")
    v, e, _ = g1
    d = g1.degree
    row = e - v + 1
    hz = ComplexSpec("H>=0GC", "delta+Delta", window)
    for dd in (d, d + 1):
        if not hz.slot_complete(row, dd):
            return NoPairInWindow(f"slot (g={row}, d={dd}) of H>=0GC is truncated by the window",
                                  (row, dd))
    target = Grading(d + 1 - 1 - 2 * row, d + 1 - 1 - 2 * row + row, 0)
    if partners is None:
        partners = []
        if target.v >= 2:
            for gg in (target, (target.v + 1, target.e + 1, 0), (target.v - 1, target.e - 1, 0)):
                if not window.contains(gg):
                    return NoPairInWindow(f"hairless grading {tuple(gg)} needed for partner "
                                          f"classes is outside the window", (row, d + 1))
            partners = cohomology_representatives(target, engine)
    chi1 = apply_map("chi", gamma1)
    D = engine.slot_matrix(hz, row, d)
    cols = D.columns()
    for p in partners:
        cols.append(engine.slot_vector(hz, row, d + 1, p))
    A = SparseMatrix.from_columns(D.nrows, cols)
    rhs = engine.slot_vector(hz, row, d + 1, chi1)
    x = solve(A, rhs)
    if x is None:
        return NoPairInWindow(f"chi(gamma1) is not cohomologous to a partner combination "
                              f"in slot (g={row}, d={d + 1})", (row, d + 1))
    w = engine.slot_graph_vector(hz, row, d, {i: c for i, c in x.items() if i < D.ncols})
    cs = [x.get(D.ncols + k, Fraction(0)) for k in range(len(partners))]
    combo = GraphVector()
    for c, p in zip(cs, partners):
        combo = combo + c * p
    lead = next((c for c in cs if c), Fraction(0))
    gamma2 = (1 / lead) * combo if lead else GraphVector()
    cert = Certificate(gamma1, lead, gamma2, w)
    if not cert.verify():
        raise ArithmeticError("certificate failed self-verification")
    return cert


# ---------------------------------------------------------------------------
# matrix identities
# ---------------------------------------------------------------------------

IDENTITIES = {
    "d2": (("delta", "delta"),),
    "Delta2": (("Delta", "Delta"),),
    "chi2": (("chi", "chi"),),
    "anticommute": (("delta", "Delta"), ("delta", "chi"), ("Delta", "chi")),
    "homotopy": (("chi", "beta"),),
}


@dataclass
class IdentityReport:
    identity: str
    checked: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _composite(engine: Engine, first: str, second: str, src: Grading) -> Optional[SparseMatrix]:
    """Matrix of ``second . first`` on ``src`` or None when a basis is empty."""
    mid = target_grading(first, src)
    if min(mid) < 0 or not engine.basis(mid):
        return None
    return engine.matrix(second, mid) @ engine.matrix(first, src)


def check_identity(name: str, window: Window, engine: Optional[Engine] = None) -> IdentityReport:
    """Check one identity on every source grading of the window whose target
    grading also lies in it.  ``homotopy`` checks chi beta + beta chi = v Id."""
    if name not in IDENTITIES:
        raise ValueError(f"unknown identity {name!r}; expected one of {sorted(IDENTITIES)}")
    engine = engine or Engine()
    report = IdentityReport(name)
    gradings = [Grading(v, e, s) for v in range(1, window.v + 1)
                for e in range(0, window.e + 1) for s in range(0, window.s + 1)]
    for src in gradings:
        n = len(engine.basis(src))
        if not n:
            continue
        for f, g in IDENTITIES[name]:
            tgt = target_grading(g, target_grading(f, src))
            if min(tgt) < 0 or not window.contains(tgt):
                continue
            m = len(engine.basis(tgt))
            total = SparseMatrix.zeros(m, n)
            for a, b in {(f, g), (g, f)}:
                part = _composite(engine, a, b, src)
                if part is not None:
                    total = total + part
            if name == "homotopy":
                total = total - SparseMatrix.identity(n).scaled(src.v)
                label = f"chi beta + beta chi - {src.v} Id"
            elif f == g:
                label = f"{f}^2"
            else:
                label = f"{f} {g} + {g} {f}"
            report.checked.append((src, label))
            if not total.is_zero():
                report.failures.append((src, label, total.nnz))
    return report

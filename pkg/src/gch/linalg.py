"""Exact sparse linear algebra over the rationals and prime fields.

Matrices are dictionaries of nonzero entries.  Rank uses elimination with a
Markowitz-style pivot choice (sparsest column, then sparsest row); over the
rationals rows are kept integral and divided by their content after every
update, so no fractions appear during elimination.
"""
from __future__ import annotations

import heapq
import json
import random
import re
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Optional, Sequence

from sympy import isprime

__all__ = [
    "SparseMatrix",
    "rank",
    "rank_modp",
    "kernel_basis",
    "solve",
    "rank_modp_crosscheck",
    "CrosscheckResult",
    "random_primes",
    "rank_auto",
    "write_matrix",
    "read_matrix",
    "rank_record",
]

RATIONAL = "q"


@dataclass
class SparseMatrix:
    """``nrows x ncols`` matrix; ``field`` is ``None`` for the rationals or a
    prime ``p`` for GF(p)."""

    nrows: int
    ncols: int
    entries: dict = field(default_factory=dict)
    field: Optional[int] = None

    def __post_init__(self):
        for (i, j), x in list(self.entries.items()):
            if not (0 <= i < self.nrows and 0 <= j < self.ncols):
                raise IndexError(f"entry ({i}, {j}) outside {self.nrows}x{self.ncols}")
            if self.field is None:
                x = Fraction(x)
            else:
                x = int(x) % self.field
            if x:
                self.entries[(i, j)] = x
            else:
                del self.entries[(i, j)]

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[dict], field=None) -> "SparseMatrix":
        entries = {(i, j): x for j, col in enumerate(columns) for i, x in col.items()}
        return cls(nrows, len(columns), entries, field)

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence], field=None) -> "SparseMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        entries = {(i, j): x for i, r in enumerate(rows) for j, x in enumerate(r) if x}
        return cls(nrows, ncols, entries, field)

    @classmethod
    def zeros(cls, nrows: int, ncols: int, field=None) -> "SparseMatrix":
        return cls(nrows, ncols, {}, field)

    @classmethod
    def identity(cls, n: int, field=None) -> "SparseMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)}, field)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def to_dense(self) -> list[list]:
        zero = Fraction(0) if self.field is None else 0
        out = [[zero] * self.ncols for _ in range(self.nrows)]
        for (i, j), x in self.entries.items():
            out[i][j] = x
        return out

    def rows(self) -> list[dict]:
        out: list = [dict() for _ in range(self.nrows)]
        for (i, j), x in self.entries.items():
            out[i][j] = x
        return out

    def columns(self) -> list[dict]:
        out: list = [dict() for _ in range(self.ncols)]
        for (i, j), x in self.entries.items():
            out[j][i] = x
        return out

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.ncols, self.nrows,
                            {(j, i): x for (i, j), x in self.entries.items()}, self.field)

    def permuted(self, row_perm: Sequence[int], col_perm: Sequence[int]) -> "SparseMatrix":
        return SparseMatrix(self.nrows, self.ncols,
                            {(row_perm[i], col_perm[j]): x for (i, j), x in self.entries.items()},
                            self.field)

    def _check_field(self, other: "SparseMatrix") -> None:
        if self.field != other.field:
            raise ValueError("matrices over different fields")

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        self._check_field(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        out = dict(self.entries)
        for k, x in other.entries.items():
            out[k] = out.get(k, 0) + x
        return SparseMatrix(self.nrows, self.ncols, out, self.field)

    def __neg__(self) -> "SparseMatrix":
        return SparseMatrix(self.nrows, self.ncols,
                            {k: -x for k, x in self.entries.items()}, self.field)

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self + (-other)

    def scaled(self, c) -> "SparseMatrix":
        return SparseMatrix(self.nrows, self.ncols,
                            {k: c * x for k, x in self.entries.items()}, self.field)

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        self._check_field(other)
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        by_row: dict = {}
        for (k, j), x in other.entries.items():
            by_row.setdefault(k, []).append((j, x))
        out: dict = {}
        for (i, k), a in self.entries.items():
            for j, b in by_row.get(k, ()):
                out[(i, j)] = out.get((i, j), 0) + a * b
        return SparseMatrix(self.nrows, other.ncols, out, self.field)

    def apply(self, vec: dict) -> dict:
        """Matrix times a sparse column vector ``{index: value}``."""
        out: dict = {}
        for (i, j), x in self.entries.items():
            if j in vec:
                out[i] = out.get(i, 0) + x * vec[j]
        return {i: x for i, x in out.items() if x}

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.shape == other.shape and self.field == other.field
                and self.entries == other.entries)

    def reduce_mod(self, p: int) -> "SparseMatrix":
        """Image in GF(p); raises ZeroDivisionError if p divides a denominator."""
        if self.field is not None:
            raise ValueError("matrix is already modular")
        out = {}
        for k, x in self.entries.items():
            x = Fraction(x)
            if x.denominator % p == 0:
                raise ZeroDivisionError(f"{p} divides denominator {x.denominator}")
            out[k] = x.numerator * pow(x.denominator, -1, p) % p
        return SparseMatrix(self.nrows, self.ncols, out, p)


# ---------------------------------------------------------------------------
# elimination
# ---------------------------------------------------------------------------

def _integer_rows(M: SparseMatrix) -> list[dict]:
    rows = M.rows()
    out = []
    for r in rows:
        if not r:
            continue
        den = 1
        for x in r.values():
            den = lcm(den, x.denominator)
        out.append({j: int(x * den) for j, x in r.items()})
    return out


def _eliminate(rows: list[dict], p: Optional[int]) -> int:
    """Destructive rank computation on row dictionaries."""
    colrows: dict = {}
    for i, r in enumerate(rows):
        for j in r:
            colrows.setdefault(j, set()).add(i)
    heap = [(len(s), j) for j, s in colrows.items()]
    heapq.heapify(heap)
    rank = 0
    while heap:
        cnt, c = heapq.heappop(heap)
        s = colrows.get(c)
        if not s or len(s) != cnt:
            continue
        r = min(s, key=lambda i: (len(rows[i]), i))
        prow = rows[r]
        pv = prow[c]
        touched = set()
        for j in prow:
            colrows[j].discard(r)
            touched.add(j)
        rows[r] = {}
        if p is not None:
            pinv = pow(pv, -1, p)
        for i in list(colrows[c]):
            row = rows[i]
            a = row[c]
            if p is not None:
                f = a * pinv % p
                for j, x in prow.items():
                    y = (row.get(j, 0) - f * x) % p
                    if y:
                        if j not in row:
                            colrows[j].add(i)
                        row[j] = y
                    elif j in row:
                        del row[j]
                        colrows[j].discard(i)
                    touched.add(j)
            else:
                g = gcd(a, pv)
                ma, mb = pv // g, a // g
                if ma != 1:
                    for j in row:
                        row[j] *= ma
                for j, x in prow.items():
                    y = row.get(j, 0) - mb * x
                    if y:
                        if j not in row:
                            colrows[j].add(i)
                        row[j] = y
                    elif j in row:
                        del row[j]
                        colrows[j].discard(i)
                    touched.add(j)
                if row:
                    cont = 0
                    for x in row.values():
                        cont = gcd(cont, x)
                        if cont == 1:
                            break
                    if cont > 1:
                        for j in row:
                            row[j] //= cont
        rank += 1
        for j in touched:
            s = colrows.get(j)
            if s:
                heapq.heappush(heap, (len(s), j))
            elif s is not None:
                del colrows[j]
    return rank


def rank(M: SparseMatrix) -> int:
    """Exact rank over the matrix's own field."""
    if M.field is not None:
        return _eliminate(M.rows(), M.field)
    return _eliminate(_integer_rows(M), None)


def rank_modp(M: SparseMatrix, p: int) -> int:
    return rank(M.reduce_mod(p)) if M.field is None else rank(M)


def _rref(rows: list[dict], ncols: int) -> tuple[list[dict], list[int]]:
    """Reduced row echelon form over the rationals (column order pivots)."""
    rows = [dict(r) for r in rows if r]
    pivots: list[int] = []
    done: list[dict] = []
    for c in range(ncols):
        cand = [k for k, r in enumerate(rows) if c in r]
        if not cand:
            continue
        k = min(cand, key=lambda k: len(rows[k]))
        prow = rows.pop(k)
        inv = 1 / prow[c]
        prow = {j: x * inv for j, x in prow.items()}
        for r in rows + done:
            a = r.get(c)
            if a:
                for j, x in prow.items():
                    y = r.get(j, 0) - a * x
                    if y:
                        r[j] = y
                    else:
                        r.pop(j, None)
        done.append(prow)
        pivots.append(c)
    return done, pivots


def kernel_basis(M: SparseMatrix) -> list[dict]:
    """Basis of the right null space as sparse vectors ``{col: Fraction}``."""
    if M.field is not None:
        raise ValueError("kernel_basis works over the rationals")
    rows = [{j: Fraction(x) for j, x in r.items()} for r in M.rows()]
    rref, pivots = _rref(rows, M.ncols)
    pivset = set(pivots)
    out = []
    for f in range(M.ncols):
        if f in pivset:
            continue
        vec = {f: Fraction(1)}
        for r, c in zip(rref, pivots):
            x = r.get(f)
            if x:
                vec[c] = -x
        out.append(vec)
    return out


def solve(A: SparseMatrix, rhs: dict) -> Optional[dict]:
    """Some exact solution ``x`` of ``A x = rhs`` (sparse dicts), or ``None``."""
    if A.field is not None:
        raise ValueError("solve works over the rationals")
    for i in rhs:
        if not 0 <= i < A.nrows:
            raise ValueError(f"rhs index {i} outside {A.nrows} rows")
    n = A.ncols
    rows = [{j: Fraction(x) for j, x in r.items()} for r in A.rows()]
    for i, x in rhs.items():
        if x:
            rows[i][n] = Fraction(x)
    rref, pivots = _rref(rows, n + 1)
    if pivots and pivots[-1] == n:
        return None
    x = {c: r[n] for r, c in zip(rref, pivots) if r.get(n)}
    if A.apply(x) != {i: Fraction(y) for i, y in rhs.items() if y}:
        raise ArithmeticError("solution failed verification")
    return x


@dataclass
class CrosscheckResult:
    rank: int
    ranks: dict
    skipped: list
    agree: bool


def rank_modp_crosscheck(M: SparseMatrix, primes: Iterable[int]) -> CrosscheckResult:
    """Ranks modulo several primes.  Primes dividing a denominator are
    skipped and reported; ``agree`` is False when the ranks differ."""
    primes = list(primes)
    if len(primes) < 2:
        raise ValueError("need at least two primes")
    ranks, skipped = {}, []
    for p in primes:
        try:
            ranks[p] = rank(M.reduce_mod(p))
        except ZeroDivisionError:
            skipped.append(p)
    vals = set(ranks.values())
    return CrosscheckResult(max(vals) if vals else 0, ranks, skipped, len(vals) <= 1)


def random_primes(count: int, seed: int, bits: int = 31) -> list[int]:
    rng = random.Random(seed)
    out: list[int] = []
    while len(out) < count:
        q = rng.randrange(1 << (bits - 1), 1 << bits) | 1
        if isprime(q) and q not in out:
            out.append(q)
    return out


def rank_auto(M: SparseMatrix, field: str = "p2", primes: Sequence[int] = ()) -> int:
    """Rank under a field policy: ``"q"`` exact rational, ``"p2"`` two-prime
    modular with rational escalation on disagreement."""
    if field == RATIONAL or M.nnz == 0:
        return rank(M)
    if field != "p2":
        raise ValueError(f"unknown field policy {field!r}")
    res = rank_modp_crosscheck(M, primes)
    if not res.agree or res.skipped:
        return rank(M)
    return res.rank


# ---------------------------------------------------------------------------
# files
# ---------------------------------------------------------------------------

def _fmt_grading(g) -> str:
    return "(" + ",".join(str(x) for x in g) + ")"


def format_matrix(M: SparseMatrix, name: str, src, dst) -> str:
    lines = [f"# gch-matrix map={name} src={_fmt_grading(src)} dst={_fmt_grading(dst)} "
             f"rows={M.nrows} cols={M.ncols}"]
    for (i, j) in sorted(M.entries, key=lambda k: (k[1], k[0])):
        x = Fraction(M.entries[(i, j)])
        lines.append(f"{i} {j} {x.numerator}/{x.denominator}")
    return "\n".join(lines) + "\n"


def write_matrix(path, M: SparseMatrix, name: str, src, dst) -> None:
    from .store import atomic_write

    atomic_write(path, format_matrix(M, name, src, dst))


_MHEAD = re.compile(r"^# gch-matrix map=(\S+) src=\((\d+),(\d+),(\d+)\) "
                    r"dst=\((\d+),(\d+),(\d+)\) rows=(\d+) cols=(\d+)$")


def parse_matrix(text: str) -> tuple[SparseMatrix, str, tuple, tuple]:
    lines = text.splitlines()
    m = _MHEAD.match(lines[0].strip()) if lines else None
    if not m:
        raise ValueError(f"bad matrix header {lines[0] if lines else ''!r}")
    g = list(map(int, m.groups()[1:]))
    entries = {}
    for line in lines[1:]:
        if not line.strip():
            continue
        i, j, x = line.split()
        entries[(int(i), int(j))] = Fraction(x)
    return (SparseMatrix(g[6], g[7], entries), m.group(1), tuple(g[0:3]), tuple(g[3:6]))


def read_matrix(path):
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read())


def rank_record(name: str, src, dst, M: SparseMatrix, field: str = "q",
                primes: Sequence[int] = ()) -> dict:
    t0 = time.perf_counter()
    r = rank_auto(M, field, primes)
    ms = (time.perf_counter() - t0) * 1000
    return {"map": name, "src": list(src), "dst": list(dst), "field": field,
            "rank": r, "elapsed_ms": round(ms, 3)}


def dumps_record(rec: dict) -> str:
    return json.dumps(rec, sort_keys=True)

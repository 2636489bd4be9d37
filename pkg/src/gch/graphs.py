"""Graphs of the odd graph complex: labeled graphs, signed canonical forms,
zero detection and exhaustive basis generation.

A graph has ``v`` numbered vertices, ``e`` directed edges (order carries no
sign) and ``s`` numbered hairs.  Orientation signs: an odd vertex
permutation, a reversed edge and an odd hair permutation each flip the sign.
All indices are 1-based, as in the text encoding.
"""
from __future__ import annotations

import itertools
import re
from functools import lru_cache
from typing import Iterable, Iterator, NamedTuple, Optional

__all__ = [
    "LabeledGraph",
    "BasisElement",
    "Grading",
    "canonicalize",
    "automorphism_sign_zero",
    "generate_basis",
    "is_connected",
    "encode",
    "decode",
    "write_basis",
    "read_basis",
    "ParseError",
]

Edge = tuple[int, int]


class ParseError(ValueError):
    """Raised when a basis line does not follow the grammar or is not canonical."""


class Grading(NamedTuple):
    v: int
    e: int
    s: int

    @property
    def degree(self) -> int:
        return 1 - self.v + 2 * self.e + self.s

    @property
    def loop_order(self) -> int:
        return self.e - self.v

    @property
    def hair_filtration(self) -> int:
        return self.e - self.v - self.s


class LabeledGraph(NamedTuple):
    """A concrete graph before the sign quotient."""

    v: int
    edges: tuple[Edge, ...]
    hairs: tuple[int, ...] = ()

    @property
    def e(self) -> int:
        return len(self.edges)

    @property
    def s(self) -> int:
        return len(self.hairs)

    @property
    def grading(self) -> Grading:
        return Grading(self.v, len(self.edges), len(self.hairs))

    def check(self) -> None:
        if self.v < 1:
            raise ValueError(f"vertex count must be positive, got {self.v}")
        for t, h in self.edges:
            if not (1 <= t <= self.v and 1 <= h <= self.v):
                raise ValueError(f"edge {t}>{h} out of range for v={self.v}")
        for h in self.hairs:
            if not 1 <= h <= self.v:
                raise ValueError(f"hair host {h} out of range for v={self.v}")

    def relabel(self, perm: tuple[int, ...], flips: Iterable[bool] = (),
                hair_order: Optional[tuple[int, ...]] = None) -> "LabeledGraph":
        """Apply a vertex relabeling ``i -> perm[i-1]``, optional edge reversals
        and a hair reordering (``hair_order[k]`` is the old index of new hair k)."""
        flips = list(flips) or [False] * len(self.edges)
        edges = []
        for (t, h), f in zip(self.edges, flips):
            t, h = perm[t - 1], perm[h - 1]
            edges.append((h, t) if f else (t, h))
        hairs = [perm[h - 1] for h in self.hairs]
        if hair_order is not None:
            hairs = [hairs[k] for k in hair_order]
        return LabeledGraph(self.v, tuple(edges), tuple(hairs))


class BasisElement(NamedTuple):
    """Canonical representative of a nonzero class: edges written ``tail < head``
    and sorted, hairs sorted, vertex labeling minimal in the search order."""

    v: int
    edges: tuple[Edge, ...]
    hairs: tuple[int, ...] = ()

    @property
    def e(self) -> int:
        return len(self.edges)

    @property
    def s(self) -> int:
        return len(self.hairs)

    @property
    def grading(self) -> Grading:
        return Grading(self.v, len(self.edges), len(self.hairs))

    @property
    def graph(self) -> LabeledGraph:
        return LabeledGraph(self.v, self.edges, self.hairs)

    def __str__(self) -> str:
        return encode(self)


# ---------------------------------------------------------------------------
# canonical labeling
# ---------------------------------------------------------------------------

def _parity(seq) -> int:
    """+1 for an even arrangement of distinct integers, -1 for odd."""
    inv = 0
    n = len(seq)
    for i in range(n):
        a = seq[i]
        for j in range(i + 1, n):
            if seq[j] < a:
                inv += 1
    return -1 if inv & 1 else 1


def _refine(cells: list, nbrs: list) -> list:
    # equitable refinement of an ordered partition; splits are ordered by
    # the neighbour-count signature so the result is labeling invariant
    n = len(nbrs)
    cell_of = [0] * n
    while True:
        for ci, c in enumerate(cells):
            for u in c:
                cell_of[u] = ci
        k = len(cells)
        new = []
        changed = False
        for c in cells:
            if len(c) == 1:
                new.append(c)
                continue
            groups: dict = {}
            for u in c:
                cnt = [0] * k
                for w, m in nbrs[u]:
                    cnt[cell_of[w]] += m
                groups.setdefault(tuple(cnt), []).append(u)
            if len(groups) == 1:
                new.append(c)
            else:
                changed = True
                for key in sorted(groups):
                    new.append(groups[key])
        cells = new
        if not changed:
            return cells


def _leaves(cells: list, nbrs: list) -> Iterator[list]:
    cells = _refine(cells, nbrs)
    for i, c in enumerate(cells):
        if len(c) > 1:
            break
    else:
        yield [c[0] for c in cells]
        return
    for u in c:
        rest = [w for w in c if w != u]
        yield from _leaves(cells[:i] + [[u], rest] + cells[i + 1:], nbrs)


def _search(v: int, edges, hairs):
    """Return ``(form, labelings)`` where ``form`` is the minimal
    ``(edges, hairs)`` over search leaves and ``labelings`` lists every
    old->new (0-based) labeling achieving it."""
    mult: dict = {}
    deg = [0] * v
    for t, h in edges:
        a, b = t - 1, h - 1
        key = (a, b) if a < b else (b, a)
        mult[key] = mult.get(key, 0) + 1
        deg[a] += 1
        deg[b] += 1
    nbrs: list = [[] for _ in range(v)]
    for (a, b), m in mult.items():
        nbrs[a].append((b, m))
        nbrs[b].append((a, m))
    hairy = [0] * v
    for h in hairs:
        hairy[h - 1] = 1
    groups: dict = {}
    for u in range(v):
        groups.setdefault((hairy[u], -deg[u]), []).append(u)
    cells = [groups[k] for k in sorted(groups)]

    pairs = list(mult.items())
    best = None
    winners: list = []
    pos = [0] * v
    for order in _leaves(cells, nbrs):
        for i, u in enumerate(order):
            pos[u] = i
        el = []
        for (a, b), m in pairs:
            x, y = pos[a] + 1, pos[b] + 1
            el.extend([(x, y) if x < y else (y, x)] * m)
        el.sort()
        form = (tuple(el), tuple(sorted(pos[h - 1] + 1 for h in hairs)))
        if best is None or form < best:
            best = form
            winners = [tuple(pos)]
        elif form == best:
            winners.append(tuple(pos))
    return best, winners


def _labeling_sign(pos, edges, hairs) -> int:
    sign = _parity(pos)
    for t, h in edges:
        if pos[t - 1] > pos[h - 1]:
            sign = -sign
    return sign * _parity([pos[h - 1] for h in hairs])


def canonicalize(g: LabeledGraph) -> Optional[tuple[BasisElement, int]]:
    """Canonical representative and sign with ``g = sign * rep``, or ``None``
    when the class of ``g`` vanishes.

    Tadpoles and doubled hairs vanish silently.  Vertices meeting fewer than
    two edges are outside the complex and rejected.
    """
    g.check()
    for t, h in g.edges:
        if t == h:
            return None
    if len(set(g.hairs)) != len(g.hairs):
        return None
    deg = [0] * (g.v + 1)
    for t, h in g.edges:
        deg[t] += 1
        deg[h] += 1
    if any(d < 2 for d in deg[1:]):
        raise ValueError("every vertex must meet at least two edges")
    form, winners = _search(g.v, g.edges, g.hairs)
    sign = _labeling_sign(winners[0], g.edges, g.hairs)
    for pos in winners[1:]:
        if _labeling_sign(pos, g.edges, g.hairs) != sign:
            return None
    return BasisElement(g.v, form[0], form[1]), sign


def automorphism_sign_zero(g: LabeledGraph) -> bool:
    """True iff some automorphism of ``g`` acts with total sign -1."""
    g.check()
    if any(t == h for t, h in g.edges) or len(set(g.hairs)) != len(g.hairs):
        return True
    _, winners = _search(g.v, g.edges, g.hairs)
    signs = {_labeling_sign(p, g.edges, g.hairs) for p in winners}
    return len(signs) > 1


def unsigned_form(v: int, edges, hairs=()) -> tuple:
    """Isomorphism invariant normal form ignoring orientation signs."""
    return _search(v, edges, hairs)[0]


def is_connected(v: int, edges) -> bool:
    parent = list(range(v + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    comps = v
    for t, h in edges:
        a, b = find(t), find(h)
        if a != b:
            parent[a] = b
            comps -= 1
    return comps == 1


# ---------------------------------------------------------------------------
# generation
# ---------------------------------------------------------------------------

def _splits(v: int, edges) -> Iterator[tuple]:
    # inverse edge contraction: x becomes x and v+1 joined by a simple edge,
    # each side keeping at least one old edge
    y = v + 1
    for x in range(1, v + 1):
        others = []
        at_x: dict = {}
        for t, h in edges:
            if t == x:
                at_x[h] = at_x.get(h, 0) + 1
            elif h == x:
                at_x[t] = at_x.get(t, 0) + 1
            else:
                others.append((t, h))
        nbr = sorted(at_x)
        mults = [at_x[w] for w in nbr]
        total = sum(mults)
        for ks in itertools.product(*(range(m + 1) for m in mults)):
            moved = sum(ks)
            if moved == 0 or moved == total:
                continue
            if ks > tuple(m - k for m, k in zip(mults, ks)):
                continue
            new = list(others)
            for w, m, k in zip(nbr, mults, ks):
                new.extend([(min(x, w), max(x, w))] * (m - k))
                new.extend([(w, y)] * k)
            new.append((x, y))
            yield tuple(new)


def _parallel_additions(v: int, edges) -> Iterator[tuple]:
    counts: dict = {}
    for ed in edges:
        counts[ed] = counts.get(ed, 0) + 1
    simple = [ed for ed, m in counts.items() if m == 1]
    if len(simple) > 1:
        return
    targets = simple if simple else list(counts)
    for ed in targets:
        yield tuple(edges) + (ed,)


@lru_cache(maxsize=None)
def skeletons(v: int, e: int) -> tuple:
    """Hairless unsigned isomorphism classes (edge tuples in normal form) of
    connected loopless multigraphs with minimum degree 2.

    Every such graph with a simple edge contracts to a smaller one; the rest
    lose a parallel copy without leaving the family, except doubled stars.
    """
    if v < 2 or e < v:
        return ()
    if v == 2:
        return (((1, 2),) * e,)
    found = set()
    for g in skeletons(v - 1, e - 1):
        for child in _splits(v - 1, g):
            found.add(unsigned_form(v, child)[0])
    for g in skeletons(v, e - 1):
        for child in _parallel_additions(v, g):
            found.add(unsigned_form(v, child)[0])
    if e == 2 * (v - 1):
        star = tuple((1, w) for w in range(2, v + 1) for _ in range(2))
        found.add(unsigned_form(v, star)[0])
    return tuple(sorted(found))


@lru_cache(maxsize=None)
def _basis(v: int, e: int, s: int) -> tuple:
    if s > v:
        return ()
    found = set()
    for edges in skeletons(v, e):
        for hairs in itertools.combinations(range(1, v + 1), s):
            res = canonicalize(LabeledGraph(v, edges, hairs))
            if res is not None:
                found.add(res[0])
    return tuple(sorted(found))


def generate_basis(v: int, e: int, s: int) -> list[BasisElement]:
    """All nonzero classes of connected graphs with the given counts, sorted
    by normal form."""
    if v < 1 or e < 0 or s < 0:
        raise ValueError(f"invalid grading ({v}, {e}, {s})")
    return list(_basis(v, e, s))


# ---------------------------------------------------------------------------
# text encoding
# ---------------------------------------------------------------------------

def encode(b: BasisElement | LabeledGraph) -> str:
    parts = ["G", str(b.v), str(len(b.edges)), str(len(b.hairs)), "|"]
    parts += [f"{t}>{h}" for t, h in b.edges]
    parts.append("|")
    parts += [str(h) for h in b.hairs]
    return " ".join(parts)


_EDGE = re.compile(r"^(\d+)>(\d+)$")


def decode(text: str, canonical: bool = True) -> BasisElement | LabeledGraph:
    """Parse one line.  With ``canonical`` (default) the graph must already be
    in normal form and a ``BasisElement`` is returned."""
    tokens = text.strip().split()
    if len(tokens) < 6 or tokens[0] != "G":
        raise ParseError(f"expected 'G <v> <e> <s> | ... | ...', got {text!r}")
    try:
        v, e, s = (int(t) for t in tokens[1:4])
    except ValueError:
        raise ParseError(f"bad count token in {tokens[1:4]}") from None
    if tokens[4] != "|":
        raise ParseError(f"expected '|', got {tokens[4]!r}")
    rest = tokens[5:]
    if "|" not in rest:
        raise ParseError("missing second '|'")
    cut = rest.index("|")
    edges = []
    for tok in rest[:cut]:
        m = _EDGE.match(tok)
        if not m:
            raise ParseError(f"bad edge token {tok!r}")
        edges.append((int(m.group(1)), int(m.group(2))))
    hairs = []
    for tok in rest[cut + 1:]:
        if not tok.isdigit():
            raise ParseError(f"bad hair token {tok!r}")
        hairs.append(int(tok))
    if len(edges) != e or len(hairs) != s:
        raise ParseError(f"counts ({e}, {s}) do not match {len(edges)} edges, {len(hairs)} hairs")
    g = LabeledGraph(v, tuple(edges), tuple(hairs))
    try:
        g.check()
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    if not canonical:
        return g
    for tok, (t, h) in zip(rest[:cut], edges):
        if t >= h:
            raise ParseError(f"non-canonical edge token {tok!r}")
    try:
        res = canonicalize(g)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    if res is None:
        raise ParseError(f"graph {text.strip()!r} is zero in the complex")
    b, sign = res
    if b != BasisElement(*g) or sign != 1:
        raise ParseError(f"graph {text.strip()!r} is not in normal form (expected {encode(b)!r})")
    return b


def write_basis(path, grading, basis: list[BasisElement]) -> None:
    from .store import atomic_write

    v, e, s = grading
    lines = [f"# gch-basis v={v} e={e} s={s} n={len(basis)}"]
    lines += [encode(b) for b in basis]
    atomic_write(path, "\n".join(lines) + "\n")


def read_basis(path) -> tuple[Grading, list[BasisElement]]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        m = re.match(r"^# gch-basis v=(\d+) e=(\d+) s=(\d+) n=(\d+)$", header)
        if not m:
            raise ParseError(f"bad basis header {header!r}")
        v, e, s, n = map(int, m.groups())
        basis = [decode(line) for line in fh if line.strip()]
    if len(basis) != n:
        raise ParseError(f"header says n={n}, file has {len(basis)} lines")
    return Grading(v, e, s), basis

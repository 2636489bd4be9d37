"""The four linear maps on graph vectors and their matrices.

* ``delta``  splits a vertex: (v, e, s) -> (v+1, e+1, s)
* ``Delta``  turns a hair into an edge to another vertex: (v, e, s) -> (v, e+1, s-1)
* ``chi``    adds a hair: (v, e, s) -> (v, e, s+1)
* ``beta``   deletes a hair: (v, e, s) -> (v, e, s-1)

Sign conventions (pinned by the (anti)commutation identities checked in the
test-suite):

* the split vertex ``x`` keeps its label, the new vertex is ``v+1`` and the
  new edge points ``x -> v+1``;
* ``Delta`` replaces hair number ``p`` on ``x`` by an edge ``x -> y`` with
  sign ``(-1)**(p-1)``;
* ``chi`` puts the new hair in front of the hair list;
* ``beta`` removes hair number ``p`` with sign ``(-1)**(p-1)``;
* the three hair maps carry an extra ``(-1)**(v+1)``, which makes them
  anticommute with ``delta``.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Iterable, Iterator, Optional

from .graphs import (BasisElement, Grading, LabeledGraph, canonicalize, encode,
                     decode, is_connected)
from .linalg import SparseMatrix

__all__ = [
    "GraphVector",
    "LinearMapSpec",
    "MAPS",
    "delta",
    "Delta",
    "Delta_hair",
    "chi",
    "beta",
    "apply_map",
    "assemble_matrix",
    "target_grading",
]


class GraphVector:
    """Finite formal sum of basis elements with rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for b, c in items:
                self._add(b, c)

    def _add(self, b: BasisElement, c) -> None:
        x = self.terms.get(b, 0) + Fraction(c)
        if x:
            self.terms[b] = x
        else:
            self.terms.pop(b, None)

    @classmethod
    def from_graph(cls, g: LabeledGraph, coeff=1) -> "GraphVector":
        out = cls()
        res = canonicalize(g)
        if res is not None:
            out._add(res[0], res[1] * Fraction(coeff))
        return out

    @classmethod
    def basis(cls, b: BasisElement) -> "GraphVector":
        return cls({b: 1})

    def items(self):
        return self.terms.items()

    def __iter__(self):
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __getitem__(self, b: BasisElement) -> Fraction:
        return self.terms.get(b, Fraction(0))

    def __eq__(self, other) -> bool:
        if isinstance(other, GraphVector):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __add__(self, other: "GraphVector") -> "GraphVector":
        out = GraphVector(self.terms)
        for b, c in other.items():
            out._add(b, c)
        return out

    def __neg__(self) -> "GraphVector":
        return GraphVector({b: -c for b, c in self.terms.items()})

    def __sub__(self, other: "GraphVector") -> "GraphVector":
        return self + (-other)

    def __rmul__(self, c) -> "GraphVector":
        c = Fraction(c)
        if not c:
            return GraphVector()
        return GraphVector({b: c * x for b, x in self.terms.items()})

    __mul__ = __rmul__

    def gradings(self) -> set:
        return {b.grading for b in self.terms}

    @property
    def grading(self) -> Optional[Grading]:
        """The common grading, ``None`` for the zero vector."""
        gs = self.gradings()
        if len(gs) > 1:
            raise ValueError(f"inhomogeneous vector with gradings {sorted(gs)}")
        return next(iter(gs)) if gs else None

    def restrict(self, grading) -> "GraphVector":
        return GraphVector({b: c for b, c in self.terms.items() if b.grading == tuple(grading)})

    def to_json(self) -> list:
        return [[encode(b), f"{c.numerator}/{c.denominator}"] for b, c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, data) -> "GraphVector":
        return cls((decode(g), Fraction(c)) for g, c in data)

    def __repr__(self) -> str:
        if not self.terms:
            return "GraphVector(0)"
        parts = [f"{c} * [{encode(b)}]" for b, c in sorted(self.terms.items())]
        return "GraphVector(" + " + ".join(parts) + ")"


# ---------------------------------------------------------------------------
# single-graph terms
# ---------------------------------------------------------------------------

def _delta_terms(b: BasisElement) -> Iterator[tuple[LabeledGraph, int]]:
    """Ordered splittings with integer weights; the true coefficient is half."""
    v, edges, hairs = b.v, b.edges, b.hairs
    y = v + 1
    for x in range(1, v + 1):
        rest = []
        groups: dict = {}
        for t, h in edges:
            if t == x or h == x:
                groups[(t, h)] = groups.get((t, h), 0) + 1
            else:
                rest.append((t, h))
        keys = sorted(groups)
        total = sum(groups.values())
        hair_sides = [False, True] if x in hairs else [False]
        choices: list = [[]]
        for key in keys:
            m = groups[key]
            choices = [c + [k] for c in choices for k in range(m + 1)]
        for ks in choices:
            moved = sum(ks)
            if moved == 0 or moved == total:
                continue
            weight = 1
            new = list(rest)
            for (t, h), k in zip(keys, ks):
                m = groups[(t, h)]
                weight *= comb(m, k)
                moved_edge = (y, h) if t == x else (t, y)
                new.extend([(t, h)] * (m - k))
                new.extend([moved_edge] * k)
            new.append((x, y))
            for to_new in hair_sides:
                hs = tuple(y if (hh == x and to_new) else hh for hh in hairs)
                yield LabeledGraph(y, tuple(new), hs), weight


def _Delta_terms(b: BasisElement) -> Iterator[tuple[LabeledGraph, int]]:
    for p, x in enumerate(b.hairs):
        sign = -1 if p % 2 else 1
        hs = b.hairs[:p] + b.hairs[p + 1:]
        for y in range(1, b.v + 1):
            if y != x:
                yield LabeledGraph(b.v, b.edges + ((x, y),), hs), sign


def _chi_terms(b: BasisElement) -> Iterator[tuple[LabeledGraph, int]]:
    for x in range(1, b.v + 1):
        yield LabeledGraph(b.v, b.edges, (x,) + b.hairs), 1


def _beta_terms(b: BasisElement) -> Iterator[tuple[LabeledGraph, int]]:
    for p in range(b.s):
        yield LabeledGraph(b.v, b.edges, b.hairs[:p] + b.hairs[p + 1:]), -1 if p % 2 else 1


def _collect(terms: Iterable[tuple[LabeledGraph, int]], scale: Fraction) -> GraphVector:
    acc: dict = {}
    for g, w in terms:
        if not is_connected(g.v, g.edges):
            continue
        res = canonicalize(g)
        if res is None:
            continue
        rep, sign = res
        acc[rep] = acc.get(rep, 0) + sign * w
    return GraphVector({rep: scale * w for rep, w in acc.items() if w})


def _hair_sign(b: BasisElement) -> Fraction:
    return Fraction(1 if b.v % 2 else -1)


def delta(b: BasisElement) -> GraphVector:
    """Vertex splitting."""
    return _collect(_delta_terms(b), Fraction(1, 2))


def Delta_hair(b: BasisElement, restricted: bool = False) -> GraphVector:
    """Hair connecting.  With ``restricted`` a one-hair graph maps to zero
    (the convention inside the hairy complex)."""
    if b.s == 0 or (restricted and b.s == 1):
        return GraphVector()
    return _collect(_Delta_terms(b), _hair_sign(b))


def Delta(b: BasisElement) -> GraphVector:
    return Delta_hair(b, restricted=False)


def Delta_restricted(b: BasisElement) -> GraphVector:
    return Delta_hair(b, restricted=True)


def chi(b: BasisElement) -> GraphVector:
    """Hair adding."""
    return _collect(_chi_terms(b), _hair_sign(b))


def beta(b: BasisElement) -> GraphVector:
    """Hair deleting."""
    return _collect(_beta_terms(b), _hair_sign(b))


MAPS: dict[str, Callable[[BasisElement], GraphVector]] = {
    "delta": delta,
    "Delta": Delta,
    "Delta_r": Delta_restricted,
    "chi": chi,
    "beta": beta,
}

_SHIFT = {
    "delta": (1, 1, 0),
    "Delta": (0, 1, -1),
    "Delta_r": (0, 1, -1),
    "chi": (0, 0, 1),
    "beta": (0, 0, -1),
}


def target_grading(name: str, src) -> Grading:
    dv, de, ds = _SHIFT[name]
    v, e, s = src
    return Grading(v + dv, e + de, s + ds)


@dataclass(frozen=True)
class LinearMapSpec:
    name: str
    source: Grading

    def __post_init__(self):
        if self.name not in MAPS:
            raise ValueError(f"unknown map {self.name!r}; expected one of {sorted(MAPS)}")

    @property
    def target(self) -> Grading:
        return target_grading(self.name, self.source)


def apply_map(name: str, vec: GraphVector) -> GraphVector:
    f = MAPS[name]
    out = GraphVector()
    for b, c in vec.items():
        out = out + c * f(b)
    return out


def _columns(name: str, chunk: list) -> list:
    f = MAPS[name]
    return [[(rep, c) for rep, c in f(b).items()] for b in chunk]


def assemble_matrix(spec: LinearMapSpec, source_basis, target_basis, jobs: int = 1) -> SparseMatrix:
    """Column ``j`` holds the image of ``source_basis[j]`` in target coordinates."""
    src = list(source_basis)
    tgt = list(target_basis)
    for b in src:
        if b.grading != spec.source:
            raise ValueError(f"source element {encode(b)} not in grading {tuple(spec.source)}")
    index = {}
    for i, b in enumerate(tgt):
        if b.grading != spec.target:
            raise ValueError(f"target element {encode(b)} not in grading {tuple(spec.target)}")
        index[b] = i
    if jobs > 1 and len(src) > 64:
        size = -(-len(src) // (4 * jobs))
        chunks = [src[k:k + size] for k in range(0, len(src), size)]
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            images = [col for part in ex.map(_columns, [spec.name] * len(chunks), chunks)
                      for col in part]
    else:
        images = _columns(spec.name, src)
    entries = {}
    for j, image in enumerate(images):
        for rep, c in image:
            if rep not in index:
                raise ValueError(f"{spec.name} image {encode(rep)} missing from target basis")
            if c.denominator != 1:
                raise ArithmeticError(f"non-integral entry {c} in {spec.name} matrix")
            entries[(index[rep], j)] = c
    return SparseMatrix(len(tgt), len(src), entries)

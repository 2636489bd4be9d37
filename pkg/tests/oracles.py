"""Brute-force references used by the tests.

Nothing here imports the package: graphs are plain ``(v, edges, hairs)``
tuples, classes are compared through the minimum over *all* v! relabelings,
and linear algebra is dense Gaussian elimination over Fractions.
"""
from __future__ import annotations

import itertools
from fractions import Fraction


def perm_sign(seq) -> int:
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def orbit_key(v, edges, hairs=()):
    """``(key, sign)`` with ``graph = sign * key``; sign is None for a zero class."""
    if any(t == h for t, h in edges) or len(set(hairs)) != len(hairs):
        return None, None
    best, signs = None, set()
    for perm in itertools.permutations(range(1, v + 1)):
        sign = perm_sign(perm)
        new = []
        for t, h in edges:
            a, b = perm[t - 1], perm[h - 1]
            if a > b:
                a, b = b, a
                sign = -sign
            new.append((a, b))
        hs = [perm[h - 1] for h in hairs]
        sign *= perm_sign(hs)
        key = (v, tuple(sorted(new)), tuple(sorted(hs)))
        if best is None or key < best:
            best, signs = key, {sign}
        elif key == best:
            signs.add(sign)
    if len(signs) > 1:
        return best, None
    return best, signs.pop()


def connected(v, edges) -> bool:
    seen = {1}
    stack = [1]
    while stack:
        x = stack.pop()
        for t, h in edges:
            for a, b in ((t, h), (h, t)):
                if a == x and b not in seen:
                    seen.add(b)
                    stack.append(b)
    return len(seen) == v


def basis_keys(v, e, s) -> set:
    """Orbit keys of every nonzero connected graph with minimum edge degree 2."""
    pairs = list(itertools.combinations(range(1, v + 1), 2))
    out = set()
    for edges in itertools.combinations_with_replacement(pairs, e):
        deg = [0] * (v + 1)
        for t, h in edges:
            deg[t] += 1
            deg[h] += 1
        if min(deg[1:]) < 2 or not connected(v, edges):
            continue
        for hairs in itertools.combinations(range(1, v + 1), s):
            key, sign = orbit_key(v, edges, hairs)
            if sign is not None:
                out.add(key)
    return out


def reduce_terms(terms) -> dict:
    """Sum ``(v, edges, hairs, coeff)`` terms in orbit-key coordinates."""
    acc: dict = {}
    for v, edges, hairs, c in terms:
        key, sign = orbit_key(v, edges, hairs)
        if sign is None:
            continue
        acc[key] = acc.get(key, 0) + sign * Fraction(c)
    return {k: c for k, c in acc.items() if c}


def _hair_twist(v) -> int:
    return 1 if v % 2 else -1


def vertex_split(v, edges, hairs) -> dict:
    """Every ordered way of sending the half-edges at ``x`` to a new vertex
    ``v+1``, weight one half, new edge ``x -> v+1``."""
    y = v + 1
    terms = []
    for x in range(1, v + 1):
        at_x = [i for i, (t, h) in enumerate(edges) if x in (t, h)]
        hair_opts = [False, True] if x in hairs else [False]
        for r in range(1, len(at_x)):
            for moved in itertools.combinations(at_x, r):
                new = []
                for i, (t, h) in enumerate(edges):
                    if i in moved:
                        new.append((y, h) if t == x else (t, y))
                    else:
                        new.append((t, h))
                new.append((x, y))
                for to_y in hair_opts:
                    hs = tuple(y if (hh == x and to_y) else hh for hh in hairs)
                    terms.append((y, tuple(new), hs, Fraction(1, 2)))
    return reduce_terms(terms)


def hair_connect(v, edges, hairs, restricted=False) -> dict:
    if not hairs or (restricted and len(hairs) == 1):
        return {}
    terms = []
    for p, x in enumerate(hairs):
        rest = hairs[:p] + hairs[p + 1:]
        for y in range(1, v + 1):
            if y != x:
                terms.append((v, tuple(edges) + ((x, y),), rest, (-1) ** p * _hair_twist(v)))
    return reduce_terms(terms)


def hair_add(v, edges, hairs) -> dict:
    return reduce_terms((v, tuple(edges), (x,) + tuple(hairs), _hair_twist(v))
                        for x in range(1, v + 1))


def hair_delete(v, edges, hairs) -> dict:
    return reduce_terms((v, tuple(edges), hairs[:p] + hairs[p + 1:], (-1) ** p * _hair_twist(v))
                        for p in range(len(hairs)))


ORACLE_MAPS = {"delta": vertex_split, "Delta": hair_connect, "chi": hair_add,
               "beta": hair_delete}


def dense_rank(rows) -> int:
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
    return r

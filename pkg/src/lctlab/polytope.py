"""Newton polytopes P(J) = conv(gens) + R_+^n of m-primary monomial ideals, in exact arithmetic.

Facets are enumerated by brute force over hyperplanes spanned by n-element subsets of the
generators and the recession directions e_1..e_n, which is exact and cheap at desk scale
(n <= 4, a few dozen generators).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Sequence

import numpy as np

from . import _linalg
from .errors import DomainError, InvariantError, ResourceError
from .ideal import Exponent, MonomialIdeal, minimalize, require_m_primary

MAX_DIM = 4
CANDIDATE_CAP = 2_000_000


@dataclass(frozen=True, order=True)
class Facet:
    """The inequality <normal, x> >= offset."""

    normal: tuple[int, ...]
    offset: int

    def value(self, x: Sequence) -> Fraction:
        return sum((Fraction(a) * Fraction(v) for a, v in zip(self.normal, x)), Fraction(0))

    def holds(self, x: Sequence) -> bool:
        return self.value(x) >= self.offset

    def to_dict(self) -> dict:
        return {"normal": list(self.normal), "offset": self.offset}


@dataclass(frozen=True)
class NewtonPolytope:
    dim: int
    generators: tuple[Exponent, ...]
    facets: tuple[Facet, ...]
    box: int

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "generators": [list(g) for g in self.generators],
            "facets": [f.to_dict() for f in self.facets],
        }


def _check_dim(n: int) -> None:
    if n > MAX_DIM:
        raise ResourceError(f"dimension {n} exceeds the supported maximum {MAX_DIM}")


def _candidate_facet(points: Sequence[Exponent], dirs: Sequence[int], n: int) -> Facet | None:
    rows = [[a - b for a, b in zip(p, points[0])] for p in points[1:]]
    rows += [[int(i == j) for i in range(n)] for j in dirs]
    ns = _linalg.nullspace(rows, n)
    if len(ns) != 1:
        return None
    nu = _linalg.primitive(ns[0])
    if all(v <= 0 for v in nu):
        nu = tuple(-v for v in nu)
    if any(v < 0 for v in nu):
        return None
    b = sum(a * x for a, x in zip(nu, points[0]))
    if b <= 0:
        return None
    return Facet(nu, b)


def newton_polytope(J: MonomialIdeal, cap: int = CANDIDATE_CAP) -> NewtonPolytope:
    """Irredundant facet description of conv(gens) + R_+^n (positive-offset facets only)."""
    require_m_primary(J)
    n = J.dim
    _check_dim(n)
    gens = J.gens
    elements: list[tuple[str, object]] = [("p", g) for g in gens] + [("d", j) for j in range(n)]
    if comb(len(elements), n) > cap:
        raise ResourceError(
            f"{comb(len(elements), n)} candidate hyperplanes exceed the cap {cap}"
        )
    gen_arr = np.asarray(gens, dtype=object)
    facets: set[Facet] = set()
    for subset in itertools.combinations(elements, n):
        points = [e[1] for e in subset if e[0] == "p"]
        if not points:
            continue
        dirs = [e[1] for e in subset if e[0] == "d"]
        f = _candidate_facet(points, dirs, n)
        if f is None or f in facets:
            continue
        if all(v >= f.offset for v in gen_arr.dot(np.asarray(f.normal, dtype=object))):
            facets.add(f)
    if not facets:
        raise InvariantError(f"no facets found for m-primary ideal {J}")
    return NewtonPolytope(n, gens, tuple(sorted(facets)), J.box_bound())


def contains_point(P: NewtonPolytope, x: Sequence) -> bool:
    if len(x) != P.dim:
        raise DomainError(f"point {tuple(x)} has dimension {len(x)}, polytope has {P.dim}")
    xs = [Fraction(v) for v in x]
    if any(v < 0 for v in xs):
        raise DomainError(f"point {tuple(x)} has a negative coordinate")
    return all(f.holds(xs) for f in P.facets)


def lct(P: NewtonPolytope) -> Fraction:
    """Howald's formula: 1/lct is the smallest alpha with alpha*(1,...,1) in P."""
    return min(Fraction(sum(f.normal), f.offset) for f in P.facets)


def validate_weights(gamma: Sequence, n: int) -> tuple[Fraction, ...]:
    if len(gamma) != n:
        raise DomainError(f"weight vector has {len(gamma)} entries, expected {n}")
    g = tuple(Fraction(v) for v in gamma)
    if any(not (0 <= v < 1) for v in g):
        raise DomainError(f"weights must lie in [0, 1), got {[str(v) for v in g]}")
    return g


def weighted_threshold(P: NewtonPolytope, gamma: Sequence) -> Fraction:
    """Integrability threshold of exp(-2c phi) * prod |z_j|^(-2 gamma_j) for the toric model of P."""
    g = validate_weights(gamma, P.dim)
    return min(
        sum((a * (1 - gj) for a, gj in zip(f.normal, g)), Fraction(0)) / f.offset
        for f in P.facets
    )


def stretch_ideal(J: MonomialIdeal, p: Sequence[int]) -> MonomialIdeal:
    """Pull back along z -> (z1^p1, ..., zn^pn)."""
    require_m_primary(J)
    if len(p) != J.dim:
        raise DomainError(f"stretch vector has {len(p)} entries, expected {J.dim}")
    if any(int(v) != v or v < 1 for v in p):
        raise DomainError(f"stretch factors must be positive integers, got {list(p)}")
    return MonomialIdeal(J.dim, (tuple(int(pi) * b for pi, b in zip(p, g)) for g in J.gens))


def _affine_rank(points: Iterable[tuple]) -> int:
    pts = list(points)
    if len(pts) <= 1:
        return 0
    return _linalg.rank([[a - b for a, b in zip(p, pts[0])] for p in pts[1:]])


def _box_clip(P: NewtonPolytope) -> tuple[list[tuple[tuple[int, ...], int]], list[tuple]]:
    """Hyperplanes and vertices of P intersected with [0, B]^n."""
    n, B = P.dim, P.box
    planes = [(f.normal, f.offset) for f in P.facets]
    for j in range(n):
        e = tuple(int(i == j) for i in range(n))
        planes.append((e, 0))
        planes.append((tuple(-v for v in e), -B))
    vertices = set()
    for idx in itertools.combinations(range(len(planes)), n):
        sol = _linalg.solve([planes[i][0] for i in idx], [planes[i][1] for i in idx])
        if sol is None:
            continue
        if all(sum(Fraction(a) * x for a, x in zip(nu, sol)) >= b for nu, b in planes):
            vertices.add(tuple(sol))
    return planes, sorted(vertices)


def _pulling_simplices(planes, vertices, apex) -> list[tuple]:
    """Pulling triangulation of the polytope with given H- and V-data."""
    n = len(apex)
    incidence = [
        frozenset(v for v in vertices if sum(Fraction(a) * x for a, x in zip(nu, v)) == b)
        for nu, b in planes
    ]
    cache: dict[frozenset, list[tuple]] = {}

    def tri(face: frozenset, d: int, top: tuple | None = None) -> list[tuple]:
        if d == 0:
            return [tuple(face)]
        if top is None and face in cache:
            return cache[face]
        v0 = top if top is not None else min(face)
        subfaces = set()
        for inc in incidence:
            s = face & inc
            if v0 in s or s == face or len(s) < d:
                continue
            if _affine_rank(s) == d - 1:
                subfaces.add(s)
        out = [(v0,) + simp for s in sorted(subfaces, key=sorted) for simp in tri(s, d - 1)]
        if top is None:
            cache[face] = out
        return out

    return tri(frozenset(vertices), n, apex)


def complement_volume(P: NewtonPolytope) -> Fraction:
    """Exact Vol(R_+^n \\ P) = B^n - Vol(P cap [0,B]^n)."""
    n, B = P.dim, P.box
    _check_dim(n)
    planes, vertices = _box_clip(P)
    apex = tuple(Fraction(B) for _ in range(n))
    if apex not in vertices:
        raise InvariantError("degenerate vertex enumeration for box-clipped Newton polytope")
    vol = Fraction(0)
    # n = 1 with a single generator clips to the point {B}
    simplices = _pulling_simplices(planes, vertices, apex) if _affine_rank(vertices) == n else []
    for simp in simplices:
        v0 = simp[0]
        vol += abs(_linalg.det([[a - b for a, b in zip(v, v0)] for v in simp[1:]]))
    vol /= factorial(n)
    out = Fraction(B) ** n - vol
    if out <= 0:
        raise InvariantError(f"non-positive complement volume {out}")
    return out


def lattice_points(P: NewtonPolytope) -> np.ndarray:
    """Integer points of P inside [0, B]^n as an (m, n) array."""
    n, B = P.dim, P.box
    grid = np.indices((B + 1,) * n).reshape(n, -1).T
    inside = np.ones(len(grid), dtype=bool)
    for f in P.facets:
        inside &= grid @ np.asarray(f.normal) >= f.offset
    return grid[inside]


def integral_closure(J: MonomialIdeal) -> MonomialIdeal:
    P = newton_polytope(J)
    pts = lattice_points(P)
    return MonomialIdeal(J.dim, minimalize(tuple(int(v) for v in p) for p in pts))


def is_power_of_maximal(P: NewtonPolytope) -> tuple[bool, int | None]:
    """(True, s) iff P is the Newton polytope of m^s, i.e. its only facet is sum(x) >= s."""
    if len(P.facets) == 1 and P.facets[0].normal == (1,) * P.dim:
        return True, P.facets[0].offset
    return False, None

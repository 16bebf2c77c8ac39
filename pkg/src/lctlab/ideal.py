"""Monomial ideals in C[x1..xn] represented by their minimal exponent vectors."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, ParseError, ResourceError

Exponent = tuple[int, ...]

DEFAULT_GENERATOR_CAP = 100_000


def divides(a: Sequence[int], b: Sequence[int]) -> bool:
    """True iff x^a divides x^b."""
    return all(x <= y for x, y in zip(a, b))


def minimalize(points: Iterable[Exponent]) -> tuple[Exponent, ...]:
    """Antichain of minimal elements under componentwise order, sorted lexicographically."""
    pts = sorted(set(points), key=lambda p: (sum(p), p))
    kept: list[Exponent] = []
    for p in pts:
        # anything dividing p has total degree <= sum(p), so it is already in kept
        if not any(divides(q, p) for q in kept):
            kept.append(p)
    return tuple(sorted(kept))


@dataclass(frozen=True)
class MonomialIdeal:
    dim: int
    gens: tuple[Exponent, ...]

    def __init__(self, dim: int, gens: Iterable[Sequence[int]]):
        if dim < 1:
            raise DomainError(f"dimension must be >= 1, got {dim}")
        pts = []
        for g in gens:
            g = tuple(int(v) for v in g)
            if len(g) != dim:
                raise DomainError(f"generator {g} has length {len(g)}, expected {dim}")
            if any(v < 0 for v in g):
                raise DomainError(f"negative exponent in {g}")
            pts.append(g)
        if not pts:
            raise DomainError("an ideal needs at least one generator")
        if any(not any(g) for g in pts):
            raise DomainError("the unit ideal (generator 1) is not allowed")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "gens", minimalize(pts))

    def __repr__(self) -> str:
        return f"MonomialIdeal({self.dim}, {list(self.gens)})"

    def __str__(self) -> str:
        return "(" + ", ".join(format_monomial(g) for g in self.gens) + ")"

    def pure_powers(self) -> list[int | None]:
        """Degree of the pure power of x_i among the generators, or None."""
        out: list[int | None] = [None] * self.dim
        for g in self.gens:
            nz = [i for i, v in enumerate(g) if v]
            if len(nz) == 1:
                out[nz[0]] = g[nz[0]]
        return out

    def box_bound(self) -> int:
        """Largest pure-power degree B; the staircase lies in [0, B)^n."""
        require_m_primary(self)
        return max(self.pure_powers())  # type: ignore[type-var]

    def permute(self, perm: Sequence[int]) -> "MonomialIdeal":
        """Relabel coordinates: new coordinate i is old coordinate perm[i]."""
        return MonomialIdeal(self.dim, (tuple(g[p] for p in perm) for g in self.gens))


def format_monomial(e: Sequence[int]) -> str:
    parts = []
    for i, v in enumerate(e, start=1):
        if v == 1:
            parts.append(f"x{i}")
        elif v > 1:
            parts.append(f"x{i}^{v}")
    return "*".join(parts) if parts else "1"


def format_ideal(J: MonomialIdeal) -> str:
    """Render in the ideal file format; parse_ideal(format_ideal(J)) == J."""
    lines = [f"vars {J.dim}"]
    lines.extend(format_monomial(g) for g in J.gens)
    return "\n".join(lines) + "\n"


_FACTOR = re.compile(r"^x(\d+)(?:\^(\d+))?$")


def parse_monomial(text: str, dim: int) -> Exponent:
    """Parse `x1^2*x3` or a whitespace-separated exponent vector."""
    text = text.strip()
    if not text:
        raise ParseError("empty monomial")
    if text[0].isdigit():
        try:
            vec = tuple(int(tok) for tok in text.split())
        except ValueError:
            raise ParseError(f"malformed exponent vector: {text!r}") from None
        if len(vec) != dim:
            raise ParseError(f"exponent vector {text!r} has {len(vec)} entries, expected {dim}")
        return vec
    exp = [0] * dim
    for factor in text.split("*"):
        m = _FACTOR.match(factor.strip())
        if not m:
            raise ParseError(f"malformed monomial factor {factor!r} in {text!r}")
        i = int(m.group(1))
        if not 1 <= i <= dim:
            raise ParseError(f"variable x{i} out of range for vars {dim}")
        exp[i - 1] += int(m.group(2)) if m.group(2) is not None else 1
    return tuple(exp)


def read_header(lines: list[str]) -> tuple[int, list[str]]:
    """Split `vars <n>` header from the remaining content lines (comments dropped)."""
    body = [ln.strip() for ln in lines]
    body = [ln for ln in body if ln and not ln.startswith("#")]
    if not body:
        raise ParseError("empty input")
    head = body[0].split()
    if len(head) != 2 or head[0] != "vars":
        raise ParseError(f"expected 'vars <n>' header, got {body[0]!r}")
    try:
        dim = int(head[1])
    except ValueError:
        raise ParseError(f"bad dimension in header {body[0]!r}") from None
    if dim < 1:
        raise ParseError(f"dimension must be >= 1, got {dim}")
    return dim, body[1:]


def parse_ideal(text: str) -> MonomialIdeal:
    """Parse the ideal file format. Lines may also be separated by ' / '."""
    lines = re.split(r"\n|\s/\s", text)
    dim, body = read_header(lines)
    if not body:
        raise ParseError("no generators given")
    gens = [parse_monomial(ln, dim) for ln in body]
    if any(not any(g) for g in gens):
        raise ParseError("the unit ideal (generator 1) is not allowed")
    return MonomialIdeal(dim, gens)


def read_ideal(path) -> MonomialIdeal:
    with open(path, encoding="utf-8") as fh:
        return parse_ideal(fh.read())


def is_m_primary(J: MonomialIdeal) -> bool:
    return all(p is not None for p in J.pure_powers())


def require_m_primary(J: MonomialIdeal) -> None:
    if not is_m_primary(J):
        raise DomainError(f"ideal {J} is not m-primary (its zero set is not the origin)")


def contains_monomial(J: MonomialIdeal, m: Sequence[int]) -> bool:
    if len(m) != J.dim:
        raise DomainError(f"monomial {tuple(m)} has dimension {len(m)}, ideal has {J.dim}")
    return any(divides(g, m) for g in J.gens)


def product(J1: MonomialIdeal, J2: MonomialIdeal, cap: int = DEFAULT_GENERATOR_CAP) -> MonomialIdeal:
    if J1.dim != J2.dim:
        raise DomainError(f"dimension mismatch: {J1.dim} vs {J2.dim}")
    if len(J1.gens) * len(J2.gens) > cap:
        raise ResourceError(
            f"product would need {len(J1.gens) * len(J2.gens)} candidate generators (cap {cap})"
        )
    sums = (tuple(a + b for a, b in zip(g1, g2)) for g1 in J1.gens for g2 in J2.gens)
    return MonomialIdeal(J1.dim, sums)


def power(J: MonomialIdeal, k: int, cap: int = DEFAULT_GENERATOR_CAP) -> MonomialIdeal:
    if k < 1:
        raise DomainError(f"power exponent must be >= 1, got {k}")
    out = J
    for _ in range(k - 1):
        out = product(out, J, cap=cap)
    return out


def staircase_mask(J: MonomialIdeal, bound: int | None = None) -> np.ndarray:
    """Boolean array over [0, B)^n, True where the monomial is NOT in J."""
    B = J.box_bound() if bound is None else bound
    grids = np.indices((B,) * J.dim).reshape(J.dim, -1).T
    outside = np.ones(len(grids), dtype=bool)
    for g in J.gens:
        outside &= ~np.all(grids >= np.asarray(g), axis=1)
    return outside


def colength(J: MonomialIdeal) -> int:
    """dim_C O/J, the number of standard monomials."""
    require_m_primary(J)
    return int(staircase_mask(J).sum())


def maximal_ideal(n: int, s: int = 1) -> MonomialIdeal:
    """The power m^s of the maximal ideal at 0 in C^n."""
    return MonomialIdeal(n, (c for c in itertools.product(range(s + 1), repeat=n) if sum(c) == s))

"""Samuel multiplicity and the exact lct/multiplicity inequality checks."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Sequence

from .errors import DomainError, InvariantError
from .ideal import MonomialIdeal, colength, product, require_m_primary
from .polytope import (
    complement_volume,
    is_power_of_maximal,
    lct,
    newton_polytope,
    validate_weights,
    weighted_threshold,
)


def samuel_multiplicity(J: MonomialIdeal) -> Fraction:
    """e(J) = n! * Vol(R_+^n minus the Newton polytope)."""
    require_m_primary(J)
    return factorial(J.dim) * complement_volume(newton_polytope(J))


@dataclass(frozen=True)
class ColengthEntry:
    k: int
    colength: int
    scaled: Fraction


@dataclass(frozen=True)
class ColengthSeries:
    dim: int
    entries: tuple[ColengthEntry, ...]

    def to_rows(self) -> list[dict]:
        return [{"k": e.k, "colength": e.colength, "scaled": str(e.scaled)} for e in self.entries]


def colength_series(J: MonomialIdeal, k_max: int) -> ColengthSeries:
    """Exact colengths of J^k and n! colength / k^n for k = 1..k_max."""
    require_m_primary(J)
    if k_max < 1:
        raise DomainError(f"k_max must be >= 1, got {k_max}")
    n = J.dim
    entries = []
    Jk = J
    for k in range(1, k_max + 1):
        if k > 1:
            Jk = product(Jk, J)
        c = colength(Jk)
        entries.append(ColengthEntry(k, c, Fraction(factorial(n) * c, k**n)))
    return ColengthSeries(n, tuple(entries))


@dataclass(frozen=True)
class IneqReport:
    n: int
    lct: Fraction
    e: Fraction
    lhs: Fraction
    rhs: Fraction
    holds: bool
    equality: bool
    closure_is_power: tuple[bool, int | None]
    gamma: tuple[Fraction, ...] | None = field(default=None)

    def to_dict(self) -> dict:
        d = {
            "n": self.n,
            "lct": str(self.lct),
            "e": str(self.e),
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
            "holds": self.holds,
            "equality": self.equality,
            "closure_power": {
                "is_power": self.closure_is_power[0],
                "s": self.closure_is_power[1],
            },
        }
        if self.gamma is not None:
            d["gamma"] = [str(g) for g in self.gamma]
        return d


def _report(J: MonomialIdeal, threshold: Fraction, rhs: Fraction, gamma=None) -> IneqReport:
    P = newton_polytope(J)
    e = factorial(J.dim) * complement_volume(P)
    lhs = threshold**J.dim * e
    rep = IneqReport(
        n=J.dim,
        lct=threshold,
        e=e,
        lhs=lhs,
        rhs=rhs,
        holds=lhs >= rhs,
        equality=lhs == rhs,
        closure_is_power=is_power_of_maximal(P),
        gamma=gamma,
    )
    if gamma is None and rep.equality and not rep.closure_is_power[0]:
        raise InvariantError(f"equality without closure = m^s for {J}")
    return rep


def check_main_inequality(J: MonomialIdeal) -> IneqReport:
    """Compare lct(J)^n * e(J) with n^n."""
    require_m_primary(J)
    return _report(J, lct(newton_polytope(J)), Fraction(J.dim**J.dim))


def check_colength_bound(J: MonomialIdeal) -> bool:
    """colength(J) >= n^n / (n! lct(J)^n)."""
    require_m_primary(J)
    n = J.dim
    c = lct(newton_polytope(J))
    return colength(J) >= Fraction(n**n) / (factorial(n) * c**n)


def check_weighted_inequality(J: MonomialIdeal, gamma: Sequence) -> IneqReport:
    """Compare c*(gamma)^n * e(J) with n^n * prod(1 - gamma_j)."""
    require_m_primary(J)
    g = validate_weights(gamma, J.dim)
    rhs = Fraction(J.dim**J.dim)
    for gj in g:
        rhs *= 1 - gj
    return _report(J, weighted_threshold(newton_polytope(J), g), rhs, gamma=g)


def random_ideal(rng: random.Random, n: int, max_exp: int = 6) -> MonomialIdeal:
    """Random m-primary ideal: pure powers on each axis plus extra mixed generators.

    The generator count is uniform in [n+1, n+6], exponents in [1, max_exp].
    """
    count = rng.randint(n + 1, n + 6)
    gens = []
    for i in range(n):
        g = [0] * n
        g[i] = rng.randint(1, max_exp)
        gens.append(tuple(g))
    while len(gens) < count:
        g = tuple(rng.randint(0, max_exp) for _ in range(n))
        if any(g):
            gens.append(g)
    return MonomialIdeal(n, gens)


def random_ideals(count: int, seed: int, dims: Sequence[int] = (2, 3), max_exp: int = 6):
    rng = random.Random(seed)
    return [random_ideal(rng, rng.choice(list(dims)), max_exp) for _ in range(count)]

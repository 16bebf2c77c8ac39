"""A small Buchberger engine over Q and the monomial degeneration it induces."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DomainError, ResourceError
from .ideal import MonomialIdeal, colength, divides, is_m_primary
from .poly import MonomialOrder, Polynomial

DEFAULT_DEGREE_CAP = 20
DEFAULT_BASIS_CAP = 200


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def reduce(f: Polynomial, basis: Sequence[Polynomial], order: MonomialOrder) -> Polynomial:
    """Full remainder of f under multivariate division by basis."""
    leads = [g.leading(order) for g in basis]
    rem: dict = {}
    p = f
    while not p.is_zero():
        e, c = p.leading(order)
        for g, (ge, gc) in zip(basis, leads):
            if divides(ge, e):
                shift = tuple(a - b for a, b in zip(e, ge))
                p = p - g.scale_shift(c / gc, shift)
                break
        else:
            rem[e] = c
            p = p - Polynomial.monomial(e, c)
    return Polynomial(f.dim, rem)


def s_polynomial(f: Polynomial, g: Polynomial, order: MonomialOrder) -> Polynomial:
    fe, fc = f.leading(order)
    ge, gc = g.leading(order)
    m = _lcm(fe, ge)
    return f.scale_shift(1 / fc, [a - b for a, b in zip(m, fe)]) - g.scale_shift(
        1 / gc, [a - b for a, b in zip(m, ge)]
    )


def _check_inputs(gens: Sequence[Polynomial]) -> int:
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise DomainError("need at least one nonzero generator")
    dims = {g.dim for g in gens}
    if len(dims) != 1:
        raise DomainError(f"generators live in different dimensions {sorted(dims)}")
    return dims.pop()


def buchberger(
    gens: Sequence[Polynomial],
    order: MonomialOrder = MonomialOrder(),
    degree_cap: int = DEFAULT_DEGREE_CAP,
    basis_cap: int = DEFAULT_BASIS_CAP,
) -> list[Polynomial]:
    """Reduced Groebner basis, sorted by decreasing leading monomial.

    Pairs are processed lowest lcm first (normal strategy); pairs with coprime
    leading monomials are skipped.
    """
    _check_inputs(gens)
    G = [g.monic(order) for g in gens if not g.is_zero()]
    pairs = set(itertools.combinations(range(len(G)), 2))

    def pair_key(ij):
        i, j = ij
        m = _lcm(G[i].leading(order)[0], G[j].leading(order)[0])
        return (sum(m), order.key(m), ij)

    while pairs:
        ij = min(pairs, key=pair_key)
        pairs.remove(ij)
        f, g = G[ij[0]], G[ij[1]]
        fe, ge = f.leading(order)[0], g.leading(order)[0]
        if all(a == 0 or b == 0 for a, b in zip(fe, ge)):
            continue
        h = reduce(s_polynomial(f, g, order), G, order)
        if h.is_zero():
            continue
        h = h.monic(order)
        if max(sum(e) for e in h.terms) > degree_cap:
            raise ResourceError(f"Groebner basis degree exceeded the cap {degree_cap}")
        G.append(h)
        if len(G) > basis_cap:
            raise ResourceError(f"Groebner basis size exceeded the cap {basis_cap}")
        pairs.update((i, len(G) - 1) for i in range(len(G) - 1))

    # minimal basis: drop elements whose leading monomial is divisible by another's
    lead = [g.leading(order)[0] for g in G]
    keep = []
    for i, e in enumerate(lead):
        dominated = any(
            divides(lead[j], e) and (lead[j] != e or j < i) for j in range(len(G)) if j != i
        )
        if not dominated:
            keep.append(G[i])
    reduced = []
    for i, g in enumerate(keep):
        others = keep[:i] + keep[i + 1 :]
        ge, _ = g.leading(order)
        tail = reduce(g - Polynomial.monomial(ge, g.terms[ge]), others, order)
        reduced.append((Polynomial.monomial(ge, g.terms[ge]) + tail).monic(order))
    reduced.sort(key=lambda p: order.key(p.leading(order)[0]), reverse=True)
    return reduced


def initial_ideal(basis: Sequence[Polynomial], order: MonomialOrder = MonomialOrder()) -> MonomialIdeal:
    n = _check_inputs(basis)
    return MonomialIdeal(n, (g.leading(order)[0] for g in basis if not g.is_zero()))


def degenerate(gens: Sequence[Polynomial], order: MonomialOrder = MonomialOrder()) -> MonomialIdeal:
    """Monomial special fibre of the Groebner degeneration of (gens)."""
    return initial_ideal(buchberger(gens, order), order)


def poly_colength(gens: Sequence[Polynomial], order: MonomialOrder = MonomialOrder()) -> int:
    """dim_C O/(gens), counted as standard monomials of the initial ideal."""
    J0 = degenerate(gens, order)
    if not is_m_primary(J0):
        raise DomainError(f"initial ideal {J0} is not m-primary: the quotient is infinite-dimensional")
    return colength(J0)


def power_system(gens: Sequence[Polynomial], k: int) -> list[Polynomial]:
    """All k-fold products of generators: a generating set of the ideal power."""
    out = []
    for combo in itertools.combinations_with_replacement(range(len(gens)), k):
        p = gens[combo[0]]
        for i in combo[1:]:
            p = p * gens[i]
        out.append(p)
    return out


def is_groebner_basis(basis: Sequence[Polynomial], order: MonomialOrder) -> bool:
    """Every S-polynomial reduces to zero."""
    return all(
        reduce(s_polynomial(f, g, order), basis, order).is_zero()
        for f, g in itertools.combinations(basis, 2)
    )


@dataclass(frozen=True)
class SemicontinuityReport:
    order: str
    basis: tuple[Polynomial, ...]
    initial: MonomialIdeal
    colength: int
    lct_initial: Fraction
    interval: tuple[float, float]
    tolerance: float
    passes: bool

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "basis": [p.to_str(MonomialOrder(self.order)) for p in self.basis],
            "initial_ideal": [list(g) for g in self.initial.gens],
            "colength": self.colength,
            "lct_initial": str(self.lct_initial),
            "mc_interval": [self.interval[0], self.interval[1]],
            "tolerance": self.tolerance,
            "passes": self.passes,
        }


def semicontinuity_report(
    gens: Sequence[Polynomial],
    order: MonomialOrder = MonomialOrder(),
    cfg=None,
    steps: int | None = None,
    tolerance: float = 0.07,
) -> SemicontinuityReport:
    """Exact lct of the initial ideal against a Monte Carlo bracket for lct of (gens).

    Passes when lct(initial) <= c_hi + tolerance, i.e. the degeneration does not
    raise the threshold beyond what the integrability test supports.
    """
    from .numeric import McConfig, PshModel, estimate_threshold
    from .polytope import lct, newton_polytope

    basis = buchberger(gens, order)
    J0 = initial_ideal(basis, order)
    if not is_m_primary(J0):
        raise DomainError(f"initial ideal {J0} is not m-primary")
    c0 = lct(newton_polytope(J0))
    model = PshModel.poly(list(gens))
    lo, hi = estimate_threshold(model, cfg=cfg or McConfig(), steps=steps)
    return SemicontinuityReport(
        order=order.kind,
        basis=tuple(basis),
        initial=J0,
        colength=colength(J0),
        lct_initial=c0,
        interval=(lo, hi),
        tolerance=tolerance,
        passes=float(c0) <= hi + tolerance,
    )

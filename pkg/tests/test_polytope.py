import itertools
from fractions import Fraction
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from lctlab.errors import DomainError, ResourceError
from lctlab.ideal import MonomialIdeal, colength, contains_monomial, maximal_ideal, power, product
from lctlab.polytope import (
    Facet,
    complement_volume,
    contains_point,
    integral_closure,
    is_power_of_maximal,
    lct,
    newton_polytope,
    stretch_ideal,
    weighted_threshold,
)

from conftest import A2B2, A2B3, M2, M_A2B3, m_primary_ideals, shipped_ideals


# ---------- independent oracles ----------


def lower_hull_2d(J):
    """Lower-left convex chain from the x2 pure power to the x1 pure power."""
    pts = sorted(J.gens)
    hull = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    # keep only the strictly decreasing part
    out = [hull[0]]
    for p in hull[1:]:
        if p[1] < out[-1][1]:
            out.append(p)
    return out


def facets_2d(J):
    chain = lower_hull_2d(J)
    out = set()
    for (a1, b1), (a2, b2) in zip(chain, chain[1:]):
        nu = (b1 - b2, a2 - a1)
        g = np.gcd(*nu)
        nu = (nu[0] // g, nu[1] // g)
        out.add(Facet(nu, nu[0] * a1 + nu[1] * b1))
    return out


def complement_area_2d(J):
    """Exact area under the lower chain, by trapezoids."""
    chain = lower_hull_2d(J)
    return sum(
        (Fraction(a2 - a1) * (b1 + b2) / 2 for (a1, b1), (a2, b2) in zip(chain, chain[1:])),
        Fraction(0),
    )


def clipped_hull(J):
    """P cap [0,B]^n as the convex hull of the boxes [g, B]."""
    B = max(max(g) for g in J.gens)
    pts = set()
    for g in J.gens:
        for S in itertools.product((False, True), repeat=J.dim):
            pts.add(tuple(B if s else v for s, v in zip(S, g)))
    return B, ConvexHull(np.array(sorted(pts), dtype=float))


def hull_volume(J):
    B, hull = clipped_hull(J)
    return B**J.dim - hull.volume


def hull_facet_ratios(J):
    """Normalized inward normals nu / b of the non-box facets of the clipped hull."""
    B, hull = clipped_hull(J)
    out = set()
    for eq in hull.equations:
        nu, b = -eq[:-1], eq[-1]
        if b <= 1e-9:
            continue  # coordinate hyperplanes and the far box faces
        out.add(tuple(np.round(nu / b, 9)))
    return out


def lp_inverse_threshold(J, direction):
    """min t such that t*direction lies in conv(gens) + R_+^n."""
    G = np.array(J.gens, dtype=float)
    m, n = G.shape
    # variables: lambda_1..m, t
    c = np.zeros(m + 1)
    c[-1] = 1.0
    A_ub = np.hstack([G.T, -np.asarray(direction, dtype=float)[:, None]])
    A_eq = np.zeros((1, m + 1))
    A_eq[0, :m] = 1.0
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(n), A_eq=A_eq, b_eq=[1.0], bounds=[(0, None)] * (m + 1))
    assert res.status == 0
    return res.fun


# ---------- worked examples ----------


class TestExamples:
    def test_a2b3(self):
        P = newton_polytope(A2B3)
        assert P.facets == (Facet((3, 2), 6),)
        assert lct(P) == Fraction(5, 6)
        assert complement_volume(P) == 3

    def test_m_squared(self):
        P = newton_polytope(M2)
        assert lct(P) == 1
        assert complement_volume(P) == 2
        assert is_power_of_maximal(P) == (True, 2)

    def test_product_m_a2b3(self):
        P = newton_polytope(M_A2B3)
        assert set(P.facets) == {Facet((1, 1), 3), Facet((3, 2), 8)}
        assert lct(P) == Fraction(5, 8)
        assert complement_volume(P) == Fraction(11, 2)

    def test_m_squared_three_vars(self):
        P = newton_polytope(maximal_ideal(3, 2))
        assert lct(P) == Fraction(3, 2)
        assert complement_volume(P) == Fraction(4, 3)

    def test_mixed_three_vars(self):
        J = shipped_ideals()["mixed3.ideal"]
        P = newton_polytope(J)
        assert complement_volume(P) == pytest.approx(hull_volume(J), rel=1e-9)
        assert 1 / lct(P) == pytest.approx(lp_inverse_threshold(J, (1, 1, 1)), rel=1e-7)

    def test_four_vars(self):
        P = newton_polytope(maximal_ideal(4))
        assert lct(P) == 4
        assert complement_volume(P) == Fraction(1, 24)

    def test_one_var(self):
        P = newton_polytope(MonomialIdeal(1, [(3,)]))
        assert lct(P) == Fraction(1, 3)
        assert complement_volume(P) == 3

    def test_closure(self):
        assert set(integral_closure(A2B3).gens) == {(2, 0), (1, 2), (0, 3)}
        assert integral_closure(A2B2) == M2
        assert is_power_of_maximal(newton_polytope(A2B2)) == (True, 2)
        assert is_power_of_maximal(newton_polytope(A2B3)) == (False, None)

    def test_contains_point(self):
        P = newton_polytope(A2B3)
        assert contains_point(P, (2, 0))
        assert contains_point(P, (Fraction(6, 5), Fraction(6, 5)))
        assert not contains_point(P, (1, 1))
        with pytest.raises(DomainError):
            contains_point(P, (1, -1))
        with pytest.raises(DomainError):
            contains_point(P, (1, 1, 1))

    def test_weighted(self):
        P = newton_polytope(M2)
        assert weighted_threshold(P, (Fraction(1, 2), Fraction(1, 2))) == Fraction(1, 2)
        assert weighted_threshold(newton_polytope(A2B3), (Fraction(1, 2), 0)) == Fraction(7, 12)

    @pytest.mark.parametrize("gamma", [(1, 0), (Fraction(-1, 2), 0), (0,)])
    def test_bad_weights(self, gamma):
        with pytest.raises(DomainError):
            weighted_threshold(newton_polytope(A2B3), gamma)

    def test_dimension_cap(self):
        with pytest.raises(ResourceError):
            newton_polytope(maximal_ideal(5))

    def test_candidate_cap(self):
        with pytest.raises(ResourceError):
            newton_polytope(maximal_ideal(3, 4), cap=10)

    def test_not_m_primary(self):
        with pytest.raises(DomainError):
            newton_polytope(MonomialIdeal(2, [(1, 1)]))

    def test_stretch(self):
        assert set(stretch_ideal(A2B3, (2, 1)).gens) == {(4, 0), (0, 3)}
        with pytest.raises(DomainError):
            stretch_ideal(A2B3, (0, 1))

    def test_to_dict(self):
        d = newton_polytope(A2B3).to_dict()
        assert d == {"dim": 2, "generators": [[0, 3], [2, 0]], "facets": [{"normal": [3, 2], "offset": 6}]}


# ---------- agreement with oracles ----------


class TestOracles:
    @given(m_primary_ideals(dims=(2,), max_exp=9, max_extra=6))
    @settings(max_examples=150, deadline=None)
    def test_facets_2d_exact(self, J):
        P = newton_polytope(J)
        assert set(P.facets) == facets_2d(J)
        assert complement_volume(P) == complement_area_2d(J)

    @given(m_primary_ideals(dims=(3,), max_exp=5, max_extra=4))
    @settings(max_examples=60, deadline=None)
    def test_facets_and_volume_3d(self, J):
        P = newton_polytope(J)
        ours = {tuple(np.round(np.array(f.normal, float) / f.offset, 9)) for f in P.facets}
        assert ours == hull_facet_ratios(J)
        assert float(complement_volume(P)) == pytest.approx(hull_volume(J), rel=1e-9)

    @given(m_primary_ideals(max_exp=6))
    @settings(max_examples=80, deadline=None)
    def test_facets_valid_and_tight(self, J):
        P = newton_polytope(J)
        for f in P.facets:
            assert all(f.holds(g) for g in J.gens)
            tight = [g for g in J.gens if f.value(g) == f.offset]
            assert tight
            dirs = [j for j in range(J.dim) if f.normal[j] == 0]
            rows = [[a - b for a, b in zip(g, tight[0])] for g in tight[1:]]
            rows += [[int(i == j) for i in range(J.dim)] for j in dirs]
            assert np.linalg.matrix_rank(np.array(rows, dtype=float).reshape(-1, J.dim)) == J.dim - 1

    @given(m_primary_ideals(max_exp=6))
    @settings(max_examples=80, deadline=None)
    def test_lct_matches_lp(self, J):
        assert float(1 / lct(newton_polytope(J))) == pytest.approx(
            lp_inverse_threshold(J, [1] * J.dim), rel=1e-7
        )

    @given(m_primary_ideals(max_exp=6), st.data())
    @settings(max_examples=60, deadline=None)
    def test_weighted_matches_lp(self, J, data):
        gamma = [Fraction(data.draw(st.integers(0, 9)), 10) for _ in range(J.dim)]
        c = weighted_threshold(newton_polytope(J), gamma)
        assert float(1 / c) == pytest.approx(
            lp_inverse_threshold(J, [1 - float(g) for g in gamma]), rel=1e-7
        )


# ---------- structural properties ----------


class TestProperties:
    @given(m_primary_ideals(max_exp=4, max_extra=3), st.integers(2, 3))
    @settings(max_examples=30, deadline=None)
    def test_dilation(self, J, k):
        P, Pk = newton_polytope(J), newton_polytope(power(J, k))
        assert set(Pk.facets) == {Facet(f.normal, k * f.offset) for f in P.facets}
        assert lct(Pk) == lct(P) / k
        assert complement_volume(Pk) == k**J.dim * complement_volume(P)

    @given(m_primary_ideals(max_exp=6))
    @settings(max_examples=60, deadline=None)
    def test_closure(self, J):
        Jbar = integral_closure(J)
        assert all(contains_monomial(Jbar, g) for g in J.gens)
        assert integral_closure(Jbar) == Jbar
        P, Pbar = newton_polytope(J), newton_polytope(Jbar)
        assert P.facets == Pbar.facets
        assert lct(P) == lct(Pbar)

    @given(m_primary_ideals(max_exp=6))
    @settings(max_examples=60, deadline=None)
    def test_lattice_count_bounds_volume(self, J):
        vol = complement_volume(newton_polytope(J))
        assert vol <= colength(integral_closure(J)) <= colength(J)

    @given(m_primary_ideals(max_exp=6), st.data())
    @settings(max_examples=60, deadline=None)
    def test_stretch_weight_duality(self, J, data):
        p = data.draw(st.tuples(*[st.integers(1, 4)] * J.dim))
        gamma = [1 - Fraction(1, pi) for pi in p]
        assert lct(newton_polytope(stretch_ideal(J, p))) == weighted_threshold(newton_polytope(J), gamma)

    @given(m_primary_ideals(max_exp=6), st.data())
    @settings(max_examples=40, deadline=None)
    def test_permutation(self, J, data):
        perm = data.draw(st.permutations(range(J.dim)))
        P, Pp = newton_polytope(J), newton_polytope(J.permute(perm))
        assert lct(P) == lct(Pp)
        assert complement_volume(P) == complement_volume(Pp)

    @given(m_primary_ideals(max_exp=4, max_extra=2), m_primary_ideals(max_exp=4, max_extra=2))
    @settings(max_examples=40, deadline=None)
    def test_product_subadditivity(self, J1, J2):
        if J1.dim != J2.dim:
            J2 = maximal_ideal(J1.dim, 2)
        n = J1.dim
        P1, P2, P12 = (newton_polytope(J) for J in (J1, J2, product(J1, J2)))
        # 1/lct is subadditive under Minkowski sums
        assert 1 / lct(P12) <= 1 / lct(P1) + 1 / lct(P2)
        # Minkowski-type bound for mixed volumes
        e = [factorial(n) * float(complement_volume(P)) for P in (P1, P2, P12)]
        assert e[2] ** (1 / n) <= e[0] ** (1 / n) + e[1] ** (1 / n) + 1e-9

    @given(m_primary_ideals(max_exp=6))
    @settings(max_examples=40, deadline=None)
    def test_generators_in_polytope(self, J):
        P = newton_polytope(J)
        assert all(contains_point(P, g) for g in J.gens)
        t = 1 / lct(P)
        assert contains_point(P, [t] * J.dim)
        assert not contains_point(P, [t * Fraction(99, 100)] * J.dim)


class TestSmallCases:
    def test_membership_on_two_facets(self):
        P = newton_polytope(M_A2B3)
        assert contains_point(P, (Fraction(5, 3), Fraction(5, 3)))
        # (1,3) lies strictly inside both half-planes, so it supports no facet
        assert all(f.value((1, 3)) > f.offset for f in P.facets)
        assert contains_point(newton_polytope(M2), (2, 0))

    @pytest.mark.parametrize("s", [1, 2, 3, 4])
    def test_simplex_volume(self, s):
        P = newton_polytope(maximal_ideal(2, s))
        assert complement_volume(P) == Fraction(s * s, 2)
        assert is_power_of_maximal(P) == (True, s)

    def test_stretch_identity_and_m(self):
        assert stretch_ideal(A2B3, (1, 1)) == A2B3
        assert stretch_ideal(maximal_ideal(2), (2, 3)) == A2B3

    def test_weighted_m(self):
        assert weighted_threshold(newton_polytope(maximal_ideal(2)), (Fraction(1, 2), Fraction(1, 2))) == 1
        assert weighted_threshold(newton_polytope(A2B3), (0, 0)) == Fraction(5, 6)

    def test_closed_ideal(self):
        assert integral_closure(M2) == M2

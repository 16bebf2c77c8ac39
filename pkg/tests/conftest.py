from pathlib import Path

import pytest
from hypothesis import strategies as st

from lctlab.ideal import MonomialIdeal, maximal_ideal, parse_ideal
from lctlab.numeric import McConfig

ROOT = Path(__file__).resolve().parents[1]
IDEALS = ROOT / "ideals"

A2B3 = parse_ideal("vars 2 / x1^2 / x2^3")
M = maximal_ideal(2)
M2 = maximal_ideal(2, 2)
M_A2B3 = parse_ideal("vars 2 / x1^3 / x1^2*x2 / x1*x2^3 / x2^4")
A2B2 = parse_ideal("vars 2 / x1^2 / x2^2")


def shipped_ideals() -> dict[str, MonomialIdeal]:
    from lctlab.ideal import read_ideal

    return {p.name: read_ideal(p) for p in sorted(IDEALS.glob("*.ideal"))}


# cheaper Monte Carlo for tests that only need clear-cut verdicts
FAST = McConfig(samples=4000, seed=7)


@pytest.fixture
def ideals_dir() -> Path:
    return IDEALS


@st.composite
def m_primary_ideals(draw, dims=(2, 3), max_exp=5, max_extra=4):
    """Random m-primary monomial ideals: pure powers plus a few mixed generators."""
    n = draw(st.sampled_from(dims))
    gens = []
    for i in range(n):
        g = [0] * n
        g[i] = draw(st.integers(1, max_exp))
        gens.append(tuple(g))
    extra = draw(
        st.lists(
            st.tuples(*[st.integers(0, max_exp)] * n).filter(any), max_size=max_extra
        )
    )
    return MonomialIdeal(n, gens + extra)

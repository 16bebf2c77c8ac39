"""Monte Carlo singular integrals of exp(-2c phi) for model psh functions.

The ball |z| < r in C^n is cut into geometric shells rho^k r < |z| <= rho^(k-1) r. Within
a shell the radius is drawn with density proportional to R^(2n-1). The direction is
described by the moduli simplex w_j = |z_j|^2 / R^2 (uniform on the simplex for a
uniform direction) plus uniform phases. The simplex point is importance-sampled in two
stages: a pilot from a broad Dirichlet mixture whose small-alpha components reach
exponentially thin neighbourhoods of the coordinate hyperplanes (where toric
singularities live), then a Student-t fitted to the pilot in log-ratio coordinates,
kept in a defensive mixture with the broad law. Everything is evaluated in log space.

Phases are always uniform, so singularities concentrated along non-monomial curves
(e.g. x1 = x2^2) are under-sampled and their thresholds come out too high.

Every shell draws from its own Philox stream keyed by (seed, shell index). Results are
therefore identical for any worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import factorial, lgamma, pi
from typing import Sequence

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import BracketError, DomainError, InvariantError
from .ideal import MonomialIdeal, product, require_m_primary
from .poly import Polynomial
from .polytope import lct, newton_polytope, validate_weights


@dataclass(frozen=True)
class McConfig:
    samples: int = 20000
    shells: int = 24
    radius: float = 0.5
    ratio: float = 0.5
    seed: int = 42
    window: int = 4
    # z-score a decaying trend must reach for the integral to count as convergent
    significance: float = 3.0

    def __post_init__(self):
        if not 0 < self.ratio < 1:
            raise DomainError(f"shell ratio must lie in (0, 1), got {self.ratio}")
        if self.radius <= 0:
            raise DomainError(f"radius must be positive, got {self.radius}")
        if not self.shells >= self.window >= 2:
            raise DomainError("need shells >= window >= 2")
        if self.samples < 2:
            raise DomainError("need at least 2 samples per shell")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ExperimentConfig:
    """Normalisation data attached to experiment reports (not used by the integrals)."""

    boundary_bound: float = 0.0
    mass_budget: Fraction = Fraction(4)
    gamma: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        if self.boundary_bound < 0:
            raise DomainError("boundary bound A must be >= 0")
        if self.mass_budget <= 0:
            raise DomainError("mass budget M must be positive")


@dataclass(frozen=True)
class PshModel:
    variant: str
    dim: int
    ideal: MonomialIdeal | None = None
    polys: tuple[Polynomial, ...] | None = None
    scale: Fraction = Fraction(1)
    lam: Fraction | None = None
    eps: float | None = None

    @classmethod
    def toric(cls, J: MonomialIdeal, scale=1) -> "PshModel":
        """phi = (scale/2) log sum |z^beta|^2 over the generators of J."""
        if Fraction(scale) <= 0:
            raise DomainError("scale must be positive")
        return cls("toric", J.dim, ideal=J, scale=Fraction(scale))

    @classmethod
    def radial(cls, lam, n: int) -> "PshModel":
        """phi = lam log|z|."""
        if Fraction(lam) <= 0:
            raise DomainError("lambda must be positive")
        return cls("radial", n, lam=Fraction(lam))

    @classmethod
    def kiselman(cls, eps: float, n: int) -> "PshModel":
        """phi = (1/2) log(|z_1|^2 + eps^2)."""
        if eps <= 0:
            raise DomainError("epsilon must be positive")
        return cls("kiselman", n, eps=float(eps))

    @classmethod
    def poly(cls, gens: Sequence[Polynomial], scale=1) -> "PshModel":
        """phi = (scale/2) log sum |g_j|^2."""
        if not gens:
            raise DomainError("need at least one polynomial")
        if Fraction(scale) <= 0:
            raise DomainError("scale must be positive")
        return cls("poly", gens[0].dim, polys=tuple(gens), scale=Fraction(scale))

    def phi(self, log_r: np.ndarray, log_R: np.ndarray, theta: np.ndarray) -> np.ndarray:
        """phi at points with log-moduli log_r (N, n), log|z| log_R (N,), phases theta (N, n)."""
        if self.variant == "radial":
            return float(self.lam) * log_R
        if self.variant == "kiselman":
            return 0.5 * np.logaddexp(2 * log_r[:, 0], 2 * math.log(self.eps))
        if self.variant == "toric":
            betas = np.asarray(self.ideal.gens, dtype=float)
            return 0.5 * float(self.scale) * logsumexp(2 * log_r @ betas.T, axis=1)
        logs = np.stack([_log_abs_poly(p, log_r, theta) for p in self.polys], axis=1)
        return 0.5 * float(self.scale) * logsumexp(2 * logs, axis=1)

    def describe(self) -> dict:
        d: dict = {"variant": self.variant, "dim": self.dim}
        if self.ideal is not None:
            d["ideal"] = [list(g) for g in self.ideal.gens]
        if self.polys is not None:
            d["polys"] = [p.to_str() for p in self.polys]
        if self.variant in ("toric", "poly"):
            d["scale"] = str(self.scale)
        if self.lam is not None:
            d["lambda"] = str(self.lam)
        if self.eps is not None:
            d["eps"] = self.eps
        return d


def _log_abs_poly(p: Polynomial, log_r: np.ndarray, theta: np.ndarray) -> np.ndarray:
    exps = np.asarray(list(p.terms), dtype=float)
    coefs = np.asarray([float(c) for c in p.terms.values()])
    mag = log_r @ exps.T + np.log(np.abs(coefs))
    ph = theta @ exps.T + np.where(coefs < 0, pi, 0.0)
    top = mag.max(axis=1, keepdims=True)
    s = np.sum(np.exp(mag - top) * np.exp(1j * ph), axis=1)
    with np.errstate(divide="ignore"):
        return top[:, 0] + np.log(np.abs(s))


@dataclass
class McEstimate:
    value: float
    std_error: float
    shell_contributions: list[float]
    diverged: bool
    log_shell_contributions: list[float] = field(default_factory=list)
    shell_rel_errors: list[float] = field(default_factory=list)
    slope: float = float("nan")
    slope_se: float = float("nan")

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "std_error": self.std_error,
            "diverged": self.diverged,
            "log_decay_per_shell": self.slope,
            "log_decay_se": self.slope_se,
            "shell_contributions": self.shell_contributions,
        }


# Broad Dirichlet mixture on the moduli simplex: the uniform law plus components whose
# typical log w reaches depth ~ s * |log R| for each s below.
_DEPTHS = (0.5, 2.0, 8.0)
# Adaptive stage: a Student-t in additive log-ratio coordinates fitted to a pilot run,
# mixed with the broad law so the weights stay bounded.
_PILOT_FRACTION = 0.25
_DEFENSIVE = 0.3
_T_DOF = 3.0


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("TOOL_THREADS", "1")))
    except ValueError:
        return 1


def _shell_geometry(cfg: McConfig, n: int, k: int) -> tuple[float, float, float]:
    log_out = math.log(cfg.radius) + (k - 1) * math.log(cfg.ratio)
    log_in = log_out + math.log(cfg.ratio)
    rho2n = cfg.ratio ** (2 * n)
    log_vol = n * math.log(pi) - lgamma(n + 1) + 2 * n * log_out + math.log1p(-rho2n)
    return log_out, log_in, log_vol


def _draw_radius(rng, N: int, n: int, log_out: float, ratio: float) -> np.ndarray:
    """log|z| with density proportional to R^(2n-1) on the shell."""
    rho2n = ratio ** (2 * n)
    u = rng.random(N)
    return log_out + np.log(rho2n + u * (1 - rho2n)) / (2 * n)


def _broad_alphas(log_in: float) -> np.ndarray:
    depth = max(1.0, -log_in)
    return np.array([1.0] + [1.0 / (s * depth) for s in _DEPTHS])


def _broad_draw(rng, N: int, n: int, alphas: np.ndarray) -> np.ndarray:
    comp = rng.integers(0, len(alphas), size=N)
    a = alphas[comp][:, None]
    log_g = np.log(rng.gamma(a + 1.0, size=(N, n))) + np.log(rng.random((N, n))) / a
    return log_g - logsumexp(log_g, axis=1, keepdims=True)


def _broad_logpdf(log_w: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    """Log density of the broad mixture relative to the uniform law on the simplex."""
    n = log_w.shape[1]
    comp = (
        gammaln(n * alphas)[None, :]
        - n * gammaln(alphas)[None, :]
        + (alphas[None, :] - 1.0) * log_w.sum(axis=1, keepdims=True)
        - lgamma(n)
    )
    return logsumexp(comp, axis=1) - math.log(len(alphas))


class _AlrStudent:
    """Multivariate Student-t on y_j = log(w_j / w_n), pushed forward to the simplex."""

    def __init__(self, mean: np.ndarray, cov: np.ndarray):
        self.mean = mean
        self.d = len(mean)
        self.chol = np.linalg.cholesky(cov)
        self.logdet = 2 * np.sum(np.log(np.diag(self.chol)))

    @classmethod
    def fit(cls, log_w: np.ndarray, lw: np.ndarray) -> "_AlrStudent":
        y = log_w[:, :-1] - log_w[:, -1:]
        p = np.exp(lw - lw.max())
        p /= p.sum()
        mean = p @ y
        dev = y - mean
        cov = (dev * p[:, None]).T @ dev
        d = y.shape[1]
        return cls(mean, 2.0 * cov + 0.25 * np.eye(d))

    def draw(self, rng, N: int) -> np.ndarray:
        z = rng.standard_normal((N, self.d))
        chi = rng.chisquare(_T_DOF, size=N)
        y = self.mean + (z @ self.chol.T) / np.sqrt(chi / _T_DOF)[:, None]
        full = np.concatenate([y, np.zeros((N, 1))], axis=1)
        return full - logsumexp(full, axis=1, keepdims=True)

    def logpdf(self, log_w: np.ndarray) -> np.ndarray:
        n = log_w.shape[1]
        y = log_w[:, :-1] - log_w[:, -1:]
        sol = np.linalg.solve(self.chol, (y - self.mean).T)
        maha = np.sum(sol * sol, axis=0)
        d, nu = self.d, _T_DOF
        log_t = (
            lgamma((nu + d) / 2)
            - lgamma(nu / 2)
            - 0.5 * d * math.log(nu * pi)
            - 0.5 * self.logdet
            - 0.5 * (nu + d) * np.log1p(maha / nu)
        )
        # Jacobian of the log-ratio chart is prod(w_j); reference law is uniform, density (n-1)!
        return log_t - log_w.sum(axis=1) - lgamma(n)


def _log_integrand(model, c, gamma, log_R, log_w, theta) -> np.ndarray:
    log_r = log_R[:, None] + 0.5 * log_w
    log_f = -2.0 * c * model.phi(log_r, log_R, theta)
    if gamma is not None:
        log_f = log_f - 2.0 * (log_r @ np.asarray(gamma, dtype=float))
    return log_f


def _shell_estimate(model: PshModel, c: float, gamma, cfg: McConfig, k: int):
    """(log of the shell integral, relative standard error) for shell k (1-based)."""
    n = model.dim
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([cfg.seed, k])))
    log_out, log_in, log_vol = _shell_geometry(cfg, n, k)
    N = cfg.samples
    if n == 1:
        log_R = _draw_radius(rng, N, n, log_out, cfg.ratio)
        theta = rng.random((N, 1)) * 2 * pi
        lw = _log_integrand(model, c, gamma, log_R, np.zeros((N, 1)), theta)
    else:
        alphas = _broad_alphas(log_in)
        n0 = max(2, int(N * _PILOT_FRACTION))
        log_R0 = _draw_radius(rng, n0, n, log_out, cfg.ratio)
        theta0 = rng.random((n0, n)) * 2 * pi
        log_w0 = _broad_draw(rng, n0, n, alphas)
        lw0 = _log_integrand(model, c, gamma, log_R0, log_w0, theta0) - _broad_logpdf(log_w0, alphas)
        if not np.all(np.isfinite(lw0)):
            raise InvariantError(f"non-finite integrand sample in shell {k} at c={c}")
        student = _AlrStudent.fit(log_w0, lw0)

        log_R = _draw_radius(rng, N, n, log_out, cfg.ratio)
        theta = rng.random((N, n)) * 2 * pi
        use_t = rng.random(N) >= _DEFENSIVE
        log_w = np.empty((N, n))
        log_w[~use_t] = _broad_draw(rng, int((~use_t).sum()), n, alphas)
        log_w[use_t] = student.draw(rng, int(use_t.sum()))
        log_q = np.logaddexp(
            math.log(_DEFENSIVE) + _broad_logpdf(log_w, alphas),
            math.log(1 - _DEFENSIVE) + student.logpdf(log_w),
        )
        lw = _log_integrand(model, c, gamma, log_R, log_w, theta) - log_q
    if not np.all(np.isfinite(lw)):
        raise InvariantError(f"non-finite integrand sample in shell {k} at c={c}")
    top = lw.max()
    x = np.exp(lw - top)
    mean = x.mean()
    rel_se = x.std(ddof=1) / (mean * math.sqrt(len(x)))
    return log_vol + top + math.log(mean), rel_se


def _trend(logs: np.ndarray, rel: np.ndarray, ks: np.ndarray) -> tuple[float, float]:
    """Weighted least-squares slope of log contribution against shell index."""
    w = 1.0 / np.maximum(rel, 1e-12) ** 2
    xbar = np.sum(w * ks) / np.sum(w)
    sxx = np.sum(w * (ks - xbar) ** 2)
    slope = np.sum(w * (ks - xbar) * logs) / sxx
    return float(slope), float(1.0 / math.sqrt(sxx))


def mc_integral(
    model: PshModel, c, gamma: Sequence | None = None, cfg: McConfig = McConfig()
) -> McEstimate:
    """Estimate the integral of exp(-2c phi) prod |z_j|^(-2 gamma_j) over |z| < r.

    The divergence verdict looks at the last `window` shells: the integral counts as
    convergent only when their contributions decay geometrically, i.e. the fitted log
    slope is below -significance standard errors. Otherwise it is declared divergent.
    """
    c = float(c)
    g = None
    if gamma is not None:
        g = [float(v) for v in validate_weights(gamma, model.dim)]
    ks = list(range(1, cfg.shells + 1))
    workers = _workers()
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            res = list(ex.map(lambda k: _shell_estimate(model, c, g, cfg, k), ks))
    else:
        res = [_shell_estimate(model, c, g, cfg, k) for k in ks]
    logs = np.array([r[0] for r in res])
    rel = np.array([r[1] for r in res])
    kk = np.array(ks, dtype=float)
    m = cfg.window
    slope, slope_se = _trend(logs[-m:], rel[-m:], kk[-m:])
    diverged = slope > -cfg.significance * slope_se
    with np.errstate(over="ignore"):
        contrib = np.exp(logs)
        partial = float(contrib.sum())
        diverged_se = float(np.sqrt(np.sum((contrib * rel) ** 2)))
    if diverged:
        value = partial
        se = diverged_se
    else:
        # geometric tail below the innermost shell, ratio fitted on the deeper half
        L = max(m, cfg.shells // 2)
        t_slope, _ = _trend(logs[-L:], rel[-L:], kk[-L:])
        if t_slope >= 0:
            t_slope = slope
        q = math.exp(t_slope)
        tail = float(contrib[-1]) * q / (1 - q)
        value = partial + tail
        se = float(math.sqrt(np.sum((contrib * rel) ** 2) + (tail * rel[-1]) ** 2))
        if not (math.isfinite(value) and math.isfinite(se)):
            raise InvariantError("convergent Monte Carlo estimate is not finite")
    return McEstimate(
        value=value,
        std_error=se,
        shell_contributions=[float(v) for v in contrib],
        diverged=bool(diverged),
        log_shell_contributions=[float(v) for v in logs],
        shell_rel_errors=[float(v) for v in rel],
        slope=slope,
        slope_se=slope_se,
    )


DEFAULT_BISECTION_STEPS = 7


def estimate_threshold(
    model: PshModel,
    gamma: Sequence | None = None,
    cfg: McConfig = McConfig(),
    steps: int | None = None,
    c_hi: float | None = None,
) -> tuple[float, float]:
    """Bisection bracket [c_lo, c_hi] for sup{c : exp(-2c phi) integrable near 0}.

    The initial bracket is [0, 4n]. With the default 7 steps the final width is
    4n / 128, i.e. 1/16 in dimension 2.
    """
    steps = DEFAULT_BISECTION_STEPS if steps is None else steps
    lo, hi = 0.0, float(4 * model.dim if c_hi is None else c_hi)
    if not mc_integral(model, hi, gamma, cfg).diverged:
        raise BracketError(f"no divergence detected up to c = {hi}; threshold exceeds the cap")
    for _ in range(steps):
        mid = (lo + hi) / 2
        if mc_integral(model, mid, gamma, cfg).diverged:
            hi = mid
        else:
            lo = mid
    return lo, hi


def radial_mass(lam, n: int) -> Fraction:
    """Monge-Ampere mass of lam*log|z| at 0, normalised so that log|z| has mass 1."""
    lam = Fraction(lam)
    if lam <= 0:
        raise DomainError("lambda must be positive")
    return lam**n


def sphere_area(n: int) -> float:
    """Area of the unit sphere S^(2n-1) in C^n = R^(2n)."""
    return 2 * pi**n / factorial(n - 1)


def radial_integral_exact(lam, c, n: int, r: float) -> float:
    """Integral of |z|^(-2 c lam) over |z| < r in C^n (finite iff c lam < n)."""
    a = 2 * n - 2 * float(c) * float(lam)
    if a <= 0:
        return math.inf
    return sphere_area(n) * r**a / a


def sharpness_experiment(n: int, eps_list: Sequence, cfg: McConfig = McConfig()) -> dict:
    """Radial family (n - eps) log|z|: mass stays below n^n while the integral blows up like 1/eps."""
    rows = []
    eps_sorted = sorted((Fraction(e) for e in eps_list), reverse=True)
    for e in eps_sorted:
        if not 0 < e < n:
            raise DomainError(f"eps must lie in (0, {n}), got {e}")
        lam = n - e
        est = mc_integral(PshModel.radial(lam, n), 1, cfg=cfg)
        rows.append(
            {
                "eps": str(e),
                "mass": str(radial_mass(lam, n)),
                "mass_below_bound": radial_mass(lam, n) < n**n,
                "integral": est.value,
                "std_error": est.std_error,
                "diverged": est.diverged,
                "exact_integral": radial_integral_exact(lam, 1, n, cfg.radius),
            }
        )
    for prev, row in zip(rows, rows[1:]):
        row["ratio_to_previous"] = row["integral"] / prev["integral"]
        row["inverse_eps_ratio"] = float(Fraction(prev["eps"]) / Fraction(row["eps"]))
    checks = {
        "mass_below_bound": all(r["mass_below_bound"] for r in rows),
        "integral_increasing": all(b["integral"] > a["integral"] for a, b in zip(rows, rows[1:])),
    }
    return {"experiment": "sharpness", "n": n, "rows": rows, "checks": checks}


def kiselman_integral_exact(eps: float, n: int, r: float) -> float:
    """Integral of 1/(|z_1|^2 + eps^2) over the ball |z| < r in C^n."""
    a, b = r * r, eps * eps
    m = n - 1
    # pi^n/(n-1)! * int_0^a (a-u)^m / (u+b) du, expanded binomially in v = u + b
    total = (a + b) ** m * math.log((a + b) / b)
    for j in range(1, m + 1):
        total += math.comb(m, j) * (a + b) ** (m - j) * (-1) ** j * ((a + b) ** j - b**j) / j
    return pi**n / factorial(m) * total


def kiselman_log_constant(n: int, r: float) -> float:
    """Coefficient of log(1/eps) in the small-eps growth of the Kiselman integral."""
    return 2 * pi * pi ** (n - 1) * r ** (2 * (n - 1)) / factorial(n - 1)


def kiselman_experiment(n: int, eps_list: Sequence[float], cfg: McConfig = McConfig()) -> dict:
    """phi_eps = (1/2) log(|z1|^2 + eps^2): zero Monge-Ampere mass, integral ~ log(1/eps)."""
    if n < 2:
        raise DomainError("the Kiselman example needs n >= 2")
    rows = []
    for e in sorted((float(v) for v in eps_list), reverse=True):
        if e <= 0:
            raise DomainError(f"eps must be positive, got {e}")
        est = mc_integral(PshModel.kiselman(e, n), 1, cfg=cfg)
        rows.append(
            {
                "eps": e,
                "mass": "0",
                "integral": est.value,
                "std_error": est.std_error,
                "exact_integral": kiselman_integral_exact(e, n, cfg.radius),
            }
        )
    const = kiselman_log_constant(n, cfg.radius)
    for prev, row in zip(rows, rows[1:]):
        row["difference_to_previous"] = row["integral"] - prev["integral"]
        row["log_law_difference"] = const * math.log(prev["eps"] / row["eps"])
    checks = {"mass_zero": all(r["mass"] == "0" for r in rows)}
    return {"experiment": "kiselman", "n": n, "log_constant": const, "rows": rows, "checks": checks}


def mc_complement_volume(P, cfg: McConfig = McConfig()) -> McEstimate:
    """Rejection-sampling estimate of Vol(R_+^n minus P) inside the box [0, B]^n."""
    n, B = P.dim, P.box
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([cfg.seed, 0x766F6C])))
    N = cfg.samples * 4
    x = rng.random((N, n)) * B
    inside = np.ones(N, dtype=bool)
    for f in P.facets:
        inside &= x @ np.asarray(f.normal, dtype=float) >= f.offset
    p = 1.0 - inside.mean()
    box = float(B) ** n
    return McEstimate(
        value=box * p,
        std_error=box * math.sqrt(max(p * (1 - p), 1.0 / N) / N),
        shell_contributions=[],
        diverged=False,
    )


def holder_experiment(J1: MonomialIdeal, J2: MonomialIdeal, cfg: McConfig = McConfig(), steps=None) -> dict:
    """lct of a product ideal against the bound 1/(1/lct(J1) + 1/lct(J2))."""
    require_m_primary(J1)
    require_m_primary(J2)
    if J1.dim != J2.dim:
        raise DomainError(f"dimension mismatch: {J1.dim} vs {J2.dim}")
    l1 = lct(newton_polytope(J1))
    l2 = lct(newton_polytope(J2))
    J12 = product(J1, J2)
    l12 = lct(newton_polytope(J12))
    bound = 1 / (1 / l1 + 1 / l2)
    lo, hi = estimate_threshold(PshModel.toric(J12), cfg=cfg, steps=steps)
    return {
        "experiment": "holder",
        "n": J1.dim,
        "product_ideal": [list(g) for g in J12.gens],
        "lct_1": str(l1),
        "lct_2": str(l2),
        "lct_product": str(l12),
        "holder_bound": str(bound),
        "bound_holds": l12 >= bound,
        "tight": l12 == bound,
        "mc_interval": [lo, hi],
        "mc_brackets_exact": lo <= float(l12) <= hi,
    }

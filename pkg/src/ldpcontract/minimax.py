"""Private minimax risk bounds and the supporting constructions.

Every bound here is a pointwise-evaluable formula in the problem
parameters and the two privacy constants ``upsilon(eps)`` and
``psi(eps)``.  Lower bounds come from private versions of the classical
reduction machinery (two-point / Le Cam, Assouad, mutual-information,
van Trees); the single upper bound is the risk of the Hadamard response
for distribution estimation.  Functions return plain floats; the
:class:`BoundReport` container groups several named values for
serialization and checks that lower bounds never exceed their matching
upper bounds.

The density-estimation lower bound needs an explicit packing of Holder
densities; :func:`density_packing_build` materialises the standard
perturbed-uniform family ``f_theta = 1 + gamma * sum_k theta_k g_k``
with dyadically rescaled copies of a single sine bump, sized so every
member stays a valid density in the Holder ball.  Its norms and the
neighbour total variation are computed by quadrature so the closed
forms used in the bound can be cross-checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .contraction import psi, upsilon

__all__ = [
    "BoundError",
    "BoundEntry",
    "BoundReport",
    "le_cam_lb",
    "le_cam_prior_lb",
    "entropy_estimation_lb",
    "assouad_lb",
    "distribution_estimation_lb",
    "hadamard_ub",
    "density_estimation_lb",
    "DensityPacking",
    "density_packing_build",
    "packing_neighbor_tv",
    "mim_lb",
    "gaussian_location_lb",
    "gaussian_location_table1",
    "log_unit_ball_volume_l2",
    "bht_sample_complexity",
]


class BoundError(ValueError):
    """Invalid input to a bound computation."""


class InfeasiblePackingError(BoundError):
    """No valid packing exists for the requested parameters."""


@dataclass(frozen=True)
class BoundEntry:
    """One named bound value.

    ``direction`` is ``"lower"``, ``"upper"`` or ``"value"``;
    ``group`` ties matching lower/upper entries together;
    ``up_to_constant`` flags order-only statements.
    """

    name: str
    value: float
    direction: str
    group: str = ""
    up_to_constant: bool = False
    inputs: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.direction not in {"lower", "upper", "value"}:
            raise BoundError(f"unknown bound direction {self.direction!r}")
        if math.isnan(self.value):
            raise BoundError(f"bound {self.name!r} evaluated to NaN")


@dataclass
class BoundReport:
    """Ordered collection of bound entries with consistency checking."""

    entries: list[BoundEntry] = field(default_factory=list)

    def add(self, name: str, value: float, direction: str, group: str = "",
            up_to_constant: bool = False, **inputs) -> None:
        self.entries.append(
            BoundEntry(name=name, value=float(value), direction=direction, group=group,
                       up_to_constant=up_to_constant, inputs=dict(inputs))
        )

    def validate(self) -> None:
        """Every finite lower bound must not exceed a matching finite upper bound."""
        for lo in self.entries:
            if lo.direction != "lower" or not lo.group:
                continue
            for hi in self.entries:
                if hi.direction == "upper" and hi.group == lo.group:
                    if math.isfinite(lo.value) and math.isfinite(hi.value) and lo.value > hi.value:
                        raise BoundError(
                            f"lower bound {lo.name!r} = {lo.value} exceeds "
                            f"upper bound {hi.name!r} = {hi.value}"
                        )

    def to_payload(self) -> list[dict]:
        return [
            {
                "name": e.name,
                "value": e.value,
                "direction": e.direction,
                "group": e.group,
                "up_to_constant": e.up_to_constant,
                "inputs": e.inputs,
            }
            for e in self.entries
        ]


def _pos_int(n, what: str) -> int:
    n = int(n)
    if n < 1:
        raise BoundError(f"{what} must be a positive integer, got {n}")
    return n


def _check_frac(x: float, what: str) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise BoundError(f"{what} must lie in [0, 1], got {x!r}")
    return x


# ------------------------------------------------------------------ two-point


def le_cam_lb(n: int, eps: float, alpha: float, kl: float, tv: float) -> float:
    """Two-point lower bound with the privacy-contracted separation term.

    ``alpha`` is the loss separation of the two hypotheses, ``kl`` and
    ``tv`` the divergences between them.  The testing term is the best
    of three contractions: KL through ``upsilon``, and the two
    total-variation routes through ``psi``.
    """
    n = _pos_int(n, "sample count")
    if alpha < 0:
        raise BoundError(f"separation must be non-negative, got {alpha!r}")
    if kl < 0:
        raise BoundError(f"KL divergence must be non-negative, got {kl!r}")
    tv = _check_frac(tv, "total variation")
    u, p = upsilon(eps), psi(eps)
    term = min(math.sqrt(u * kl), 2.0 * math.sqrt(p) * tv, math.sqrt(p * tv))
    return (alpha / (2.0 * math.sqrt(2.0))) * max(math.sqrt(2.0) - math.sqrt(n) * term, 0.0)


def le_cam_prior_lb(n: int, eps: float, alpha: float, tv: float) -> float:
    """Earlier two-point bound with testing term ``sqrt(n) (e^eps - 1) tv``."""
    n = _pos_int(n, "sample count")
    if alpha < 0:
        raise BoundError(f"separation must be non-negative, got {alpha!r}")
    tv = _check_frac(tv, "total variation")
    term = math.sqrt(n) * math.expm1(eps) * tv
    return (alpha / (2.0 * math.sqrt(2.0))) * max(math.sqrt(2.0) - term, 0.0)


def entropy_estimation_lb(n: int, eps: float, k: int) -> float:
    """Quadratic-risk lower bound for private entropy estimation, ``k >= 3``."""
    n = _pos_int(n, "sample count")
    if k < 3:
        raise BoundError(f"alphabet size must be at least 3, got {k}")
    u = upsilon(eps)
    inner = 1.0 if u == 0.0 else min(1.0, 1.0 / (100.0 * n * u))
    return 0.05 * inner * math.log(k - 1) ** 2


# ------------------------------------------------------------------- Assouad


def assouad_lb(n: int, eps: float, k: int, tau: float, tv_sq_sum: float) -> float:
    """Hypercube lower bound ``k tau [1 - sqrt(2 n psi / k * sum tv^2)]_+``.

    ``tv_sq_sum`` is the sum over the ``k`` coordinates of the squared
    total variation between the two single-coordinate-flipped mixtures.
    """
    n = _pos_int(n, "sample count")
    k = _pos_int(k, "hypercube dimension")
    if tau < 0 or tv_sq_sum < 0:
        raise BoundError("separation and TV budget must be non-negative")
    inner = 2.0 * n * psi(eps) / k * tv_sq_sum
    return k * tau * max(1.0 - math.sqrt(inner), 0.0)


def distribution_estimation_lb(n: int, eps: float, d: int, h: float) -> float:
    """ell_h lower bound for private discrete distribution estimation."""
    n = _pos_int(n, "sample count")
    d = _pos_int(d, "alphabet size")
    h = float(h)
    if h < 1.0:
        raise BoundError(f"norm order must satisfy h >= 1, got {h!r}")
    np_eff = n * psi(eps)
    if np_eff == 0.0:
        return 1.0
    lead = math.sqrt(2.0) * h / (h + 1.0)
    term2 = lead * (1.0 / (2.0 * h + 2.0)) ** (1.0 / h) * d ** (1.0 / h) / math.sqrt(np_eff)
    term3 = lead * (1.0 / (math.sqrt(2.0) * h)) ** (1.0 / h) * (1.0 / math.sqrt(np_eff)) ** (
        1.0 - 1.0 / h
    )
    return min(1.0, term2, term3)


def hadamard_ub(n: int, eps: float, d: int, h: float) -> float:
    """ell_h risk upper bound achieved by the Hadamard response.

    Valid for ``2 <= h <= 100`` and ``eps > 0``:
    ``e^{eps (h-1)/h} (e^eps + d)^{1/h} / ((e^eps - 1) sqrt(n))``.
    """
    n = _pos_int(n, "sample count")
    d = _pos_int(d, "alphabet size")
    h = float(h)
    if not 2.0 <= h <= 100.0:
        raise BoundError(f"norm order must satisfy 2 <= h <= 100, got {h!r}")
    if not eps > 0.0:
        raise BoundError("upper bound requires eps > 0")
    e = math.exp(eps)
    return e ** ((h - 1.0) / h) * (e + d) ** (1.0 / h) / ((e - 1.0) * math.sqrt(n))


# ------------------------------------------------------------------- density


def density_estimation_lb(n: int, eps: float, beta: float, h: float) -> float:
    """Order-level rate ``(n psi(eps))^{-h beta / (2 beta + 2)}``.

    Stated up to universal constants; infinite at ``eps = 0``.
    """
    n = _pos_int(n, "sample count")
    beta = float(beta)
    h = float(h)
    if not 0.0 < beta <= 1.0:
        raise BoundError(f"smoothness must lie in (0, 1], got {beta!r}")
    if h < 1.0:
        raise BoundError(f"norm order must satisfy h >= 1, got {h!r}")
    np_eff = n * psi(eps)
    if np_eff == 0.0:
        return math.inf
    return np_eff ** (-h * beta / (2.0 * beta + 2.0))


_HOLDER_GRID = 10_000


@lru_cache(maxsize=32)
def _unit_bump_holder_constant(beta: float) -> float:
    """Holder-beta constant of ``sin(2 pi x)`` on [0, 1], evaluated on a grid."""
    xs = np.linspace(0.0, 1.0, _HOLDER_GRID)
    gs = np.sin(2.0 * math.pi * xs)
    best = 0.0
    chunk = 256
    for lo in range(0, _HOLDER_GRID, chunk):
        dx = np.abs(xs[lo : lo + chunk, None] - xs[None, :])
        dg = np.abs(gs[lo : lo + chunk, None] - gs[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(dx > 0, dg / dx**beta, 0.0)
        best = max(best, float(r.max()))
    return best


def _half_interval_quad(f, a: float, b: float, order: int = 64) -> float:
    """Gauss-Legendre on [a, b] split at the midpoint (handles one kink)."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    total = 0.0
    mid = 0.5 * (a + b)
    for lo, hi in ((a, mid), (mid, b)):
        xs = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
        total += 0.5 * (hi - lo) * float(np.sum(weights * f(xs)))
    return total


@dataclass(frozen=True)
class DensityPacking:
    """Perturbed-uniform packing of Holder densities on [0, 1].

    Members are ``f_theta(x) = 1 + gamma sum_k theta_k g_k(x)`` for
    ``theta`` in the ``N``-cube, where ``g_k(x) = 2^{b/2} g(2^b x - k)``
    and ``g(x) = amplitude * sin(2 pi x)`` on [0, 1].  The amplitude is
    the largest keeping every member non-negative and inside the
    ``(beta, L)`` Holder ball.
    """

    beta: float
    L: float
    gamma: float
    b: int
    N: int
    amplitude: float
    g_l1: float
    g_sup: float
    g_holder: float

    def g(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = self.amplitude * np.sin(2.0 * math.pi * x)
        return np.where((x >= 0.0) & (x <= 1.0), out, 0.0)

    def g_norm(self, q: float) -> float:
        """``ell_q`` norm of the bump, by quadrature."""
        if q < 1.0:
            raise BoundError(f"norm order must satisfy q >= 1, got {q!r}")
        val = _half_interval_quad(lambda xs: np.abs(self.g(xs)) ** q, 0.0, 1.0)
        return val ** (1.0 / q)

    def _check_theta(self, theta) -> np.ndarray:
        arr = np.asarray(theta, dtype=float)
        if arr.shape != (self.N,) or np.any(np.isnan(arr)):
            raise BoundError(f"theta must be a length-{self.N} vector in [0, 1]^N")
        if np.any(arr < 0) or np.any(arr > 1):
            raise BoundError("theta entries must lie in [0, 1]")
        return arr

    def density(self, theta, x) -> np.ndarray:
        """Evaluate ``f_theta`` pointwise on [0, 1]."""
        theta = self._check_theta(theta)
        x = np.asarray(x, dtype=float)
        t = np.ldexp(x, self.b)  # 2^b x
        k = np.floor(t).astype(int)
        inside = (k >= 1) & (k <= self.N)
        k_safe = np.clip(k, 1, self.N)
        bump = 2.0 ** (self.b / 2.0) * self.amplitude * np.sin(2.0 * math.pi * (t - k_safe))
        return 1.0 + np.where(inside, self.gamma * theta[k_safe - 1] * bump, 0.0)

    def density_integral(self, theta) -> float:
        """Quadrature of ``f_theta`` over [0, 1] (should be 1)."""
        theta = self._check_theta(theta)
        total = 0.0
        width = 2.0**-self.b
        for k in range(2**self.b):
            total += _half_interval_quad(
                lambda xs: self.density(theta, xs), k * width, (k + 1) * width
            )
        return total

    def neighbor_tv_closed_form(self) -> float:
        """TV between members differing in one coordinate:
        ``(gamma / 2) 2^{-b/2} ||g||_1``."""
        return 0.5 * self.gamma * 2.0 ** (-self.b / 2.0) * self.g_l1


def density_packing_build(beta: float, L: float, n: int, eps: float) -> DensityPacking:
    """Construct the packing used by the density-estimation lower bound.

    The resolution ``b`` and perturbation size ``gamma`` follow the
    effective sample size ``n psi(eps)``; the bump amplitude is chosen
    maximal subject to non-negativity of every member and membership in
    the ``(beta, L)`` Holder ball.
    """
    n = _pos_int(n, "sample count")
    beta = float(beta)
    L = float(L)
    if not 0.0 < beta <= 1.0:
        raise BoundError(f"smoothness must lie in (0, 1], got {beta!r}")
    if not L > 0.0:
        raise BoundError(f"Holder radius must be positive, got {L!r}")
    np_eff = n * psi(eps)
    if np_eff < 1.0:
        raise InfeasiblePackingError(
            f"effective sample size n psi(eps) = {np_eff!r} below 1; no packing scale exists"
        )
    b = max(1, round(math.log2(np_eff ** (1.0 / (2.0 * beta + 2.0)) + 1.0)))
    N = 2**b - 1
    gamma = np_eff ** (-(2.0 * beta + 1.0) / (2.0 * (2.0 * beta + 2.0)))

    unit_holder = _unit_bump_holder_constant(beta)
    amp_nonneg = 1.0 / (gamma * 2.0 ** (b / 2.0))
    amp_holder = L / (gamma * 2.0 ** (b * (beta + 0.5)) * unit_holder)
    amplitude = min(amp_nonneg, amp_holder)
    if not amplitude > 0.0:
        raise InfeasiblePackingError("constraints admit no positive bump amplitude")

    g_l1 = amplitude * _half_interval_quad(
        lambda xs: np.abs(np.sin(2.0 * math.pi * xs)), 0.0, 1.0
    )
    return DensityPacking(
        beta=beta,
        L=L,
        gamma=gamma,
        b=b,
        N=N,
        amplitude=amplitude,
        g_l1=g_l1,
        g_sup=amplitude,
        g_holder=amplitude * unit_holder,
    )


def packing_neighbor_tv(pk: DensityPacking, k: int = 1) -> float:
    """Quadrature TV between packing members differing in coordinate ``k``."""
    if not 1 <= k <= pk.N:
        raise BoundError(f"coordinate must lie in 1..{pk.N}, got {k}")
    theta0 = np.zeros(pk.N)
    theta1 = np.zeros(pk.N)
    theta1[k - 1] = 1.0
    width = 2.0**-pk.b
    val = _half_interval_quad(
        lambda xs: np.abs(pk.density(theta1, xs) - pk.density(theta0, xs)),
        k * width,
        (k + 1) * width,
    )
    return 0.5 * val


# ------------------------------------------------------- mutual information


def log_unit_ball_volume_l2(d: int) -> float:
    """Log volume of the unit Euclidean ball in ``R^d``."""
    d = _pos_int(d, "dimension")
    return 0.5 * d * math.log(math.pi) - math.lgamma(1.0 + 0.5 * d)


def mim_lb(d: int, r: float, log_vd: float, entropy: float, mutual_info: float,
           eps: float) -> float:
    """Mutual-information lower bound on the Bayes ``r``-th power risk.

    ``log_vd`` is the log volume of the unit ball of the loss norm,
    ``entropy`` the differential entropy of the prior, ``mutual_info``
    the raw-data mutual information ``I(theta; X^n)``; privacy enters by
    discounting the information through ``upsilon(eps)``.
    """
    d = _pos_int(d, "dimension")
    r = float(r)
    if not r > 0.0:
        raise BoundError(f"loss power must be positive, got {r!r}")
    if mutual_info < 0.0:
        raise BoundError(f"mutual information must be non-negative, got {mutual_info!r}")
    log_pref = (
        math.log(d)
        - math.log(r)
        - 1.0
        - (r / d) * (log_vd + math.lgamma(1.0 + d / r))
    )
    return math.exp(log_pref + entropy - upsilon(eps) * mutual_info)


def gaussian_location_lb(n: int, d: int, r: float, sigma: float, eps: float,
                         log_vd: float, vol_ratio: float, rad: float) -> float:
    """Gaussian location-model lower bound for an arbitrary norm and set.

    ``vol_ratio`` is ``V(Theta) / V_2(Theta)`` (loss-ball volume of the
    parameter set over its Euclidean-ball volume), ``rad`` the Chebyshev
    radius of the set.
    """
    n = _pos_int(n, "sample count")
    d = _pos_int(d, "dimension")
    r = float(r)
    if not r > 0.0:
        raise BoundError(f"loss power must be positive, got {r!r}")
    if not (sigma > 0 and rad > 0 and vol_ratio > 0):
        raise BoundError("sigma, rad and vol_ratio must be positive")
    log_pref = (
        (1.0 - 0.5 * r) * math.log(d)
        - math.log(r)
        - 2.0
        - (r / d) * (log_vd + math.lgamma(1.0 + d / r))
        + (r / d) * math.log(vol_ratio)
    )
    u = upsilon(eps)
    noise_term = math.inf if u == 0.0 else (sigma * sigma * d / (n * u)) ** (0.5 * r)
    return math.exp(log_pref) * min(rad**r, noise_term)


def gaussian_location_table1(n: int, d: int, sigma: float, eps: float) -> float:
    """Unit-l2-ball form of the Gaussian location bound (order statement):

    ``sqrt(d) / (e^2 (V_d Gamma(1+d))^{1/d}) *
    min(1, sqrt(sigma^2 d / n) (e^eps+1)/(e^eps-1))``.
    """
    n = _pos_int(n, "sample count")
    d = _pos_int(d, "dimension")
    if not sigma > 0:
        raise BoundError(f"sigma must be positive, got {sigma!r}")
    log_vd = log_unit_ball_volume_l2(d)
    log_pref = 0.5 * math.log(d) - 2.0 - (log_vd + math.lgamma(1.0 + d)) / d
    em1 = math.expm1(eps)
    if em1 == 0.0:
        noise = math.inf
    else:
        noise = math.sqrt(sigma * sigma * d / n) * (math.exp(eps) + 1.0) / em1
    return math.exp(log_pref) * min(1.0, noise)


# ------------------------------------------------------------------- testing


def bht_sample_complexity(eps: float, tv: float, h2: float) -> tuple[float, float]:
    """Sample-complexity sandwich for private binary hypothesis testing.

    Returns ``(lower, upper)`` where
    ``lower = max(log 2.5 / (4 upsilon h2), 2 / (25 psi tv^2))`` and
    ``upper = 2 log 5 / (upsilon tv^2)``; both are infinite at
    ``eps = 0``.  The ordering ``lower <= upper`` always holds and is
    asserted.
    """
    tv = _check_frac(tv, "total variation")
    h2 = float(h2)
    if not 0.0 < h2 <= 2.0:
        raise BoundError(f"squared Hellinger must lie in (0, 2], got {h2!r}")
    if not tv > 0.0:
        raise BoundError("distinguishing identical distributions takes infinitely many samples")
    u, p = upsilon(eps), psi(eps)
    if u == 0.0:
        return math.inf, math.inf
    lower = max(math.log(2.5) / (4.0 * u * h2), 2.0 / (25.0 * p * tv * tv))
    upper = 2.0 * math.log(5.0) / (u * tv * tv)
    if lower > upper:
        raise BoundError("sample-complexity bounds out of order")  # pragma: no cover
    return lower, upper

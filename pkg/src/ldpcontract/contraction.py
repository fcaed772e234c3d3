"""Contraction coefficients of channels under privacy constraints.

For a channel ``K`` and an f-divergence ``D_f``, the contraction
coefficient is the worst-case ratio ``D_f(pK || qK) / D_f(p || q)``
over input pairs with ``D_f(p || q) > 0``.  Under an epsilon-LDP
constraint the KL, chi-squared and squared-Hellinger coefficients share
the closed-form ceiling

    upsilon(eps) = ((e^eps - 1) / (e^eps + 1))^2,

strictly below the total-variation ceiling ``(e^eps-1)/(e^eps+1)``.
The companion constant ``psi(eps) = e^{-eps}(e^eps-1)^2`` governs the
chi-squared versus total-variation comparison implemented in
:func:`chi2_tv_bound`.

Three estimators are provided:

* :func:`eta_tv_exact` - the TV coefficient, which on a finite alphabet
  is exactly the maximum TV between two rows;
* :func:`eta_chi2_at` - the input-distribution-dependent chi-squared
  coefficient, a second-singular-value computation;
* :func:`eta_bruteforce` - a grid search over binary input mixtures
  supported on every pair of input symbols, valid for any of the three
  nonlinear divergences.  Restricting to binary inputs is lossless for
  these coefficients because the worst-case pair can always be taken to
  be mixtures of two rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .probability import (
    CHI2,
    H2,
    KL,
    Channel,
    DimensionMismatch,
    DivergenceKind,
    ProbabilityError,
    ProbVector,
)

__all__ = [
    "ContractionError",
    "DegenerateChannelError",
    "ContractionEstimate",
    "upsilon",
    "psi",
    "eta_tv_exact",
    "eta_chi2_at",
    "eta_bruteforce",
    "chi2_tv_bound",
    "prior_art_bounds",
    "binary_input_kl_bound",
    "extremal_tv_under_ldp",
]

#: Input pairs whose divergence falls below this are skipped by the
#: brute-force ratio search (the ratio is ill-conditioned there; the
#: coincidence limit is covered separately by the local chi-squared
#: probe).
RATIO_FLOOR = 1e-12


class ContractionError(ValueError):
    """Invalid input to a contraction computation."""


class DegenerateChannelError(ContractionError):
    """Channel with a single input row has no contraction ratio."""


@dataclass(frozen=True)
class ContractionEstimate:
    """Result of a contraction-coefficient computation.

    ``value`` lies in [0, 1].  ``witness_p`` / ``witness_q`` are input
    distributions (approximately) achieving the reported ratio;
    ``method`` records how the value was obtained.
    """

    value: float
    kind: DivergenceKind
    witness_p: ProbVector
    witness_q: ProbVector
    method: str
    extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not (0.0 <= self.value <= 1.0):
            raise ContractionError(f"contraction value {self.value!r} outside [0, 1]")
        if self.method not in {"exact_tv", "grid", "power_iteration"}:
            raise ContractionError(f"unknown estimation method {self.method!r}")


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not (eps >= 0.0 and math.isfinite(eps)):
        raise ContractionError(f"privacy parameter must be finite and non-negative, got {eps!r}")
    return eps


def upsilon(eps: float) -> float:
    """Shared ceiling for the KL / chi-squared / Hellinger coefficients."""
    eps = _check_eps(eps)
    t = math.expm1(eps) / (math.exp(eps) + 1.0)
    return t * t


def psi(eps: float) -> float:
    """Constant ``e^{-eps} (e^eps - 1)^2`` in the chi-squared/TV bound."""
    eps = _check_eps(eps)
    return math.exp(-eps) * math.expm1(eps) ** 2


def eta_tv_exact(k: Channel) -> ContractionEstimate:
    """Total-variation contraction coefficient (Dobrushin coefficient).

    Equals the maximum total variation between two rows of the channel;
    the witnesses are point masses on the arg-max pair.
    """
    rows = k.rows
    n = k.n_in
    best = 0.0
    bi, bj = 0, min(1, n - 1)
    for i in range(n):
        diffs = 0.5 * np.abs(rows[i + 1 :] - rows[i]).sum(axis=1)
        if diffs.size:
            j = int(np.argmax(diffs))
            if diffs[j] > best:
                best = float(diffs[j])
                bi, bj = i, i + 1 + j
    return ContractionEstimate(
        value=min(best, 1.0),
        kind=DivergenceKind("tv"),
        witness_p=ProbVector.point_mass(bi, n),
        witness_q=ProbVector.point_mass(bj, n),
        method="exact_tv",
    )


def eta_chi2_at(p: ProbVector, k: Channel) -> float:
    """Chi-squared contraction coefficient at input distribution ``p``.

    Computed as the squared second-largest singular value of the matrix
    ``sqrt(p(x)) K(z|x) / sqrt((pK)(z))`` (output symbols of zero mass
    dropped).  ``p`` must have full support.  Tensorizes over product
    channels as the maximum of the per-factor coefficients.
    """
    if p.dim != k.n_in:
        raise DimensionMismatch(
            f"distribution dimension {p.dim} does not match channel input size {k.n_in}"
        )
    if np.any(p.mass <= 0):
        raise ContractionError("input distribution must have full support")
    if k.n_in < 2:
        return 0.0
    out = p.mass @ k.rows
    cols = out > 0
    m = np.sqrt(p.mass)[:, None] * k.rows[:, cols] / np.sqrt(out[cols])
    sv = np.linalg.svd(m, compute_uv=False)
    return float(np.clip(sv[1] ** 2, 0.0, 1.0))


def _binary_input_divergences(g: np.ndarray, kind_tag: str) -> np.ndarray:
    """Matrix ``D(Ber(g_a) || Ber(g_b))`` over a grid ``g`` in (0, 1)."""
    a = g[:, None]
    b = g[None, :]
    if kind_tag == "kl":
        lg = np.log(g)
        l1g = np.log1p(-g)
        return a * (lg[:, None] - lg[None, :]) + (1.0 - a) * (l1g[:, None] - l1g[None, :])
    if kind_tag == "chi2":
        return (a - b) ** 2 / (b * (1.0 - b))
    if kind_tag == "h2":
        sg = np.sqrt(g)
        s1g = np.sqrt(1.0 - g)
        return 2.0 - 2.0 * (sg[:, None] * sg[None, :] + s1g[:, None] * s1g[None, :])
    raise ContractionError(f"brute-force search does not support divergence {kind_tag!r}")


def eta_bruteforce(k: Channel, kind: DivergenceKind, grid_n: int = 201) -> ContractionEstimate:
    """Grid lower estimate of a nonlinear contraction coefficient.

    Sweeps binary input mixtures supported on each pair of input
    symbols: ``P = (alpha, 1-alpha)`` and ``Q = (beta, 1-beta)`` over a
    uniform open grid ``i / (grid_n + 1)``.  Pairs whose input
    divergence falls below :data:`RATIO_FLOOR` are skipped; the
    coincident limit ``Q -> P`` is covered by the local chi-squared
    ratio, which is evaluated on the same grid and included as a
    candidate for every divergence kind.  The estimate is monotone
    nondecreasing under nested grid refinement.
    """
    if kind.tag not in {"kl", "chi2", "h2"}:
        raise ContractionError(f"brute-force search does not support divergence {kind.tag!r}")
    if grid_n < 3:
        raise ContractionError("grid_n must be at least 3")
    if k.n_in < 2:
        raise DegenerateChannelError("channel with a single input row has no contraction ratio")

    g = np.arange(1, grid_n + 1, dtype=float) / (grid_n + 1)
    in_div = _binary_input_divergences(g, kind.tag)
    valid = in_div >= RATIO_FLOOR

    rows = k.rows
    best = -1.0
    best_pair = (0, 1)
    best_ab = (0, min(1, grid_n - 1))
    for x1 in range(k.n_in):
        for x2 in range(x1 + 1, k.n_in):
            u = rows[x1] - rows[x2]
            v = rows[x2]
            mix = v[None, :] + g[:, None] * u[None, :]  # (grid, n_out); row a is PK for alpha=g_a

            # Local (coincident-pair) chi-squared ratio: for binary mixtures the
            # chi-squared output/input ratio is independent of alpha and equals
            # beta (1 - beta) * sum_z u_z^2 / mix_{beta, z}.
            with np.errstate(divide="ignore", invalid="ignore"):
                terms = np.where(mix > 0, u[None, :] ** 2 / mix, 0.0)
            local = g * (1.0 - g) * terms.sum(axis=1)
            bloc = int(np.argmax(local))
            if local[bloc] > best:
                best = float(local[bloc])
                best_pair = (x1, x2)
                best_ab = (bloc, bloc)

            if kind.tag == "chi2":
                # The local curve *is* the full (alpha, beta) ratio surface.
                continue

            if kind.tag == "kl":
                logm = np.where(mix > 0, np.log(np.maximum(mix, 1e-300)), 0.0)
                self_term = (mix * logm).sum(axis=1)
                const_term = logm @ v
                lin_term = logm @ u
                out_div = (
                    self_term[:, None] - const_term[None, :] - g[:, None] * lin_term[None, :]
                )
            else:  # h2
                root = np.sqrt(mix)
                out_div = 2.0 - 2.0 * (root @ root.T)
            np.clip(out_div, 0.0, None, out=out_div)

            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(valid, out_div / in_div, -1.0)
            flat = int(np.argmax(ratio))
            a, b = divmod(flat, grid_n)
            if ratio[a, b] > best:
                best = float(ratio[a, b])
                best_pair = (x1, x2)
                best_ab = (a, b)

    x1, x2 = best_pair
    a, b = best_ab

    def embed(alpha: float) -> ProbVector:
        m = np.zeros(k.n_in)
        m[x1] = alpha
        m[x2] = 1.0 - alpha
        return ProbVector(m)

    beta_w = g[b]
    alpha_w = g[a] if a != b else (g[a + 1] if a + 1 < grid_n else g[a - 1])
    return ContractionEstimate(
        value=float(np.clip(best, 0.0, 1.0)),
        kind=kind,
        witness_p=embed(float(alpha_w)),
        witness_q=embed(float(beta_w)),
        method="grid",
        extra={"grid_n": grid_n, "pair": best_pair},
    )


def chi2_tv_bound(eps: float, tv: float) -> float:
    """Upper bound ``psi(eps) * min(4 tv^2, tv)`` on output chi-squared.

    ``tv`` is the total variation between the two input distributions;
    the bound applies to the chi-squared divergence between their
    privatized versions under any eps-LDP channel.
    """
    eps = _check_eps(eps)
    tv = float(tv)
    if not 0.0 <= tv <= 1.0:
        raise ContractionError(f"total variation must lie in [0, 1], got {tv!r}")
    return psi(eps) * min(4.0 * tv * tv, tv)


def prior_art_bounds(eps: float, tv: float) -> dict[str, float]:
    """Earlier comparison bounds for the same privatized-divergence question.

    Returns the KL-type bound ``min(4, e^{2 eps}) (e^eps - 1)^2 tv^2``
    and the TV-type bound ``4 (e^{eps^2} - 1) tv^2``.
    """
    eps = _check_eps(eps)
    tv = float(tv)
    if not 0.0 <= tv <= 1.0:
        raise ContractionError(f"total variation must lie in [0, 1], got {tv!r}")
    em1 = math.expm1(eps)
    return {
        "kl_quadratic": min(4.0, math.exp(2.0 * eps)) * em1 * em1 * tv * tv,
        "tv_quadratic": 4.0 * math.expm1(eps * eps) * tv * tv,
    }


def binary_input_kl_bound(k: Channel) -> float:
    """KL contraction ceiling for a binary-input channel.

    Equals ``h (1 - h / 4)`` where ``h`` is the squared Hellinger
    distance between the two rows.
    """
    if k.n_in != 2:
        raise ContractionError(f"bound requires a binary-input channel, got {k.n_in} rows")
    d = np.sqrt(k.rows[0]) - np.sqrt(k.rows[1])
    h = float(np.sum(d * d))
    return h * (1.0 - 0.25 * h)


def extremal_tv_under_ldp(eps: float) -> float:
    """Largest total variation achievable between two rows of an eps-LDP channel.

    Evaluates ``e^{-eps}(e^eps - 1)^2 / (e^eps - e^{-eps})``, which
    simplifies to ``(e^eps - 1)/(e^eps + 1)``.
    """
    eps = _check_eps(eps)
    return math.expm1(eps) / (math.exp(eps) + 1.0)

"""Locally private mechanisms on finite alphabets.

A mechanism is just a :class:`~ldpcontract.probability.Channel` whose
rows are pairwise multiplicatively close: ``K(z|x) <= e^eps K(z|x')``
for every output ``z`` and input pair ``(x, x')``.  :func:`audit_ldp`
measures the tightest such ``eps`` directly from the matrix, so every
constructor here can be verified a posteriori.

Constructors
------------
* :func:`randomized_response` - the k-ary "respond truthfully with
  boosted probability" channel, written as the mixture
  ``t * identity + (1 - t) * uniform`` with ``t = (e^eps-1)/(e^eps+k-1)``
  (this mixture form keeps the binary row gap accurate to the last bit);
* :func:`binary_mechanism` - the two-output threshold channel adapted
  to a pair of distributions, which contracts total variation by
  exactly ``(e^eps-1)/(e^eps+1)``;
* :func:`hadamard_response` - a block-structured channel for frequency
  estimation whose unbiased linear estimator has binomial count
  marginals (see :class:`HadamardConfig`).

Hadamard layout
---------------
Inputs are split into ``b`` blocks of at most ``B/2`` symbols, ``B`` a
power of two.  Block ``i`` owns the output coset ``[i*B, (i+1)*B)``.
An input with within-block index ``j`` is associated with the set
``C_x`` of columns where row ``j + 1`` of the order-``B`` Sylvester
Hadamard matrix is ``+1`` (rows ``1..B/2`` are balanced, and two
distinct such rows overlap in exactly ``B/4`` columns).  The channel
puts weight ``e^eps`` on ``C_x`` and ``1`` elsewhere, normalised.  The
estimator inverts the two resulting linear statistics: the frequency of
``C_x`` and the frequency of the block coset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import hadamard as _sylvester

from .contraction import upsilon as _upsilon, psi as _psi
from .probability import Channel, DimensionMismatch, ProbabilityError, ProbVector

__all__ = [
    "MechanismError",
    "PrivacyLevel",
    "HadamardConfig",
    "randomized_response",
    "binary_mechanism",
    "hadamard_response",
    "hadamard_estimate",
    "audit_ldp",
    "sample",
    "mix_toward_uniform",
    "project_to_simplex",
]


class MechanismError(ValueError):
    """Invalid mechanism parameters."""


@dataclass(frozen=True)
class PrivacyLevel:
    """A privacy parameter ``eps >= 0`` with its two derived constants."""

    eps: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.eps) and self.eps >= 0.0):
            raise MechanismError(f"privacy parameter must be finite and non-negative, got {self.eps!r}")

    @property
    def upsilon(self) -> float:
        return _upsilon(self.eps)

    @property
    def psi(self) -> float:
        return _psi(self.eps)


def randomized_response(k: int, eps: float) -> Channel:
    """k-ary randomized response: diagonal ``e^eps/(e^eps+k-1)``, flat elsewhere."""
    level = PrivacyLevel(float(eps))
    if k < 2:
        raise MechanismError(f"alphabet size must be at least 2, got {k}")
    e = math.exp(level.eps)
    t = (e - 1.0) / (e + k - 1.0)
    off = (1.0 - t) / k
    rows = np.full((k, k), off)
    np.fill_diagonal(rows, t + off)
    return Channel(rows)


def binary_mechanism(p: ProbVector, q: ProbVector, eps: float) -> Channel:
    """Two-output threshold mechanism adapted to the pair ``(p, q)``.

    Input symbols where ``p(x) >= q(x)`` map output 0 with probability
    ``e^eps/(1+e^eps)``; the remaining symbols with probability
    ``1/(1+e^eps)``.  The channel is exactly eps-LDP and contracts
    ``TV(p, q)`` by exactly ``(e^eps-1)/(e^eps+1)``.
    """
    level = PrivacyLevel(float(eps))
    if p.dim != q.dim:
        raise DimensionMismatch(f"alphabet sizes differ: {p.dim} vs {q.dim}")
    e = math.exp(level.eps)
    hi = e / (1.0 + e)
    lo = 1.0 / (1.0 + e)
    first = np.where(p.mass >= q.mass, hi, lo)
    return Channel(np.column_stack([first, 1.0 - first]))


@dataclass(frozen=True)
class HadamardConfig:
    """Layout parameters for the Hadamard response channel.

    ``d``: input alphabet size; ``B``: Hadamard order (power of two,
    at least 2); ``b``: number of blocks.  Blocks hold up to ``B/2``
    inputs, so ``b * B/2 >= d`` is required; the output alphabet has
    ``b * B`` symbols.
    """

    d: int
    eps: float
    B: int
    b: int

    def __post_init__(self) -> None:
        if self.d < 1:
            raise MechanismError(f"alphabet size must be positive, got {self.d}")
        PrivacyLevel(self.eps)
        if self.B < 2 or (self.B & (self.B - 1)) != 0:
            raise MechanismError(f"Hadamard order must be a power of two >= 2, got {self.B}")
        if self.b < 1:
            raise MechanismError(f"block count must be positive, got {self.b}")
        if self.b * (self.B // 2) < self.d:
            raise MechanismError(
                f"layout capacity {self.b * (self.B // 2)} below alphabet size {self.d}"
            )

    @property
    def n_out(self) -> int:
        return self.b * self.B

    @classmethod
    def for_alphabet(cls, d: int, eps: float) -> "HadamardConfig":
        """Default layout: ``B`` the smallest power of two at least
        ``min(ceil(e^eps) + 1, 2 d)``, blocks sized to cover ``d``."""
        if d < 1:
            raise MechanismError(f"alphabet size must be positive, got {d}")
        PrivacyLevel(float(eps))
        target = min(math.ceil(math.exp(eps)) + 1, 2 * d)
        B = 2
        while B < target:
            B *= 2
        b = -(-d // (B // 2))
        return cls(d=d, eps=float(eps), B=B, b=b)


def _hadamard_sets(cfg: HadamardConfig) -> list[np.ndarray]:
    """Output-column set ``C_x`` for each input symbol."""
    h = _sylvester(cfg.B)
    half = cfg.B // 2
    sets = []
    for x in range(cfg.d):
        block, j = divmod(x, half)
        cols = np.flatnonzero(h[j + 1] > 0) + block * cfg.B
        sets.append(cols)
    return sets


def hadamard_response(cfg: HadamardConfig) -> Channel:
    """Channel with weight ``e^eps`` on ``C_x`` and 1 elsewhere, normalised."""
    e = math.exp(cfg.eps)
    half = cfg.B // 2
    denom = half * e + (cfg.n_out - half)
    rows = np.full((cfg.d, cfg.n_out), 1.0 / denom)
    for x, cols in enumerate(_hadamard_sets(cfg)):
        rows[x, cols] = e / denom
    return Channel(rows)


def hadamard_estimate(histogram, cfg: HadamardConfig) -> np.ndarray:
    """Unbiased linear frequency estimator for the Hadamard response.

    ``histogram`` holds output counts of length ``b * B``.  Writing
    ``freq(S)`` for the empirical frequency of an output set, the block
    totals recover ``p(S_i)`` and the ``C_x`` frequencies then recover
    each ``p(x)``.  Both statistics are counts of fixed output sets, so
    their sampling distributions are binomial.  The returned vector is
    unbiased but not constrained to the simplex; use
    :func:`project_to_simplex` if a proper distribution is needed.
    """
    hist = np.asarray(histogram, dtype=float)
    if hist.shape != (cfg.n_out,):
        raise MechanismError(
            f"histogram length {hist.shape} does not match output alphabet {cfg.n_out}"
        )
    if np.any(hist < 0) or np.any(np.isnan(hist)):
        raise MechanismError("histogram must be non-negative")
    n = hist.sum()
    if n <= 0:
        raise MechanismError("histogram is empty")
    if cfg.eps == 0.0:
        raise MechanismError("estimator undefined at eps = 0 (channel carries no signal)")

    e = math.exp(cfg.eps)
    half = cfg.B // 2
    denom = half * e + (cfg.n_out - half)
    freq = hist / n

    block_freq = freq.reshape(cfg.b, cfg.B).sum(axis=1)
    p_block = (block_freq - cfg.B / denom) * (2.0 * denom) / (cfg.B * (e - 1.0))

    scale = 4.0 * denom / (cfg.B * (e - 1.0))
    est = np.empty(cfg.d)
    for x, cols in enumerate(_hadamard_sets(cfg)):
        block = x // half
        est[x] = scale * (freq[cols].sum() - half / denom) - p_block[block]
    return est


def project_to_simplex(v) -> ProbVector:
    """Euclidean projection of a vector onto the probability simplex."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0 or np.any(np.isnan(v)):
        raise MechanismError("projection requires a 1-d numeric vector")
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    rho = np.flatnonzero(u > css / np.arange(1, v.size + 1))[-1]
    theta = css[rho] / (rho + 1.0)
    return ProbVector(np.maximum(v - theta, 0.0))


def audit_ldp(k: Channel) -> float:
    """Tightest eps for which the channel is eps-LDP.

    Maximises ``log K(z|x) - log K(z|x')`` over all pairs and outputs;
    positions where both rows vanish are ignored, and a positive mass
    facing a zero yields ``+inf``.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        lm = np.log(k.rows)
        gap = lm[:, None, :] - lm[None, :, :]
    gap = np.where(np.isnan(gap), -np.inf, gap)  # 0/0 positions carry no constraint
    return max(float(gap.max()), 0.0)


def sample(k: Channel, x: int, rng: np.random.Generator, size: int | None = None):
    """Draw output symbol(s) for input ``x`` using the supplied generator."""
    if not 0 <= x < k.n_in:
        raise MechanismError(f"input symbol {x} outside alphabet of size {k.n_in}")
    return rng.choice(k.n_out, size=size, p=k.rows[x])


def mix_toward_uniform(k: Channel, eps: float, iters: int = 60) -> Channel:
    """Smallest uniform mixing that makes the channel eps-LDP.

    Replaces each row by ``(1 - lam) row + lam / n_out`` with ``lam``
    found by bisection so that :func:`audit_ldp` of the result is at
    most ``eps``.  Used to generate random eps-LDP channels.
    """
    PrivacyLevel(float(eps))
    if audit_ldp(k) <= eps:
        return k
    u = 1.0 / k.n_out
    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        mixed = (1.0 - mid) * k.rows + mid * u
        if audit_ldp(Channel(mixed)) <= eps:
            hi = mid
        else:
            lo = mid
    return Channel((1.0 - hi) * k.rows + hi * u)

"""Finite-alphabet probability vectors, channels, and f-divergences.

Everything downstream builds on the two value types defined here:

``ProbVector``
    an immutable probability distribution on a finite alphabet, and
``Channel``
    a row-stochastic matrix mapping an input alphabet to an output
    alphabet, stored row-major (one conditional distribution per input
    symbol).

The divergence zoo covers the f-divergences used by the contraction and
minimax machinery: Kullback-Leibler, total variation, chi-squared,
squared Hellinger, and the hockey-stick family ``E_gamma``.  All follow
the usual conventions ``0 * f(0/0) = 0`` and, for KL / chi-squared,
``+inf`` whenever the first argument puts mass where the second has
none.

Two quadrature routines reconstruct the squared Hellinger and
chi-squared divergences from the hockey-stick curve.  They exist so the
curve representation can be cross-checked against the closed forms; the
integrands vanish (or become constant) beyond the largest likelihood
ratio, so the numeric part of the integral is truncated there exactly
and the unbounded tail, when present, is added in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ProbabilityError",
    "DimensionMismatch",
    "ProbVector",
    "Channel",
    "DivergenceKind",
    "KL",
    "TV",
    "CHI2",
    "H2",
    "hockey_stick_kind",
    "push_forward",
    "divergence",
    "hockey_stick",
    "hellinger_via_eg_quadrature",
    "chi2_via_eg_quadrature",
]

#: Largest tolerated drift of a mass vector away from total mass 1.
#: Anything within this is silently renormalised; anything beyond is an
#: input error, not numerical noise.
MASS_DRIFT_LIMIT = 1e-9

QUADRATURE_TOL = 1e-8


class ProbabilityError(ValueError):
    """Invalid probability data (negative mass, bad total, NaN, ...)."""


class DimensionMismatch(ProbabilityError):
    """Operands with incompatible alphabet sizes."""


def _as_mass(values, *, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ProbabilityError(f"{what} must be a non-empty 1-d array")
    if np.any(np.isnan(arr)):
        raise ProbabilityError(f"{what} contains NaN")
    if np.any(arr < 0):
        raise ProbabilityError(f"{what} contains negative mass")
    total = float(arr.sum())
    if not math.isfinite(total) or abs(total - 1.0) > MASS_DRIFT_LIMIT:
        raise ProbabilityError(
            f"{what} has total mass {total!r}, beyond drift limit {MASS_DRIFT_LIMIT}"
        )
    arr = arr / total
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ProbVector:
    """Probability distribution on ``{0, ..., dim-1}``.

    The mass vector is validated on construction: entries must be
    non-negative and sum to 1 up to :data:`MASS_DRIFT_LIMIT`; the stored
    array is renormalised and read-only.
    """

    mass: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "mass", _as_mass(self.mass, what="probability vector"))

    @property
    def dim(self) -> int:
        return int(self.mass.size)

    def support(self) -> np.ndarray:
        """Indices carrying strictly positive mass."""
        return np.flatnonzero(self.mass > 0)

    @staticmethod
    def point_mass(index: int, dim: int) -> "ProbVector":
        if not 0 <= index < dim:
            raise ProbabilityError(f"point mass index {index} outside alphabet of size {dim}")
        m = np.zeros(dim)
        m[index] = 1.0
        return ProbVector(m)

    @staticmethod
    def uniform(dim: int) -> "ProbVector":
        if dim <= 0:
            raise ProbabilityError("alphabet size must be positive")
        return ProbVector(np.full(dim, 1.0 / dim))

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return f"ProbVector({self.mass.tolist()!r})"


@dataclass(frozen=True, eq=False)
class Channel:
    """Row-stochastic matrix ``K[z | x]`` with one row per input symbol."""

    rows: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.rows, dtype=float)
        if arr.ndim != 2 or arr.size == 0:
            raise ProbabilityError("channel must be a non-empty 2-d array")
        validated = np.vstack([_as_mass(row, what=f"channel row {i}") for i, row in enumerate(arr)])
        validated.setflags(write=False)
        object.__setattr__(self, "rows", validated)

    @property
    def n_in(self) -> int:
        return int(self.rows.shape[0])

    @property
    def n_out(self) -> int:
        return int(self.rows.shape[1])

    def row(self, x: int) -> ProbVector:
        if not 0 <= x < self.n_in:
            raise ProbabilityError(f"input symbol {x} outside alphabet of size {self.n_in}")
        return ProbVector(self.rows[x])

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return f"Channel(n_in={self.n_in}, n_out={self.n_out})"


# --------------------------------------------------------------------------
# divergences
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DivergenceKind:
    """Tagged f-divergence selector.

    Use the module constants :data:`KL`, :data:`TV`, :data:`CHI2`,
    :data:`H2`, or :func:`hockey_stick_kind` for ``E_gamma`` with a
    threshold parameter ``gamma >= 1``.
    """

    tag: str
    gamma: float | None = None

    def __post_init__(self) -> None:
        if self.tag not in {"kl", "tv", "chi2", "h2", "hockey_stick"}:
            raise ProbabilityError(f"unknown divergence tag {self.tag!r}")
        if self.tag == "hockey_stick":
            if self.gamma is None or not (self.gamma >= 1.0):
                raise ProbabilityError("hockey-stick threshold must satisfy gamma >= 1")
        elif self.gamma is not None:
            raise ProbabilityError(f"divergence {self.tag!r} takes no threshold parameter")


KL = DivergenceKind("kl")
TV = DivergenceKind("tv")
CHI2 = DivergenceKind("chi2")
H2 = DivergenceKind("h2")


def hockey_stick_kind(gamma: float) -> DivergenceKind:
    return DivergenceKind("hockey_stick", float(gamma))


def _check_pair(p: ProbVector, q: ProbVector) -> tuple[np.ndarray, np.ndarray]:
    if p.dim != q.dim:
        raise DimensionMismatch(f"alphabet sizes differ: {p.dim} vs {q.dim}")
    return p.mass, q.mass


def _kl(p: np.ndarray, q: np.ndarray) -> float:
    pos = p > 0
    if np.any(pos & (q == 0)):
        return math.inf
    pp = p[pos]
    return float(np.sum(pp * np.log(pp / q[pos])))


def _tv(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(p - q).sum())


def _chi2(p: np.ndarray, q: np.ndarray) -> float:
    if np.any((p > 0) & (q == 0)):
        return math.inf
    pos = q > 0
    d = p[pos] - q[pos]
    return float(np.sum(d * d / q[pos]))


def _h2(p: np.ndarray, q: np.ndarray) -> float:
    d = np.sqrt(p) - np.sqrt(q)
    return float(np.sum(d * d))


def _eg(p: np.ndarray, q: np.ndarray, gamma: float) -> float:
    return float(np.maximum(p - gamma * q, 0.0).sum())


def divergence(kind: DivergenceKind, p: ProbVector, q: ProbVector) -> float:
    """f-divergence ``D_f(p || q)`` for the selected ``kind``.

    Returns ``+inf`` for KL and chi-squared when ``p`` puts mass outside
    the support of ``q``; TV, squared Hellinger and hockey-stick are
    always finite.
    """
    pm, qm = _check_pair(p, q)
    if kind.tag == "kl":
        return _kl(pm, qm)
    if kind.tag == "tv":
        return _tv(pm, qm)
    if kind.tag == "chi2":
        return _chi2(pm, qm)
    if kind.tag == "h2":
        return _h2(pm, qm)
    return _eg(pm, qm, float(kind.gamma))


def hockey_stick(p: ProbVector, q: ProbVector, gamma: float) -> float:
    """Hockey-stick divergence ``E_gamma(p || q)`` for ``gamma >= 1``."""
    if not gamma >= 1.0:
        raise ProbabilityError("hockey-stick threshold must satisfy gamma >= 1")
    pm, qm = _check_pair(p, q)
    return _eg(pm, qm, float(gamma))


def push_forward(p: ProbVector, k: Channel) -> ProbVector:
    """Output distribution ``pK`` of ``p`` pushed through channel ``k``."""
    if p.dim != k.n_in:
        raise DimensionMismatch(
            f"distribution dimension {p.dim} does not match channel input size {k.n_in}"
        )
    return ProbVector(p.mass @ k.rows)


# --------------------------------------------------------------------------
# hockey-stick integral representations
# --------------------------------------------------------------------------


def _adaptive_simpson(f, a: float, b: float, tol: float, max_depth: int = 48) -> float:
    """Classic recursive adaptive Simpson on ``[a, b]``."""

    def simpson(lo, flo, hi, fhi, mid, fmid):
        return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)

    def recurse(lo, flo, hi, fhi, mid, fmid, whole, tol, depth):
        lmid = 0.5 * (lo + mid)
        rmid = 0.5 * (mid + hi)
        flmid = f(lmid)
        frmid = f(rmid)
        left = simpson(lo, flo, mid, fmid, lmid, flmid)
        right = simpson(mid, fmid, hi, fhi, rmid, frmid)
        if depth >= max_depth or abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return recurse(lo, flo, mid, fmid, lmid, flmid, left, 0.5 * tol, depth + 1) + recurse(
            mid, fmid, hi, fhi, rmid, frmid, right, 0.5 * tol, depth + 1
        )

    if b <= a:
        return 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = simpson(a, fa, b, fb, m, fm)
    return recurse(a, fa, b, fb, m, fm, whole, tol, 0)


def _breakpoints(p: np.ndarray, q: np.ndarray) -> list[float]:
    """Finite likelihood ratios above 1, in either orientation.

    The hockey-stick curves gamma -> E_gamma(p||q) and
    gamma -> E_gamma(q||p) are piecewise linear with kinks exactly at
    these ratios.
    """
    pts: list[float] = []
    both = (p > 0) & (q > 0)
    for r in np.concatenate([p[both] / q[both], q[both] / p[both]]):
        if r > 1.0 and math.isfinite(r):
            pts.append(float(r))
    return sorted(set(pts))


def _piecewise_integral(f, cut_points: list[float], lo: float, hi: float, tol: float) -> float:
    knots = [lo] + [c for c in cut_points if lo < c < hi] + [hi]
    total = 0.0
    per_piece = tol / max(len(knots) - 1, 1)
    for a, b in zip(knots[:-1], knots[1:]):
        total += _adaptive_simpson(f, a, b, per_piece)
    return total


def hellinger_via_eg_quadrature(p: ProbVector, q: ProbVector, tol: float = QUADRATURE_TOL) -> float:
    """Squared Hellinger distance recovered from the hockey-stick curve.

    Integrates ``(E_gamma(p||q) + E_gamma(q||p)) * gamma^{-3/2} / 2``
    over ``gamma >= 1``.  Past the largest finite likelihood ratio both
    curves are constant (the mass each distribution puts outside the
    other's support), so that tail is integrated in closed form.
    """
    pm, qm = _check_pair(p, q)
    cuts = _breakpoints(pm, qm)
    upper = cuts[-1] if cuts else 1.0

    def integrand(g: float) -> float:
        return 0.5 * (_eg(pm, qm, g) + _eg(qm, pm, g)) * g**-1.5

    numeric = _piecewise_integral(integrand, cuts, 1.0, upper, tol)
    escaped = float(pm[qm == 0].sum() + qm[pm == 0].sum())
    # integral of gamma^{-3/2} over [upper, inf) is 2 / sqrt(upper)
    tail = escaped * upper**-0.5
    return numeric + tail


def chi2_via_eg_quadrature(p: ProbVector, q: ProbVector, tol: float = QUADRATURE_TOL) -> float:
    """Chi-squared divergence recovered from the hockey-stick curve.

    Integrates ``2 * (E_gamma(p||q) + gamma^{-3} E_gamma(q||p))`` over
    ``gamma >= 1``.  Returns ``+inf`` when ``p`` escapes the support of
    ``q`` (matching the closed form); mass of ``q`` outside the support
    of ``p`` only contributes a convergent tail, handled in closed form.
    """
    pm, qm = _check_pair(p, q)
    if np.any((pm > 0) & (qm == 0)):
        return math.inf
    cuts = _breakpoints(pm, qm)
    upper = cuts[-1] if cuts else 1.0

    def integrand(g: float) -> float:
        return 2.0 * (_eg(pm, qm, g) + g**-3 * _eg(qm, pm, g))

    numeric = _piecewise_integral(integrand, cuts, 1.0, upper, tol)
    escaped_q = float(qm[pm == 0].sum())
    # integral of 2 gamma^{-3} over [upper, inf) is upper^{-2}
    tail = escaped_q * upper**-2
    return numeric + tail

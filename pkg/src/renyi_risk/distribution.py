"""Finite discrete distributions and their quantile-level primitives."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import logsumexp


@dataclass(frozen=True)
class DiscreteDistribution:
    """Atomic distribution of a real random variable.

    Atoms are canonicalized on construction: values sorted strictly
    increasing, bitwise-equal duplicates merged by summing probability,
    zero-probability atoms dropped, probabilities renormalized to unit sum.
    Instances are immutable and safe to share across threads.
    """

    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float).ravel()
        p = np.asarray(self.probs, dtype=float).ravel()
        if v.size == 0:
            raise ValueError("need at least one atom")
        if v.shape != p.shape:
            raise ValueError("values and probs must have equal length")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        if not np.all(np.isfinite(p)) or np.any(p < 0.0):
            raise ValueError("probabilities must be finite and nonnegative")
        if not p.sum() > 0.0:
            raise ValueError("probabilities must have positive sum")
        uniq, inverse = np.unique(v, return_inverse=True)
        merged = np.bincount(inverse, weights=p, minlength=uniq.size)
        keep = merged > 0.0
        uniq, merged = uniq[keep], merged[keep]
        merged = merged / merged.sum()
        uniq.setflags(write=False)
        merged.setflags(write=False)
        object.__setattr__(self, "values", uniq)
        object.__setattr__(self, "probs", merged)

    @property
    def n_atoms(self) -> int:
        return int(self.values.size)


def from_samples(
    values: Sequence[float], weights: Optional[Sequence[float]] = None
) -> DiscreteDistribution:
    """Build a distribution from raw samples, equally weighted by default.

    Duplicate values are merged and weights normalized to probabilities.
    """
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise ValueError("values must be nonempty")
    if weights is None:
        w = np.ones_like(v)
    else:
        w = np.asarray(weights, dtype=float).ravel()
        if w.shape != v.shape:
            raise ValueError("weights must match values in length")
    return DiscreteDistribution(v, w)


def esssup(d: DiscreteDistribution) -> float:
    return float(d.values[-1])


def essinf(d: DiscreteDistribution) -> float:
    return float(d.values[0])


def expectation(d: DiscreteDistribution) -> float:
    return float(np.dot(d.probs, d.values))


def var_level(d: DiscreteDistribution, alpha: float) -> float:
    """Left-continuous lower quantile.

    Smallest value v with P(Y <= v) >= alpha for alpha > 0; the essential
    infimum at alpha = 0.
    """
    if math.isnan(alpha) or not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0,1)")
    if alpha == 0.0:
        return essinf(d)
    cdf = np.cumsum(d.probs)
    idx = int(np.searchsorted(cdf, alpha, side="left"))
    idx = min(idx, d.n_atoms - 1)
    return float(d.values[idx])


def power_mean(d: DiscreteDistribution, p: float, shift: float, mode: str = "plus_part") -> float:
    """Weighted p-mean of the shifted values, evaluated in log space.

    ``plus_part`` uses (Y - shift)_+, dropping atoms at zero (p > 0 only);
    ``full`` uses (shift - Y) and requires every gap strictly positive.
    Log-space evaluation keeps |p| up to several hundred overflow-safe.
    """
    if p == 0.0 or math.isnan(p) or math.isinf(p):
        raise ValueError("p must be a nonzero finite real")
    if mode == "plus_part":
        g = d.values - shift
        active = g > 0.0
        if p < 0.0 and not np.all(active):
            raise ValueError("nonpositive argument raised to a negative power")
        if not active.any():
            return 0.0
        lse = logsumexp(np.log(d.probs[active]) + p * np.log(g[active]))
    elif mode == "full":
        g = shift - d.values
        if np.any(g <= 0.0):
            raise ValueError("full mode needs the shift above every value")
        lse = logsumexp(np.log(d.probs) + p * np.log(g))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return float(np.exp(lse / p))


def lp_norm(d: DiscreteDistribution, p: float) -> float:
    """(E |Y|^p)^(1/p); p is any nonzero real, +inf gives esssup |Y|."""
    if p == 0.0 or math.isnan(p):
        raise ValueError("p must be nonzero")
    a = np.abs(d.values)
    if math.isinf(p):
        if p < 0:
            raise ValueError("p must be nonzero real or +inf")
        return float(a.max())
    active = a > 0.0
    if p < 0.0 and not np.all(active):
        raise ValueError("negative p needs strictly nonzero values")
    if not active.any():
        return 0.0
    lse = logsumexp(np.log(d.probs[active]) + p * np.log(a[active]))
    return float(np.exp(lse / p))

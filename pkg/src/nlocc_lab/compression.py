"""Typical-subspace sizes and compression rates computed from spectra.

Everything works on the spectrum of a single copy: the eigenvalues of
rho^(x)n are products of single-copy eigenvalues, enumerated by
multiplicity strata (multinomial counts over eigenvalue types), so the
n-copy operator is never materialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ValidationError
from .operators import DensityMatrix, eig_hermitian

_SUM_TOL = 1e-10
# log-products closer than this are treated as exact ties and grouped
_TIE_TOL = 1e-9


@dataclass(frozen=True)
class SpectrumPower:
    """Spectrum of a single copy plus a copy count n."""

    base_eigenvalues: tuple
    n: int

    def __post_init__(self):
        ev = tuple(float(x) for x in self.base_eigenvalues)
        object.__setattr__(self, "base_eigenvalues", ev)
        if self.n < 1:
            raise ValidationError(f"copy count must be >= 1, got {self.n}")
        if any(x < -_SUM_TOL for x in ev):
            raise ValidationError(f"negative eigenvalue in spectrum: {min(ev)}")
        if abs(sum(ev) - 1.0) > _SUM_TOL:
            raise ValidationError(f"spectrum sums to {sum(ev)}, not 1")


@dataclass(frozen=True)
class CompressionResult:
    n: int
    epsilon: float
    projector_dim: int
    rate_bits_per_copy: float
    purity_rate: float
    min_trace: float


def _check_epsilon(epsilon: float):
    if not (0.0 < epsilon < 1.0):
        raise ValidationError(f"epsilon must lie strictly in (0, 1), got {epsilon}")


def _compositions(n: int, d: int):
    """All ways to split n copies among d eigenvalue types (stars and bars)."""
    for bars in combinations(range(n + d - 1), d - 1):
        prev = -1
        c = []
        for b in bars:
            c.append(b - prev - 1)
            prev = b
        c.append(n + d - 2 - prev)
        yield tuple(c)


def _multinomial(c) -> int:
    n = sum(c)
    out = 1
    for k in c:
        out *= math.comb(n, k)
        n -= k
    return out


def _strata(eigs, n, weights=None):
    """Strata of n-fold products: (log_value, count) sorted descending.

    ``weights`` defaults to the eigenvalues themselves; passing a second
    distribution gives strata valued by that distribution instead (used
    for mismatched compression). Ties in log value are merged. Strata of
    value zero are returned with log_value = -inf.
    """
    weights = eigs if weights is None else weights
    raw = []
    for c in _compositions(n, len(eigs)):
        if any(k > 0 and w <= 0.0 for k, w in zip(c, weights)):
            logv = -math.inf
        else:
            logv = sum(k * math.log2(w) for k, w in zip(c, weights) if k > 0)
        raw.append((logv, c))
    raw.sort(key=lambda t: t[0], reverse=True)
    grouped = []
    for logv, c in raw:
        if grouped and (logv == grouped[-1][0] == -math.inf
                        or abs(logv - grouped[-1][0]) <= _TIE_TOL):
            prev_logv, cs = grouped[-1]
            cs.append(c)
        else:
            grouped.append((logv, [c]))
    return [(logv, sum(_multinomial(c) for c in cs), cs) for logv, cs in grouped]


def typical_projector_dim(sp: SpectrumPower, epsilon: float) -> int:
    """Minimal dimension of a projector capturing weight 1-epsilon of rho^(x)n.

    The optimal projector is spanned by the largest product eigenvalues;
    only the count matters, so the walk is over strata.
    """
    _check_epsilon(epsilon)
    target = 1.0 - epsilon
    cum = 0.0
    total = 0
    for logv, count, _ in _strata(sp.base_eigenvalues, sp.n):
        v = 2.0 ** logv if logv > -math.inf else 0.0
        if v <= 0.0:
            break
        if cum + v * count >= target:
            deficit = target - cum
            need = max(1, math.ceil(deficit / v - 1e-12))
            return total + min(need, count)
        cum += v * count
        total += count
    return total  # full support already reaches the target up to rounding


def min_trace_operator(sp: SpectrumPower, epsilon: float) -> float:
    """Minimal trace of a positive operator A with Tr(rho^(x)n A) >= 1-epsilon.

    With 0 <= A <= I the optimum is the fractional greedy knapsack on the
    descending product eigenvalues, so the trace is generally fractional.
    """
    _check_epsilon(epsilon)
    target = 1.0 - epsilon
    cum = 0.0
    trace = 0.0
    for logv, count, _ in _strata(sp.base_eigenvalues, sp.n):
        v = 2.0 ** logv if logv > -math.inf else 0.0
        if v <= 0.0:
            break
        if cum + v * count >= target:
            return trace + max(0.0, target - cum) / v
        cum += v * count
        trace += count
    return trace


def purity_rate(rho: DensityMatrix, n: int, epsilon: float) -> CompressionResult:
    """Compression and purity-concentration rates for rho^(x)n.

    rate = (1/n) log2 dim P tends to S(rho); the purity rate
    log2 d - rate tends to log2 d - S(rho) as n grows.
    """
    w, _ = eig_hermitian(rho.op)
    w = np.clip(w, 0.0, None)
    sp = SpectrumPower(tuple(w / w.sum()), n)
    dim = typical_projector_dim(sp, epsilon)
    rate = math.log2(dim) / n
    return CompressionResult(
        n=n,
        epsilon=epsilon,
        projector_dim=dim,
        rate_bits_per_copy=rate,
        purity_rate=math.log2(rho.dim) - rate,
        min_trace=min_trace_operator(sp, epsilon),
    )


@dataclass(frozen=True)
class MismatchedResult:
    rate_bits_per_copy: float
    class_count: int
    set_size: int
    p_mass: float


def mismatched_detail(p, q, n: int, epsilon: float) -> MismatchedResult:
    """Compress a p-source with machinery built for q (classical case).

    Sequences are grouped into q-type classes (equal q-probability, ties
    merged whole) taken in descending q-probability order until p-mass
    1-epsilon is captured. The reported rate is the bit cost the
    q-designed scheme assigns to the last class admitted,
    -(1/n) log2 q(x); it converges to the cross entropy
    S(p) + D(p||q) and equals log2 d exactly for uniform q.
    """
    _check_epsilon(epsilon)
    p = tuple(float(x) for x in p)
    q = tuple(float(x) for x in q)
    if len(p) != len(q):
        raise ValidationError(f"p and q must have equal length ({len(p)} vs {len(q)})")
    for dist, name in ((p, "p"), (q, "q")):
        if any(x < -_SUM_TOL for x in dist) or abs(sum(dist) - 1.0) > _SUM_TOL:
            raise ValidationError(f"{name} is not a probability distribution: {dist}")
    target = 1.0 - epsilon
    cum = 0.0
    size = 0
    classes = 0
    for logq, count, comps in _strata(p, n, weights=q):
        # add counts in log space: multinomials overflow float past n ~ 1000
        mass = sum(2.0 ** (math.log2(_multinomial(c))
                           + sum(k * math.log2(x) for k, x in zip(c, p) if k > 0))
                   for c in comps
                   if not any(k > 0 and x <= 0.0 for k, x in zip(c, p)))
        classes += 1
        size += count
        cum += mass
        if cum >= target - _SUM_TOL:
            if logq == -math.inf:
                break
            rate = -logq / n
            return MismatchedResult(rate, classes, size, cum)
    # capture is impossible inside the support of q
    return MismatchedResult(math.inf, classes, size, cum)


def mismatched_rate(p, q, n: int, epsilon: float) -> float:
    """Rate in bits per copy of mismatched type-class compression."""
    return mismatched_detail(p, q, n, epsilon).rate_bits_per_copy

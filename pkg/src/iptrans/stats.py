"""Goodness-of-fit and independence testing used by the verification harness.

Two primitives:

* ``ks_one_sample`` compares a sample against a distribution function with
  the Kolmogorov-Smirnov statistic D_n = sup_t |F_n(t) - F(t)| and the fixed
  1% asymptotic critical value 1.628 / sqrt(n).
* ``independence_test`` measures dependence between two samples with the
  sample distance correlation and calibrates it by random permutations of one
  margin; the observed statistic uses the O(n^2) double-centered definition,
  the permutation replicas an algebraically identical O(n log n) route (see
  ``_fastdcov``), and the two are pinned against each other in the tests.

Both return a :class:`TestReport`, whose pass/fail field is a pure function
of statistic (or p-value) versus threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import kolmogorov

from ._fastdcov import discordant_weighted_sum
from .rng import make_generator

__all__ = [
    "TestReport",
    "KS_CRITICAL_1PCT",
    "INDEPENDENCE_ALPHA",
    "ks_one_sample",
    "distance_correlation",
    "independence_test",
]

# asymptotic 1% Kolmogorov-Smirnov critical coefficient: D threshold is
# KS_CRITICAL_1PCT / sqrt(n)
KS_CRITICAL_1PCT = 1.628
# permutation test rejects independence when p < INDEPENDENCE_ALPHA
INDEPENDENCE_ALPHA = 0.01

_MIN_KS_N = 10
_MIN_INDEP_N = 100
_MIN_PERMUTATIONS = 199


@dataclass(frozen=True)
class TestReport:
    """One named check; ``passed`` is determined by the recorded numbers."""

    name: str
    statistic: float
    threshold: float
    passed: bool
    p_value: float | None = None
    n: int | None = None
    seed: int | None = None

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "pass": self.passed,
        }
        if self.p_value is not None:
            out["p_value"] = self.p_value
        if self.n is not None:
            out["n"] = self.n
        if self.seed is not None:
            out["seed"] = self.seed
        return out


def ks_one_sample(values, cdf_callable, name: str = "ks") -> TestReport:
    """Kolmogorov-Smirnov test of ``values`` against a CDF callable.

    Passes when D_n < 1.628 / sqrt(n) (asymptotic 1% level).  The reported
    p-value is the asymptotic Kolmogorov tail of sqrt(n) * D_n; pass/fail is
    decided by the statistic alone.
    """
    values = np.asarray(values, dtype=float).ravel()
    n = values.size
    if n < _MIN_KS_N:
        raise ValueError(f"need at least {_MIN_KS_N} observations, got {n}")
    if not np.all(np.isfinite(values)):
        raise ValueError("observations must be finite")
    f = np.asarray(cdf_callable(np.sort(values)), dtype=float)
    if f.shape != values.shape or np.any(f < 0.0) or np.any(f > 1.0):
        raise ValueError("cdf callable must map the sample to values in [0, 1]")
    grid = np.arange(1, n + 1) / n
    d_plus = np.max(grid - f)
    d_minus = np.max(f - (grid - 1.0 / n))
    d = max(float(d_plus), float(d_minus))
    threshold = KS_CRITICAL_1PCT / math.sqrt(n)
    p = float(kolmogorov(math.sqrt(n) * d))
    return TestReport(
        name=name, statistic=d, threshold=threshold, passed=d < threshold,
        p_value=p, n=int(n),
    )


def _centered_abs_diff(values: np.ndarray) -> np.ndarray:
    # sequential row-then-column mean removal equals the textbook
    # a - rowmean - colmean + grandmean double centering
    a = np.abs(values[:, None] - values[None, :])
    a -= a.mean(axis=1, keepdims=True)
    a -= a.mean(axis=0, keepdims=True)
    return a


def distance_correlation(xs, ys) -> float:
    """Sample distance correlation in [0, 1]; 0 when either margin is constant.

    Direct O(n^2) double-centered computation of Szekely's V-statistic:
    dCov^2 = mean(A o B) with A, B the double-centered absolute-difference
    matrices, and dCor = dCov / sqrt(dVar_x * dVar_y).
    """
    xs = np.asarray(xs, dtype=float).ravel()
    ys = np.asarray(ys, dtype=float).ravel()
    if xs.size != ys.size:
        raise ValueError("samples must have equal length")
    if xs.size < 2:
        raise ValueError("need at least two observations")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise ValueError("observations must be finite")
    a = _centered_abs_diff(xs)
    b = _centered_abs_diff(ys)
    dcov2 = float((a * b).mean())
    dvarx = float((a * a).mean())
    dvary = float((b * b).mean())
    if dvarx <= 0.0 or dvary <= 0.0:
        return 0.0
    return math.sqrt(max(dcov2, 0.0) / math.sqrt(dvarx * dvary))


def _moment_sums(x: np.ndarray, w: np.ndarray, rank_by_slot: np.ndarray) -> float:
    """dCov^2 for the pairing (x_k, w_k) via the S1 + S2 - 2*S3 route."""
    n = x.size
    concordant_total = n * float(x @ w) - float(x.sum()) * float(w.sum())
    discordant = discordant_weighted_sum(x, w, rank_by_slot)
    t = concordant_total - 2.0 * discordant
    return 2.0 * t / (n * n)


def _row_abs_sums(values: np.ndarray) -> np.ndarray:
    # row sums of |v_k - v_l| in O(n log n) via the sorted prefix identity
    order = np.argsort(values, kind="stable")
    v = values[order]
    n = v.size
    prefix = np.concatenate([[0.0], np.cumsum(v)])
    i = np.arange(1, n + 1)
    # for sorted v: sum_j |v_i - v_j| = v_i*(2i - 1 - n) - prefix[i-1]
    #                                   + (prefix[n] - prefix[i])
    row_sorted = v * (2 * i - 1 - n) - prefix[i - 1] + (prefix[n] - prefix[i])
    out = np.empty(n)
    out[order] = row_sorted
    return out


def independence_test(
    xs,
    ys,
    permutations: int = 200,
    seed: int = 0,
    name: str = "independence_dcor",
) -> TestReport:
    """Permutation test of independence based on distance correlation.

    The p-value is (1 + #{permuted dCov^2 >= observed dCov^2}) /
    (permutations + 1); independence *passes* when p >= 0.01.  Permuting one
    margin leaves the distance variances unchanged, so ranking dCov^2 is
    equivalent to ranking dCor, and the permutation loop only needs the
    moment-sum decomposition.
    """
    xs = np.asarray(xs, dtype=float).ravel()
    ys = np.asarray(ys, dtype=float).ravel()
    if xs.size != ys.size:
        raise ValueError("samples must have equal length")
    n = xs.size
    if n < _MIN_INDEP_N:
        raise ValueError(f"need at least {_MIN_INDEP_N} paired observations, got {n}")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise ValueError("observations must be finite")
    permutations = int(permutations)
    if permutations < _MIN_PERMUTATIONS:
        raise ValueError(f"need at least {_MIN_PERMUTATIONS} permutations")

    observed_dcor = distance_correlation(xs, ys)

    # same quantity through the fast route, for scale-consistent comparisons
    order = np.argsort(ys, kind="stable")
    y_sorted = ys[order]
    n_f = float(n)
    # 1-based x ranks per original index
    xrank = np.empty(n, dtype=np.int64)
    xrank[np.argsort(xs, kind="stable")] = np.arange(1, n + 1)
    arow = _row_abs_sums(xs)
    brow_sorted = _row_abs_sums(ys)[order]
    s2 = (arow.sum() / (n_f * n_f)) * (brow_sorted.sum() / (n_f * n_f))

    def dcov2_for(perm_of_slots: np.ndarray) -> float:
        x_slot = xs[perm_of_slots]
        s1 = _moment_sums(x_slot, y_sorted, xrank[perm_of_slots])
        s3 = float(arow[perm_of_slots] @ brow_sorted) / n_f**3
        return s1 + s2 - 2.0 * s3

    # slot j carries ys[order[j]], so the observed pairing is perm == order
    observed_dcov2 = dcov2_for(order)
    rng = make_generator(seed)
    exceed = 0
    for _ in range(permutations):
        perm = rng.permutation(n)
        if dcov2_for(perm) >= observed_dcov2:
            exceed += 1
    p = (1.0 + exceed) / (permutations + 1.0)
    return TestReport(
        name=name,
        statistic=observed_dcor,
        threshold=INDEPENDENCE_ALPHA,
        passed=p >= INDEPENDENCE_ALPHA,
        p_value=p,
        n=int(n),
        seed=int(seed),
    )

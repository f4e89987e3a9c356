"""Rank-correlation engine.

Kendall's tau-b (tie-corrected, O(n log n) via merge counting), the
tau-to-Pearson bridge, a one-sided normal-approximation significance test,
the lag search that shifts the valuation series week by week to maximize
tau, and the three-way strength classification:

* G1 -- strong correlation with no shift applied
* G2 -- strong correlation once a nonzero shift is applied, and the shift
        improves tau by at least 50% over the unshifted baseline
* G3 -- weak correlation in every option
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date
from itertools import groupby
from statistics import NormalDist

from .errors import DegenerateInputError, InputError
from .preprocess import MIN_ALIGN_OVERLAP, WeeklySeries, align, weeks_between

G1 = "G1"
G2 = "G2"
G3 = "G3"

# baselines at or below this are treated as no meaningful signal: any strong
# shifted tau over such a baseline passes the improvement gate outright
NEAR_ZERO_BASELINE = 0.05


@dataclass(frozen=True)
class ThresholdConfig:
    strong_tau: float = 0.5
    min_improvement: float = 0.5
    significance_alpha: float = 0.01

    def __post_init__(self) -> None:
        if not 0 < self.strong_tau < 1:
            raise InputError(f"strong_tau must be in (0, 1), got {self.strong_tau}")
        if not 0 < self.significance_alpha < 0.5:
            raise InputError(f"significance_alpha must be in (0, 0.5), got {self.significance_alpha}")
        if self.min_improvement < 0:
            raise InputError(f"min_improvement must be >= 0, got {self.min_improvement}")


@dataclass(frozen=True)
class CorrelationResult:
    company_id: str
    tau_zero: float
    tau_best: float
    lag_weeks: int
    n: int
    significant: bool
    threshold: float
    group: str
    improvement: float


def _tie_pairs(values) -> int:
    """Number of pairs tied on the given key sequence (must be sorted)."""
    total = 0
    for _, grp in groupby(values):
        t = sum(1 for _ in grp)
        total += t * (t - 1) // 2
    return total


def _merge_count(seq: list) -> int:
    """Count strict inversions (i < j with seq[i] > seq[j]) by merge sort."""
    n = len(seq)
    if n < 2:
        return 0
    buf = list(seq)
    tmp = [None] * n
    count = 0
    width = 1
    while width < n:
        for lo in range(0, n - width, 2 * width):
            mid = lo + width
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if buf[i] <= buf[j]:
                    tmp[k] = buf[i]
                    i += 1
                else:
                    tmp[k] = buf[j]
                    j += 1
                    count += mid - i
                k += 1
            while i < mid:
                tmp[k] = buf[i]
                i += 1
                k += 1
            while j < hi:
                tmp[k] = buf[j]
                j += 1
                k += 1
            buf[lo:hi] = tmp[lo:hi]
        width *= 2
    return count


def kendall_tau(x, y) -> float:
    """Tie-corrected Kendall rank correlation (tau-b) in O(n log n).

    With C concordant pairs, D discordant pairs and n_x / n_y pairs tied on
    each side, tau-b = (C - D) / sqrt((n0 - n_x) * (n0 - n_y)) where
    n0 = n(n-1)/2. An input that is entirely tied on either side has no
    rank ordering and raises DegenerateInputError.
    """
    x = list(x)
    y = list(y)
    if len(x) != len(y):
        raise InputError(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 2:
        raise InputError(f"need at least 2 observations, got {n}")

    pairs = sorted(zip(x, y))
    n0 = n * (n - 1) // 2
    ties_x = _tie_pairs(px for px, _ in pairs)
    ties_y = _tie_pairs(sorted(y))
    ties_xy = _tie_pairs(pairs)
    if ties_x == n0 or ties_y == n0:
        raise DegenerateInputError("tau undefined: one input is entirely tied")

    swaps = _merge_count([py for _, py in pairs])
    numerator = n0 - ties_x - ties_y + ties_xy - 2 * swaps
    tau = numerator / math.sqrt((n0 - ties_x) * (n0 - ties_y))
    return max(-1.0, min(1.0, tau))


def tau_to_pearson(tau: float) -> float:
    """Map a tau value onto the Pearson scale: sin(pi * tau / 2).

    Reporting bridge only; 0.5 on the tau scale lands at ~0.707, the usual
    lower bound for a strong Pearson correlation.
    """
    if not -1 <= tau <= 1:
        raise InputError(f"tau must be in [-1, 1], got {tau}")
    return math.sin(0.5 * math.pi * tau)


def tau_null_sd(n: int) -> float:
    """Standard deviation of tau under the independence null, normal approximation."""
    return math.sqrt(2 * (2 * n + 5) / (9 * n * (n - 1)))


def tau_significance(tau: float, n: int, alpha: float = 0.01) -> tuple[bool, float]:
    """One-sided test of positive association via the normal approximation.

    Requires n > 10 for the approximation to hold. Returns the verdict and
    the rejection threshold z_(1-alpha) * sd(tau | null).
    """
    if n <= 10:
        raise InputError(f"significance test needs more than 10 points, got {n}")
    threshold = NormalDist().inv_cdf(1 - alpha) * tau_null_sd(n)
    return tau > threshold, threshold


def feasible_lag_bounds(
    interest: WeeklySeries, valuation: WeeklySeries, founded: date
) -> tuple[int, int]:
    """Weekly shift bounds for the lag search.

    Backward shifts stop where the valuation series would start before the
    company existed (and never leave the covered interest history); forward
    shifts stop where the valuation series would outrun the interest series.
    """
    offset = weeks_between(interest.start_week, valuation.start_week)
    lag_min = max(-offset, -((valuation.start_week - founded).days // 7))
    lag_max = len(interest) - len(valuation) - offset
    return lag_min, lag_max


def acc_lag_search(
    interest: WeeklySeries,
    valuation: WeeklySeries,
    founded: date,
) -> tuple[int, float]:
    """Scan every feasible integer weekly lag and return (lag, tau) maximizing tau.

    Exact ties are broken toward the smaller absolute lag (negative before
    positive), which avoids reporting spurious long shifts.
    """
    if len(valuation) < MIN_ALIGN_OVERLAP:
        raise InputError(f"valuation series too short to align: {len(valuation)} weeks")
    lag_min, lag_max = feasible_lag_bounds(interest, valuation, founded)
    if lag_min > lag_max:
        raise InputError(f"empty feasible lag range [{lag_min}, {lag_max}]")

    best: tuple[int, float] | None = None
    for lag in sorted(range(lag_min, lag_max + 1), key=lambda L: (abs(L), L)):
        pair = align(interest, valuation, lag)
        try:
            tau = kendall_tau(pair.interest, pair.valuation)
        except DegenerateInputError:
            continue
        if best is None or tau > best[1]:
            best = (lag, tau)
    if best is None:
        raise DegenerateInputError("every lag produced an entirely tied pairing")
    return best


def classify_group(
    tau_zero: float,
    acc_result: tuple[int, float] | None,
    cfg: ThresholdConfig,
) -> tuple[str, float]:
    """Assign G1/G2/G3 and report the relative tau improvement from shifting.

    ``acc_result`` must be present exactly when the unshifted tau fell below
    the strong-link threshold.
    """
    if tau_zero >= cfg.strong_tau:
        if acc_result is not None:
            raise InputError("lag search result supplied for a case that is strong without a shift")
        return G1, 0.0
    if acc_result is None:
        raise InputError("lag search result required when the unshifted tau is weak")
    lag, tau_shift = acc_result
    if tau_zero > NEAR_ZERO_BASELINE:
        improvement = max(0.0, (tau_shift - tau_zero) / tau_zero)
    else:
        improvement = math.inf
    if lag != 0 and tau_shift >= cfg.strong_tau and improvement >= cfg.min_improvement:
        return G2, improvement
    return G3, improvement


def correlate_company(
    company_id: str,
    founded: date,
    interest: WeeklySeries,
    valuation: WeeklySeries,
    cfg: ThresholdConfig,
) -> CorrelationResult:
    """Full per-company analysis: unshifted tau, lag search if weak, classification, significance."""
    pair = align(interest, valuation, 0)
    tau_zero = kendall_tau(pair.interest, pair.valuation)

    acc_result = None
    if tau_zero < cfg.strong_tau:
        acc_result = acc_lag_search(interest, valuation, founded)
    group, improvement = classify_group(tau_zero, acc_result, cfg)

    if group == G1:
        lag, tau_best = 0, tau_zero
    elif group == G2:
        lag, tau_best = acc_result
    else:
        shift_lag, tau_shift = acc_result
        if tau_shift > tau_zero:
            lag, tau_best = shift_lag, tau_shift
        else:
            lag, tau_best = 0, tau_zero

    significant, threshold = tau_significance(tau_best, pair.n, cfg.significance_alpha)
    return CorrelationResult(
        company_id=company_id,
        tau_zero=tau_zero,
        tau_best=tau_best,
        lag_weeks=lag,
        n=pair.n,
        significant=significant,
        threshold=threshold,
        group=group,
        improvement=improvement,
    )

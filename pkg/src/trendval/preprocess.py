"""Turn raw interest windows and valuation rounds into aligned weekly series.

The interest side is stitched from overlapping export windows (each window
is normalized to its own maximum, so stitching rescales later windows by the
ratio of overlap means and renormalizes the result to a single global
maximum of 100), then smoothed. The valuation side is lightly smoothed at
the round level, linearly interpolated onto the weekly grid, then smoothed
again. Both sides end min-max normalized to [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, timedelta

import numpy as np

from .errors import InputError
from .ingest import GtWindow, ValuationSeries

# series kinds
RAW_INTEREST = "RawInterest"
STITCHED_INTEREST = "StitchedInterest"
FILTERED_INTEREST = "FilteredInterest"
RAW_VALUATION = "RawValuation"
INTERPOLATED_VALUATION = "InterpolatedValuation"
FILTERED_VALUATION = "FilteredValuation"
NORMALIZED = "Normalized"

MIN_STITCH_OVERLAP = 4
MIN_ALIGN_OVERLAP = 10


@dataclass(frozen=True)
class FilterConfig:
    alpha_interest: float = 0.2
    alpha_valuation_raw: float = 0.99
    alpha_valuation_weekly: float = 0.9

    def __post_init__(self) -> None:
        for name in ("alpha_interest", "alpha_valuation_raw", "alpha_valuation_weekly"):
            a = getattr(self, name)
            if not 0 < a <= 1:
                raise InputError(f"{name} must be in (0, 1], got {a}")


@dataclass(frozen=True)
class WeeklySeries:
    start_week: date
    values: tuple[float, ...]
    kind: str

    def __post_init__(self) -> None:
        if not self.values:
            raise InputError("weekly series must be nonempty")

    def __len__(self) -> int:
        return len(self.values)

    def week(self, i: int) -> date:
        return self.start_week + timedelta(weeks=i)

    @property
    def end_week(self) -> date:
        return self.week(len(self.values) - 1)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class AlignedPair:
    interest: np.ndarray
    valuation: np.ndarray
    start_week: date  # first paired week, in interest time
    lag: int
    n: int


@dataclass
class StitchReport:
    scale_factors: list[float]
    warnings: list[str]


def weeks_between(earlier: date, later: date) -> int:
    """Whole weeks from one grid date to another; both must share the 7-day phase."""
    days = (later - earlier).days
    if days % 7 != 0:
        raise InputError(f"dates {earlier} and {later} are not on the same weekly grid")
    return days // 7


def stitch_windows(windows: tuple[GtWindow, ...] | list[GtWindow]) -> tuple[WeeklySeries, StitchReport]:
    """Merge overlapping windows into one continuous series with global max 100.

    Consecutive windows must overlap by at least 4 weeks. Each later window
    is rescaled by (mean of the accumulated series over the overlap) /
    (mean of the window over the overlap), computed on weeks where both
    sides are positive; the overlap keeps the accumulated values. The result
    is rescaled so its maximum is exactly 100, which cancels the window-local
    normalization of whichever window held the global peak.
    """
    if not windows:
        raise InputError("no windows to stitch")
    windows = sorted(windows, key=lambda w: w.points[0][0])
    report = StitchReport(scale_factors=[], warnings=[])

    start = windows[0].points[0][0]
    values = [float(v) for _, v in windows[0].points]
    for w in windows[1:]:
        w_start_idx = weeks_between(start, w.points[0][0])
        overlap = len(values) - w_start_idx
        if overlap < MIN_STITCH_OVERLAP:
            raise InputError(
                f"{w.company_id} window {w.index}: insufficient overlap "
                f"({max(overlap, 0)} weeks, need >= {MIN_STITCH_OVERLAP})"
            )
        if overlap > len(w.points):
            raise InputError(f"{w.company_id} window {w.index}: window lies inside the accumulated span")
        earlier = values[w_start_idx:]
        later = [float(v) for _, v in w.points[:overlap]]
        both_positive = [(a, b) for a, b in zip(earlier, later) if a > 0 and b > 0]
        if not both_positive:
            scale = 1.0
            report.warnings.append(
                f"{w.company_id} window {w.index}: overlap has no week positive on both sides; scale kept at 1"
            )
        else:
            mean_earlier = sum(a for a, _ in both_positive) / len(both_positive)
            mean_later = sum(b for _, b in both_positive) / len(both_positive)
            scale = mean_earlier / mean_later
        report.scale_factors.append(scale)
        values.extend(scale * float(v) for _, v in w.points[overlap:])

    peak = max(values)
    if peak <= 0:
        raise InputError("stitched series has no positive values")
    values = [v * (100.0 / peak) for v in values]
    return WeeklySeries(start, tuple(values), STITCHED_INTEREST), report


def des_filter(series: WeeklySeries, alpha: float) -> WeeklySeries:
    """Double exponential smoothing: two cascaded exponential passes.

    Each pass computes s[0] = x[0], s[t] = alpha*x[t] + (1-alpha)*s[t-1];
    the output is the second pass. alpha = 1 is the identity, and every
    output value stays inside [min(x), max(x)].
    """
    if not 0 < alpha <= 1:
        raise InputError(f"alpha must be in (0, 1], got {alpha}")
    out = _cascade(_cascade(list(series.values), alpha), alpha)
    kind = series.kind
    if kind in (RAW_INTEREST, STITCHED_INTEREST, FILTERED_INTEREST):
        kind = FILTERED_INTEREST
    elif kind in (RAW_VALUATION, INTERPOLATED_VALUATION, FILTERED_VALUATION):
        kind = FILTERED_VALUATION
    return WeeklySeries(series.start_week, tuple(out), kind)


def _cascade(x: list[float], alpha: float) -> list[float]:
    s = [x[0]]
    for t in range(1, len(x)):
        s.append(alpha * x[t] + (1 - alpha) * s[-1])
    return s


def interpolate_valuation(
    series: ValuationSeries,
    config: FilterConfig,
    grid_anchor: date | None = None,
) -> WeeklySeries:
    """Round values -> light smoothing -> weekly linear interpolation -> smoothing.

    Interpolation is linear in calendar time, evaluated at week starts on
    the grid whose phase is set by ``grid_anchor`` (default: the first round
    date). The weekly span runs from the week containing the first round to
    the week containing the last; the edge weeks clamp to the boundary round
    values.
    """
    if len(series.rounds) < 2:
        raise InputError(f"{series.company_id}: need at least 2 rounds to interpolate, got {len(series.rounds)}")
    anchor = grid_anchor if grid_anchor is not None else series.rounds[0].date

    raw = WeeklySeries(series.rounds[0].date, tuple(r.valuation for r in series.rounds), RAW_VALUATION)
    filtered_rounds = des_filter(raw, config.alpha_valuation_raw).values

    round_days = np.array([(r.date - anchor).days for r in series.rounds], dtype=float)
    first_week = (series.rounds[0].date - anchor).days // 7
    last_week = (series.rounds[-1].date - anchor).days // 7
    week_days = np.arange(first_week, last_week + 1, dtype=float) * 7.0
    weekly = np.interp(week_days, round_days, np.asarray(filtered_rounds))

    start = anchor + timedelta(weeks=first_week)
    interpolated = WeeklySeries(start, tuple(float(v) for v in weekly), INTERPOLATED_VALUATION)
    return des_filter(interpolated, config.alpha_valuation_weekly)


def minmax_normalize(series: WeeklySeries) -> tuple[WeeklySeries, list[str]]:
    """Map values affinely onto [0, 1]; a constant series maps to all 0.5 with a warning."""
    lo = min(series.values)
    hi = max(series.values)
    warnings: list[str] = []
    if hi == lo:
        warnings.append("constant series: min-max normalization maps all values to 0.5")
        values = tuple(0.5 for _ in series.values)
    else:
        span = hi - lo
        values = tuple((v - lo) / span for v in series.values)
    return WeeklySeries(series.start_week, values, NORMALIZED), warnings


def align(interest: WeeklySeries, valuation: WeeklySeries, lag: int = 0) -> AlignedPair:
    """Pair the two series week by week after shifting the valuation by ``lag`` weeks.

    Negative lag moves the valuation back in time. The shifted valuation
    must stay inside the interest span (shifts are bounded by the start of
    the interest history on one side and its end on the other), and the
    paired stretch must cover at least 10 weeks.
    """
    offset = weeks_between(interest.start_week, valuation.start_week) + lag
    n_int, n_val = len(interest), len(valuation)
    overlap_start = max(0, offset)
    overlap_end = min(n_int, offset + n_val)
    if overlap_end - overlap_start < MIN_ALIGN_OVERLAP:
        raise InputError(
            f"insufficient overlap: {max(overlap_end - overlap_start, 0)} weeks at lag {lag}, "
            f"need >= {MIN_ALIGN_OVERLAP}"
        )
    if offset < 0:
        raise InputError(f"lag {lag}: translated valuation start precedes interest start by {-offset} weeks")
    if offset + n_val > n_int:
        raise InputError(f"lag {lag}: translated valuation end exceeds interest end")
    return AlignedPair(
        interest=interest.as_array()[offset : offset + n_val],
        valuation=valuation.as_array(),
        start_week=interest.week(offset),
        lag=lag,
        n=n_val,
    )

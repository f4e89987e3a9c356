"""Corpus-level descriptive statistics and report tables.

Covers the valuation growth-rate metric (maximum valuation divided by the
years taken to reach it), per-group and per-dimension tau statistics,
industry roll-ups of high-correlation shares, and the tau histogram.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date

import numpy as np

from .correlate import G1, G2, G3, CorrelationResult
from .errors import InputError
from .ingest import CompanyRecord, ValuationSeries

DAYS_PER_YEAR = 365.25
GROUPS = (G1, G2, G3)


@dataclass(frozen=True)
class McapGr:
    company_id: str
    max_valuation: float
    date_of_max: date
    years_to_max: float
    rate: float  # millions of dollars per year


@dataclass(frozen=True)
class GroupStats:
    label: str
    count: int
    share_sample: float
    share_dimension: float | None
    share_group: float | None
    tau_mean: float | None
    tau_p25: float | None
    tau_median: float | None
    tau_p75: float | None
    lag_mean: float | None = None
    lag_p25: float | None = None
    lag_median: float | None = None
    lag_p75: float | None = None


def percentile(values, q: float) -> float:
    """Linear interpolation between order statistics."""
    return float(np.percentile(np.asarray(values, dtype=float), q, method="linear"))


def mcap_gr(series: ValuationSeries, founded: date) -> McapGr:
    """Maximum valuation over the years from founding to the earliest date reaching it."""
    if not series.rounds:
        raise InputError(f"{series.company_id}: no rounds")
    best = max(series.rounds, key=lambda r: r.valuation)
    # earliest date attaining the maximum; rounds are date-sorted
    for r in series.rounds:
        if r.valuation == best.valuation:
            best = r
            break
    days = (best.date - founded).days
    if days < 7:
        raise InputError(
            f"{series.company_id}: degenerate growth interval (max reached {days} days after founding)"
        )
    years = days / DAYS_PER_YEAR
    return McapGr(series.company_id, best.valuation, best.date, years, best.valuation / years)


def _tau_block(taus: list[float]) -> tuple[float | None, ...]:
    if not taus:
        return None, None, None, None
    return (
        float(np.mean(taus)),
        percentile(taus, 25),
        percentile(taus, 50),
        percentile(taus, 75),
    )


def _one_group_row(
    label: str,
    members: list[CorrelationResult],
    sample_n: int,
    dimension_n: int | None,
    group_n: int | None,
    with_lags: bool,
) -> GroupStats:
    taus = [r.tau_best for r in members]
    lags = [float(r.lag_weeks) for r in members] if with_lags else []
    tau_mean, tau_p25, tau_med, tau_p75 = _tau_block(taus)
    lag_mean, lag_p25, lag_med, lag_p75 = _tau_block(lags)
    return GroupStats(
        label=label,
        count=len(members),
        share_sample=len(members) / sample_n if sample_n else 0.0,
        share_dimension=(len(members) / dimension_n) if dimension_n else None,
        share_group=(len(members) / group_n) if group_n else None,
        tau_mean=tau_mean,
        tau_p25=tau_p25,
        tau_median=tau_med,
        tau_p75=tau_p75,
        lag_mean=lag_mean,
        lag_p25=lag_p25,
        lag_median=lag_med,
        lag_p75=lag_p75,
    )


def group_stats(
    results: list[CorrelationResult],
    poles: dict[str, str] | None = None,
) -> list[GroupStats]:
    """Descriptive rows per group, or per (pole, group) when a pole mapping is given.

    Without poles the rows are: Total, G1, G2, G3, then the G2 cases split
    by shift direction. With poles (company id -> pole label) each pole gets
    G1/G2/G3 rows plus a per-pole lag row over its G2 cases; empty poles
    still emit rows with count 0 and blank statistics.
    """
    if not results:
        raise InputError("no correlation results to summarize")
    sample_n = len(results)
    by_group = {g: [r for r in results if r.group == g] for g in GROUPS}

    if poles is None:
        rows = [_one_group_row("Total", results, sample_n, None, None, False)]
        for g in GROUPS:
            rows.append(_one_group_row(g, by_group[g], sample_n, None, None, g == G2))
        positive = [r for r in by_group[G2] if r.lag_weeks > 0]
        negative = [r for r in by_group[G2] if r.lag_weeks < 0]
        g2_n = len(by_group[G2]) or None
        rows.append(_one_group_row("G2 positive shift", positive, sample_n, g2_n, None, True))
        rows.append(_one_group_row("G2 negative shift", negative, sample_n, g2_n, None, True))
        return rows

    rows = []
    labels = sorted(set(poles.values()))
    for label in labels:
        members = [r for r in results if poles.get(r.company_id) == label]
        pole_n = len(members) or None
        for g in GROUPS:
            sub = [r for r in members if r.group == g]
            rows.append(
                _one_group_row(f"{label}/{g}", sub, sample_n, pole_n, len(by_group[g]) or None, g == G2)
            )
    return rows


def industry_rollup(
    results: list[CorrelationResult],
    companies: dict[str, CompanyRecord],
    level: str,
) -> list[tuple[str, int, int, float]]:
    """Per-tag (tag, high-correlation count, total, share) at one classification level.

    High correlation means G1 or G2. Companies without a tag at the level
    fall under "(untagged)".
    """
    if level not in ("sector", "industry", "sub_industry"):
        raise InputError(f"unknown classification level {level!r}")
    buckets: dict[str, list[CorrelationResult]] = {}
    for r in results:
        company = companies.get(r.company_id)
        tag = getattr(company, level, "") if company else ""
        buckets.setdefault(tag or "(untagged)", []).append(r)
    rows = []
    for tag in sorted(buckets):
        members = buckets[tag]
        high = sum(1 for r in members if r.group in (G1, G2))
        rows.append((tag, high, len(members), high / len(members)))
    return rows


def tau_histogram(results: list[CorrelationResult], bin_width: float = 0.1) -> list[tuple[float, float, int]]:
    """Histogram rows (left edge, right edge, count) over bins covering [-1, 1].

    The top edge is inclusive so every tau lands in a bin and counts sum to
    the corpus size.
    """
    if bin_width <= 0:
        raise InputError(f"bin width must be positive, got {bin_width}")
    n_bins = int(np.ceil(2.0 / bin_width))
    counts = [0] * n_bins
    for r in results:
        idx = int((r.tau_best - (-1.0)) / bin_width)
        idx = min(max(idx, 0), n_bins - 1)
        counts[idx] += 1
    return [(-1.0 + i * bin_width, -1.0 + (i + 1) * bin_width, counts[i]) for i in range(n_bins)]


def mcap_gr_group_summary(
    rates: dict[str, McapGr],
    results: list[CorrelationResult],
) -> list[tuple[str, float, float, float, float]]:
    """Rows (label, mean, p25, median, p75) of the growth rate per group and for the sample."""
    if not results:
        raise InputError("no correlation results")
    all_rates = [rates[r.company_id].rate for r in results if r.company_id in rates]
    if not all_rates:
        raise InputError("no growth rates computed")
    rows = [("Sample", float(np.mean(all_rates)), percentile(all_rates, 25), percentile(all_rates, 50), percentile(all_rates, 75))]
    for g in GROUPS:
        sub = [rates[r.company_id].rate for r in results if r.group == g and r.company_id in rates]
        if sub:
            rows.append((g, float(np.mean(sub)), percentile(sub, 25), percentile(sub, 50), percentile(sub, 75)))
        else:
            rows.append((g, float("nan"), float("nan"), float("nan"), float("nan")))
    return rows

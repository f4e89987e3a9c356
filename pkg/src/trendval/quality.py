"""Search-interest data-quality index.

Four sub-scores are combined in two steps: the brand/category, fast-noise
and related-query points are averaged first, and that average is then
averaged with the systematic-noise points, which weighs early-history noise
as heavily as everything else combined. Companies scoring below 0.6 are
gated out of the analysis.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date

from .errors import InputError
from .ingest import GtMetadata

GOOD_THRESHOLD = 0.6
FIRST_YEAR_WEEKS = 52


@dataclass(frozen=True)
class QualityScore:
    company_id: str
    brand_category_points: float  # 1, 0.7, 0.3 or 0
    systematic_noise_points: float  # 1, 0.5 or 0
    fast_noise_points: float  # 1, 0.5 or 0
    related_query_points: float  # 1, 0.5 or 0
    total: float
    verdict: str  # "Good" | "Bad"
    ratio_of_means: float
    overall_mean: float
    warnings: tuple[str, ...] = ()


def score_brand_category(unique: bool, group: str) -> float:
    """Brand-name uniqueness combined with the category group the export was tagged with."""
    if group not in ("A", "B"):
        raise InputError(f"category group must be A or B, got {group!r}")
    if group == "A":
        return 1.0 if unique else 0.7
    return 0.3 if unique else 0.0


def score_systematic_noise(values: list[float], founded: date, series_start: date | None = None) -> tuple[float, float, list[str]]:
    """Score the ratio of the first-year mean to the overall mean.

    The first year is the first 52 weekly points counted from the founding
    date; series that start later than founding contribute only the points
    falling inside that first year. Series shorter than 52 weeks are scored
    against the available prefix with a warning.
    """
    if not values:
        raise InputError("empty series")
    overall = sum(values) / len(values)
    if overall == 0:
        raise InputError("no signal: series is all zero")
    warnings: list[str] = []
    offset = 0
    if series_start is not None:
        offset = max(0, (series_start - founded).days // 7)
    first_year = values[: max(0, FIRST_YEAR_WEEKS - offset)]
    if len(values) + offset < FIRST_YEAR_WEEKS:
        warnings.append(f"series spans only {len(values) + offset} weeks; first-year ratio uses the available prefix")
    if not first_year:
        warnings.append("series starts after the first year; systematic-noise ratio taken as 0")
        ratio = 0.0
    else:
        ratio = (sum(first_year) / len(first_year)) / overall
    if ratio <= 0.5:
        points = 1.0
    elif ratio <= 0.85:
        points = 0.5
    else:
        points = 0.0
    return points, ratio, warnings


def score_fast_noise(values: list[float]) -> tuple[float, float]:
    """Score the overall mean level; low-mean series are dominated by spikes and dropouts."""
    if not values:
        raise InputError("empty series")
    mean = sum(values) / len(values)
    # at exactly 4 the higher band wins, keeping the score monotone in the mean
    if mean >= 4:
        return 1.0, mean
    if mean >= 2:
        return 0.5, mean
    return 0.0, mean


def score_related_queries(count: int) -> float:
    if count < 0:
        raise InputError("related query count must be >= 0")
    if count >= 10:
        return 1.0
    if count >= 5:
        return 0.5
    return 0.0


def total_quality(brand: float, systematic: float, fast: float, related: float) -> tuple[float, str]:
    """Two-step aggregate: mean(brand, fast, related) averaged with the systematic score."""
    total = ((brand + fast + related) / 3 + systematic) / 2
    verdict = "Good" if total >= GOOD_THRESHOLD else "Bad"
    return total, verdict


def score_company(
    company_id: str,
    metadata: GtMetadata,
    values: list[float],
    founded: date,
    series_start: date | None = None,
) -> QualityScore:
    """Score one company for a single metadata variant."""
    brand = score_brand_category(metadata.brand_unique, metadata.category_group)
    systematic, ratio, warnings = score_systematic_noise(values, founded, series_start)
    fast, overall = score_fast_noise(values)
    related = score_related_queries(metadata.related_query_count)
    total, verdict = total_quality(brand, systematic, fast, related)
    return QualityScore(
        company_id=company_id,
        brand_category_points=brand,
        systematic_noise_points=systematic,
        fast_noise_points=fast,
        related_query_points=related,
        total=total,
        verdict=verdict,
        ratio_of_means=ratio,
        overall_mean=overall,
        warnings=tuple(warnings),
    )


def best_score(
    company_id: str,
    variants: tuple[GtMetadata, ...],
    values: list[float],
    founded: date,
    series_start: date | None = None,
) -> QualityScore:
    """Score every supplied metadata variant and keep the best total.

    A company tagged under several plausible brand names is admitted on its
    best-scoring variant.
    """
    if not variants:
        raise InputError(f"no metadata for company {company_id!r}")
    scores = [score_company(company_id, m, values, founded, series_start) for m in variants]
    return max(scores, key=lambda s: s.total)

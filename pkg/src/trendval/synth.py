"""Synthetic venture generator and recovery scoring.

Generates interest-window/valuation-round pairs with a planted group label
and weekly lag, so the analysis pipeline can be checked against known
ground truth. The planted relationship is realized in the space the
correlation engine actually sees: valuation rounds sample the *stitched and
smoothed* interest trajectory shifted by the planted lag (a raw-latent
delay would land the tau optimum a few weeks off, because the interest and
valuation sides are smoothed with very different coefficients). Weak-link
ventures draw their valuation from an independently seeded trajectory.

Everything is deterministic given the seed; per-venture seeds are split
from the corpus seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, timedelta

import numpy as np

from .correlate import G1, G2, G3
from .errors import InputError
from .ingest import (
    CompanyRecord,
    Corpus,
    GtMetadata,
    GtWindow,
    ValuationRound,
    ValuationSeries,
    derive_unicorn,
)
from .preprocess import FilterConfig, des_filter, stitch_windows

WINDOW_POINTS = 200
WINDOW_OVERLAP = 8
VALUATION_FLOOR = 1.0  # $M offset keeping every round strictly positive

_SECTORS = (
    ("Internet", "Internet Software & Services", "Business Intelligence, Analytics & Performance Mgmt"),
    ("Internet", "eCommerce", "Marketplace"),
    ("Mobile & Telecommunications", "Mobile Software & Services", "Social"),
    ("Healthcare", "Medical Devices & Equipment", "Monitoring & Security"),
    ("Computer Hardware & Services", "IT Services", "Payments"),
)


@dataclass(frozen=True)
class SynthConfig:
    seed: int
    weeks: int = 280
    latent: str = "logistic"  # "logistic" | "piecewise-exponential"
    lag_weeks: int = 0
    noise_sigma: float = 0.0
    round_count: int = 12
    target_group: str = G1
    unicorn_scale: bool = False
    company_id: str = ""
    bad_quality: bool = False  # shape the data to fail the quality gate

    def __post_init__(self) -> None:
        if self.weeks < 120:
            raise InputError(f"need at least 120 weeks, got {self.weeks}")
        if abs(self.lag_weeks) >= self.weeks / 2:
            raise InputError(f"|lag| must be below weeks/2, got {self.lag_weeks}")
        if self.noise_sigma < 0:
            raise InputError("noise_sigma must be >= 0")
        if not 6 <= self.round_count <= self.weeks / 4:
            raise InputError(f"round_count must be in [6, weeks/4], got {self.round_count}")
        if self.latent not in ("logistic", "piecewise-exponential"):
            raise InputError(f"unknown latent kind {self.latent!r}")
        if self.target_group not in (G1, G2, G3):
            raise InputError(f"unknown target group {self.target_group!r}")


@dataclass(frozen=True)
class SynthTruth:
    company_id: str
    planted_group: str
    planted_lag: int
    latent_kind: str
    latent_params: str


@dataclass(frozen=True)
class SynthVenture:
    company: CompanyRecord
    windows: tuple[GtWindow, ...]
    valuations: ValuationSeries
    metadata: GtMetadata
    truth: SynthTruth


@dataclass
class RecoveryReport:
    confusion: dict[tuple[str, str], int]
    lag_errors: list[int]
    mean_abs_lag_error: float
    max_abs_lag_error: int

    def accuracy(self) -> float:
        total = sum(self.confusion.values())
        hits = sum(v for (a, b), v in self.confusion.items() if a == b)
        return hits / total if total else 0.0


def _base_latent(
    kind: str, rng: np.random.Generator, weeks: int, early_rise: bool = False
) -> tuple[np.ndarray, str]:
    """Monotone adoption curve in [0, 1].

    ``early_rise`` front-loads the growth so most of the lifecycle is a
    plateau; shifted and weak-link ventures use it so that rank structure
    inside the sampled stretch comes from the bump field, not the trend.
    """
    w = np.arange(weeks, dtype=float)
    if kind == "logistic":
        rate = rng.uniform(0.035, 0.06)
        lo_mid, hi_mid = (0.18, 0.3) if early_rise else (0.45, 0.62)
        mid = rng.uniform(lo_mid, hi_mid) * weeks
        curve = 1.0 / (1.0 + np.exp(-rate * (w - mid)))
        params = f"r={rate:.4f},m={mid:.1f}"
    else:
        n_seg = int(rng.integers(3, 6))
        edges = np.sort(rng.uniform(0.1, 0.9, n_seg - 1)) * weeks
        rates = rng.uniform(0.004, 0.02, n_seg)
        if early_rise:
            rates = np.sort(rates)[::-1] * np.exp(-2.0 * np.arange(n_seg))
        seg = np.searchsorted(edges, w)
        curve = np.exp(np.cumsum(rates[seg]))
        params = f"segments={n_seg}"
    lo, hi = curve.min(), curve.max()
    if hi == lo:
        raise InputError("degenerate base latent")
    return (curve - lo) / (hi - lo), params


def _wiggle(rng: np.random.Generator, weeks: int) -> np.ndarray:
    """Smooth multiplicative bump field covering the whole lifecycle.

    Dense enough that any few-month stretch holds several local extrema;
    that is what makes a time shift identifiable to a rank correlation."""
    w = np.arange(weeks, dtype=float)
    field = np.zeros(weeks)
    n_bumps = max(10, weeks // 16)
    # stratified centers: every stretch of the lifecycle gets structure
    slot = 0.96 * weeks / n_bumps
    for j in range(n_bumps):
        center = 0.02 * weeks + (j + rng.uniform(0.1, 0.9)) * slot
        width = rng.uniform(9.0, 16.0)
        amp = rng.uniform(0.3, 0.6) * rng.choice((-1.0, 1.0))
        field += amp * np.exp(-0.5 * ((w - center) / width) ** 2)
    # soft saturation: a hard clip would flatten overlapping bumps into
    # exactly-constant stretches, which carry no rank information at all
    return 0.75 * np.tanh(field / 0.75)


def _split_windows(company_id: str, founded: date, values: np.ndarray) -> tuple[GtWindow, ...]:
    """Cut a weekly series into <=200-point windows, each normalized to max 100."""
    weeks = len(values)
    starts = [0]
    stride = WINDOW_POINTS - WINDOW_OVERLAP
    while starts[-1] + WINDOW_POINTS < weeks:
        starts.append(starts[-1] + stride)
    windows = []
    for index, s in enumerate(starts):
        chunk = values[s : s + WINDOW_POINTS]
        peak = chunk.max()
        if peak <= 0:
            raise InputError(f"{company_id}: window {index} has no positive interest")
        ints = np.rint(100.0 * chunk / peak).astype(int)
        points = tuple(
            (founded + timedelta(weeks=s + i), int(v)) for i, v in enumerate(ints)
        )
        windows.append(GtWindow(company_id, index, points))
    return tuple(windows)


def _round_weeks(cfg: SynthConfig, rng: np.random.Generator) -> np.ndarray:
    """Round dates (week indices) centered mid-lifecycle, kept clear of the
    infeasible edge so the planted lag always lies inside the search range."""
    weeks, lag = cfg.weeks, cfg.lag_weeks
    lo_needed = max(0, -lag)
    hi_needed = weeks - 1 - max(0, lag)
    # ~2-week round spacing: dense enough that interpolation keeps the
    # bump-level rank structure the lag search locks onto
    span = min(2 * (cfg.round_count - 1), hi_needed - lo_needed - 10)
    if span < cfg.round_count - 1 or span < 12:
        raise InputError("config leaves no room for the round window")
    preferred = int(0.62 * weeks - span / 2)
    f0 = max(lo_needed + 4, min(preferred, hi_needed - 4 - span))
    f0 = max(lo_needed, min(f0, hi_needed - span))
    ticks = np.unique(np.rint(np.linspace(0, span, cfg.round_count)).astype(int))
    return f0 + ticks


def generate_venture(cfg: SynthConfig, filters: FilterConfig | None = None) -> SynthVenture:
    """Generate one venture with the planted group label and lag.

    Strong-link ventures without a shift use a monotone latent at lag zero;
    shifted ventures add a bump field so the lag is identifiable and sample
    their valuation from the smoothed interest trajectory delayed by the
    planted lag; weak-link ventures use an independent trajectory.
    """
    filters = filters or FilterConfig()
    rng = np.random.default_rng(cfg.seed)
    cid = cfg.company_id or f"s{cfg.seed}"
    weeks = cfg.weeks

    founded = date(2008, 1, 7) + timedelta(weeks=int(rng.integers(0, 200)))
    plain = cfg.target_group == G1 and not cfg.bad_quality
    base, params = _base_latent(cfg.latent, rng, weeks, early_rise=not plain)
    if plain:
        latent = base
    else:
        # a floor keeps the bump field visible from week one, so shifted
        # stretches carry rank structure everywhere along the lifecycle
        leveled = 0.18 + 0.82 * base
        latent = leveled * (1.0 + _wiggle(rng, weeks))
    if cfg.bad_quality:
        # an early-fame profile: systematic-noise ratio near 1 fails the gate
        latent = latent[::-1].copy() + 0.6 * latent.max()

    gt_scale = 85.0
    interest = gt_scale * latent / latent.max()
    if cfg.noise_sigma > 0:
        spread = cfg.noise_sigma * (interest.max() - interest.min())
        interest = np.clip(interest + rng.normal(0.0, spread, weeks), 0.0, None)
    interest = np.maximum(interest, 0.05)  # keep every window normalizable

    windows = _split_windows(cid, founded, interest)

    # the curve the correlation engine will compare against
    stitched, _ = stitch_windows(windows)
    smoothed = np.asarray(des_filter(stitched, filters.alpha_interest).values)

    lag = cfg.lag_weeks if cfg.target_group == G2 else 0
    round_weeks = _round_weeks(cfg, rng)
    if cfg.target_group == G3:
        alt_rng = np.random.default_rng(rng.integers(0, 2**63))
        alt_base, _ = _base_latent(cfg.latent, alt_rng, weeks)
        source = alt_base * (1.0 + _wiggle(alt_rng, weeks))
        source = 100.0 * source / source.max()
        sampled = source[round_weeks]
    else:
        sampled = smoothed[round_weeks + lag]

    scale = 12.0 if cfg.unicorn_scale else 3.5
    values = scale * (sampled + VALUATION_FLOOR)
    if cfg.unicorn_scale and values.max() < 1000.0:
        values = values * (1050.0 / values.max())
    rounds = tuple(
        ValuationRound(cid, founded + timedelta(weeks=int(d)), float(v))
        for d, v in zip(round_weeks, values)
    )
    valuations = ValuationSeries(cid, rounds, derive_unicorn(rounds))

    if cfg.bad_quality:
        metadata = GtMetadata(cid, brand_unique=False, category_group="B", related_query_count=0)
    else:
        metadata = GtMetadata(cid, brand_unique=True, category_group="A", related_query_count=12)

    sectors = _SECTORS[int(rng.integers(0, len(_SECTORS)))]
    company = CompanyRecord(
        id=cid,
        name=f"Venture {cid}",
        founded=founded,
        is_b2c=bool(rng.integers(0, 2)),
        is_platform=bool(rng.integers(0, 2)),
        sector=sectors[0],
        industry=sectors[1],
        sub_industry=sectors[2],
    )
    truth = SynthTruth(cid, cfg.target_group, lag, cfg.latent, params)
    return SynthVenture(company, windows, valuations, metadata, truth)


def generate_corpus(
    seed: int,
    count: int,
    proportions: tuple[float, float, float] = (0.67, 0.16, 0.17),
    weeks: int = 280,
    noise_sigma: float = 0.0,
    round_count: int = 12,
    bad_quality: int = 0,
    latent: str = "logistic",
) -> tuple[Corpus, list[SynthTruth]]:
    """Generate a whole corpus with group labels in the given proportions."""
    if count < 1:
        raise InputError("count must be >= 1")
    if bad_quality > count:
        raise InputError("bad_quality cannot exceed count")
    n1 = round(count * proportions[0])
    n2 = round(count * proportions[1])
    targets = [G1] * n1 + [G2] * n2 + [G3] * max(0, count - n1 - n2)
    targets = targets[:count]

    master = np.random.default_rng(seed)
    child_seeds = master.integers(0, 2**63, size=count)
    corpus = Corpus()
    truths = []
    for i, (target, child_seed) in enumerate(zip(targets, child_seeds)):
        rng = np.random.default_rng(child_seed)
        lag = 0
        if target == G2:
            lag = int(rng.integers(40, 121)) * int(rng.choice((-1, 1)))
        cfg = SynthConfig(
            seed=int(child_seed),
            weeks=weeks,
            latent=latent,
            lag_weeks=lag,
            noise_sigma=noise_sigma,
            round_count=round_count,
            target_group=target,
            unicorn_scale=bool(rng.integers(0, 2)),
            company_id=f"v{i:04d}",
            bad_quality=i < bad_quality,
        )
        venture = generate_venture(cfg)
        corpus.companies[venture.company.id] = venture.company
        corpus.valuations[venture.company.id] = venture.valuations
        corpus.windows[venture.company.id] = venture.windows
        corpus.metadata[venture.company.id] = (venture.metadata,)
        truths.append(venture.truth)
    return corpus, truths


def evaluate_recovery(truths: list[SynthTruth], results) -> RecoveryReport:
    """Confusion matrix over planted vs recovered groups plus lag errors on planted-shift cases."""
    by_id = {r.company_id: r for r in results}
    truth_ids = {t.company_id for t in truths}
    if truth_ids != set(by_id):
        missing = sorted(truth_ids ^ set(by_id))
        raise InputError(f"truth/result id mismatch: {missing[:5]}{'...' if len(missing) > 5 else ''}")
    confusion: dict[tuple[str, str], int] = {}
    lag_errors = []
    for t in truths:
        r = by_id[t.company_id]
        key = (t.planted_group, r.group)
        confusion[key] = confusion.get(key, 0) + 1
        if t.planted_group == G2:
            lag_errors.append(r.lag_weeks - t.planted_lag)
    mean_abs = float(np.mean(np.abs(lag_errors))) if lag_errors else 0.0
    max_abs = int(np.max(np.abs(lag_errors))) if lag_errors else 0
    return RecoveryReport(confusion, lag_errors, mean_abs, max_abs)

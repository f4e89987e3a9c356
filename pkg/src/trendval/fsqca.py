"""Fuzzy-set configurational analysis engine.

Calibrates raw scores into set memberships via the direct (logistic)
method, runs necessity analysis with a relevance screen, builds the 2^k
truth table under consistency and frequency thresholds, minimizes the
included configurations with Quine-McCluskey (conservative: excluded and
empty rows are never used as don't-cares), and reports solution
consistency and coverage.

Conditions here are crisp (memberships in {0, 1}) but every formula is the
general fuzzy one, so graded conditions work unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from .errors import InputError

# an implicant maps condition index -> required value; None = indifferent
Implicant = tuple[int | None, ...]


@dataclass(frozen=True)
class CalibrationAnchors:
    full_non_membership: float = 0.1
    crossover: float = 0.499
    full_membership: float = 0.9

    def __post_init__(self) -> None:
        if not self.full_non_membership < self.crossover < self.full_membership:
            raise InputError(
                "anchors must satisfy full_non_membership < crossover < full_membership, got "
                f"({self.full_non_membership}, {self.crossover}, {self.full_membership})"
            )


@dataclass(frozen=True)
class CaseMembership:
    company_id: str
    conditions: dict[str, float]
    outcome_high: float
    outcome_low: float


@dataclass(frozen=True)
class TruthTableRow:
    configuration: tuple[int, ...]
    case_count: int
    consistency: float | None  # None when the row is empty
    included: bool


@dataclass(frozen=True)
class NecessityRow:
    condition: str  # condition name, "~"-prefixed for the negation
    consistency: float
    coverage: float
    relevance: float
    necessary: bool


@dataclass(frozen=True)
class TermMetrics:
    term: Implicant
    consistency: float | None
    raw_coverage: float
    unique_coverage: float


@dataclass(frozen=True)
class Solution:
    condition_names: tuple[str, ...]
    terms: tuple[Implicant, ...]
    term_metrics: tuple[TermMetrics, ...]
    consistency: float
    coverage: float
    covered_cases: int


def calibrate_direct(score: float, anchors: CalibrationAnchors) -> float:
    """Direct calibration: logistic in a log-odds scale anchored at +-3.

    The crossover maps to 0.5 exactly, the full-membership anchor to
    e^3/(1+e^3) ~ 0.953, the full-non-membership anchor to ~0.047; scores
    beyond the anchors saturate smoothly.
    """
    c = anchors.crossover
    if score >= c:
        log_odds = 3.0 * (score - c) / (anchors.full_membership - c)
    else:
        log_odds = 3.0 * (score - c) / (c - anchors.full_non_membership)
    return 1.0 / (1.0 + math.exp(-log_odds))


def negate(membership: float) -> float:
    if not 0 <= membership <= 1:
        raise InputError(f"membership must be in [0, 1], got {membership}")
    return 1.0 - membership


def _outcome(case: CaseMembership, outcome_name: str) -> float:
    if outcome_name == "high":
        return case.outcome_high
    if outcome_name == "low":
        return case.outcome_low
    raise InputError(f"unknown outcome {outcome_name!r} (expected 'high' or 'low')")


def necessity_analysis(
    cases: list[CaseMembership],
    outcome_name: str,
    consistency_threshold: float = 0.9,
    relevance_threshold: float = 0.6,
) -> list[NecessityRow]:
    """Test each condition and its negation for necessity of the outcome.

    consistency = sum(min(x, y)) / sum(y); coverage = sum(min(x, y)) / sum(x);
    relevance = sum(1 - x) / sum(1 - min(x, y)), which screens out conditions
    that are near-universal and hence trivially necessary. A condition is
    flagged necessary when consistency and relevance both clear their
    thresholds.
    """
    if not cases:
        raise InputError("no cases")
    names = sorted(cases[0].conditions)
    y = [_outcome(c, outcome_name) for c in cases]
    sum_y = sum(y)
    if sum_y == 0:
        raise InputError(f"empty outcome set for {outcome_name!r}")
    rows = []
    for name in names:
        for negated in (False, True):
            x = [c.conditions[name] for c in cases]
            if negated:
                x = [1.0 - v for v in x]
            overlap = sum(min(a, b) for a, b in zip(x, y))
            sum_x = sum(x)
            consistency = overlap / sum_y
            coverage = overlap / sum_x if sum_x > 0 else 0.0
            denom = sum(1.0 - min(a, b) for a, b in zip(x, y))
            relevance = sum(1.0 - v for v in x) / denom if denom > 0 else 0.0
            rows.append(
                NecessityRow(
                    condition=("~" if negated else "") + name,
                    consistency=consistency,
                    coverage=coverage,
                    relevance=relevance,
                    necessary=consistency >= consistency_threshold and relevance >= relevance_threshold,
                )
            )
    return rows


def _row_membership(case: CaseMembership, names: tuple[str, ...], config: tuple[int, ...]) -> float:
    m = 1.0
    for name, bit in zip(names, config):
        v = case.conditions[name]
        m = min(m, v if bit == 1 else 1.0 - v)
    return m


def build_truth_table(
    cases: list[CaseMembership],
    outcome_name: str,
    consistency_threshold: float = 0.75,
    frequency_threshold: int = 1,
) -> tuple[tuple[str, ...], list[TruthTableRow]]:
    """All 2^k configuration rows with case counts, consistencies and inclusion flags.

    A case belongs to the row where its membership exceeds 0.5 (for crisp
    conditions, its exact configuration). Row consistency is
    sum(min(row_membership, y)) / sum(row_membership) over all cases. Empty
    rows are retained with included = False.
    """
    if not cases:
        raise InputError("no cases")
    names = tuple(sorted(cases[0].conditions))
    k = len(names)
    if k > 16:
        raise InputError(f"at most 16 conditions supported, got {k}")
    y = [_outcome(c, outcome_name) for c in cases]
    rows = []
    for idx in range(2**k):
        config = tuple((idx >> (k - 1 - j)) & 1 for j in range(k))
        memberships = [_row_membership(c, names, config) for c in cases]
        count = sum(1 for m in memberships if m > 0.5)
        denom = sum(memberships)
        consistency = sum(min(m, yy) for m, yy in zip(memberships, y)) / denom if denom > 0 else None
        included = (
            count >= frequency_threshold
            and consistency is not None
            and consistency >= consistency_threshold
        )
        rows.append(TruthTableRow(config, count, consistency, included))
    return names, rows


# --- Quine-McCluskey -------------------------------------------------------


def _combine(a: Implicant, b: Implicant) -> Implicant | None:
    """Merge two implicants differing in exactly one specified position."""
    diff = -1
    for i, (x, y) in enumerate(zip(a, b)):
        if x != y:
            if x is None or y is None or diff >= 0:
                return None
            diff = i
    if diff < 0:
        return None
    merged = list(a)
    merged[diff] = None
    return tuple(merged)


def _covers(implicant: Implicant, minterm: tuple[int, ...]) -> bool:
    return all(v is None or v == m for v, m in zip(implicant, minterm))


def prime_implicants(minterms: set[tuple[int, ...]]) -> list[Implicant]:
    """All prime implicants of the given on-set (no don't-cares)."""
    level: set[Implicant] = {tuple(m) for m in minterms}
    primes: set[Implicant] = set()
    while level:
        merged: set[Implicant] = set()
        used: set[Implicant] = set()
        items = sorted(level, key=_implicant_key)
        for a, b in combinations(items, 2):
            c = _combine(a, b)
            if c is not None:
                merged.add(c)
                used.add(a)
                used.add(b)
        primes.update(x for x in level if x not in used)
        level = merged
    return sorted(primes, key=_implicant_key)


def _implicant_key(imp: Implicant):
    return tuple(2 if v is None else v for v in imp)


def _min_cover(primes: list[Implicant], minterms: list[tuple[int, ...]]) -> list[Implicant]:
    """Exact minimum-cardinality cover: essentials, dominance reduction, then branch and bound."""
    cover_sets = [frozenset(i for i, m in enumerate(minterms) if _covers(p, m)) for p in primes]

    chosen: set[int] = set()
    remaining = set(range(len(minterms)))
    active = set(range(len(primes)))

    def take(i: int) -> None:
        chosen.add(i)
        nonlocal remaining
        remaining -= cover_sets[i]

    changed = True
    while changed and remaining:
        changed = False
        # essential primes: a minterm covered by exactly one active prime
        for m in list(remaining):
            covering = [i for i in active if m in cover_sets[i]]
            if len(covering) == 1:
                take(covering[0])
                active.discard(covering[0])
                changed = True
        # column dominance: drop primes whose remaining coverage is a subset of another's
        for i in sorted(active):
            ri = cover_sets[i] & remaining
            if not ri:
                active.discard(i)
                changed = True
                continue
            for j in list(active):
                if j != i and ri < (cover_sets[j] & remaining):
                    active.discard(i)
                    changed = True
                    break

    if remaining:
        best: list[int] | None = None

        def search(rem: frozenset[int], picked: list[int]) -> None:
            nonlocal best
            if best is not None and len(picked) >= len(best):
                return
            if not rem:
                best = list(picked)
                return
            m = min(rem, key=lambda mm: (sum(1 for i in active if mm in cover_sets[i]), mm))
            for i in sorted(active):
                if m in cover_sets[i]:
                    search(rem - cover_sets[i], picked + [i])

        search(frozenset(remaining), [])
        if best is None:
            raise InputError("prime implicants do not cover the on-set")
        chosen.update(best)

    return sorted((primes[i] for i in chosen), key=_implicant_key)


def quine_mccluskey(minterms: set[tuple[int, ...]], k: int) -> list[Implicant]:
    """Minimal disjunction of prime implicants equivalent to the on-set.

    The all-indifferent implicant (every position None) is the tautology and
    comes back alone when the on-set is the full cube.
    """
    if not minterms:
        raise InputError("empty minterm set")
    for m in minterms:
        if len(m) != k or any(b not in (0, 1) for b in m):
            raise InputError(f"malformed minterm {m!r} for {k} conditions")
    primes = prime_implicants(set(minterms))
    return _min_cover(primes, sorted(minterms))


# --- solution metrics ------------------------------------------------------


def term_membership(case: CaseMembership, names: tuple[str, ...], term: Implicant) -> float:
    m = 1.0
    for name, bit in zip(names, term):
        if bit is None:
            continue
        v = case.conditions[name]
        m = min(m, v if bit == 1 else 1.0 - v)
    return m


def implicant_label(term: Implicant, names: tuple[str, ...]) -> str:
    parts = [("" if bit == 1 else "~") + name for name, bit in zip(names, term) if bit is not None]
    return "*".join(parts) if parts else "(all configurations)"


def solution_metrics(
    terms: list[Implicant],
    cases: list[CaseMembership],
    outcome_name: str,
    names: tuple[str, ...],
) -> Solution:
    """Consistency and raw/unique coverage per term plus the overall block."""
    if not terms:
        raise InputError("no terms")
    y = [_outcome(c, outcome_name) for c in cases]
    sum_y = sum(y)
    if sum_y == 0:
        raise InputError(f"empty outcome set for {outcome_name!r}")

    memberships = [[term_membership(c, names, t) for c in cases] for t in terms]

    def coverage_of(member_rows: list[list[float]]) -> float:
        if not member_rows:
            return 0.0
        sol = [max(col) for col in zip(*member_rows)]
        return sum(min(s, yy) for s, yy in zip(sol, y)) / sum_y

    solution_m = [max(col) for col in zip(*memberships)]
    sum_s = sum(solution_m)
    overlap_s = sum(min(s, yy) for s, yy in zip(solution_m, y))
    solution_coverage = overlap_s / sum_y

    metrics = []
    for i, t in enumerate(terms):
        tm = memberships[i]
        sum_t = sum(tm)
        overlap = sum(min(a, b) for a, b in zip(tm, y))
        consistency = overlap / sum_t if sum_t > 0 else None
        raw = overlap / sum_y
        unique = solution_coverage - coverage_of([m for j, m in enumerate(memberships) if j != i])
        metrics.append(TermMetrics(t, consistency, raw, max(0.0, unique)))

    return Solution(
        condition_names=names,
        terms=tuple(terms),
        term_metrics=tuple(metrics),
        consistency=overlap_s / sum_s if sum_s > 0 else 0.0,
        coverage=solution_coverage,
        covered_cases=sum(1 for s in solution_m if s > 0.5),
    )


def analyze_sufficiency(
    cases: list[CaseMembership],
    outcome_name: str,
    consistency_threshold: float = 0.75,
    frequency_threshold: int = 1,
) -> Solution | None:
    """Truth table -> minimization -> metrics; None when no row passes the thresholds."""
    names, rows = build_truth_table(cases, outcome_name, consistency_threshold, frequency_threshold)
    minterms = {r.configuration for r in rows if r.included}
    if not minterms:
        return None
    terms = quine_mccluskey(minterms, len(names))
    return solution_metrics(terms, cases, outcome_name, names)


def analyze_both_outcomes(
    cases: list[CaseMembership],
    consistency_threshold: float = 0.75,
    frequency_threshold: int = 1,
) -> dict[str, Solution | None]:
    """Run the sufficiency pipeline independently for the high and low outcomes.

    The two runs share nothing: configurations sufficient for one outcome
    say nothing about the other (causal asymmetry), and an outcome with no
    included truth-table rows yields an explicit "no solution" (None).
    """
    return {
        name: analyze_sufficiency(cases, name, consistency_threshold, frequency_threshold)
        for name in ("high", "low")
    }

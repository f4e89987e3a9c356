"""Parsing, validation and serialization of the corpus input files.

A corpus directory holds:

* ``companies.csv``     -- id,name,founded,is_b2c,is_platform,sector,industry,sub_industry
* ``valuations.csv``    -- company_id,date,valuation_musd
* ``gt_metadata.csv``   -- company_id,brand_unique,category_group,related_query_count
* ``gt/<id>.w<k>.csv``  -- weekly search-interest export windows, two columns week,value

All parsers are pure functions over file contents; errors carry the row
number that triggered them.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from datetime import date, timedelta
from pathlib import Path

from .errors import InputError

UNICORN_THRESHOLD_MUSD = 1000.0
MAX_WINDOW_POINTS = 200

_WINDOW_NAME = re.compile(r"^(?P<company>.+)\.w(?P<index>\d+)\.csv$")


@dataclass(frozen=True)
class CompanyRecord:
    id: str
    name: str
    founded: date
    is_b2c: bool
    is_platform: bool
    sector: str
    industry: str
    sub_industry: str


@dataclass(frozen=True)
class ValuationRound:
    company_id: str
    date: date
    valuation: float  # millions of US dollars, > 0


@dataclass(frozen=True)
class ValuationSeries:
    company_id: str
    rounds: tuple[ValuationRound, ...]
    is_unicorn: bool


@dataclass(frozen=True)
class GtWindow:
    company_id: str
    index: int
    points: tuple[tuple[date, int], ...]  # (week start, value in 0..100)
    is_fragment: bool = False  # True when no point reaches the window-local max of 100


@dataclass(frozen=True)
class GtMetadata:
    company_id: str
    brand_unique: bool
    category_group: str  # "A" or "B"
    related_query_count: int


@dataclass
class Corpus:
    companies: dict[str, CompanyRecord] = field(default_factory=dict)
    valuations: dict[str, ValuationSeries] = field(default_factory=dict)
    windows: dict[str, tuple[GtWindow, ...]] = field(default_factory=dict)
    metadata: dict[str, tuple[GtMetadata, ...]] = field(default_factory=dict)


def resolve_founding_date(raw: str) -> date:
    """Resolve a founding date given either as YYYY or as YYYY-MM-DD.

    A bare year maps to January 1 of that year.
    """
    token = raw.strip()
    if re.fullmatch(r"\d{4}", token):
        return date(int(token), 1, 1)
    try:
        return date.fromisoformat(token)
    except ValueError as exc:
        raise InputError(f"not a founding date (YYYY or YYYY-MM-DD): {raw!r}") from exc


def derive_unicorn(rounds: list[ValuationRound] | tuple[ValuationRound, ...]) -> bool:
    """True iff any round valuation reaches $1B (1000 $M) or more."""
    if not rounds:
        raise InputError("cannot derive unicorn status from empty rounds")
    return any(r.valuation >= UNICORN_THRESHOLD_MUSD for r in rounds)


def _parse_bool(token: str, row: int, column: str) -> bool:
    if token == "true":
        return True
    if token == "false":
        return False
    raise InputError(f"row {row}: unknown boolean token {token!r} in column {column}")


def _parse_date(token: str, row: int, column: str) -> date:
    try:
        return date.fromisoformat(token)
    except ValueError as exc:
        raise InputError(f"row {row}: malformed date {token!r} in column {column}") from exc


def _open_csv(path: Path, expected_header: list[str]) -> list[list[str]]:
    if not path.exists():
        raise InputError(f"missing input file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != expected_header:
        raise InputError(f"{path.name}: header must be {','.join(expected_header)}")
    return rows[1:]


COMPANIES_HEADER = ["id", "name", "founded", "is_b2c", "is_platform", "sector", "industry", "sub_industry"]
VALUATIONS_HEADER = ["company_id", "date", "valuation_musd"]
METADATA_HEADER = ["company_id", "brand_unique", "category_group", "related_query_count"]


def parse_companies(path: str | Path, analysis_end: date) -> list[CompanyRecord]:
    """Parse companies.csv; rejects duplicate ids and foundings after the analysis end."""
    records: list[CompanyRecord] = []
    seen: set[str] = set()
    for i, row in enumerate(_open_csv(Path(path), COMPANIES_HEADER), start=2):
        if len(row) != len(COMPANIES_HEADER):
            raise InputError(f"row {i}: expected {len(COMPANIES_HEADER)} fields, got {len(row)}")
        cid, name, founded_raw, b2c, platform, sector, industry, sub = row
        if cid in seen:
            raise InputError(f"row {i}: duplicate company id {cid!r}")
        seen.add(cid)
        try:
            founded = resolve_founding_date(founded_raw)
        except InputError as exc:
            raise InputError(f"row {i}: {exc}") from None
        if founded > analysis_end:
            raise InputError(f"row {i}: company {cid!r} founded after analysis end ({founded} > {analysis_end})")
        records.append(
            CompanyRecord(
                id=cid,
                name=name,
                founded=founded,
                is_b2c=_parse_bool(b2c, i, "is_b2c"),
                is_platform=_parse_bool(platform, i, "is_platform"),
                sector=sector,
                industry=industry,
                sub_industry=sub,
            )
        )
    return records


def parse_valuations(path: str | Path) -> dict[str, ValuationSeries]:
    """Parse valuations.csv into per-company series sorted by date.

    Rejects nonpositive valuations and duplicate (company, date) pairs;
    derives the unicorn flag.
    """
    rounds: dict[str, list[ValuationRound]] = {}
    seen: set[tuple[str, date]] = set()
    for i, row in enumerate(_open_csv(Path(path), VALUATIONS_HEADER), start=2):
        if len(row) != 3:
            raise InputError(f"row {i}: expected 3 fields, got {len(row)}")
        cid, date_raw, val_raw = row
        when = _parse_date(date_raw, i, "date")
        try:
            valuation = float(val_raw)
        except ValueError as exc:
            raise InputError(f"row {i}: malformed valuation {val_raw!r}") from exc
        if valuation <= 0:
            raise InputError(f"row {i}: nonpositive valuation {val_raw} for {cid!r}")
        if (cid, when) in seen:
            raise InputError(f"row {i}: duplicate round date {when} for {cid!r}")
        seen.add((cid, when))
        rounds.setdefault(cid, []).append(ValuationRound(cid, when, valuation))
    out: dict[str, ValuationSeries] = {}
    for cid, rs in rounds.items():
        rs.sort(key=lambda r: r.date)
        out[cid] = ValuationSeries(cid, tuple(rs), derive_unicorn(rs))
    return out


def parse_gt_metadata(path: str | Path) -> dict[str, tuple[GtMetadata, ...]]:
    """Parse gt_metadata.csv; multiple rows per company are kept as variants."""
    out: dict[str, list[GtMetadata]] = {}
    for i, row in enumerate(_open_csv(Path(path), METADATA_HEADER), start=2):
        if len(row) != 4:
            raise InputError(f"row {i}: expected 4 fields, got {len(row)}")
        cid, unique_raw, group, count_raw = row
        if group not in ("A", "B"):
            raise InputError(f"row {i}: category_group must be A or B, got {group!r}")
        try:
            count = int(count_raw)
        except ValueError as exc:
            raise InputError(f"row {i}: malformed related_query_count {count_raw!r}") from exc
        if count < 0:
            raise InputError(f"row {i}: related_query_count must be >= 0")
        out.setdefault(cid, []).append(
            GtMetadata(cid, _parse_bool(unique_raw, i, "brand_unique"), group, count)
        )
    return {cid: tuple(v) for cid, v in out.items()}


def parse_gt_export(path: str | Path) -> GtWindow:
    """Parse one search-interest window export.

    The filename carries identity: ``<company_id>.w<index>.csv``. Values are
    integers 0..100; the export renders sub-unit values as "<1", which maps
    to 0. Week starts must be strictly increasing and 7 days apart, and a
    window holds at most 200 points.
    """
    path = Path(path)
    m = _WINDOW_NAME.match(path.name)
    if not m:
        raise InputError(f"window filename must look like <company_id>.w<index>.csv: {path.name}")
    cid, index = m.group("company"), int(m.group("index"))
    rows = _open_csv(path, ["week", "value"])
    if not rows:
        raise InputError(f"{path.name}: window is empty")
    if len(rows) > MAX_WINDOW_POINTS:
        raise InputError(f"{path.name}: window exceeds {MAX_WINDOW_POINTS} points ({len(rows)})")
    points: list[tuple[date, int]] = []
    for i, row in enumerate(rows, start=2):
        if len(row) != 2:
            raise InputError(f"{path.name} row {i}: expected 2 fields")
        week = _parse_date(row[0], i, "week")
        token = row[1].strip()
        if token == "<1":
            value = 0
        else:
            try:
                value = int(token)
            except ValueError as exc:
                raise InputError(f"{path.name} row {i}: malformed value {token!r}") from exc
        if not 0 <= value <= 100:
            raise InputError(f"{path.name} row {i}: value {value} out of range 0..100")
        if points:
            prev = points[-1][0]
            if week != prev + timedelta(days=7):
                raise InputError(f"{path.name} row {i}: weeks must be 7 days apart ({prev} -> {week})")
        points.append((week, value))
    max_value = max(v for _, v in points)
    return GtWindow(cid, index, tuple(points), is_fragment=max_value < 100)


def load_windows(gt_dir: str | Path) -> dict[str, tuple[GtWindow, ...]]:
    """Load every window file under a directory, grouped per company and sorted by index."""
    gt_dir = Path(gt_dir)
    if not gt_dir.is_dir():
        raise InputError(f"missing window directory: {gt_dir}")
    grouped: dict[str, list[GtWindow]] = {}
    for p in sorted(gt_dir.glob("*.csv")):
        w = parse_gt_export(p)
        grouped.setdefault(w.company_id, []).append(w)
    for ws in grouped.values():
        ws.sort(key=lambda w: w.index)
    return {cid: tuple(ws) for cid, ws in grouped.items()}


def load_corpus(root: str | Path, analysis_end: date) -> Corpus:
    """Load a full corpus directory (companies, valuations, metadata, windows)."""
    root = Path(root)
    companies = parse_companies(root / "companies.csv", analysis_end)
    return Corpus(
        companies={c.id: c for c in companies},
        valuations=parse_valuations(root / "valuations.csv"),
        windows=load_windows(root / "gt"),
        metadata=parse_gt_metadata(root / "gt_metadata.csv"),
    )


def founding_warnings(corpus: Corpus) -> list[str]:
    """One warning per company whose founding date falls after its first round."""
    warnings = []
    for cid in sorted(corpus.companies):
        series = corpus.valuations.get(cid)
        if series and corpus.companies[cid].founded > series.rounds[0].date:
            warnings.append(
                f"{cid}: founded {corpus.companies[cid].founded} after first round {series.rounds[0].date}"
            )
    return warnings


# --- serialization (the toolkit's own output formats round-trip through the parsers) ---


def _fmt_float(x: float) -> str:
    return repr(float(x))


def write_companies(path: str | Path, records: list[CompanyRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COMPANIES_HEADER)
        for r in records:
            w.writerow(
                [
                    r.id,
                    r.name,
                    r.founded.isoformat(),
                    "true" if r.is_b2c else "false",
                    "true" if r.is_platform else "false",
                    r.sector,
                    r.industry,
                    r.sub_industry,
                ]
            )


def write_valuations(path: str | Path, series: dict[str, ValuationSeries]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(VALUATIONS_HEADER)
        for cid in sorted(series):
            for r in series[cid].rounds:
                w.writerow([cid, r.date.isoformat(), _fmt_float(r.valuation)])


def write_gt_metadata(path: str | Path, metadata: dict[str, tuple[GtMetadata, ...]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(METADATA_HEADER)
        for cid in sorted(metadata):
            for m in metadata[cid]:
                w.writerow(
                    [cid, "true" if m.brand_unique else "false", m.category_group, str(m.related_query_count)]
                )


def write_gt_window(directory: str | Path, window: GtWindow) -> Path:
    path = Path(directory) / f"{window.company_id}.w{window.index}.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["week", "value"])
        for week, value in window.points:
            w.writerow([week.isoformat(), str(value)])
    return path


def write_corpus(root: str | Path, corpus: Corpus) -> None:
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    (root / "gt").mkdir(exist_ok=True)
    write_companies(root / "companies.csv", [corpus.companies[c] for c in sorted(corpus.companies)])
    write_valuations(root / "valuations.csv", corpus.valuations)
    write_gt_metadata(root / "gt_metadata.csv", corpus.metadata)
    for cid in sorted(corpus.windows):
        for w in corpus.windows[cid]:
            write_gt_window(root / "gt", w)

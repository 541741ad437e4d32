"""Ingestion, validation, synthetic history generation, session persistence.

History arrives as one CSV row per rankee-year with a fixed, spec-derived
column order (see :func:`history_columns`). Ingestion is total-or-nothing:
the first failing row aborts the load with its location. Sessions persist
the analysis inputs plus an ordered filter log -- never materialized
subsets -- so replaying the log over the regenerated scenario set
reproduces the analyst's current view exactly.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .core import (
    FINAL,
    RankeeRecord,
    RankingSystemSpec,
    aggregate_final_score,
    rank_entities,
)
from .errors import SchemaError, SessionError, ValidationError
from .predictor import EnsembleModel, EnsemblePrediction
from .rival import CARRY_FORWARD, RivalMethod, predict_rival
from .scenarios import (
    DEFAULT_CAP,
    AttributeRange,
    Scenario,
    ScenarioFilter,
    filter_scenarios,
    generate_scenarios,
)

SESSION_VERSION = 1


def history_columns(spec: RankingSystemSpec) -> list[str]:
    """Canonical CSV column order for a given spec."""
    return (
        ["rankee_id", "year"]
        + [f"attr_{a}" for a in spec.attribute_ids]
        + [f"ind_{i}" for i in spec.indicator_ids]
        + ["final_score", "rank"]
    )


@dataclass(frozen=True)
class HistoryTable:
    """Validated rankee-year rows plus ingestion provenance.

    ``gaps`` lists (rankee_id, missing_years) for rankees whose year
    sequence is not contiguous; gaps are flagged, not rejected.
    """

    rows: tuple[RankeeRecord, ...]
    provenance: dict = field(default_factory=dict)
    gaps: tuple[tuple[str, tuple[int, ...]], ...] = ()

    @classmethod
    def build(cls, rows: Sequence[RankeeRecord], source: str) -> "HistoryTable":
        seen: set[tuple[str, int]] = set()
        for r in rows:
            key = (r.rankee_id, r.year)
            if key in seen:
                raise ValidationError(f"duplicate (rankee, year) pair {key}")
            seen.add(key)
        years_by_rankee: dict[str, list[int]] = {}
        for r in rows:
            years_by_rankee.setdefault(r.rankee_id, []).append(r.year)
        gaps = []
        for rid, years in years_by_rankee.items():
            missing = sorted(set(range(min(years), max(years) + 1)) - set(years))
            if missing:
                gaps.append((rid, tuple(missing)))
        return cls(
            rows=tuple(rows),
            provenance={
                "source": source,
                "ingested_at": datetime.now(timezone.utc).isoformat(),
                "row_count": len(rows),
            },
            gaps=tuple(gaps),
        )

    @property
    def rankee_ids(self) -> tuple[str, ...]:
        seen = dict.fromkeys(r.rankee_id for r in self.rows)
        return tuple(seen)

    def for_rankee(self, rankee_id: str) -> tuple[RankeeRecord, ...]:
        return tuple(sorted(
            (r for r in self.rows if r.rankee_id == rankee_id), key=lambda r: r.year
        ))

    def record(self, rankee_id: str, year: int) -> RankeeRecord:
        for r in self.rows:
            if r.rankee_id == rankee_id and r.year == year:
                return r
        raise ValidationError(f"no record for rankee {rankee_id!r}, year {year}")


def load_history(path: str | Path, spec: RankingSystemSpec) -> HistoryTable:
    """Read and validate a history CSV; any failing row aborts the load."""
    path = Path(path)
    expected = history_columns(spec)
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected header row", location="header")
        if header != expected:
            raise SchemaError(
                f"{path}: header mismatch; expected {expected}, got {header}",
                location="header",
            )
        rows: list[RankeeRecord] = []
        for line_no, row in enumerate(reader, start=2):
            loc = f"{path.name}:{line_no}"
            if len(row) != len(expected):
                raise SchemaError(
                    f"{loc}: expected {len(expected)} fields, got {len(row)}",
                    location=loc,
                )
            fields = dict(zip(expected, row))

            def parse(column: str, caster):
                try:
                    return caster(fields[column])
                except ValueError:
                    raise SchemaError(
                        f"{loc}: cannot parse column {column!r} value {fields[column]!r}",
                        location=f"{loc}, column {column}",
                    ) from None

            record = RankeeRecord(
                rankee_id=fields["rankee_id"],
                year=parse("year", int),
                attribute_values={
                    a: parse(f"attr_{a}", float) for a in spec.attribute_ids
                },
                indicator_scores={
                    i: parse(f"ind_{i}", float) for i in spec.indicator_ids
                },
                final_score=parse("final_score", float),
                rank=parse("rank", int),
            )
            try:
                spec.validate_record(record)
            except (SchemaError, ValidationError) as exc:
                exc.location = loc
                raise
            rows.append(record)
    table = HistoryTable.build(rows, source=str(path))
    return table


def write_history(table: HistoryTable, path: str | Path, spec: RankingSystemSpec) -> None:
    """Write the canonical CSV form: fixed column order, repr floats, LF."""
    path = Path(path)
    columns = history_columns(spec)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for r in sorted(table.rows, key=lambda r: (r.rankee_id, r.year)):
            row = [r.rankee_id, r.year]
            row += [repr(float(r.attribute_values[a])) for a in spec.attribute_ids]
            row += [repr(float(r.indicator_scores[i])) for i in spec.indicator_ids]
            row += [repr(float(r.final_score)), r.rank]
            writer.writerow(row)


@dataclass(frozen=True)
class SyntheticConfig:
    """Linear generating process for synthetic history; seed fixes everything.

    ``coefficients`` maps each indicator id to ``{"intercept": c0,
    <attr_id>: slope, ...}`` covering exactly the indicator's group.
    """

    spec: RankingSystemSpec
    n_rankees: int
    n_years: int
    coefficients: dict[str, dict[str, float]]
    noise_sigma: float
    seed: int
    start_year: int = 2020
    drift_fraction: float = 0.02

    def __post_init__(self):
        if self.n_rankees < 1 or self.n_years < 1:
            raise ValidationError("need at least 1 rankee and 1 year")
        if self.noise_sigma < 0:
            raise ValidationError("noise sigma must be >= 0")
        for ind in self.spec.indicators:
            coefs = self.coefficients.get(ind.id)
            if coefs is None:
                raise ValidationError(f"no generating coefficients for indicator {ind.id!r}")
            expected = set(ind.attribute_group) | {"intercept"}
            if set(coefs) != expected:
                raise ValidationError(
                    f"coefficients for {ind.id!r} must have keys {sorted(expected)}, "
                    f"got {sorted(coefs)}"
                )


def generate_synthetic(config: SyntheticConfig) -> HistoryTable:
    """Draw a deterministic synthetic history table.

    Attributes start uniform in their domain and drift year over year;
    indicator scores are the configured linear form plus Gaussian noise,
    clamped to the score bounds; finals and per-year competition ranks are
    derived with the core arithmetic, so synthetic tables always pass
    load-time validation.
    """
    spec = config.spec
    rng = np.random.default_rng(config.seed)
    n, t = config.n_rankees, config.n_years
    attrs = spec.attributes
    lows = np.array([a.domain_min for a in attrs])
    highs = np.array([a.domain_max for a in attrs])
    spans = highs - lows

    base = rng.uniform(lows, highs, size=(n, len(attrs)))
    steps = rng.normal(0.0, 1.0, size=(n, max(t - 1, 0), len(attrs)))
    noise = rng.normal(0.0, config.noise_sigma, size=(n, t, len(spec.indicators)))

    values = np.empty((n, t, len(attrs)))
    values[:, 0, :] = base
    for year_idx in range(1, t):
        drift = config.drift_fraction * spans * steps[:, year_idx - 1, :]
        values[:, year_idx, :] = np.clip(values[:, year_idx - 1, :] + drift, lows, highs)

    width = len(str(n))
    rankee_ids = [f"R{i + 1:0{width}d}" for i in range(n)]
    attr_index = {a.id: j for j, a in enumerate(attrs)}

    rows: list[RankeeRecord] = []
    by_year: dict[int, dict[str, float]] = {}
    pending: dict[tuple[str, int], dict] = {}
    for i, rid in enumerate(rankee_ids):
        for year_idx in range(t):
            year = config.start_year + year_idx
            attr_values = {
                a.id: float(values[i, year_idx, attr_index[a.id]]) for a in attrs
            }
            scores = {}
            for k, ind in enumerate(spec.indicators):
                coefs = config.coefficients[ind.id]
                linear = coefs["intercept"] + sum(
                    coefs[a] * attr_values[a] for a in ind.attribute_group
                )
                scores[ind.id] = spec.clamp(linear + float(noise[i, year_idx, k]))
            final = aggregate_final_score(scores, spec)
            pending[(rid, year)] = {
                "attribute_values": attr_values,
                "indicator_scores": scores,
                "final_score": final,
            }
            by_year.setdefault(year, {})[rid] = final

    ranks_by_year = {year: rank_entities(finals) for year, finals in by_year.items()}
    for (rid, year), data in pending.items():
        rows.append(
            RankeeRecord(
                rankee_id=rid,
                year=year,
                rank=ranks_by_year[year][rid],
                **data,
            )
        )
    return HistoryTable.build(rows, source=f"synthetic(seed={config.seed})")


@dataclass
class Session:
    """A persisted analysis context.

    Scenario sets are never materialized on disk: they are regenerated
    deterministically from (spec, baseline, model, ranges) and the filter
    log is replayed on top, which keeps sessions small and auditable.
    """

    session_id: str
    spec: RankingSystemSpec
    baseline: RankeeRecord
    model: EnsembleModel
    ranges: tuple[AttributeRange, ...]
    filter_log: list[ScenarioFilter]
    rivals: dict[str, tuple[RankeeRecord, ...]]
    created_at: str
    cap: int = DEFAULT_CAP

    def to_dict(self) -> dict:
        return {
            "version": SESSION_VERSION,
            "session_id": self.session_id,
            "created_at": self.created_at,
            "cap": self.cap,
            "spec": self.spec.to_dict(),
            "baseline": self.baseline.to_dict(),
            "model": self.model.to_dict(),
            "ranges": [
                {"attribute_id": r.attribute_id, "values": list(r.values)}
                for r in self.ranges
            ],
            "filter_log": [f.to_dicts() for f in self.filter_log],
            "rivals": {
                rid: [r.to_dict() for r in history]
                for rid, history in self.rivals.items()
            },
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "Session":
        version = doc.get("version")
        if version != SESSION_VERSION:
            raise SessionError(
                f"session version {version!r} not supported "
                f"(expected {SESSION_VERSION}); migrate the file first"
            )
        try:
            return cls(
                session_id=doc["session_id"],
                created_at=doc["created_at"],
                cap=int(doc.get("cap", DEFAULT_CAP)),
                spec=RankingSystemSpec.from_dict(doc["spec"]),
                baseline=RankeeRecord.from_dict(doc["baseline"]),
                model=EnsembleModel.from_dict(doc["model"]),
                ranges=tuple(
                    AttributeRange(r["attribute_id"], tuple(r["values"]))
                    for r in doc["ranges"]
                ),
                filter_log=[ScenarioFilter.from_dicts(f) for f in doc["filter_log"]],
                rivals={
                    rid: tuple(RankeeRecord.from_dict(r) for r in history)
                    for rid, history in doc["rivals"].items()
                },
            )
        except KeyError as exc:
            raise SchemaError(f"session document missing field {exc}") from exc


def new_session(
    session_id: str,
    spec: RankingSystemSpec,
    baseline: RankeeRecord,
    model: EnsembleModel,
    ranges: Sequence[AttributeRange],
    rivals: Mapping[str, Sequence[RankeeRecord]] | None = None,
    cap: int = DEFAULT_CAP,
) -> Session:
    return Session(
        session_id=session_id,
        spec=spec,
        baseline=baseline,
        model=model,
        ranges=tuple(ranges),
        filter_log=[],
        rivals={rid: tuple(h) for rid, h in (rivals or {}).items()},
        created_at=datetime.now(timezone.utc).isoformat(),
        cap=cap,
    )


def rank_context(session: Session) -> dict[str, EnsemblePrediction]:
    """Rival final-score ensembles used to rank scenarios (carry-forward)."""
    context = {}
    for rid, history in session.rivals.items():
        context[rid] = predict_rival(
            RivalMethod(CARRY_FORWARD), history, session.model, session.spec
        )[FINAL]
    return context


def evaluate_session(session: Session) -> list[Scenario]:
    """Regenerate the session's full scenario set (deterministic)."""
    return generate_scenarios(
        ranges=session.ranges,
        baseline=session.baseline,
        model=session.model,
        spec=session.spec,
        cap=session.cap,
        rank_context=rank_context(session),
    )


def apply_filter_log(session: Session, scenarios: Sequence[Scenario]) -> list[Scenario]:
    """Replay the ordered filter log over a scenario set."""
    current = list(scenarios)
    for scenario_filter in session.filter_log:
        current = filter_scenarios(current, scenario_filter, session.baseline)
    return current


def save_session(session: Session, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(session.to_dict(), indent=2) + "\n", encoding="utf-8"
    )


def load_session(path: str | Path) -> Session:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(
            f"{path}: invalid session JSON at byte {exc.pos}: {exc.msg}",
            location=f"byte {exc.pos}",
        ) from exc
    return Session.from_dict(doc)


def load_spec(path: str | Path) -> RankingSystemSpec:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(
            f"{path}: invalid spec JSON at byte {exc.pos}: {exc.msg}",
            location=f"byte {exc.pos}",
        ) from exc
    return RankingSystemSpec.from_dict(doc)


def save_spec(spec: RankingSystemSpec, path: str | Path) -> None:
    Path(path).write_text(json.dumps(spec.to_dict(), indent=2) + "\n", encoding="utf-8")

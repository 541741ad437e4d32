"""Scenario generation, filtering, sorting and summarizing.

A scenario is one candidate attribute submission evaluated through the
ensemble model: per-indicator prediction ensembles, the aggregated final
ensemble, and the distribution of final rank against a rank context.
Scenario sets are immutable snapshots; generation order is the cartesian
product order of the ranges (attributes in spec declaration order) and is
deterministic regardless of how callers parallelize downstream work.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import (
    FINAL,
    KIND_ATTRIBUTE,
    KIND_FINAL,
    KIND_INDICATOR,
    RankeeRecord,
    RankingSystemSpec,
    RelativeChange,
    relative_change,
)
from .errors import (
    CapacityError,
    ContractError,
    SchemaError,
    ValidationError,
)
from .predictor import EnsembleModel, EnsemblePrediction

DEFAULT_CAP = 100_000
DEFAULT_BINS = 20

MEASURE_MEAN = "mean"      # ensemble mean minus baseline
MEASURE_MEMBER = "member"  # every ensemble member minus baseline

_OPS = (">", ">=", "<", "<=", "between")


@dataclass(frozen=True)
class Subject:
    """What a filter/summary refers to: an attribute, an indicator, or final."""

    kind: str
    id: str | None = None

    def __post_init__(self):
        if self.kind not in (KIND_ATTRIBUTE, KIND_INDICATOR, KIND_FINAL):
            raise ValidationError(f"unknown subject kind {self.kind!r}")
        if self.kind == KIND_FINAL:
            object.__setattr__(self, "id", None)
        elif not self.id:
            raise ValidationError(f"subject of kind {self.kind!r} needs an id")

    def token(self) -> str:
        if self.kind == KIND_ATTRIBUTE:
            return f"attr:{self.id}"
        if self.kind == KIND_INDICATOR:
            return f"ind:{self.id}"
        return FINAL


def parse_subject(token: str) -> Subject:
    """Parse ``attr:<id>``, ``ind:<id>`` or ``final``."""
    token = token.strip()
    if token == FINAL:
        return Subject(KIND_FINAL)
    if token.startswith("attr:"):
        return Subject(KIND_ATTRIBUTE, token[5:])
    if token.startswith("ind:"):
        return Subject(KIND_INDICATOR, token[4:])
    raise SchemaError(f"cannot parse subject {token!r} (want attr:<id>, ind:<id> or final)")


@dataclass(frozen=True)
class AttributeRange:
    """Explicit ascending list of candidate values for one attribute."""

    attribute_id: str
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise ValidationError(f"range for {self.attribute_id!r} is empty")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValidationError(
                f"range for {self.attribute_id!r} must be strictly ascending"
            )

    @classmethod
    def stepped(
        cls, attribute_id: str, start: float, stop: float, step: float
    ) -> "AttributeRange":
        """Expand min/max/step into an explicit value list (stop inclusive)."""
        if step <= 0:
            raise ValidationError(f"range step for {attribute_id!r} must be > 0")
        if stop < start:
            raise ValidationError(f"range for {attribute_id!r} has stop < start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return cls(attribute_id, tuple(start + i * step for i in range(count)))


@dataclass(frozen=True)
class Scenario:
    """One candidate submission and everything predicted from it."""

    scenario_id: int
    attribute_values: dict[str, float]
    attribute_deltas: dict[str, RelativeChange]
    indicator_predictions: dict[str, EnsemblePrediction]
    final_prediction: EnsemblePrediction
    rank_distribution: dict[int, int]

    def modal_rank(self) -> int:
        """Most frequent predicted rank; ties go to the better (smaller) rank."""
        best = min(self.rank_distribution.items(), key=lambda kv: (-kv[1], kv[0]))
        return best[0]


@dataclass(frozen=True)
class FilterPredicate:
    """One conjunct of a scenario filter.

    ``mean`` compares the ensemble mean minus baseline; ``member`` requires
    every ensemble member's delta to satisfy the comparison (for attribute
    subjects both collapse to the single value delta). ``between`` is
    inclusive on both ends.
    """

    subject: Subject
    measure: str
    op: str
    bound: float
    bound_high: float | None = None

    def __post_init__(self):
        if self.measure not in (MEASURE_MEAN, MEASURE_MEMBER):
            raise ValidationError(f"unknown filter measure {self.measure!r}")
        if self.op not in _OPS:
            raise ValidationError(f"unknown filter op {self.op!r}")
        if self.op == "between":
            if self.bound_high is None:
                raise ValidationError("between predicate needs two bounds")
            if self.bound_high < self.bound:
                raise ValidationError("between predicate has high bound < low bound")
        elif self.bound_high is not None:
            raise ValidationError(f"op {self.op!r} takes a single bound")

    def to_dict(self) -> dict:
        doc = {
            "subject": self.subject.token(),
            "measure": self.measure,
            "op": self.op,
            "bound": self.bound,
        }
        if self.op == "between":
            doc["bound_high"] = self.bound_high
        return doc

    @classmethod
    def from_dict(cls, doc: Mapping) -> "FilterPredicate":
        try:
            return cls(
                subject=parse_subject(doc["subject"]),
                measure=doc["measure"],
                op=doc["op"],
                bound=float(doc["bound"]),
                bound_high=float(doc["bound_high"]) if "bound_high" in doc else None,
            )
        except KeyError as exc:
            raise SchemaError(f"malformed filter predicate: missing {exc}") from exc


@dataclass(frozen=True)
class ScenarioFilter:
    """Conjunction (AND) of predicates; empty means keep everything."""

    predicates: tuple[FilterPredicate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "predicates", tuple(self.predicates))

    def to_dicts(self) -> list[dict]:
        return [p.to_dict() for p in self.predicates]

    @classmethod
    def from_dicts(cls, docs: Iterable[Mapping]) -> "ScenarioFilter":
        return cls(tuple(FilterPredicate.from_dict(d) for d in docs))


# Grammar: "<subject> <measure><op><value>" or "<subject> <measure> between <lo>..<hi>"
# e.g. "ind:SFRI mean>0", "final member>=1.5", "attr:budget mean between -2..5".
# Predicates are AND-joined with ";".
_PREDICATE_RE = re.compile(
    r"^\s*(?P<subject>\S+)\s+(?P<measure>mean|member)\b\s*"
    r"(?:(?P<op>>=|<=|>|<)\s*(?P<bound>\S+)"
    r"|between\s+(?P<lo>\S+?)\s*\.\.\s*(?P<hi>\S+))\s*$"
)


def parse_filter(text: str) -> ScenarioFilter:
    """Parse the textual filter grammar shared by the CLI and the service."""
    predicates = []
    for part in text.split(";"):
        if not part.strip():
            continue
        match = _PREDICATE_RE.match(part)
        if not match:
            raise SchemaError(f"cannot parse filter predicate {part.strip()!r}")
        subject = parse_subject(match.group("subject"))
        try:
            if match.group("op"):
                predicates.append(
                    FilterPredicate(
                        subject=subject,
                        measure=match.group("measure"),
                        op=match.group("op"),
                        bound=float(match.group("bound")),
                    )
                )
            else:
                predicates.append(
                    FilterPredicate(
                        subject=subject,
                        measure=match.group("measure"),
                        op="between",
                        bound=float(match.group("lo")),
                        bound_high=float(match.group("hi")),
                    )
                )
        except ValueError as exc:
            raise SchemaError(f"bad numeric bound in {part.strip()!r}") from exc
    return ScenarioFilter(tuple(predicates))


@dataclass(frozen=True)
class HistogramSummary:
    """Frequency-of-delta histogram over a scenario set for one subject.

    ``uncertainty_band`` is the aggregate (min member delta, max member
    delta) over all summarized scenarios; per-scenario bands come from
    :func:`uncertainty_band`. The degenerate all-equal case collapses to a
    single zero-width bin with equal edges.
    """

    subject: Subject
    bin_edges: tuple[float, ...]
    frequencies: tuple[int, ...]
    uncertainty_band: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "subject": self.subject.token(),
            "bin_edges": list(self.bin_edges),
            "frequencies": list(self.frequencies),
            "uncertainty_band": list(self.uncertainty_band),
        }


def _baseline_score(subject: Subject, baseline: RankeeRecord) -> float:
    if subject.kind == KIND_INDICATOR:
        if subject.id not in baseline.indicator_scores:
            raise ValidationError(f"unknown indicator id {subject.id!r}")
        return baseline.indicator_scores[subject.id]
    return baseline.final_score


def _subject_prediction(subject: Subject, scenario: Scenario) -> EnsemblePrediction:
    if subject.kind == KIND_INDICATOR:
        if subject.id not in scenario.indicator_predictions:
            raise ValidationError(f"unknown indicator id {subject.id!r}")
        return scenario.indicator_predictions[subject.id]
    return scenario.final_prediction


def generate_scenarios(
    ranges: Sequence[AttributeRange],
    baseline: RankeeRecord,
    model: EnsembleModel,
    spec: RankingSystemSpec,
    cap: int = DEFAULT_CAP,
    rank_context: Mapping[str, EnsemblePrediction] | None = None,
) -> list[Scenario]:
    """Evaluate the cartesian product of the submission ranges.

    Attributes without a range default to a single value: the baseline
    year's submission. If the product exceeds ``cap`` the call fails loudly
    with the exact count; nothing is silently truncated. ``rank_context``
    maps rival rankee ids to their predicted final ensembles; with an empty
    context every draw ranks first.
    """
    if cap < 1:
        raise ValidationError(f"cap must be >= 1, got {cap}")
    spec.validate_record(baseline)
    missing_model = [i for i in spec.indicator_ids if i not in model.coefficients]
    if missing_model:
        raise SchemaError(f"model has no members for indicators {missing_model}")

    by_attr: dict[str, AttributeRange] = {}
    for rng in ranges:
        if rng.attribute_id in by_attr:
            raise ValidationError(f"duplicate range for attribute {rng.attribute_id!r}")
        if rng.attribute_id not in spec.attribute_ids:
            raise ValidationError(f"range references unknown attribute {rng.attribute_id!r}")
        by_attr[rng.attribute_id] = rng

    value_lists: list[tuple[float, ...]] = []
    for attr in spec.attributes:
        rng = by_attr.get(attr.id)
        values = rng.values if rng else (baseline.attribute_values[attr.id],)
        for v in values:
            if not attr.domain_min <= v <= attr.domain_max:
                raise ValidationError(
                    f"value {v} for attribute {attr.id!r} outside domain "
                    f"[{attr.domain_min}, {attr.domain_max}]"
                )
        value_lists.append(tuple(values))

    total = math.prod(len(v) for v in value_lists)
    if total > cap:
        raise CapacityError(
            f"requested ranges produce {total} scenarios, exceeding cap {cap}",
            count=total,
        )

    grid = np.array(list(itertools.product(*value_lists)), dtype=float)
    n_scen = grid.shape[0]
    attr_index = {a.id: i for i, a in enumerate(spec.attributes)}
    m = model.member_count

    indicator_members: dict[str, np.ndarray] = {}
    for ind in spec.indicators:
        coefs = model.coefficients[ind.id]
        x = grid[:, [attr_index[a] for a in model.groups[ind.id]]]
        raw = x @ coefs[:, :-1].T + coefs[:, -1][None, :]
        indicator_members[ind.id] = np.clip(raw, spec.score_min, spec.score_max)

    weights = np.array([i.weight for i in spec.indicators])
    stacked = np.stack([indicator_members[i.id] for i in spec.indicators])
    final_members = np.clip(
        np.tensordot(weights, stacked, axes=1), spec.score_min, spec.score_max
    )

    if rank_context:
        wrong = {r: p.member_count for r, p in rank_context.items() if p.member_count != m}
        if wrong:
            raise ContractError(f"rank context ensembles disagree on M={m}: {wrong}")
        context = np.stack([p.members for p in rank_context.values()])
        rank_matrix = 1 + (context[:, None, :] > final_members[None, :, :]).sum(axis=0)
    else:
        rank_matrix = np.ones((n_scen, m), dtype=int)

    scenarios: list[Scenario] = []
    for sid in range(n_scen):
        values = {a.id: float(grid[sid, attr_index[a.id]]) for a in spec.attributes}
        deltas = {
            aid: relative_change(
                value, baseline.attribute_values[aid], KIND_ATTRIBUTE, aid
            )
            for aid, value in values.items()
        }
        predictions = {
            iid: EnsemblePrediction(subject_id=iid, members=indicator_members[iid][sid])
            for iid in spec.indicator_ids
        }
        ranks, counts = np.unique(rank_matrix[sid], return_counts=True)
        scenarios.append(
            Scenario(
                scenario_id=sid,
                attribute_values=values,
                attribute_deltas=deltas,
                indicator_predictions=predictions,
                final_prediction=EnsemblePrediction(
                    subject_id=FINAL, members=final_members[sid]
                ),
                rank_distribution={int(r): int(c) for r, c in zip(ranks, counts)},
            )
        )
    return scenarios


def _delta_band(
    predicate_subject: Subject, scenario: Scenario, baseline: RankeeRecord
) -> tuple[float, float, float]:
    """(mean delta, lowest member delta, highest member delta) for a subject."""
    if predicate_subject.kind == KIND_ATTRIBUTE:
        aid = predicate_subject.id
        if aid not in scenario.attribute_deltas:
            raise ValidationError(f"unknown attribute id {aid!r}")
        d = scenario.attribute_deltas[aid].value
        return d, d, d
    base = _baseline_score(predicate_subject, baseline)
    pred = _subject_prediction(predicate_subject, scenario)
    return pred.mean - base, pred.min - base, pred.max - base


def _predicate_holds(
    pred: FilterPredicate, scenario: Scenario, baseline: RankeeRecord
) -> bool:
    mean_d, lo_d, hi_d = _delta_band(pred.subject, scenario, baseline)
    if pred.op == "between":
        if pred.measure == MEASURE_MEAN:
            return pred.bound <= mean_d <= pred.bound_high
        return pred.bound <= lo_d and hi_d <= pred.bound_high
    if pred.measure == MEASURE_MEAN:
        probe_lo = probe_hi = mean_d
    else:
        probe_lo, probe_hi = lo_d, hi_d
    if pred.op == ">":
        return probe_lo > pred.bound
    if pred.op == ">=":
        return probe_lo >= pred.bound
    if pred.op == "<":
        return probe_hi < pred.bound
    return probe_hi <= pred.bound


def filter_scenarios(
    scenarios: Sequence[Scenario],
    scenario_filter: ScenarioFilter,
    baseline: RankeeRecord,
) -> list[Scenario]:
    """Keep scenarios satisfying every predicate; order and ids preserved."""
    for pred in scenario_filter.predicates:
        if pred.subject.kind == KIND_ATTRIBUTE:
            if pred.subject.id not in baseline.attribute_values:
                raise ValidationError(f"unknown attribute id {pred.subject.id!r}")
        elif pred.subject.kind == KIND_INDICATOR:
            if pred.subject.id not in baseline.indicator_scores:
                raise ValidationError(f"unknown indicator id {pred.subject.id!r}")
    return [
        s
        for s in scenarios
        if all(_predicate_holds(p, s, baseline) for p in scenario_filter.predicates)
    ]


def sort_scenarios(
    scenarios: Sequence[Scenario], key: str, direction: str = "asc"
) -> list[Scenario]:
    """Stable sort by attribute value or ensemble-mean score.

    ``key`` is an attribute id, an indicator id, or ``"final"``; ties keep
    generation order.
    """
    if direction not in ("asc", "desc"):
        raise ValidationError(f"direction must be 'asc' or 'desc', got {direction!r}")
    if not scenarios:
        return []
    probe = scenarios[0]
    if key == FINAL:
        keyfunc = lambda s: s.final_prediction.mean
    elif key in probe.attribute_values:
        keyfunc = lambda s: s.attribute_values[key]
    elif key in probe.indicator_predictions:
        keyfunc = lambda s: s.indicator_predictions[key].mean
    else:
        raise ValidationError(f"unknown sort key {key!r}")
    return sorted(scenarios, key=keyfunc, reverse=(direction == "desc"))


def summarize(
    scenarios: Sequence[Scenario],
    subject: Subject,
    baseline: RankeeRecord,
    bins: int = DEFAULT_BINS,
    bin_edges: Sequence[float] | None = None,
) -> HistogramSummary:
    """Histogram of per-scenario deltas for one subject.

    Deltas are ensemble means minus baseline for scores, plain value deltas
    for attributes. Bins are equal-width over [min delta, max delta],
    right-open except the last; pass ``bin_edges`` to pin edges externally
    (e.g. to compare partitions of one set bin-by-bin).
    """
    if not scenarios:
        raise ValidationError("summarize needs at least one scenario")
    if bins < 1:
        raise ValidationError(f"bins must be >= 1, got {bins}")

    if subject.kind == KIND_ATTRIBUTE:
        if subject.id not in baseline.attribute_values:
            raise ValidationError(f"unknown attribute id {subject.id!r}")
        deltas = np.array(
            [s.attribute_deltas[subject.id].value for s in scenarios], dtype=float
        )
        band = (float(deltas.min()), float(deltas.max()))
    else:
        base = _baseline_score(subject, baseline)
        preds = [_subject_prediction(subject, s) for s in scenarios]
        deltas = np.array([p.mean - base for p in preds], dtype=float)
        band = (
            min(p.min - base for p in preds),
            max(p.max - base for p in preds),
        )

    if bin_edges is not None:
        edges = np.asarray(bin_edges, dtype=float)
        if edges.size < 2 or np.any(np.diff(edges) <= 0):
            raise ValidationError("bin_edges must be strictly ascending with >= 2 edges")
        frequencies, edges = np.histogram(deltas, bins=edges)
    elif deltas.min() == deltas.max():
        # All deltas identical: one zero-width bin carrying all the mass.
        d = float(deltas[0])
        return HistogramSummary(
            subject=subject,
            bin_edges=(d, d),
            frequencies=(len(scenarios),),
            uncertainty_band=band,
        )
    else:
        frequencies, edges = np.histogram(
            deltas, bins=bins, range=(float(deltas.min()), float(deltas.max()))
        )
    return HistogramSummary(
        subject=subject,
        bin_edges=tuple(float(e) for e in edges),
        frequencies=tuple(int(f) for f in frequencies),
        uncertainty_band=band,
    )


def uncertainty_band(
    scenario: Scenario, subject: Subject, baseline: RankeeRecord
) -> tuple[float, float]:
    """(lowest, highest) member delta against baseline for a score subject.

    Negative values mean the prediction can fall below last year's value.
    """
    if subject.kind == KIND_ATTRIBUTE:
        raise ValidationError("uncertainty bands apply to indicator or final subjects")
    base = _baseline_score(subject, baseline)
    pred = _subject_prediction(subject, scenario)
    return (pred.min - base, pred.max - base)


def scenario_summary(scenario: Scenario, baseline: RankeeRecord) -> dict:
    """Row-level summary used by the list view, exports and the API."""
    indicators = {}
    for iid, pred in scenario.indicator_predictions.items():
        base = baseline.indicator_scores[iid]
        indicators[iid] = {
            "mean": pred.mean,
            "min": pred.min,
            "max": pred.max,
            "mean_delta": pred.mean - base,
            "band": [pred.min - base, pred.max - base],
        }
    final = scenario.final_prediction
    return {
        "scenario_id": scenario.scenario_id,
        "attributes": {
            aid: {"value": scenario.attribute_values[aid], "delta": rc.value}
            for aid, rc in scenario.attribute_deltas.items()
        },
        "indicators": indicators,
        "final": {
            "mean": final.mean,
            "min": final.min,
            "max": final.max,
            "mean_delta": final.mean - baseline.final_score,
            "band": [final.min - baseline.final_score, final.max - baseline.final_score],
        },
        "modal_rank": scenario.modal_rank(),
        "rank_distribution": {str(r): c for r, c in sorted(scenario.rank_distribution.items())},
    }


def scenarios_to_csv_rows(
    scenarios: Sequence[Scenario], spec: RankingSystemSpec
) -> tuple[list[str], list[list]]:
    """Header and rows for the CSV export: one row per scenario."""
    header = ["scenario_id"]
    header += [f"attr_{a}" for a in spec.attribute_ids]
    for iid in spec.indicator_ids:
        header += [f"ind_{iid}_mean", f"ind_{iid}_min", f"ind_{iid}_max"]
    header += ["final_mean", "final_min", "final_max", "modal_rank"]

    rows = []
    for s in scenarios:
        row: list = [s.scenario_id]
        row += [repr(s.attribute_values[a]) for a in spec.attribute_ids]
        for iid in spec.indicator_ids:
            p = s.indicator_predictions[iid]
            row += [repr(p.mean), repr(p.min), repr(p.max)]
        f = s.final_prediction
        row += [repr(f.mean), repr(f.min), repr(f.max), s.modal_rank()]
        rows.append(row)
    return header, rows

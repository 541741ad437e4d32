"""Ranking pipeline data model and the deterministic score/rank arithmetic.

A ranking system turns raw per-rankee attributes into grouped, normalized
indicator scores, aggregates those into a final score, and ranks all
rankees by final score. This module defines the pipeline description
(:class:`RankingSystemSpec`) and the pure arithmetic every other module
builds on: weighted aggregation, competition ranking, and year-over-year
relative changes.

All types are immutable after construction and all operations are pure
functions, so they are safe to call from any number of concurrent workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .errors import NoBaselineError, SchemaError, ValidationError

# Indicator weights must sum to 1 within this tolerance.
WEIGHT_SUM_TOL = 1e-9

# Subject kinds for RelativeChange / filters / summaries.
KIND_ATTRIBUTE = "attribute"
KIND_INDICATOR = "indicator_score"
KIND_FINAL = "final_score"

# Identifier used for the final score wherever subjects are keyed by id.
FINAL = "final"


@dataclass(frozen=True)
class AttributeSpec:
    """One raw submitted datum about a rankee."""

    id: str
    name: str
    unit: str
    domain_min: float
    domain_max: float

    def __post_init__(self):
        if not self.id:
            raise ValidationError("attribute id must be non-empty")
        if not self.domain_min < self.domain_max:
            raise ValidationError(
                f"attribute {self.id!r}: domain_min must be < domain_max "
                f"(got [{self.domain_min}, {self.domain_max}])"
            )


@dataclass(frozen=True)
class IndicatorSpec:
    """A normalized group of attributes with an aggregation weight."""

    id: str
    name: str
    weight: float
    attribute_group: tuple[str, ...]

    def __post_init__(self):
        if not self.id:
            raise ValidationError("indicator id must be non-empty")
        object.__setattr__(self, "attribute_group", tuple(self.attribute_group))
        if not 0.0 <= self.weight <= 1.0:
            raise ValidationError(
                f"indicator {self.id!r}: weight must be in [0, 1], got {self.weight}"
            )
        if not self.attribute_group:
            raise ValidationError(f"indicator {self.id!r}: attribute group is empty")
        if len(set(self.attribute_group)) != len(self.attribute_group):
            raise ValidationError(f"indicator {self.id!r}: duplicate attribute in group")


@dataclass(frozen=True)
class RankingSystemSpec:
    """Full pipeline definition: attributes, indicator groups, weights, bounds."""

    attributes: tuple[AttributeSpec, ...]
    indicators: tuple[IndicatorSpec, ...]
    score_min: float = 1.0
    score_max: float = 100.0

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))
        object.__setattr__(self, "indicators", tuple(self.indicators))
        if not self.attributes:
            raise ValidationError("spec declares no attributes")
        if not self.indicators:
            raise ValidationError("spec declares no indicators")
        if not self.score_min < self.score_max:
            raise ValidationError(
                f"score_min must be < score_max (got {self.score_min}, {self.score_max})"
            )
        attr_ids = [a.id for a in self.attributes]
        if len(set(attr_ids)) != len(attr_ids):
            raise ValidationError("duplicate attribute ids in spec")
        ind_ids = [i.id for i in self.indicators]
        if len(set(ind_ids)) != len(ind_ids):
            raise ValidationError("duplicate indicator ids in spec")

        weight_sum = sum(i.weight for i in self.indicators)
        if abs(weight_sum - 1.0) > WEIGHT_SUM_TOL:
            raise ValidationError(
                f"indicator weights must sum to 1 (got {weight_sum!r})"
            )
        declared = set(attr_ids)
        grouped: set[str] = set()
        for ind in self.indicators:
            unknown = [a for a in ind.attribute_group if a not in declared]
            if unknown:
                raise ValidationError(
                    f"indicator {ind.id!r} references undeclared attributes {unknown}"
                )
            grouped.update(ind.attribute_group)
        orphans = [a for a in attr_ids if a not in grouped]
        if orphans:
            raise ValidationError(f"attributes {orphans} appear in no indicator group")

    @property
    def attribute_ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.attributes)

    @property
    def indicator_ids(self) -> tuple[str, ...]:
        return tuple(i.id for i in self.indicators)

    def attribute(self, attribute_id: str) -> AttributeSpec:
        for a in self.attributes:
            if a.id == attribute_id:
                return a
        raise SchemaError(f"unknown attribute id {attribute_id!r}")

    def indicator(self, indicator_id: str) -> IndicatorSpec:
        for i in self.indicators:
            if i.id == indicator_id:
                return i
        raise SchemaError(f"unknown indicator id {indicator_id!r}")

    def clamp(self, value: float) -> float:
        return min(max(value, self.score_min), self.score_max)

    def validate_record(self, record: "RankeeRecord") -> None:
        """Check referential integrity and score bounds of one record."""
        loc = f"rankee {record.rankee_id!r}, year {record.year}"
        for aid in self.attribute_ids:
            if aid not in record.attribute_values:
                raise SchemaError(f"{loc}: missing attribute {aid!r}", location=loc)
        for aid in record.attribute_values:
            if aid not in self.attribute_ids:
                raise SchemaError(f"{loc}: unknown attribute {aid!r}", location=loc)
        for iid in self.indicator_ids:
            if iid not in record.indicator_scores:
                raise SchemaError(f"{loc}: missing indicator {iid!r}", location=loc)
        for iid, score in record.indicator_scores.items():
            if iid not in self.indicator_ids:
                raise SchemaError(f"{loc}: unknown indicator {iid!r}", location=loc)
            if not self.score_min <= score <= self.score_max:
                raise ValidationError(
                    f"{loc}: indicator {iid!r} score {score} outside "
                    f"[{self.score_min}, {self.score_max}]",
                    location=loc,
                )
        if not self.score_min <= record.final_score <= self.score_max:
            raise ValidationError(
                f"{loc}: final score {record.final_score} outside bounds",
                location=loc,
            )

    def to_dict(self) -> dict:
        """JSON-ready document (schema shared with data_io)."""
        return {
            "attributes": [
                {
                    "id": a.id,
                    "name": a.name,
                    "unit": a.unit,
                    "domain": [a.domain_min, a.domain_max],
                }
                for a in self.attributes
            ],
            "indicators": [
                {
                    "id": i.id,
                    "name": i.name,
                    "weight": i.weight,
                    "group": list(i.attribute_group),
                }
                for i in self.indicators
            ],
            "score_bounds": [self.score_min, self.score_max],
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "RankingSystemSpec":
        try:
            attributes = tuple(
                AttributeSpec(
                    id=a["id"],
                    name=a.get("name", a["id"]),
                    unit=a.get("unit", ""),
                    domain_min=float(a["domain"][0]),
                    domain_max=float(a["domain"][1]),
                )
                for a in doc["attributes"]
            )
            indicators = tuple(
                IndicatorSpec(
                    id=i["id"],
                    name=i.get("name", i["id"]),
                    weight=float(i["weight"]),
                    attribute_group=tuple(i["group"]),
                )
                for i in doc["indicators"]
            )
            bounds = doc.get("score_bounds", [1.0, 100.0])
        except (KeyError, TypeError, IndexError) as exc:
            raise SchemaError(f"malformed spec document: {exc}") from exc
        return cls(
            attributes=attributes,
            indicators=indicators,
            score_min=float(bounds[0]),
            score_max=float(bounds[1]),
        )


@dataclass(frozen=True)
class RankeeRecord:
    """One rankee-year of recorded history."""

    rankee_id: str
    year: int
    attribute_values: dict[str, float]
    indicator_scores: dict[str, float]
    final_score: float
    rank: int

    def __post_init__(self):
        if self.rank < 1:
            raise ValidationError(
                f"rankee {self.rankee_id!r}, year {self.year}: rank must be >= 1"
            )

    def to_dict(self) -> dict:
        return {
            "rankee_id": self.rankee_id,
            "year": self.year,
            "attribute_values": dict(self.attribute_values),
            "indicator_scores": dict(self.indicator_scores),
            "final_score": self.final_score,
            "rank": self.rank,
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "RankeeRecord":
        try:
            return cls(
                rankee_id=doc["rankee_id"],
                year=int(doc["year"]),
                attribute_values={k: float(v) for k, v in doc["attribute_values"].items()},
                indicator_scores={k: float(v) for k, v in doc["indicator_scores"].items()},
                final_score=float(doc["final_score"]),
                rank=int(doc["rank"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed rankee record: {exc}") from exc


@dataclass(frozen=True)
class RelativeChange:
    """Signed year-over-year difference for one subject.

    ``value`` is exactly ``current - baseline``; its sign drives the
    green/red classification in downstream views.
    """

    subject_kind: str
    subject_id: str
    value: float
    baseline: float


def relative_change(
    current: float, previous: float | None, kind: str, subject_id: str
) -> RelativeChange:
    """Build the signed change of ``current`` against last year's value.

    Raises :class:`NoBaselineError` when there is no previous-year value;
    a missing baseline must never be silently treated as zero.
    """
    if kind not in (KIND_ATTRIBUTE, KIND_INDICATOR, KIND_FINAL):
        raise ValidationError(f"unknown subject kind {kind!r}")
    if previous is None or (isinstance(previous, float) and math.isnan(previous)):
        raise NoBaselineError(
            f"no baseline value for {kind} {subject_id!r}; cannot compute change"
        )
    return RelativeChange(
        subject_kind=kind,
        subject_id=subject_id,
        value=current - previous,
        baseline=previous,
    )


def aggregate_final_score(
    indicator_scores: Mapping[str, float], spec: RankingSystemSpec
) -> float:
    """Weighted sum of indicator scores, clamped to the score bounds.

    The clamp is a no-op whenever weights sum to 1 and every input is in
    range; it only matters for ensemble members that were produced by an
    unclamped evaluation.
    """
    missing = [i for i in spec.indicator_ids if i not in indicator_scores]
    if missing:
        raise SchemaError(f"missing indicator scores for {missing}")
    unknown = [k for k in indicator_scores if k not in spec.indicator_ids]
    if unknown:
        raise SchemaError(f"unknown indicator ids {unknown}")
    total = sum(ind.weight * indicator_scores[ind.id] for ind in spec.indicators)
    return spec.clamp(total)


def rank_entities(final_scores: Mapping[str, float]) -> dict[str, int]:
    """Competition-rank rankees by final score, higher score first.

    Standard "1224" convention: tied rankees all receive the smallest rank
    of their block and the next distinct score skips accordingly.
    """
    if not final_scores:
        raise ValidationError("rank_entities requires at least one rankee")
    ordered = sorted(final_scores.items(), key=lambda kv: -kv[1])
    ranks: dict[str, int] = {}
    current_rank = 1
    previous_score: float | None = None
    for position, (rankee_id, score) in enumerate(ordered, start=1):
        if previous_score is None or score != previous_score:
            current_rank = position
            previous_score = score
        ranks[rankee_id] = current_rank
    return ranks

"""Reference bootstrap-linear ensemble predictor.

For every indicator the model keeps M linear members, each fit on one
bootstrap resample of the pooled (rankee, year) history rows. Member i of
every indicator shares the same resample index stream, so aggregating
member i across indicators is meaningful and preserves the correlation
carried by the bootstrap.

Models are immutable after :func:`fit` and all predictions are pure, so
callers may parallelize freely. The predictor is deliberately behind plain
``fit`` / ``predict_*`` signatures: any model producing M member values
per indicator can replace it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .core import FINAL, RankeeRecord, RankingSystemSpec
from .errors import ContractError, SchemaError, TrainingError, ValidationError

DEFAULT_MEMBERS = 100
DEFAULT_RIDGE = 1e-3


@dataclass(frozen=True)
class EnsemblePrediction:
    """M member values for one subject; uncertainty is their range."""

    subject_id: str
    members: np.ndarray

    def __post_init__(self):
        arr = np.array(self.members, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValidationError(
                f"prediction for {self.subject_id!r} needs a non-empty 1-d member list"
            )
        if not np.all(np.isfinite(arr)):
            raise ValidationError(f"prediction for {self.subject_id!r} has non-finite members")
        arr.setflags(write=False)
        object.__setattr__(self, "members", arr)

    @property
    def member_count(self) -> int:
        return int(self.members.size)

    # Derived statistics are always recomputed from the members so they
    # can never drift from the underlying ensemble.
    @property
    def mean(self) -> float:
        return float(self.members.mean())

    @property
    def min(self) -> float:
        return float(self.members.min())

    @property
    def max(self) -> float:
        return float(self.members.max())

    @property
    def uncertainty(self) -> float:
        return self.max - self.min


@dataclass(frozen=True)
class EnsembleModel:
    """Per-indicator member coefficient matrices plus training metadata.

    ``coefficients[iid]`` has shape (M, k+1): one row per member, the
    k group-attribute slopes in ``groups[iid]`` order, intercept last.
    """

    coefficients: dict[str, np.ndarray]
    groups: dict[str, tuple[str, ...]]
    score_min: float
    score_max: float
    member_count: int
    ridge: float
    seed: int
    years: tuple[int, ...]

    def __post_init__(self):
        counts = {c.shape[0] for c in self.coefficients.values()}
        if len(counts) > 1:
            raise ValidationError(f"member count differs across indicators: {sorted(counts)}")
        for iid, coefs in self.coefficients.items():
            if not np.all(np.isfinite(coefs)):
                raise ValidationError(f"indicator {iid!r} has non-finite coefficients")
            coefs.setflags(write=False)

    @property
    def indicator_ids(self) -> tuple[str, ...]:
        return tuple(self.coefficients.keys())

    def to_dict(self) -> dict:
        return {
            "member_count": self.member_count,
            "ridge": self.ridge,
            "seed": self.seed,
            "years": list(self.years),
            "score_bounds": [self.score_min, self.score_max],
            "indicators": {
                iid: {
                    "group": list(self.groups[iid]),
                    "coefficients": self.coefficients[iid].tolist(),
                }
                for iid in self.coefficients
            },
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "EnsembleModel":
        try:
            coefficients = {
                iid: np.array(entry["coefficients"], dtype=float)
                for iid, entry in doc["indicators"].items()
            }
            groups = {
                iid: tuple(entry["group"]) for iid, entry in doc["indicators"].items()
            }
            return cls(
                coefficients=coefficients,
                groups=groups,
                score_min=float(doc["score_bounds"][0]),
                score_max=float(doc["score_bounds"][1]),
                member_count=int(doc["member_count"]),
                ridge=float(doc["ridge"]),
                seed=int(doc["seed"]),
                years=tuple(int(y) for y in doc["years"]),
            )
        except (KeyError, TypeError, IndexError) as exc:
            raise SchemaError(f"malformed model document: {exc}") from exc


def _ridge_member(x: np.ndarray, y: np.ndarray, ridge: float) -> np.ndarray:
    """Least-squares fit of [slopes..., intercept], intercept unpenalized.

    The ridge penalty is applied by row augmentation, which keeps one code
    path for lambda = 0 and for degenerate (all-constant column) designs:
    lstsq returns the minimum-norm solution whenever the system is
    rank-deficient.
    """
    n, k = x.shape
    design = np.hstack([x, np.ones((n, 1))])
    if ridge > 0.0:
        penalty = np.hstack([np.sqrt(ridge) * np.eye(k), np.zeros((k, 1))])
        design = np.vstack([design, penalty])
        y = np.concatenate([y, np.zeros(k)])
    beta, *_ = np.linalg.lstsq(design, y, rcond=None)
    return beta


def fit(
    history: Sequence[RankeeRecord],
    spec: RankingSystemSpec,
    member_count: int = DEFAULT_MEMBERS,
    ridge: float = DEFAULT_RIDGE,
    seed: int = 0,
) -> EnsembleModel:
    """Fit one bootstrap-linear ensemble per indicator.

    Rows are pooled across rankees and years (sorted by (rankee_id, year)
    so the result does not depend on input order). Member i of every
    indicator is fit on the same bootstrap resample indices, which is what
    makes member-aligned final-score aggregation meaningful.
    """
    if member_count < 2:
        raise ValidationError(f"member_count must be >= 2, got {member_count}")
    if ridge < 0:
        raise ValidationError(f"ridge penalty must be >= 0, got {ridge}")

    rows = sorted(history, key=lambda r: (r.rankee_id, r.year))
    n = len(rows)
    rng = np.random.default_rng(seed)
    # One shared index stream: resample i is common to all indicators.
    resamples = rng.integers(0, n, size=(member_count, n)) if n else None

    coefficients: dict[str, np.ndarray] = {}
    groups: dict[str, tuple[str, ...]] = {}
    for ind in spec.indicators:
        group = ind.attribute_group
        x = np.array([[r.attribute_values[a] for a in group] for r in rows], dtype=float)
        y = np.array([r.indicator_scores[ind.id] for r in rows], dtype=float)
        distinct = {(tuple(xi), yi) for xi, yi in zip(x.tolist(), y.tolist())}
        if len(distinct) < 2:
            raise TrainingError(
                f"indicator {ind.id!r}: needs >= 2 distinct training rows, "
                f"got {len(distinct)}"
            )
        members = np.empty((member_count, len(group) + 1))
        for i in range(member_count):
            idx = resamples[i]
            members[i] = _ridge_member(x[idx], y[idx], ridge)
        coefficients[ind.id] = members
        groups[ind.id] = tuple(group)

    return EnsembleModel(
        coefficients=coefficients,
        groups=groups,
        score_min=spec.score_min,
        score_max=spec.score_max,
        member_count=member_count,
        ridge=ridge,
        seed=seed,
        years=tuple(sorted({r.year for r in rows})),
    )


def indicator_members(
    model: EnsembleModel,
    indicator_id: str,
    attribute_values: Mapping[str, float],
    clamp: bool = True,
) -> np.ndarray:
    """Evaluate all M member linear forms at the given attribute values.

    ``clamp=False`` returns the raw linear responses; influence analysis
    needs those because clamped scores flatten to zero slope at the bounds.
    """
    if indicator_id not in model.coefficients:
        raise SchemaError(f"unknown indicator id {indicator_id!r}")
    group = model.groups[indicator_id]
    missing = [a for a in group if a not in attribute_values]
    if missing:
        raise SchemaError(
            f"indicator {indicator_id!r}: missing group attributes {missing}"
        )
    x = np.array([attribute_values[a] for a in group], dtype=float)
    coefs = model.coefficients[indicator_id]
    values = coefs[:, :-1] @ x + coefs[:, -1]
    if clamp:
        values = np.clip(values, model.score_min, model.score_max)
    return values


def predict_indicator(
    model: EnsembleModel,
    indicator_id: str,
    attribute_values: Mapping[str, float],
) -> EnsemblePrediction:
    """M clamped member predictions for one indicator; index order kept."""
    return EnsemblePrediction(
        subject_id=indicator_id,
        members=indicator_members(model, indicator_id, attribute_values, clamp=True),
    )


def predict_final(
    indicator_predictions: Mapping[str, EnsemblePrediction],
    spec: RankingSystemSpec,
) -> EnsemblePrediction:
    """Member-aligned weighted aggregation of indicator ensembles.

    Final member i aggregates exactly the member-i values of every
    indicator, preserving the cross-indicator correlation carried by the
    shared bootstrap streams.
    """
    missing = [i for i in spec.indicator_ids if i not in indicator_predictions]
    if missing:
        raise SchemaError(f"missing indicator predictions for {missing}")
    unknown = [k for k in indicator_predictions if k not in spec.indicator_ids]
    if unknown:
        raise SchemaError(f"unknown indicator ids {unknown}")
    sizes = {p.member_count for p in indicator_predictions.values()}
    if len(sizes) > 1:
        raise ContractError(f"indicator ensembles disagree on M: {sorted(sizes)}")

    stacked = np.vstack([indicator_predictions[i.id].members for i in spec.indicators])
    weights = np.array([i.weight for i in spec.indicators])
    final = np.clip(weights @ stacked, spec.score_min, spec.score_max)
    return EnsemblePrediction(subject_id=FINAL, members=final)


def predict_rank(
    our_final: EnsemblePrediction,
    rival_finals: Mapping[str, EnsemblePrediction],
) -> dict[int, int]:
    """Histogram of our competition rank over the M aligned member draws.

    Draw i ranks our member-i final among all rankees' member-i finals;
    ties share the smallest rank, so our rank is 1 plus the number of
    rivals strictly above us in that draw.
    """
    m = our_final.member_count
    wrong = {rid: p.member_count for rid, p in rival_finals.items() if p.member_count != m}
    if wrong:
        raise ContractError(f"rival ensembles disagree on M={m}: {wrong}")
    if not rival_finals:
        return {1: m}
    rivals = np.vstack([p.members for p in rival_finals.values()])
    ranks = 1 + (rivals > our_final.members[None, :]).sum(axis=0)
    values, counts = np.unique(ranks, return_counts=True)
    return {int(r): int(c) for r, c in zip(values, counts)}

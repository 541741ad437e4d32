"""Rival score prediction, win probabilities, heat map and radar payloads.

Rivals' raw attribute submissions are usually private, so their future
scores are predicted from their published score history with three
interchangeable methods spanning "no change", "momentum" and "same model
as ours":

* ``carry_forward`` -- last year's score plus bootstrap draws of the
  historical year-over-year residuals (constant when only one year exists).
* ``trend_extrapolation`` -- per-subject least-squares line over a window
  of years, extrapolated one year ahead, plus residual bootstrap.
* ``model_based`` -- the user's own ensemble applied to the rival's latest
  recorded attributes.

Win probabilities compare all member pairs of two ensembles: member
indices mean nothing across unrelated prediction sources, so all-pairs is
the honest pairing. Ties count one half, which makes
``win_probability(a, b) + win_probability(b, a) == 1`` hold exactly.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .core import FINAL, RankeeRecord, RankingSystemSpec
from .errors import RivalMethodError, ValidationError
from .predictor import (
    EnsembleModel,
    EnsemblePrediction,
    predict_final,
    predict_indicator,
)
from .scenarios import Scenario

CARRY_FORWARD = "carry_forward"
TREND_EXTRAPOLATION = "trend_extrapolation"
MODEL_BASED = "model_based"
RIVAL_METHODS = (CARRY_FORWARD, TREND_EXTRAPOLATION, MODEL_BASED)

DENSITY_BINS = 50


@dataclass(frozen=True)
class RivalMethod:
    """A rival prediction procedure; M always matches the user's model."""

    method_id: str
    trend_window: int | None = None

    def __post_init__(self):
        if self.method_id not in RIVAL_METHODS:
            raise ValidationError(
                f"unknown rival method {self.method_id!r}; expected one of {RIVAL_METHODS}"
            )
        if self.trend_window is not None and self.trend_window < 2:
            raise ValidationError("trend window must cover at least 2 years")


def default_methods() -> tuple[RivalMethod, ...]:
    return tuple(RivalMethod(m) for m in RIVAL_METHODS)


@dataclass(frozen=True)
class WinProbabilityCell:
    """One heat-map cell; probability is None when the method failed."""

    rival_id: str
    method_id: str
    subject: str
    probability: float | None
    flag: str | None = None

    def __post_init__(self):
        if self.probability is not None and not 0.0 <= self.probability <= 1.0:
            raise ValidationError(f"probability {self.probability} outside [0, 1]")

    def to_dict(self) -> dict:
        return {
            "rival_id": self.rival_id,
            "method_id": self.method_id,
            "subject": self.subject,
            "probability": self.probability,
            "flag": self.flag,
        }


@dataclass(frozen=True)
class ScoreDistribution:
    """Ensemble members binned into a density over the full score range."""

    subject: str
    members: np.ndarray
    bin_edges: np.ndarray
    density: np.ndarray
    expected: float

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "bin_edges": self.bin_edges.tolist(),
            "density": self.density.tolist(),
            "expected": self.expected,
        }


def score_distribution(
    prediction: EnsemblePrediction,
    spec: RankingSystemSpec,
    bins: int = DENSITY_BINS,
) -> ScoreDistribution:
    """Histogram density of an ensemble over [score_min, score_max]."""
    counts, edges = np.histogram(
        prediction.members, bins=bins, range=(spec.score_min, spec.score_max)
    )
    density = counts / prediction.member_count
    return ScoreDistribution(
        subject=prediction.subject_id,
        members=prediction.members,
        bin_edges=edges,
        density=density,
        expected=prediction.mean,
    )


def _series(history: Sequence[RankeeRecord], subject: str) -> np.ndarray:
    if subject == FINAL:
        return np.array([r.final_score for r in history], dtype=float)
    return np.array([r.indicator_scores[subject] for r in history], dtype=float)


def _method_rng(model: EnsembleModel, rival_id: str, method_id: str) -> np.random.Generator:
    # Stable across processes: crc32 of the rival id, not Python's salted hash.
    return np.random.default_rng(
        [model.seed, zlib.crc32(rival_id.encode("utf-8")), RIVAL_METHODS.index(method_id)]
    )


def predict_rival(
    method: RivalMethod,
    rival_history: Sequence[RankeeRecord],
    model: EnsembleModel,
    spec: RankingSystemSpec,
) -> dict[str, EnsemblePrediction]:
    """Predict every indicator and the final score for one rival.

    Returns a map keyed by indicator id plus ``"final"``. Raises
    :class:`RivalMethodError` when the rival's history is too short for the
    chosen method; other methods are unaffected by such a failure.
    """
    if not rival_history:
        raise RivalMethodError("rival has no history")
    rival_ids = {r.rankee_id for r in rival_history}
    if len(rival_ids) != 1:
        raise ValidationError(f"rival history mixes rankees: {sorted(rival_ids)}")
    rival_id = rival_history[0].rankee_id
    history = sorted(rival_history, key=lambda r: r.year)
    m = model.member_count
    subjects = list(spec.indicator_ids) + [FINAL]
    rng = _method_rng(model, rival_id, method.method_id)

    if method.method_id == MODEL_BASED:
        latest = history[-1]
        indicator_predictions = {
            iid: predict_indicator(model, iid, latest.attribute_values)
            for iid in spec.indicator_ids
        }
        final = predict_final(indicator_predictions, spec)
        return {**indicator_predictions, FINAL: final}

    predictions: dict[str, EnsemblePrediction] = {}
    for subject in subjects:
        series = _series(history, subject)
        if method.method_id == CARRY_FORWARD:
            residuals = np.diff(series) if series.size > 1 else np.zeros(1)
            center = series[-1]
        else:  # trend_extrapolation
            window = method.trend_window or series.size
            tail = series[-window:]
            years = np.array([r.year for r in history[-window:]], dtype=float)
            if tail.size < 2:
                raise RivalMethodError(
                    f"rival {rival_id!r}: trend extrapolation needs >= 2 years, "
                    f"got {tail.size}"
                )
            slope, intercept = np.polyfit(years, tail, 1)
            center = slope * (years[-1] + 1) + intercept
            residuals = tail - (slope * years + intercept)
        draws = rng.choice(residuals, size=m, replace=True)
        members = np.clip(center + draws, spec.score_min, spec.score_max)
        predictions[subject] = EnsemblePrediction(subject_id=subject, members=members)
    return predictions


def win_probability(ours: EnsemblePrediction, rival: EnsemblePrediction) -> float:
    """P(our score beats the rival's) over all member pairs, ties = 1/2.

    Counting is integer-exact, so complementarity holds exactly:
    ``win_probability(a, b) + win_probability(b, a) == 1.0``.
    """
    a = ours.members[:, None]
    b = rival.members[None, :]
    greater = int(np.count_nonzero(a > b))
    equal = int(np.count_nonzero(a == b))
    return (2 * greater + equal) / (2 * ours.member_count * rival.member_count)


def heatmap(
    scenario: Scenario,
    rivals: Mapping[str, Sequence[RankeeRecord]],
    methods: Sequence[RivalMethod],
    model: EnsembleModel,
    spec: RankingSystemSpec,
) -> list[WinProbabilityCell]:
    """One cell per (rival, method, subject), subjects ending with final.

    Methods that cannot run on a rival's history produce flagged empty
    cells instead of aborting the grid.
    """
    ours: dict[str, EnsemblePrediction] = dict(scenario.indicator_predictions)
    ours[FINAL] = scenario.final_prediction
    subjects = list(spec.indicator_ids) + [FINAL]

    cells: list[WinProbabilityCell] = []
    for rival_id, history in rivals.items():
        for method in methods:
            try:
                theirs = predict_rival(method, history, model, spec)
            except RivalMethodError as exc:
                cells.extend(
                    WinProbabilityCell(
                        rival_id=rival_id,
                        method_id=method.method_id,
                        subject=subject,
                        probability=None,
                        flag=str(exc),
                    )
                    for subject in subjects
                )
                continue
            cells.extend(
                WinProbabilityCell(
                    rival_id=rival_id,
                    method_id=method.method_id,
                    subject=subject,
                    probability=win_probability(ours[subject], theirs[subject]),
                )
                for subject in subjects
            )
    return cells


@dataclass(frozen=True)
class RadarSubject:
    """Radar payload for one subject: our distribution vs rival expectations."""

    ours: ScoreDistribution
    rival_expected: dict[str, float]
    highlighted: ScoreDistribution | None = None

    def to_dict(self) -> dict:
        return {
            "ours": self.ours.to_dict(),
            "rival_expected": dict(self.rival_expected),
            "highlighted": self.highlighted.to_dict() if self.highlighted else None,
        }


def radar_data(
    scenario: Scenario,
    rivals: Mapping[str, Sequence[RankeeRecord]],
    method: RivalMethod,
    model: EnsembleModel,
    spec: RankingSystemSpec,
    highlight: str | None = None,
) -> dict[str, RadarSubject]:
    """Per-subject radar data for one method across all rivals.

    Every rival contributes its expected value; the highlighted rival also
    contributes its full distribution. The method must be valid for every
    listed rival.
    """
    if highlight is not None and highlight not in rivals:
        raise ValidationError(f"unknown rival id {highlight!r}")
    ours: dict[str, EnsemblePrediction] = dict(scenario.indicator_predictions)
    ours[FINAL] = scenario.final_prediction

    rival_predictions = {
        rival_id: predict_rival(method, history, model, spec)
        for rival_id, history in rivals.items()
    }
    payload: dict[str, RadarSubject] = {}
    for subject in list(spec.indicator_ids) + [FINAL]:
        payload[subject] = RadarSubject(
            ours=score_distribution(ours[subject], spec),
            rival_expected={
                rival_id: preds[subject].mean
                for rival_id, preds in rival_predictions.items()
            },
            highlighted=(
                score_distribution(rival_predictions[highlight][subject], spec)
                if highlight is not None
                else None
            ),
        )
    return payload

"""Attribute-to-indicator influence by perturbation.

Influence of an attribute on an indicator is measured by nudging the
attribute by a step delta around its scenario value and watching the
unclamped ensemble-mean prediction move. Raw influence is reported in
score points per +delta step; normalizing by the largest magnitude across
the whole selection maps everything into [-1, 1], so shades are comparable
within one selection (and only within it).

Clamped predictions are deliberately not used here: at the score bounds
they would flatten every slope to zero and mask the learned relationship.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

from .core import RankeeRecord, RankingSystemSpec
from .errors import DomainBoundsError, SchemaError, ValidationError
from .predictor import EnsembleModel, indicator_members
from .scenarios import Scenario

DEFAULT_DELTA_FRACTION = 0.01

FLAG_ONE_SIDED_UP = "one_sided_up"      # lower probe left the domain
FLAG_ONE_SIDED_DOWN = "one_sided_down"  # upper probe left the domain
FLAG_DOMAIN = "domain_error"            # both probes left the domain
FLAG_NO_INFLUENCE = "no_influence"


class Influence(NamedTuple):
    """Raw influence value plus a flag when a one-sided fallback was used."""

    raw: float
    flag: str | None


class InfluenceEntry(NamedTuple):
    raw: float
    normalized: float
    flag: str | None


class MainInfluencer(NamedTuple):
    attribute_id: str
    no_influence: bool


def default_delta_policy(
    spec: RankingSystemSpec,
    history: Sequence[RankeeRecord] | None = None,
    fraction: float = DEFAULT_DELTA_FRACTION,
) -> dict[str, float]:
    """Per-attribute perturbation step: a fraction of the observed range.

    Falls back to the declared domain width when no history is given or the
    observed values are all equal.
    """
    if fraction <= 0:
        raise ValidationError(f"delta fraction must be > 0, got {fraction}")
    deltas = {}
    for attr in spec.attributes:
        span = attr.domain_max - attr.domain_min
        if history:
            observed = [r.attribute_values[attr.id] for r in history]
            observed_span = max(observed) - min(observed)
            if observed_span > 0:
                span = observed_span
        deltas[attr.id] = fraction * span
    return deltas


def _mean_unclamped(
    model: EnsembleModel, indicator_id: str, values: dict[str, float]
) -> float:
    return float(indicator_members(model, indicator_id, values, clamp=False).mean())


def attribute_influence(
    model: EnsembleModel,
    scenario: Scenario | Mapping[str, float],
    spec: RankingSystemSpec,
    indicator_id: str,
    attribute_id: str,
    delta: float,
) -> Influence:
    """Central difference of the unclamped ensemble mean, per +delta step.

    A positive value means the indicator score increases when the attribute
    increases. Attributes outside the indicator's group have exactly zero
    influence by construction. When one probe would leave the attribute
    domain the difference falls back to one-sided and is flagged; when both
    probes would, a :class:`DomainBoundsError` is raised.
    """
    if delta <= 0:
        raise ValidationError(f"perturbation delta must be > 0, got {delta}")
    if indicator_id not in model.coefficients:
        raise SchemaError(f"unknown indicator id {indicator_id!r}")
    attr = spec.attribute(attribute_id)
    if attribute_id not in model.groups[indicator_id]:
        return Influence(0.0, None)

    values = dict(getattr(scenario, "attribute_values", scenario))
    base = values[attribute_id]
    up_ok = base + delta <= attr.domain_max
    down_ok = base - delta >= attr.domain_min

    if not up_ok and not down_ok:
        raise DomainBoundsError(
            f"perturbing {attribute_id!r} by {delta} leaves domain "
            f"[{attr.domain_min}, {attr.domain_max}] on both sides"
        )

    if up_ok and down_ok:
        values[attribute_id] = base + delta
        up = _mean_unclamped(model, indicator_id, values)
        values[attribute_id] = base - delta
        down = _mean_unclamped(model, indicator_id, values)
        return Influence((up - down) / 2.0, None)

    center = _mean_unclamped(model, indicator_id, {**values, attribute_id: base})
    if up_ok:
        values[attribute_id] = base + delta
        up = _mean_unclamped(model, indicator_id, values)
        return Influence(up - center, FLAG_ONE_SIDED_UP)
    values[attribute_id] = base - delta
    down = _mean_unclamped(model, indicator_id, values)
    return Influence(center - down, FLAG_ONE_SIDED_DOWN)


@dataclass(frozen=True)
class InfluenceMatrix:
    """Signed normalized influence for every (scenario, indicator, attribute).

    ``normalization_factor`` is the selection-wide max |raw|; normalized
    values are raw / factor (0 everywhere when the factor is 0), so the
    extreme magnitude in any non-degenerate selection is exactly 1.
    """

    selection_id: str
    entries: dict[tuple[int, str, str], InfluenceEntry]
    normalization_factor: float
    scenario_ids: tuple[int, ...]
    indicator_order: tuple[str, ...]
    attribute_order: tuple[str, ...]

    def entry(self, scenario_id: int, indicator_id: str, attribute_id: str) -> InfluenceEntry:
        key = (scenario_id, indicator_id, attribute_id)
        if key not in self.entries:
            raise ValidationError(f"no influence entry for {key}")
        return self.entries[key]

    def to_dict(self) -> dict:
        doc: dict = {
            "selection_id": self.selection_id,
            "normalization_factor": self.normalization_factor,
            "scenario_ids": list(self.scenario_ids),
            "indicators": list(self.indicator_order),
            "attributes": list(self.attribute_order),
            "entries": {},
        }
        for sid in self.scenario_ids:
            per_ind: dict = {}
            for iid in self.indicator_order:
                per_ind[iid] = {
                    aid: {
                        "raw": self.entries[(sid, iid, aid)].raw,
                        "normalized": self.entries[(sid, iid, aid)].normalized,
                        "flag": self.entries[(sid, iid, aid)].flag,
                    }
                    for aid in self.attribute_order
                }
            doc["entries"][str(sid)] = per_ind
        return doc


def build_matrix(
    model: EnsembleModel,
    scenarios: Sequence[Scenario],
    spec: RankingSystemSpec,
    delta_policy: Mapping[str, float] | None = None,
) -> InfluenceMatrix:
    """Influence of every attribute on every indicator across a selection.

    Per-entry domain failures become flagged zero entries rather than
    aborting the whole matrix.
    """
    if not scenarios:
        raise ValidationError("influence matrix needs a non-empty scenario selection")
    deltas = dict(delta_policy) if delta_policy is not None else default_delta_policy(spec)
    missing = [a for a in spec.attribute_ids if a not in deltas]
    if missing:
        raise ValidationError(f"delta policy misses attributes {missing}")

    raw_entries: dict[tuple[int, str, str], Influence] = {}
    for scenario in scenarios:
        for iid in spec.indicator_ids:
            for aid in spec.attribute_ids:
                try:
                    inf = attribute_influence(
                        model, scenario, spec, iid, aid, deltas[aid]
                    )
                except DomainBoundsError:
                    inf = Influence(0.0, FLAG_DOMAIN)
                raw_entries[(scenario.scenario_id, iid, aid)] = inf

    factor = max(
        (abs(i.raw) for i in raw_entries.values() if i.flag != FLAG_DOMAIN),
        default=0.0,
    )
    entries = {
        key: InfluenceEntry(
            raw=inf.raw,
            normalized=(inf.raw / factor) if factor > 0 else 0.0,
            flag=inf.flag,
        )
        for key, inf in raw_entries.items()
    }
    scenario_ids = tuple(s.scenario_id for s in scenarios)
    return InfluenceMatrix(
        selection_id="scn:" + ",".join(str(s) for s in scenario_ids),
        entries=entries,
        normalization_factor=factor,
        scenario_ids=scenario_ids,
        indicator_order=spec.indicator_ids,
        attribute_order=spec.attribute_ids,
    )


def main_influencer(
    matrix: InfluenceMatrix, scenario_id: int, indicator_id: str
) -> MainInfluencer:
    """Attribute with the largest |normalized| influence for one glyph.

    Ties (including the all-zero case) go to the earliest attribute in
    declaration order; an all-zero row is flagged ``no_influence``.
    """
    best_attr = None
    best_mag = -1.0
    for aid in matrix.attribute_order:
        entry = matrix.entry(scenario_id, indicator_id, aid)
        mag = abs(entry.normalized)
        if mag > best_mag:
            best_attr = aid
            best_mag = mag
    return MainInfluencer(attribute_id=best_attr, no_influence=(best_mag == 0.0))

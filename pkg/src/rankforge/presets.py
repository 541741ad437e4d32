"""Bundled demo ranking system and synthetic-data defaults.

Used by the CLI when no spec file is given and by the demo scripts, so a
fresh checkout can produce data, fit a model and run a full analysis with
no external inputs.
"""

from __future__ import annotations

import numpy as np

from .core import AttributeSpec, IndicatorSpec, RankingSystemSpec
from .data_io import SyntheticConfig


def demo_spec() -> RankingSystemSpec:
    """Five attributes grouped into three weighted indicators."""
    return RankingSystemSpec(
        attributes=(
            AttributeSpec("budget", "Annual budget", "MUSD", 10.0, 500.0),
            AttributeSpec("staff", "Qualified staff", "count", 5.0, 200.0),
            AttributeSpec("output", "Yearly output", "count", 0.0, 1000.0),
            AttributeSpec("reach", "Audience reach", "percent", 0.0, 100.0),
            AttributeSpec("impact", "Impact events", "count", 0.0, 50.0),
        ),
        indicators=(
            IndicatorSpec("capacity", "Operating capacity", 0.4, ("budget", "staff")),
            IndicatorSpec("quality", "Output quality", 0.4, ("output", "impact")),
            IndicatorSpec("visibility", "Visibility", 0.2, ("reach", "impact")),
        ),
    )


def derive_coefficients(
    spec: RankingSystemSpec, seed: int
) -> dict[str, dict[str, float]]:
    """Deterministic per-indicator linear coefficients for synthetic data.

    Slopes are scaled so each attribute contributes a bounded share of the
    score span and intercepts center the scores inside the bounds, keeping
    most generated scores away from the clamp.
    """
    rng = np.random.default_rng([seed, 0x5EED])
    span = spec.score_max - spec.score_min
    coefficients: dict[str, dict[str, float]] = {}
    for ind in spec.indicators:
        k = len(ind.attribute_group)
        coefs: dict[str, float] = {}
        contribution = 0.0
        for aid in ind.attribute_group:
            attr = spec.attribute(aid)
            share = float(rng.uniform(0.25, 0.6)) * span / k
            slope = share / (attr.domain_max - attr.domain_min)
            coefs[aid] = slope
            # Expected contribution at the domain midpoint.
            contribution += slope * (attr.domain_min + attr.domain_max) / 2.0
        target_mid = spec.score_min + float(rng.uniform(0.45, 0.65)) * span
        coefs["intercept"] = target_mid - contribution
        coefficients[ind.id] = coefs
    return coefficients


def demo_synthetic_config(
    spec: RankingSystemSpec | None = None,
    n_rankees: int = 50,
    n_years: int = 5,
    noise_sigma: float = 1.0,
    seed: int = 0,
    start_year: int = 2020,
) -> SyntheticConfig:
    spec = spec or demo_spec()
    return SyntheticConfig(
        spec=spec,
        n_rankees=n_rankees,
        n_years=n_years,
        coefficients=derive_coefficients(spec, seed),
        noise_sigma=noise_sigma,
        seed=seed,
        start_year=start_year,
    )

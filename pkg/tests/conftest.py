import numpy as np
import pytest


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    label = getattr(item.function, "_criterion", None)
    if report.when == "call" and label:
        status = "PASS" if report.passed else "FAIL"
        item.config.get_terminal_writer().line(f"[acceptance] {status}  {label}")

from rankforge import (
    AttributeRange,
    AttributeSpec,
    IndicatorSpec,
    RankeeRecord,
    RankingSystemSpec,
    SyntheticConfig,
    fit,
    generate_scenarios,
    generate_synthetic,
)

# Linear generating process used by the noiseless fixtures; slopes chosen so
# scores stay well inside [1, 100] over the attribute domains (no clamping,
# so the fitted ensemble can recover the coefficients exactly).
NOISELESS_COEFS = {
    "i1": {"intercept": 5.0, "a1": 0.3, "a2": 0.2},
    "i2": {"intercept": 10.0, "a2": 0.25, "a3": 0.35},
}


@pytest.fixture
def small_spec():
    return RankingSystemSpec(
        attributes=(
            AttributeSpec("a1", "Attribute 1", "units", 0.0, 100.0),
            AttributeSpec("a2", "Attribute 2", "units", 0.0, 100.0),
            AttributeSpec("a3", "Attribute 3", "units", 0.0, 100.0),
        ),
        indicators=(
            IndicatorSpec("i1", "Indicator 1", 0.6, ("a1", "a2")),
            IndicatorSpec("i2", "Indicator 2", 0.4, ("a2", "a3")),
        ),
    )


@pytest.fixture
def noiseless_table(small_spec):
    config = SyntheticConfig(
        spec=small_spec,
        n_rankees=30,
        n_years=5,
        coefficients=NOISELESS_COEFS,
        noise_sigma=0.0,
        seed=7,
    )
    return generate_synthetic(config)


@pytest.fixture
def noiseless_model(small_spec, noiseless_table):
    return fit(noiseless_table.rows, small_spec, member_count=20, ridge=0.0, seed=3)


@pytest.fixture
def baseline(noiseless_table):
    return noiseless_table.record("R01", 2024)


@pytest.fixture
def small_scenarios(small_spec, noiseless_model, baseline):
    ranges = [
        AttributeRange("a1", (20.0, 40.0, 60.0)),
        AttributeRange("a2", (30.0, 50.0)),
    ]
    return generate_scenarios(ranges, baseline, noiseless_model, small_spec)


def linear_history(spec, xs, slope, intercept, indicator_id="i", attribute_id="x", year=2024):
    """Single-year history rows drawn from y = slope*x + intercept."""
    rows = []
    for n, x in enumerate(xs):
        y = slope * x + intercept
        rows.append(
            RankeeRecord(
                rankee_id=f"E{n:02d}",
                year=year,
                attribute_values={attribute_id: float(x)},
                indicator_scores={indicator_id: float(y)},
                final_score=float(y),
                rank=1,
            )
        )
    return rows


@pytest.fixture
def line_spec():
    """One attribute, one indicator: the smallest possible pipeline."""
    return RankingSystemSpec(
        attributes=(AttributeSpec("x", "X", "units", 0.0, 100.0),),
        indicators=(IndicatorSpec("i", "I", 1.0, ("x",)),),
    )


def make_prediction(members, subject_id="s"):
    from rankforge import EnsemblePrediction

    return EnsemblePrediction(subject_id=subject_id, members=np.asarray(members, dtype=float))

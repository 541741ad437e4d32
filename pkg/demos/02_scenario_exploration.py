"""
Enumerating and narrowing candidate submissions
===============================================

The analyst loop: enumerate the cartesian product of submittable values,
look at the spread of predicted changes, keep only scenarios that improve
the interesting indicators, then sort and inspect the survivors.
"""

from rankforge import (
    AttributeRange,
    fit,
    generate_scenarios,
    generate_synthetic,
    parse_filter,
    filter_scenarios,
    sort_scenarios,
    summarize,
    uncertainty_band,
)
from rankforge.presets import demo_spec, demo_synthetic_config
from rankforge.scenarios import Subject
from rankforge.core import KIND_INDICATOR, KIND_FINAL

spec = demo_spec()
table = generate_synthetic(demo_synthetic_config(n_rankees=25, n_years=5, seed=3))
model = fit(table.rows, spec, member_count=100, seed=3)

# We are R01; the baseline for all deltas is last year's record.
baseline = table.record("R01", 2024)

# The submission ranges we could realistically file this year.
ranges = [
    AttributeRange.stepped("budget", 150.0, 350.0, 25.0),   # 9 values
    AttributeRange.stepped("staff", 80.0, 140.0, 15.0),     # 5 values
    AttributeRange("reach", (40.0, 50.0, 60.0)),            # 3 values
]
scenarios = generate_scenarios(ranges, baseline, model, spec)
print(f"generated {len(scenarios)} scenarios (9 x 5 x 3)")

# How do predicted capacity changes distribute across all scenarios?
summary = summarize(scenarios, Subject(KIND_INDICATOR, "capacity"), baseline, bins=10)
peak = max(summary.frequencies)
print("\ncapacity delta histogram (relative to last year):")
for lo, hi, freq in zip(summary.bin_edges, summary.bin_edges[1:], summary.frequencies):
    bar = "#" * round(30 * freq / peak)
    print(f"  [{lo:+7.2f}, {hi:+7.2f})  {bar} {freq}")

# Keep only scenarios predicted to improve capacity and the final score.
keep = parse_filter("ind:capacity mean>0; final mean>0")
kept = filter_scenarios(scenarios, keep, baseline)
print(f"\nfilter 'ind:capacity mean>0; final mean>0' keeps {len(kept)} of {len(scenarios)}")

# Sort by predicted final score and look at the two extremes.
ordered = sort_scenarios(kept, "final", "desc")
for s in (ordered[0], ordered[-1]):
    lo, hi = uncertainty_band(s, Subject(KIND_FINAL), baseline)
    print(
        f"scenario {s.scenario_id:3d}: budget={s.attribute_values['budget']:.0f} "
        f"staff={s.attribute_values['staff']:.0f} reach={s.attribute_values['reach']:.0f} "
        f"-> final {s.final_prediction.mean:.2f} (delta band [{lo:+.2f}, {hi:+.2f}])"
    )

# A band biased below zero warns that the gain could still be a loss.
risky = [s for s in kept if uncertainty_band(s, Subject(KIND_FINAL), baseline)[0] < 0]
print(f"\n{len(risky)} of the kept scenarios can still end below last year's final score")

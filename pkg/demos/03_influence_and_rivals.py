"""
What moves an indicator, and who we beat
========================================

Two questions an analyst asks about a shortlisted scenario: which
attribute is actually driving each indicator's prediction (perturbation
influence), and how likely is this submission to out-score each rival
(all-pairs win probability under three rival-prediction methods)?
"""

from rankforge import (
    AttributeRange,
    RivalMethod,
    build_matrix,
    default_methods,
    fit,
    generate_scenarios,
    generate_synthetic,
    heatmap,
    main_influencer,
    radar_data,
)
from rankforge.presets import demo_spec, demo_synthetic_config

spec = demo_spec()
table = generate_synthetic(demo_synthetic_config(n_rankees=25, n_years=5, seed=3))
model = fit(table.rows, spec, member_count=100, seed=3)
baseline = table.record("R01", 2024)

scenarios = generate_scenarios(
    [AttributeRange("budget", (150.0, 250.0, 350.0))], baseline, model, spec
)
selection = scenarios[:2]

# Influence: nudge each attribute by 1% of its domain and watch the
# unclamped prediction move; normalize across the whole selection.
matrix = build_matrix(model, selection, spec)
print(f"influence normalization factor: {matrix.normalization_factor:.4f}\n")
print(f"{'scenario':>8}  {'indicator':>10}  " + "  ".join(f"{a:>8}" for a in spec.attribute_ids))
for sid in matrix.scenario_ids:
    for iid in matrix.indicator_order:
        row = [matrix.entry(sid, iid, aid).normalized for aid in matrix.attribute_order]
        cells = "  ".join(f"{v:+8.3f}" for v in row)
        main = main_influencer(matrix, sid, iid)
        print(f"{sid:>8}  {iid:>10}  {cells}   <- main: {main.attribute_id}")

# Rivals: three prediction methods, one row each in the heat map.
rivals = {rid: table.for_rankee(rid) for rid in ("R02", "R03", "R04")}
cells = heatmap(selection[0], rivals, default_methods(), model, spec)
print("\nwin probabilities for scenario 0 (rows: rival/method, cols: subjects):")
subjects = list(spec.indicator_ids) + ["final"]
print(f"{'rival':>6} {'method':>20}  " + "  ".join(f"{s:>10}" for s in subjects))
by_key = {(c.rival_id, c.method_id, c.subject): c for c in cells}
for rid in rivals:
    for method in default_methods():
        row = [by_key[(rid, method.method_id, s)] for s in subjects]
        text = "  ".join(
            f"{c.probability:>10.3f}" if c.probability is not None else f"{'n/a':>10}"
            for c in row
        )
        print(f"{rid:>6} {method.method_id:>20}  {text}")

# Radar detail for one method: our score distribution vs rival expectations.
payload = radar_data(
    selection[0], rivals, RivalMethod("carry_forward"), model, spec, highlight="R02"
)
entry = payload["final"]
print("\nfinal-score radar (carry_forward): rival expected values")
for rid, expected in entry.rival_expected.items():
    marker = "  <- highlighted" if rid == "R02" else ""
    print(f"  {rid}: {expected:.2f}{marker}")
mass_above = sum(
    d for d, lo in zip(entry.ours.density, entry.ours.bin_edges)
    if lo >= entry.rival_expected["R02"]
)
print(f"our mass at or above R02's expectation: {mass_above:.2f}")

"""
From raw attributes to a ranked final score, with uncertainty
==============================================================

The smallest possible tour: describe a ranking system, synthesize a few
years of history, fit the bootstrap-linear ensemble, and predict one
rankee's scores for a candidate submission.
"""

from rankforge import fit, generate_synthetic, predict_final, predict_indicator, predict_rank
from rankforge.presets import demo_spec, demo_synthetic_config

# A ranking system: 5 attributes grouped into 3 weighted indicators.
spec = demo_spec()
print("attributes: ", ", ".join(spec.attribute_ids))
for ind in spec.indicators:
    print(f"indicator {ind.id}: weight {ind.weight}, group {ind.attribute_group}")

# Real submissions are private, so synthesize 4 years for 20 rankees.
table = generate_synthetic(demo_synthetic_config(n_rankees=20, n_years=4, seed=1))
print(f"\nhistory: {len(table.rows)} rows, years {sorted({r.year for r in table.rows})}")

# Fit: 100 linear members per indicator, one shared bootstrap stream per member.
model = fit(table.rows, spec, member_count=100, ridge=1e-3, seed=1)

# Predict indicator scores for a hypothetical submission.
submission = {"budget": 250.0, "staff": 120.0, "output": 600.0, "reach": 55.0, "impact": 30.0}
indicator_predictions = {}
for iid in spec.indicator_ids:
    pred = predict_indicator(model, iid, submission)
    indicator_predictions[iid] = pred
    print(f"\n{iid}: mean {pred.mean:.2f}, range [{pred.min:.2f}, {pred.max:.2f}]"
          f" (uncertainty {pred.uncertainty:.2f})")

# Aggregate member-by-member into the final score ensemble.
final = predict_final(indicator_predictions, spec)
print(f"\nfinal: mean {final.mean:.2f}, range [{final.min:.2f}, {final.max:.2f}]")

# Rank against everyone else's latest predicted finals (model-based here).
last_year = max(r.year for r in table.rows)
rivals = {}
for rid in table.rankee_ids:
    latest = table.record(rid, last_year)
    preds = {i: predict_indicator(model, i, latest.attribute_values) for i in spec.indicator_ids}
    rivals[rid] = predict_final(preds, spec)

distribution = predict_rank(final, rivals)
print("\npredicted rank distribution over the 100 member draws:")
for rank, count in sorted(distribution.items()):
    print(f"  rank {rank:3d}: {'#' * count} ({count})")

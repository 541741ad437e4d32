"""
Sessions: persist the analysis, replay the filter log
=====================================================

A session stores the inputs (spec, baseline, fitted model, ranges,
rivals) plus an ordered filter log -- never materialized scenario sets.
Loading a session regenerates the scenarios deterministically and replays
the log, reproducing the analyst's view bit for bit. The HTTP service and
the CLI `export` command work off exactly this file format.
"""

import tempfile
from pathlib import Path

from rankforge import (
    AttributeRange,
    apply_filter_log,
    evaluate_session,
    fit,
    generate_synthetic,
    load_session,
    new_session,
    parse_filter,
    save_session,
)
from rankforge.presets import demo_spec, demo_synthetic_config

spec = demo_spec()
table = generate_synthetic(demo_synthetic_config(n_rankees=20, n_years=4, seed=8))
model = fit(table.rows, spec, member_count=60, seed=8)

session = new_session(
    session_id="demo-session",
    spec=spec,
    baseline=table.record("R01", 2023),
    model=model,
    ranges=[
        AttributeRange.stepped("budget", 100.0, 300.0, 50.0),
        AttributeRange("output", (400.0, 600.0, 800.0)),
    ],
    rivals={"R02": table.for_rankee("R02"), "R03": table.for_rankee("R03")},
)

scenarios = evaluate_session(session)
print(f"session generates {len(scenarios)} scenarios")

# The analyst narrows the set in two steps; both land in the filter log.
session.filter_log.append(parse_filter("final mean>0"))
session.filter_log.append(parse_filter("ind:quality member>=-2"))
current = apply_filter_log(session, scenarios)
print(f"after 2 logged filters: {len(current)} scenarios")

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "session.json"
    save_session(session, path)
    print(f"\nsaved {path.stat().st_size} bytes of session JSON")

    # A fresh process would do exactly this and see exactly the same view.
    restored = load_session(path)
    replayed = apply_filter_log(restored, evaluate_session(restored))
    print(f"replayed view: {len(replayed)} scenarios")
    assert [s.scenario_id for s in replayed] == [s.scenario_id for s in current]
    print("replayed ids match the live session exactly")

print(
    "\nthe same session file drives the service:\n"
    "  rankforge serve --data-dir <dir>   # sessions live in <dir>/sessions/\n"
    "  rankforge export --session session.json --what heatmap --scenario 0 -o hm.json"
)

"""Command-line interface: ingest, synth, spec validate, analyze, serve, export.

Every analysis product reachable through the HTTP service is also
reachable here (``analyze`` for the generate/filter/export loop on raw
inputs, ``export`` for products of a saved session), so headless runs and
the UI share one implementation. Commands exit 0 on success and nonzero
with a one-line diagnostic on any validation failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import uuid
from pathlib import Path

from .data_io import (
    SyntheticConfig,
    apply_filter_log,
    evaluate_session,
    generate_synthetic,
    load_history,
    load_session,
    load_spec,
    new_session,
    save_session,
    write_history,
)
from .errors import RankforgeError, ValidationError
from .influence import build_matrix, default_delta_policy
from .predictor import DEFAULT_MEMBERS, DEFAULT_RIDGE, fit
from .presets import demo_spec, demo_synthetic_config, derive_coefficients
from .rival import RIVAL_METHODS, RivalMethod, default_methods, heatmap, radar_data
from .scenarios import (
    AttributeRange,
    filter_scenarios,
    parse_filter,
    parse_subject,
    scenario_summary,
    scenarios_to_csv_rows,
    sort_scenarios,
    summarize,
)


def _write_json(path: str, doc) -> None:
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def _write_scenarios(path: str, fmt: str, scenarios, spec, baseline) -> None:
    if fmt == "csv":
        header, rows = scenarios_to_csv_rows(scenarios, spec)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    else:
        _write_json(path, [scenario_summary(s, baseline) for s in scenarios])


def _parse_range_flag(text: str) -> AttributeRange:
    """Parse --range "attr=1,2,3" or --range "attr=min:max:step"."""
    if "=" not in text:
        raise ValidationError(f"range flag {text!r} must look like attr=...")
    attr, _, body = text.partition("=")
    attr = attr.strip()
    body = body.strip()
    if ":" in body:
        parts = body.split(":")
        if len(parts) != 3:
            raise ValidationError(f"stepped range {text!r} must be attr=min:max:step")
        return AttributeRange.stepped(attr, float(parts[0]), float(parts[1]), float(parts[2]))
    try:
        values = tuple(float(v) for v in body.split(","))
    except ValueError:
        raise ValidationError(f"cannot parse range values in {text!r}") from None
    return AttributeRange(attr, values)


def cmd_ingest(args) -> int:
    spec = load_spec(args.spec)
    table = load_history(args.history, spec)
    years = sorted({r.year for r in table.rows})
    span = f"{years[0]}-{years[-1]}" if years else "none"
    print(
        f"ingested {len(table.rows)} rows "
        f"({len(table.rankee_ids)} rankees, years {span})"
    )
    for rankee_id, missing in table.gaps:
        print(f"warning: {rankee_id} missing years {list(missing)}", file=sys.stderr)
    if args.output:
        write_history(table, args.output, spec)
        print(f"wrote canonical csv to {args.output}")
    return 0


def cmd_synth(args) -> int:
    if args.spec:
        spec = load_spec(args.spec)
        config = SyntheticConfig(
            spec=spec,
            n_rankees=args.rankees,
            n_years=args.years,
            coefficients=derive_coefficients(spec, args.seed),
            noise_sigma=args.sigma,
            seed=args.seed,
            start_year=args.start_year,
        )
    else:
        config = demo_synthetic_config(
            n_rankees=args.rankees,
            n_years=args.years,
            noise_sigma=args.sigma,
            seed=args.seed,
            start_year=args.start_year,
        )
    table = generate_synthetic(config)
    write_history(table, args.output, config.spec)
    print(f"wrote {len(table.rows)} rows to {args.output}")
    return 0


def cmd_spec_validate(args) -> int:
    spec = load_spec(args.spec)
    weight_sum = sum(i.weight for i in spec.indicators)
    print(
        f"spec OK: {len(spec.attributes)} attributes, {len(spec.indicators)} indicators, "
        f"weights sum {weight_sum:g}, scores in [{spec.score_min:g}, {spec.score_max:g}]"
    )
    return 0


def cmd_spec_show(args) -> int:
    print(json.dumps(demo_spec().to_dict(), indent=2))
    return 0


def _build_session_from_args(args):
    spec = load_spec(args.spec)
    table = load_history(args.history, spec)
    baseline = table.record(args.rankee, args.year)
    model = fit(
        table.rows, spec, member_count=args.members, ridge=args.ridge, seed=args.seed
    )
    rivals = {}
    for rival_id in [r for r in (args.rivals or "").split(",") if r]:
        history = table.for_rankee(rival_id)
        if not history:
            raise ValidationError(f"rival {rival_id!r} has no rows in history")
        rivals[rival_id] = history
    ranges = [_parse_range_flag(text) for text in args.range or []]
    return new_session(
        session_id=uuid.uuid4().hex[:12],
        spec=spec,
        baseline=baseline,
        model=model,
        ranges=ranges,
        rivals=rivals,
        cap=args.cap,
    )


def cmd_analyze(args) -> int:
    session = _build_session_from_args(args)
    for text in args.filter or []:
        session.filter_log.append(parse_filter(text))
    scenarios = evaluate_session(session)
    current = apply_filter_log(session, scenarios)
    print(f"generated {len(scenarios)} scenarios; {len(current)} after filtering")
    if args.sort:
        current = sort_scenarios(current, args.sort, args.dir)
    if args.output:
        _write_scenarios(args.output, args.format, current, session.spec, session.baseline)
        print(f"wrote {args.output}")
    if args.save_session:
        save_session(session, args.save_session)
        print(f"saved session to {args.save_session}")
    return 0


def cmd_export(args) -> int:
    session = load_session(args.session)
    scenarios = evaluate_session(session)
    current = apply_filter_log(session, scenarios)
    if args.filter:
        current = filter_scenarios(current, parse_filter(args.filter), session.baseline)

    if args.what == "scenarios":
        if args.sort:
            current = sort_scenarios(current, args.sort, args.dir)
        _write_scenarios(args.output, args.format, current, session.spec, session.baseline)
    elif args.what == "summary":
        result = summarize(
            current, parse_subject(args.subject), session.baseline, bins=args.bins
        )
        _write_json(args.output, {**result.to_dict(), "count": len(current)})
    elif args.what == "influence":
        ids = {int(tok) for tok in args.scenarios.split(",") if tok}
        selection = [s for s in scenarios if s.scenario_id in ids]
        if len(selection) != len(ids):
            missing = ids - {s.scenario_id for s in selection}
            raise ValidationError(f"unknown scenario ids {sorted(missing)}")
        matrix = build_matrix(
            session.model, selection, session.spec, default_delta_policy(session.spec)
        )
        _write_json(args.output, matrix.to_dict())
    elif args.what == "heatmap":
        target = next(
            (s for s in scenarios if s.scenario_id == args.scenario), None
        )
        if target is None:
            raise ValidationError(f"unknown scenario id {args.scenario}")
        cells = heatmap(
            target, session.rivals, default_methods(), session.model, session.spec
        )
        _write_json(args.output, [c.to_dict() for c in cells])
    else:  # radar
        target = next(
            (s for s in scenarios if s.scenario_id == args.scenario), None
        )
        if target is None:
            raise ValidationError(f"unknown scenario id {args.scenario}")
        payload = radar_data(
            target,
            session.rivals,
            RivalMethod(args.method),
            session.model,
            session.spec,
            highlight=args.highlight,
        )
        _write_json(
            args.output, {sid: entry.to_dict() for sid, entry in payload.items()}
        )
    print(f"wrote {args.output}")
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    serve(port=args.port, data_dir=args.data_dir, host=args.host, ui_dir=args.ui_dir)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankforge",
        description="What-if analysis for multi-criteria ranking systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a history CSV against a spec")
    p.add_argument("history", help="history CSV path")
    p.add_argument("--spec", required=True, help="ranking system spec JSON")
    p.add_argument("-o", "--output", help="write the canonical CSV form here")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("synth", help="generate deterministic synthetic history")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rankees", type=int, default=50)
    p.add_argument("--years", type=int, default=5)
    p.add_argument("--sigma", type=float, default=1.0, help="indicator noise sigma")
    p.add_argument("--start-year", type=int, default=2020)
    p.add_argument("--spec", help="spec JSON (bundled demo spec when omitted)")
    p.add_argument("-o", "--output", required=True, help="output CSV path")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("spec", help="spec utilities")
    spec_sub = p.add_subparsers(dest="spec_command", required=True)
    v = spec_sub.add_parser("validate", help="validate a spec JSON document")
    v.add_argument("spec", help="spec JSON path")
    v.set_defaults(func=cmd_spec_validate)
    s = spec_sub.add_parser("show-demo", help="print the bundled demo spec")
    s.set_defaults(func=cmd_spec_show)

    p = sub.add_parser(
        "analyze", help="generate scenarios, filter, sort and export them"
    )
    p.add_argument("--spec", required=True)
    p.add_argument("--history", required=True)
    p.add_argument("--rankee", required=True, help="baseline rankee id")
    p.add_argument("--year", type=int, required=True, help="baseline year")
    p.add_argument(
        "--range",
        action="append",
        metavar="ATTR=V1,V2|ATTR=MIN:MAX:STEP",
        help="submission range (repeatable)",
    )
    p.add_argument(
        "--filter", action="append", metavar="EXPR",
        help='e.g. "ind:i1 mean>0" (repeatable, AND-ed in order)',
    )
    p.add_argument("--sort", help="attribute id, indicator id, or 'final'")
    p.add_argument("--dir", choices=("asc", "desc"), default="asc")
    p.add_argument("--rivals", help="comma-separated rival rankee ids")
    p.add_argument("--cap", type=int, default=100_000)
    p.add_argument("--members", type=int, default=DEFAULT_MEMBERS)
    p.add_argument("--ridge", type=float, default=DEFAULT_RIDGE)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("-o", "--output", help="scenario export path")
    p.add_argument("--save-session", help="persist the session JSON here")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("export", help="export analysis products of a saved session")
    p.add_argument("--session", required=True, help="session JSON path")
    p.add_argument(
        "--what",
        required=True,
        choices=("scenarios", "summary", "influence", "heatmap", "radar"),
    )
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--filter", help="extra filter expression on top of the log")
    p.add_argument("--sort")
    p.add_argument("--dir", choices=("asc", "desc"), default="asc")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--subject", default="final", help="summary subject token")
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--scenarios", default="", help="comma-separated ids for influence")
    p.add_argument("--scenario", type=int, default=0, help="scenario id for rival views")
    p.add_argument("--method", choices=RIVAL_METHODS, default="carry_forward")
    p.add_argument("--highlight", help="rival id to highlight in radar")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument(
        "--data-dir",
        default=os.environ.get("RANKFORGE_DATA_DIR", "."),
        help="directory with history CSVs and sessions (env RANKFORGE_DATA_DIR)",
    )
    p.add_argument(
        "--ui-dir",
        default=None,
        help="serve the built frontend from this directory at /",
    )
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RankforgeError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error [io]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

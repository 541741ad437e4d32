"""HTTP service exposing sessions and analysis products to the UI.

Every response is an envelope ``{"status": "ok", "payload": ...}`` or
``{"status": "error", "error": {code, message, location?}}`` -- exactly one
of payload/error is present. All GETs are idempotent and side-effect free;
responses for a fixed session are byte-stable because sessions are
immutable snapshots apart from the filter log, and mutations of one
session are rejected (never queued or last-writer-wins) while another
mutation is in flight.
"""

from __future__ import annotations

import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .core import RankingSystemSpec
from .data_io import (
    Session,
    apply_filter_log,
    evaluate_session,
    load_history,
    load_session,
    new_session,
    save_session,
)
from .errors import RankforgeError, SchemaError, SessionError, ValidationError
from .influence import build_matrix, default_delta_policy
from .predictor import DEFAULT_MEMBERS, DEFAULT_RIDGE, fit
from .rival import RIVAL_METHODS, RivalMethod, default_methods, heatmap, radar_data
from .scenarios import (
    AttributeRange,
    Scenario,
    ScenarioFilter,
    filter_scenarios,
    parse_filter,
    parse_subject,
    scenario_summary,
    sort_scenarios,
    summarize,
)

DEFAULT_PAGE_SIZE = 100


class UnknownSessionError(SessionError):
    """Requested session id does not exist (maps to 404)."""


class SessionConflictError(SessionError):
    """A concurrent mutation of the same session was rejected (maps to 409)."""


def ok(payload) -> dict:
    return {"status": "ok", "payload": payload}


def error_envelope(exc: RankforgeError) -> dict:
    error = {"code": exc.code, "message": str(exc)}
    if exc.location:
        error["location"] = exc.location
    return {"status": "error", "error": error}


class SessionStore:
    """Flat-file session persistence plus in-memory scenario snapshots.

    Readers are unrestricted; mutations take a per-session non-blocking
    lock so two concurrent updates to one session cannot interleave -- the
    loser is rejected with a conflict error instead of silently winning.
    """

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.sessions_dir = self.data_dir / "sessions"
        self.sessions_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._scenarios: dict[str, list[Scenario]] = {}
        self._mutation_locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _path(self, session_id: str) -> Path:
        return self.sessions_dir / f"{session_id}.json"

    def _mutation_lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._mutation_locks.setdefault(session_id, threading.Lock())

    def create(self, session: Session) -> None:
        save_session(session, self._path(session.session_id))
        self._sessions[session.session_id] = session

    def get(self, session_id: str) -> Session:
        if session_id in self._sessions:
            return self._sessions[session_id]
        path = self._path(session_id)
        if not path.exists():
            raise UnknownSessionError(f"unknown session {session_id!r}")
        session = load_session(path)
        self._sessions[session_id] = session
        return session

    def scenarios(self, session_id: str) -> list[Scenario]:
        if session_id not in self._scenarios:
            self._scenarios[session_id] = evaluate_session(self.get(session_id))
        return self._scenarios[session_id]

    def mutate_filters(self, session_id: str, action) -> Session:
        session = self.get(session_id)
        lock = self._mutation_lock(session_id)
        if not lock.acquire(blocking=False):
            raise SessionConflictError(
                f"session {session_id!r} is being updated by another request"
            )
        try:
            action(session)
            save_session(session, self._path(session_id))
            return session
        finally:
            lock.release()


def _resolve_in_dir(data_dir: Path, name: str) -> Path:
    path = (data_dir / name).resolve()
    if data_dir.resolve() not in path.parents and path != data_dir.resolve():
        raise ValidationError(f"file {name!r} escapes the data directory")
    if not path.exists():
        raise ValidationError(f"file {name!r} not found in data directory")
    return path


def _parse_ranges(docs) -> list[AttributeRange]:
    ranges = []
    for doc in docs:
        try:
            if "values" in doc:
                ranges.append(AttributeRange(doc["attribute_id"], tuple(doc["values"])))
            else:
                ranges.append(
                    AttributeRange.stepped(
                        doc["attribute_id"],
                        float(doc["min"]),
                        float(doc["max"]),
                        float(doc["step"]),
                    )
                )
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed range document {doc!r}: {exc}") from exc
    return ranges


def _filtered(store: SessionStore, session_id: str) -> tuple[Session, list[Scenario]]:
    session = store.get(session_id)
    return session, apply_filter_log(session, store.scenarios(session_id))


def _scenario_by_id(scenarios: list[Scenario], scenario_id: int) -> Scenario:
    for s in scenarios:
        if s.scenario_id == scenario_id:
            return s
    raise ValidationError(f"unknown scenario id {scenario_id}")


def _parse_int(value: str, name: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ValidationError(f"query parameter {name!r} must be an integer") from None


def create_app(data_dir: str | Path, ui_dir: str | Path | None = None) -> FastAPI:
    """Build the service over one data directory (history CSVs + sessions).

    ``ui_dir`` optionally points at the built frontend; its files are then
    served from the root path so the workbench and the API share an origin.
    """
    data_dir = Path(data_dir)
    if not data_dir.is_dir():
        raise ValidationError(f"data directory {data_dir} is not readable")
    store = SessionStore(data_dir)
    app = FastAPI(title="rankforge", docs_url=None, redoc_url=None)
    app.state.store = store

    @app.exception_handler(RankforgeError)
    async def rankforge_error_handler(request: Request, exc: RankforgeError):
        if isinstance(exc, UnknownSessionError):
            status = 404
        elif isinstance(exc, SessionConflictError):
            status = 409
        else:
            status = 400
        return JSONResponse(status_code=status, content=error_envelope(exc))

    @app.get("/health")
    def health():
        return ok({"service": "rankforge"})

    @app.post("/api/sessions")
    async def create_session(request: Request):
        body = await request.json()
        if not isinstance(body, dict):
            raise SchemaError("session request body must be a JSON object")
        try:
            spec_doc = body["spec"]
            history_name = body["history"]
            baseline_doc = body["baseline"]
            ranges_doc = body["ranges"]
        except KeyError as exc:
            raise SchemaError(f"session request missing field {exc}") from exc

        spec = RankingSystemSpec.from_dict(spec_doc)
        table = load_history(_resolve_in_dir(data_dir, history_name), spec)
        baseline = table.record(baseline_doc["rankee_id"], int(baseline_doc["year"]))

        fit_config = body.get("fit", {})
        model = fit(
            table.rows,
            spec,
            member_count=int(fit_config.get("member_count", DEFAULT_MEMBERS)),
            ridge=float(fit_config.get("ridge", DEFAULT_RIDGE)),
            seed=int(fit_config.get("seed", 0)),
        )

        rivals = {}
        for rival_id in body.get("rivals", []):
            history = table.for_rankee(rival_id)
            if not history:
                raise ValidationError(f"rival {rival_id!r} has no rows in history")
            rivals[rival_id] = history

        session = new_session(
            session_id=uuid.uuid4().hex[:12],
            spec=spec,
            baseline=baseline,
            model=model,
            ranges=_parse_ranges(ranges_doc),
            rivals=rivals,
            cap=int(body.get("cap", 100_000)),
        )
        scenarios = evaluate_session(session)  # validates ranges and cap
        store.create(session)
        store._scenarios[session.session_id] = scenarios
        return ok(
            {"session_id": session.session_id, "scenario_count": len(scenarios)}
        )

    @app.get("/api/sessions/{session_id}")
    def session_info(session_id: str):
        session = store.get(session_id)
        return ok(
            {
                "session_id": session.session_id,
                "created_at": session.created_at,
                "spec": session.spec.to_dict(),
                "baseline": session.baseline.to_dict(),
                "ranges": [
                    {"attribute_id": r.attribute_id, "values": list(r.values)}
                    for r in session.ranges
                ],
                "rivals": list(session.rivals),
                "methods": list(RIVAL_METHODS),
                "filter_log": [f.to_dicts() for f in session.filter_log],
                "scenario_count": len(store.scenarios(session_id)),
                "filtered_count": len(apply_filter_log(session, store.scenarios(session_id))),
            }
        )

    @app.get("/api/sessions/{session_id}/scenarios")
    def list_scenarios(
        session_id: str,
        filter: str | None = None,
        sort: str | None = None,
        dir: str = "asc",
        page: int = 1,
        page_size: int = DEFAULT_PAGE_SIZE,
    ):
        session, current = _filtered(store, session_id)
        if filter:
            current = filter_scenarios(current, parse_filter(filter), session.baseline)
        if sort:
            current = sort_scenarios(current, sort, dir)
        if page < 1 or page_size < 1:
            raise ValidationError("page and page_size must be >= 1")
        start = (page - 1) * page_size
        rows = current[start : start + page_size]
        return ok(
            {
                "total": len(current),
                "page": page,
                "page_size": page_size,
                "scenarios": [scenario_summary(s, session.baseline) for s in rows],
            }
        )

    @app.get("/api/sessions/{session_id}/summary")
    def scenario_set_summary(session_id: str, subject: str, bins: int = 20):
        session, current = _filtered(store, session_id)
        result = summarize(current, parse_subject(subject), session.baseline, bins=bins)
        return ok({**result.to_dict(), "count": len(current)})

    @app.get("/api/sessions/{session_id}/influence")
    def influence_matrix(session_id: str, scenarios: str):
        session, _ = _filtered(store, session_id)
        full = store.scenarios(session_id)
        ids = [_parse_int(tok, "scenarios") for tok in scenarios.split(",") if tok]
        if not ids:
            raise ValidationError("scenarios parameter must list at least one id")
        selection = [_scenario_by_id(full, sid) for sid in ids]
        matrix = build_matrix(
            session.model, selection, session.spec, default_delta_policy(session.spec)
        )
        return ok(matrix.to_dict())

    @app.get("/api/sessions/{session_id}/rivals/heatmap")
    def rivals_heatmap(session_id: str, scenario: str):
        session, _ = _filtered(store, session_id)
        target = _scenario_by_id(store.scenarios(session_id), _parse_int(scenario, "scenario"))
        cells = heatmap(
            target, session.rivals, default_methods(), session.model, session.spec
        )
        return ok(
            {
                "scenario_id": target.scenario_id,
                "rivals": list(session.rivals),
                "methods": list(RIVAL_METHODS),
                "subjects": list(session.spec.indicator_ids) + ["final"],
                "cells": [c.to_dict() for c in cells],
            }
        )

    @app.get("/api/sessions/{session_id}/rivals/radar")
    def rivals_radar(
        session_id: str,
        scenario: str,
        method: str = "carry_forward",
        highlight: str | None = None,
    ):
        session, _ = _filtered(store, session_id)
        target = _scenario_by_id(store.scenarios(session_id), _parse_int(scenario, "scenario"))
        payload = radar_data(
            target,
            session.rivals,
            RivalMethod(method),
            session.model,
            session.spec,
            highlight=highlight,
        )
        return ok(
            {
                "scenario_id": target.scenario_id,
                "method": method,
                "subjects": {sid: entry.to_dict() for sid, entry in payload.items()},
            }
        )

    @app.post("/api/sessions/{session_id}/filters")
    async def append_filter(session_id: str, request: Request):
        body = await request.json()
        if isinstance(body, dict) and "filter" in body:
            scenario_filter = parse_filter(body["filter"])
        elif isinstance(body, dict) and "predicates" in body:
            scenario_filter = ScenarioFilter.from_dicts(body["predicates"])
        else:
            raise SchemaError("body must carry 'filter' (text) or 'predicates' (list)")
        # Validate against the session's scenario set before persisting.
        session = store.get(session_id)
        filter_scenarios(store.scenarios(session_id), scenario_filter, session.baseline)
        session = store.mutate_filters(
            session_id, lambda s: s.filter_log.append(scenario_filter)
        )
        filtered = apply_filter_log(session, store.scenarios(session_id))
        return ok({"filters": len(session.filter_log), "scenario_count": len(filtered)})

    @app.delete("/api/sessions/{session_id}/filters/last")
    def undo_filter(session_id: str):
        session = store.get(session_id)
        if not session.filter_log:
            raise ValidationError("filter log is already empty")
        session = store.mutate_filters(session_id, lambda s: s.filter_log.pop())
        filtered = apply_filter_log(session, store.scenarios(session_id))
        return ok({"filters": len(session.filter_log), "scenario_count": len(filtered)})

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        ui_dir = Path(ui_dir)
        if not ui_dir.is_dir():
            raise ValidationError(f"ui directory {ui_dir} is not readable")
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def serve(
    port: int = 8000,
    data_dir: str | Path = ".",
    host: str = "127.0.0.1",
    ui_dir: str | Path | None = None,
) -> None:
    """Run the service until interrupted. Fails at startup if the port is taken."""
    import uvicorn

    app = create_app(data_dir, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")

"""Record service payloads into JSON fixtures for the frontend tests.

Run from the repo root (needs the rankforge package importable):

    python3 frontend/scripts/record_fixtures.py

Deterministic: fixed seeds, fixed session id replacement, so reruns only
change fixtures when the service output genuinely changes.
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from rankforge import generate_synthetic, save_spec, write_history
from rankforge.presets import demo_spec, demo_synthetic_config
from rankforge.service import create_app

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
SESSION_ID = "fixture-session"


def dump(name: str, doc) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    (FIXTURES / f"{name}.json").write_text(text.replace(SESSION_ID, SESSION_ID))
    print(f"wrote {name}.json")


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    spec = demo_spec()
    with tempfile.TemporaryDirectory() as tmp:
        data_dir = Path(tmp)
        table = generate_synthetic(demo_synthetic_config(seed=9, n_rankees=20, n_years=4))
        write_history(table, data_dir / "history.csv", spec)
        save_spec(spec, data_dir / "spec.json")
        client = TestClient(create_app(data_dir))

        created = client.post(
            "/api/sessions",
            json={
                "spec": spec.to_dict(),
                "history": "history.csv",
                "baseline": {"rankee_id": "R01", "year": 2023},
                "ranges": [
                    {"attribute_id": "budget", "values": [200.0, 350.0, 500.0]},
                    {"attribute_id": "staff", "values": [80.0, 140.0, 200.0]},
                ],
                "rivals": ["R02", "R03"],
                "fit": {"member_count": 40, "seed": 5},
            },
        ).json()["payload"]
        sid = created["session_id"]

        def record(name, path, **params):
            response = client.get(path.format(sid=sid), params=params)
            assert response.status_code == 200, response.text
            doc = json.loads(response.text.replace(sid, SESSION_ID))
            dump(name, doc)
            return doc

        dump("created", {**created, "session_id": SESSION_ID})
        record("session_info", "/api/sessions/{sid}")
        record("scenarios", "/api/sessions/{sid}/scenarios")
        for attr in spec.attribute_ids:
            record(f"summary_attr_{attr}", "/api/sessions/{sid}/summary",
                   subject=f"attr:{attr}", bins=8)
        for ind in spec.indicator_ids:
            record(f"summary_ind_{ind}", "/api/sessions/{sid}/summary",
                   subject=f"ind:{ind}", bins=8)
        record("summary_final", "/api/sessions/{sid}/summary", subject="final", bins=8)
        record("influence", "/api/sessions/{sid}/influence", scenarios="0,4")
        record("heatmap", "/api/sessions/{sid}/rivals/heatmap", scenario=4)
        record("radar_carry_forward", "/api/sessions/{sid}/rivals/radar",
               scenario=4, method="carry_forward")
        record("radar_carry_forward_highlight", "/api/sessions/{sid}/rivals/radar",
               scenario=4, method="carry_forward", highlight="R02")
        record("radar_trend_extrapolation", "/api/sessions/{sid}/rivals/radar",
               scenario=4, method="trend_extrapolation")

        # The brushing interaction: a positive-delta filter on one indicator.
        posted = client.post(
            f"/api/sessions/{sid}/filters", json={"filter": "ind:capacity mean>0"}
        )
        dump("filter_post", posted.json())
        record("scenarios_filtered", "/api/sessions/{sid}/scenarios")


if __name__ == "__main__":
    main()

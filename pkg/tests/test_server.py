import pytest
from fastapi.testclient import TestClient

from hullspace.engine import ExplorationEngine, ScriptedClock
from hullspace.server import create_app
from tests.conftest import small_config


@pytest.fixture(scope="module")
def client(tmp_path_factory):
    engine = ExplorationEngine(tmp_path_factory.mktemp("server"), small_config(),
                               seed=3, clock_factory=lambda: ScriptedClock())
    return TestClient(create_app(engine))


@pytest.fixture(scope="module")
def participant(client):
    response = client.post("/participants", json={"seed": 100})
    assert response.status_code == 200
    return response.json()


class TestLifecycle:
    def test_create_participant(self, participant):
        assert set(participant["modeOrder"]) == {"rem", "saem", "aem"}
        assert participant["participantId"].startswith("p")

    def test_out_of_order_start_conflict(self, client, participant):
        pid = participant["participantId"]
        later = participant["modeOrder"][2]
        response = client.post(f"/participants/{pid}/start-mode", json={"mode": later})
        assert response.status_code == 409

    def test_unknown_participant_404(self, client):
        response = client.post("/participants/ghost/start-mode", json={"mode": "rem"})
        assert response.status_code == 404

    def test_full_first_mode_flow(self, client, participant):
        pid = participant["participantId"]
        mode = participant["modeOrder"][0]
        response = client.post(f"/participants/{pid}/start-mode", json={"mode": mode})
        assert response.status_code == 200
        sid = response.json()["sessionId"]

        state = client.get(f"/sessions/{sid}").json()
        assert state["mode"] == mode

        if mode == "rem":
            points = state["embedding"]["points"]
            ids = state["embedding"]["designIds"]
            # no performance value is visible anywhere before evaluation
            first = client.get(f"/sessions/{sid}/designs/{ids[0]}").json()
            assert first["cw"] is None
            clicked = client.post(f"/sessions/{sid}/action", json={
                "verb": "click", "params": {"u": points[0][0], "v": points[0][1]}
            }).json()["design"]
            assert clicked["cw"] is None
            evaluated = client.post(f"/sessions/{sid}/action", json={
                "verb": "evaluate", "params": {"designId": clicked["id"]}
            }).json()["design"]
            assert evaluated["cw"] is not None
            for slot in range(1, 6):
                client.post(f"/sessions/{sid}/action", json={
                    "verb": "select",
                    "params": {"slot": slot, "designId": ids[slot],
                               "rationale": "both"}})
            done = client.post(f"/sessions/{sid}/action", json={"verb": "terminate"})
            assert done.json()["terminated"]
        else:
            verb = "generation" if mode == "saem" else "interaction"
            for _ in range(16):
                shown = client.post(f"/sessions/{sid}/action",
                                    json={"verb": verb}).json()["designs"]
                assert len(shown) == 5
                assert all(d["cw"] is not None for d in shown)
                client.post(f"/sessions/{sid}/action", json={
                    "verb": "select",
                    "params": {"chosenId": shown[0]["id"], "rationale": "form"}})
            done = client.post(f"/sessions/{sid}/action", json={"verb": "terminate"})
            assert done.json()["terminated"]

        progress = client.get(f"/participants/{pid}").json()
        assert mode in progress["completed"]

    def test_event_polling(self, client, participant):
        pid = participant["participantId"]
        mode = participant["modeOrder"][0]
        sid = f"{pid}-{mode}"
        first = client.get(f"/sessions/{sid}/events", params={"since": 0}).json()
        assert first["events"][0]["kind"] == "sessionStarted"
        assert first["next"] == len(first["events"])
        again = client.get(f"/sessions/{sid}/events",
                           params={"since": first["next"]}).json()
        assert again["events"] == []

    def test_offsets_export_parses(self, client, participant):
        from hullspace.geometry import parse_offsets

        pid = participant["participantId"]
        mode = participant["modeOrder"][0]
        sid = f"{pid}-{mode}"
        state = client.get(f"/sessions/{sid}").json()
        if mode == "rem":
            design_id = state["embedding"]["designIds"][0]
        else:
            key = "lastGeneration" if mode == "saem" else "lastShown"
            design_id = state[key][0]["id"]
        text = client.get(f"/sessions/{sid}/designs/{design_id}/offsets").text
        table = parse_offsets(text)
        assert table.n_stations >= 10

    def test_premature_questionnaire_rejected(self, client, participant):
        pid = participant["participantId"]
        answers = {k: "REM" for k in
                   ("Q1.1", "Q1.2", "Q1.3", "Q2.1", "Q2.2", "Q2.3", "Q3", "Q4", "Q5")}
        response = client.post(f"/participants/{pid}/questionnaire",
                               json={"answers": answers})
        assert response.status_code == 400

    def test_bad_action_rejected(self, client, participant):
        pid = participant["participantId"]
        sid = f"{pid}-{participant['modeOrder'][0]}"
        response = client.post(f"/sessions/{sid}/action", json={"verb": "warp"})
        assert response.status_code == 400

    def test_export_endpoint(self, client, participant, tmp_path_factory):
        out = str(tmp_path_factory.mktemp("export"))
        response = client.post("/export", json={"outDir": out})
        assert response.status_code == 200
        manifest = response.json()["manifest"]
        assert participant["participantId"] in manifest["participants"]

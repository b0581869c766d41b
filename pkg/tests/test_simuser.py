import numpy as np
import pytest

from hullspace.engine import ExplorationEngine, ScriptedClock
from hullspace.events import EventLog
from hullspace.metrics import aggregate_history
from hullspace.simuser import Policy, main, parse_policy, run_session
from tests.conftest import small_config


@pytest.fixture(scope="module")
def engine(tmp_path_factory):
    return ExplorationEngine(tmp_path_factory.mktemp("sim"), small_config(),
                             seed=5, clock_factory=lambda: ScriptedClock())


def session_log(engine, session_id) -> EventLog:
    path = engine.sessions_dir / f"{session_id}.jsonl"
    return EventLog.from_jsonl(path.read_text())


class TestPolicies:
    def test_parse(self):
        assert parse_policy("mixed:0.7", 1).alpha == 0.7
        assert parse_policy("noveltySeeker", 2).kind == "noveltySeeker"
        with pytest.raises(ValueError):
            parse_policy("chaotic", 3)

    def test_rationale_tagging(self, engine):
        sid_n = run_session(Policy("noveltySeeker", seed=30), "saem", engine,
                            interactions=16)
        history = aggregate_history(session_log(engine, sid_n))
        assert history.rationale_counts == {"form": 16, "performance": 0, "both": 0}

        sid_p = run_session(Policy("performanceSeeker", seed=31), "saem", engine,
                            interactions=16)
        history = aggregate_history(session_log(engine, sid_p))
        assert history.rationale_counts == {"form": 0, "performance": 16, "both": 0}

    def test_performance_seeker_takes_minimum_shown(self, engine):
        sid = run_session(Policy("performanceSeeker", seed=32), "aem", engine,
                          interactions=16)
        log = session_log(engine, sid)
        shown_cw = {}
        for event in log:
            if event.kind == "generationShown":
                shown_cw[event.payload["interaction"]] = [
                    d["cw"] for d in event.payload["designs"]]
            if event.kind == "selected":
                interaction = event.payload["interaction"]
                assert event.payload["cw"] == min(shown_cw[interaction])
        final_cw = [e.payload["cw"] for e in log if e.kind == "selected"][-1]
        all_shown = [cw for values in shown_cw.values() for cw in values]
        assert final_cw <= np.median(all_shown)

    def test_rem_policy_completes_five_slots(self, engine):
        sid = run_session(Policy("mixed", 0.7, seed=33), "rem", engine, rem_walk=25)
        log = session_log(engine, sid)
        slots = {e.payload["slot"] for e in log if e.kind == "selected"}
        assert slots == {1, 2, 3, 4, 5}
        assert log.events[-1].kind == "terminated"

    def test_log_integrity_like_human_sessions(self, engine):
        sid = run_session(Policy("mixed", 0.5, seed=34), "saem", engine,
                          interactions=16)
        history = aggregate_history(session_log(engine, sid))
        assert history.designs_explored_count == 80
        assert sum(history.rationale_counts.values()) == 16


class TestDeterminism:
    def test_identical_transcripts_for_same_seed(self, tmp_path):
        texts = []
        for attempt in range(2):
            engine = ExplorationEngine(tmp_path / f"run{attempt}", small_config(),
                                       seed=6, clock_factory=lambda: ScriptedClock())
            sid = run_session(Policy("mixed", 0.6, seed=40), "saem", engine,
                              interactions=16)
            texts.append((engine.sessions_dir / f"{sid}.jsonl").read_text())
        assert texts[0] == texts[1]


class TestCli:
    def test_run_command_exports_archive(self, tmp_path):
        import json

        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps({
            "surrogate": {"train_samples": 150, "hyper_subset": 150},
            "rem": {"pool_size": 150, "tsne_iterations": 500},
            "aem": {"steps_per_interaction": 5},
        }))
        out = tmp_path / "archive"
        code = main(["run", "--mode", "saem", "--policy", "performanceSeeker",
                     "--seed", "50", "--out", str(out),
                     "--config", str(config_path),
                     "--data-dir", str(tmp_path / "data")])
        assert code == 0
        assert (out / "manifest.json").exists()
        jsonl = list(out.glob("*-saem.jsonl"))
        assert len(jsonl) == 1
        history = aggregate_history(EventLog.from_jsonl(jsonl[0].read_text()))
        assert history.designs_explored_count == 100  # 20 interactions x 5

"""Session orchestration: participants, mode ordering, persistence, export.

The engine owns the trained surrogate, builds mode sessions, serializes
all mutations per session, and appends every event to a JSONL file as it
happens.  Restarting the engine over the same data directory rebuilds any
session by folding its persisted log, which is exactly the state the live
session had (crash-recovery equivalence).
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .aem import AemSession
from .config import Config
from .events import EventLog
from .metrics import aggregate_history
from .rem import RemSession, build_rem_session
from .saem import SaemSession
from .surrogate import GPRModel, load_model, save_model, train_surrogate_pipeline

MODES = ("rem", "saem", "aem")
MODE_NAMES = ("REM", "SAEM", "AEM")
QUESTION_KEYS = ("Q1.1", "Q1.2", "Q1.3", "Q2.1", "Q2.2", "Q2.3", "Q3", "Q4", "Q5")


class OrderingError(RuntimeError):
    """Mode requested out of the participant's assigned order."""


class QuestionnaireError(ValueError):
    pass


@dataclass
class Participant:
    participant_id: str
    seed: int
    mode_order: tuple[str, str, str]
    completed: set[str] = field(default_factory=set)
    questionnaire: dict | None = None

    def next_mode(self) -> str | None:
        for mode in self.mode_order:
            if mode not in self.completed:
                return mode
        return None


def participant_identity(seed: int) -> tuple[str, tuple[str, str, str]]:
    """Opaque token and uniformly random mode order for a creation seed."""
    rng = np.random.default_rng(seed)
    token = "p" + "".join(f"{b:02x}" for b in rng.integers(0, 256, size=6))
    return token, tuple(rng.permutation(MODES))


def _wall_clock():
    start = time.monotonic()
    return lambda: int((time.monotonic() - start) * 1000)


class ScriptedClock:
    """Deterministic clock for simulated sessions: fixed tick per call."""

    def __init__(self, tick_ms: int = 1000):
        self.now = 0
        self.tick = tick_ms

    def __call__(self) -> int:
        self.now += self.tick
        return self.now


class ExplorationEngine:
    def __init__(self, data_dir, config: Config | None = None, seed: int = 0,
                 clock_factory=None):
        self.config = config or Config()
        self.seed = seed
        self.data_dir = Path(data_dir)
        self.sessions_dir = self.data_dir / "sessions"
        self.sessions_dir.mkdir(parents=True, exist_ok=True)
        self.clock_factory = clock_factory or _wall_clock
        self._participants: dict[str, Participant] = {}
        self._sessions: dict[str, object] = {}
        self._clocks: dict[str, object] = {}
        self._flushed: dict[str, int] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self.surrogate = self._load_or_train_surrogate()
        self._recover_participants()

    # -- surrogate -----------------------------------------------------------

    def _load_or_train_surrogate(self) -> GPRModel:
        cache = self.data_dir / "surrogate.npz"
        meta_path = self.data_dir / "surrogate.json"
        meta = {"samples": self.config.surrogate.train_samples, "seed": self.seed}
        if cache.exists() and meta_path.exists():
            if json.loads(meta_path.read_text()) == meta:
                return load_model(cache, self.config.surrogate)
        model, report = train_surrogate_pipeline(
            self.config.surrogate.train_samples, self.seed,
            self.config.surrogate, self.config.generator, self.config.hydro)
        save_model(model, cache)
        meta_path.write_text(json.dumps(meta))
        (self.data_dir / "surrogate_holdout.csv").write_text(report.to_csv())
        return model

    # -- participants -----------------------------------------------------------

    def create_participant(self, seed: int) -> Participant:
        token, order = participant_identity(seed)
        participant = Participant(token, seed, order)
        with self._registry_lock:
            self._participants[token] = participant
            self._append_registry({"kind": "participantCreated", "participantId": token,
                                   "seed": seed, "modeOrder": list(order)})
        return participant

    def participant(self, participant_id: str) -> Participant:
        try:
            return self._participants[participant_id]
        except KeyError:
            raise KeyError(f"unknown participant: {participant_id}") from None

    def _append_registry(self, record: dict) -> None:
        with (self.data_dir / "participants.jsonl").open("a") as f:
            f.write(json.dumps(record, separators=(",", ":")) + "\n")

    def _recover_participants(self) -> None:
        path = self.data_dir / "participants.jsonl"
        if not path.exists():
            return
        for line in path.read_text().splitlines():
            if not line.strip():
                continue
            record = json.loads(line)
            if record["kind"] == "participantCreated":
                self._participants[record["participantId"]] = Participant(
                    record["participantId"], record["seed"], tuple(record["modeOrder"]))
            elif record["kind"] == "modeCompleted":
                self._participants[record["participantId"]].completed.add(record["mode"])
            elif record["kind"] == "questionnaireSubmitted":
                self._participants[record["participantId"]].questionnaire = record["answers"]

    # -- sessions ------------------------------------------------------------

    def _session_seed(self, participant: Participant, mode: str) -> int:
        return int(np.random.SeedSequence(
            [participant.seed, MODES.index(mode)]).generate_state(1)[0])

    def start_mode(self, participant_id: str, mode: str) -> str:
        participant = self.participant(participant_id)
        if mode not in MODES:
            raise ValueError(f"unknown mode: {mode}")
        expected = participant.next_mode()
        if mode in participant.completed:
            raise OrderingError(f"mode {mode} already completed")
        if mode != expected:
            raise OrderingError(
                f"next mode for this participant is {expected!r}, not {mode!r}")
        session_id = f"{participant_id}-{mode}"
        if session_id not in self._sessions:
            if (self.sessions_dir / f"{session_id}.jsonl").exists():
                self._restore_session(session_id)  # reconnect after a crash
            else:
                self._sessions[session_id] = self._build_session(
                    mode, self._session_seed(participant, mode))
                self._clocks[session_id] = self.clock_factory()
                self._flushed[session_id] = 0
                self._locks[session_id] = threading.Lock()
                self._flush(session_id)
        return session_id

    def _build_session(self, mode: str, seed: int):
        if mode == "rem":
            return build_rem_session(seed, self.surrogate, self.config.rem,
                                     self.config.generator)
        if mode == "saem":
            return SaemSession(seed=seed, surrogate=self.surrogate,
                               config=self.config.saem,
                               generator_config=self.config.generator).start()
        return AemSession(seed=seed, surrogate=self.surrogate,
                          config=self.config.aem,
                          generator_config=self.config.generator).start()

    def session(self, session_id: str):
        if session_id not in self._sessions:
            self._restore_session(session_id)
        return self._sessions[session_id]

    def _restore_session(self, session_id: str) -> None:
        """Rebuild a session from its persisted log (crash recovery)."""
        path = self.sessions_dir / f"{session_id}.jsonl"
        if not path.exists():
            raise KeyError(f"unknown session: {session_id}")
        log = EventLog.from_jsonl(path.read_text())
        mode = log.events[0].payload["mode"]
        seed = log.events[0].payload["seed"]
        if mode == "rem":
            session = build_rem_session(seed, self.surrogate, self.config.rem,
                                        self.config.generator)
            session.log = EventLog()
            session.replay(log)
        elif mode == "saem":
            session = SaemSession(seed=seed, surrogate=self.surrogate,
                                  config=self.config.saem,
                                  generator_config=self.config.generator)
            session.replay(log)
        else:
            session = AemSession(seed=seed, surrogate=self.surrogate,
                                 config=self.config.aem,
                                 generator_config=self.config.generator)
            session.replay(log)
        self._sessions[session_id] = session
        clock = self.clock_factory()
        if len(log):
            base = log.events[-1].timestamp

            def resumed(inner=clock, offset=base):
                return offset + inner()

            self._clocks[session_id] = resumed
        else:
            self._clocks[session_id] = clock
        self._flushed[session_id] = len(log)
        self._locks[session_id] = threading.Lock()

    def _flush(self, session_id: str) -> None:
        session = self._sessions[session_id]
        done = self._flushed[session_id]
        new = session.log.events[done:]
        if not new:
            return
        with (self.sessions_dir / f"{session_id}.jsonl").open("a") as f:
            for event in new:
                f.write(event.to_json() + "\n")
        self._flushed[session_id] = done + len(new)

    # -- actions ---------------------------------------------------------------

    def act(self, session_id: str, verb: str, params: dict | None = None) -> dict:
        """Apply one mode-specific action; mutations are serialized per session."""
        params = params or {}
        session = self.session(session_id)
        lock = self._locks[session_id]
        clock = self._clocks[session_id]
        with lock:
            result = self._dispatch(session_id, session, verb, params, clock)
            self._flush(session_id)
        return result

    def _dispatch(self, session_id: str, session, verb: str, params: dict, clock) -> dict:
        now = clock()
        if isinstance(session, RemSession):
            interaction_seed = None
        else:
            interaction_seed = int(np.random.SeedSequence(
                [session.seed, session.interaction_count + 1]).generate_state(1)[0])

        if isinstance(session, RemSession):
            if verb == "click":
                record = session.click(float(params["u"]), float(params["v"]), now)
                return {"design": _design_payload(record)}
            if verb == "evaluate":
                record = session.evaluate_on_demand(params["designId"], now)
                return {"design": _design_payload(record)}
            if verb == "select":
                session.select_preferred(int(params["slot"]), params["designId"],
                                         params["rationale"], now)
                return {"slots": session.summary()["slots"]}
            if verb == "terminate":
                session.terminate(now)
                self._complete(session_id)
                return {"terminated": True}
        elif isinstance(session, SaemSession):
            if verb == "generation":
                shown = session.next_generation(interaction_seed, now)
                return {"designs": [_design_payload(s.record, feasible=s.feasible)
                                    for s in shown]}
            if verb == "select":
                session.record_selection_and_shrink(params["chosenId"],
                                                    params["rationale"], now)
                return {"interaction": session.interaction_count,
                        "bounds": [session.bounds.lower.tolist(),
                                   session.bounds.upper.tolist()]}
            if verb == "terminate":
                summary = session.terminate(now)
                self._complete(session_id)
                return {"terminated": True, "finalDesignId": summary.final_design_id,
                        "diversity": summary.diversity.sc}
        elif isinstance(session, AemSession):
            if verb == "interaction":
                shown = session.run_interaction(interaction_seed, now)
                return {"designs": [_design_payload(s.record, feasible=s.feasible)
                                    for s in shown],
                        "governing": [session.weights.performance,
                                      session.weights.closeness]}
            if verb == "select":
                session.record_selection_and_weights(
                    params["chosenId"], params["rationale"],
                    params.get("performance"), params.get("closeness"), now)
                return {"interaction": session.interaction_count,
                        "governing": [session.weights.performance,
                                      session.weights.closeness]}
            if verb == "terminate":
                summary = session.terminate(now)
                self._complete(session_id)
                return {"terminated": True, "finalDesignId": summary.final_design_id,
                        "diversity": summary.diversity.sc}
        raise ValueError(f"unknown action {verb!r} for this session mode")

    def _complete(self, session_id: str) -> None:
        participant_id, mode = session_id.rsplit("-", 1)
        participant = self.participant(participant_id)
        participant.completed.add(mode)
        self._append_registry({"kind": "modeCompleted", "participantId": participant_id,
                               "mode": mode})

    # -- questionnaire -----------------------------------------------------------

    def submit_questionnaire(self, participant_id: str, answers: dict) -> None:
        participant = self.participant(participant_id)
        if participant.completed != set(MODES):
            raise QuestionnaireError(
                "questionnaire unlocks only after all three modes are complete")
        missing = [k for k in QUESTION_KEYS if k not in answers]
        if missing:
            raise QuestionnaireError(f"missing answers: {', '.join(missing)}")
        bad = {k: v for k, v in answers.items()
               if k in QUESTION_KEYS and v not in MODE_NAMES}
        if bad:
            raise QuestionnaireError(
                f"answers must name a mode {MODE_NAMES}, got {bad}")
        stored = {k: answers[k] for k in QUESTION_KEYS}
        participant.questionnaire = stored
        self._append_registry({"kind": "questionnaireSubmitted",
                               "participantId": participant_id, "answers": stored})

    # -- export ---------------------------------------------------------------

    def export_telemetry(self, out_dir, participant_id: str | None = None) -> dict:
        """Write JSONL logs plus CSV summaries; bit-stable for identical logs."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        if participant_id is None:
            participants = sorted(self._participants)
        else:
            self.participant(participant_id)
            participants = [participant_id]

        manifest: dict = {"participants": {}}
        for pid in participants:
            participant = self._participants[pid]
            entry = {"modeOrder": list(participant.mode_order), "sessions": []}
            for mode in participant.mode_order:
                path = self.sessions_dir / f"{pid}-{mode}.jsonl"
                if not path.exists():
                    continue
                text = path.read_text()
                (out / f"{pid}-{mode}.jsonl").write_text(text)
                history = aggregate_history(EventLog.from_jsonl(text))
                csv_text = _history_csv(history)
                (out / f"{pid}-{mode}.csv").write_text(csv_text)
                entry["sessions"].append(f"{pid}-{mode}")
            if participant.questionnaire is not None:
                entry["questionnaire"] = participant.questionnaire
            manifest["participants"][pid] = entry
        (out / "manifest.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        return manifest


def _design_payload(record, feasible: bool | None = None) -> dict:
    payload = {
        "id": record.id,
        "latent": record.latent.tolist(),
        "cw": record.cw,
        "cwSource": record.cw_source,
        "dimensions": {
            "lengthWaterline": record.dimensions.length_waterline,
            "beamWaterline": record.dimensions.beam_waterline,
            "draft": record.dimensions.draft,
            "displacementVolume": record.dimensions.displacement_volume,
        },
        "constraintsSatisfied": record.constraints.all_satisfied,
    }
    if feasible is not None:
        payload["feasible"] = feasible
    return payload


def _history_csv(history) -> str:
    import csv as _csv
    import io

    out = io.StringIO()
    writer = _csv.writer(out)
    writer.writerow(["mode", "total_time_s", "designs_explored", "selections",
                     "rationale_form", "rationale_performance", "rationale_both",
                     "explored_cw_count", "preferred_cw_median"])
    preferred = (repr(float(np.median(history.preferred_cw)))
                 if history.preferred_cw else "")
    writer.writerow([
        history.mode, repr(history.total_time), history.designs_explored_count,
        sum(history.rationale_counts.values()),
        history.rationale_counts["form"], history.rationale_counts["performance"],
        history.rationale_counts["both"], len(history.explored_cw), preferred,
    ])
    return out.getvalue()

"""Scripted user policies that drive whole sessions headlessly.

The policies are deliberate caricatures: a novelty seeker chasing latent
distance, a performance seeker chasing the lowest predicted coefficient,
and a weighted mix.  They exist to exercise the full interaction loops
and check directional claims about the three modes, not to model people.
"""

from __future__ import annotations

import argparse
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import load_config
from .engine import ExplorationEngine, ScriptedClock
from .rem import RemSession

POLICY_KINDS = ("noveltySeeker", "performanceSeeker", "mixed")


@dataclass
class Policy:
    kind: str
    alpha: float = 0.5  # mixed blend: weight on novelty; also REM evaluate rate
    seed: int = 0

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"policy kind must be one of {POLICY_KINDS}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")

    @property
    def rationale(self) -> str:
        return {"noveltySeeker": "form", "performanceSeeker": "performance",
                "mixed": "both"}[self.kind]

    @property
    def evaluate_rate(self) -> float:
        return {"noveltySeeker": 0.0, "performanceSeeker": 1.0,
                "mixed": self.alpha}[self.kind]


def parse_policy(text: str, seed: int) -> Policy:
    if ":" in text:
        kind, alpha = text.split(":", 1)
        return Policy(kind, float(alpha), seed)
    return Policy(text, seed=seed)


def _novelty_scores(latents: np.ndarray, previous: list[np.ndarray]) -> np.ndarray:
    if not previous:
        centroid = latents.mean(axis=0)
        return np.linalg.norm(latents - centroid, axis=1)
    prev = np.array(previous)
    return np.min(np.linalg.norm(latents[:, None, :] - prev[None, :, :], axis=2), axis=1)


def _pick(policy: Policy, latents: np.ndarray, cws: np.ndarray,
          previous: list[np.ndarray]) -> int:
    """Index of the design the policy selects among those shown.

    Unknown performance values (never evaluated) enter as NaN: worst case
    for the performance seeker, neutral for the mixed policy.
    """
    novelty = _novelty_scores(latents, previous)
    if policy.kind == "noveltySeeker":
        return int(np.argmax(novelty))
    known = np.isfinite(cws)
    if policy.kind == "performanceSeeker":
        return int(np.argmin(np.where(known, cws, np.inf)))

    def normalize(v):
        span = v.max() - v.min()
        return (v - v.min()) / span if span > 0 else np.full_like(v, 0.5)

    perf = np.full(len(cws), 0.5)
    if known.any():
        perf[known] = 1.0 - normalize(cws[known])
    score = policy.alpha * normalize(novelty) + (1.0 - policy.alpha) * perf
    return int(np.argmax(score))


def run_session(policy: Policy, mode: str, engine: ExplorationEngine,
                participant_id: str | None = None,
                interactions: int = 20, rem_walk: int = 40) -> str:
    """Drive one full session through the engine's action interface.

    The interactive modes run a fixed number of interactions; the random
    mode walks the embedding with seeded jumps, evaluates on demand at the
    policy's rate, fills all five slots, and terminates.
    """
    if participant_id is None:
        seed = _seed_with_first_mode(policy.seed, mode)
        participant_id = engine.create_participant(seed=seed).participant_id
    session_id = engine.start_mode(participant_id, mode)
    if mode == "rem":
        _run_rem(policy, engine, session_id, rem_walk)
    else:
        _run_interactive(policy, engine, session_id, mode, interactions)
    return session_id


def _seed_with_first_mode(seed: int, mode: str) -> int:
    """First probe seed at or after ``seed`` whose assigned order opens with ``mode``.

    Mirrors the engine's order assignment so a standalone run can start
    straight in the requested mode without faking earlier sessions.
    """
    from .engine import participant_identity

    probe = seed
    while True:
        if participant_identity(probe)[1][0] == mode:
            return probe
        probe += 1_000_003


def _run_rem(policy: Policy, engine: ExplorationEngine, session_id: str,
             walk: int) -> None:
    rng = np.random.default_rng(policy.seed)
    session = engine.session(session_id)
    assert isinstance(session, RemSession)
    pts = session.embedding.points
    lo, hi = pts.min(axis=0), pts.max(axis=0)

    seen: list[str] = []
    clicks = 0
    while clicks < walk or len(seen) < session.n_slots:
        u, v = rng.uniform(lo, hi)
        result = engine.act(session_id, "click", {"u": float(u), "v": float(v)})
        design = result["design"]
        if design["id"] not in seen:
            seen.append(design["id"])
        if rng.uniform() < policy.evaluate_rate:
            engine.act(session_id, "evaluate", {"designId": design["id"]})
        clicks += 1

    latents = np.array([session.record(d).latent for d in seen])
    cws = np.array([session.record(d).cw if session.record(d).cw is not None
                    else np.nan for d in seen])
    chosen: list[np.ndarray] = []
    for slot in range(1, session.n_slots + 1):
        idx = _pick(policy, latents, cws, chosen)
        engine.act(session_id, "select", {"slot": slot, "designId": seen[idx],
                                          "rationale": policy.rationale})
        chosen.append(latents[idx])
        latents = np.delete(latents, idx, axis=0)
        cws = np.delete(cws, idx)
        seen.pop(idx)
    engine.act(session_id, "terminate")


def _run_interactive(policy: Policy, engine: ExplorationEngine, session_id: str,
                     mode: str, interactions: int) -> None:
    verb = "generation" if mode == "saem" else "interaction"
    chosen: list[np.ndarray] = []
    for _ in range(interactions):
        shown = engine.act(session_id, verb)["designs"]
        latents = np.array([d["latent"] for d in shown])
        cws = np.array([d["cw"] for d in shown], dtype=float)
        idx = _pick(policy, latents, cws, chosen)
        params = {"chosenId": shown[idx]["id"], "rationale": policy.rationale}
        engine.act(session_id, "select", params)
        chosen.append(latents[idx])
    engine.act(session_id, "terminate")


def main(argv=None):
    parser = argparse.ArgumentParser(prog="sim", description="scripted exploration sessions")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one scripted session and export telemetry")
    run.add_argument("--mode", required=True, choices=("rem", "saem", "aem"))
    run.add_argument("--policy", required=True,
                     help="noveltySeeker | performanceSeeker | mixed:<alpha>")
    run.add_argument("--seed", type=int, required=True)
    run.add_argument("--out", required=True)
    run.add_argument("--config", default=None, help="JSON config file")
    run.add_argument("--data-dir", default=None,
                     help="engine data directory (default: temporary)")
    args = parser.parse_args(argv)

    config = load_config(args.config)
    data_dir = args.data_dir or tempfile.mkdtemp(prefix="hullspace-sim-")
    engine = ExplorationEngine(Path(data_dir), config, seed=args.seed,
                               clock_factory=lambda: ScriptedClock())
    policy = parse_policy(args.policy, args.seed)
    session_id = run_session(policy, args.mode, engine)
    engine.export_telemetry(args.out)
    print(f"completed {session_id}; telemetry in {args.out}")
    return 0


if __name__ == "__main__":
    main()

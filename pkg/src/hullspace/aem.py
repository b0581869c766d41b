"""Automated exploration: population search over a preference objective.

A fixed-size population moves toward the current best solution and away
from the worst (no tuning parameters beyond the population size), greedy
per-solution replacement.  The objective blends the surrogate-predicted
wave resistance with closeness to the user's latest pick, both normalized
to comparable scales; the user retunes the two weights live between
interactions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import LATENT_DIM, AemConfig, GeneratorConfig
from .events import EventLog, check_rationale
from .generator import DesignRecord, constraint_values_batch, describe_design
from .geometry import BEAM_BOUNDS, DISPLACEMENT_BOUNDS, DRAFT_BOUNDS, LENGTH_BOUNDS
from .metrics import sparseness_at_centre
from .saem import InteractionLimitError, SessionSummary
from .surrogate import GPRModel

ROOT_DIAGONAL = float(np.sqrt(LATENT_DIM))

_BANDS = np.array([DISPLACEMENT_BOUNDS, LENGTH_BOUNDS, BEAM_BOUNDS, DRAFT_BOUNDS])


@dataclass
class PreferenceWeights:
    """Objective weights: performance term and closeness-to-preferred term."""

    performance: float  # gamma_1
    closeness: float    # gamma_2

    def __post_init__(self):
        if not (0.0 <= self.performance <= 1.0 and 0.0 <= self.closeness <= 1.0):
            raise ValueError("both weights must lie in [0, 1]")


def blend_objective(cw_normalized: np.ndarray, distances: np.ndarray,
                    weights: PreferenceWeights) -> np.ndarray:
    """Weighted sum of normalized performance and normalized distance."""
    return weights.performance * np.asarray(cw_normalized) \
        + weights.closeness * np.asarray(distances)


def constraint_penalties(latents: np.ndarray,
                         config: GeneratorConfig | None = None) -> np.ndarray:
    """Total band-normalized constraint violation per latent."""
    values = constraint_values_batch(latents, config)
    lo, hi = _BANDS[:, 0], _BANDS[:, 1]
    over = np.maximum(values - hi, 0.0)
    under = np.maximum(lo - values, 0.0)
    return np.sum((over + under) / (hi - lo), axis=1)


def jaya_step(solutions: np.ndarray, objectives: np.ndarray, objective_fn,
              seed: int, lower: np.ndarray, upper: np.ndarray
              ) -> tuple[np.ndarray, np.ndarray]:
    """One population move: toward the best, away from the worst, greedy keep.

    Candidate coordinates are ``x + r1 (best - |x|) - r2 (worst - |x|)``
    with fresh uniform draws per dimension each step, shared across the
    population (the original indexing of the algorithm), clamped to the
    bounds.  Deterministic given the seed.
    """
    rng = np.random.default_rng(seed)
    best = solutions[int(np.argmin(objectives))]
    worst = solutions[int(np.argmax(objectives))]
    r1 = rng.uniform(size=solutions.shape[1])
    r2 = rng.uniform(size=solutions.shape[1])
    magnitude = np.abs(solutions)
    candidates = solutions + r1 * (best - magnitude) - r2 * (worst - magnitude)
    np.clip(candidates, lower, upper, out=candidates)

    candidate_f = np.asarray(objective_fn(candidates), dtype=float)
    better = candidate_f < objectives
    new_solutions = np.where(better[:, None], candidates, solutions)
    new_objectives = np.where(better, candidate_f, objectives)
    return new_solutions, new_objectives


@dataclass
class AemShown:
    record: DesignRecord
    feasible: bool


@dataclass
class AemSession:
    seed: int
    surrogate: GPRModel | None = None
    config: AemConfig = field(default_factory=AemConfig)
    generator_config: GeneratorConfig = field(default_factory=GeneratorConfig)
    solutions: np.ndarray | None = None
    objectives: np.ndarray | None = None
    feasible: np.ndarray | None = None
    weights: PreferenceWeights | None = None
    preferred: DesignRecord | None = None
    weight_history: list[tuple[int, float, float]] = field(default_factory=list)
    interaction_count: int = 0
    selected_history: list[DesignRecord] = field(default_factory=list)
    rationales: list[str] = field(default_factory=list)
    last_shown: list[AemShown] = field(default_factory=list)
    log: EventLog = field(default_factory=EventLog)
    terminated: bool = False
    _cw_norm: tuple[float, float] = (0.0, 1.0)
    _steps_this_interaction: int = 0

    def start(self) -> "AemSession":
        """Random initial population; the first interaction ignores closeness."""
        rng = np.random.default_rng(self.seed)
        self.solutions = rng.uniform(size=(self.config.population_size, LATENT_DIM))
        self.weights = PreferenceWeights(self.config.default_weights[0], 0.0)
        self._refresh_objectives()
        self.log.append("sessionStarted", {
            "mode": "aem",
            "seed": self.seed,
            "populationSize": self.config.population_size,
            "solutions": self.solutions.tolist(),
            "objectives": self.objectives.tolist(),
            "feasible": self.feasible.tolist(),
            "cwNorm": list(self._cw_norm),
            "governing": [self.weights.performance, self.weights.closeness],
        }, 0)
        return self

    # -- objective ---------------------------------------------------------

    def objective_values(self, latents: np.ndarray) -> np.ndarray:
        """Preference objective for a batch of latents under current state.

        The performance term is the surrogate mean min-max normalized over
        the population snapshot taken when the weights were last set; the
        closeness term is latent distance to the preferred design over the
        root-box diagonal.  Constraint violations add their normalized
        magnitude on top.
        """
        if self.weights.closeness > 0.0 and self.preferred is None:
            raise ValueError("closeness weight is positive but no design is preferred yet")
        latents = np.atleast_2d(latents)
        cw, _ = self.surrogate.predict_batch(latents)
        lo, hi = self._cw_norm
        span = hi - lo
        cw_norm = (cw - lo) / span if span > 1e-300 else np.zeros_like(cw)
        if self.weights.closeness > 0.0:
            dist = np.linalg.norm(latents - self.preferred.latent, axis=1) / ROOT_DIAGONAL
        else:
            dist = np.zeros(latents.shape[0])
        return blend_objective(cw_norm, dist, self.weights) \
            + constraint_penalties(latents, self.generator_config)

    def _refresh_objectives(self) -> None:
        """Re-evaluate the population after weights or the preferred design change.

        The performance normalization is frozen against the population at
        this moment so the objective stays fixed, and best-objective
        monotone, until the next change.
        """
        cw, _ = self.surrogate.predict_batch(self.solutions)
        lo, hi = float(np.min(cw)), float(np.max(cw))
        self._cw_norm = (lo, hi if hi > lo else lo + 1.0)
        self.objectives = self.objective_values(self.solutions)
        self.feasible = constraint_penalties(self.solutions, self.generator_config) == 0.0

    # -- optimization ------------------------------------------------------

    def step(self, seed: int) -> None:
        """One population update under the current objective."""
        self.solutions, self.objectives = jaya_step(
            self.solutions, self.objectives, self.objective_values, seed,
            np.zeros(LATENT_DIM), np.ones(LATENT_DIM))
        self.feasible = constraint_penalties(self.solutions, self.generator_config) == 0.0
        self._steps_this_interaction += 1

    def run_interaction(self, seed: int, timestamp: int) -> list[AemShown]:
        """Run the per-interaction step budget, then present the leaders."""
        if self.interaction_count >= self.config.max_interactions:
            raise InteractionLimitError(
                f"interaction cap of {self.config.max_interactions} reached")
        if self.config.reinit_each_interaction and self.interaction_count > 0:
            rng = np.random.default_rng(np.random.SeedSequence([self.seed, seed]).entropy)
            self.solutions = rng.uniform(size=(self.config.population_size, LATENT_DIM))
            self._refresh_objectives()
        step_seeds = np.random.SeedSequence(seed).generate_state(
            self.config.steps_per_interaction)
        for s in step_seeds:
            self.step(int(s))
        return self.present_top(timestamp, seed=seed)

    def present_top(self, timestamp: int, seed: int | None = None) -> list[AemShown]:
        """The five lowest-objective feasible solutions, performance visible.

        Falls back to the lowest-objective infeasible solutions, flagged,
        when fewer than five are feasible.
        """
        if self._steps_this_interaction < 1:
            raise RuntimeError("run at least one optimization step before presenting")
        order = np.argsort(self.objectives, kind="stable")
        ranked = [int(i) for i in order if self.feasible[i]]
        ranked += [int(i) for i in order if not self.feasible[i]]
        picks = ranked[:5]

        interaction = self.interaction_count + 1
        shown: list[AemShown] = []
        for k, idx in enumerate(picks):
            record = describe_design(f"a{interaction:02d}-{k}", self.solutions[idx],
                                     self.generator_config)
            record = record.with_cw(self.surrogate.predict(record.latent).mean, "surrogate")
            shown.append(AemShown(record, bool(self.feasible[idx])))
        self.last_shown = shown

        self.log.append("generationShown", {
            "interaction": interaction,
            "seed": seed,
            "steps": self._steps_this_interaction,
            "solutions": self.solutions.tolist(),
            "objectives": self.objectives.tolist(),
            "feasible": self.feasible.tolist(),
            "cwNorm": list(self._cw_norm),
            "designs": [
                {"id": s.record.id, "latent": s.record.latent.tolist(),
                 "cw": s.record.cw, "feasible": s.feasible}
                for s in shown
            ],
        }, timestamp)
        return shown

    # -- selection and weights ----------------------------------------------

    def record_selection_and_weights(self, chosen_id: str, rationale: str,
                                     performance: float | None = None,
                                     closeness: float | None = None,
                                     timestamp: int = 0) -> None:
        """Store the pick, log the weights that governed this interaction,
        and install the user's (or default) weights for the next one."""
        check_rationale(rationale)
        if self.interaction_count >= self.config.max_interactions:
            raise InteractionLimitError(
                f"interaction cap of {self.config.max_interactions} reached")
        by_id = {s.record.id: s.record for s in self.last_shown}
        if chosen_id not in by_id:
            raise KeyError(f"{chosen_id} is not among the presented designs")
        chosen = by_id[chosen_id]

        interaction = self.interaction_count + 1
        governed = (self.weights.performance, self.weights.closeness)
        if performance is None:
            performance = self.config.default_weights[0]
        if closeness is None:
            closeness = self.config.default_weights[1]
        next_weights = PreferenceWeights(performance, closeness)

        self.log.append("selected", {
            "interaction": interaction,
            "chosenId": chosen_id,
            "latent": chosen.latent.tolist(),
            "cw": chosen.cw,
            "rationale": rationale,
        }, timestamp)
        self._apply_selection(chosen, rationale, governed, next_weights)
        self.log.append("weightsChanged", {
            "interaction": interaction,
            "governing": list(governed),
            "next": [next_weights.performance, next_weights.closeness],
            "objectives": self.objectives.tolist(),
            "feasible": self.feasible.tolist(),
            "cwNorm": list(self._cw_norm),
        }, timestamp)

    def _apply_selection(self, chosen: DesignRecord, rationale: str,
                         governed: tuple[float, float],
                         next_weights: PreferenceWeights) -> None:
        self.selected_history.append(chosen)
        self.rationales.append(rationale)
        self.weight_history.append((self.interaction_count + 1, *governed))
        self.interaction_count += 1
        self.preferred = chosen
        self.weights = next_weights
        self._steps_this_interaction = 0
        self._refresh_objectives()

    # -- termination ----------------------------------------------------------

    def terminate(self, timestamp: int) -> SessionSummary:
        if self.interaction_count < self.config.min_interactions:
            raise InteractionLimitError(
                f"termination needs at least {self.config.min_interactions} "
                f"interactions, only {self.interaction_count} done")
        self.terminated = True
        summary = self.summary_report()
        self.log.append("terminated", {
            "interactions": self.interaction_count,
            "finalDesignId": summary.final_design_id,
            "diversity": summary.diversity.sc,
        }, timestamp)
        return summary

    def summary_report(self) -> SessionSummary:
        latents = np.array([r.latent for r in self.selected_history])
        return SessionSummary(
            mode="aem",
            interactions=self.interaction_count,
            final_design_id=self.selected_history[-1].id,
            diversity=sparseness_at_centre(latents),
            selected_ids=[r.id for r in self.selected_history],
            selected_cw=[r.cw for r in self.selected_history],
        )

    # -- event folding -----------------------------------------------------------

    def replay(self, log: EventLog) -> None:
        """Rebuild state by folding a persisted log; no optimizer re-runs."""
        pending_selection = None
        for event in log:
            p = event.payload
            if event.kind == "sessionStarted":
                self.solutions = np.array(p["solutions"])
                self.objectives = np.array(p["objectives"])
                self.feasible = np.array(p["feasible"], dtype=bool)
                self._cw_norm = tuple(p["cwNorm"])
                self.weights = PreferenceWeights(*p["governing"])
            elif event.kind == "generationShown":
                self.solutions = np.array(p["solutions"])
                self.objectives = np.array(p["objectives"])
                self.feasible = np.array(p["feasible"], dtype=bool)
                self._cw_norm = tuple(p["cwNorm"])
                self._steps_this_interaction = p["steps"]
                self.last_shown = []
                for item in p["designs"]:
                    record = describe_design(item["id"], np.array(item["latent"]),
                                             self.generator_config)
                    record = record.with_cw(item["cw"], "surrogate")
                    self.last_shown.append(AemShown(record, item["feasible"]))
            elif event.kind == "selected":
                pending_selection = p
            elif event.kind == "weightsChanged":
                sel = pending_selection
                chosen = next(s.record for s in self.last_shown
                              if s.record.id == sel["chosenId"])
                self.selected_history.append(chosen)
                self.rationales.append(sel["rationale"])
                self.weight_history.append((p["interaction"], *p["governing"]))
                self.interaction_count += 1
                self.preferred = chosen
                self.weights = PreferenceWeights(*p["next"])
                self._steps_this_interaction = 0
                self.objectives = np.array(p["objectives"])
                self.feasible = np.array(p["feasible"], dtype=bool)
                self._cw_norm = tuple(p["cwNorm"])
            elif event.kind == "terminated":
                self.terminated = True
        self.log = log

    def summary(self) -> dict:
        return {
            "mode": "aem",
            "interactions": self.interaction_count,
            "governing": [self.weights.performance, self.weights.closeness],
            "weightHistory": [list(w) for w in self.weight_history],
            "preferred": self.preferred.id if self.preferred else None,
            "selected": [r.id for r in self.selected_history],
            "selectedCw": [r.cw for r in self.selected_history],
            "population": self.solutions.tolist(),
            "objectives": self.objectives.tolist(),
            "terminated": self.terminated,
            "events": len(self.log),
        }

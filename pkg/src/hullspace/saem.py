"""Semi-automated exploration: bounds shrink around what the user picks.

Each interaction shows five space-filling designs from the current
bounds, performance visible.  The chosen design becomes the new bounds
centre and every dimension contracts by a fixed factor (clipped to stay
nested), so successive generations concentrate where the user is
steering while the optimiser keeps the samples spread out.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import GeneratorConfig, SaemConfig
from .events import EventLog, check_rationale
from .generator import (
    DesignRecord,
    DesignSpaceBounds,
    describe_design,
    uniform_sample,
)
from .metrics import DiversityReport, sparseness_at_centre
from .surrogate import GPRModel


class ShrinkStallError(RuntimeError):
    """No feasible design could be generated inside the shrunken bounds."""


class InteractionLimitError(RuntimeError):
    pass


@dataclass
class ShownDesign:
    record: DesignRecord
    feasible: bool
    projected: bool  # replaced by a nearest-feasible projection after retries


@dataclass
class SessionSummary:
    mode: str
    interactions: int
    final_design_id: str
    diversity: DiversityReport
    selected_ids: list[str]
    selected_cw: list[float]


def shrink_bounds(bounds: DesignSpaceBounds, centre: np.ndarray,
                  factor: float) -> DesignSpaceBounds:
    """Contract every dimension by ``factor`` about ``centre``, clipped.

    Clipping slides the interval flush against the old bound without
    re-expanding, so the new box is always nested and always contains the
    centre.
    """
    width = bounds.width * factor
    # Shift-then-clamp keeps nesting exact in floating point: both ends are
    # clamped to the parent box, trimming at most a rounding ulp of width.
    lo = np.maximum(bounds.lower, np.minimum(centre - 0.5 * width,
                                             bounds.upper - width))
    hi = np.minimum(lo + width, bounds.upper)
    return DesignSpaceBounds(lo, hi)


@dataclass
class SaemSession:
    seed: int
    surrogate: GPRModel | None = None
    config: SaemConfig = field(default_factory=SaemConfig)
    generator_config: GeneratorConfig = field(default_factory=GeneratorConfig)
    bounds: DesignSpaceBounds = field(default_factory=DesignSpaceBounds.root)
    interaction_count: int = 0
    selected_history: list[DesignRecord] = field(default_factory=list)
    rationales: list[str] = field(default_factory=list)
    last_generation: list[ShownDesign] = field(default_factory=list)
    log: EventLog = field(default_factory=EventLog)
    terminated: bool = False

    def start(self) -> "SaemSession":
        self.log.append("sessionStarted", {"mode": "saem", "seed": self.seed,
                                           "shrinkFactor": self.config.shrink_factor}, 0)
        return self

    # -- generation --------------------------------------------------------

    def next_generation(self, seed: int, timestamp: int) -> list[ShownDesign]:
        """Five designs from the current bounds, surrogate performance attached."""
        if self.interaction_count >= self.config.max_interactions:
            raise InteractionLimitError(
                f"interaction cap of {self.config.max_interactions} reached"
            )
        cfg = self.config
        rng = np.random.default_rng(seed)
        latents = uniform_sample(self.bounds, cfg.designs_per_interaction, seed)

        shown: list[ShownDesign] = []
        interaction = self.interaction_count + 1
        for k, latent in enumerate(latents):
            record = describe_design(f"s{interaction:02d}-{k}", latent, self.generator_config)
            projected = False
            retries = 0
            while not record.constraints.all_satisfied and retries < cfg.feasibility_retries:
                latent = rng.uniform(self.bounds.lower, self.bounds.upper)
                record = describe_design(record.id, latent, self.generator_config)
                retries += 1
            if not record.constraints.all_satisfied:
                record, projected = self._project_toward_centre(record), True
            if self.surrogate is not None:
                record = record.with_cw(self.surrogate.predict(record.latent).mean, "surrogate")
            shown.append(ShownDesign(record, record.constraints.all_satisfied, projected))

        if not any(s.feasible for s in shown):
            raise ShrinkStallError(
                "no feasible design found inside the current bounds after "
                f"{cfg.feasibility_retries} retries per slot; reset the bounds"
            )

        payload = {
            "interaction": interaction,
            "seed": seed,
            "boundsLower": self.bounds.lower.tolist(),
            "boundsUpper": self.bounds.upper.tolist(),
            "designs": [
                {
                    "id": s.record.id,
                    "latent": s.record.latent.tolist(),
                    "cw": s.record.cw,
                    "feasible": s.feasible,
                    "projected": s.projected,
                }
                for s in shown
            ],
        }
        self.last_generation = shown
        self.log.append("generationShown", payload, timestamp)
        return shown

    def _project_toward_centre(self, record: DesignRecord) -> DesignRecord:
        """Walk the latent toward the bounds centre until feasible.

        The path stays inside the (convex) bounds; if nothing on it is
        feasible the original record is kept, flagged infeasible.
        """
        centre = 0.5 * (self.bounds.lower + self.bounds.upper)
        for step in np.linspace(0.125, 1.0, 8):
            candidate = describe_design(
                record.id, record.latent + step * (centre - record.latent),
                self.generator_config,
            )
            if candidate.constraints.all_satisfied:
                return candidate
        return record

    # -- selection and shrink ------------------------------------------------

    def record_selection_and_shrink(self, chosen_id: str, rationale: str,
                                    timestamp: int) -> DesignSpaceBounds:
        check_rationale(rationale)
        if self.interaction_count >= self.config.max_interactions:
            raise InteractionLimitError(
                f"interaction cap of {self.config.max_interactions} reached"
            )
        by_id = {s.record.id: s.record for s in self.last_generation}
        if chosen_id not in by_id:
            raise KeyError(f"{chosen_id} is not among the last generation")
        chosen = by_id[chosen_id]

        payload = {
            "interaction": self.interaction_count + 1,
            "chosenId": chosen_id,
            "latent": chosen.latent.tolist(),
            "cw": chosen.cw,
            "rationale": rationale,
        }
        self.log.append("selected", payload, timestamp)

        new_bounds = shrink_bounds(self.bounds, chosen.latent, self.config.shrink_factor)
        self._apply_shrink(chosen, rationale, new_bounds)
        self.log.append("boundsShrunk", {
            "lower": new_bounds.lower.tolist(),
            "upper": new_bounds.upper.tolist(),
        }, timestamp)
        return new_bounds

    def _apply_shrink(self, chosen: DesignRecord, rationale: str,
                      new_bounds: DesignSpaceBounds) -> None:
        self.selected_history.append(chosen)
        self.rationales.append(rationale)
        self.bounds = new_bounds
        self.interaction_count += 1

    # -- termination ---------------------------------------------------------

    def terminate(self, timestamp: int) -> SessionSummary:
        if self.interaction_count < self.config.min_interactions:
            raise InteractionLimitError(
                f"termination needs at least {self.config.min_interactions} "
                f"interactions, only {self.interaction_count} done"
            )
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
            mode="saem",
            interactions=self.interaction_count,
            final_design_id=self.selected_history[-1].id,
            diversity=sparseness_at_centre(latents),
            selected_ids=[r.id for r in self.selected_history],
            selected_cw=[r.cw for r in self.selected_history],
        )

    # -- event folding ---------------------------------------------------------

    def replay(self, log: EventLog) -> None:
        """Rebuild state by folding a persisted log (no user re-simulation)."""
        pending: list[ShownDesign] = []
        for event in log:
            if event.kind == "generationShown":
                pending = []
                for item in event.payload["designs"]:
                    record = describe_design(item["id"], np.array(item["latent"]),
                                             self.generator_config)
                    if item["cw"] is not None:
                        record = record.with_cw(item["cw"], "surrogate")
                    pending.append(ShownDesign(record, item["feasible"], item["projected"]))
                self.last_generation = pending
            elif event.kind == "selected":
                self._pending_selection = event.payload
            elif event.kind == "boundsShrunk":
                sel = self._pending_selection
                chosen = next(s.record for s in self.last_generation
                              if s.record.id == sel["chosenId"])
                self._apply_shrink(chosen, sel["rationale"],
                                   DesignSpaceBounds(np.array(event.payload["lower"]),
                                                     np.array(event.payload["upper"])))
            elif event.kind == "terminated":
                self.terminated = True
        self.log = log

    def summary(self) -> dict:
        return {
            "mode": "saem",
            "interactions": self.interaction_count,
            "boundsLower": self.bounds.lower.tolist(),
            "boundsUpper": self.bounds.upper.tolist(),
            "selected": [r.id for r in self.selected_history],
            "selectedCw": [r.cw for r in self.selected_history],
            "rationales": list(self.rationales),
            "terminated": self.terminated,
            "events": len(self.log),
        }


def export_transcript(session: SaemSession) -> str:
    """Interaction transcript as JSONL rows, one per completed interaction."""
    import json

    shown_by_interaction: dict[int, dict] = {}
    rows = []
    for event in session.log:
        if event.kind == "generationShown":
            shown_by_interaction[event.payload["interaction"]] = event.payload
        elif event.kind == "selected":
            gen = shown_by_interaction[event.payload["interaction"]]
            rows.append(json.dumps({
                "interaction": event.payload["interaction"],
                "boundsBefore": [gen["boundsLower"], gen["boundsUpper"]],
                "shownIds": [d["id"] for d in gen["designs"]],
                "chosenId": event.payload["chosenId"],
                "rationale": event.payload["rationale"],
                "timestamp": event.timestamp,
            }, separators=(",", ":")))
    return "".join(r + "\n" for r in rows)

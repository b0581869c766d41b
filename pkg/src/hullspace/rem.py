"""Random exploration over a constrained design pool.

The pool is rejection-sampled from the root box, projected to 2-D with
t-SNE (fixed-seed, so sessions are reproducible), and bounded by its
convex hull.  Users wander the map, inspect designs, evaluate the
performance coefficient on demand (it is never shown unrequested), and
fill five preferred-design slots, each selection tagged with what drove
it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.manifold import TSNE

from .config import GeneratorConfig, RemConfig
from .events import EventLog, check_rationale
from .generator import DesignRecord, sample_constrained
from .surrogate import GPRModel


class EmbeddingError(ValueError):
    pass


class IncompleteSelectionError(RuntimeError):
    pass


@dataclass
class EmbeddingMap:
    design_ids: list[str]
    points: np.ndarray          # (n, 2)
    hull_polygon: np.ndarray    # (m, 2), counterclockwise
    hull_degenerate: bool = False

    def to_csv(self) -> str:
        lines = ["designId,u,v"]
        for design_id, (u, v) in zip(self.design_ids, self.points):
            lines.append(f"{design_id},{u!r},{v!r}")
        return "\n".join(lines) + "\n"


def convex_hull(points: np.ndarray) -> tuple[np.ndarray, bool]:
    """Counterclockwise convex hull by monotone chain.

    Collinear boundary points are dropped.  Fewer than 3 distinct points,
    or an all-collinear set, returns the degenerate extreme segment with
    the flag set.
    """
    pts = np.unique(np.asarray(points, dtype=float), axis=0)  # sorted by (x, y)
    if pts.shape[0] < 3:
        return pts, True

    def half(seq):
        chain: list[np.ndarray] = []
        for p in seq:
            while len(chain) > 1:
                a, b = chain[-2], chain[-1]
                if (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1]) <= 0.0:
                    chain.pop()
                else:
                    break
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(pts[::-1])
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        return np.array([pts[0], pts[-1]]), True
    return np.array(hull), False


def embed_2d(latents: np.ndarray, seed: int,
             config: RemConfig | None = None) -> np.ndarray:
    """Deterministic t-SNE projection of latent vectors to the plane."""
    cfg = config or RemConfig()
    latents = np.asarray(latents, dtype=float)
    n = latents.shape[0]
    if n < 3:
        raise EmbeddingError("need at least 3 designs to build an embedding")
    perplexity = min(cfg.perplexity, (n - 1) / 3.0)
    tsne = TSNE(
        n_components=2,
        perplexity=perplexity,
        max_iter=cfg.tsne_iterations,
        init="pca",
        random_state=seed,
        n_jobs=1,
    )
    return tsne.fit_transform(latents)


def build_embedding(designs: list[DesignRecord], seed: int,
                    config: RemConfig | None = None) -> EmbeddingMap:
    points = embed_2d(np.array([d.latent for d in designs]), seed, config)
    polygon, degenerate = convex_hull(points)
    return EmbeddingMap([d.id for d in designs], points, polygon, degenerate)


def nearest_design(embedding: EmbeddingMap, u: float, v: float) -> str:
    """Id of the embedded design closest to (u, v); ties go to the lowest id."""
    d2 = (embedding.points[:, 0] - u) ** 2 + (embedding.points[:, 1] - v) ** 2
    order = np.lexsort((embedding.design_ids, d2))
    return embedding.design_ids[order[0]]


@dataclass
class PreferredSlot:
    design_id: str
    rationale: str


@dataclass
class RemSession:
    """One user's random-exploration session over a fixed pool."""

    seed: int
    pool: list[DesignRecord]
    embedding: EmbeddingMap
    surrogate: GPRModel | None = None
    slots: dict[int, PreferredSlot] = field(default_factory=dict)
    log: EventLog = field(default_factory=EventLog)
    model_calls: int = 0
    terminated: bool = False
    n_slots: int = 5

    def __post_init__(self):
        self._by_id = {r.id: i for i, r in enumerate(self.pool)}

    # -- queries ---------------------------------------------------------

    def record(self, design_id: str) -> DesignRecord:
        try:
            return self.pool[self._by_id[design_id]]
        except KeyError:
            raise KeyError(f"unknown design id: {design_id}") from None

    def click(self, u: float, v: float, timestamp: int) -> DesignRecord:
        """Resolve the nearest design to the click and mark it viewed."""
        design_id = nearest_design(self.embedding, u, v)
        self.log.append("viewed", {"designId": design_id, "u": u, "v": v}, timestamp)
        return self.record(design_id)

    # -- actions ---------------------------------------------------------

    def evaluate_on_demand(self, design_id: str, timestamp: int) -> DesignRecord:
        """Attach the surrogate mean to the design; cached after first call."""
        record = self.record(design_id)
        if record.cw_source != "unevaluated":
            return record
        if self.surrogate is None:
            raise RuntimeError("session has no surrogate model attached")
        cw = float(self.surrogate.predict(record.latent).mean)
        self.model_calls += 1
        event_payload = {"designId": design_id, "cw": cw, "cwSource": "surrogate"}
        self._apply_evaluated(event_payload)
        self.log.append("evaluated", event_payload, timestamp)
        return self.record(design_id)

    def select_preferred(self, slot: int, design_id: str, rationale: str,
                         timestamp: int) -> None:
        if not 1 <= slot <= self.n_slots:
            raise ValueError(f"slot must be 1..{self.n_slots}, got {slot}")
        check_rationale(rationale)
        record = self.record(design_id)
        payload = {
            "slot": slot,
            "designId": design_id,
            "latent": record.latent.tolist(),
            "rationale": rationale,
            "previous": self.slots[slot].design_id if slot in self.slots else None,
            "cw": record.cw,
        }
        self._apply_selected(payload)
        self.log.append("selected", payload, timestamp)

    def terminate(self, timestamp: int) -> None:
        if len(self.slots) < self.n_slots:
            raise IncompleteSelectionError(
                f"only {len(self.slots)} of {self.n_slots} preferred slots filled"
            )
        self.terminated = True
        self.log.append("terminated", {"slots": {
            str(k): {"designId": s.design_id, "rationale": s.rationale}
            for k, s in sorted(self.slots.items())
        }}, timestamp)

    # -- event folding ----------------------------------------------------

    def _apply_evaluated(self, payload: dict) -> None:
        index = self._by_id[payload["designId"]]
        self.pool[index] = self.pool[index].with_cw(payload["cw"], payload["cwSource"])

    def _apply_selected(self, payload: dict) -> None:
        self.slots[payload["slot"]] = PreferredSlot(payload["designId"], payload["rationale"])

    def replay(self, log: EventLog) -> None:
        """Fold a persisted event log into this freshly built session."""
        for event in log:
            if event.kind == "evaluated":
                self._apply_evaluated(event.payload)
            elif event.kind == "selected":
                self._apply_selected(event.payload)
            elif event.kind == "terminated":
                self.terminated = True
        self.log = log

    def summary(self) -> dict:
        evaluated = {r.id: r.cw for r in self.pool if r.cw_source != "unevaluated"}
        return {
            "mode": "rem",
            "slots": {str(k): [s.design_id, s.rationale] for k, s in sorted(self.slots.items())},
            "evaluated": evaluated,
            "terminated": self.terminated,
            "events": len(self.log),
        }


def build_rem_session(seed: int, surrogate: GPRModel | None = None,
                      config: RemConfig | None = None,
                      generator_config: GeneratorConfig | None = None) -> RemSession:
    """Sample the pool, embed it, and open a session.  Deterministic per seed."""
    cfg = config or RemConfig()
    pool = sample_constrained(cfg.pool_size, seed, generator_config)
    embedding = build_embedding(pool, seed, cfg)
    session = RemSession(seed=seed, pool=pool, embedding=embedding,
                         surrogate=surrogate, n_slots=cfg.preferred_slots)
    session.log.append("sessionStarted", {"mode": "rem", "seed": seed,
                                          "poolSize": cfg.pool_size}, 0)
    return session

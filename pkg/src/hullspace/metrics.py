"""Diversity measure and telemetry aggregation.

Diversity of a design set is its sparseness at the centre: the mean
Euclidean distance of the designs from their centroid, computed in latent
space.  Session telemetry is a pure fold over the event log, so analyses
are recomputable from the exported JSONL alone.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .events import EventLog, LogIntegrityError, RATIONALES


@dataclass
class DiversityReport:
    centroid: np.ndarray
    sc: float
    n: int


def sparseness_at_centre(designs: np.ndarray) -> DiversityReport:
    """Mean distance of the design vectors from their centroid.

    Zero iff all designs are identical; translation-invariant and linear
    under uniform scaling.
    """
    designs = np.atleast_2d(np.asarray(designs, dtype=float))
    if designs.size == 0:
        raise ValueError("need at least one design")
    centroid = designs.mean(axis=0)
    if np.all(designs == designs[0]):
        return DiversityReport(centroid, 0.0, designs.shape[0])
    sc = float(np.mean(np.linalg.norm(designs - centroid, axis=1)))
    return DiversityReport(centroid, sc, designs.shape[0])


@dataclass
class DesignHistory:
    mode: str
    total_time: float                       # seconds
    per_design_times: list[float]           # seconds, one entry per explored design
    designs_explored_count: int
    explored_cw: list[float]
    preferred_cw: list[float]
    rationale_counts: dict[str, int]
    mode_specific: dict = field(default_factory=dict)


def _check_order(log: EventLog) -> None:
    last = None
    for event in log:
        if last is not None and event.timestamp < last:
            raise LogIntegrityError("event timestamps decrease")
        last = event.timestamp


def aggregate_history(log: EventLog) -> DesignHistory:
    """Fold one session's event log into its design history.

    Per-design time is the interval from a design (or a shown set of
    designs, for the gallery modes) becoming current until it is
    replaced; the final interval closes at termination or at the last
    event.
    """
    _check_order(log)
    if len(log) == 0:
        raise LogIntegrityError("empty event log")
    mode = None
    for event in log:
        if event.kind == "sessionStarted":
            mode = event.payload.get("mode")
            break
    if mode is None:
        raise LogIntegrityError("log has no sessionStarted event")

    end_time = log.events[-1].timestamp
    rationale_counts = {r: 0 for r in RATIONALES}
    explored_cw: list[float] = []
    preferred_cw: list[float] = []
    per_design_times: list[float] = []
    designs_explored = 0
    mode_specific: dict = {}

    if mode == "rem":
        views = [e for e in log if e.kind == "viewed"]
        for i, event in enumerate(views):
            nxt = views[i + 1].timestamp if i + 1 < len(views) else end_time
            per_design_times.append((nxt - event.timestamp) / 1000.0)
        designs_explored = len(views)
        mode_specific["visited"] = [
            (e.payload["u"], e.payload["v"]) for e in views
        ]
    else:
        shows = [e for e in log if e.kind == "generationShown"]
        for i, event in enumerate(shows):
            nxt = shows[i + 1].timestamp if i + 1 < len(shows) else end_time
            shown = len(event.payload["designs"])
            per_design_times.extend([(nxt - event.timestamp) / 1000.0 / shown] * shown)
            designs_explored += shown
        if mode == "saem":
            mode_specific["bounds_trajectory"] = [
                (e.payload["lower"], e.payload["upper"])
                for e in log if e.kind == "boundsShrunk"
            ]
        else:
            mode_specific["weight_history"] = [
                (e.payload["interaction"], e.payload["governing"][0], e.payload["governing"][1])
                for e in log if e.kind == "weightsChanged"
            ]

    for event in log:
        if event.kind == "generationShown":
            explored_cw.extend(d["cw"] for d in event.payload["designs"]
                               if d.get("cw") is not None)
        elif event.kind == "evaluated":
            explored_cw.append(event.payload["cw"])
        elif event.kind == "selected":
            rationale_counts[event.payload["rationale"]] += 1
            if event.payload.get("cw") is not None:
                preferred_cw.append(event.payload["cw"])

    return DesignHistory(
        mode=mode,
        total_time=end_time / 1000.0,
        per_design_times=per_design_times,
        designs_explored_count=designs_explored,
        explored_cw=explored_cw,
        preferred_cw=preferred_cw,
        rationale_counts=rationale_counts,
        mode_specific=mode_specific,
    )


def preferred_latents(log: EventLog) -> np.ndarray:
    """Latents of the session's preferred designs, straight from the log.

    For the slot-based random mode this is the final occupant of each
    slot; for the interactive modes it is every per-interaction selection.
    """
    mode = log.events[0].payload.get("mode") if len(log) else None
    selections = [e.payload for e in log if e.kind == "selected"]
    if mode == "rem":
        final: dict[int, list] = {}
        for payload in selections:
            final[payload["slot"]] = payload["latent"]
        return np.array([final[k] for k in sorted(final)])
    return np.array([p["latent"] for p in selections])


@dataclass
class ModeRow:
    mode: str
    sessions: int
    total_time_median: float
    sc_median: float
    preferred_cw_median: float


def cross_mode_report(logs: list[EventLog]) -> tuple[list[ModeRow], str, str]:
    """Per-mode distributions of time, diversity, and preferred performance.

    Returns the rows plus CSV and plain-text renderings.  Requires at
    least one completed session of every mode.
    """
    by_mode: dict[str, list[EventLog]] = {"rem": [], "saem": [], "aem": []}
    for log in logs:
        history = aggregate_history(log)
        by_mode.setdefault(history.mode, []).append(log)
    missing = [m for m in ("rem", "saem", "aem") if not by_mode[m]]
    if missing:
        raise ValueError(f"missing sessions for mode(s): {', '.join(missing)}")

    rows = []
    for mode in ("rem", "saem", "aem"):
        histories = [aggregate_history(log) for log in by_mode[mode]]
        scs = [sparseness_at_centre(preferred_latents(log)).sc for log in by_mode[mode]]
        cws = [np.median(h.preferred_cw) for h in histories if h.preferred_cw]
        rows.append(ModeRow(
            mode=mode,
            sessions=len(histories),
            total_time_median=float(np.median([h.total_time for h in histories])),
            sc_median=float(np.median(scs)),
            preferred_cw_median=float(np.median(cws)) if cws else float("nan"),
        ))

    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["mode", "sessions", "total_time_median_s", "sc_median",
                     "preferred_cw_median"])
    for r in rows:
        writer.writerow([r.mode, r.sessions, repr(r.total_time_median),
                         repr(r.sc_median), repr(r.preferred_cw_median)])
    csv_text = out.getvalue()

    lines = ["mode  sessions  time_median_s  sc_median  preferred_cw_median"]
    for r in rows:
        lines.append(f"{r.mode:<5} {r.sessions:>8}  {r.total_time_median:>12.1f}  "
                     f"{r.sc_median:>9.4f}  {r.preferred_cw_median:>12.6g}")
    return rows, csv_text, "\n".join(lines) + "\n"

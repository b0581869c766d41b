"""Append-only session event logs.

Every user-visible thing that happens in a session is an event:
timestamped, typed, and carrying the full payload needed to rebuild the
session state by folding the log (no recomputation on replay).  Logs
serialize to JSONL, one event per line; Python's JSON float handling is
round-trip exact, so replayed state matches live state bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

RATIONALES = ("form", "performance", "both")

EVENT_KINDS = (
    "sessionStarted",
    "viewed",
    "evaluated",
    "generationShown",
    "selected",
    "weightsChanged",
    "boundsShrunk",
    "terminated",
)


class LogIntegrityError(ValueError):
    """Malformed or out-of-order event stream."""


@dataclass
class SessionEvent:
    timestamp: int  # ms since session start
    kind: str
    payload: dict

    def to_json(self) -> str:
        return json.dumps(
            {"t": self.timestamp, "kind": self.kind, "payload": self.payload},
            separators=(",", ":"),
        )

    @classmethod
    def from_json(cls, line: str) -> "SessionEvent":
        data = json.loads(line)
        return cls(timestamp=data["t"], kind=data["kind"], payload=data["payload"])


@dataclass
class EventLog:
    events: list[SessionEvent] = field(default_factory=list)

    def append(self, kind: str, payload: dict, timestamp: int) -> SessionEvent:
        if kind not in EVENT_KINDS:
            raise LogIntegrityError(f"unknown event kind: {kind}")
        if self.events and timestamp < self.events[-1].timestamp:
            raise LogIntegrityError(
                f"timestamp {timestamp} precedes last event at {self.events[-1].timestamp}"
            )
        event = SessionEvent(int(timestamp), kind, payload)
        self.events.append(event)
        return event

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def to_jsonl(self) -> str:
        return "".join(e.to_json() + "\n" for e in self.events)

    @classmethod
    def from_jsonl(cls, text: str) -> "EventLog":
        log = cls()
        last = None
        for line in text.splitlines():
            if not line.strip():
                continue
            event = SessionEvent.from_json(line)
            if last is not None and event.timestamp < last:
                raise LogIntegrityError("events out of order in stream")
            log.events.append(event)
            last = event.timestamp
        return log


def check_rationale(rationale: str) -> str:
    if rationale not in RATIONALES:
        raise ValueError(f"rationale must be one of {RATIONALES}, got {rationale!r}")
    return rationale

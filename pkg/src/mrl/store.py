"""Durable, replayable session logs.

One JSON record per line, one file per session. Events carry a monotonically
assigned sequence number; the first event of a session must be SessionStarted
and nothing may follow SessionEnded. Floats serialize via Python's shortest
round-trip repr, so replay comparisons are meaningful across platforms.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

import numpy as np

from .engine import (
    EngineConfig,
    InteractionRecord,
    Outcome,
    new_engine,
    preferred_reinforcer,
    record_outcome,
)
from .novice import Group, SessionLogSummary

SCHEMA_VERSION = 1

REPLAY_TOLERANCE = 1e-9

PAYLOAD_TYPES = (
    "SessionStarted",
    "MistakeObserved",
    "ReinforcerDispatched",
    "OutcomeRecorded",
    "SessionEnded",
)


class ProtocolError(ValueError):
    """Raised for event sequences that violate the session protocol."""


class StorageError(OSError):
    """Raised when an append cannot be made durable."""


class ReplayMismatchError(Exception):
    """Replay diverged from the logged weights."""

    def __init__(self, seq: int, message: str):
        super().__init__(message)
        self.seq = seq


@dataclass(frozen=True)
class EventEnvelope:
    schema_version: int
    session_id: str
    timestamp: int
    payload: dict
    seq: int | None = None

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "session_id": self.session_id,
            "timestamp": self.timestamp,
            "seq": self.seq,
            "payload": self.payload,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EventEnvelope":
        return cls(
            schema_version=d["schema_version"],
            session_id=d["session_id"],
            timestamp=d["timestamp"],
            payload=d["payload"],
            seq=d.get("seq"),
        )


def make_envelope(session_id: str, payload: dict, timestamp: int | None = None) -> EventEnvelope:
    if payload.get("type") not in PAYLOAD_TYPES:
        raise ProtocolError(f"unknown payload type {payload.get('type')!r}")
    ts = int(time.time() * 1000) if timestamp is None else timestamp
    return EventEnvelope(
        schema_version=SCHEMA_VERSION, session_id=session_id, timestamp=ts, payload=payload
    )


class MemoryEventLog:
    """Append-only in-memory sink with the session protocol enforced.

    Setting ``fixed_timestamp`` stamps every appended event with that value,
    which makes log files byte-reproducible.
    """

    def __init__(self, fixed_timestamp: int | None = None):
        self.events: list[EventEnvelope] = []
        self.fixed_timestamp = fixed_timestamp
        self._next_seq = 0
        self._started = False
        self._ended = False

    def _check(self, envelope: EventEnvelope):
        kind = envelope.payload.get("type")
        if kind not in PAYLOAD_TYPES:
            raise ProtocolError(f"unknown payload type {kind!r}")
        if self._ended:
            raise ProtocolError("session already ended; no further events allowed")
        if kind == "SessionStarted":
            if self._started:
                raise ProtocolError("duplicate SessionStarted")
        elif not self._started:
            raise ProtocolError(f"first event must be SessionStarted, got {kind}")

    def append(self, envelope: EventEnvelope) -> int:
        self._check(envelope)
        seq = self._next_seq
        ts = self.fixed_timestamp if self.fixed_timestamp is not None else envelope.timestamp
        stamped = EventEnvelope(
            schema_version=envelope.schema_version,
            session_id=envelope.session_id,
            timestamp=ts,
            payload=envelope.payload,
            seq=seq,
        )
        self._persist(stamped)
        self.events.append(stamped)
        self._next_seq += 1
        kind = envelope.payload["type"]
        if kind == "SessionStarted":
            self._started = True
        elif kind == "SessionEnded":
            self._ended = True
        return seq

    def _persist(self, stamped: EventEnvelope):
        pass

    def close(self):
        pass


class FileEventLog(MemoryEventLog):
    """Sink that flushes each event to a newline-delimited JSON file."""

    def __init__(self, path, fixed_timestamp: int | None = None):
        super().__init__(fixed_timestamp)
        self.path = path
        try:
            self._fh = open(path, "w", encoding="utf-8")
        except OSError as e:
            raise StorageError(f"cannot open event log {path}: {e}") from e

    def _persist(self, stamped: EventEnvelope):
        try:
            self._fh.write(json.dumps(stamped.to_dict(), separators=(",", ":")) + "\n")
            self._fh.flush()
        except (OSError, ValueError) as e:
            raise StorageError(f"cannot append to event log {self.path}: {e}") from e

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def append_event(sink, envelope: EventEnvelope) -> int:
    """Durably append one event; returns its assigned sequence number."""
    return sink.append(envelope)


def read_events(path) -> list[EventEnvelope]:
    events = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                events.append(EventEnvelope.from_dict(json.loads(line)))
    return events


def _phase_of(state_tag: str) -> str:
    return state_tag.split(":", 1)[0] if state_tag else "unknown"


def replay_session(events) -> SessionLogSummary:
    """Re-execute the engine updates of a logged session and verify them.

    Every OutcomeRecorded event is recomputed from the logged outcome; the
    recomputed weights must match the logged weights_after within 1e-9 or a
    ReplayMismatchError names the first divergent sequence number. Returns the
    summary reconstructed from the verified events.
    """
    events = list(events)
    if not events:
        raise ProtocolError("empty event sequence")
    if events[0].payload.get("type") != "SessionStarted":
        raise ProtocolError("first event must be SessionStarted")
    seqs = [e.seq for e in events]
    if any(s is None for s in seqs) or any(b <= a for a, b in zip(seqs, seqs[1:])):
        raise ProtocolError("sequence numbers must be strictly increasing")
    if sum(1 for e in events if e.payload["type"] == "SessionStarted") > 1:
        raise ProtocolError("duplicate SessionStarted")
    if sum(1 for e in events if e.payload["type"] == "SessionEnded") > 1:
        raise ProtocolError("more than one SessionEnded")

    started = events[0].payload
    group = Group(started["group"])
    engine = None
    if group is Group.LEARNED:
        engine = new_engine(EngineConfig.from_dict(started["config"]))

    mistakes_per_phase: dict[str, int] = {}
    records: list[InteractionRecord] = []
    true_preference = None

    for env in events[1:]:
        payload = env.payload
        kind = payload["type"]
        if kind == "MistakeObserved":
            phase = _phase_of(payload["state_tag"])
            mistakes_per_phase[phase] = mistakes_per_phase.get(phase, 0) + 1
        elif kind == "OutcomeRecorded":
            logged = InteractionRecord.from_dict(payload["record"])
            if engine is None:
                raise ProtocolError(
                    f"OutcomeRecorded in a {group.value}-group session (seq {env.seq})"
                )
            recomputed = record_outcome(
                engine, Outcome(logged.selected, logged.success), state_tag=logged.state_tag
            )
            diff = float(
                np.max(np.abs(np.array(recomputed.weights_after) - np.array(logged.weights_after)))
            )
            if diff > REPLAY_TOLERANCE:
                raise ReplayMismatchError(
                    env.seq,
                    f"replay diverged at seq {env.seq}: max weight difference {diff:.3e}",
                )
            records.append(recomputed)
        elif kind == "SessionEnded":
            true_preference = payload["summary"].get("true_preference")

    return SessionLogSummary(
        mistakes_per_phase=mistakes_per_phase,
        records=tuple(records),
        identified_preference=preferred_reinforcer(engine) if engine is not None else None,
        true_preference=true_preference,
    )

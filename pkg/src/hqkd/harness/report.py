"""Machine-readable session reports and their JSON schema."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from ..bitstring import BitString
from ..channel import EveObservation
from ..protocols import PartyRecord, SessionTranscript
from ..qstate import Basis

REPORT_VERSION = "hqkd.session-report/1"

# fields of the config echo that do not influence the session outcome
NON_ECHO_KEYS = ("out", "jobs")

_BITS = {
    "type": "object",
    "properties": {
        "width": {"type": "integer", "minimum": 0},
        "hex": {"type": "string", "pattern": "^[0-9a-f]*$"},
    },
    "required": ["width", "hex"],
    "additionalProperties": False,
}

_PARTY = {
    "type": "object",
    "properties": {
        "rounds": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "object", "additionalProperties": {"$ref": "#/$defs/bits"}},
        },
        "key": {"oneOf": [{"$ref": "#/$defs/bits"}, {"type": "null"}]},
    },
    "required": ["rounds", "key"],
    "additionalProperties": False,
}

_LINK = {
    "type": "object",
    "properties": {"bases": {"$ref": "#/$defs/bits"}, "outcomes": {"$ref": "#/$defs/bits"}},
    "required": ["bases", "outcomes"],
    "additionalProperties": False,
}

REPORT_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "hqkd session report",
    "type": "object",
    "$defs": {"bits": _BITS, "party": _PARTY, "link": _LINK},
    "properties": {
        "version": {"const": REPORT_VERSION},
        "config": {"type": "object"},
        "protocol": {"enum": [1, 3]},
        "alice": {"$ref": "#/$defs/party"},
        "bob": {"$ref": "#/$defs/party"},
        "agreed": {"type": "boolean"},
        "aborted": {"type": "boolean"},
        "abort_reason": {"type": ["string", "null"]},
        "eve": {
            "type": "object",
            "properties": {
                "classical_log": {"type": "array", "items": {"$ref": "#/$defs/bits"}},
                "quantum_outcomes": {
                    "type": "object",
                    "additionalProperties": {"$ref": "#/$defs/link"},
                },
                "c_mismatch_rate": {"type": "number", "minimum": 0, "maximum": 1},
                "eve_knowledge": {"type": "boolean"},
            },
            "required": ["classical_log", "quantum_outcomes", "c_mismatch_rate", "eve_knowledge"],
            "additionalProperties": False,
        },
        "duration_s": {"type": ["number", "null"]},
    },
    "required": [
        "version", "config", "protocol", "alice", "bob", "agreed", "aborted",
        "abort_reason", "eve", "duration_s",
    ],
    "additionalProperties": False,
}


@dataclass
class SessionReport:
    config: dict[str, Any]
    protocol: int
    alice: PartyRecord
    bob: PartyRecord
    agreed: bool
    aborted: bool
    abort_reason: str | None
    eve_classical_log: list[BitString]
    eve_quantum: list[EveObservation]
    c_mismatch_rate: float
    eve_knowledge: bool
    duration_s: float | None = None

    @classmethod
    def from_transcript(
        cls,
        t: SessionTranscript,
        config: dict[str, Any],
        c_mismatch_rate: float,
        eve_knowledge: bool,
        duration_s: float | None = None,
    ) -> SessionReport:
        return cls(
            config={k: v for k, v in config.items() if k not in NON_ECHO_KEYS},
            protocol=t.protocol,
            alice=t.alice,
            bob=t.bob,
            agreed=t.agreed,
            aborted=t.aborted,
            abort_reason=t.abort_reason,
            eve_classical_log=list(t.eve_classical),
            eve_quantum=list(t.eve_quantum),
            c_mismatch_rate=c_mismatch_rate,
            eve_knowledge=eve_knowledge,
            duration_s=duration_s,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": REPORT_VERSION,
            "config": self.config,
            "protocol": self.protocol,
            "alice": _party_to_dict(self.alice),
            "bob": _party_to_dict(self.bob),
            "agreed": self.agreed,
            "aborted": self.aborted,
            "abort_reason": self.abort_reason,
            "eve": {
                "classical_log": [b.as_dict() for b in self.eve_classical_log],
                "quantum_outcomes": _observations_to_dict(self.eve_quantum),
                "c_mismatch_rate": self.c_mismatch_rate,
                "eve_knowledge": self.eve_knowledge,
            },
            "duration_s": self.duration_s,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> SessionReport:
        if d.get("version") != REPORT_VERSION:
            raise ValueError(f"unsupported report version {d.get('version')!r}")
        eve = d["eve"]
        return cls(
            config=d["config"],
            protocol=d["protocol"],
            alice=_party_from_dict("alice", d["alice"]),
            bob=_party_from_dict("bob", d["bob"]),
            agreed=d["agreed"],
            aborted=d["aborted"],
            abort_reason=d["abort_reason"],
            eve_classical_log=[BitString.from_dict(b) for b in eve["classical_log"]],
            eve_quantum=_observations_from_dict(eve["quantum_outcomes"]),
            c_mismatch_rate=eve["c_mismatch_rate"],
            eve_knowledge=eve["eve_knowledge"],
            duration_s=d["duration_s"],
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def loads(cls, text: str) -> SessionReport:
        return cls.from_dict(json.loads(text))

    def summary(self) -> str:
        key = self.alice.key.hex() if self.alice.key is not None else "-"
        status = "ABORTED" if self.aborted else ("agreed" if self.agreed else "DISAGREED")
        return (
            f"protocol {self.protocol}: {status}; key {key}; "
            f"c_mismatch_rate {self.c_mismatch_rate:.4f}; eve_knowledge {self.eve_knowledge}"
            + (f"; {self.abort_reason}" if self.abort_reason else "")
        )


def _party_to_dict(p: PartyRecord) -> dict[str, Any]:
    return {
        "rounds": [{k: v.as_dict() for k, v in r.items()} for r in p.rounds],
        "key": p.key.as_dict() if p.key is not None else None,
    }


def _party_from_dict(name: str, d: dict[str, Any]) -> PartyRecord:
    return PartyRecord(
        name,
        [{k: BitString.from_dict(v) for k, v in r.items()} for r in d["rounds"]],
        BitString.from_dict(d["key"]) if d["key"] is not None else None,
    )


def _observations_to_dict(obs: list[EveObservation]) -> dict[str, Any]:
    """Per link, Eve's bases (1 = hadamard) and outcomes as bit strings."""
    links: dict[str, list[EveObservation]] = {}
    for o in obs:
        links.setdefault(o.link, []).append(o)
    return {
        link: {
            "bases": BitString.from_bits(int(o.basis is Basis.HADAMARD) for o in seq).as_dict(),
            "outcomes": BitString.from_bits(o.outcome for o in seq).as_dict(),
        }
        for link, seq in links.items()
    }


def _observations_from_dict(d: dict[str, Any]) -> list[EveObservation]:
    # order across links is not preserved; within a link it is
    out = []
    for link, rec in d.items():
        bases = BitString.from_dict(rec["bases"]).bits
        outcomes = BitString.from_dict(rec["outcomes"]).bits
        for b, o in zip(bases, outcomes):
            out.append(EveObservation(link, Basis.HADAMARD if b else Basis.COMPUTATIONAL, o))
    return out

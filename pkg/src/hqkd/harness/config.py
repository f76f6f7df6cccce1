"""Session configuration: a strict JSON schema with documented defaults."""
from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..channel import EveConfig
from ..errors import ConfigError, InvalidArgument
from ..protocols import ProtocolConfig, Semantics
from ..qrng import PrepSpec
from ..qstate import Basis, BellKind, GateSpec, H

SEED_MAX = 2**64 - 1


def derive_seed(master: int, *labels: object) -> int:
    """Stable 64-bit seed for a named sub-stream of ``master``."""
    text = ":".join(["hqkd", str(master), *map(str, labels)])
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


@dataclass(frozen=True)
class SessionConfig:
    protocol: int = 3
    width: int = 64
    n: int = 128
    n1: int = 128
    n2: int = 128
    n3: int = 128
    n4: int = 128
    rounds: int = 1
    bell_kind: BellKind = BellKind.PHI_PLUS
    basis: Basis = Basis.COMPUTATIONAL
    semantics: Semantics = Semantics.OUTCOME
    unitary_alice: tuple[GateSpec, ...] = ()
    unitary_bob: tuple[GateSpec, ...] = ()
    prep: PrepSpec = field(default_factory=PrepSpec)
    hash: str = "sha256"
    seed: int = 0
    seeds: dict[str, int] | None = None
    eve: EveConfig = field(default_factory=EveConfig)
    trials: int = 100
    jobs: int = 1
    n_min: int = 1
    n_max: int = 100
    rng_width: int = 64
    out: str | None = None
    timing: bool = False

    def __post_init__(self):
        for name, enum in (("bell_kind", BellKind), ("basis", Basis), ("semantics", Semantics)):
            object.__setattr__(self, name, enum(getattr(self, name)))
        if self.hash != "sha256":
            raise ConfigError(f"hash: only 'sha256' is supported, got {self.hash!r}", "hash")
        if not 0 <= self.seed <= SEED_MAX:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}", "seed")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}", "trials")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}", "jobs")
        if not 1 <= self.n_min <= self.n_max:
            raise ConfigError(f"need 1 <= n_min <= n_max, got {self.n_min}..{self.n_max}", "n_min")
        # surfaces protocol-level validation errors at load time
        self.protocol_config()

    def party_seeds(self, trial: int | None = None) -> tuple[int, int, int]:
        if self.seeds is not None and trial is None:
            return self.seeds["alice"], self.seeds["bob"], self.seeds["eve"]
        base = () if trial is None else (f"trial{trial}",)
        return tuple(derive_seed(self.seed, *base, role) for role in ("alice", "bob", "eve"))

    def protocol_config(self, trial: int | None = None) -> ProtocolConfig:
        alice, bob, eve = self.party_seeds(trial)
        return ProtocolConfig(
            protocol=self.protocol, width=self.width,
            n=self.n, n1=self.n1, n2=self.n2, n3=self.n3, n4=self.n4,
            rounds=self.rounds, bell_kind=self.bell_kind, basis=self.basis,
            unitary_alice=self.unitary_alice, unitary_bob=self.unitary_bob,
            semantics=self.semantics, prep=self.prep,
            seed_alice=alice, seed_bob=bob, seed_eve=eve,
        )

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {}
        for f in dataclasses.fields(self):
            d[f.name] = getattr(self, f.name)
        d["bell_kind"] = self.bell_kind.value
        d["basis"] = self.basis.value
        d["semantics"] = self.semantics.value
        d["unitary"] = {
            "alice": [_gate_to_json(g) for g in d.pop("unitary_alice")],
            "bob": [_gate_to_json(g) for g in d.pop("unitary_bob")],
        }
        d["prep"] = {"gates": [_gate_to_json(g) for g in self.prep.gates], "desired": self.prep.desired}
        d["eve"] = {
            "quantum_mode": self.eve.quantum_mode.value,
            "basis_strategy": self.eve.basis_strategy.value,
            "classical_mode": self.eve.classical_mode.value,
            "flip_probability": self.eve.flip_probability,
        }
        d["seeds"] = dict(self.seeds) if self.seeds is not None else None
        return d


def _gate_to_json(g: GateSpec) -> dict:
    return {"gate": g.gate, "targets": list(g.targets)}


_INT_KEYS = {"protocol", "width", "n", "n1", "n2", "n3", "n4", "rounds", "seed",
             "trials", "jobs", "n_min", "n_max", "rng_width"}
_ENUM_KEYS = {"bell_kind": BellKind, "basis": Basis, "semantics": Semantics}
_EVE_KEYS = {"quantum_mode", "basis_strategy", "classical_mode", "flip_probability"}
_TOP_KEYS = (_INT_KEYS | set(_ENUM_KEYS)
             | {"unitary", "prep", "hash", "seeds", "eve", "out", "timing"})


def _reject_unknown(obj: dict, allowed: set[str], where: str) -> None:
    for key in obj:
        if key not in allowed:
            path = f"{where}.{key}" if where else key
            raise ConfigError(f"unknown config key {path!r}", path)


def _int(value: Any, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key}: expected an integer, got {value!r}", key)
    return value


def _gates(value: Any, key: str) -> tuple[GateSpec, ...]:
    if not isinstance(value, list):
        raise ConfigError(f"{key}: expected a list of gates", key)
    out = []
    for i, g in enumerate(value):
        where = f"{key}[{i}]"
        if not isinstance(g, dict):
            raise ConfigError(f"{where}: expected {{'gate': ..., 'targets': [...]}}", where)
        _reject_unknown(g, {"gate", "targets"}, where)
        try:
            out.append(GateSpec(g["gate"], tuple(g["targets"])))
        except (KeyError, TypeError, InvalidArgument) as err:
            raise ConfigError(f"{where}: {err}", where) from None
    return tuple(out)


def parse_config(data: dict[str, Any]) -> SessionConfig:
    """Build a SessionConfig from decoded JSON, rejecting unknown keys."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    _reject_unknown(data, _TOP_KEYS, "")
    kw: dict[str, Any] = {}
    for key, value in data.items():
        if key in _INT_KEYS:
            kw[key] = _int(value, key)
        elif key in _ENUM_KEYS:
            try:
                kw[key] = _ENUM_KEYS[key](value)
            except ValueError:
                choices = ", ".join(e.value for e in _ENUM_KEYS[key])
                raise ConfigError(f"{key}: {value!r} is not one of {choices}", key) from None
        elif key == "unitary":
            if not isinstance(value, dict):
                raise ConfigError("unitary: expected {'alice': [...], 'bob': [...]}", key)
            _reject_unknown(value, {"alice", "bob"}, "unitary")
            if "alice" in value:
                kw["unitary_alice"] = _gates(value["alice"], "unitary.alice")
            if "bob" in value:
                kw["unitary_bob"] = _gates(value["bob"], "unitary.bob")
        elif key == "prep":
            if not isinstance(value, dict):
                raise ConfigError("prep: expected {'gates': [...], 'desired': 0|1}", key)
            _reject_unknown(value, {"gates", "desired"}, "prep")
            try:
                kw["prep"] = PrepSpec(
                    _gates(value.get("gates", [_gate_to_json(H(0))]), "prep.gates"),
                    _int(value.get("desired", 0), "prep.desired"),
                )
            except InvalidArgument as err:
                raise ConfigError(f"prep: {err}", key) from None
        elif key == "seeds":
            if value is not None:
                if not isinstance(value, dict) or set(value) != {"alice", "bob", "eve"}:
                    raise ConfigError("seeds: expected {'alice', 'bob', 'eve'} integers", key)
                kw["seeds"] = {k: _int(v, f"seeds.{k}") for k, v in value.items()}
        elif key == "eve":
            if not isinstance(value, dict):
                raise ConfigError("eve: expected an object", key)
            _reject_unknown(value, _EVE_KEYS, "eve")
            try:
                kw["eve"] = EveConfig(**value)
            except (ValueError, TypeError) as err:
                raise ConfigError(f"eve: {err}", key) from None
        elif key == "hash":
            kw["hash"] = value
        elif key == "out":
            if value is not None and not isinstance(value, str):
                raise ConfigError("out: expected a path string or null", key)
            kw["out"] = value
        elif key == "timing":
            if not isinstance(value, bool):
                raise ConfigError("timing: expected true or false", key)
            kw["timing"] = value
    try:
        return SessionConfig(**kw)
    except InvalidArgument as err:
        raise ConfigError(str(err)) from None


def load_config(path: str | Path | None) -> SessionConfig:
    if path is None:
        return SessionConfig()
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: not valid JSON ({err})") from None
    return parse_config(data)

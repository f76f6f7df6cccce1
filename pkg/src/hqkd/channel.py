"""Qubit custody, the quantum channel with an intercept-resend adversary, and
the public classical channel.

Parties never hold a ``StateVector`` directly. Registers live in a
``QubitStore`` and every read or write goes through a ``QubitRef`` that the
caller must currently hold. A qubit handed to a channel is in flight and
nobody can touch it until it is delivered; after delivery only the receiver
can. Eve is the channel itself: she can measure what passes through, and
only the outcome bit ever reaches her record.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .bitstring import BitString
from .errors import InvalidArgument, NoCloneViolation, ProtocolViolation
from .qstate import Basis, GateSpec, StateVector, apply_gates, measure, prob_of


class QuantumMode(str, Enum):
    OFF = "off"
    INTERCEPT_RESEND = "intercept-resend"


class BasisStrategy(str, Enum):
    RANDOM = "random"
    COMPUTATIONAL = "computational"
    HADAMARD = "hadamard"


class ClassicalMode(str, Enum):
    PASSIVE = "passive"
    TAMPER = "tamper"


@dataclass(frozen=True)
class EveConfig:
    quantum_mode: QuantumMode = QuantumMode.OFF
    basis_strategy: BasisStrategy = BasisStrategy.RANDOM
    classical_mode: ClassicalMode = ClassicalMode.PASSIVE
    flip_probability: float = 0.0

    def __post_init__(self):
        for name, enum in (
            ("quantum_mode", QuantumMode),
            ("basis_strategy", BasisStrategy),
            ("classical_mode", ClassicalMode),
        ):
            object.__setattr__(self, name, enum(getattr(self, name)))
        if not 0.0 <= self.flip_probability <= 1.0:
            raise InvalidArgument(f"flip_probability must be in [0, 1], got {self.flip_probability}")


@dataclass(frozen=True, order=True)
class QubitRef:
    register_id: int
    index: int


IN_FLIGHT = object()


class QubitStore:
    """Owns every register in a session and enforces who may touch what."""

    def __init__(self):
        self._registers: dict[int, StateVector] = {}
        self._holders: dict[QubitRef, object] = {}
        self._ids = itertools.count()

    def allocate(self, owner: str, state: StateVector) -> list[QubitRef]:
        rid = next(self._ids)
        self._registers[rid] = state
        refs = [QubitRef(rid, i) for i in range(state.num_qubits)]
        for r in refs:
            self._holders[r] = owner
        return refs

    def holder(self, ref: QubitRef):
        try:
            return self._holders[ref]
        except KeyError:
            raise InvalidArgument(f"unknown qubit {ref}") from None

    def in_flight(self, ref: QubitRef) -> bool:
        return self.holder(ref) is IN_FLIGHT

    def _check(self, party: str, ref: QubitRef) -> StateVector:
        h = self.holder(ref)
        if h is IN_FLIGHT:
            raise NoCloneViolation(f"{party} cannot access {ref}: qubit is in flight")
        if h != party:
            raise NoCloneViolation(f"{party} cannot access {ref}: held by {h}")
        return self._registers[ref.register_id]

    def apply(self, party: str, register_id: int, gates: Sequence[GateSpec]) -> None:
        """Apply gates to a register; ``party`` must hold every targeted qubit."""
        if not gates:
            return
        for g in gates:
            for t in g.targets:
                self._check(party, QubitRef(register_id, t))
        reg = self._registers[register_id]
        self._registers[register_id] = apply_gates(reg, gates)

    def measure(self, party: str, ref: QubitRef, basis: Basis, rng: random.Random) -> int:
        return measure(self._check(party, ref), ref.index, basis, rng)

    def prob_of(self, party: str, ref: QubitRef, outcome: int, basis: Basis) -> float:
        return prob_of(self._check(party, ref), ref.index, outcome, basis)

    def amplitudes(self, party: str, register_id: int) -> list[complex]:
        """Read a register's amplitudes; only a party holding all of its qubits may."""
        reg = self._registers[register_id]
        for i in range(reg.num_qubits):
            self._check(party, QubitRef(register_id, i))
        return list(reg.amplitudes)

    def release(self, party: str, register_id: int) -> None:
        """Discard a register once all its qubits are measured and held by ``party``."""
        reg = self._registers[register_id]
        for i in range(reg.num_qubits):
            self._check(party, QubitRef(register_id, i))
        for i in range(reg.num_qubits):
            del self._holders[QubitRef(register_id, i)]
        del self._registers[register_id]

    # channel-side custody transfer; not for parties

    def _surrender(self, sender: str, ref: QubitRef) -> None:
        h = self.holder(ref)
        if h is IN_FLIGHT:
            raise ProtocolViolation(f"{ref} is already in flight")
        if h != sender:
            raise ProtocolViolation(f"{sender} cannot transmit {ref}: held by {h}")
        self._holders[ref] = IN_FLIGHT

    def _deliver(self, ref: QubitRef, receiver: str) -> None:
        self._holders[ref] = receiver

    def _intercept(self, ref: QubitRef, basis: Basis, rng: random.Random) -> int:
        return measure(self._registers[ref.register_id], ref.index, basis, rng)


@dataclass(frozen=True)
class EveObservation:
    link: str
    basis: Basis
    outcome: int


@dataclass
class QuantumChannel:
    store: QubitStore
    eve: EveConfig = field(default_factory=EveConfig)
    eve_rng: random.Random = field(default_factory=lambda: random.Random(0))
    in_flight: dict[QubitRef, str] = field(default_factory=dict)
    eve_record: list[EveObservation] = field(default_factory=list)

    def send(self, half: QubitRef, sender: str) -> None:
        if half in self.in_flight:
            raise ProtocolViolation(f"{half} is already in flight")
        self.store._surrender(sender, half)
        self.in_flight[half] = sender

    def deliver(self, half: QubitRef, receiver: str) -> QubitRef:
        try:
            sender = self.in_flight.pop(half)
        except KeyError:
            raise ProtocolViolation(f"{half} is not in flight") from None
        if self.eve.quantum_mode is QuantumMode.INTERCEPT_RESEND:
            basis = self._eve_basis()
            # the collapsed post-measurement state is exactly what she re-sends
            outcome = self.store._intercept(half, basis, self.eve_rng)
            self.eve_record.append(EveObservation(f"{sender}->{receiver}", basis, outcome))
        self.store._deliver(half, receiver)
        return half

    def _eve_basis(self) -> Basis:
        s = self.eve.basis_strategy
        if s is BasisStrategy.COMPUTATIONAL:
            return Basis.COMPUTATIONAL
        if s is BasisStrategy.HADAMARD:
            return Basis.HADAMARD
        return Basis.HADAMARD if self.eve_rng.random() < 0.5 else Basis.COMPUTATIONAL


def q_transmit(channel: QuantumChannel, half: QubitRef, sender: str, receiver: str) -> QubitRef:
    """Send and deliver synchronously; returns the receiver's handle."""
    channel.send(half, sender)
    return channel.deliver(half, receiver)


def clone_attempt(channel: QuantumChannel, half: QubitRef):
    raise NoCloneViolation(f"no operation copies the state of {half}")


@dataclass
class ClassicalChannel:
    eve: EveConfig = field(default_factory=EveConfig)
    eve_rng: random.Random = field(default_factory=lambda: random.Random(0))
    eve_log: list[BitString] = field(default_factory=list)

    def transmit(self, payload: BitString) -> BitString:
        self.eve_log.append(payload)
        if self.eve.classical_mode is ClassicalMode.PASSIVE:
            return payload
        p = self.eve.flip_probability
        flips = 0
        for _ in range(payload.width):
            flips = (flips << 1) | (self.eve_rng.random() < p)
        return BitString(payload.value ^ flips, payload.width)


def c_transmit(channel: ClassicalChannel, payload: BitString) -> BitString:
    return channel.transmit(payload)


@dataclass
class Channels:
    store: QubitStore
    quantum: QuantumChannel
    classical: ClassicalChannel


def open_channels(eve: EveConfig | None = None, eve_seed: int = 0) -> Channels:
    eve = eve or EveConfig()
    # one Eve stream shared by both links keeps a session reproducible from one seed
    rng = random.Random(eve_seed)
    store = QubitStore()
    return Channels(
        store,
        QuantumChannel(store, eve, rng),
        ClassicalChannel(eve, rng),
    )

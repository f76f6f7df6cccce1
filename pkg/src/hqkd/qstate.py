"""Exact state-vector simulation for registers of up to four qubits.

Amplitude ordering is big-endian: qubit 0 is the most significant bit of the
basis-state index, so for two qubits index 1 is ``|01>`` (qubit 1 set).
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Sequence

from .errors import InvalidArgument

MAX_QUBITS = 4
NORM_TOL = 1e-12
_S = 1 / math.sqrt(2)


class Basis(str, Enum):
    COMPUTATIONAL = "computational"
    HADAMARD = "hadamard"


class BellKind(str, Enum):
    PHI_PLUS = "phi-plus"
    PHI_MINUS = "phi-minus"
    PSI_PLUS = "psi-plus"
    PSI_MINUS = "psi-minus"


ONE_QUBIT_GATES = frozenset({"H", "X", "Z"})
TWO_QUBIT_GATES = frozenset({"CX", "SWAP"})


@dataclass(frozen=True)
class GateSpec:
    gate: str
    targets: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        if self.gate in ONE_QUBIT_GATES:
            if len(self.targets) != 1:
                raise InvalidArgument(f"{self.gate} takes exactly one target")
        elif self.gate in TWO_QUBIT_GATES:
            if len(self.targets) != 2 or self.targets[0] == self.targets[1]:
                raise InvalidArgument(f"{self.gate} takes two distinct targets")
        else:
            raise InvalidArgument(f"unknown gate {self.gate!r}")
        if any(t < 0 for t in self.targets):
            raise InvalidArgument(f"negative target in {self.targets}")


def H(q: int) -> GateSpec:
    return GateSpec("H", (q,))


def X(q: int) -> GateSpec:
    return GateSpec("X", (q,))


def Z(q: int) -> GateSpec:
    return GateSpec("Z", (q,))


def CX(control: int, target: int) -> GateSpec:
    return GateSpec("CX", (control, target))


def SWAP(a: int, b: int) -> GateSpec:
    return GateSpec("SWAP", (a, b))


@dataclass(eq=False)
class StateVector:
    num_qubits: int
    amplitudes: list[complex] = field(repr=False)

    def __post_init__(self):
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise InvalidArgument(f"num_qubits must be in [1, {MAX_QUBITS}], got {self.num_qubits}")
        self.amplitudes = [complex(a) for a in self.amplitudes]
        if len(self.amplitudes) != 1 << self.num_qubits:
            raise InvalidArgument(
                f"{self.num_qubits} qubits need {1 << self.num_qubits} amplitudes, "
                f"got {len(self.amplitudes)}"
            )
        if abs(self.norm_squared() - 1.0) > NORM_TOL:
            raise InvalidArgument(f"state not normalized (|psi|^2 = {self.norm_squared()})")

    @classmethod
    def _raw(cls, num_qubits: int, amplitudes: list[complex]) -> StateVector:
        # skips validation; callers guarantee a unitary image of a valid state
        sv = object.__new__(cls)
        sv.num_qubits = num_qubits
        sv.amplitudes = amplitudes
        return sv

    def norm_squared(self) -> float:
        return sum(a.real * a.real + a.imag * a.imag for a in self.amplitudes)

    def copy(self) -> StateVector:
        return StateVector._raw(self.num_qubits, list(self.amplitudes))

    def probabilities(self) -> list[float]:
        return [a.real * a.real + a.imag * a.imag for a in self.amplitudes]

    def __repr__(self) -> str:
        amps = ", ".join(f"{a:.4g}" for a in self.amplitudes)
        return f"StateVector({self.num_qubits}, [{amps}])"


def new_register(num_qubits: int) -> StateVector:
    if not isinstance(num_qubits, int) or not 1 <= num_qubits <= MAX_QUBITS:
        raise InvalidArgument(f"num_qubits must be in [1, {MAX_QUBITS}], got {num_qubits!r}")
    amps = [0j] * (1 << num_qubits)
    amps[0] = 1 + 0j
    return StateVector._raw(num_qubits, amps)


def _mask(n: int, q: int) -> int:
    if not 0 <= q < n:
        raise InvalidArgument(f"qubit index {q} out of range for {n}-qubit register")
    return 1 << (n - 1 - q)


def _apply_inplace(amps: list[complex], n: int, spec: GateSpec) -> None:
    dim = len(amps)
    g = spec.gate
    if g == "H":
        m = _mask(n, spec.targets[0])
        for i in range(dim):
            if not i & m:
                a, b = amps[i], amps[i | m]
                amps[i] = (a + b) * _S
                amps[i | m] = (a - b) * _S
    elif g == "X":
        m = _mask(n, spec.targets[0])
        for i in range(dim):
            if not i & m:
                amps[i], amps[i | m] = amps[i | m], amps[i]
    elif g == "Z":
        m = _mask(n, spec.targets[0])
        for i in range(dim):
            if i & m:
                amps[i] = -amps[i]
    elif g == "CX":
        mc, mt = _mask(n, spec.targets[0]), _mask(n, spec.targets[1])
        for i in range(dim):
            if i & mc and not i & mt:
                amps[i], amps[i | mt] = amps[i | mt], amps[i]
    else:  # SWAP
        ma, mb = _mask(n, spec.targets[0]), _mask(n, spec.targets[1])
        for i in range(dim):
            if i & ma and not i & mb:
                j = i ^ ma ^ mb
                amps[i], amps[j] = amps[j], amps[i]


def apply_gate(state: StateVector, spec: GateSpec) -> StateVector:
    """Return ``spec`` applied to ``state``; the input is left untouched."""
    amps = list(state.amplitudes)
    _apply_inplace(amps, state.num_qubits, spec)
    return StateVector._raw(state.num_qubits, amps)


def apply_gates(state: StateVector, specs: Sequence[GateSpec]) -> StateVector:
    amps = list(state.amplitudes)
    for spec in specs:
        _apply_inplace(amps, state.num_qubits, spec)
    return StateVector._raw(state.num_qubits, amps)


# Z and/or X on qubit 1 after H(0), CX(0, 1) selects the Bell variant.
_BELL_SELECTORS = {
    BellKind.PHI_PLUS: (),
    BellKind.PHI_MINUS: (Z(1),),
    BellKind.PSI_PLUS: (X(1),),
    BellKind.PSI_MINUS: (Z(1), X(1)),
}


@lru_cache(maxsize=None)
def _bell_amplitudes(kind: BellKind) -> tuple[complex, ...]:
    state = apply_gates(new_register(2), (H(0), CX(0, 1)) + _BELL_SELECTORS[kind])
    return tuple(state.amplitudes)


def make_bell_pair(kind: BellKind = BellKind.PHI_PLUS) -> StateVector:
    return StateVector._raw(2, list(_bell_amplitudes(BellKind(kind))))


def _branch_weights(amps: list[complex], m: int) -> tuple[float, float]:
    w0 = w1 = 0.0
    for i, a in enumerate(amps):
        w = a.real * a.real + a.imag * a.imag
        if i & m:
            w1 += w
        else:
            w0 += w
    return w0, w1


def prob_of(state: StateVector, index: int, outcome: int, basis: Basis = Basis.COMPUTATIONAL) -> float:
    """Born probability that qubit ``index`` reads ``outcome`` in ``basis``."""
    m = _mask(state.num_qubits, index)
    if outcome not in (0, 1):
        raise InvalidArgument(f"outcome must be 0 or 1, got {outcome!r}")
    amps = state.amplitudes
    if basis is Basis.HADAMARD:
        amps = list(amps)
        _apply_inplace(amps, state.num_qubits, H(index))
    w0, w1 = _branch_weights(amps, m)
    # ratio form keeps symmetric splits exact (|1/sqrt2|^2 alone is not 0.5)
    return (w1 if outcome else w0) / (w0 + w1)


def measure(state: StateVector, index: int, basis: Basis, rng: random.Random) -> int:
    """Sample one qubit and collapse ``state`` in place.

    A Hadamard-basis measurement rotates into the computational frame and
    back, so the post-measurement state is the matching ``|+>``/``|->``
    eigenstate.
    """
    n = state.num_qubits
    m = _mask(n, index)
    amps = state.amplitudes
    hadamard = basis is Basis.HADAMARD
    if hadamard:
        _apply_inplace(amps, n, H(index))
    w0, w1 = _branch_weights(amps, m)
    outcome = 1 if rng.random() * (w0 + w1) < w1 else 0
    scale = 1 / math.sqrt(w1 if outcome else w0)
    for i in range(len(amps)):
        amps[i] = amps[i] * scale if bool(i & m) == bool(outcome) else 0j
    if hadamard:
        _apply_inplace(amps, n, H(index))
    return outcome

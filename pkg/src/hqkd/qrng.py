"""Quantum random numbers from shot statistics of a one-qubit circuit.

The pipeline is: estimate the probability ``p`` of a desired outcome from
``n`` fresh prepare-and-measure shots, evaluate
``ln(p) / (2 * (1 + ln(q)))`` with ``q = 1 - p``, fold the result into
``[0, 1)`` by taking the fractional part of its magnitude, and quantize to a
fixed number of bits.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

from .bitstring import BitString
from .errors import InvalidArgument, PersistentSingularityError, SingularityError
from .qstate import Basis, GateSpec, H, apply_gates, measure, new_register

CLAMP = 1e-9
SINGULARITY_TOL = 1e-6
MAX_RETRIES = 8
MAX_WIDTH = 256


@dataclass(frozen=True)
class PrepSpec:
    gates: tuple[GateSpec, ...] = (H(0),)
    desired: int = 0

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.desired not in (0, 1):
            raise InvalidArgument(f"desired must be 0 or 1, got {self.desired!r}")
        for g in self.gates:
            if any(t != 0 for t in g.targets):
                raise InvalidArgument(f"prep gates act on a single qubit; got {g}")


@dataclass(frozen=True)
class ProbEstimate:
    p: float
    shots: int

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise InvalidArgument(f"p must lie in [0, 1], got {self.p}")
        if self.shots < 1:
            raise InvalidArgument(f"shots must be >= 1, got {self.shots}")

    @property
    def q(self) -> float:
        return 1.0 - self.p


def sample_probability(prep: PrepSpec, shots: int, rng: random.Random) -> ProbEstimate:
    if shots < 1:
        raise InvalidArgument(f"shots must be >= 1, got {shots}")
    prepared = apply_gates(new_register(1), prep.gates)
    hits = 0
    for _ in range(shots):
        outcome = measure(prepared.copy(), 0, Basis.COMPUTATIONAL, rng)
        hits += outcome == prep.desired
    return ProbEstimate(hits / shots, shots)


def _clamp(x: float) -> float:
    return min(max(x, CLAMP), 1.0 - CLAMP)


def raw_random(est: ProbEstimate) -> float:
    p, q = _clamp(est.p), _clamp(est.q)
    denom = 1.0 + math.log(q)
    if abs(denom) < SINGULARITY_TOL:
        raise SingularityError(f"1 + ln(q) = {denom:.3g} at q = {q}")
    return math.log(p) / (2.0 * denom)


def to_unit_interval(raw: float) -> float:
    if not math.isfinite(raw):
        raise InvalidArgument(f"raw value must be finite, got {raw}")
    return math.modf(abs(raw))[0]


def quantize(u: float, width: int) -> BitString:
    if not 1 <= width <= MAX_WIDTH:
        raise InvalidArgument(f"width must be in [1, {MAX_WIDTH}], got {width}")
    if not 0.0 <= u < 1.0:
        raise InvalidArgument(f"u must lie in [0, 1), got {u}")
    # scaling by a power of two is exact in binary floating point
    return BitString(int(u * 2.0**width), width)


@dataclass(frozen=True)
class RandomDraw:
    raw: float
    unit: float
    bits: BitString
    shots: int


def draw(prep: PrepSpec, shots: int, width: int, rng: random.Random) -> RandomDraw:
    """Run the full pipeline, resampling with one more shot on a singularity."""
    for attempt in range(MAX_RETRIES + 1):
        est = sample_probability(prep, shots + attempt, rng)
        try:
            raw = raw_random(est)
        except SingularityError:
            continue
        unit = to_unit_interval(raw)
        return RandomDraw(raw, unit, quantize(unit, width), est.shots)
    raise PersistentSingularityError(
        f"formula singular for shots {shots}..{shots + MAX_RETRIES}"
    )


def random_bits(prep: PrepSpec, shots: int, width: int, rng: random.Random) -> BitString:
    return draw(prep, shots, width, rng).bits


def sweep(prep: PrepSpec, n_values: Sequence[int], width: int, seed: int) -> list[RandomDraw]:
    """One draw per ``n``; each restarts the same seeded stream, so row ``n``
    reflects the first ``n`` shots."""
    return [draw(prep, n, width, random.Random(seed)) for n in n_values]

"""Two-party state machines for Protocol 1 and Protocol 3.

Both protocols start with a quantum exchange: each party prepares Bell pairs,
applies its own unitary U, keeps the first half and sends the second through
the quantum channel. Alice then measures her own half (M1) and Bob's (M3);
Bob measures his own half (M2) and Alice's (M4).

Protocol 1 publishes ``M13 = M1 ^ M3`` and ``M24 = M2 ^ M4``, masks each
party's random value with ``M1234 = M13 || M24`` and XORs the two masked
values into ``MR_AB``. The key is ``SHA-256(MR_AB || M1234)``.

Protocol 3 keeps ``C`` (= ``M1 ^ M3`` for Alice, ``M2 ^ M4`` for Bob) private,
sends ``[R1 || C || R2]`` masked by C, checks that the peer's embedded C
matches its own, and derives ``SHA-256(K || C)`` with
``K = (R_A1 ^ R_B1) || (R_A2 ^ R_B2)``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .bitstring import BitString, concat, cyclic_extend, hamming, sha256_bits, split, xor_ext
from .channel import Channels, EveConfig, EveObservation, QubitRef, open_channels, q_transmit
from .errors import EavesdroppingDetected, InvalidArgument
from .qrng import MAX_WIDTH, PrepSpec, random_bits
from .qstate import (
    Basis,
    BellKind,
    GateSpec,
    H,
    apply_gates,
    make_bell_pair,
)

KEY_BITS = 256
ALICE = "alice"
BOB = "bob"


class Semantics(str, Enum):
    OUTCOME = "outcome"
    PROBABILITY = "probability"


@dataclass(frozen=True)
class ProtocolConfig:
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
    unitary_alice: tuple[GateSpec, ...] = ()
    unitary_bob: tuple[GateSpec, ...] = ()
    semantics: Semantics = Semantics.OUTCOME
    prep: PrepSpec = field(default_factory=PrepSpec)
    seed_alice: int = 1
    seed_bob: int = 2
    seed_eve: int = 3

    def __post_init__(self):
        object.__setattr__(self, "bell_kind", BellKind(self.bell_kind))
        object.__setattr__(self, "basis", Basis(self.basis))
        object.__setattr__(self, "semantics", Semantics(self.semantics))
        object.__setattr__(self, "unitary_alice", tuple(self.unitary_alice))
        object.__setattr__(self, "unitary_bob", tuple(self.unitary_bob))
        if self.protocol not in (1, 3):
            raise InvalidArgument(f"protocol must be 1 or 3, got {self.protocol!r}")
        if self.width < 8:
            raise InvalidArgument(f"width must be >= 8, got {self.width}")
        for name in ("n", "n1", "n2", "n3", "n4", "rounds"):
            if getattr(self, name) < 1:
                raise InvalidArgument(f"{name} must be >= 1, got {getattr(self, name)}")
        for g in self.unitary_alice + self.unitary_bob:
            if any(t > 1 for t in g.targets):
                raise InvalidArgument(f"U acts on a two-qubit pair; got {g}")


@dataclass
class PartyRecord:
    name: str
    rounds: list[dict[str, BitString]] = field(default_factory=list)
    key: BitString | None = None

    def __getitem__(self, name: str) -> BitString:
        """Value from the last round (the only round for Protocol 3)."""
        return self.rounds[-1][name]


@dataclass
class SessionTranscript:
    protocol: int
    alice: PartyRecord
    bob: PartyRecord
    eve_classical: list[BitString]
    eve_quantum: list[EveObservation]
    aborted: bool = False
    abort_reason: str | None = None

    @property
    def agreed(self) -> bool:
        return (
            not self.aborted
            and self.alice.key is not None
            and self.alice.key == self.bob.key
        )


@dataclass
class Party:
    name: str
    rng: random.Random
    unitary: tuple[GateSpec, ...]


def _parties(cfg: ProtocolConfig) -> tuple[Party, Party]:
    return (
        Party(ALICE, random.Random(cfg.seed_alice), cfg.unitary_alice),
        Party(BOB, random.Random(cfg.seed_bob), cfg.unitary_bob),
    )


def derive_key(k: BitString, c: BitString) -> BitString:
    return sha256_bits(concat(k, c))


def quantize_probability(p: float, width: int) -> BitString:
    """floor(p * 2^width) at any width, saturating p = 1 to all ones."""
    value = int(Fraction(p) * (1 << width))
    return BitString(min(value, (1 << width) - 1), width)


def random_value(prep: PrepSpec, shots: int, width: int, rng: random.Random) -> BitString:
    """A ``width``-bit random value; widths past the generator's cap are
    filled by successive draws."""
    chunks = []
    left = width
    while left:
        w = min(left, MAX_WIDTH)
        chunks.append(random_bits(prep, shots, w, rng))
        left -= w
    return concat(*chunks)


def mirror_extend(c: BitString, width: int) -> BitString:
    """Repeat ``c`` with every second copy bit-reversed: c, rev(c), c, ..."""
    block = concat(c, c.reversed())
    return cyclic_extend(block, width)


def mask_triple(r1: BitString, c: BitString, r2: BitString) -> BitString:
    triple = concat(r1, c, r2)
    return triple ^ mirror_extend(c, triple.width)


def unmask_triple(msg: BitString, c: BitString, widths: Sequence[int]) -> list[BitString]:
    return split(msg ^ mirror_extend(c, msg.width), widths)


# --- quantum exchange -------------------------------------------------------


def _prepare_pairs(ch: Channels, cfg: ProtocolConfig, party: Party, count: int):
    pairs = []
    for _ in range(count):
        keep, send = ch.store.allocate(party.name, make_bell_pair(cfg.bell_kind))
        ch.store.apply(party.name, keep.register_id, party.unitary)
        pairs.append((keep, send))
    return pairs


def protocol_measure(
    ch: Channels, cfg: ProtocolConfig, party: Party, refs: Sequence[QubitRef]
) -> BitString:
    """Turn a qubit role into a ``width``-bit value.

    Outcome semantics reads one collapse outcome from each of ``width``
    independently prepared qubits. Probability semantics quantizes the exact
    probability of reading 0 on a single qubit.
    """
    if cfg.semantics is Semantics.OUTCOME:
        if len(refs) != cfg.width:
            raise InvalidArgument(f"outcome semantics needs {cfg.width} qubits, got {len(refs)}")
        value = 0
        for r in refs:
            value = (value << 1) | ch.store.measure(party.name, r, cfg.basis, party.rng)
        return BitString(value, cfg.width)
    if len(refs) != 1:
        raise InvalidArgument(f"probability semantics needs one qubit, got {len(refs)}")
    p0 = ch.store.prob_of(party.name, refs[0], 0, cfg.basis)
    return quantize_probability(p0, cfg.width)


def quantum_exchange(ch: Channels, cfg: ProtocolConfig, alice: Party, bob: Party):
    """Prepare, apply U, cross-transmit and measure. Returns (M1, M3), (M2, M4)."""
    count = cfg.width if cfg.semantics is Semantics.OUTCOME else 1
    a_pairs = _prepare_pairs(ch, cfg, alice, count)
    b_pairs = _prepare_pairs(ch, cfg, bob, count)
    at_bob = [q_transmit(ch.quantum, s, ALICE, BOB) for _, s in a_pairs]
    at_alice = [q_transmit(ch.quantum, s, BOB, ALICE) for _, s in b_pairs]
    m1 = protocol_measure(ch, cfg, alice, [k for k, _ in a_pairs])
    m3 = protocol_measure(ch, cfg, alice, at_alice)
    m2 = protocol_measure(ch, cfg, bob, [k for k, _ in b_pairs])
    m4 = protocol_measure(ch, cfg, bob, at_bob)
    return (m1, m3), (m2, m4)


# --- protocols --------------------------------------------------------------


def run_protocol1(cfg: ProtocolConfig, channels: Channels | None = None) -> SessionTranscript:
    if cfg.protocol != 1:
        raise InvalidArgument("run_protocol1 needs protocol = 1")
    ch = channels or open_channels(EveConfig(), cfg.seed_eve)
    alice, bob = _parties(cfg)
    ra, rb = PartyRecord(ALICE), PartyRecord(BOB)
    W = cfg.width
    for _ in range(cfg.rounds):
        R_A = random_value(cfg.prep, cfg.n, W, alice.rng)
        R_B = random_value(cfg.prep, cfg.n, W, bob.rng)
        (M1, M3), (M2, M4) = quantum_exchange(ch, cfg, alice, bob)
        M13 = M1 ^ M3
        M24 = M2 ^ M4
        M13_at_bob = ch.classical.transmit(M13)
        M24_at_alice = ch.classical.transmit(M24)
        M1234_a = concat(M13, M24_at_alice)
        M1234_b = concat(M13_at_bob, M24)
        MR_A = xor_ext(M1234_a, R_A)
        MR_B = xor_ext(M1234_b, R_B)
        MR_A_at_bob = ch.classical.transmit(MR_A)
        MR_B_at_alice = ch.classical.transmit(MR_B)
        ra.rounds.append(dict(
            R_A=R_A, M1=M1, M3=M3, M13=M13, M24=M24_at_alice, M1234=M1234_a,
            MR_A=MR_A, MR_B=MR_B_at_alice, MR_AB=MR_A ^ MR_B_at_alice,
        ))
        rb.rounds.append(dict(
            R_B=R_B, M2=M2, M4=M4, M13=M13_at_bob, M24=M24, M1234=M1234_b,
            MR_A=MR_A_at_bob, MR_B=MR_B, MR_AB=MR_A_at_bob ^ MR_B,
        ))
    for rec in (ra, rb):
        rec.key = protocol1_key(rec.rounds)
    return SessionTranscript(1, ra, rb, list(ch.classical.eve_log), list(ch.quantum.eve_record))


def protocol1_key(rounds: Sequence[dict[str, BitString]]) -> BitString:
    """SHA-256(MR_AB || M1234); with several rounds all MR_AB values come
    first, then all M1234 values, each in round order."""
    return sha256_bits(concat(*[r["MR_AB"] for r in rounds], *[r["M1234"] for r in rounds]))


def run_protocol3(cfg: ProtocolConfig, channels: Channels | None = None) -> SessionTranscript:
    if cfg.protocol != 3:
        raise InvalidArgument("run_protocol3 needs protocol = 3")
    ch = channels or open_channels(EveConfig(), cfg.seed_eve)
    alice, bob = _parties(cfg)
    W = cfg.width
    (M1, M3), (M2, M4) = quantum_exchange(ch, cfg, alice, bob)
    C_a = M1 ^ M3
    C_b = M2 ^ M4
    R_A1 = random_value(cfg.prep, cfg.n1, W, alice.rng)
    R_A2 = random_value(cfg.prep, cfg.n2, W, alice.rng)
    R_B1 = random_value(cfg.prep, cfg.n3, W, bob.rng)
    R_B2 = random_value(cfg.prep, cfg.n4, W, bob.rng)
    Y = mask_triple(R_A1, C_a, R_A2)
    Z = mask_triple(R_B1, C_b, R_B2)
    Y_at_bob = ch.classical.transmit(Y)
    Z_at_alice = ch.classical.transmit(Z)
    ra = PartyRecord(ALICE, [dict(M1=M1, M3=M3, C=C_a, R_A1=R_A1, R_A2=R_A2, Y=Y, Z=Z_at_alice)])
    rb = PartyRecord(BOB, [dict(M2=M2, M4=M4, C=C_b, R_B1=R_B1, R_B2=R_B2, Z=Z, Y=Y_at_bob)])
    transcript = SessionTranscript(3, ra, rb, list(ch.classical.eve_log), list(ch.quantum.eve_record))

    rB1, mid_a, rB2 = unmask_triple(Z_at_alice, C_a, (W, W, W))
    rA1, mid_b, rA2 = unmask_triple(Y_at_bob, C_b, (W, W, W))
    for party, mid, c in ((ALICE, mid_a, C_a), (BOB, mid_b, C_b)):
        if mid != c:
            err = EavesdroppingDetected(party, hamming(mid, c), W, transcript)
            transcript.aborted = True
            transcript.abort_reason = str(err)
            raise err

    ra.rounds[0]["K"] = concat(R_A1 ^ rB1, R_A2 ^ rB2)
    rb.rounds[0]["K"] = concat(rA1 ^ R_B1, rA2 ^ R_B2)
    ra.key = derive_key(ra["K"], C_a)
    rb.key = derive_key(rb["K"], C_b)
    return transcript


def run_protocol(cfg: ProtocolConfig, channels: Channels | None = None) -> SessionTranscript:
    """Run either protocol; a detected eavesdropper yields an aborted transcript."""
    if cfg.protocol == 1:
        return run_protocol1(cfg, channels)
    try:
        return run_protocol3(cfg, channels)
    except EavesdroppingDetected as err:
        return err.transcript


# --- measured statistics ----------------------------------------------------


def c_mismatch_rate(t: SessionTranscript) -> float:
    """Fraction of positions where Alice's and Bob's correlation strings differ.

    For Protocol 1 the correlation strings are M13 (Alice) and M24 (Bob).
    """
    if t.protocol == 3:
        a, b = t.alice["C"], t.bob["C"]
    else:
        a = concat(*[r["M13"] for r in t.alice.rounds])
        b = concat(*[r["M24"] for r in t.bob.rounds])
    return hamming(a, b) / a.width


def correlation_parity(kind: BellKind, unitary: Sequence[GateSpec], basis: Basis) -> int | None:
    """XOR of the two halves' outcomes if it is deterministic, else None."""
    state = apply_gates(make_bell_pair(kind), tuple(unitary))
    if basis is Basis.HADAMARD:
        state = apply_gates(state, (H(0), H(1)))
    p = state.probabilities()
    odd = p[1] + p[2]
    if odd > 1 - 1e-9:
        return 1
    if odd < 1e-9:
        return 0
    return None


def eve_key_candidate(t: SessionTranscript, cfg: ProtocolConfig) -> BitString | None:
    """The key Eve computes from her classical log and quantum outcomes.

    Protocol 1: everything needed travels on the classical channel.
    Protocol 3: ``Y ^ Z`` yields K whenever both sides hold the same C, and
    C itself can only come from her intercept outcomes.
    """
    log = t.eve_classical
    W = cfg.width
    if t.protocol == 1:
        rounds = []
        for i in range(0, len(log), 4):
            m13, m24, mr_a, mr_b = log[i:i + 4]
            rounds.append({"M1234": concat(m13, m24), "MR_AB": mr_a ^ mr_b})
        return protocol1_key(rounds) if rounds else None

    if len(log) < 2 or cfg.semantics is not Semantics.OUTCOME:
        return None
    Y, Z = log[0], log[1]
    y1, _, y3 = split(Y, (W, W, W))
    z1, _, z3 = split(Z, (W, W, W))
    K = concat(y1 ^ z1, y3 ^ z3)
    a_to_b = [o for o in t.eve_quantum if o.link == f"{ALICE}->{BOB}"]
    b_to_a = [o for o in t.eve_quantum if o.link == f"{BOB}->{ALICE}"]
    if len(a_to_b) != W or len(b_to_a) != W:
        return None
    par = correlation_parity(cfg.bell_kind, cfg.unitary_alice, cfg.basis)
    if par is None:
        return None
    # Alice's M1 = Eve's A2 outcome ^ parity, Alice's M3 = Eve's B2 outcome
    c_guess = BitString.from_bits(
        a.outcome ^ b.outcome ^ par for a, b in zip(a_to_b, b_to_a)
    )
    return derive_key(K, c_guess)


def eve_knows_key(t: SessionTranscript, cfg: ProtocolConfig) -> bool:
    if t.aborted or t.alice.key is None:
        return False
    return eve_key_candidate(t, cfg) == t.alice.key


def with_seeds(cfg: ProtocolConfig, alice: int, bob: int, eve: int) -> ProtocolConfig:
    return replace(cfg, seed_alice=alice, seed_bob=bob, seed_eve=eve)

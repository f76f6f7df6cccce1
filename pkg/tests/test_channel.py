import random

import pytest

from hqkd.bitstring import BitString
from hqkd.channel import (
    ClassicalChannel, EveConfig, QuantumChannel, QubitStore, c_transmit,
    clone_attempt, open_channels, q_transmit,
)
from hqkd.errors import InvalidArgument, NoCloneViolation, ProtocolViolation
from hqkd.qstate import Basis, BellKind, H, make_bell_pair

B = BitString.from_str


def pair(store, owner="alice", kind=BellKind.PHI_PLUS):
    return store.allocate(owner, make_bell_pair(kind))


def test_eve_config_validation():
    with pytest.raises(InvalidArgument):
        EveConfig(flip_probability=1.5)
    with pytest.raises(ValueError):
        EveConfig(quantum_mode="photon-splitting")


def test_transmit_without_eve_preserves_amplitudes():
    ch = open_channels()
    keep, send = pair(ch.store)
    before = ch.store.amplitudes("alice", keep.register_id)
    got = q_transmit(ch.quantum, send, "alice", "bob")
    assert got == send
    assert ch.store.holder(got) == "bob"
    # alice no longer holds the whole register, so read the raw state directly
    after = ch.store._registers[keep.register_id].amplitudes
    assert max(abs(a - b) for a, b in zip(before, after)) <= 1e-15
    assert ch.quantum.eve_record == []


def test_same_basis_outcomes_agree_without_eve():
    ch = open_channels()
    rng = random.Random(4)
    for _ in range(500):
        keep, send = pair(ch.store)
        q_transmit(ch.quantum, send, "alice", "bob")
        assert ch.store.measure("alice", keep, Basis.COMPUTATIONAL, rng) == \
            ch.store.measure("bob", send, Basis.COMPUTATIONAL, rng)


def test_computational_eve_leaves_computational_correlations_intact():
    ch = open_channels(EveConfig("intercept-resend", "computational"), eve_seed=8)
    rng = random.Random(4)
    for _ in range(500):
        keep, send = pair(ch.store)
        q_transmit(ch.quantum, send, "alice", "bob")
        a = ch.store.measure("alice", keep, Basis.COMPUTATIONAL, rng)
        assert a == ch.store.measure("bob", send, Basis.COMPUTATIONAL, rng)
        assert ch.quantum.eve_record[-1].outcome == a


def test_random_basis_intercept_resend_disturbance():
    # analytic: half the time Eve picks the conjugate basis and then the
    # halves disagree with probability 1/2, so 1/4 overall
    ch = open_channels(EveConfig("intercept-resend", "random"), eve_seed=21)
    rng = random.Random(22)
    pairs = 10_000
    disagree = 0
    for _ in range(pairs):
        keep, send = pair(ch.store)
        q_transmit(ch.quantum, send, "alice", "bob")
        disagree += ch.store.measure("alice", keep, Basis.COMPUTATIONAL, rng) != \
            ch.store.measure("bob", send, Basis.COMPUTATIONAL, rng)
    assert disagree / pairs == pytest.approx(0.25, abs=0.02)
    bases = [o.basis for o in ch.quantum.eve_record]
    assert bases.count(Basis.HADAMARD) / pairs == pytest.approx(0.5, abs=0.02)


def test_eve_record_holds_only_bits_and_bases():
    ch = open_channels(EveConfig("intercept-resend", "random"), eve_seed=1)
    keep, send = pair(ch.store)
    q_transmit(ch.quantum, send, "alice", "bob")
    (obs,) = ch.quantum.eve_record
    assert obs.link == "alice->bob"
    assert obs.outcome in (0, 1)
    assert isinstance(obs.basis, Basis)
    assert set(vars(obs)) == {"link", "basis", "outcome"}


def test_channel_session_is_reproducible():
    def session():
        ch = open_channels(EveConfig("intercept-resend", "random", "tamper", 0.3), eve_seed=99)
        rng = random.Random(5)
        out = []
        for _ in range(50):
            keep, send = pair(ch.store)
            q_transmit(ch.quantum, send, "alice", "bob")
            out.append(ch.store.measure("bob", send, Basis.COMPUTATIONAL, rng))
            out.append(ch.classical.transmit(B("1100110011")).value)
        return out, ch.quantum.eve_record
    assert session() == session()


# --- no-cloning and custody ---------------------------------------------------


@pytest.fixture
def in_flight():
    store = QubitStore()
    ch = QuantumChannel(store, EveConfig("intercept-resend", "random"), random.Random(0))
    keep, send = pair(store)
    ch.send(send, "alice")
    return store, ch, keep, send


@pytest.mark.parametrize("who", ["alice", "bob", "eve"])
def test_in_flight_qubit_is_untouchable(in_flight, who):
    store, ch, keep, send = in_flight
    rng = random.Random(0)
    with pytest.raises(NoCloneViolation):
        store.measure(who, send, Basis.COMPUTATIONAL, rng)
    with pytest.raises(NoCloneViolation):
        store.prob_of(who, send, 0, Basis.COMPUTATIONAL)
    with pytest.raises(NoCloneViolation):
        store.apply(who, send.register_id, (H(send.index),))
    with pytest.raises(NoCloneViolation):
        store.amplitudes(who, send.register_id)
    with pytest.raises(NoCloneViolation):
        clone_attempt(ch, send)


def test_sender_keeps_access_to_its_own_half(in_flight):
    store, ch, keep, send = in_flight
    assert store.prob_of("alice", keep, 0, Basis.COMPUTATIONAL) == 0.5


def test_double_send_is_a_protocol_violation(in_flight):
    store, ch, keep, send = in_flight
    with pytest.raises(ProtocolViolation):
        ch.send(send, "alice")


def test_sender_loses_access_after_delivery(in_flight):
    store, ch, keep, send = in_flight
    ch.deliver(send, "bob")
    with pytest.raises(NoCloneViolation):
        store.prob_of("alice", send, 0, Basis.COMPUTATIONAL)
    with pytest.raises(NoCloneViolation):
        store.measure("alice", send, Basis.COMPUTATIONAL, random.Random(0))
    with pytest.raises(ProtocolViolation):
        ch.send(send, "alice")
    assert store.measure("bob", send, Basis.COMPUTATIONAL, random.Random(0)) in (0, 1)


def test_clone_attempt_always_fails():
    store = QubitStore()
    ch = QuantumChannel(store)
    keep, send = pair(store)
    for ref in (keep, send):
        with pytest.raises(NoCloneViolation):
            clone_attempt(ch, ref)


def test_deliver_requires_in_flight_qubit():
    store = QubitStore()
    ch = QuantumChannel(store)
    keep, send = pair(store)
    with pytest.raises(ProtocolViolation):
        ch.deliver(send, "bob")


def test_release_requires_full_custody():
    store = QubitStore()
    keep, send = pair(store)
    store.release("alice", keep.register_id)
    with pytest.raises(InvalidArgument):
        store.holder(keep)


# --- classical channel ---------------------------------------------------------


def test_classical_passive():
    ch = ClassicalChannel()
    assert c_transmit(ch, B("101101")) == B("101101")
    assert ch.eve_log == [B("101101")]


def test_classical_tamper_extremes():
    ch = ClassicalChannel(EveConfig(classical_mode="tamper", flip_probability=1.0))
    assert c_transmit(ch, B("1010")) == B("0101")
    assert ch.eve_log == [B("1010")]
    zero = ClassicalChannel(EveConfig(classical_mode="tamper", flip_probability=0.0))
    assert c_transmit(zero, B("1010")) == B("1010")


def test_classical_log_completeness():
    ch = ClassicalChannel(EveConfig(classical_mode="tamper", flip_probability=0.5), random.Random(3))
    sent = [BitString(random.Random(i).getrandbits(12), 12) for i in range(25)]
    for s in sent:
        c_transmit(ch, s)
    assert ch.eve_log == sent

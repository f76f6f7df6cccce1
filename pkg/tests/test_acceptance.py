"""Exit criteria. Each test records one PASS/FAIL line, printed in the
terminal summary under "acceptance criteria"."""
import itertools
import math
import random

import numpy as np
import pytest

from hqkd.bitstring import BitString, cyclic_extend
from hqkd.channel import EveConfig, QuantumChannel, QubitStore, clone_attempt, open_channels
from hqkd.errors import NoCloneViolation, ProtocolViolation, SingularityError
from hqkd.harness import SessionConfig, eve_study
from hqkd.harness.cli import main
from hqkd.protocols import ProtocolConfig, derive_key, run_protocol1, run_protocol3, with_seeds
from hqkd.qrng import ProbEstimate, raw_random
from hqkd.qstate import (
    Basis, BellKind, GateSpec, H, StateVector, apply_gate, make_bell_pair, measure, prob_of,
)

from oracles import dense

SESSIONS = 1000


def test_01_gate_oracle_equivalence(criterion):
    with criterion("1 gate oracle equivalence (n<=3, all gates, 1e-12)", budget_s=1.0):
        rng = np.random.default_rng(0)
        for n in (1, 2, 3):
            dim = 1 << n
            inputs = list(np.eye(dim, dtype=complex))
            for _ in range(4):
                v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
                inputs.append(v / np.linalg.norm(v))
            specs = [GateSpec(g, (q,)) for g in ("H", "X", "Z") for q in range(n)]
            specs += [GateSpec(g, pair) for g in ("CX", "SWAP")
                      for pair in itertools.permutations(range(n), 2)]
            for spec in specs:
                m = dense(n, spec.gate, spec.targets)
                for v in inputs:
                    got = np.array(apply_gate(StateVector(n, list(v)), spec).amplitudes)
                    assert np.max(np.abs(got - m @ v)) <= 1e-12, (n, spec)


def test_02_bell_correlations(criterion):
    with criterion("2 Bell marginals = 0.5 exactly; 10^4 PhiPlus shots, 0 disagreements", budget_s=1.0):
        for kind in BellKind:
            for q in (0, 1):
                for outcome in (0, 1):
                    assert prob_of(make_bell_pair(kind), q, outcome, Basis.COMPUTATIONAL) == 0.5
        rng = random.Random(2)
        disagreements = 0
        for _ in range(10_000):
            s = make_bell_pair(BellKind.PHI_PLUS)
            disagreements += measure(s, 0, Basis.COMPUTATIONAL, rng) != measure(s, 1, Basis.COMPUTATIONAL, rng)
        assert disagreements == 0


@pytest.mark.parametrize("label, p, expected", [
    ("3a raw_random(0.5, 0.5) = -1.129324 +- 1e-6", 0.5, -1.129324),
    ("3b raw_random(0.9, 0.1) = 0.040443 +- 1e-6", 0.9, 0.040443),
])
def test_03_rng_formula_spot_checks(criterion, label, p, expected):
    with criterion(label):
        raw = raw_random(ProbEstimate(p, 1))
        assert abs(raw - expected) <= 1e-6, f"raw = {raw!r}"


def test_03c_singularity_at_inverse_e(criterion):
    with criterion("3c singularity error at q = e^-1 +- 1e-9"):
        for dq in (-1e-9, 0.0, 1e-9):
            q = math.exp(-1) + dq
            with pytest.raises(SingularityError):
                raw_random(ProbEstimate(1 - q, 1))


def test_04_rng_sweep(criterion, tmp_path):
    with criterion("4 rng-sweep n=1..100: 100 rows, unit in [0,1), byte-identical", budget_s=5.0):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            assert main(["rng-sweep", "--n-min", "1", "--n-max", "100", "--seed", "42", "--out", str(out)]) == 0
        rows = a.read_text().splitlines()
        assert rows[0] == "n,raw,unit,hex_bits"
        assert len(rows) == 101
        assert all(0.0 <= float(r.split(",")[2]) < 1.0 for r in rows[1:])
        assert a.read_bytes() == b.read_bytes()


def test_05_protocol1_identity(criterion):
    with criterion(f"5 Protocol 1 MR_AB identity over {SESSIONS} sessions", budget_s=10.0):
        evs = [EveConfig(), EveConfig("intercept-resend", "random", "passive")]
        for s in range(SESSIONS):
            cfg = with_seeds(ProtocolConfig(protocol=1), 2 * s, 2 * s + 1, s)
            t = run_protocol1(cfg, open_channels(evs[s % 2], s))
            a, b = t.alice.rounds[0], t.bob.rounds[0]
            assert a["MR_AB"] == b["MR_AB"]
            assert a["MR_AB"] == a["MR_A"] ^ a["MR_B"]
            w = a["MR_AB"].width
            assert a["MR_AB"] == cyclic_extend(a["R_A"], w) ^ cyclic_extend(b["R_B"], w)


def test_06_protocol3_agreement(criterion):
    with criterion(f"6 Protocol 3 no-Eve agreement, {SESSIONS} sessions, W=64", budget_s=30.0):
        keys = []
        for s in range(SESSIONS):
            t = run_protocol3(with_seeds(ProtocolConfig(width=64), 2 * s, 2 * s + 1, s))
            assert t.agreed and t.alice.key == t.bob.key
            assert t.alice.key.width == 256
            keys.append(t.alice.key)
        assert len(set(keys)) == SESSIONS


def test_07_eve_disturbance(criterion):
    with criterion("7 Eve disturbance: mean C mismatch 0.375+-0.02 (W=4096); abort >= 0.99 (W=64)",
                   budget_s=60.0):
        eve = EveConfig("intercept-resend", "random")
        _, wide, _ = eve_study(SessionConfig(width=4096, trials=100, seed=7, eve=eve))
        assert abs(wide.mean_c_mismatch_rate - 0.375) <= 0.02, wide
        _, narrow, _ = eve_study(SessionConfig(width=64, trials=1000, seed=8, eve=eve))
        assert narrow.abort_frequency >= 0.99, narrow


def test_08_no_cloning(criterion):
    with criterion("8 no-cloning: every read path on an in-flight qubit is refused"):
        rng = random.Random(0)
        paths = {
            "measure": lambda st, who, ref: st.measure(who, ref, Basis.COMPUTATIONAL, rng),
            "measure-hadamard": lambda st, who, ref: st.measure(who, ref, Basis.HADAMARD, rng),
            "prob_of": lambda st, who, ref: st.prob_of(who, ref, 0, Basis.COMPUTATIONAL),
            "prob_of-hadamard": lambda st, who, ref: st.prob_of(who, ref, 1, Basis.HADAMARD),
            "apply": lambda st, who, ref: st.apply(who, ref.register_id, (H(ref.index),)),
            "amplitudes": lambda st, who, ref: st.amplitudes(who, ref.register_id),
            "release": lambda st, who, ref: st.release(who, ref.register_id),
        }
        checked = 0
        for kind, path, who in itertools.product(BellKind, paths, ("alice", "bob", "eve")):
            store = QubitStore()
            ch = QuantumChannel(store, EveConfig("intercept-resend"), random.Random(1))
            keep, send = store.allocate("alice", make_bell_pair(kind))
            before = list(store._registers[send.register_id].amplitudes)
            ch.send(send, "alice")
            with pytest.raises(NoCloneViolation):
                paths[path](store, who, send)
            with pytest.raises(NoCloneViolation):
                clone_attempt(ch, send)
            with pytest.raises(ProtocolViolation):
                ch.send(send, "alice")
            assert store._registers[send.register_id].amplitudes == before
            ch.deliver(send, "bob")
            if who == "alice":
                # sender access stays revoked after delivery
                with pytest.raises(NoCloneViolation):
                    paths[path](store, who, send)
            checked += 1
            # Eve's record never carries amplitudes
            assert all(set(vars(o)) == {"link", "basis", "outcome"} for o in ch.eve_record)
        assert checked == 4 * len(paths) * 3


def test_09_determinism(criterion, tmp_path, capsys):
    with criterion("9 determinism: byte-identical run reports and threaded eve-study CSV"):
        reports = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            assert main(["run", "--seed", "42", "--eve", "intercept-resend", "--eve-basis",
                         "computational", "--out", str(out)]) == 0
            reports.append(out.read_bytes())
        assert reports[0] == reports[1]
        csvs = []
        for jobs in ("1", "4"):
            out = tmp_path / f"study{jobs}.csv"
            assert main(["eve-study", "--trials", "40", "--seed", "5", "--eve", "intercept-resend",
                         "--jobs", jobs, "--out", str(out)]) == 0
            csvs.append(out.read_bytes())
        assert csvs[0] == csvs[1]


def test_10_hash_contract(criterion):
    with criterion("10 derive_key: 256 bits at widths 8 and 10^5; SHA-256 empty vector"):
        assert derive_key(BitString(0xA5, 8), BitString(0, 0)).width == 256
        big = BitString(random.Random(1).getrandbits(100_000), 100_000)
        assert derive_key(big, BitString(0, 0)).width == 256
        empty = derive_key(BitString(0, 0), BitString(0, 0))
        assert empty.hex() == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"

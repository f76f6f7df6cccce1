"""Eavesdropping statistics across attack strategies and protocols.

    python scripts/eve_disturbance.py --trials 200 --width 64
"""
import argparse
import time

from hqkd.channel import EveConfig
from hqkd.harness import SessionConfig, eve_study

ATTACKS = {
    "none": EveConfig(),
    "ir-random": EveConfig("intercept-resend", "random"),
    "ir-computational": EveConfig("intercept-resend", "computational"),
    "ir-hadamard": EveConfig("intercept-resend", "hadamard"),
    "tamper-0.01": EveConfig(classical_mode="tamper", flip_probability=0.01),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--width", type=int, default=64)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    print(f"{'protocol':>8} {'attack':>17} {'c_mismatch':>10} {'abort':>6} {'agree':>6} {'eve_knows':>9}")
    for protocol in (1, 3):
        for name, eve in ATTACKS.items():
            cfg = SessionConfig(protocol=protocol, width=args.width, trials=args.trials,
                                seed=args.seed, jobs=args.jobs, eve=eve)
            t0 = time.perf_counter()
            _, s, _ = eve_study(cfg)
            print(f"{protocol:>8} {name:>17} {s.mean_c_mismatch_rate:>10.4f} "
                  f"{s.abort_frequency:>6.3f} {s.agreement_rate:>6.3f} {s.eve_knowledge_rate:>9.3f}"
                  f"   ({time.perf_counter() - t0:.1f}s)")


if __name__ == "__main__":
    main()

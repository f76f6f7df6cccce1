"""Experiment drivers behind the CLI commands."""
from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from ..channel import open_channels
from ..errors import InvalidArgument
from ..protocols import c_mismatch_rate, eve_knows_key, run_protocol
from ..qrng import PrepSpec, sweep
from .config import SessionConfig
from .report import SessionReport

SWEEP_HEADER = ("n", "raw", "unit", "hex_bits")
STUDY_HEADER = ("trial", "c_mismatch_rate", "aborted", "agreed")


def run_session(cfg: SessionConfig, trial: int | None = None) -> SessionReport:
    pcfg = cfg.protocol_config(trial)
    start = time.perf_counter()
    channels = open_channels(cfg.eve, pcfg.seed_eve)
    t = run_protocol(pcfg, channels)
    elapsed = time.perf_counter() - start
    return SessionReport.from_transcript(
        t,
        cfg.to_dict(),
        c_mismatch_rate=c_mismatch_rate(t),
        eve_knowledge=eve_knows_key(t, pcfg),
        duration_s=elapsed if cfg.timing else None,
    )


def rng_sweep(prep: PrepSpec, n_min: int, n_max: int, width: int, seed: int) -> str:
    """CSV text with one row per shot count ``n`` in ``[n_min, n_max]``."""
    if not 1 <= n_min <= n_max:
        raise InvalidArgument(f"need 1 <= n_min <= n_max, got {n_min}..{n_max}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    ns = range(n_min, n_max + 1)
    for n, d in zip(ns, sweep(prep, ns, width, seed)):
        w.writerow((n, repr(d.raw), repr(d.unit), d.bits.hex()))
    return buf.getvalue()


@dataclass
class StudySummary:
    trials: int
    mean_c_mismatch_rate: float
    abort_frequency: float
    agreement_rate: float
    eve_knowledge_rate: float

    def comment(self) -> str:
        return (
            f"# trials={self.trials} mean_c_mismatch_rate={self.mean_c_mismatch_rate!r} "
            f"abort_frequency={self.abort_frequency!r} agreement_rate={self.agreement_rate!r} "
            f"eve_knowledge_rate={self.eve_knowledge_rate!r}"
        )


def eve_study(cfg: SessionConfig) -> tuple[list[SessionReport], StudySummary, str]:
    """Run ``cfg.trials`` independent sessions, ``cfg.jobs`` at a time.

    Each trial derives its own seeds from (seed, trial index) and owns its
    channels, so the output does not depend on ``jobs``.
    """
    trials = range(cfg.trials)
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            reports = list(pool.map(lambda i: run_session(cfg, i), trials))
    else:
        reports = [run_session(cfg, i) for i in trials]
    k = len(reports)
    summary = StudySummary(
        trials=k,
        mean_c_mismatch_rate=sum(r.c_mismatch_rate for r in reports) / k,
        abort_frequency=sum(r.aborted for r in reports) / k,
        agreement_rate=sum(r.agreed for r in reports) / k,
        eve_knowledge_rate=sum(r.eve_knowledge for r in reports) / k,
    )
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(STUDY_HEADER)
    for i, r in enumerate(reports):
        w.writerow((i, repr(r.c_mismatch_rate), str(r.aborted).lower(), str(r.agreed).lower()))
    buf.write(summary.comment() + "\n")
    return reports, summary, buf.getvalue()

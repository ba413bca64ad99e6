"""Discrete-event reference simulation of steady-state Trickle.

Every node keeps fixed-length intervals with an independent uniform phase
offset, so interval boundaries are unsynchronized across the network. Per
interval a node draws a firing instant uniformly in the second half, counts
consistent receptions since the interval began, and transmits at its instant
only while that counter is below its redundancy constant. Deliveries are
instantaneous and lossless to every radio neighbor; there is no radio or MAC
modeling. Results are deterministic for a fixed base seed: run r, node i
draws from an independent substream seeded with (base_seed, r, i).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

CI95_Z = 1.96  # normal approximation quantile for two-sided 95%


@dataclass(frozen=True)
class TrickleParams:
    """Scenario controls; defaults match the bundled study setup."""

    interval_length: float = 16.0
    measured_intervals: int = 10
    warmup_intervals: int = 2
    runs: int = 30
    base_seed: int = 1

    def __post_init__(self) -> None:
        if self.interval_length <= 0:
            raise ValueError("interval_length must be positive")
        if self.measured_intervals < 1:
            raise ValueError("measured_intervals must be >= 1")
        if self.warmup_intervals < 0:
            raise ValueError("warmup_intervals must be >= 0")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")


class TraceEvent(NamedTuple):
    """One firing decision: the counter seen at the node's instant."""

    run: int
    node: int
    interval: int
    counter: int
    transmitted: bool


@dataclass(frozen=True)
class SimulationResult:
    """Per-run transmission counts inside the measured window plus estimates."""

    counts: np.ndarray  # shape (runs, N), integer
    mean_p: np.ndarray
    ci95: np.ndarray | None  # half-widths; None when runs < 2
    params: TrickleParams
    trace: tuple[TraceEvent, ...] | None = None


def _single_run(topology, ks, params: TrickleParams, run_idx: int, trace_out) -> np.ndarray:
    n = topology.n
    interval = params.interval_length
    # One trailing interval beyond the measured window keeps late-phase
    # neighbors firing while early-phase nodes finish their last measured
    # interval; warmup absorbs the mirrored start-of-run truncation.
    total = params.warmup_intervals + params.measured_intervals + 1

    phases = np.empty(n)
    events = []
    for i in range(n):
        rng = np.random.default_rng((params.base_seed, run_idx, i))
        phases[i] = rng.uniform(0.0, interval)
        offsets = rng.uniform(interval / 2.0, interval, size=total)
        for m in range(total):
            events.append((phases[i] + m * interval + offsets[m], i, m))
    events.sort()  # ties (measure zero) break by ascending node id

    counter = [0] * n
    current = [-(1 << 60)] * n  # interval index the counter belongs to
    counts = np.zeros(n, dtype=np.int64)
    first = params.warmup_intervals
    last = params.warmup_intervals + params.measured_intervals
    neighbor_lists = topology.neighbor_lists
    for t, i, m in events:
        if current[i] != m:
            current[i] = m
            counter[i] = 0
        fire = counter[i] < ks[i]
        if trace_out is not None:
            trace_out.append(TraceEvent(run_idx, i, m, counter[i], fire))
        if not fire:
            continue
        if first <= m < last:
            counts[i] += 1
        for j in neighbor_lists[i]:
            mj = math.floor((t - phases[j]) / interval)
            if current[j] != mj:
                current[j] = mj
                counter[j] = 0
            counter[j] += 1
    return counts


def run_steady_state(topology, k_assignment, params: TrickleParams, record_trace: bool = False) -> SimulationResult:
    """Simulate `runs` independent repetitions and estimate per-node probabilities."""
    if len(k_assignment.k) != topology.n:
        raise ValueError("k_assignment length does not match topology")
    ks = k_assignment.k
    trace: list[TraceEvent] | None = [] if record_trace else None
    counts = np.empty((params.runs, topology.n), dtype=np.int64)
    for r in range(params.runs):
        counts[r] = _single_run(topology, ks, params, r, trace)
    mean_p, ci95 = _estimate(counts, params)
    return SimulationResult(
        counts=counts,
        mean_p=mean_p,
        ci95=ci95,
        params=params,
        trace=tuple(trace) if trace is not None else None,
    )


def _estimate(counts: np.ndarray, params: TrickleParams):
    freqs = counts / float(params.measured_intervals)
    mean_p = freqs.mean(axis=0)
    if params.runs < 2:
        return mean_p, None
    half = CI95_Z * freqs.std(axis=0, ddof=1) / math.sqrt(params.runs)
    return mean_p, half


def estimate_probabilities(result: SimulationResult):
    """Mean per-node frequency over runs and 95% CI half-widths.

    The CI uses a normal approximation over the per-run frequencies and is
    None when the result holds fewer than two runs.
    """
    return _estimate(result.counts, result.params)


def save_result(path, result: SimulationResult, extra: dict | None = None) -> None:
    """Write a simulation result as JSON (no trace; results stay compact)."""
    import json

    params = result.params
    doc = {
        "params": {
            "interval_length": params.interval_length,
            "measured_intervals": params.measured_intervals,
            "warmup_intervals": params.warmup_intervals,
            "runs": params.runs,
            "base_seed": params.base_seed,
        },
        "per_node": [
            {
                "id": i,
                "mean_p": float(result.mean_p[i]),
                "ci95": None if result.ci95 is None else float(result.ci95[i]),
                "counts_per_run": [int(c) for c in result.counts[:, i]],
            }
            for i in range(result.counts.shape[1])
        ],
    }
    if extra:
        doc.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_result(path) -> dict:
    """Read a simulation result JSON file; per-node records sorted by id."""
    import json

    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    for field in ("params", "per_node"):
        if field not in doc:
            raise ValueError(f"{path}: missing field {field!r}")
    doc["per_node"] = sorted(doc["per_node"], key=lambda rec: rec["id"])
    return doc


def save_result_csv(path, result: SimulationResult) -> None:
    import csv

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "mean_p", "ci95"])
        for i in range(result.counts.shape[1]):
            ci = "" if result.ci95 is None else repr(float(result.ci95[i]))
            writer.writerow([i, repr(float(result.mean_p[i])), ci])

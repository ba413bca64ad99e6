"""Average per-node transmission probabilities for steady-state Trickle.

With unsynchronized fixed-length intervals, the firing instants of a node's
neighbors land uniformly over the node's own interval, so the number of them
earlier than the node's instant T ~ U[I/2, I) is binomial with success
probability T/I. Marginalizing over T gives a closed-form mass function with
exact dyadic values:

    P(earlier count = n) = 2/(y+1) * 2^-(y+1) * sum_{m=0}^{n} C(y+1, m)

A node with y neighbors and redundancy constant K transmits when it draws one
of the first K instants, or a later instant while fewer than K of the
earlier-slotted neighbors actually transmitted. Expressing that probability
through the neighbors' own transmission probabilities couples the network
into N equations in N unknowns, which are solved here by damped fixed-point
iteration. Neighbor transmissions are treated as independent events; the
discrete-event simulator quantifies the error this approximation introduces.
"""
from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Degrees beyond this are rejected rather than risking loss of the exact
# dyadic arithmetic guarantees in downstream float conversions.
MAX_DEGREE = 64

_STALL_LIMIT = 10  # iterations without residual progress before damping drops
_FALLBACK_DAMPING = 0.5


@dataclass(frozen=True)
class YtDistribution:
    """Distribution of the number of neighbor instants earlier than a node's own."""

    y: int
    pmf: np.ndarray


@dataclass(frozen=True)
class SolverConfig:
    """Fixed-point iteration controls.

    damping is the initial mixing weight on the update; it falls back to 0.5
    automatically if the residual stalls. init is the starting probability
    for nodes that are not forced to 1.
    """

    tolerance: float = 1e-10
    max_iterations: int = 10000
    damping: float = 1.0
    init: float = 0.5

    def __post_init__(self) -> None:
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not 0.0 < self.damping <= 1.0:
            raise ValueError("damping must be in (0, 1]")
        if not 0.0 <= self.init <= 1.0:
            raise ValueError("init must be in [0, 1]")


@dataclass(frozen=True)
class ModelSolution:
    """Converged (or flagged) per-node probabilities with solver diagnostics."""

    p_tx: np.ndarray
    p_f: np.ndarray
    p_lo: np.ndarray
    iterations: int
    residual: float
    converged: bool


@lru_cache(maxsize=None)
def _yt_pmf_values(y: int) -> tuple[float, ...]:
    # Exact dyadic rationals: numerator and denominator stay integers until
    # the final correctly-rounded float division.
    denom = (y + 1) << (y + 1)
    values = []
    acc = 0
    for n in range(y + 1):
        acc += math.comb(y + 1, n)
        values.append(2 * acc / denom)
    return tuple(values)


def yt_pmf(y: int) -> YtDistribution:
    """Mass function of the earlier-instant count for a node with y neighbors."""
    if y < 0:
        raise ValueError("neighbor count must be >= 0")
    if y > MAX_DEGREE:
        raise ValueError(f"degree {y} exceeds the supported maximum of {MAX_DEGREE}")
    return YtDistribution(y, np.array(_yt_pmf_values(y)))


def p_first(y: int, k: int) -> float:
    """Probability of drawing one of the first k instants among y+1 unordered ones.

    Equals 1 when k > y (the node always holds an early enough slot).
    """
    if y < 0:
        raise ValueError("neighbor count must be >= 0")
    if k < 1:
        raise ValueError("redundancy constant must be >= 1")
    if k > y:
        return 1.0
    if y > MAX_DEGREE:
        raise ValueError(f"degree {y} exceeds the supported maximum of {MAX_DEGREE}")
    acc = 0
    run = 0
    for n in range(k):
        run += math.comb(y + 1, n)
        acc += run
    return 2 * acc / ((y + 1) << (y + 1))


def gamma_exact(j: int, probs) -> float:
    """Probability that exactly j of the given independent events occur.

    Brute-force subset enumeration, exponential in len(probs); kept as the
    reference oracle for the polynomial-time path.
    """
    p = [float(v) for v in probs]
    if any(v < 0.0 or v > 1.0 for v in p):
        raise ValueError("probabilities must lie in [0, 1]")
    if not 0 <= j <= len(p):
        raise ValueError("j must lie in 0..len(probs)")
    total = 0.0
    for chosen in itertools.combinations(range(len(p)), j):
        members = set(chosen)
        term = 1.0
        for idx, v in enumerate(p):
            term *= v if idx in members else 1.0 - v
        total += term
    return total


def _subset_weights(probs: np.ndarray, cap: int) -> np.ndarray:
    """DP table W[m, j] = sum over m-subsets B of P(exactly j members of B occur).

    One pass over the neighbors; states with j >= cap are dropped since they
    can never fall back below the threshold. Cost O(len(probs) * m * cap).
    """
    y = len(probs)
    w = np.zeros((y + 1, cap))
    w[0, 0] = 1.0
    for p in probs:
        nxt = w.copy()
        nxt[1:, :] += (1.0 - p) * w[:-1, :]
        nxt[1:, 1:] += p * w[:-1, :-1]
        w = nxt
    return w


def subset_cdf_average(neighbor_probs, n: int, k: int) -> float:
    """Average, over all n-subsets B of the neighbors, of P(at most k-1 of B occur).

    Computed in polynomial time by dynamic programming over the neighbor list;
    agrees with explicit enumeration through gamma_exact.
    """
    probs = np.asarray(neighbor_probs, dtype=float)
    y = len(probs)
    if k < 1:
        raise ValueError("k must be >= 1")
    if not k <= n <= y:
        raise ValueError("need k <= n <= len(neighbor_probs)")
    if np.any(probs < 0.0) or np.any(probs > 1.0):
        raise ValueError("probabilities must lie in [0, 1]")
    w = _subset_weights(probs, cap=k)
    return float(w[n].sum() / math.comb(y, n))


def p_last_opportunity(y: int, k: int, neighbor_probs) -> float:
    """Probability of transmitting from one of the last y+1-k slots.

    Conditions on the number n of earlier-slotted neighbors and requires that
    at most k-1 of them actually transmit, averaged uniformly over which
    neighbors hold the earlier slots.
    """
    probs = np.asarray(neighbor_probs, dtype=float)
    if len(probs) != y:
        raise ValueError("neighbor_probs must have length y")
    if k < 1:
        raise ValueError("k must be >= 1")
    if y < k:
        raise ValueError("need y >= k; nodes with y < k transmit surely")
    if np.any(probs < 0.0) or np.any(probs > 1.0):
        raise ValueError("probabilities must lie in [0, 1]")
    pmf = yt_pmf(y).pmf
    w = _subset_weights(probs, cap=k)
    total = 0.0
    for n in range(k, y + 1):
        total += pmf[n] * w[n].sum() / math.comb(y, n)
    return float(total)


def update_map(topology, k_assignment, current_p) -> np.ndarray:
    """One Jacobi sweep of the coupled probability equations.

    Nodes with fewer neighbors than their redundancy constant map to exactly
    1; all others map to p_first + p_last_opportunity evaluated against the
    previous iterate. Output is clipped to [0, 1] against rounding.
    """
    p = np.asarray(current_p, dtype=float)
    if p.shape != (topology.n,):
        raise ValueError(f"current_p must have shape ({topology.n},)")
    if np.any(p < 0.0) or np.any(p > 1.0):
        raise ValueError("current_p entries must lie in [0, 1]")
    out = np.empty(topology.n)
    for i in range(topology.n):
        y = topology.degree(i)
        k = k_assignment.k[i]
        if y < k:
            out[i] = 1.0
        else:
            neigh = p[list(topology.neighbors(i))]
            out[i] = p_first(y, k) + p_last_opportunity(y, k, neigh)
    return np.clip(out, 0.0, 1.0)


def solve_fixed_point(topology, k_assignment, config: SolverConfig | None = None) -> ModelSolution:
    """Solve the N-equation system by damped fixed-point iteration.

    Stops when the fixed-point defect max|F(p) - p| drops below the
    tolerance. Non-convergence is reported through the `converged` flag, not
    raised; non-finite iterates abort with a diagnostic.
    """
    cfg = config or SolverConfig()
    if len(k_assignment.k) != topology.n:
        raise ValueError("k_assignment length does not match topology")
    degrees = topology.degrees
    ks = np.array(k_assignment.k, dtype=int)
    p = np.where(degrees < ks, 1.0, cfg.init)

    alpha = cfg.damping
    stall = 0
    prev_defect = math.inf
    defect = math.inf
    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_iterations + 1):
        f = update_map(topology, k_assignment, p)
        if not np.all(np.isfinite(f)):
            raise FloatingPointError(
                f"non-finite iterate at iteration {iterations}; last residual {defect:.3e}"
            )
        defect = float(np.max(np.abs(f - p)))
        if defect < cfg.tolerance:
            converged = True
            break
        if defect >= prev_defect:
            stall += 1
            if stall >= _STALL_LIMIT and alpha > _FALLBACK_DAMPING:
                alpha = _FALLBACK_DAMPING
                stall = 0
        else:
            stall = 0
        prev_defect = defect
        p = p + alpha * (f - p)

    p_f = np.empty(topology.n)
    p_lo = np.empty(topology.n)
    for i in range(topology.n):
        y = int(degrees[i])
        k = int(ks[i])
        p_f[i] = p_first(y, k)
        if y < k:
            p_lo[i] = 0.0
        else:
            p_lo[i] = p_last_opportunity(y, k, p[list(topology.neighbors(i))])
    return ModelSolution(
        p_tx=p,
        p_f=p_f,
        p_lo=p_lo,
        iterations=iterations,
        residual=defect,
        converged=converged,
    )


def expected_message_count(solution: ModelSolution) -> float:
    """Expected network-wide message count per interval: sum of the p_tx."""
    if not solution.converged:
        raise ValueError("expected_message_count needs a converged solution")
    return float(solution.p_tx.sum())


def save_solution(path, topology, k_assignment, solution: ModelSolution, extra: dict | None = None) -> None:
    """Write a solution as JSON: per-node records plus solver diagnostics."""
    doc = {
        "converged": bool(solution.converged),
        "iterations": int(solution.iterations),
        "residual": float(solution.residual),
        "policy": k_assignment.policy,
        "per_node": [
            {
                "id": i,
                "degree": int(topology.degree(i)),
                "k": int(k_assignment.k[i]),
                "p_tx": float(solution.p_tx[i]),
                "p_f": float(solution.p_f[i]),
                "p_lo": float(solution.p_lo[i]),
            }
            for i in range(topology.n)
        ],
    }
    if extra:
        doc.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_solution(path) -> dict:
    """Read a solution JSON file; per-node records come back sorted by id."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    for field in ("converged", "iterations", "residual", "per_node"):
        if field not in doc:
            raise ValueError(f"{path}: missing field {field!r}")
    doc["per_node"] = sorted(doc["per_node"], key=lambda rec: rec["id"])
    return doc


def save_solution_csv(path, topology, k_assignment, solution: ModelSolution) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "degree", "k", "p_tx", "p_f", "p_lo"])
        for i in range(topology.n):
            writer.writerow(
                [
                    i,
                    topology.degree(i),
                    k_assignment.k[i],
                    repr(float(solution.p_tx[i])),
                    repr(float(solution.p_f[i])),
                    repr(float(solution.p_lo[i])),
                ]
            )

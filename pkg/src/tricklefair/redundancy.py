"""Per-node redundancy constants.

Either a fixed network-wide K, or a local rule that scales K with the number
of neighbors: K = 1 for nodes with at most `offset` neighbors, and K grows by
one for every further `step` neighbors. Denser neighborhoods then tolerate
more suppression, which evens out the transmission load.
"""
from __future__ import annotations

from dataclasses import dataclass

DEFAULT_STEP = 3
DEFAULT_OFFSET = 0


@dataclass(frozen=True)
class KAssignment:
    """Redundancy constant per node id plus the policy that produced it."""

    k: tuple[int, ...]
    policy: dict


def fixed_policy(k: int) -> dict:
    return {"mode": "fixed", "k": int(k)}


def heuristic_policy(step: int = DEFAULT_STEP, offset: int = DEFAULT_OFFSET) -> dict:
    return {"mode": "heuristic", "step": int(step), "offset": int(offset)}


def calculate_k(num_neighbors: int, step: int, offset: int = 0) -> int:
    """Local redundancy constant from the neighbor count.

    Returns 1 when num_neighbors <= offset, otherwise
    ceil((num_neighbors - offset) / step). The result is clamped to >= 1:
    K = 0 would suppress every transmission.
    """
    if step < 1:
        raise ValueError("step must be >= 1")
    if offset < 0:
        raise ValueError("offset must be >= 0")
    if num_neighbors < 0:
        raise ValueError("num_neighbors must be >= 0")
    if num_neighbors <= offset:
        return 1
    return max(1, -(-(num_neighbors - offset) // step))


def assign_k(topology, policy: dict) -> KAssignment:
    """Evaluate a policy descriptor on every node of a topology."""
    mode = policy.get("mode")
    if mode == "fixed":
        k = int(policy["k"])
        if k < 1:
            raise ValueError("fixed K must be >= 1")
        ks = (k,) * topology.n
    elif mode == "heuristic":
        step = int(policy.get("step", DEFAULT_STEP))
        offset = int(policy.get("offset", DEFAULT_OFFSET))
        ks = tuple(calculate_k(topology.degree(i), step, offset) for i in range(topology.n))
    else:
        raise ValueError(f"unknown policy mode {mode!r}")
    return KAssignment(ks, dict(policy))

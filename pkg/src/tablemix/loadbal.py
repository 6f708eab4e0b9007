"""Parallel and sequential multi-choice allocation of n jobs to n machines.

Machines are split into d groups of n/d; job j's candidate in group i is
machine h_i(j).  Two allocators are simulated:

* the synchronous tau-collision protocol: every unassigned job requests
  all its candidates each round, a machine acknowledges exactly when it
  received at most tau requests that round, and acknowledged jobs commit
  (ties to the lowest group index);
* the sequential "go left" allocator: jobs arrive one by one and take
  their least-loaded candidate, ties to the leftmost group.

``tau_threshold`` and ``witness_tree_jobs`` evaluate the closed-form
parameter choices under which the collision protocol provably finishes in
t rounds, and the job count of the recursive tree certificate that would
witness non-termination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

# Empirical 2-core emptiness thresholds (edges per vertex) for d-uniform
# random hypergraphs; below the threshold the core is empty with high
# probability, above it a linear-size core appears.
CORE_EMPTY_THRESHOLDS = {3: 0.818, 4: 0.772, 5: 0.702, 6: 0.637, 7: 0.582, 8: 0.535}


@dataclass
class CollisionRun:
    n: int
    d: int
    tau: int
    rounds_used: int
    exhausted: bool
    assignment: np.ndarray  # job -> global machine id (group * (n//d) + v), -1 unassigned
    assigned_round: np.ndarray  # round number per job, -1 if never
    candidates: np.ndarray  # (n, d) per-group candidate machines
    round_log: list[int] = field(default_factory=list)  # unassigned count after each round


def run_collision(source, n: int, d: int, tau: int, max_rounds: int = 64) -> CollisionRun:
    """Simulate the tau-collision protocol until done or out of rounds."""
    if d < 1 or n < 1 or n % d != 0:
        raise ValueError("need d >= 1 dividing n")
    if tau < 1:
        raise ValueError("tau must be >= 1")
    q = n // d
    if getattr(source, "m", q) != q or getattr(source, "d", d) != d:
        raise ValueError("hash source must have d functions with range n/d")
    jobs = np.arange(1, n + 1, dtype=np.uint64)
    cand = source.evaluate_many(jobs)  # (n, d) values in [q]
    assignment = np.full(n, -1, dtype=np.int64)
    assigned_round = np.full(n, -1, dtype=np.int64)
    unassigned = np.ones(n, dtype=bool)
    round_log: list[int] = []
    rounds = 0
    while unassigned.any() and rounds < max_rounds:
        rounds += 1
        ack_cols = []
        for g in range(d):
            requests = np.bincount(cand[unassigned, g], minlength=q)
            acked = (requests >= 1) & (requests <= tau)
            ack_cols.append(acked[cand[:, g]] & unassigned)
        acks = np.stack(ack_cols, axis=1)
        got = acks.any(axis=1)
        group = np.argmax(acks, axis=1)  # lowest acknowledging group index
        winners = np.nonzero(got)[0]
        assignment[winners] = group[winners] * q + cand[winners, group[winners]]
        assigned_round[winners] = rounds
        unassigned[winners] = False
        round_log.append(int(unassigned.sum()))
    return CollisionRun(
        n=n,
        d=d,
        tau=tau,
        rounds_used=rounds,
        exhausted=bool(unassigned.any()),
        assignment=assignment,
        assigned_round=assigned_round,
        candidates=cand,
        round_log=round_log,
    )


@dataclass
class GoLeftRun:
    n: int
    d: int
    loads: np.ndarray  # per machine, groups concatenated
    max_load: int


def run_goleft(source, n: int, d: int) -> GoLeftRun:
    """Sequential d-choice allocation, least-loaded with leftmost ties."""
    if d < 1 or n < 1 or n % d != 0:
        raise ValueError("need d >= 1 dividing n")
    q = n // d
    if getattr(source, "m", q) != q or getattr(source, "d", d) != d:
        raise ValueError("hash source must have d functions with range n/d")
    jobs = np.arange(1, n + 1, dtype=np.uint64)
    cand = source.evaluate_many(jobs)
    slots = cand + np.arange(d, dtype=np.int64) * q  # global machine ids
    loads = np.zeros(n, dtype=np.int64)
    if d == 1:
        loads = np.bincount(slots[:, 0], minlength=n)
        return GoLeftRun(n, d, loads, int(loads.max()))
    slot_rows = slots.tolist()
    lo = loads  # local alias for the hot loop
    for row in slot_rows:
        best = row[0]
        best_load = lo[best]
        for s in row[1:]:
            if lo[s] < best_load:
                best = s
                best_load = lo[s]
        lo[best] += 1
    return GoLeftRun(n, d, loads, int(loads.max()))


class TauParams(NamedTuple):
    tau: int
    t: int
    beta: float
    k: float


def tau_threshold(n: int, d: int, alpha: float) -> TauParams:
    """Protocol parameters guaranteeing t-round termination w.h.p.

    beta = 2d(alpha + ln d + 3/2) and k = alpha + 2; the round count t is
    floor((1/beta) ln ln n) clamped below at 3, and the acknowledgement
    threshold is the ceiled maximum of the three branches

        ((beta t ln n)/ln ln n)^(1/(t-2)) / (d-1),  d^(d+1) e^d + 1,  2k + 1.
    """
    if n < 16:
        raise ValueError("n must be >= 16")
    if d < 2:
        raise ValueError("d must be >= 2")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    beta = 2.0 * d * (alpha + math.log(d) + 1.5)
    k = alpha + 2.0
    loglog = math.log(math.log(n))
    t = max(3, math.floor(loglog / beta))
    branch_growth = ((beta * t * math.log(n)) / loglog) ** (1.0 / (t - 2)) / (d - 1)
    branch_const = d ** (d + 1) * math.e**d + 1.0
    branch_k = 2.0 * k + 1.0
    tau = math.ceil(max(branch_growth, branch_const, branch_k))
    return TauParams(tau=tau, t=t, beta=beta, k=k)


def witness_tree_jobs(tau: int, d: int, t: int) -> Fraction:
    """Job count of the depth-t certificate tree:
    (tau^t (d-1)^(t-1) - tau) / (tau (d-1) - 1), evaluated exactly."""
    denom = tau * (d - 1) - 1
    if denom < 1:
        raise ValueError("degenerate denominator: need tau*(d-1) >= 2")
    return Fraction(tau**t * (d - 1) ** (t - 1) - tau, denom)


def phi_d(d: int) -> float:
    """Growth constant of the d-step Fibonacci recurrence, the unique root
    of x^d = x^(d-1) + ... + 1 in (1, 2)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if d == 1:
        return 1.0

    def f(x: float) -> float:
        return x**d - sum(x**i for i in range(d))

    lo, hi = 1.0, 2.0
    for _ in range(200):
        mid = (lo + hi) / 2
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def goleft_bound(n: int, d: int) -> float:
    """Leading term of the go-left maximum load: ln ln n / (d ln phi_d)."""
    if d < 2:
        return math.inf  # single choice has no multi-choice guarantee
    if n < 3:
        return 0.0
    return math.log(math.log(n)) / (d * math.log(phi_d(d)))

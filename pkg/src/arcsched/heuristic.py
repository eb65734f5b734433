"""Iterated local search with GRASP construction and randomized VND.

Every machine is kept in WSPT order at all times: intra-machine search is
unnecessary (resorting is optimal for a fixed assignment), so the
neighborhoods only move jobs between machines and each move is followed
by a per-machine WSPT resort.

Neighborhoods: shift (move one job), swap(1,1) (exchange one job each
way), swap(2,1) (two jobs against one). The descent draws a random
neighborhood, takes its best neighbor, and restarts the neighborhood list
on strict improvement.
"""

from __future__ import annotations

import time
from bisect import insort
from dataclasses import dataclass

from .instance import Instance, Schedule, evaluate_schedule, wspt_order
from .rng import SplitMix64

SHIFT, SWAP11, SWAP21 = 0, 1, 2
_ALL_NEIGHBORHOODS = (SHIFT, SWAP11, SWAP21)


@dataclass(frozen=True)
class IlsConfig:
    seed: int
    iterations: int = 1000
    time_limit: float | None = None
    alpha: float = 0.3
    strength: int = 2
    restart_after: int = 50

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iteration budget must be >= 1")
        if not (0 <= self.alpha <= 1):
            raise ValueError("alpha must be within [0, 1]")
        if self.strength < 1:
            raise ValueError("perturbation strength must be >= 1")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time budget must be positive")


@dataclass(frozen=True)
class IlsResult:
    schedule: Schedule
    value: int
    iterations: int


class _Work:
    """Mutable search state: machines as ascending lists of WSPT ranks."""

    __slots__ = ("p", "w", "ids", "machines", "costs")

    def __init__(self, inst: Instance):
        order = wspt_order(inst)
        self.p = [inst.job(j).p for j in order]
        self.w = [inst.job(j).w for j in order]
        self.ids = order
        self.machines: list[list[int]] = [[] for _ in range(inst.m)]
        self.costs = [0] * inst.m

    def machine_cost(self, ranks: list[int]) -> int:
        t = cost = 0
        for r in ranks:
            t += self.p[r]
            cost += self.w[r] * t
        return cost

    def set_machine(self, k: int, ranks: list[int]) -> None:
        self.machines[k] = ranks
        self.costs[k] = self.machine_cost(ranks)

    def to_schedule(self) -> Schedule:
        return Schedule(machines=tuple(tuple(self.ids[r] for r in ranks) for ranks in self.machines))

    @classmethod
    def from_schedule(cls, inst: Instance, sched: Schedule) -> "_Work":
        work = cls(inst)
        rank_of = {j: r for r, j in enumerate(work.ids)}
        for k, machine in enumerate(sched.machines):
            work.set_machine(k, sorted(rank_of[j] for j in machine))
        return work


def grasp_construct(inst: Instance, rng: SplitMix64, alpha: float) -> Schedule:
    """Greedy randomized construction over the WSPT-ordered jobs.

    Each job goes to a machine drawn uniformly from those whose load is
    within alpha * (max load - min load) of the minimum. With alpha = 0
    the pick is the least-loaded machine, ties to the lowest index, and
    the generator is not consulted. Machines end WSPT-sorted.
    """
    work = _Work(inst)
    loads = [0] * inst.m
    for r in range(len(work.ids)):
        lo, hi = min(loads), max(loads)
        if alpha == 0:
            k = loads.index(lo)
        else:
            threshold = lo + alpha * (hi - lo)
            candidates = [i for i, load in enumerate(loads) if load <= threshold]
            k = candidates[rng.below(len(candidates))]
        work.machines[k].append(r)
        loads[k] += work.p[r]
    for k in range(inst.m):
        work.set_machine(k, work.machines[k])  # ranks appended in order; already ascending
    return work.to_schedule()


def _best_move(work: _Work, neighborhood: int) -> tuple[int, int, int, list[int], list[int]] | None:
    """Best (most negative delta) move in a neighborhood, or None if empty.

    Returns (delta, ka, kb, new_ranks_a, new_ranks_b).
    """
    m = len(work.machines)
    best: tuple[int, int, int, list[int], list[int]] | None = None

    def consider(ka: int, kb: int, new_a: list[int], new_b: list[int]) -> None:
        nonlocal best
        delta = (
            work.machine_cost(new_a)
            + work.machine_cost(new_b)
            - work.costs[ka]
            - work.costs[kb]
        )
        if best is None or delta < best[0]:
            best = (delta, ka, kb, new_a, new_b)

    if neighborhood == SHIFT:
        for ka in range(m):
            a = work.machines[ka]
            for i, r in enumerate(a):
                rest = a[:i] + a[i + 1 :]
                for kb in range(m):
                    if kb == ka:
                        continue
                    new_b = list(work.machines[kb])
                    insort(new_b, r)
                    consider(ka, kb, rest, new_b)
    elif neighborhood == SWAP11:
        for ka in range(m):
            for kb in range(ka + 1, m):
                a, b = work.machines[ka], work.machines[kb]
                for i, ra in enumerate(a):
                    for jdx, rb in enumerate(b):
                        new_a = a[:i] + a[i + 1 :]
                        insort(new_a, rb)
                        new_b = b[:jdx] + b[jdx + 1 :]
                        insort(new_b, ra)
                        consider(ka, kb, new_a, new_b)
    elif neighborhood == SWAP21:
        for ka in range(m):
            a = work.machines[ka]
            if len(a) < 2:
                continue
            for kb in range(m):
                if kb == ka or not work.machines[kb]:
                    continue
                b = work.machines[kb]
                for i in range(len(a)):
                    for jdx in range(i + 1, len(a)):
                        base_a = a[:i] + a[i + 1 : jdx] + a[jdx + 1 :]
                        for u, rb in enumerate(b):
                            new_a = list(base_a)
                            insort(new_a, rb)
                            new_b = b[:u] + b[u + 1 :]
                            insort(new_b, a[i])
                            insort(new_b, a[jdx])
                            consider(ka, kb, new_a, new_b)
    else:
        raise ValueError(f"unknown neighborhood {neighborhood}")
    return best


def _rvnd_work(work: _Work, rng: SplitMix64) -> None:
    pending = list(_ALL_NEIGHBORHOODS)
    while pending:
        idx = rng.below(len(pending))
        best = _best_move(work, pending[idx])
        if best is not None and best[0] < 0:
            _, ka, kb, new_a, new_b = best
            work.set_machine(ka, new_a)
            work.set_machine(kb, new_b)
            pending = list(_ALL_NEIGHBORHOODS)
        else:
            pending.pop(idx)


def rvnd(inst: Instance, sched: Schedule, rng: SplitMix64) -> Schedule:
    """Randomized variable neighborhood descent; never worsens the input."""
    work = _Work.from_schedule(inst, sched)
    _rvnd_work(work, rng)
    return work.to_schedule()


def perturb(inst: Instance, sched: Schedule, rng: SplitMix64, strength: int) -> Schedule:
    """Apply ``strength`` random job moves, then resort every machine.

    With a single machine there is nowhere to move, so the input comes
    back unchanged.
    """
    if inst.m == 1:
        return sched
    work = _Work.from_schedule(inst, sched)
    for _ in range(strength):
        r = rng.below(inst.n)
        ka = next(k for k, ranks in enumerate(work.machines) if r in ranks)
        kb = rng.below(inst.m - 1)
        if kb >= ka:
            kb += 1
        a = list(work.machines[ka])
        a.remove(r)
        b = list(work.machines[kb])
        insort(b, r)
        work.set_machine(ka, a)
        work.set_machine(kb, b)
    return work.to_schedule()


def ils(inst: Instance, cfg: IlsConfig, monitor=None) -> IlsResult:
    """Multi-start search: construct, descend, then perturb and descend.

    The incumbent accepts strict improvements only; after
    ``cfg.restart_after`` non-improving perturbations the incumbent is
    replaced by a fresh construction. Deterministic for a fixed seed and
    iteration budget; a wall-clock budget cuts the loop early and breaks
    that guarantee. ``monitor(iteration, best_value)`` is invoked once per
    iteration when given.
    """
    rng = SplitMix64(cfg.seed)
    t0 = time.monotonic()

    def out_of_time() -> bool:
        return cfg.time_limit is not None and time.monotonic() - t0 >= cfg.time_limit

    current = rvnd(inst, grasp_construct(inst, rng, cfg.alpha), rng)
    current_value = evaluate_schedule(inst, current)
    best, best_value = current, current_value
    iterations = 1
    if monitor is not None:
        monitor(iterations, best_value)
    stale = 0
    while iterations < cfg.iterations and not out_of_time():
        iterations += 1
        if stale >= cfg.restart_after:
            current = rvnd(inst, grasp_construct(inst, rng, cfg.alpha), rng)
            current_value = evaluate_schedule(inst, current)
            stale = 0
        else:
            candidate = rvnd(inst, perturb(inst, current, rng, cfg.strength), rng)
            value = evaluate_schedule(inst, candidate)
            if value < current_value:
                current, current_value = candidate, value
                stale = 0
            else:
                stale += 1
        if current_value < best_value:
            best, best_value = current, current_value
        if monitor is not None:
            monitor(iterations, best_value)
    return IlsResult(schedule=best, value=best_value, iterations=iterations)

"""Problem instances, schedules and the WSPT order.

An instance is a set of n jobs, each with an integer processing time p and
an integer penalty weight w, to be run on m identical machines. A schedule
assigns every job to one machine and fixes the processing order on each
machine; jobs run back to back from time 0 (idle time only trails, since
delaying a job can never reduce its weighted completion time).

File formats
------------
Instance (UTF-8 text): comment lines start with '#'; the first non-comment
line is ``n m``; then n lines ``p_j w_j``. All integers, whitespace
separated.

Schedule (UTF-8 text): line ``objective V``; then m lines
``machine k: j1 j2 ...`` with 1-based job ids in processing order. An empty
machine emits ``machine k:``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cmp_to_key
from typing import Iterable, Sequence

from .rng import SplitMix64


class ParseError(ValueError):
    """Malformed instance or schedule text; message names the line."""


class ValidationError(ValueError):
    """A value object violates its invariants."""


@dataclass(frozen=True)
class Job:
    """One job: 1-based id, processing time p >= 1, weight w >= 1."""

    id: int
    p: int
    w: int


@dataclass(frozen=True)
class Instance:
    n: int
    m: int
    jobs: tuple[Job, ...]

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValidationError(f"need n >= 1 and m >= 1, got n={self.n} m={self.m}")
        if len(self.jobs) != self.n:
            raise ValidationError(f"expected {self.n} jobs, got {len(self.jobs)}")
        for pos, job in enumerate(self.jobs, start=1):
            if job.id != pos:
                raise ValidationError(f"job ids must be 1..n in order; position {pos} has id {job.id}")
            if job.p < 1:
                raise ValidationError(f"job {job.id}: processing time must be >= 1, got {job.p}")
            if job.w < 1:
                raise ValidationError(f"job {job.id}: weight must be >= 1, got {job.w}")

    @property
    def total_p(self) -> int:
        return sum(j.p for j in self.jobs)

    @property
    def p_max(self) -> int:
        return max(j.p for j in self.jobs)

    def job(self, job_id: int) -> Job:
        return self.jobs[job_id - 1]


def make_instance(m: int, pw_pairs: Sequence[tuple[int, int]]) -> Instance:
    """Build an Instance from (p, w) pairs, assigning ids 1..n in order."""
    jobs = tuple(Job(i, p, w) for i, (p, w) in enumerate(pw_pairs, start=1))
    return Instance(n=len(jobs), m=m, jobs=jobs)


@dataclass(frozen=True)
class JobType:
    """Jobs merged by identical (p, w): multiplicity d, member job ids."""

    p: int
    w: int
    d: int
    members: tuple[int, ...]


@dataclass(frozen=True)
class Schedule:
    """Per-machine job-id sequences; the lists partition 1..n."""

    machines: tuple[tuple[int, ...], ...]

    @property
    def m(self) -> int:
        return len(self.machines)


def parse_instance(text: str) -> Instance:
    """Parse instance text, skipping '#' comments and blank lines."""
    records: list[tuple[int, list[int]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        values = []
        for tok in tokens:
            try:
                values.append(int(tok))
            except ValueError:
                raise ParseError(f"line {lineno}: expected integer, got {tok!r}") from None
        records.append((lineno, values))

    if not records:
        raise ParseError("line 1: missing header 'n m'")
    header_line, header = records[0]
    if len(header) != 2:
        raise ParseError(f"line {header_line}: header must be 'n m', got {len(header)} values")
    n, m = header
    if n < 1 or m < 1:
        raise ParseError(f"line {header_line}: n and m must be >= 1, got n={n} m={m}")
    body = records[1:]
    if len(body) != n:
        raise ParseError(f"expected {n} job lines after the header, found {len(body)}")

    jobs = []
    for idx, (lineno, values) in enumerate(body, start=1):
        if len(values) != 2:
            raise ParseError(f"line {lineno}: job record must be 'p w', got {len(values)} values")
        p, w = values
        if p < 1:
            raise ParseError(f"line {lineno}: processing time must be >= 1, got {p}")
        if w < 1:
            raise ParseError(f"line {lineno}: weight must be >= 1, got {w}")
        jobs.append(Job(idx, p, w))
    return Instance(n=n, m=m, jobs=tuple(jobs))


def write_instance(inst: Instance) -> str:
    lines = [f"{inst.n} {inst.m}"]
    lines.extend(f"{j.p} {j.w}" for j in inst.jobs)
    return "\n".join(lines) + "\n"


def generate_instance(n: int, m: int, p_max: int, w_max: int, seed: int) -> Instance:
    """Draw p_j uniform on {1..p_max} and w_j uniform on {1..w_max}.

    Uses the SplitMix64 stream seeded by ``seed``; per job, p is drawn
    before w. Identical arguments give byte-identical instances everywhere.
    """
    if n < 1 or m < 1 or p_max < 1 or w_max < 1:
        raise ValueError(f"all of n, m, p_max, w_max must be >= 1, got {(n, m, p_max, w_max)}")
    rng = SplitMix64(seed)
    jobs = []
    for i in range(1, n + 1):
        p = rng.randint(1, p_max)
        w = rng.randint(1, w_max)
        jobs.append(Job(i, p, w))
    return Instance(n=n, m=m, jobs=tuple(jobs))


def wspt_precedes(a: Job, b: Job) -> bool:
    """True when job a comes strictly before job b in the WSPT order.

    Ratios w/p are compared by integer cross-multiplication; equal ratios
    are broken by the smaller job id.
    """
    lhs = a.w * b.p
    rhs = b.w * a.p
    if lhs != rhs:
        return lhs > rhs
    return a.id < b.id


def wspt_order(inst: Instance) -> list[int]:
    """Job ids sorted by non-increasing w/p, ties by smaller id."""

    def cmp(i: int, k: int) -> int:
        return -1 if wspt_precedes(inst.job(i), inst.job(k)) else 1

    return sorted(range(1, inst.n + 1), key=cmp_to_key(cmp))


def wspt_rank(inst: Instance) -> dict[int, int]:
    """Map job id -> position (0-based) in the WSPT order."""
    return {j: r for r, j in enumerate(wspt_order(inst))}


def group_job_types(inst: Instance) -> list[JobType]:
    """Merge jobs with identical (p, w) into types, in WSPT order.

    Types are ordered by non-increasing w/p; equal ratios are broken by the
    smallest member id, which keeps the type order consistent with the
    job-level WSPT order.
    """
    groups: dict[tuple[int, int], list[int]] = {}
    for job in inst.jobs:
        groups.setdefault((job.p, job.w), []).append(job.id)

    def cmp(a: tuple[int, int], b: tuple[int, int]) -> int:
        (pa, wa), (pb, wb) = a, b
        lhs, rhs = wa * pb, wb * pa
        if lhs != rhs:
            return -1 if lhs > rhs else 1
        return -1 if min(groups[a]) < min(groups[b]) else 1

    ordered = sorted(groups, key=cmp_to_key(cmp))
    return [JobType(p=p, w=w, d=len(groups[(p, w)]), members=tuple(sorted(groups[(p, w)]))) for p, w in ordered]


def _check_partition(inst: Instance, sched: Schedule) -> None:
    seen: set[int] = set()
    for machine in sched.machines:
        for j in machine:
            if j < 1 or j > inst.n:
                raise ValidationError(f"schedule references unknown job id {j}")
            if j in seen:
                raise ValidationError(f"job {j} appears more than once in the schedule")
            seen.add(j)
    if len(seen) != inst.n:
        missing = sorted(set(range(1, inst.n + 1)) - seen)
        raise ValidationError(f"schedule misses jobs {missing}")


def completion_times(inst: Instance, sched: Schedule) -> dict[int, int]:
    """Per-job completion times: prefix sums of p along each machine."""
    _check_partition(inst, sched)
    comp: dict[int, int] = {}
    for machine in sched.machines:
        t = 0
        for j in machine:
            t += inst.job(j).p
            comp[j] = t
    return comp


def evaluate_schedule(inst: Instance, sched: Schedule) -> int:
    """Total weighted completion time of a schedule."""
    comp = completion_times(inst, sched)
    return sum(inst.job(j).w * c for j, c in comp.items())


def sort_machine_wspt(inst: Instance, machine: Iterable[int]) -> tuple[int, ...]:
    rank = wspt_rank(inst)
    return tuple(sorted(machine, key=rank.__getitem__))


def write_schedule(inst: Instance, sched: Schedule) -> str:
    lines = [f"objective {evaluate_schedule(inst, sched)}"]
    for k, machine in enumerate(sched.machines, start=1):
        body = " ".join(str(j) for j in machine)
        lines.append(f"machine {k}: {body}".rstrip())
    return "\n".join(lines) + "\n"


def parse_schedule(text: str) -> Schedule:
    """Parse schedule text; the objective line is informational only."""
    machines: list[tuple[int, ...]] = []
    saw_objective = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("objective"):
            saw_objective = True
            continue
        if not line.startswith("machine"):
            raise ParseError(f"line {lineno}: expected 'machine k: ...', got {line!r}")
        _, _, rest = line.partition(":")
        try:
            machines.append(tuple(int(tok) for tok in rest.split()))
        except ValueError:
            raise ParseError(f"line {lineno}: job ids must be integers") from None
    if not saw_objective or not machines:
        raise ParseError("schedule text needs an 'objective' line and machine lines")
    return Schedule(machines=tuple(machines))

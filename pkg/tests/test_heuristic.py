import pytest

from arcsched.heuristic import IlsConfig, grasp_construct, ils, perturb, rvnd
from arcsched.instance import (
    Schedule,
    evaluate_schedule,
    generate_instance,
    make_instance,
    wspt_order,
    wspt_rank,
)
from arcsched.oracle import brute_force_optimal
from arcsched.rng import SplitMix64


def machines_wspt_sorted(inst, sched) -> bool:
    rank = wspt_rank(inst)
    return all(
        all(rank[a] < rank[b] for a, b in zip(machine, machine[1:]))
        for machine in sched.machines
    )


class TestGraspConstruct:
    def test_alpha_zero_is_greedy_on_fig(self, demo):
        sched = grasp_construct(demo, SplitMix64(1), alpha=0)
        assert sched == Schedule(machines=((1, 3, 4), (2,)))
        assert evaluate_schedule(demo, sched) == 67

    def test_alpha_zero_ignores_rng_state(self, demo):
        a = grasp_construct(demo, SplitMix64(1), alpha=0)
        b = grasp_construct(demo, SplitMix64(999), alpha=0)
        assert a == b

    def test_machines_always_wspt_sorted(self):
        for seed in range(20):
            inst = generate_instance(n=12, m=3, p_max=10, w_max=10, seed=seed)
            sched = grasp_construct(inst, SplitMix64(seed), alpha=0.5)
            assert machines_wspt_sorted(inst, sched)

    def test_partition_complete(self):
        inst = generate_instance(n=15, m=4, p_max=10, w_max=10, seed=8)
        sched = grasp_construct(inst, SplitMix64(3), alpha=1.0)
        assert sorted(j for mach in sched.machines for j in mach) == list(range(1, 16))


class TestRvnd:
    def test_demo_reaches_optimum_from_weak_start(self, demo):
        start = Schedule(machines=((1, 2), (3, 4)))  # value 73
        out = rvnd(demo, start, SplitMix64(5))
        assert evaluate_schedule(demo, out) == 67

    def test_never_worsens(self):
        for seed in range(100):
            inst = generate_instance(n=9, m=3, p_max=10, w_max=10, seed=seed)
            rng = SplitMix64(seed)
            start = grasp_construct(inst, rng, alpha=1.0)
            out = rvnd(inst, start, rng)
            assert evaluate_schedule(inst, out) <= evaluate_schedule(inst, start)
            assert machines_wspt_sorted(inst, out)

    def test_optimal_input_stays_optimal(self):
        for seed in range(15):
            inst = generate_instance(n=7, m=2, p_max=10, w_max=10, seed=seed)
            opt = brute_force_optimal(inst)
            out = rvnd(inst, opt.schedule, SplitMix64(seed))
            assert evaluate_schedule(inst, out) == opt.optimum

    def test_idempotent_at_local_optimum(self):
        inst = generate_instance(n=10, m=3, p_max=10, w_max=10, seed=42)
        rng = SplitMix64(7)
        once = rvnd(inst, grasp_construct(inst, rng, alpha=0.3), rng)
        twice = rvnd(inst, once, SplitMix64(8))
        assert evaluate_schedule(inst, twice) == evaluate_schedule(inst, once)


class TestPerturb:
    def test_single_machine_identity(self):
        inst = make_instance(1, [(2, 3), (4, 1), (1, 5)])
        sched = Schedule(machines=((3, 1, 2),))
        assert perturb(inst, sched, SplitMix64(0), strength=3) == sched

    def test_valid_schedule_and_lower_bound(self, demo):
        opt = Schedule(machines=((1, 3, 4), (2,)))
        for seed in range(50):
            out = perturb(demo, opt, SplitMix64(seed), strength=1)
            assert sorted(j for mach in out.machines for j in mach) == [1, 2, 3, 4]
            assert machines_wspt_sorted(demo, out)
            assert evaluate_schedule(demo, out) >= 67

    def test_deterministic(self, demo):
        opt = Schedule(machines=((1, 3, 4), (2,)))
        a = perturb(demo, opt, SplitMix64(11), strength=3)
        b = perturb(demo, opt, SplitMix64(11), strength=3)
        assert a == b


class TestIls:
    def test_demo_budget_100(self, demo):
        for seed in (1, 2, 3):
            result = ils(demo, IlsConfig(seed=seed, iterations=100))
            assert result.value == 67
            assert result.iterations == 100

    def test_single_machine_equals_wspt(self):
        inst = generate_instance(n=12, m=1, p_max=10, w_max=10, seed=6)
        result = ils(inst, IlsConfig(seed=1, iterations=5))
        wspt_sched = Schedule(machines=(tuple(wspt_order(inst)),))
        assert result.value == evaluate_schedule(inst, wspt_sched)

    def test_deterministic_given_seed_and_budget(self, demo):
        a = ils(demo, IlsConfig(seed=33, iterations=50))
        b = ils(demo, IlsConfig(seed=33, iterations=50))
        assert a == b

    def test_best_value_non_increasing(self):
        inst = generate_instance(n=10, m=3, p_max=12, w_max=12, seed=17)
        trace = []
        ils(inst, IlsConfig(seed=5, iterations=200), monitor=lambda it, v: trace.append(v))
        assert len(trace) == 200
        assert all(a >= b for a, b in zip(trace, trace[1:]))

    def test_value_never_beats_oracle(self):
        for seed in range(10):
            inst = generate_instance(n=8, m=2, p_max=10, w_max=10, seed=seed)
            opt = brute_force_optimal(inst).optimum
            result = ils(inst, IlsConfig(seed=seed, iterations=50))
            assert result.value >= opt

    def test_result_schedule_matches_value(self):
        inst = generate_instance(n=9, m=3, p_max=10, w_max=10, seed=23)
        result = ils(inst, IlsConfig(seed=9, iterations=100))
        assert evaluate_schedule(inst, result.schedule) == result.value
        assert machines_wspt_sorted(inst, result.schedule)

    def test_time_budget_stops_early(self):
        inst = generate_instance(n=30, m=4, p_max=20, w_max=20, seed=3)
        result = ils(inst, IlsConfig(seed=1, iterations=10**9, time_limit=0.2))
        assert result.iterations < 10**9


class TestConfig:
    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            IlsConfig(seed=1, iterations=0)
        with pytest.raises(ValueError):
            IlsConfig(seed=1, alpha=1.5)
        with pytest.raises(ValueError):
            IlsConfig(seed=1, strength=0)
        with pytest.raises(ValueError):
            IlsConfig(seed=1, time_limit=0)

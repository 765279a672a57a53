import pytest
from hypothesis import given, strategies as st

from divscale.model import ReplicaPlan, ValidationError
from divscale.sim import (
    ChaosKind,
    ChaosSpec,
    Cluster,
    NoRunningPods,
    WorkloadProfile,
)

PLAN = ReplicaPlan({"a": 5, "b": 5, "c": 5})
LIGHT = WorkloadProfile(((0, 6),))


def kill(period=180, duration=30, **kw):
    return ChaosSpec(ChaosKind.POD_KILL, "a", period, duration, **kw)


def test_ten_kill_cycles_in_half_an_hour():
    c = Cluster(PLAN, chaos=[kill()], workload=LIGHT)
    flagged = 0
    for _ in range(1800):
        step = c.step()
        flagged += sum(s.restart_event for s in step.samples["a"])
    assert [p.restart_count for p in c.pods["a"]] == [10] * 5
    assert flagged == 50
    assert all(p.restart_count == 0 for v in "bc" for p in c.pods[v])


def test_http_delay_adds_to_response_time():
    spec = ChaosSpec(ChaosKind.HTTP_DELAY, "a", 240, 120, delay_ms=2000)
    c = Cluster(PLAN, chaos=[spec], workload=LIGHT)
    step = c.step()
    assert {s.response_time_ms for s in step.samples["a"]} == {2050.0}
    assert {s.response_time_ms for s in step.samples["b"]} == {50.0}


def test_memory_stress_adds_worker_memory():
    spec = ChaosSpec(ChaosKind.MEMORY_STRESS, "c", 240, 120, workers=2, mb_per_worker=20)
    c = Cluster(PLAN, chaos=[spec], workload=LIGHT)
    step = c.step()
    assert {s.memory_mb for s in step.samples["c"]} == {104.0}
    assert {s.memory_mb for s in step.samples["a"]} == {64.0}
    c.step(120)
    assert {s.memory_mb for s in c.step().samples["c"]} == {64.0}


def test_apply_plan_and_idempotence():
    c = Cluster(PLAN, workload=LIGHT)
    target = ReplicaPlan({"a": 3, "b": 6, "c": 6})
    c.apply_plan(target)
    assert c.replica_counts() == dict(target.counts)
    names = [p.name for pods in c.pods.values() for p in pods]
    c.apply_plan(target)
    assert [p.name for pods in c.pods.values() for p in pods] == names


def test_shrinking_drops_killed_pods_first():
    c = Cluster(PLAN, workload=LIGHT)
    c.pods["a"][1].killed_until = 99
    c.apply_plan(ReplicaPlan({"a": 4, "b": 5, "c": 5}))
    assert all(p.running for p in c.pods["a"])


def test_observed_cpu_is_mean_over_running_pods():
    c = Cluster(ReplicaPlan({"a": 1, "b": 1}), workload=LIGHT)
    a, b = c.pods["a"][0], c.pods["b"][0]
    c.last_pod_cpu = {a.name: 40.0, b.name: 60.0}
    assert c.observed_cpu() == 50.0
    c.last_pod_cpu = {a.name: 30.0, b.name: 30.0}
    assert c.observed_cpu() == 30.0
    a.killed_until = b.killed_until = 10
    with pytest.raises(NoRunningPods):
        c.observed_cpu()


def test_killed_pods_emit_nothing_and_new_pods_start_killed():
    c = Cluster(PLAN, chaos=[kill()], workload=LIGHT)
    step = c.step()
    assert step.samples["a"] == []
    assert not c.running_pods("a")
    c.apply_plan(ReplicaPlan({"a": 6, "b": 5, "c": 4}))
    assert not c.running_pods("a")
    c.step(29)
    assert len(c.step().samples["a"]) == 6


def test_traffic_avoids_dead_version():
    c = Cluster(PLAN, chaos=[kill()], workload=LIGHT)
    step = c.step(10)
    assert step.served["a"] == 0
    assert step.served_total == step.generated
    assert step.rerouted > 0


@pytest.mark.parametrize(
    "kw",
    [
        dict(period_s=30, duration_s=60),
        dict(period_s=0, duration_s=0),
        dict(period_s=60, duration_s=30, start_s=10, stop_s=10),
    ],
)
def test_invalid_chaos(kw):
    with pytest.raises(ValidationError):
        ChaosSpec(ChaosKind.POD_KILL, "a", **kw)


def test_chaos_needs_its_parameters():
    with pytest.raises(ValidationError):
        ChaosSpec(ChaosKind.HTTP_DELAY, "a", 60, 30)
    with pytest.raises(ValidationError):
        ChaosSpec(ChaosKind.MEMORY_STRESS, "a", 60, 30, workers=2)


@given(
    st.integers(1, 600), st.data(), st.integers(0, 300), st.one_of(st.none(), st.integers(1, 3000)),
    st.integers(0, 4000),
)
def test_schedule_windows(period, data, start, stop_offset, t):
    duration = data.draw(st.integers(1, period))
    stop = None if stop_offset is None else start + stop_offset
    spec = ChaosSpec(ChaosKind.POD_KILL, "a", period, duration, start_s=start, stop_s=stop)
    expected = (
        t >= start
        and (stop is None or t < stop)
        and any(start + k * period <= t < start + k * period + duration for k in range(t // period + 2))
    )
    assert spec.is_on(t) == expected


def test_inactive_chaos_never_fires():
    assert not any(kill(active=False).is_on(t) for t in range(400))


def test_cpu_grows_with_load():
    cpus = []
    for users in (5, 20, 60, 200):
        c = Cluster(PLAN, workload=WorkloadProfile(((0, users),)))
        c.step()
        cpus.append(c.observed_cpu())
    assert cpus == sorted(cpus) and cpus[0] < cpus[-1]
    assert cpus[-1] <= 100.0


def test_same_seed_same_run():
    def run(seed):
        c = Cluster(PLAN, chaos=[kill()], workload=WorkloadProfile(((0, 40),), jitter=0.3), seed=seed)
        return [(s.generated, tuple(sorted(s.served.items()))) for s in (c.step() for _ in range(300))]

    assert run(5) == run(5)
    assert run(5) != run(6)


def test_workload_steps():
    w = WorkloadProfile(((0, 10), (60, 30)))
    assert (w.users_at(0), w.users_at(59), w.users_at(60), w.users_at(10_000)) == (10, 10, 30, 30)
    with pytest.raises(ValidationError):
        WorkloadProfile(((0, 1), (0, 2)))

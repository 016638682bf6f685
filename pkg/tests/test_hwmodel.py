import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import make_platform
from refsim.actuation import ActuationState
from refsim.errors import DegenerateSample
from refsim.hwmodel import (Descriptors, ForecastTask, core_power, derive_descriptors,
                            schedule_core, spi, step, water_fill)
from refsim.platform import CoreType

LITTLE = CoreType("little", 1.0, 0.5, 0.2, 0.05, True)
LAT = 100e-9


def test_descriptors_compute_bound():
    d = derive_descriptors(1e7, 0, 2.0, 0.010, LAT)
    assert d.cpi_base_ref == pytest.approx(2.0)
    assert d.mpi == 0


def test_descriptors_memory_term():
    d = derive_descriptors(5e6, 5e4, 2.0, 0.010, LAT)
    assert d.mpi == pytest.approx(0.01)
    # cpi_total 4.0 minus cpi_mem 2.0
    assert d.cpi_base_ref == pytest.approx(2.0)


def test_descriptors_clamp():
    d = derive_descriptors(1e7, 1e6, 2.0, 0.010, LAT)
    assert d.cpi_base_ref == 0.1


def test_descriptors_degenerate():
    with pytest.raises(DegenerateSample):
        derive_descriptors(0, 0, 2.0, 0.010, LAT)


@pytest.mark.parametrize("cpi,mpi,f,expected_ips", [
    (2.0, 0.0, 1.0, 5e8),
    (2.0, 0.0, 2.0, 1e9),
    (2.0, 0.01, 1.0, 1 / 3e-9),
])
def test_spi_examples(cpi, mpi, f, expected_ips):
    s = spi(Descriptors(cpi, mpi), LITTLE, f, LAT)
    assert s == pytest.approx(oracles.spi(cpi, mpi, 1.0, f, LAT))
    assert 1 / s == pytest.approx(expected_ips)


@pytest.mark.parametrize("f,u,expected", [(2.0, 1.0, 4.2), (2.0, 0.0, 0.05), (1.0, 0.5, 0.375)])
def test_power_examples(f, u, expected):
    assert core_power(LITTLE, f, u) == pytest.approx(expected)


def test_schedule_examples():
    s = schedule_core([0.020, 0.060], 0.050)
    assert s.runtimes == pytest.approx([0.020, 0.030])
    assert s.busy_time == pytest.approx(0.050)
    assert s.utilization == pytest.approx(1.0)
    s = schedule_core([0.010], 0.050)
    assert s.runtimes == pytest.approx([0.010])
    assert s.utilization == pytest.approx(0.2)
    s = schedule_core([], 0.050)
    assert s.busy_time == 0 and s.utilization == 0


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0, 0.02), max_size=8), st.floats(0.001, 0.02))
def test_water_fill_properties(demands, cap):
    alloc = water_fill(demands, cap)
    assert math.fsum(alloc) <= cap * (1 + 1e-12)
    for a, d in zip(alloc, demands):
        assert -1e-15 <= a <= d + 1e-15
    # max-min fairness: an unsatisfied task gets at least what anyone else gets
    for i, (a, d) in enumerate(zip(alloc, demands)):
        if a < d - 1e-12:
            assert all(a >= b - 1e-12 for b in alloc)
    # work conserving: either all demands met or the core is full
    if math.fsum(demands) >= cap:
        assert math.fsum(alloc) == pytest.approx(cap)
    else:
        assert alloc == pytest.approx(demands)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0, 0.004), min_size=1, max_size=5))
def test_water_fill_matches_quantum_oracle(demands):
    cap = 0.004
    alloc = water_fill(demands, cap)
    ref = oracles.brute_force_share(demands, cap)
    for a, r in zip(alloc, ref):
        assert abs(a - r) / cap <= 1e-3


def test_step_single_task_example():
    info = make_platform()
    state = ActuationState({0: 1.0, 1: 0.5}, {0: 0})
    sample = step(info, state, {0: ForecastTask(Descriptors(2.0, 0.0))}, 0.0, 0.010)
    assert sample.cores[0].instructions == 5_000_000
    assert sample.cores[0].busy_time == pytest.approx(0.010)
    assert sample.cores[0].power_avg == pytest.approx(oracles.power(0.5, 0.2, 0.05, 1.0, 1.0))
    assert sample.tasks[0].core == 0


def test_step_idle_platform():
    info = make_platform()
    state = ActuationState({0: 1.0, 1: 0.5}, {})
    sample = step(info, state, {}, 0.0, 0.010)
    assert math.fsum(c.power_avg for c in sample.cores) == pytest.approx(4 * 0.05 + 4 * 0.1)
    assert all(c.busy_time == 0 for c in sample.cores)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(0.5, 4.0), st.integers(0, 7)), min_size=1, max_size=6),
       st.sampled_from([0.5, 1.0, 2.0]), st.sampled_from([0.5, 1.0, 1.5, 2.0]))
def test_step_invariants(tasks, f0, f1):
    info = make_platform()
    state = ActuationState({0: f0, 1: f1}, {i: c for i, (_, c) in enumerate(tasks)})
    runnable = {i: ForecastTask(Descriptors(cpi, 0.0)) for i, (cpi, _) in enumerate(tasks)}
    sample = step(info, state, runnable, 0.0, 0.010)
    for c in info.cores:
        rec = sample.cores[c.id]
        assert rec.busy_time <= 0.010 * (1 + 1e-12)
        ids = [i for i, (_, cc) in enumerate(tasks) if cc == c.id]
        ct = info.core_types[c.core_type]
        f = state.freq_ghz[c.domain]
        expected = math.fsum(rec.task_residency[i] / spi(runnable[i].desc, ct, f, LAT) for i in ids)
        # retired work equals runtime / spi for every task on the core
        assert math.fsum(sample.tasks[i].retired for i in ids) == pytest.approx(expected, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(0.5, 4.0), st.integers(0, 3)), min_size=1, max_size=6))
def test_ips_monotone_in_frequency(tasks):
    info = make_platform()
    totals = []
    for f in (0.5, 1.0, 2.0):
        state = ActuationState({0: f, 1: 0.5}, {i: c for i, (_, c) in enumerate(tasks)})
        runnable = {i: ForecastTask(Descriptors(cpi, 0.0)) for i, (cpi, _) in enumerate(tasks)}
        sample = step(info, state, runnable, 0.0, 0.010)
        totals.append(math.fsum(t.retired for t in sample.tasks.values()))
    assert totals[0] <= totals[1] <= totals[2]

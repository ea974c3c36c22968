from __future__ import annotations

import pytest

from model.enums import LedgerCategory, NodeKind
from model.global_constants import MISALIGNMENT_LIMIT
from model.validation.bench_config import BenchConfig
from model.validation.cost_model import CostModel
from src.bench.runner import schedule_run
from src.cache.replay import stack_misalignment
from src.dag.kernels import assign_kernels, build_tasks, check_steal_path, partition_kernels
from src.scheduler.retiming import retime
from src.scheduler.rws import RandomizedWorkStealing
from src.spms.core import SortRun, sort


@pytest.fixture(scope='module')
def run() -> SortRun:
    return sort([(7 * i) % 211 for i in range(211)], block_words=4)


def test_single_processor_runs_in_sequential_order(run: SortRun) -> None:
    schedule = RandomizedWorkStealing(1).run(run.dag, run.memory)
    assert schedule.steals == []
    assert schedule.usurpations == 0
    assert schedule.makespan == run.dag.work()
    assert schedule.node_start == sorted(schedule.node_start)
    assert schedule.ticks(LedgerCategory.Work) == schedule.makespan
    assert schedule.ticks(LedgerCategory.Steal) == 0
    assert set(schedule.node_task) == {0}


def test_events_are_in_logical_time(run: SortRun) -> None:
    schedule = RandomizedWorkStealing(3, seed=2).run(run.dag, run.memory)
    assert [event.time for event in schedule.events] == list(range(len(schedule.events)))
    assert all(event.block == event.addr // 4 for event in schedule.events)


@pytest.mark.parametrize('seed', range(1, 6))
def test_steal_pattern_invariants(run: SortRun, seed: int) -> None:
    live = run.memory.live_words
    schedule = RandomizedWorkStealing(4, seed=seed).run(run.dag, run.memory)
    steals = len(schedule.steals)
    assert steals > 0
    assert schedule.usurpations <= steals
    assert len(schedule.usurped) == schedule.usurpations
    assert sorted(steal.index for steal in schedule.steals) == list(range(steals))
    assert run.memory.live_words == live

    kernels = partition_kernels(run.dag, schedule.steal_forks)
    assign_kernels(kernels, schedule.node_proc)
    assert len(kernels) == 2 * steals + 1
    assert all(len(kernel.procs) == 1 for kernel in kernels)

    tasks = build_tasks(run.dag, schedule.steal_forks)
    stolen = {task.id for task in tasks[1:]}
    assert all(check_steal_path(run.dag, task, stolen) for task in tasks)
    assert set(schedule.frames) == {node.id for node in run.dag.forks()}


def test_nominal_ledgers_leave_no_idle_time(run: SortRun) -> None:
    schedule = RandomizedWorkStealing(4, seed=3).run(run.dag, run.memory)
    for proc, ledger in schedule.ledgers.items():
        assert sum(ledger.values()) == schedule.makespan
        assert ledger[LedgerCategory.Idle] == 0
    assert schedule.ticks(LedgerCategory.Work) == run.dag.work()


def test_schedules_are_deterministic(run: SortRun) -> None:
    first = RandomizedWorkStealing(4, seed=9).run(run.dag, run.memory)
    second = RandomizedWorkStealing(4, seed=9).run(run.dag, run.memory)
    assert first.makespan == second.makespan
    assert first.steal_forks == second.steal_forks
    assert [event[:5] for event in first.events] == [event[:5] for event in second.events]


def test_retiming_keeps_every_ledger_balanced(run: SortRun) -> None:
    costs = CostModel(b=8, s=32)
    schedule = RandomizedWorkStealing(4, seed=4, costs=costs).run(run.dag, run.memory)
    misses = {node.id: 1 for node in run.dag.get_nodes() if node.kind is NodeKind.Leaf}
    retiming = retime(schedule, run.dag, costs, misses, {})
    assert retiming.makespan >= schedule.makespan
    for ledger in retiming.ledgers.values():
        assert sum(ledger.values()) == retiming.makespan
    assert retiming.ticks(LedgerCategory.Work) == run.dag.work()
    assert retiming.ticks(LedgerCategory.Miss) == 8 * len(misses)


def test_misalignment_stays_bounded(run: SortRun) -> None:
    sequential = RandomizedWorkStealing(1).run(run.dag, run.memory)
    schedule = RandomizedWorkStealing(4, seed=5).run(run.dag, run.memory)
    tasks = build_tasks(run.dag, schedule.steal_forks)
    worst = stack_misalignment(run.dag, sequential, schedule, tasks, 4)
    assert set(worst) == {task.id for task in tasks[1:]}
    assert max(worst.values()) <= MISALIGNMENT_LIMIT


def test_single_processor_report(run: SortRun) -> None:
    config = BenchConfig(n=run.n, B=4, M=64, p=1, b=8, s=32)
    report = schedule_run(run, config, seed=1).report
    assert report.steals == 0
    assert report.fs_delay == 0
    assert report.kernels == 1
    assert report.idle_ticks == 0
    assert report.q_par == report.q_seq
    assert report.tp_measured == report.work + 8 * report.q_seq
    assert report.tp_estimate == pytest.approx(report.tp_measured)
    assert report.divergence == 8 * report.q_seq


def test_parallel_report_is_reproducible() -> None:
    keys = [(5 * i) % 97 for i in range(97)]
    config = BenchConfig(n=len(keys), B=4, M=64, p=4, b=8, s=32)
    first = schedule_run(sort(keys, block_words=4), config, seed=2)
    second = schedule_run(sort(keys, block_words=4), config, seed=2)
    assert first.report == second.report
    assert first.report.kernels == 2 * first.report.steals + 1
    assert first.report.usurpations <= first.report.steals


def test_processor_count_must_be_positive() -> None:
    with pytest.raises(ValueError):
        RandomizedWorkStealing(0)

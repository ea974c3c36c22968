from __future__ import annotations

import numpy as np
import pytest

from conftest import load, make_context
from src.spms.core import group_size, sort, spms_merge, step2_group, step3_merge
from src.spms.instance import InstanceError, MergeInstance, Subproblem
from src.spms.step1 import (
    partition, partition_window, pivot_count, sample_positions, sampling_interval, step1_sample_sort
)


def sorted_runs(seed: int, runs: int, length: int):
    """`runs` sorted runs of (key, index) records with plenty of duplicate keys."""
    keys = np.random.default_rng(seed).integers(0, 500, size=runs * length)
    records = [(int(key), index) for index, key in enumerate(keys)]
    return [sorted(records[i * length:(i + 1) * length]) for i in range(runs)]


def load_instance(ctx, runs, r):
    arena = load(ctx.memory, [record for run in runs for record in run])
    return MergeInstance(arena=arena, lo=0, lengths=[len(run) for run in runs], r=r)


def test_sort_degenerate_inputs() -> None:
    assert sort([]).output == []
    assert sort([5]).output == [5]


@pytest.mark.parametrize('seed', range(3))
def test_sort_matches_oracle(seed: int) -> None:
    rng = np.random.default_rng(seed)
    keys = [int(key) for key in rng.integers(0, 2 ** 40, size=int(rng.integers(100, 1500)))]
    run = sort(keys, block_words=16)
    assert run.output == sorted(keys)
    assert run.n == len(keys)
    assert not run.stats.violations


@pytest.mark.parametrize('keys', [list(range(300)), list(range(300, 0, -1)), [7] * 200 + [3] * 100])
def test_sort_structured_inputs(keys) -> None:
    assert sort(keys, block_words=16).output == sorted(keys)


def test_sort_dag_is_well_formed() -> None:
    run = sort(list(range(100, 0, -1)), block_words=16)
    run.dag.check_well_formed()
    assert run.dag.span() < run.dag.work()
    assert run.memory.peak_live_words >= 2 * 100


def test_two_runs_by_hand() -> None:
    ctx = make_context()
    instance = load_instance(ctx, [[1, 3, 5], [2, 4, 6]], r=2)
    target = ctx.memory.alloc(6)
    spms_merge(ctx, instance, target)
    assert target.values() == [1, 2, 3, 4, 5, 6]


def test_single_run_is_returned_unchanged() -> None:
    ctx = make_context()
    instance = load_instance(ctx, [list(range(40))], r=1)
    target = ctx.memory.alloc(40)
    spms_merge(ctx, instance, target)
    assert target.values() == list(range(40))


def test_invalid_instances_fault_before_any_work() -> None:
    ctx = make_context()
    with pytest.raises(InstanceError):
        spms_merge(ctx, load_instance(ctx, [[3, 1], [2, 4]], r=2), ctx.memory.alloc(4))
    with pytest.raises(InstanceError):
        spms_merge(ctx, load_instance(ctx, [[1], [2], [3]], r=2), ctx.memory.alloc(3))
    with pytest.raises(InstanceError):
        spms_merge(ctx, load_instance(ctx, [list(range(100)), list(range(100))], r=2), ctx.memory.alloc(200))


def test_sizes_and_constants() -> None:
    assert sampling_interval(16, 6) == 256
    assert sampling_interval(1, 6) == 1
    assert sample_positions(1000, 256) == [255, 511, 767]
    assert partition_window(16, 6) == (4097, 12287)
    assert partition_window(4, 6) == (65, 191)
    assert [group_size(r) for r in (2, 4, 10, 16, 17)] == [2, 2, 4, 4, 5]


def test_short_lists_give_no_pivots() -> None:
    ctx = make_context()
    instance = load_instance(ctx, sorted_runs(0, 4, 10), r=4)
    assert pivot_count(instance, 6) == 0
    assert partition(ctx, instance, ctx.memory.alloc(40)) is None


def test_sample_sort_ranks_every_sample_list() -> None:
    ctx = make_context()
    runs = sorted_runs(1, 4, 250)
    samples = step1_sample_sort(ctx, load_instance(ctx, runs, r=4))
    lists = [[run[position] for position in sample_positions(len(run), samples.interval)] for run in runs]
    items = samples.ranked.items()
    assert items == sorted(item for sample in lists for item in sample)
    for e, item in enumerate(items):
        expected = [sum(1 for other in sample if other < item) for sample in lists]
        assert samples.ranked.straddles(e) == [(rho - 1, rho) for rho in expected]
    assert samples.sample.passed


def test_partition_splits_about_pivots() -> None:
    ctx = make_context()
    runs = sorted_runs(2, 4, 250)
    target = ctx.memory.alloc(1000)
    subproblems = partition(ctx, load_instance(ctx, runs, r=4), target)
    assert subproblems is not None and len(subproblems) > 1
    assert sum(subproblem.n for subproblem in subproblems) == 1000
    values = target.values()
    previous_max = None
    for subproblem in subproblems:
        items = values[subproblem.lo:subproblem.lo + subproblem.n]
        assert items
        offset = 0
        for length in subproblem.lengths:
            fragment = items[offset:offset + length]
            assert fragment == sorted(fragment)
            offset += length
        if previous_max is not None:
            assert min(items) > previous_max
        previous_max = max(items)
    assert ctx.stats.partitions == 1
    assert not ctx.stats.violations
    low, high = partition_window(4, 6)
    assert all(low <= size <= high or final for _, size, final in ctx.stats.sizes) or ctx.stats.flags
    assert all(array.passed for array in ctx.memory.get_buffered())


def test_merge_of_four_runs_records_partition_windows() -> None:
    ctx = make_context()
    runs = sorted_runs(3, 4, 250)
    target = ctx.memory.alloc(1000)
    spms_merge(ctx, load_instance(ctx, runs, r=4), target)
    assert target.values() == sorted(record for run in runs for record in run)
    assert ctx.stats.partitions >= 1
    assert not ctx.stats.violations


def test_step2_groups_lists_in_directory_order() -> None:
    ctx = make_context()
    runs = sorted_runs(4, 10, 5)
    source = load(ctx.memory, [record for run in runs for record in run])
    target = ctx.memory.alloc(50)
    sizes = step2_group(ctx, Subproblem(lo=0, lengths=[5] * 10), 16, source, target, level=0)
    assert sizes == [20, 20, 10]
    values = target.values()
    for start, groups in ((0, runs[:4]), (20, runs[4:8]), (40, runs[8:])):
        assert values[start:start + sum(len(run) for run in groups)] == sorted(
            record for run in groups for record in run)


def test_step3_merges_group_outputs() -> None:
    ctx = make_context()
    runs = sorted_runs(5, 4, 30)
    source = load(ctx.memory, [record for run in runs for record in run])
    target = ctx.memory.alloc(120)
    step3_merge(ctx, Subproblem(lo=0, lengths=[30] * 4), [30] * 4, 16, source, target, level=0)
    assert target.values() == sorted(record for run in runs for record in run)

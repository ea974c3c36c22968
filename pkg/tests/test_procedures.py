from __future__ import annotations

from itertools import accumulate

import numpy as np
import pytest

from conftest import load, make_context
from model.enums import AllocationTag, NodeKind, PermuteMode
from src.faults import StructuralFault
from src.fs.audit import sharing_audit
from src.spms.instance import PivotSet, SubvectorDirectory
from src.spms.primitives import prefix_sums, straddle_search
from src.spms.procedures import (
    PermutationError, StraddleWidthError, permuting_writes, read_directory, small_multi_merge, tr_prep,
    transposing_redistribution
)


def test_prefix_sums_by_hand() -> None:
    ctx = make_context()
    assert prefix_sums(ctx, load(ctx.memory, [1, 2, 3, 4])).values() == [0, 1, 3, 6]
    assert prefix_sums(ctx, load(ctx.memory, [])).values() == []


def test_prefix_sums_match_a_scan() -> None:
    ctx = make_context()
    values = [int(value) for value in np.random.default_rng(3).integers(0, 100, size=257)]
    expected = [0, *accumulate(values)][:-1]
    assert prefix_sums(ctx, load(ctx.memory, values)).values() == expected


def test_prefix_sums_with_stride() -> None:
    ctx = make_context()
    pairs = load(ctx.memory, [2, 0, 5, 9, 1, 7])
    assert prefix_sums(ctx, pairs, count=3, stride=2).values() == [0, 2, 7]


def test_straddle_search() -> None:
    ctx = make_context()
    array = load(ctx.memory, [10, 20, 30, 40])
    assert straddle_search(array, 0, 4, 25) == 2
    assert straddle_search(array, 1, 3, 5) == 1
    assert straddle_search(array, 1, 3, 50) == 3


def example_directory(ctx, pairs):
    return SubvectorDirectory(pairs=load(ctx.memory, pairs), rows=2, cols=2)


@pytest.mark.parametrize('output_order', [True, False])
def test_transposing_redistribution_by_hand(output_order: bool) -> None:
    ctx = make_context()
    source = load(ctx.memory, list('abcdef'))
    directory = example_directory(ctx, [2, 0, 2, 3, 1, 2, 1, 5])
    target = transposing_redistribution(ctx, source, directory, output_order=output_order)
    assert target.values() == list('abdecf')
    assert read_directory(ctx, directory) == [(2, 0), (2, 3), (1, 2), (1, 5)]


def test_transposing_redistribution_single_column_is_a_copy() -> None:
    ctx = make_context()
    source = load(ctx.memory, [5, 6, 7])
    directory = SubvectorDirectory(pairs=load(ctx.memory, [3, 0]), rows=1, cols=1)
    assert transposing_redistribution(ctx, source, directory).values() == [5, 6, 7]


def test_overlapping_directory_faults() -> None:
    ctx = make_context()
    source = load(ctx.memory, list('abcdef'))
    with pytest.raises(StructuralFault):
        transposing_redistribution(ctx, source, example_directory(ctx, [2, 0, 2, 1, 1, 4, 1, 5]))


def pivot_set(ctx, pivots, straddles, d):
    """Pivot records laid out as item, then (lower, upper) per list."""
    words = list()
    for pivot, pairs in zip(pivots, straddles):
        words.append(pivot)
        for lower, upper in pairs:
            words.extend((lower, upper))
    width = len(straddles[0]) if straddles else 2
    return PivotSet(records=load(ctx.memory, words), width=width, count=len(pivots), d=d)


@pytest.mark.parametrize('straddles, d', [([(1, 2), (1, 2)], 1), ([(-1, 4), (-1, 4)], 5)])
def test_tr_prep_by_hand(straddles, d) -> None:
    ctx = make_context()
    lists = load(ctx.memory, [1, 3, 5, 7, 2, 4, 6, 8])
    directory = tr_prep(ctx, lists, [4, 4], pivot_set(ctx, [5], [straddles], d))
    assert [directory.entry(t) for t in range(4)] == [(2, 0), (2, 4), (2, 2), (2, 6)]
    assert transposing_redistribution(ctx, lists, directory).values() == [1, 3, 2, 4, 5, 7, 6, 8]


def test_tr_prep_without_pivots_keeps_whole_lists() -> None:
    ctx = make_context()
    lists = load(ctx.memory, [1, 3, 5, 7, 2, 4, 6, 8])
    pivots = PivotSet(records=ctx.memory.alloc(0), width=2, count=0, d=1)
    directory = tr_prep(ctx, lists, [4, 4], pivots)
    assert [directory.entry(t) for t in range(directory.entries)] == [(4, 0), (4, 4)]


def test_tr_prep_rejects_wide_straddles() -> None:
    ctx = make_context()
    lists = load(ctx.memory, [1, 3, 5, 7, 2, 4, 6, 8])
    with pytest.raises(StraddleWidthError):
        tr_prep(ctx, lists, [4, 4], pivot_set(ctx, [5], [[(-1, 4), (1, 2)]], 1))


@pytest.mark.parametrize('mode', list(PermuteMode))
def test_permuting_writes_by_hand(mode: PermuteMode) -> None:
    ctx = make_context()
    permutation = load(ctx.memory, [2, 0, 1])
    target = permuting_writes(ctx, permutation, load(ctx.memory, list('abc')), ell=1, ell_out=2, mode=mode)
    values = target.values()
    assert [values[0], values[2], values[4]] == list('bca')


def test_identity_permutation_copies() -> None:
    ctx = make_context()
    source = load(ctx.memory, [9, 8, 7, 6, 5])
    assert permuting_writes(ctx, load(ctx.memory, [0, 1, 2, 3, 4]), source).values() == [9, 8, 7, 6, 5]


def test_hardened_writes_go_through_scratch() -> None:
    ctx = make_context(block_words=8)
    permuting_writes(ctx, load(ctx.memory, [1, 0]), load(ctx.memory, [3, 4]))
    scratch = [allocation for allocation in ctx.memory.get_allocations() if allocation.tag is AllocationTag.Scratch]
    assert len(scratch) == 1
    assert scratch[0].length == 4
    assert not scratch[0].live


def test_wide_permutations_scatter_without_scratch() -> None:
    ctx = make_context(block_words=2)
    permutation = load(ctx.memory, [3, 1, 4, 0, 2])
    target = permuting_writes(ctx, permutation, load(ctx.memory, list('abcde')))
    dag = ctx.fj.finish()
    assert target.values() == list('dbeac')
    assert not any(allocation.tag is AllocationTag.Scratch for allocation in ctx.memory.get_allocations())
    assert len(dag.scatter_ranges) == 1
    start, end = dag.scatter_ranges[0]
    assert dag.get_node(start).kind is NodeKind.Fork
    assert dag.get_node(start).mate == end - 1
    assert sharing_audit(dag, ctx.memory).per_fork == {}


def test_direct_scatter_is_audited() -> None:
    ctx = make_context(block_words=2)
    permutation = load(ctx.memory, [0, 2, 4, 6, 1, 3, 5, 7])
    permuting_writes(ctx, permutation, load(ctx.memory, list(range(8))), mode=PermuteMode.Direct)
    dag = ctx.fj.finish()
    assert dag.scatter_ranges == []
    assert sharing_audit(dag, ctx.memory).worst == 4


def test_non_permutation_faults() -> None:
    ctx = make_context()
    with pytest.raises(PermutationError):
        permuting_writes(ctx, load(ctx.memory, [0, 0, 1]), load(ctx.memory, [1, 2, 3]))


def brute_force_merge(problems):
    """Merged items and, per item and list, the number of smaller items in that list."""
    items, straddles = list(), list()
    for lists in problems:
        merged = sorted(item for items_ in lists for item in items_)
        for item in merged:
            items.append(item)
            straddles.append([sum(1 for other in items_ if other < item) for items_ in lists])
    return items, straddles


def random_problems(rng, count, width):
    problems, index = list(), 0
    for _ in range(count):
        lists = list()
        for _ in range(int(rng.integers(1, width + 1))):
            length = int(rng.integers(0, 6))
            keys = sorted(int(key) for key in rng.integers(0, 10, size=length))
            lists.append([(key, index + offset) for offset, key in enumerate(keys)])
            index += length
        problems.append(lists)
    return problems


def test_small_multi_merge_by_hand() -> None:
    ctx = make_context()
    ranked = small_multi_merge(ctx, load(ctx.memory, [1, 4, 2, 3]), [[2, 2]], width=2)
    assert ranked.items() == [1, 2, 3, 4]
    assert ranked.straddles(2) == [(0, 1), (0, 1)]
    assert ranked.straddles(0) == [(-1, 0), (-1, 0)]


def test_small_multi_merge_single_list() -> None:
    ctx = make_context()
    ranked = small_multi_merge(ctx, load(ctx.memory, [5, 6, 7]), [[3]], width=1)
    assert ranked.items() == [5, 6, 7]
    assert [ranked.straddles(e) for e in range(3)] == [[(-1, 0)], [(0, 1)], [(1, 2)]]


@pytest.mark.parametrize('seed', range(5))
def test_small_multi_merge_matches_brute_force(seed: int) -> None:
    ctx = make_context()
    width = 3
    problems = random_problems(np.random.default_rng(seed), 4, width)
    source = load(ctx.memory, [item for lists in problems for items in lists for item in items])
    ranked = small_multi_merge(ctx, source, [[len(items) for items in lists] for lists in problems], width)
    items, ranks = brute_force_merge(problems)
    assert ranked.items() == items
    for e, expected in enumerate(ranks):
        expected = expected + [0] * (width - len(expected))
        assert ranked.straddles(e) == [(rho - 1, rho) for rho in expected]


def transpose_columns(output_order: bool):
    """Two lists of 16 items each split into 16 single-item columns."""
    ctx = make_context(block_words=4)
    source = load(ctx.memory, list(range(32)))
    pairs = list()
    for j in range(16):
        for i in range(2):
            pairs.extend((1, 16 * i + j))
    directory = SubvectorDirectory(pairs=load(ctx.memory, pairs), rows=2, cols=16)
    target = transposing_redistribution(ctx, source, directory, output_order=output_order)
    dag = ctx.fj.finish()
    return target, sharing_audit(dag, ctx.memory)


def test_output_order_keeps_sibling_sharing_low() -> None:
    target, audit = transpose_columns(output_order=True)
    assert target.values() == [16 * (t % 2) + t // 2 for t in range(32)]
    assert audit.passed
    assert audit.worst <= 2


def test_row_major_order_fails_the_sharing_audit() -> None:
    target, audit = transpose_columns(output_order=False)
    assert target.values() == [16 * (t % 2) + t // 2 for t in range(32)]
    assert not audit.passed
    assert audit.worst >= 8

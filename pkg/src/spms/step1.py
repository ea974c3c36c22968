import bisect
import logging
from itertools import accumulate
from typing import List, Optional

from model.global_constants import WEAK_WINDOW_FACTOR
from src.memory.sim_memory import SimArray
from src.spms.context import SpmsContext
from src.spms.instance import MergeInstance, PivotSet, SampleSet, Subproblem
from src.spms.primitives import merge_search_accesses, parallel_copy, search_steps
from src.spms.procedures import read_directory, small_multi_merge, tr_prep, transposing_redistribution

logger = logging.getLogger(__name__)


def sampling_interval(r: int, c: int) -> int:
    """Distance between consecutive samples of a list: max(1, r^(c/2 - 1))."""
    return max(1, r ** (c // 2 - 1))


def sample_positions(length: int, interval: int) -> List[int]:
    """0-based positions of every interval-th item of a list."""
    return [(t + 1) * interval - 1 for t in range(length // interval)]


def partition_window(r: int, c: int):
    """Closed size range of every non-final subproblem of a partition."""
    half = r ** (c // 2)
    return half + 1, 3 * half - 1


def pivot_count(instance: MergeInstance, c: int) -> int:
    interval = sampling_interval(instance.r, c)
    s = sum(length // interval for length in instance.lengths)
    return s // (2 * instance.r)


def step1_sample_sort(ctx: SpmsContext, instance: MergeInstance) -> SampleSet:
    """Forms the sample of every list and sorts it.

    (I) every r-th sample item is sorted by one small multi merge,
    (II) the sample is split about those items, which straddle every
    sample list at distance r, (III) each piece (at most r lists of at
    most r items) is sorted by small multi merge. The returned ranks
    are global ranks in the sample lists.
    """
    fj, memory = ctx.fj, ctx.memory
    r, m = instance.r, instance.runs
    interval = sampling_interval(r, ctx.params.c)
    lengths = [length // interval for length in instance.lengths]
    offsets = [0, *accumulate(lengths)][:-1]
    s = sum(lengths)
    sub_lengths = [length // r for length in lengths]
    sub_total = sum(sub_lengths)
    source = instance.view()
    source_offsets = instance.offsets

    sample = memory.alloc_buffered(s, sub_total * m * search_steps(r))
    # allocated first so the temporaries freed above it coalesce into one hole
    ranked_records = memory.alloc(s * (2 * m + 1))

    def take_sample(u: int) -> None:
        i = bisect.bisect_right(offsets, u) - 1
        t = u - offsets[i]
        sample.core.write(u, source.read(source_offsets[i] + (t + 1) * interval - 1))

    fj.parallel_for(0, s, take_sample)

    # (I)
    sub_offsets = [0, *accumulate(sub_lengths)][:-1]
    subsample = memory.alloc_buffered(sub_total, merge_search_accesses([sub_lengths]))

    def take_subsample(v: int) -> None:
        i = bisect.bisect_right(sub_offsets, v) - 1
        t = v - sub_offsets[i]
        subsample.core.write(v, sample.core.read(offsets[i] + (t + 1) * r - 1))

    fj.parallel_for(0, sub_total, take_subsample)
    subsample.seal()
    ranked_subsample = small_multi_merge(ctx, subsample.core, [sub_lengths], width=m)

    # (II)
    pivots = PivotSet(records=memory.alloc(sub_total * (2 * m + 1)), width=m, count=sub_total, d=r)

    def subsample_pivot(e: int) -> None:
        pivots.records.write(pivots.item_index(e), ranked_subsample.records.read(ranked_subsample.item_index(e)))
        for i in range(m):
            rho = ranked_subsample.records.read(ranked_subsample.upper_index(e, i))
            pivots.records.write(pivots.lower_index(e, i), rho * r - 1)
            pivots.records.write(pivots.upper_index(e, i), (rho + 1) * r - 1)

    fj.parallel_for(0, sub_total, subsample_pivot)
    sample.seal()
    directory = tr_prep(ctx, sample.core, lengths, pivots)
    entries = read_directory(ctx, directory)
    problems = [[entries[j * m + i][0] for i in range(m)] for j in range(directory.cols)]
    pieces = memory.alloc_buffered(s, merge_search_accesses(problems))
    transposing_redistribution(ctx, sample.core, directory, target=pieces.core)
    pieces.seal()

    # (III)
    ranked = small_multi_merge(ctx, pieces.core, problems, width=m, records=ranked_records)
    column_starts = [0, *accumulate(sum(problem) for problem in problems)][:-1]

    def globalize(o: int) -> None:
        j = bisect.bisect_right(column_starts, o) - 1
        for i in range(m):
            base = entries[j * m + i][1] - offsets[i]
            for index in (ranked.lower_index(o, i), ranked.upper_index(o, i)):
                ranked.records.write(index, ranked.records.read(index) + base)

    fj.parallel_for(0, s, globalize)

    for array in (ranked_subsample.records, pivots.records, directory.pairs):
        memory.free(array)
    subsample.release()
    pieces.release()
    logger.debug('sample of %d items (interval %d) sorted through %d pieces', s, interval, directory.cols)
    return SampleSet(sample=sample, lengths=lengths, interval=interval, ranked=ranked)


def step1_partition(ctx: SpmsContext, instance: MergeInstance, samples: SampleSet,
                    target: SimArray) -> List[Subproblem]:
    """Splits the instance about every 2r-th sorted sample item.

    Subproblem i receives, list by list, the items in [p_{i-1}, p_i)
    and is written to `target` in the same word range as the input.
    """
    fj, memory = ctx.fj, ctx.memory
    r, m = instance.r, instance.runs
    interval = samples.interval
    count = samples.s // (2 * r)
    ranked = samples.ranked
    pivots = PivotSet(records=memory.alloc(count * (2 * m + 1)), width=m, count=count, d=interval)

    def pick(t: int) -> None:
        o = (t + 1) * 2 * r - 1
        pivots.records.write(pivots.item_index(t), ranked.records.read(ranked.item_index(o)))
        for i in range(m):
            rho = ranked.records.read(ranked.upper_index(o, i))
            pivots.records.write(pivots.lower_index(t, i), rho * interval - 1)
            pivots.records.write(pivots.upper_index(t, i), (rho + 1) * interval - 1)

    fj.parallel_for(0, count, pick)

    searched = memory.alloc_buffered(instance.n, count * m * search_steps(interval))
    parallel_copy(ctx, instance.view(), searched.core)
    searched.seal()
    directory = tr_prep(ctx, searched.core, instance.lengths, pivots)
    transposing_redistribution(ctx, searched.core, directory, target=target.view(instance.lo, instance.n))
    entries = read_directory(ctx, directory)

    subproblems = list()
    lo = instance.lo
    for j in range(directory.cols):
        lengths = [entries[j * m + i][0] for i in range(m)]
        subproblems.append(Subproblem(lo=lo, lengths=[length for length in lengths if length]))
        lo += sum(lengths)

    memory.free(pivots.records)
    memory.free(directory.pairs)
    searched.release()
    check_partition_window(ctx, instance, subproblems)
    return subproblems


def check_partition_window(ctx: SpmsContext, instance: MergeInstance, subproblems: List[Subproblem]) -> None:
    """Records every non-final subproblem size against the partition window."""
    stats = ctx.stats
    c = ctx.params.c
    low, high = partition_window(instance.r, c)
    weak = WEAK_WINDOW_FACTOR * c * instance.r ** (c // 2)
    stats.partitions += 1
    for index, subproblem in enumerate(subproblems):
        final = index == len(subproblems) - 1
        stats.sizes.append((instance.r, subproblem.n, final))
        if final or low <= subproblem.n <= high:
            continue
        finding = f'r={instance.r} n={instance.n}: subproblem {index} of size {subproblem.n} outside [{low}, {high}]'
        if subproblem.n <= weak:
            stats.flags.append(finding)
            logger.warning('weak bound only: %s', finding)
        else:
            stats.violations.append(finding)
            logger.warning('partition window violated: %s', finding)


def partition(ctx: SpmsContext, instance: MergeInstance, target: SimArray) -> Optional[List[Subproblem]]:
    """Step 1; None when the sample yields no pivot.

    The node range of every partition is recorded on the dag.
    """
    if pivot_count(instance, ctx.params.c) == 0:
        return None

    def split() -> List[Subproblem]:
        samples = step1_sample_sort(ctx, instance)
        subproblems = step1_partition(ctx, instance, samples, target)
        samples.sample.release()
        ctx.memory.free(samples.ranked.records)
        return subproblems

    subproblems = ctx.fj.recorded(ctx.fj.dag.partition_ranges, split)
    logger.debug('partitioned n=%d r=%d into %d subproblems', instance.n, instance.r, len(subproblems))
    return subproblems

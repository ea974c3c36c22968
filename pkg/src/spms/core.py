import logging
import math
from dataclasses import dataclass
from itertools import accumulate
from typing import List, Optional, Sequence

from model.global_constants import DEFAULT_B
from model.validation.spms_params import SpmsParams
from src.dag.builder import ForkJoinBuilder
from src.dag.dag import Dag
from src.faults import StructuralFault
from src.memory.sim_memory import SimArray, SimMemory
from src.spms.context import PartitionStats, SpmsContext
from src.spms.instance import MergeInstance, Subproblem
from src.spms.primitives import parallel_copy
from src.spms.step1 import partition

logger = logging.getLogger(__name__)

# recursion levels allowed before a call is treated as non-terminating
MAX_LEVELS = 256


@dataclass
class SortRun:
    """Result of one instrumented sort."""
    output  : List[int]
    dag     : Dag
    memory  : SimMemory
    stats   : PartitionStats
    n       : int


def group_size(r: int) -> int:
    """ceil(sqrt(r)) in exact integer arithmetic."""
    root = math.isqrt(r)
    return root if root * root == r else root + 1


def base_case(ctx: SpmsContext, source: SimArray, target: SimArray) -> None:
    """Insertion sort in one leaf, charging every comparison."""
    values = [source.read(i) for i in range(source.length)]
    comparisons = 0
    for i in range(1, len(values)):
        item = values[i]
        j = i - 1
        while j >= 0:
            comparisons += 1
            if values[j] <= item:
                break
            values[j + 1] = values[j]
            j -= 1
        values[j + 1] = item
    for i, item in enumerate(values):
        target.write(i, item)
    ctx.fj.charge(comparisons)


def spms_merge(ctx: SpmsContext, instance: MergeInstance, target: SimArray, level: int = 0,
               validate: bool = True) -> None:
    """Merges the runs of `instance` into the same word range of `target`.

    Step 0 sorts small inputs directly. Otherwise Step 1 partitions into
    `target` when n > 3 r^(c/2) (an identity copy stands in when it does
    not run), then every subproblem merges groups of ceil(sqrt(r)) lists
    back into the instance arena (Step 2) and the group outputs into
    `target` (Step 3).
    """
    fj = ctx.fj
    params = ctx.params
    if validate:
        instance.validate(params.c)
    if level > MAX_LEVELS:
        raise StructuralFault(f'recursion deeper than {MAX_LEVELS} levels at n={instance.n}, r={instance.r}')
    instance = MergeInstance(arena=instance.arena, lo=instance.lo,
                             lengths=[length for length in instance.lengths if length], r=instance.r)
    n = instance.n
    output = target.view(instance.lo, n)
    if instance.runs <= 1:
        parallel_copy(ctx, instance.view(), output)
        return
    if n <= params.base_threshold:
        base_case(ctx, instance.view(), output)
        return

    subproblems: Optional[List[Subproblem]] = None
    if n > 3 * instance.r ** (params.c // 2):
        subproblems = partition(ctx, instance, target)
    if subproblems is None:
        parallel_copy(ctx, instance.view(), output)
        subproblems = [Subproblem(lo=instance.lo, lengths=instance.lengths)]
    logger.debug('level %d: n=%d r=%d -> %d subproblems', level, n, instance.r, len(subproblems))

    def solve(index: int) -> None:
        sizes = step2_group(ctx, subproblems[index], instance.r, target, instance.arena, level)
        step3_merge(ctx, subproblems[index], sizes, instance.r, instance.arena, target, level)

    fj.parallel_for(0, len(subproblems), solve)


def step2_group(ctx: SpmsContext, subproblem: Subproblem, r: int, source: SimArray, target: SimArray,
                level: int) -> List[int]:
    """Merges every ceil(sqrt(r)) consecutive lists of `subproblem` from `source` into `target`.

    Returns the sizes of the merged groups, in directory order.
    """
    g = group_size(r)
    groups = [subproblem.lengths[start:start + g] for start in range(0, len(subproblem.lengths), g)]
    sizes = [sum(group) for group in groups]
    starts = [subproblem.lo + offset for offset in [0, *accumulate(sizes)][:-1]]
    ctx.fj.parallel_for(0, len(groups), lambda w: spms_merge(
        ctx, MergeInstance(arena=source, lo=starts[w], lengths=groups[w], r=g), target, level + 1, validate=False))
    return sizes


def step3_merge(ctx: SpmsContext, subproblem: Subproblem, sizes: List[int], r: int, source: SimArray,
                target: SimArray, level: int) -> None:
    spms_merge(ctx, MergeInstance(arena=source, lo=subproblem.lo, lengths=sizes, r=group_size(r)),
               target, level + 1, validate=False)


def sort(keys: Sequence[int], params: Optional[SpmsParams] = None, block_words: int = DEFAULT_B,
         memory: Optional[SimMemory] = None) -> SortRun:
    """Sorts `keys` as n runs of length one and records the computation dag.

    Loading the keys into the arena is part of the dag. Equal keys are
    ordered by input position.
    """
    params = params or SpmsParams()
    memory = memory or SimMemory(block_words)
    fj = ForkJoinBuilder(memory)
    ctx = SpmsContext(fj=fj, params=params)
    n = len(keys)
    source = memory.alloc(n)
    target = memory.alloc(n)
    fj.parallel_for(0, n, lambda i: source.write(i, (keys[i], i)))
    instance = MergeInstance(arena=source, lo=0, lengths=[1] * n, r=max(n, 1))
    spms_merge(ctx, instance, target)
    dag = fj.finish()
    output = [key for key, _ in target.values()]
    logger.info('sorted n=%d: work=%d span=%d partitions=%d', n, dag.work(), dag.span(), ctx.stats.partitions)
    return SortRun(output=output, dag=dag, memory=memory, stats=ctx.stats, n=n)

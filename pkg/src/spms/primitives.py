import bisect
import math
from typing import Any, List, Optional

from src.memory.sim_memory import SimArray
from src.spms.context import SpmsContext
from src.spms.instance import KeyRecord


def search_steps(width: int) -> int:
    """Upper bound on the comparisons of one binary search over `width` items."""
    return math.ceil(math.log2(width + 1)) if width > 0 else 0


def merge_search_accesses(problems: List[List[int]]) -> int:
    """Reads small_multi_merge makes of its source for these problems.

    Every item is read once per other list of its problem and searched
    in that list, then read once more when it is moved.
    """
    total = 0
    for lengths in problems:
        searches = sum(1 + search_steps(length) for length in lengths)
        total += sum(length * (searches - search_steps(length)) for length in lengths)
    return total


def straddle_search(array: SimArray, lo: int, hi: int, pivot: KeyRecord) -> int:
    """Smallest index in [lo, hi) holding a value >= pivot, hi if none.

    Every comparison is a traced read of `array`.
    """
    return bisect.bisect_left(array, pivot, lo, hi)


def tree_position(lo: int, hi: int) -> int:
    """In-order slot of the summation tree node covering [lo, hi)."""
    if hi - lo == 1:
        return 2 * lo
    return 2 * ((lo + hi) // 2) - 1


def prefix_sums(ctx: SpmsContext, values: SimArray, count: Optional[int] = None, stride: int = 1,
                offset: int = 0, out: Optional[SimArray] = None) -> SimArray:
    """Exclusive prefix sums of values[offset + stride * i], i < count.

    An up-sweep fork-join fills an in-order summation tree of 2 count - 1
    words, then a down-sweep hands each subtree its offset and writes
    out[i] at the leaves. Every tree word is written once and read once.
    """
    fj = ctx.fj
    if count is None:
        count = (values.length - offset + stride - 1) // stride
    if out is None:
        out = ctx.memory.alloc(count)
    if count == 0:
        return out
    tree = ctx.memory.alloc(2 * count - 1)

    def up(lo: int, hi: int) -> None:
        if hi - lo == 1:
            tree.write(2 * lo, values.read(offset + stride * lo))
            return
        mid = (lo + hi) // 2
        fj.fork(lambda: up(lo, mid), lambda: up(mid, hi))
        tree.write(2 * mid - 1, tree.read(tree_position(lo, mid)) + tree.read(tree_position(mid, hi)))

    def down(lo: int, hi: int, acc: int) -> None:
        if hi - lo == 1:
            out.write(lo, acc)
            return
        mid = (lo + hi) // 2
        left = tree.read(tree_position(lo, mid))
        fj.fork(lambda: down(lo, mid, acc), lambda: down(mid, hi, acc + left))

    up(0, count)
    down(0, count, 0)
    ctx.memory.free(tree)
    return out


def parallel_copy(ctx: SpmsContext, source: SimArray, target: SimArray) -> None:
    if source.length != target.length:
        raise ValueError(f'copy of {source.length} words into {target.length}')
    ctx.fj.parallel_for(0, source.length, lambda i: target.write(i, source.read(i)))


def parallel_fill(ctx: SpmsContext, target: SimArray, value: Any = 0) -> None:
    ctx.fj.parallel_for(0, target.length, lambda i: target.write(i, value))

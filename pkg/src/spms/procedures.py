import logging
from itertools import accumulate
from typing import List, Optional, Tuple

from model.enums import AllocationTag, PermuteMode
from src.faults import StructuralFault
from src.memory.sim_memory import SimArray
from src.spms.context import SpmsContext
from src.spms.instance import PivotSet, RankedOutput, SubvectorDirectory
from src.spms.primitives import parallel_fill, prefix_sums, straddle_search

logger = logging.getLogger(__name__)


class PermutationError(StructuralFault):
    """Raised when permuting writes receive something other than a permutation."""
    message = 'not a permutation'


class StraddleWidthError(StructuralFault):
    """Raised when two straddling positions are further apart than d."""
    message = 'straddle wider than d'


def transposing_redistribution(ctx: SpmsContext, source: SimArray, directory: SubvectorDirectory,
                               target: Optional[SimArray] = None,
                               output_order: Optional[bool] = None) -> SimArray:
    """Copies Y_11, Y_21, .., Y_r1, .., Y_1k, .., Y_rk into `target`.

    Output offsets come from prefix sums over the directory lengths. The
    outer loop runs over subvectors in output order, so consecutive
    iterations fill consecutive output ranges; `output_order=False`
    walks them row by row instead.
    """
    fj = ctx.fj
    if output_order is None:
        output_order = ctx.params.output_order
    directory.check_disjoint(source.length)
    total = directory.total()
    if target is None:
        target = ctx.memory.alloc(total)
    elif target.length != total:
        raise StructuralFault(f'target of {target.length} words for {total} items')
    entries = directory.entries
    if entries == 0:
        return target
    offsets = prefix_sums(ctx, directory.pairs, count=entries, stride=2)
    rows, cols = directory.rows, directory.cols

    def subvector(u: int) -> None:
        t = u if output_order else (u % cols) * rows + u // cols
        length = directory.pairs.read(2 * t)
        start = directory.pairs.read(2 * t + 1)
        offset = offsets.read(t)
        fj.parallel_for(0, length, lambda e: target.write(offset + e, source.read(start + e)))

    fj.parallel_for(0, entries, subvector)
    ctx.memory.free(offsets)
    return target


def tr_prep(ctx: SpmsContext, lists: SimArray, lengths: List[int], pivots: PivotSet) -> SubvectorDirectory:
    """Splits each of the r sorted lists about the k-1 pivots.

    (i) one straddle-bounded search per (pivot, list) fills a
    (k+1) x r rank table whose first row is 0 and last row the list
    lengths, (ii) consecutive rank rows give the sublist lengths,
    (iii) lengths and starts are zipped into the directory.
    """
    fj = ctx.fj
    rows = len(lengths)
    cols = pivots.k
    offsets = [0, *accumulate(lengths)][:-1]
    ranks = ctx.memory.alloc((cols + 1) * rows)

    def rank(u: int) -> None:
        t, i = divmod(u, rows)
        if t == 0:
            ranks.write(i, 0)
            return
        if t == cols:
            ranks.write(t * rows + i, lengths[i])
            return
        pivot = pivots.records.read(pivots.item_index(t - 1))
        lower = pivots.records.read(pivots.lower_index(t - 1, i))
        upper = pivots.records.read(pivots.upper_index(t - 1, i))
        hi = min(upper, lengths[i])
        if upper - lower > pivots.d:
            raise StraddleWidthError(f'pivot {t - 1} list {i}: ({lower}, {upper}) with d={pivots.d}')
        position = straddle_search(lists, offsets[i] + lower + 1, offsets[i] + hi, pivot)
        ranks.write(t * rows + i, position - offsets[i])

    fj.parallel_for(0, (cols + 1) * rows, rank)

    sizes = ctx.memory.alloc(cols * rows)
    fj.parallel_for(0, cols * rows, lambda t: sizes.write(t, ranks.read(t + rows) - ranks.read(t)))

    pairs = ctx.memory.alloc(2 * cols * rows)

    def zip_entry(t: int) -> None:
        pairs.write(2 * t, sizes.read(t))
        pairs.write(2 * t + 1, offsets[t % rows] + ranks.read(t))

    fj.parallel_for(0, cols * rows, zip_entry)
    ctx.memory.free(ranks)
    ctx.memory.free(sizes)
    return SubvectorDirectory(pairs=pairs, rows=rows, cols=cols)


def read_directory(ctx: SpmsContext, directory: SubvectorDirectory) -> List[Tuple[int, int]]:
    """Traced parallel read of every (length, start) entry."""
    entries: List[Tuple[int, int]] = [(0, 0)] * directory.entries

    def fetch(t: int) -> None:
        entries[t] = (directory.pairs.read(2 * t), directory.pairs.read(2 * t + 1))

    ctx.fj.parallel_for(0, directory.entries, fetch)
    return entries


def permuting_writes(ctx: SpmsContext, permutation: SimArray, source: SimArray, ell: int = 1,
                     ell_out: int = 1, target: Optional[SimArray] = None,
                     mode: Optional[PermuteMode] = None) -> SimArray:
    """C[ell_out P[i]] = A[ell i] for the x entries of the permutation P.

    Below x = B the hardened method routes every item through its own
    row of an all-zero x^2 scratch, then compacts; at x >= B items go
    straight to their destination as a recorded scatter loop.
    """
    fj = ctx.fj
    x = permutation.length
    if sorted(permutation.values()) != list(range(x)):
        raise PermutationError(f'{permutation.values()[:8]}...')
    if target is None:
        target = ctx.memory.alloc(ell_out * x)
    elif target.length < ell_out * (x - 1) + 1 and x:
        raise StructuralFault(f'target of {target.length} words for stride {ell_out} and x={x}')
    if mode is None:
        mode = ctx.params.permute_mode
    if mode is PermuteMode.Hardened and x >= ctx.block_words:
        fj.scatter_for(0, x, lambda i: target.write(ell_out * permutation.read(i), source.read(ell * i)))
        return target
    if mode is PermuteMode.Direct:
        fj.parallel_for(0, x, lambda i: target.write(ell_out * permutation.read(i), source.read(ell * i)))
        return target

    if mode is PermuteMode.Hardened:
        scratch = ctx.memory.alloc(x * x, tag=AllocationTag.Scratch)
        parallel_fill(ctx, scratch)
        fj.parallel_for(0, x, lambda i: scratch.write(permutation.read(i) * x, source.read(ell * i)))
        fj.parallel_for(0, x, lambda o: target.write(ell_out * o, scratch.read(o * x)))
    else:
        scratch = ctx.memory.alloc(x)
        fj.parallel_for(0, x, lambda i: scratch.write(permutation.read(i), source.read(ell * i)))
        fj.parallel_for(0, x, lambda o: target.write(ell_out * o, scratch.read(o)))
    ctx.memory.free(scratch)
    return target


def small_multi_merge(ctx: SpmsContext, source: SimArray, problems: List[List[int]], width: int,
                      records: Optional[SimArray] = None) -> RankedOutput:
    """Sorts h small multiway-merge problems laid out back to back in `source`.

    Problem w holds up to `width` sorted lists with the given lengths.
    Each item is ranked in every list of its problem by a full binary
    search, its rank in the problem is the sum, and the item lands in a
    record of 2 width + 1 words followed by the ranks it straddles.
    """
    fj = ctx.fj
    count = sum(sum(lengths) for lengths in problems)
    if any(len(lengths) > width for lengths in problems):
        raise StructuralFault(f'problem with more than {width} lists')
    stride = 2 * width + 1
    if records is None:
        records = ctx.memory.alloc(count * stride)
    output = RankedOutput(records=records, width=width, count=count)
    if count == 0:
        return output

    # item e -> (problem base, list offsets, list lengths, own list, position in own list)
    owners: List[Tuple[int, List[int], List[int], int, int]] = list()
    base = 0
    for lengths in problems:
        offsets = [base + offset for offset in [0, *accumulate(lengths)][:-1]]
        for j, length in enumerate(lengths):
            owners.extend((base, offsets, lengths, j, position) for position in range(length))
        base += sum(lengths)

    table = ctx.memory.alloc(count * width)
    identities = ctx.memory.alloc(count)

    def search(u: int) -> None:
        e, j = divmod(u, width)
        _, offsets, lengths, own, position = owners[e]
        if j >= len(lengths):
            table.write(u, 0)
            return
        if j == own:
            table.write(u, position)
            return
        item = source.read(e)
        found = straddle_search(source, offsets[j], offsets[j] + lengths[j], item)
        table.write(u, found - offsets[j])

    fj.parallel_for(0, count * width, search)
    sums = prefix_sums(ctx, table)

    ranks = ctx.memory.alloc(count)

    def total(e: int) -> None:
        last = e * width + width - 1
        ranks.write(e, sums.read(last) + table.read(last) - sums.read(e * width))
        identities.write(e, e)

    fj.parallel_for(0, count, total)
    ctx.memory.free(sums)

    inverse = ctx.memory.alloc(count)
    base = 0
    spans = list()
    for lengths in problems:
        size = sum(lengths)
        spans.append((base, size))
        base += size

    def permute(w: int) -> None:
        start, size = spans[w]
        if size == 0:
            return
        permutation = ranks.view(start, size)
        permuting_writes(ctx, permutation, source.view(start, size), ell=1, ell_out=stride,
                         target=records.view(start * stride, size * stride))
        permuting_writes(ctx, permutation, identities.view(start, size), ell=1, ell_out=1,
                         target=inverse.view(start, size))

    fj.parallel_for(0, len(problems), permute)

    def straddles(o: int) -> None:
        e = inverse.read(o)
        for j in range(width):
            rho = table.read(e * width + j)
            records.write(output.lower_index(o, j), rho - 1)
            records.write(output.upper_index(o, j), rho)

    fj.parallel_for(0, count, straddles)
    for array in (table, identities, ranks, inverse):
        ctx.memory.free(array)
    return output

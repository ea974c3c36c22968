from dataclasses import dataclass, field
from itertools import accumulate
from typing import List, Optional, Tuple

from src.faults import StructuralFault
from src.memory.buffered_array import BufferedArray
from src.memory.sim_memory import SimArray

KeyRecord = Tuple[int, int]


class InstanceError(StructuralFault):
    """Raised when a merge instance breaks its invariants."""
    message = 'invalid merge instance'


@dataclass
class MergeInstance:
    """r sorted runs stored back to back in `arena` starting at `lo`."""
    arena   : SimArray
    lo      : int
    lengths : List[int]
    r       : int

    @property
    def n(self) -> int:
        return sum(self.lengths)

    @property
    def runs(self) -> int:
        return len(self.lengths)

    @property
    def offsets(self) -> List[int]:
        return [0, *accumulate(self.lengths)][:-1]

    def view(self) -> SimArray:
        return self.arena.view(self.lo, self.n)

    def run(self, index: int) -> SimArray:
        return self.arena.view(self.lo + self.offsets[index], self.lengths[index])

    def validate(self, c: int) -> None:
        """Raises InstanceError unless runs are sorted and sizes fit r and c."""
        if self.runs > max(self.r, 1):
            raise InstanceError(f'{self.runs} runs for r={self.r}')
        if self.r >= 2 and self.n > 3 * self.r ** c:
            raise InstanceError(f'n={self.n} exceeds 3 r^c for r={self.r}, c={c}')
        if any(length < 0 for length in self.lengths):
            raise InstanceError('negative run length')
        values = self.view().values()
        for index, (offset, length) in enumerate(zip(self.offsets, self.lengths)):
            if any(values[i] > values[i + 1] for i in range(offset, offset + length - 1)):
                raise InstanceError(f'run {index} is not sorted')


@dataclass
class SubvectorDirectory:
    """(length, start) pairs of r*k subvectors in column-major order.

    Entry t = j * rows + i describes subvector Y_ij and sits at words
    2t (length) and 2t + 1 (start) of `pairs`.
    """
    pairs   : SimArray
    rows    : int
    cols    : int

    @property
    def entries(self) -> int:
        return self.rows * self.cols

    def entry(self, t: int) -> Tuple[int, int]:
        """Untraced (length, start) of entry t."""
        return self.pairs.peek(2 * t), self.pairs.peek(2 * t + 1)

    def total(self) -> int:
        return sum(self.entry(t)[0] for t in range(self.entries))

    def check_disjoint(self, limit: int) -> None:
        """Raises StructuralFault on overlapping or out of bounds ranges."""
        ranges = sorted((start, start + length) for length, start in map(self.entry, range(self.entries))
                        if length > 0)
        for start, end in ranges:
            if start < 0 or end > limit:
                raise StructuralFault(f'subvector [{start}, {end}) outside source of length {limit}')
        for (_, end), (start, _) in zip(ranges, ranges[1:]):
            if start < end:
                raise StructuralFault(f'overlapping subvectors at {start}')


@dataclass
class RankedOutput:
    """Sorted items, each followed by the (lower, upper) ranks it straddles in each of `width` lists.

    Record e occupies words [e (2w+1), (e+1)(2w+1)) of `records`.
    """
    records : SimArray
    width   : int
    count   : int

    @property
    def stride(self) -> int:
        return 2 * self.width + 1

    def item_index(self, e: int) -> int:
        return e * self.stride

    def lower_index(self, e: int, j: int) -> int:
        return e * self.stride + 1 + 2 * j

    def upper_index(self, e: int, j: int) -> int:
        return e * self.stride + 2 + 2 * j

    def items(self) -> List[KeyRecord]:
        return [self.records.peek(self.item_index(e)) for e in range(self.count)]

    def straddles(self, e: int) -> List[Tuple[int, int]]:
        return [(self.records.peek(self.lower_index(e, j)), self.records.peek(self.upper_index(e, j)))
                for j in range(self.width)]


@dataclass
class StraddleTable(RankedOutput):
    """Ranked output whose straddling positions are at most d apart."""
    d       : int = 1


@dataclass
class PivotSet(StraddleTable):
    """Pivots p_1..p_{k-1}; the sentinels p_0 and p_k stay implicit."""

    @property
    def k(self) -> int:
        return self.count + 1


@dataclass
class SampleSet:
    """Every interval-th item of each list, as r sample lists in one buffered array."""
    sample      : BufferedArray
    lengths     : List[int]
    interval    : int
    ranked      : Optional[RankedOutput] = field(default=None)

    @property
    def s(self) -> int:
        return sum(self.lengths)

    @property
    def offsets(self) -> List[int]:
        return [0, *accumulate(self.lengths)][:-1]


@dataclass
class Subproblem:
    """One A_i of a partition: list fragments laid out from `lo`."""
    lo      : int
    lengths : List[int]

    @property
    def n(self) -> int:
        return sum(self.lengths)

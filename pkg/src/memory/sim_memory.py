import bisect
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

from model.enums import AccessKind, AllocationTag
from src.faults import StructuralFault

logger = logging.getLogger(__name__)

AccessSink = Callable[[AccessKind, int], None]
AllocationClock = Callable[[], int]


class OutsideAllocationError(StructuralFault):
    """Raised on an access to a word that is not in a live allocation."""
    message = 'access outside live allocations'


@dataclass
class Allocation:
    """Bookkeeping of one block-aligned allocation.

    `first_node` is the first dag node allowed to touch it, 0 when the
    allocation was made outside a dag build.
    """
    id          : int
    base        : int
    length      : int
    words       : int
    tag         : AllocationTag
    owner       : Optional[int] = field(default=None)
    first_node  : int = field(default=0)
    live        : bool = field(default=True)
    discipline  : Optional[Any] = field(default=None)

    def block_ids(self, block_words: int) -> range:
        return range(self.base // block_words, (self.base + self.words) // block_words)


class SimArray:
    """View of `length` words starting at `base` inside one allocation."""
    __slots__ = ('memory', 'base', 'length', 'allocation')

    def __init__(self, memory: 'SimMemory', base: int, length: int, allocation: Allocation):
        self.memory = memory
        self.base = base
        self.length = length
        self.allocation = allocation

    def address(self, index: int) -> int:
        if not 0 <= index < self.length:
            raise OutsideAllocationError(f'index {index} outside array of length {self.length}')
        return self.base + index

    def read(self, index: int) -> Any:
        return self.memory.read(self.address(index))

    def write(self, index: int, value: Any) -> None:
        self.memory.write(self.address(index), value)

    def __getitem__(self, index: int) -> Any:
        # traced, so bisect over a SimArray charges every comparison
        return self.read(index)

    def peek(self, index: int) -> Any:
        return self.memory.peek(self.address(index))

    def values(self) -> List[Any]:
        """Untraced copy of the viewed words."""
        return [self.memory.peek(self.base + i) for i in range(self.length)]

    def view(self, start: int, length: int) -> 'SimArray':
        if start < 0 or length < 0 or start + length > self.length:
            raise OutsideAllocationError(f'view [{start}, {start + length}) of length {self.length}')
        return SimArray(self.memory, self.base + start, length, self.allocation)

    def blocks(self) -> range:
        block = self.memory.B
        if self.length == 0:
            return range(0)
        return range(self.base // block, (self.base + self.length - 1) // block + 1)

    def __len__(self):
        return self.length

    def __repr__(self) -> str:
        return f'SimArray(base={self.base}, length={self.length})'


class SimMemory:

    def __init__(self, block_words: int):
        """Flat block-structured address space.

        Every allocation starts on a block boundary and covers whole
        blocks. Freed heap, buffered and scratch blocks go back to a
        first-fit free list with coalescing; freed stacks go to a pool
        of their own, keyed by size, so stack blocks only ever hold
        stacks.
        """
        if block_words < 1:
            raise StructuralFault('block size must be at least one word')
        self.B = block_words
        self.__words: List[Any] = list()
        self.__top = 0
        self.__block_owner: Dict[int, Allocation] = dict()
        self.__history: Dict[int, List[Allocation]] = defaultdict(list)
        self.__history_nodes: Dict[int, List[int]] = defaultdict(list)
        self.__allocations: List[Allocation] = list()
        self.__free_bases: List[int] = list()
        self.__free_words: Dict[int, int] = dict()
        self.__stack_pool: Dict[int, List[int]] = dict()
        self.__buffered: List[Any] = list()
        self.__sink: Optional[AccessSink] = None
        self.__clock: Optional[AllocationClock] = None
        self.__live_words = 0
        self.__peak_live_words = 0

    # Allocation
    def alloc(self, length: int, tag: AllocationTag = AllocationTag.Heap,
              owner: Optional[int] = None) -> SimArray:
        """Returns a zeroed block-aligned array of ceil(length/B)*B words."""
        if length < 0:
            raise StructuralFault(f'negative allocation length {length}')
        words = -(-length // self.B) * self.B
        base = self.__reuse(words, tag)
        if base is None:
            base = self.__top
            self.__top += words
            self.__words.extend([0] * words)
        else:
            for address in range(base, base + words):
                self.__words[address] = 0
        allocation = Allocation(
            id=len(self.__allocations),
            base=base,
            length=length,
            words=words,
            tag=tag,
            owner=owner,
            first_node=self.__clock() if self.__clock is not None else 0
        )
        self.__allocations.append(allocation)
        for block in allocation.block_ids(self.B):
            self.__block_owner[block] = allocation
            self.__history[block].append(allocation)
            self.__history_nodes[block].append(allocation.first_node)
        self.__live_words += words
        self.__peak_live_words = max(self.__peak_live_words, self.__live_words)
        return SimArray(self, base, length, allocation)

    def alloc_buffered(self, length: int, q: int):
        """Returns a BufferedArray with q dead words at both ends."""
        from src.memory.buffered_array import BufferedArray
        if q < 0:
            raise StructuralFault(f'negative buffer length {q}')
        underlying = self.alloc(length + 2 * q, tag=AllocationTag.Buffered)
        buffered = BufferedArray(underlying, length, q)
        underlying.allocation.discipline = buffered.discipline
        self.__buffered.append(buffered)
        return buffered

    def free(self, array: SimArray) -> None:
        """Releases the allocation backing `array` for reuse."""
        allocation = array.allocation
        if array.base != allocation.base:
            raise StructuralFault('only whole allocations can be freed')
        if not allocation.live:
            raise StructuralFault(f'double free of allocation {allocation.id}')
        allocation.live = False
        for block in allocation.block_ids(self.B):
            del self.__block_owner[block]
        self.__live_words -= allocation.words
        if not allocation.words:
            return
        if allocation.tag is AllocationTag.Stack:
            self.__stack_pool.setdefault(allocation.words, list()).append(allocation.base)
        else:
            self.__release_extent(allocation.base, allocation.words)

    def watch(self, clock: Optional[AllocationClock]) -> Optional[AllocationClock]:
        """Stamps every later allocation with `clock()`, returns the previous clock."""
        previous = self.__clock
        self.__clock = clock
        return previous

    # Access
    def attach(self, sink: Optional[AccessSink]) -> Optional[AccessSink]:
        """Routes every traced access to `sink`, returns the previous one."""
        previous = self.__sink
        self.__sink = sink
        return previous

    def read(self, address: int) -> Any:
        self.__touch(AccessKind.Read, address)
        return self.__words[address]

    def write(self, address: int, value: Any) -> None:
        self.__touch(AccessKind.Write, address)
        self.__words[address] = value

    def peek(self, address: int) -> Any:
        """Untraced read, for oracles and precondition checks."""
        self.allocation_of(address)
        return self.__words[address]

    def block_of(self, address: int) -> int:
        return address // self.B

    def allocation_at(self, block: int, node: Optional[int] = None) -> Optional[Allocation]:
        """Allocation covering `block` when dag node `node` ran, the latest one without a node."""
        history = self.__history.get(block)
        if not history:
            return None
        if node is None:
            return history[-1]
        position = bisect.bisect_right(self.__history_nodes[block], node) - 1
        return history[max(position, 0)]

    def allocation_of(self, address: int) -> Allocation:
        allocation = self.__block_owner.get(address // self.B)
        if allocation is None:
            raise OutsideAllocationError(f'address {address}')
        return allocation

    # Inspection
    def get_allocations(self) -> List[Allocation]:
        return self.__allocations

    def get_buffered(self) -> List[Any]:
        return self.__buffered

    def allocation_by_id(self, allocation_id: int) -> Allocation:
        return self.__allocations[allocation_id]

    @property
    def live_words(self) -> int:
        return self.__live_words

    @property
    def peak_live_words(self) -> int:
        return self.__peak_live_words

    @property
    def footprint_words(self) -> int:
        """Words of address space ever handed out."""
        return self.__top

    # Private methods
    def __reuse(self, words: int, tag: AllocationTag) -> Optional[int]:
        if not words:
            return None
        if tag is AllocationTag.Stack:
            pool = self.__stack_pool.get(words)
            return pool.pop() if pool else None
        for position, base in enumerate(self.__free_bases):
            size = self.__free_words[base]
            if size < words:
                continue
            del self.__free_bases[position]
            del self.__free_words[base]
            if size > words:
                self.__release_extent(base + words, size - words)
            return base
        return None

    def __release_extent(self, base: int, words: int) -> None:
        position = bisect.bisect_left(self.__free_bases, base)
        if position < len(self.__free_bases) and self.__free_bases[position] == base + words:
            words += self.__free_words.pop(self.__free_bases.pop(position))
        if position > 0:
            previous = self.__free_bases[position - 1]
            if previous + self.__free_words[previous] == base:
                self.__free_words[previous] += words
                return
        self.__free_bases.insert(position, base)
        self.__free_words[base] = words

    def __touch(self, kind: AccessKind, address: int) -> None:
        allocation = self.__block_owner.get(address // self.B)
        if allocation is None:
            raise OutsideAllocationError(f'{kind.value} at address {address}')
        if allocation.discipline is not None:
            allocation.discipline.on_access(kind, address - allocation.base)
        if self.__sink is not None:
            self.__sink(kind, address)

import bisect
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

from model.enums import AccessKind, AllocationTag
from src.faults import StructuralFault
from src.memory.sim_memory import Allocation, SimMemory
from src.memory.trace import TraceEvent
from src.scheduler.scheduler import StackRecord

logger = logging.getLogger(__name__)

# (block, allocation id)
Incarnation = Tuple[int, int]


class IntervalError(StructuralFault):
    """Raised when a delay is asked for over a reversed interval."""
    message = 'interval end precedes its start'


class BlockDelayLedger:

    def __init__(self, events: Sequence[TraceEvent], keys: Optional[Sequence[Hashable]] = None):
        """Write times of every block, split per writing processor.

        `events` must be in logical time order, as a schedule stores them.
        `keys`, aligned with `events`, names the block or block
        incarnation each write is filed under; the raw block id by default.
        """
        if keys is None:
            keys = [event.block for event in events]
        self.__writes: Dict[Hashable, List[int]] = defaultdict(list)
        self.__proc_writes: Dict[Hashable, Dict[int, List[int]]] = defaultdict(lambda: defaultdict(list))
        for event, block in zip(events, keys):
            if event.kind is AccessKind.Write:
                self.__writes[block].append(event.time)
                self.__proc_writes[block][event.proc].append(event.time)

    def block_delay(self, block: Hashable, t1: int, t2: int, exclude_proc: Optional[int] = None) -> int:
        """Writes to `block` in [t1, t2], leaving out those of `exclude_proc`."""
        if t2 < t1:
            raise IntervalError(f'[{t1}, {t2}] on block {block}')
        delay = self.__count(self.__writes.get(block, []), t1, t2)
        if exclude_proc is not None and block in self.__proc_writes:
            delay -= self.__count(self.__proc_writes[block].get(exclude_proc, []), t1, t2)
        return delay

    @staticmethod
    def __count(times: List[int], t1: int, t2: int) -> int:
        return bisect.bisect_right(times, t2) - bisect.bisect_left(times, t1)


class Incarnations:

    def __init__(self, memory: SimMemory, stack_log: Sequence[StackRecord]):
        """Allocation lifetimes of every block.

        A block starts a new incarnation at every allocation covering it.
        Stack blocks are allocated while a schedule runs, so their
        incarnations are found by logical time from `stack_log`; every
        other block was allocated while the dag was built and is found by
        the dag node touching it.
        """
        self.__memory = memory
        self.__starts: Dict[int, List[int]] = defaultdict(list)
        self.__stacks: Dict[int, List[int]] = defaultdict(list)
        self.__owners: Dict[int, int] = dict()
        for record in sorted((record for record in stack_log if not record.released), key=lambda r: r.time):
            allocation = memory.allocation_by_id(record.allocation)
            self.__owners[allocation.id] = record.task
            for block in allocation.block_ids(memory.B):
                self.__starts[block].append(record.time)
                self.__stacks[block].append(allocation.id)

    def of(self, block: int, time: int, node: int) -> Incarnation:
        starts = self.__starts.get(block)
        if starts:
            position = bisect.bisect_right(starts, time) - 1
            return block, self.__stacks[block][max(position, 0)]
        allocation = self.__memory.allocation_at(block, node)
        return block, allocation.id if allocation is not None else -1

    def is_stack(self, block: int) -> bool:
        return block in self.__starts

    def event(self, event: TraceEvent) -> Incarnation:
        return self.of(event.block, event.time, event.node)

    def allocation(self, incarnation: Incarnation) -> Optional[Allocation]:
        if incarnation[1] < 0:
            return None
        return self.__memory.allocation_by_id(incarnation[1])

    def tag(self, incarnation: Incarnation) -> AllocationTag:
        allocation = self.allocation(incarnation)
        return allocation.tag if allocation is not None else AllocationTag.Heap

    def owner(self, incarnation: Incarnation) -> Optional[int]:
        """Task owning a stack incarnation, None for other blocks."""
        return self.__owners.get(incarnation[1])


@dataclass
class Episode:
    """Accesses of one kernel to one block incarnation."""
    first   : int
    last    : int
    proc    : int
    node    : int
    delay   : int = 0


@dataclass
class FsReport:
    """Block delays charged to the kernels of one schedule."""
    total               : int = 0
    max_block_delay     : int = 0
    episodes            : int = 0
    shared              : int = 0
    per_node            : Dict[int, int] = field(default_factory=dict)
    per_incarnation     : Dict[Incarnation, int] = field(default_factory=dict)
    charged             : Dict[Incarnation, List[Episode]] = field(default_factory=dict)


def fs_cost_total(events: Sequence[TraceEvent], node_kernel: Mapping[int, int],
                  memory: SimMemory, stack_log: Sequence[StackRecord]) -> Tuple[FsReport, Incarnations]:
    """Sums block delays over every (kernel, block incarnation) episode.

    An episode spans the first to the last access of a kernel to one
    incarnation; its delay is the number of writes to that incarnation
    by other processors in the window, so writes made before a block was
    freed never count against its next allocation. Only incarnations
    touched by two or more processors and written at least once are
    charged. Each episode's delay is attributed to the node that made
    its last access.
    """
    incarnations = Incarnations(memory, stack_log)
    keys = [incarnations.event(event) for event in events]
    ledger = BlockDelayLedger(events, keys)
    episodes: Dict[Tuple[Incarnation, int], Episode] = dict()
    sharers: Dict[Incarnation, set] = defaultdict(set)
    written = set()
    for event, incarnation in zip(events, keys):
        key = (incarnation, node_kernel[event.node])
        episode = episodes.get(key)
        if episode is None:
            episodes[key] = Episode(first=event.time, last=event.time, proc=event.proc, node=event.node)
        else:
            episode.last = event.time
            episode.node = event.node
        sharers[incarnation].add(event.proc)
        if event.kind is AccessKind.Write:
            written.add(incarnation)

    report = FsReport(episodes=len(episodes))
    per_node = defaultdict(int)
    per_incarnation = defaultdict(int)
    for (incarnation, _), episode in episodes.items():
        if incarnation not in written or len(sharers[incarnation]) < 2:
            continue
        episode.delay = ledger.block_delay(incarnation, episode.first, episode.last, exclude_proc=episode.proc)
        report.total += episode.delay
        per_node[episode.node] += episode.delay
        per_incarnation[incarnation] += episode.delay
        report.charged.setdefault(incarnation, list()).append(episode)
    report.shared = sum(1 for incarnation in written if len(sharers[incarnation]) >= 2)
    report.per_node = dict(per_node)
    report.per_incarnation = dict(per_incarnation)
    report.max_block_delay = max(per_incarnation.values(), default=0)
    logger.debug('fs: %d episodes, %d shared incarnations, F=%d', report.episodes, report.shared, report.total)
    return report, incarnations

import bisect
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Set, Tuple

import numpy as np

from model.enums import AccessKind, AllocationTag, NodeKind
from model.global_constants import (
    FRAME_WORDS, SCRATCH_DELAY_FACTOR, SHARED_BLOCK_LIMIT, STACK_DELAY_FACTOR, STACK_PATH_FACTOR
)
from src.dag.dag import Dag
from src.dag.kernels import Task, steal_path
from src.fs.ledger import FsReport, Incarnation, Incarnations
from src.memory.sim_memory import SimMemory
from src.scheduler.scheduler import Schedule

logger = logging.getLogger(__name__)


def in_ranges(ranges: List[Tuple[int, int]], node: int) -> bool:
    """Whether `node` lies in one of the sorted, disjoint [start, end) ranges."""
    position = bisect.bisect_right(ranges, (node, math.inf)) - 1
    return position >= 0 and node < ranges[position][1]


def stack_delay_limit(size: int, step1: bool, block_words: int) -> int:
    """C min(B, |rho|), or C min(B, log |rho|) inside a Step 1 partition."""
    reach = max(1, math.ceil(math.log2(size))) if step1 and size > 1 else size
    return STACK_DELAY_FACTOR * min(block_words, max(reach, 1))


class StackWindow(NamedTuple):
    """Stay of segments on one stack block, from its bottom fork to that fork's join.

    `size` is the work of the bottom fork's subcomputation.
    """
    fork    : int
    first   : int
    last    : int
    size    : int
    step1   : bool
    delay   : int
    limit   : int

    @property
    def passed(self) -> bool:
        return self.delay <= self.limit


class StackAudit(NamedTuple):
    """Delay on one stack block incarnation against 2x + u and its window limits."""
    incarnation : Incarnation
    task        : int
    delay       : int
    foreign     : int
    usurped     : int
    windows     : Tuple[StackWindow, ...] = ()

    @property
    def bound(self) -> int:
        return 2 * self.foreign + self.usurped

    @property
    def passed(self) -> bool:
        return self.delay <= self.bound and all(window.passed for window in self.windows)


@dataclass
class SharingAudit:
    """Blocks written by one side of a fork and touched by the other."""
    per_fork    : Dict[int, int] = field(default_factory=dict)
    limit       : int = SHARED_BLOCK_LIMIT

    @property
    def worst(self) -> int:
        return max(self.per_fork.values(), default=0)

    @property
    def violations(self) -> List[Tuple[int, int]]:
        return sorted((fork, count) for fork, count in self.per_fork.items() if count > self.limit)

    @property
    def passed(self) -> bool:
        return not self.violations


@dataclass
class AuditReport:
    stack           : List[StackAudit] = field(default_factory=list)
    stack_paths     : Dict[int, Tuple[int, int]] = field(default_factory=dict)
    sharing         : SharingAudit = field(default_factory=SharingAudit)
    scratch         : Dict[int, int] = field(default_factory=dict)
    scratch_limit   : int = 0
    buffered        : List[str] = field(default_factory=list)

    def failures(self) -> List[str]:
        """Readable description of every failed check."""
        failures = [f'stack block {audit.incarnation[0]} of task {audit.task}: delay {audit.delay} > {audit.bound}'
                    for audit in self.stack if audit.delay > audit.bound]
        failures.extend(f'stack block {audit.incarnation[0]} of task {audit.task} under fork {window.fork}: '
                        f'delay {window.delay} > {window.limit}'
                        for audit in self.stack for window in audit.windows if not window.passed)
        failures.extend(f'stack of task {task}: {depth} words on a path of work {work}'
                        for task, (depth, work) in sorted(self.stack_paths.items())
                        if depth > STACK_PATH_FACTOR * work)
        failures.extend(f'fork {fork}: {count} shared writable blocks between siblings (limit {self.sharing.limit})'
                        for fork, count in self.sharing.violations)
        failures.extend(f'scratch allocation {allocation}: delay {delay} > {self.scratch_limit}'
                        for allocation, delay in sorted(self.scratch.items()) if delay > self.scratch_limit)
        failures.extend(self.buffered)
        return failures

    @property
    def passed(self) -> bool:
        return not self.failures()


@dataclass
class StackTally:
    """Accesses to one stack incarnation, gathered in time order."""
    first   : int
    last    : int
    foreign : int = 0
    windows : List[List[int]] = field(default_factory=list)


def steal_paths(dag: Dag, tasks: List[Task]) -> Dict[int, Set[int]]:
    """Node set of the steal path of every task."""
    stolen = {task.id for task in tasks[1:]}
    return {task.id: set(steal_path(dag, task, stolen)) for task in tasks}


def stack_delay_audit(dag: Dag, schedule: Schedule, fs: FsReport, incarnations: Incarnations,
                      tasks: List[Task], block_words: int) -> List[StackAudit]:
    """Checks every charged stack incarnation against 2x + u and C min(B, |rho|).

    x counts the accesses stolen subtasks make to segments of forks on
    the owner's steal path, u the usurpations at the owner's forks
    inside the incarnation's time span. A block is refilled each time a
    fork pushes a segment onto it while it is empty; until that fork
    joins, the block's delay must stay within C min(B, |rho|), rho being
    the fork's subcomputation, or C min(B, log |rho|) for a Step 1 fork.
    An episode's delay counts in the window of its last access.
    """
    paths = steal_paths(dag, tasks)
    usurp_times = defaultdict(list)
    for fork, time in zip(schedule.usurped, schedule.usurp_times):
        usurp_times[schedule.node_task[fork]].append(time)
    for times in usurp_times.values():
        times.sort()
    work = np.cumsum([0] + [node.work for node in dag.get_nodes()])

    tallies: Dict[Incarnation, StackTally] = dict()
    for event in schedule.events:
        if not incarnations.is_stack(event.block):
            continue
        incarnation = incarnations.event(event)
        owner = incarnations.owner(incarnation)
        if owner is None or incarnation not in fs.charged:
            continue
        tally = tallies.get(incarnation)
        if tally is None:
            tally = tallies[incarnation] = StackTally(first=event.time, last=event.time)
        tally.last = event.time
        if event.task != owner:
            end = dag.branch_end(event.node)
            if end is not None and end[0] in paths.get(owner, ()):
                tally.foreign += 1
        frame = schedule.frames.get(event.node)
        if (event.kind is AccessKind.Write and frame is not None and frame <= event.block * block_words
                and frame <= event.addr < frame + FRAME_WORDS
                and not (tally.windows and tally.windows[-1][0] == event.node)):
            tally.windows.append([event.node, event.time, event.time])
        elif tally.windows:
            tally.windows[-1][2] = event.time

    audits = list()
    for incarnation, tally in tallies.items():
        owner = incarnations.owner(incarnation)
        times = usurp_times.get(owner, [])
        usurped = bisect.bisect_right(times, tally.last) - bisect.bisect_left(times, tally.first)
        delays = [0] * len(tally.windows)
        starts = [window[1] for window in tally.windows]
        for episode in fs.charged[incarnation]:
            position = bisect.bisect_right(starts, episode.last) - 1
            if position >= 0:
                delays[position] += episode.delay
        windows = list()
        for (fork, first, last), delay in zip(tally.windows, delays):
            mate = dag.get_node(fork).mate
            size = int(work[mate + 1] - work[fork])
            step1 = in_ranges(dag.partition_ranges, fork)
            windows.append(StackWindow(fork=fork, first=first, last=last, size=size, step1=step1, delay=delay,
                                       limit=stack_delay_limit(size, step1, block_words)))
        audits.append(StackAudit(incarnation=incarnation, task=owner, delay=fs.per_incarnation.get(incarnation, 0),
                                 foreign=tally.foreign, usurped=usurped, windows=tuple(windows)))
    return audits


def stack_path_audit(dag: Dag, schedule: Schedule) -> Dict[int, Tuple[int, int]]:
    """Deepest stack of each task against the work the task executed."""
    work = defaultdict(int)
    for node in dag.get_nodes():
        work[schedule.node_task[node.id]] += node.work
    return {task: (depth, work[task]) for task, depth in schedule.stack_depth.items()}


def enclosing_forks(dag: Dag) -> List[Optional[int]]:
    """Innermost fork strictly enclosing each node, None at top level."""
    enclosing: List[Optional[int]] = [None] * len(dag)
    open_forks: List[int] = list()
    for node in dag.get_nodes():
        while open_forks and node.id >= dag.get_node(open_forks[-1]).mate:
            open_forks.pop()
        enclosing[node.id] = open_forks[-1] if open_forks else None
        if node.kind is NodeKind.Fork:
            open_forks.append(node.id)
    return enclosing


def sharing_audit(dag: Dag, memory: SimMemory, limit: int = SHARED_BLOCK_LIMIT) -> SharingAudit:
    """Counts, per fork, the block incarnations both sides touch that either side writes.

    Only consecutive accessors of an incarnation need checking: if any
    pair of accessors sits on opposite sides of a fork, some consecutive
    pair does too. Scratch blocks are accounted for separately, and
    forks of recorded scatter loops are left out.
    """
    accessors: Dict[Incarnation, List[int]] = defaultdict(list)
    writers: Dict[Incarnation, List[int]] = defaultdict(list)
    for node in dag.get_nodes():
        for kind, address in node.accesses:
            block = address // memory.B
            allocation = memory.allocation_at(block, node.id)
            if allocation is None or allocation.tag is AllocationTag.Scratch:
                continue
            key = (block, allocation.id)
            if not accessors[key] or accessors[key][-1] != node.id:
                accessors[key].append(node.id)
            if kind is AccessKind.Write and (not writers[key] or writers[key][-1] != node.id):
                writers[key].append(node.id)

    enclosing = enclosing_forks(dag)
    shared = defaultdict(set)
    for key, nodes in accessors.items():
        if key not in writers:
            continue
        for u, v in zip(nodes, nodes[1:]):
            fork = enclosing[u]
            while fork is not None and v >= dag.get_node(fork).mate:
                fork = enclosing[fork]
            if fork is None or in_ranges(dag.scatter_ranges, fork):
                continue
            node = dag.get_node(fork)
            if not u < node.right <= v:
                continue
            written = writers[key]
            position = bisect.bisect_left(written, node.left)
            if position < len(written) and written[position] < node.mate:
                shared[fork].add(key)
    audit = SharingAudit(per_fork={fork: len(keys) for fork, keys in shared.items()}, limit=limit)
    if audit.violations:
        logger.warning('%d forks share more than %d writable blocks between siblings',
                       len(audit.violations), limit)
    return audit


def scratch_delays(fs: FsReport, memory: SimMemory) -> Dict[int, int]:
    """Block delay summed per scratch allocation."""
    delays = defaultdict(int)
    for (_, allocation_id), delay in fs.per_incarnation.items():
        if allocation_id < 0:
            continue
        if memory.allocation_by_id(allocation_id).tag is AllocationTag.Scratch:
            delays[allocation_id] += delay
    return dict(delays)


def buffered_failures(memory: SimMemory) -> List[str]:
    return [f'buffered array {index}: {violation}'
            for index, buffered in enumerate(memory.get_buffered()) if not buffered.passed
            for violation in buffered.violations]


def run_audits(dag: Dag, memory: SimMemory, schedule: Schedule, fs: FsReport,
               incarnations: Incarnations, tasks: List[Task]) -> AuditReport:
    report = AuditReport(
        stack=stack_delay_audit(dag, schedule, fs, incarnations, tasks, memory.B),
        stack_paths=stack_path_audit(dag, schedule),
        sharing=sharing_audit(dag, memory),
        scratch=scratch_delays(fs, memory),
        scratch_limit=SCRATCH_DELAY_FACTOR * memory.B,
        buffered=buffered_failures(memory)
    )
    logger.info('audits over %d tasks: %s', len(tasks), 'passed' if report.passed else 'FAILED')
    return report

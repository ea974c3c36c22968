import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

from model.enums import AccessKind, Side
from model.global_constants import FRAME_WORDS
from model.validation.cache_config import CacheConfig
from src.cache.lru import CacheState
from src.dag.dag import Dag
from src.dag.kernels import Task
from src.faults import StructuralFault
from src.memory.trace import TraceEvent
from src.scheduler.scheduler import Schedule

logger = logging.getLogger(__name__)


@dataclass
class MissReport:
    """Sequential against scheduled misses of one run."""
    q_seq               : int
    q_par               : int
    per_node            : Dict[int, int] = field(default_factory=dict)
    per_kernel          : Dict[int, int] = field(default_factory=dict)
    per_proc            : Dict[int, int] = field(default_factory=dict)
    invalidations       : int = 0
    invalidation_misses : int = 0

    @property
    def steal_overhead(self) -> int:
        """R(S) as measured: Q_par - Q_seq, possibly negative."""
        return self.q_par - self.q_seq

    @property
    def sharing_credit(self) -> int:
        """Misses saved by beneficial sharing, reported apart from R(S)."""
        return max(0, self.q_seq - self.q_par)


def replay_sequential(events: Sequence[TraceEvent], config: CacheConfig) -> int:
    """Misses of a single cache replaying `events` in order."""
    cache = CacheState(owner=0, capacity=config.blocks)
    for event in events:
        cache.access(event.block)
    return cache.misses


def replay_scheduled(events: Sequence[TraceEvent], node_kernel: Dict[int, int], p: int,
                     config: CacheConfig, q_seq: int) -> MissReport:
    """One cache per processor, replayed in logical time.

    A write invalidates the block in every other cache holding it; the
    number of such caches is the invalidation fan-out.
    """
    caches = [CacheState(owner=proc, capacity=config.blocks) for proc in range(p)]
    report = MissReport(q_seq=q_seq, q_par=0)
    per_node = defaultdict(int)
    per_kernel = defaultdict(int)
    for event in events:
        kernel = node_kernel.get(event.node)
        if kernel is None:
            raise StructuralFault(f'node {event.node} has no kernel assignment')
        if not caches[event.proc].access(event.block):
            per_node[event.node] += 1
            per_kernel[kernel] += 1
        if event.kind is AccessKind.Write:
            report.invalidations += sum(cache.invalidate(event.block)
                                        for cache in caches if cache.owner != event.proc)
    report.per_node = dict(per_node)
    report.per_kernel = dict(per_kernel)
    report.per_proc = {cache.owner: cache.misses for cache in caches}
    report.q_par = sum(report.per_proc.values())
    report.invalidation_misses = sum(cache.invalidation_misses for cache in caches)
    logger.debug('replay: Q_seq=%d Q_par=%d fan-out=%d', q_seq, report.q_par, report.invalidations)
    return report


def stack_misalignment(dag: Dag, sequential: Schedule, parallel: Schedule, tasks: List[Task],
                       block_words: int) -> Dict[int, int]:
    """Per stolen task, how many parallel blocks hold the words of one sequential block.

    The words compared are the frames of the task's own forks plus the
    result slot it writes in its parent's frame. Returns the worst count
    seen for every stolen task.
    """
    worst = dict()
    for task in tasks[1:]:
        parent = dag.get_node(task.first).pred[0]
        words = [(sequential.frames[parent] + Side.Right, parallel.frames[parent] + Side.Right)]
        for node in range(task.first, task.last + 1):
            if parallel.node_task[node] == task.id and node in parallel.frames:
                words.extend((sequential.frames[node] + slot, parallel.frames[node] + slot)
                             for slot in range(FRAME_WORDS))
        holders = defaultdict(set)
        for seq_address, par_address in words:
            holders[seq_address // block_words].add(par_address // block_words)
        worst[task.id] = max(len(blocks) for blocks in holders.values())
    return worst

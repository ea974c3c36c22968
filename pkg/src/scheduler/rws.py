import bisect
import heapq
import logging
from collections import defaultdict, deque
from typing import Deque, Dict, List, Optional, Tuple

from numpy.random import SFC64, Generator, SeedSequence

from model.enums import AccessKind, LedgerCategory, NodeKind, ScheduleEvent, Side
from model.global_constants import FRAME_WORDS
from model.validation.cost_model import CostModel
from src.dag.dag import Dag
from src.dag.kernels import StealRecord
from src.faults import StructuralFault
from src.memory.exec_stack import ExecStack, Segment
from src.memory.sim_memory import SimMemory
from src.memory.trace import ScheduleRecord, TraceEvent
from src.scheduler.scheduler import Activity, Schedule, Scheduler, StackRecord

logger = logging.getLogger(__name__)

ACTIVITY_LEDGER = {
    ScheduleEvent.Execute: LedgerCategory.Work,
    ScheduleEvent.Steal: LedgerCategory.Steal,
    ScheduleEvent.StealFailed: LedgerCategory.FailedSteal,
}

Work = Tuple[int, int]


class RandomizedWorkStealing(Scheduler):

    def __init__(self, p: int, seed: int = 1, costs: Optional[CostModel] = None):
        """Randomized work stealing on p simulated processors with nominal costs.

        Processor 0 starts at the root, every other one starts stealing at
        tick 0. A steal picks a victim uniformly among the other processors
        and takes the top (oldest) entry of its deque.
        """
        if p < 1:
            raise ValueError('p must be >= 1')
        self.p = p
        self.seed = seed
        self.costs = costs or CostModel()

    def run(self, dag: Dag, memory: SimMemory) -> Schedule:
        rng = Generator(SFC64(SeedSequence(self.seed)))
        schedule = WorkStealingRun(dag, memory, self.p, self.seed, rng, self.costs).execute()
        logger.info('p=%d seed=%d: makespan=%d steals=%d usurpations=%d',
                    self.p, self.seed, schedule.makespan, len(schedule.steals), schedule.usurpations)
        return schedule


class WorkStealingRun:

    def __init__(self, dag: Dag, memory: SimMemory, p: int, seed: int, rng: Generator, costs: CostModel):
        self.dag = dag
        self.memory = memory
        self.p = p
        self.rng = rng
        self.costs = costs
        self.capacity = (dag.max_fork_depth + 1) * FRAME_WORDS
        size = len(dag)
        self.schedule = Schedule(p=p, seed=seed, makespan=0, node_proc=[-1] * size,
                                 node_start=[-1] * size, node_task=[-1] * size)
        self.__deques: List[Deque[Work]] = [deque() for _ in range(p)]
        self.__stacks: Dict[int, ExecStack] = dict()
        self.__frames: Dict[int, Tuple[int, Segment]] = dict()
        self.__arrivals: Dict[int, int] = defaultdict(int)
        self.__busy: List[Optional[Tuple[ScheduleEvent, int, int, int]]] = [None] * p
        self.__heap: List[Tuple[int, int]] = list()
        self.__raw: List[tuple] = list()

    def execute(self) -> Schedule:
        dag = self.dag
        self.__open_stack(dag.root, 0, 0)
        self.__start_node(0, dag.root, dag.root, 0)
        for proc in range(1, self.p):
            self.__attempt_steal(proc, 0)
        while self.__heap:
            t, proc = heapq.heappop(self.__heap)
            kind, node, task, start = self.__busy[proc]
            self.__busy[proc] = None
            self.schedule.activities.append(Activity(start, t, proc, kind, node))
            following = None
            if kind is ScheduleEvent.Execute:
                if node == dag.final:
                    self.schedule.makespan = t
                    self.schedule.records.append(ScheduleRecord(t, proc, ScheduleEvent.Finish, node))
                    break
                following = self.__complete_node(proc, node, task, t)
            elif kind is ScheduleEvent.Steal:
                following = (node, node)
            if following is not None:
                self.__start_node(proc, following[0], following[1], t)
            else:
                self.__attempt_steal(proc, t)
        self.__release_stack(dag.root, self.schedule.makespan)
        return self.__finalize()

    # Private methods
    def __emit(self, tick: int, proc: int, task: int, node: int, kind: AccessKind, address: int) -> None:
        self.__raw.append((tick, proc, len(self.__raw), task, node, kind, address))

    def __start_node(self, proc: int, node_id: int, task: int, t: int) -> None:
        node = self.dag.get_node(node_id)
        schedule = self.schedule
        schedule.node_proc[node_id] = proc
        schedule.node_start[node_id] = t
        schedule.node_task[node_id] = task
        schedule.records.append(ScheduleRecord(t, proc, ScheduleEvent.Execute, node_id))
        stack = self.__stacks[task]
        if node.kind is NodeKind.Fork:
            segment = stack.push_segment(node_id, FRAME_WORDS)
            self.__frames[node_id] = (task, segment)
            schedule.frames[node_id] = stack.address(segment, 0)
            schedule.stack_depth[task] = max(schedule.stack_depth.get(task, 0), stack.top)
            for slot in range(FRAME_WORDS):
                self.__emit(t, proc, task, node_id, AccessKind.Write, stack.address(segment, slot))
        elif node.kind is NodeKind.Join:
            _, segment = self.__frames[node.mate]
            for slot in range(FRAME_WORDS):
                self.__emit(t, proc, task, node_id, AccessKind.Read, stack.address(segment, slot))
            if stack.pop_segment().node != node.mate:
                raise StructuralFault(f'join {node_id} does not pop the frame of fork {node.mate}')
        for index, (kind, address) in enumerate(node.accesses):
            self.__emit(t + min(index, node.work - 1), proc, task, node_id, kind, address)
        end = self.dag.branch_end(node_id)
        if end is not None:
            fork, side = end
            owner, segment = self.__frames[fork]
            self.__emit(t + node.work - 1, proc, task, node_id, AccessKind.Write,
                        self.__stacks[owner].address(segment, side))
        self.__busy[proc] = (ScheduleEvent.Execute, node_id, task, t)
        heapq.heappush(self.__heap, (t + node.work, proc))

    def __complete_node(self, proc: int, node_id: int, task: int, t: int) -> Optional[Work]:
        """Returns the next (node, task) for `proc`, None when it must steal."""
        node = self.dag.get_node(node_id)
        if node.kind is NodeKind.Fork:
            self.__deques[proc].append((node.right, task))
            return node.left, task
        end = self.dag.branch_end(node_id)
        if end is None:
            return node.succ[0], task
        fork, side = end
        fork_node = self.dag.get_node(fork)
        self.__arrivals[fork_node.mate] += 1
        if side is Side.Left and self.__deques[proc]:
            right, right_task = self.__deques[proc].pop()
            if right != fork_node.right:
                raise StructuralFault(f'deque bottom {right} is not the right child of fork {fork}')
            return right, right_task
        return self.__handle_join(proc, fork, task, t)

    def __handle_join(self, proc: int, fork: int, task: int, t: int) -> Optional[Work]:
        """The second arrival at the join of `fork` continues the parent task.

        A stolen branch arriving second usurps the parent: its processor
        takes over the owner's stack and its own stack is released.
        """
        join = self.dag.get_node(fork).mate
        owner = self.__frames[fork][0]
        stolen = task != owner
        if self.__arrivals[join] == 2:
            if stolen:
                # the thief arrives second and takes over the victim's stack
                self.schedule.usurpations += 1
                self.schedule.usurped.append(fork)
                self.schedule.usurp_times.append(t)
                self.schedule.records.append(ScheduleRecord(t, proc, ScheduleEvent.Usurp, join))
                self.__release_stack(task, t)
                self.__stacks[owner].usurp(proc)
            return join, owner
        if stolen:
            self.__release_stack(task, t)
        return None

    def __attempt_steal(self, proc: int, t: int) -> None:
        if self.p == 1:
            raise StructuralFault('single processor ran out of work before the final node')
        victim = int(self.rng.integers(self.p - 1))
        if victim >= proc:
            victim += 1
        if self.__deques[victim]:
            right, _ = self.__deques[victim].popleft()
            fork = self.dag.get_node(right).pred[0]
            self.schedule.steals.append(StealRecord(index=-1, fork=fork, thief=proc, victim=victim, time=t))
            self.schedule.records.append(ScheduleRecord(t, proc, ScheduleEvent.Steal, fork))
            self.__open_stack(right, proc, t)
            self.__busy[proc] = (ScheduleEvent.Steal, right, right, t)
            heapq.heappush(self.__heap, (t + self.costs.s, proc))
            logger.debug('t=%d: proc %d steals right child %d of fork %d from proc %d', t, proc, right, fork, victim)
            return
        self.schedule.records.append(ScheduleRecord(t, proc, ScheduleEvent.StealFailed, -1))
        self.__busy[proc] = (ScheduleEvent.StealFailed, -1, -1, t)
        heapq.heappush(self.__heap, (t + self.costs.s_fail, proc))

    def __open_stack(self, task: int, proc: int, t: int) -> None:
        stack = ExecStack(self.memory, task, self.capacity, proc)
        self.__stacks[task] = stack
        self.schedule.stack_log.append(StackRecord(t, stack.allocation_id, task, False))

    def __release_stack(self, task: int, t: int) -> None:
        stack = self.__stacks.pop(task)
        if stack.top:
            raise StructuralFault(f'stack of task {task} released with {stack.top} live words')
        stack.release()
        self.schedule.stack_log.append(StackRecord(t, stack.allocation_id, task, True))

    def __finalize(self) -> Schedule:
        schedule = self.schedule
        makespan = schedule.makespan
        for proc, busy in enumerate(self.__busy):
            if busy is not None and busy[3] < makespan:
                kind, node, _, start = busy
                schedule.activities.append(Activity(start, makespan, proc, kind, node))
        schedule.activities.sort()
        schedule.ledgers = {proc: {category: 0 for category in LedgerCategory} for proc in range(self.p)}
        for activity in schedule.activities:
            schedule.ledgers[activity.proc][ACTIVITY_LEDGER[activity.kind]] += activity.end - activity.start

        self.__raw.sort()
        block = self.memory.B
        schedule.events = [TraceEvent(time, proc, task, node, kind, address, address // block)
                           for time, (_, proc, _, task, node, kind, address) in enumerate(self.__raw)]
        ticks = [raw[0] for raw in self.__raw]
        schedule.stack_log = [record._replace(time=bisect.bisect_left(ticks, record.time))
                              for record in schedule.stack_log]
        schedule.usurp_times = [bisect.bisect_left(ticks, t) for t in schedule.usurp_times]
        for index, fork in enumerate(sorted(steal.fork for steal in schedule.steals)):
            next(steal for steal in schedule.steals if steal.fork == fork).index = index
        return schedule

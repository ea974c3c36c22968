import logging
import sys
from typing import Any, Callable, List, Optional, Tuple

from model.enums import AccessKind, NodeKind, Side
from src.dag.dag import Dag
from src.faults import StructuralFault
from src.memory.sim_memory import SimMemory

logger = logging.getLogger(__name__)

# nested forks of the recursion run as nested Python calls
RECURSION_LIMIT = 20000


class ForkJoinBuilder:

    def __init__(self, memory: SimMemory):
        """Runs a fork-join program sequentially and records its dag.

        Every traced access of `memory` lands in the currently open leaf.
        Branches run left first, so node ids come out in the sequential
        (depth-first) order. An allocation closes the open leaf, so the
        accesses to a recycled block split cleanly between incarnations.
        """
        self.memory = memory
        self.dag = Dag()
        self.__tail: Optional[int] = None
        self.__leaf: Optional[int] = None
        self.__depth = 0
        self.__previous_sink = memory.attach(self.record)
        self.__previous_clock = memory.watch(self.allocation_point)
        if sys.getrecursionlimit() < RECURSION_LIMIT:
            sys.setrecursionlimit(RECURSION_LIMIT)

    def record(self, kind: AccessKind, address: int) -> None:
        """Memory sink: appends an access to the open leaf."""
        self.dag.get_node(self.__open_leaf()).accesses.append((kind, address))

    def allocation_point(self) -> int:
        """Memory clock: first node id an allocation made now can be touched by."""
        self.__close_leaf()
        return len(self.dag)

    def charge(self, units: int) -> None:
        """Adds non-memory work (comparisons) to the open leaf."""
        self.dag.get_node(self.__open_leaf()).extra += units

    def leaf(self, work: int) -> int:
        """Appends a standalone leaf of explicit weight."""
        self.__close_leaf()
        node = self.dag.add_node(NodeKind.Leaf, work=work, weighted=True)
        self.__link(node)
        return node

    def fork(self, left: Callable[[], Any], right: Callable[[], Any]) -> Tuple[Any, Any]:
        """Runs `left` and `right` as the two branches of a binary fork."""
        self.__close_leaf()
        fork = self.dag.add_node(NodeKind.Fork)
        self.__link(fork)
        self.__depth += 1
        self.dag.max_fork_depth = max(self.dag.max_fork_depth, self.__depth)
        results = list()
        ends = list()
        for side, branch in ((Side.Left, left), (Side.Right, right)):
            self.__tail = fork
            results.append(branch())
            self.__close_leaf()
            if self.__tail == fork:
                # empty branch
                self.__link(self.dag.add_node(NodeKind.Leaf, work=1, weighted=True))
            self.dag.mark_branch_end(self.__tail, fork, side)
            ends.append(self.__tail)
        self.__depth -= 1
        join = self.dag.add_node(NodeKind.Join)
        for end in ends:
            self.dag.add_arch(end, join)
        self.dag.pair(fork, join)
        self.__tail = join
        return results[0], results[1]

    def parallel_for(self, lo: int, hi: int, body: Callable[[int], None]) -> None:
        """Calls body(i) for i in [lo, hi) under a balanced binary fork tree."""
        if hi - lo <= 0:
            return
        if hi - lo == 1:
            body(lo)
            return
        mid = (lo + hi) // 2
        self.fork(lambda: self.parallel_for(lo, mid, body),
                  lambda: self.parallel_for(mid, hi, body))

    def scatter_for(self, lo: int, hi: int, body: Callable[[int], None]) -> None:
        """parallel_for whose writes land out of order on purpose.

        The node range of the loop is recorded on the dag so the sibling
        sharing audit leaves its forks out.
        """
        self.recorded(self.dag.scatter_ranges, lambda: self.parallel_for(lo, hi, body))

    def recorded(self, ranges: List[Tuple[int, int]], body: Callable[[], Any]) -> Any:
        """Runs `body` and appends the [start, end) node range it created to `ranges`."""
        self.__close_leaf()
        start = len(self.dag)
        result = body()
        self.__close_leaf()
        if len(self.dag) > start:
            ranges.append((start, len(self.dag)))
        return result

    def finish(self) -> Dag:
        """Closes the program, detaches from memory and returns the dag."""
        if self.__depth:
            raise StructuralFault(f'finish inside {self.__depth} open forks')
        self.__close_leaf()
        if not len(self.dag):
            self.leaf(1)
        self.memory.attach(self.__previous_sink)
        self.memory.watch(self.__previous_clock)
        self.dag.check_well_formed()
        logger.debug('dag finished: %r', self.dag)
        return self.dag

    # Private methods
    def __open_leaf(self) -> int:
        if self.__leaf is None:
            self.__leaf = self.dag.add_node(NodeKind.Leaf)
            self.__link(self.__leaf)
        return self.__leaf

    def __close_leaf(self) -> None:
        if self.__leaf is not None:
            self.dag.get_node(self.__leaf).close()
            self.__leaf = None

    def __link(self, node: int) -> None:
        if self.__tail is not None:
            self.dag.add_arch(self.__tail, node)
        self.__tail = node

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from model.enums import AccessKind, NodeKind, Side
from src.faults import StructuralFault

Access = Tuple[AccessKind, int]


class NodeNotFoundError(StructuralFault):
    """Raised when node is not found."""
    message = 'given node was not found'


@dataclass
class DagNode:
    id          : int
    kind        : NodeKind
    work        : int = field(default=1)
    succ        : List[int] = field(default_factory=list)
    pred        : List[int] = field(default_factory=list)
    mate        : Optional[int] = field(default=None)
    accesses    : List[Access] = field(default_factory=list)
    extra       : int = field(default=0)
    weighted    : bool = field(default=False)

    def close(self) -> None:
        """Freezes the leaf weight: one unit per access plus charged units."""
        if self.kind is NodeKind.Leaf and not self.weighted:
            self.work = max(1, len(self.accesses) + self.extra)

    @property
    def left(self) -> int:
        return self.succ[Side.Left]

    @property
    def right(self) -> int:
        return self.succ[Side.Right]


class Dag:

    def __init__(self):
        """Series-parallel computation dag.

        Node ids follow creation order, which is the left-to-right
        sequential order: every arch points from a lower to a higher id.
        """
        self.__nodes: List[DagNode] = list()
        self.__branch_ends: Dict[int, Tuple[int, Side]] = dict()
        self.max_fork_depth = 0
        self.scatter_ranges: List[Tuple[int, int]] = list()
        self.partition_ranges: List[Tuple[int, int]] = list()

    def add_node(self, kind: NodeKind, work: int = 1, weighted: bool = False) -> int:
        """Adds a node to the dag and returns the new node id."""
        node = DagNode(id=len(self.__nodes), kind=kind, work=work, weighted=weighted)
        self.__nodes.append(node)
        return node.id

    def add_arch(self, i_node: int, j_node: int) -> None:
        """Adds an oriented arch pointing to node j starting from i."""
        if i_node >= j_node:
            raise StructuralFault(f'arch {i_node} -> {j_node} breaks sequential order')
        self.get_node(i_node).succ.append(j_node)
        self.get_node(j_node).pred.append(i_node)

    def pair(self, fork: int, join: int) -> None:
        self.get_node(fork).mate = join
        self.get_node(join).mate = fork

    def mark_branch_end(self, node: int, fork: int, side: Side) -> None:
        self.__branch_ends[node] = (fork, side)

    def branch_end(self, node: int) -> Optional[Tuple[int, Side]]:
        """Returns (fork, side) when `node` closes a branch of that fork."""
        return self.__branch_ends.get(node)

    def does_node_exist(self, node: int) -> bool:
        return 0 <= node < len(self.__nodes)

    def get_node(self, node: int) -> DagNode:
        if not self.does_node_exist(node):
            raise NodeNotFoundError(f'node {node}')
        return self.__nodes[node]

    def get_nodes(self) -> List[DagNode]:
        return self.__nodes

    def forks(self) -> List[DagNode]:
        return [node for node in self.__nodes if node.kind is NodeKind.Fork]

    def edges(self) -> List[Tuple[int, int]]:
        return [(node.id, succ) for node in self.__nodes for succ in node.succ]

    @property
    def root(self) -> int:
        return 0

    @property
    def final(self) -> int:
        return len(self.__nodes) - 1

    def work(self) -> int:
        """T1: total weight of all nodes."""
        return sum(node.work for node in self.__nodes)

    def span(self) -> int:
        """Maximum weight of a root-to-sink path."""
        finish = [0] * len(self.__nodes)
        for node in self.__nodes:
            start = max((finish[pred] for pred in node.pred), default=0)
            finish[node.id] = start + node.work
        return max(finish, default=0)

    def subtree(self, fork: int, side: Side) -> range:
        """Ids of the branch hanging off `fork` on `side`."""
        node = self.get_node(fork)
        if node.kind is not NodeKind.Fork:
            raise StructuralFault(f'node {fork} is not a fork')
        if side is Side.Left:
            return range(node.left, node.right)
        return range(node.right, node.mate)

    def check_well_formed(self) -> None:
        """Raises StructuralFault unless the dag is series-parallel as built."""
        for node in self.__nodes:
            if node.kind is NodeKind.Fork:
                if len(node.succ) != 2 or node.mate is None:
                    raise StructuralFault(f'fork {node.id} is not a binary fork with a join')
                join = self.get_node(node.mate)
                if join.kind is not NodeKind.Join or join.mate != node.id or len(join.pred) != 2:
                    raise StructuralFault(f'fork {node.id} and join {node.mate} do not match')
            elif node.kind is NodeKind.Join and node.mate is None:
                raise StructuralFault(f'unmatched join {node.id}')
            elif node.id != self.final and len(node.succ) != 1:
                raise StructuralFault(f'node {node.id} has {len(node.succ)} successors')

    def __len__(self) -> int:
        return len(self.__nodes)

    def __repr__(self) -> str:
        return f'Dag(nodes={len(self.__nodes)}, work={self.work()}, span={self.span()})'

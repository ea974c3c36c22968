import bisect
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set

from model.enums import NodeKind
from src.dag.dag import Dag
from src.faults import StructuralFault


class KernelSplitError(StructuralFault):
    """Raised when a steal does not fall inside one kernel."""
    message = 'steal splits outside its containing kernel'


@dataclass
class Kernel:
    """Dfs-contiguous node interval [first, last] run by one processor."""
    id      : int
    first   : int
    last    : int
    proc    : Optional[int] = field(default=None)
    procs   : Set[int] = field(default_factory=set)

    def __contains__(self, node: int) -> bool:
        return self.first <= node <= self.last

    def __len__(self) -> int:
        return self.last - self.first + 1


@dataclass
class StealRecord:
    index   : int
    fork    : int
    thief   : int
    victim  : int
    time    : int


@dataclass
class Task:
    """Root task (id 0) or a stolen subtask, named by its first node."""
    id      : int
    first   : int
    last    : int
    steals  : List[int] = field(default_factory=list)

    def __contains__(self, node: int) -> bool:
        return self.first <= node <= self.last


def partition_kernels(dag: Dag, steal_forks: Iterable[int]) -> List[Kernel]:
    """Splits the dag three ways per steal, in sequential order of the forks.

    A steal at fork f with right child rc and join J turns the kernel
    [a, b] holding f into [a, rc-1], [rc, J-1] and [J, b].
    """
    starts = [dag.root]
    ends = {dag.root: dag.final}
    for fork in sorted(steal_forks):
        node = dag.get_node(fork)
        if node.kind is not NodeKind.Fork:
            raise KernelSplitError(f'node {fork} is not a fork')
        position = bisect.bisect_right(starts, fork) - 1
        first = starts[position]
        last = ends[first]
        if not (first <= fork and node.mate <= last):
            raise KernelSplitError(f'fork {fork} (join {node.mate}) outside kernel [{first}, {last}]')
        ends[first] = node.right - 1
        ends[node.right] = node.mate - 1
        ends[node.mate] = last
        bisect.insort(starts, node.right)
        bisect.insort(starts, node.mate)
    return [Kernel(id=index, first=first, last=ends[first]) for index, first in enumerate(starts)]


def assign_kernels(kernels: List[Kernel], node_proc: List[int]) -> Dict[int, int]:
    """Fills kernel processors from a schedule and returns node -> kernel id."""
    node_kernel = dict()
    for kernel in kernels:
        kernel.procs = {node_proc[node] for node in range(kernel.first, kernel.last + 1)}
        kernel.proc = node_proc[kernel.first]
        for node in range(kernel.first, kernel.last + 1):
            node_kernel[node] = kernel.id
    if len(node_kernel) != len(node_proc):
        raise StructuralFault('kernel partition does not cover the dag')
    return node_kernel


def build_tasks(dag: Dag, steal_forks: Iterable[int]) -> List[Task]:
    """Root task plus one task per stolen right child, steals filed under their owner."""
    tasks = [Task(id=dag.root, first=dag.root, last=dag.final)]
    for fork in sorted(steal_forks):
        node = dag.get_node(fork)
        tasks.append(Task(id=node.right, first=node.right, last=node.mate - 1))
    for fork in sorted(steal_forks):
        owner_of(tasks, fork).steals.append(fork)
    return tasks


def owner_of(tasks: List[Task], node: int) -> Task:
    """Innermost task holding `node`."""
    owner = tasks[0]
    for task in tasks[1:]:
        if node in task and task.first >= owner.first:
            owner = task
    return owner


def steal_path(dag: Dag, task: Task, stolen: Set[int]) -> List[int]:
    """Path through `task` going left exactly at forks whose right child was stolen."""
    path = list()
    node = dag.get_node(task.first)
    while True:
        path.append(node.id)
        if node.id == task.last:
            return path
        if node.kind is NodeKind.Fork:
            following = node.left if node.right in stolen else node.right
        else:
            following = node.succ[0]
        node = dag.get_node(following)


def check_steal_path(dag: Dag, task: Task, stolen: Set[int]) -> bool:
    """Every steal of the task lies on the path; every off-path right child is stolen."""
    path = steal_path(dag, task, stolen)
    on_path = set(path)
    if any(fork not in on_path for fork in task.steals):
        return False
    for position, node_id in enumerate(path[:-1]):
        node = dag.get_node(node_id)
        if node.kind is NodeKind.Fork and path[position + 1] != node.right and node.right not in stolen:
            return False
    return True

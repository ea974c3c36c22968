from __future__ import annotations

import pytest

from model.enums import NodeKind, Side
from src.dag.builder import ForkJoinBuilder
from src.dag.dag import Dag, NodeNotFoundError
from src.dag.kernels import (
    KernelSplitError, assign_kernels, build_tasks, check_steal_path, owner_of, partition_kernels, steal_path
)
from src.faults import StructuralFault
from src.memory.sim_memory import SimMemory


def build(program) -> Dag:
    fj = ForkJoinBuilder(SimMemory(4))
    program(fj)
    return fj.finish()


def nested_forks(fj: ForkJoinBuilder) -> None:
    """Fork tree of depth 2 with four unit leaves."""
    fj.fork(lambda: fj.fork(lambda: fj.leaf(1), lambda: fj.leaf(1)),
            lambda: fj.fork(lambda: fj.leaf(1), lambda: fj.leaf(1)))


def test_single_leaf() -> None:
    dag = build(lambda fj: fj.leaf(5))
    assert dag.work() == 5
    assert dag.span() == 5


def test_balanced_pair() -> None:
    dag = build(lambda fj: fj.fork(lambda: fj.leaf(1), lambda: fj.leaf(1)))
    assert dag.work() == 4
    assert dag.span() == 3
    fork = dag.get_node(dag.root)
    assert fork.kind is NodeKind.Fork
    assert fork.mate == dag.final
    assert list(dag.subtree(fork.id, Side.Left)) == [1]
    assert list(dag.subtree(fork.id, Side.Right)) == [2]


def test_chain_span() -> None:
    def chain(fj: ForkJoinBuilder) -> None:
        for _ in range(6):
            fj.leaf(1)
    assert build(chain).span() == 6


def test_balanced_tree_height() -> None:
    dag = build(lambda fj: fj.parallel_for(0, 1024, lambda i: fj.leaf(1)))
    assert dag.max_fork_depth == 10
    assert dag.span() == 2 * 10 + 1
    assert dag.work() == 1024 + 2 * 1023


def test_leaf_work_counts_accesses() -> None:
    memory = SimMemory(4)
    fj = ForkJoinBuilder(memory)
    array = memory.alloc(4)
    array.write(0, 1)
    array.write(1, array.read(0))
    fj.charge(2)
    dag = fj.finish()
    assert len(dag) == 1
    assert dag.work() == 5


def test_empty_branch_gets_a_noop_leaf() -> None:
    dag = build(lambda fj: fj.fork(lambda: None, lambda: fj.leaf(3)))
    assert len(dag) == 4
    assert dag.get_node(1).work == 1
    assert dag.branch_end(1) == (0, Side.Left)
    assert dag.branch_end(2) == (0, Side.Right)


def test_ids_follow_sequential_order() -> None:
    dag = build(nested_forks)
    assert all(succ > node for node, succ in dag.edges())
    assert [node.kind for node in dag.forks()] == [NodeKind.Fork] * 3


def test_structural_faults() -> None:
    dag = build(nested_forks)
    with pytest.raises(NodeNotFoundError):
        dag.get_node(len(dag))
    with pytest.raises(StructuralFault):
        dag.add_arch(3, 1)
    loose = Dag()
    loose.add_node(NodeKind.Join)
    with pytest.raises(StructuralFault):
        loose.check_well_formed()


def test_no_steal_is_one_kernel() -> None:
    dag = build(nested_forks)
    kernels = partition_kernels(dag, [])
    assert len(kernels) == 1
    assert (kernels[0].first, kernels[0].last) == (0, dag.final)


def test_three_steals_make_seven_kernels() -> None:
    dag = build(nested_forks)
    forks = [node.id for node in dag.forks()]
    kernels = partition_kernels(dag, forks)
    assert len(kernels) == 7
    covered = [node for kernel in kernels for node in range(kernel.first, kernel.last + 1)]
    assert covered == list(range(len(dag)))


def test_steal_outside_its_kernel_faults() -> None:
    dag = build(nested_forks)
    with pytest.raises(KernelSplitError):
        partition_kernels(dag, [1, 1])
    with pytest.raises(KernelSplitError):
        partition_kernels(dag, [2])


def test_kernel_assignment() -> None:
    dag = build(nested_forks)
    outer = dag.get_node(dag.root)
    kernels = partition_kernels(dag, [outer.id])
    node_proc = [0] * len(dag)
    for node in dag.subtree(outer.id, Side.Right):
        node_proc[node] = 1
    node_kernel = assign_kernels(kernels, node_proc)
    assert [kernel.procs for kernel in kernels] == [{0}, {1}, {0}]
    assert node_kernel[outer.right] == 1


def test_steal_paths() -> None:
    dag = build(nested_forks)
    outer = dag.get_node(dag.root)
    inner = dag.get_node(outer.left)
    tasks = build_tasks(dag, [outer.id, inner.id])
    stolen = {outer.right, inner.right}
    assert [task.id for task in tasks] == [0, outer.right, inner.right]
    assert tasks[0].steals == [outer.id, inner.id]
    path = steal_path(dag, tasks[0], stolen)
    assert path[:3] == [outer.id, inner.id, inner.left]
    assert path[-1] == dag.final
    assert all(check_steal_path(dag, task, stolen) for task in tasks)
    assert owner_of(tasks, outer.right + 1).id == outer.right


def test_unsteal_path_is_the_right_spine() -> None:
    dag = build(nested_forks)
    tasks = build_tasks(dag, [])
    path = steal_path(dag, tasks[0], set())
    outer = dag.get_node(dag.root)
    assert path[1] == outer.right
    assert check_steal_path(dag, tasks[0], set())
    inner = dag.get_node(outer.left)
    assert not check_steal_path(dag, build_tasks(dag, [inner.id])[0], set())

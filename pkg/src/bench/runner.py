import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from model.global_constants import TRACE_DIR_ENV
from model.validation.bench_config import BenchConfig
from model.validation.run_report import RunReport
from src.bench.inputs import InputFactory
from src.cache.replay import MissReport, stack_misalignment, replay_scheduled, replay_sequential
from src.dag.kernels import Kernel, Task, assign_kernels, build_tasks, partition_kernels
from src.fs.audit import AuditReport, run_audits
from src.fs.ledger import FsReport, fs_cost_total
from src.memory.trace import dump_trace
from src.scheduler.report import assemble_report
from src.scheduler.retiming import Retiming, retime
from src.scheduler.rws import RandomizedWorkStealing
from src.scheduler.scheduler import Schedule
from src.spms.core import SortRun, sort
from src.utils import import_keys

logger = logging.getLogger(__name__)


@dataclass
class RunResult:
    """Everything one scheduled run measured, the flat report included."""
    report          : RunReport
    sequential      : Schedule
    schedule        : Schedule
    kernels         : List[Kernel]
    tasks           : List[Task]
    misses          : MissReport
    fs              : FsReport
    audits          : AuditReport
    retiming        : Retiming
    misalignment    : Dict[int, int]


def load_keys(config: BenchConfig) -> List[int]:
    """Keys from the input file when one is given, else from the seeded generator."""
    if config.input is not None:
        return import_keys(Path(config.input))
    return InputFactory(config.seed).keys(config.n, config.gen)


def oracle_mismatch(keys: Sequence[int], output: Sequence[int]) -> Optional[int]:
    """First position where `output` differs from a comparison sort of `keys`, None if equal."""
    expected = sorted(keys)
    if len(expected) != len(output):
        return min(len(expected), len(output))
    return next((index for index, (a, b) in enumerate(zip(expected, output)) if a != b), None)


def run_sort(keys: Sequence[int], config: BenchConfig) -> SortRun:
    return sort(keys, params=config.params(), block_words=config.B)


def schedule_run(run: SortRun, config: BenchConfig, seed: int) -> RunResult:
    """Schedules a recorded sort on p processors and runs every analysis on it.

    The single-processor schedule provides Q_seq and the sequential frame
    layout the misalignment check compares against.
    """
    cache = config.cache()
    costs = config.costs()
    dag = run.dag
    logger.info('run n=%d p=%d seed=%d', run.n, config.p, seed)
    sequential = RandomizedWorkStealing(1, seed, costs).run(dag, run.memory)
    q_seq = replay_sequential(sequential.events, cache)
    schedule = sequential if config.p == 1 else RandomizedWorkStealing(config.p, seed, costs).run(dag, run.memory)

    kernels = partition_kernels(dag, schedule.steal_forks)
    node_kernel = assign_kernels(kernels, schedule.node_proc)
    tasks = build_tasks(dag, schedule.steal_forks)
    misses = replay_scheduled(schedule.events, node_kernel, config.p, cache, q_seq)
    fs, incarnations = fs_cost_total(schedule.events, node_kernel, run.memory, schedule.stack_log)
    audits = run_audits(dag, run.memory, schedule, fs, incarnations, tasks)
    retiming = retime(schedule, dag, costs, misses.per_node, fs.per_node)
    misalignment = stack_misalignment(dag, sequential, schedule, tasks, cache.B)
    report = assemble_report(run, config.c, schedule, misses, fs, retiming, len(kernels), cache, costs)
    logger.info('n=%d p=%d seed=%d: S=%d Q_seq=%d T_p=%d', run.n, config.p, seed,
                report.steals, report.q_seq, report.tp_measured)

    trace_dir = os.environ.get(TRACE_DIR_ENV)
    if trace_dir:
        dump_trace(Path(trace_dir) / f'n{run.n}_p{config.p}_seed{seed}', schedule.events,
                   schedule.records, dag.edges())
    return RunResult(report=report, sequential=sequential, schedule=schedule, kernels=kernels,
                     tasks=tasks, misses=misses, fs=fs, audits=audits, retiming=retiming,
                     misalignment=misalignment)

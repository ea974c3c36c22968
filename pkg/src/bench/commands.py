import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, TextIO

from pydantic import ValidationError

from model.enums import OutputFormat
from model.global_constants import EXIT_OK, EXIT_VERIFY_FAILED, MISALIGNMENT_LIMIT
from model.validation.bench_config import BenchConfig
from src.bench.runner import RunResult, load_keys, oracle_mismatch, run_sort, schedule_run
from src.collections.report_collection import ReportCollection, band_checks
from src.collections.verdict_collection import VerdictCollection
from src.dag.kernels import check_steal_path
from src.faults import StructuralFault
from src.spms.core import SortRun
from src.utils import export_keys, export_to_json

logger = logging.getLogger(__name__)


def cmd_sort(config: BenchConfig, out: Optional[TextIO] = None) -> int:
    """Sorts one input, checks it against the oracle and emits the report of the first seed."""
    out = out or sys.stdout
    keys = load_keys(config)
    run = run_sort(keys, config)
    mismatch = oracle_mismatch(keys, run.output)
    if mismatch is not None:
        print(f'oracle mismatch at position {mismatch}', file=out)
        return EXIT_VERIFY_FAILED
    if config.output is not None:
        export_keys(Path(config.output), run.output)
    report = schedule_run(run, config, config.seeds[0]).report
    if config.format is OutputFormat.Csv:
        collection = ReportCollection()
        collection.add_report(report)
        collection.to_frame().to_csv(config.report or out, index=False)
    elif config.report is not None:
        export_to_json(Path(config.report), report.to_record())
    else:
        print(json.dumps(report.to_record(), indent=4), file=out)
    return EXIT_OK


def cmd_sweep(config: BenchConfig, ns: List[int], ps: List[int],
              out: Optional[TextIO] = None) -> ReportCollection:
    """One row per (n, p, seed) cell. A failing cell is recorded and the sweep goes on."""
    out = out or sys.stdout
    collection = ReportCollection()
    for n in ns:
        try:
            cell_config = BenchConfig(**{**config.dict(), 'n': n})
            keys = load_keys(cell_config)
            run = run_sort(keys, cell_config)
            mismatch = oracle_mismatch(keys, run.output)
            if mismatch is not None:
                raise StructuralFault(f'oracle mismatch at position {mismatch}')
        except (ValidationError, StructuralFault) as error:
            logger.warning('sweep cell n=%d failed: %s', n, error)
            for p in ps:
                for seed in config.seeds:
                    collection.add_failure({'n': n, 'p': p, 'seed': seed}, str(error).replace('\n', ' '))
            continue
        for p in ps:
            for seed in config.seeds:
                try:
                    cell_config = BenchConfig(**{**config.dict(), 'n': n, 'p': p})
                    collection.add_report(schedule_run(run, cell_config, seed).report)
                except (ValidationError, StructuralFault) as error:
                    logger.warning('sweep cell n=%d p=%d seed=%d failed: %s', n, p, seed, error)
                    collection.add_failure({'n': n, 'p': p, 'seed': seed}, str(error).replace('\n', ' '))
    for failure in collection.band_failures():
        logger.warning('sweep band: %s', failure)
    if config.output is not None:
        collection.export_csv(Path(config.output))
    else:
        collection.to_frame().to_csv(out, index=False)
    return collection


def check_result(run: SortRun, result: RunResult, verdicts: VerdictCollection, label: str) -> None:
    """Adds the scheduled-run suites of one seed to `verdicts`."""
    report = result.report
    steals = report.steals
    verdicts.add_verdict(f'{label} kernels', report.kernels == 2 * steals + 1
                         and all(len(kernel.procs) == 1 for kernel in result.kernels),
                         f'{report.kernels} kernels for S={steals}')
    stolen = {task.id for task in result.tasks[1:]}
    verdicts.add_verdict(f'{label} steal paths',
                         all(check_steal_path(run.dag, task, stolen) for task in result.tasks))
    verdicts.add_verdict(f'{label} usurpations', report.usurpations <= steals,
                         f'U={report.usurpations} S={steals}')
    verdicts.add_verdict(f'{label} fs audits', result.audits.passed and (steals > 0 or report.fs_delay == 0),
                         '; '.join(result.audits.failures()[:3]))
    worst = max(result.misalignment.values(), default=0)
    verdicts.add_verdict(f'{label} misalignment', worst <= MISALIGNMENT_LIMIT, f'worst {worst}')
    for suite, passed, detail in band_checks(report):
        verdicts.add_verdict(f'{label} {suite}', passed, detail)


def cmd_verify(config: BenchConfig, out: Optional[TextIO] = None) -> int:
    """Runs the invariant suites on one input for every scheduler seed and prints a verdict per suite."""
    out = out or sys.stdout
    verdicts = VerdictCollection()
    keys = load_keys(config)
    run = run_sort(keys, config)
    mismatch = oracle_mismatch(keys, run.output)
    verdicts.add_verdict('oracle', mismatch is None, '' if mismatch is None else f'first difference at {mismatch}')
    verdicts.add_verdict('partition windows', not run.stats.violations,
                         f'{run.stats.partitions} partitions, {len(run.stats.flags)} flagged')
    buffered = run.memory.get_buffered()
    verdicts.add_verdict('buffered arrays', all(array.passed for array in buffered),
                         f'{len(buffered)} arrays')
    for seed in config.seeds:
        try:
            check_result(run, schedule_run(run, config, seed), verdicts, f'seed {seed}')
        except StructuralFault as fault:
            verdicts.add_verdict(f'seed {seed} schedule', False, str(fault))
    for verdict in verdicts.get_failed():
        logger.warning('verification failed: %s', verdict)
    print(verdicts, end='', file=out)
    return EXIT_OK if verdicts.passed else EXIT_VERIFY_FAILED

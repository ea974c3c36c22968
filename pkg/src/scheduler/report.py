from model.enums import LedgerCategory
from model.validation.cache_config import CacheConfig
from model.validation.cost_model import CostModel
from model.validation.run_report import RunReport
from src.cache.replay import MissReport
from src.fs.ledger import FsReport
from src.scheduler.retiming import Retiming
from src.scheduler.scheduler import Schedule
from src.spms.core import SortRun


def tp_estimate(work: int, q_seq: int, steals: int, fs_delay: int, steal_ticks: int,
                failed_steal_ticks: int, idle_ticks: int, p: int, cache: CacheConfig,
                costs: CostModel) -> float:
    """(T1 + b Q + b S M/B + b F + T_s + T_u + I) / p from measured terms."""
    total = (work + costs.b * q_seq + costs.b * steals * cache.M / cache.B
             + costs.b * fs_delay + steal_ticks + failed_steal_ticks + idle_ticks)
    return total / p


def assemble_report(run: SortRun, c: int, schedule: Schedule, misses: MissReport, fs: FsReport,
                    retiming: Retiming, kernels: int, cache: CacheConfig, costs: CostModel) -> RunReport:
    """Flat record of one scheduled run.

    The idle term of the estimate is the nominal one, zero under work
    stealing; the re-timed idle ticks are reported on their own.
    """
    work = run.dag.work()
    steal_ticks = schedule.ticks(LedgerCategory.Steal)
    failed_steal_ticks = schedule.ticks(LedgerCategory.FailedSteal)
    return RunReport(
        n=run.n,
        p=schedule.p,
        seed=schedule.seed,
        c=c,
        M=cache.M,
        B=cache.B,
        b=costs.b,
        s=costs.s,
        work=work,
        span=run.dag.span(),
        steals=len(schedule.steals),
        usurpations=schedule.usurpations,
        steal_ticks=steal_ticks,
        failed_steal_ticks=failed_steal_ticks,
        idle_ticks=retiming.ticks(LedgerCategory.Idle),
        q_seq=misses.q_seq,
        q_par=misses.q_par,
        steal_overhead=misses.steal_overhead,
        sharing_credit=misses.sharing_credit,
        fs_delay=fs.total,
        max_block_delay=fs.max_block_delay,
        invalidations=misses.invalidations,
        kernels=kernels,
        tp_estimate=tp_estimate(work, misses.q_seq, len(schedule.steals), fs.total, steal_ticks,
                                failed_steal_ticks, 0, schedule.p, cache, costs),
        tp_measured=retiming.makespan,
        makespan_nominal=schedule.makespan,
        divergence=retiming.makespan - schedule.makespan,
        peak_live_words=run.memory.peak_live_words,
        partitions=run.stats.partitions,
        window_violations=len(run.stats.violations),
        window_flags=len(run.stats.flags)
    )

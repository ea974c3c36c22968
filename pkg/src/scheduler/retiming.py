import logging
from dataclasses import dataclass, field
from typing import Dict, Mapping

from model.enums import LedgerCategory, ScheduleEvent
from model.validation.cost_model import CostModel
from src.dag.dag import Dag
from src.faults import StructuralFault
from src.scheduler.scheduler import Schedule

logger = logging.getLogger(__name__)


@dataclass
class Retiming:
    """Second pass: the same decisions, with miss and false sharing costs charged."""
    makespan    : int
    ledgers     : Dict[int, Dict[LedgerCategory, int]] = field(default_factory=dict)
    node_end    : Dict[int, int] = field(default_factory=dict)

    def ticks(self, category: LedgerCategory) -> int:
        return sum(ledger[category] for ledger in self.ledgers.values())

    def check_balanced(self) -> None:
        for proc, ledger in self.ledgers.items():
            if ledger[LedgerCategory.Idle] < 0 or sum(ledger.values()) != self.makespan:
                raise StructuralFault(f'ledger of proc {proc} does not add up to {self.makespan}')


def retime(schedule: Schedule, dag: Dag, costs: CostModel,
           node_misses: Mapping[int, int], node_fs: Mapping[int, int]) -> Retiming:
    """Replays the pass-1 activity order per processor with charged durations.

    A node takes work + b*misses + b*fs ticks and starts once its
    processor is free and its predecessors have ended. A steal waits for
    the end of the fork it steals from. Failed steals after a processor's
    last useful activity are dropped; the remainder up to the makespan is
    idle time.
    """
    ledgers = {proc: {category: 0 for category in LedgerCategory} for proc in range(schedule.p)}
    cursor = [0] * schedule.p
    node_end: Dict[int, int] = dict()
    last_useful = dict()
    for position, activity in enumerate(schedule.activities):
        if activity.kind is not ScheduleEvent.StealFailed:
            last_useful[activity.proc] = position

    for position, activity in enumerate(schedule.activities):
        proc, ledger = activity.proc, ledgers[activity.proc]
        if activity.kind is ScheduleEvent.StealFailed:
            if position > last_useful.get(proc, -1):
                continue
            cursor[proc] += costs.s_fail
            ledger[LedgerCategory.FailedSteal] += costs.s_fail
        elif activity.kind is ScheduleEvent.Steal:
            fork = dag.get_node(activity.node).pred[0]
            cursor[proc] = max(cursor[proc], node_end[fork]) + costs.s
            ledger[LedgerCategory.Steal] += costs.s
        else:
            node = dag.get_node(activity.node)
            ready = max((node_end[pred] for pred in node.pred), default=0)
            miss = costs.b * node_misses.get(node.id, 0)
            fs = costs.b * node_fs.get(node.id, 0)
            cursor[proc] = max(cursor[proc], ready) + node.work + miss + fs
            node_end[node.id] = cursor[proc]
            ledger[LedgerCategory.Work] += node.work
            ledger[LedgerCategory.Miss] += miss
            ledger[LedgerCategory.Fs] += fs

    if dag.final not in node_end:
        raise StructuralFault('re-timing never reached the final node')
    makespan = node_end[dag.final]
    for ledger in ledgers.values():
        ledger[LedgerCategory.Idle] = makespan - sum(ledger.values())
    retiming = Retiming(makespan=makespan, ledgers=ledgers, node_end=node_end)
    retiming.check_balanced()
    logger.debug('re-timed makespan %d (nominal %d)', makespan, schedule.makespan)
    return retiming

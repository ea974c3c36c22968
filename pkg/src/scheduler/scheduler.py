from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional

from model.enums import LedgerCategory, ScheduleEvent
from src.dag.dag import Dag
from src.dag.kernels import StealRecord
from src.memory.sim_memory import SimMemory
from src.memory.trace import ScheduleRecord, TraceEvent


class Activity(NamedTuple):
    """One stretch of a processor's time line in the nominal schedule."""
    start   : int
    end     : int
    proc    : int
    kind    : ScheduleEvent
    node    : int


class StackRecord(NamedTuple):
    """Allocation or release of a task's execution stack."""
    time        : int
    allocation  : int
    task        : int
    released    : bool


@dataclass
class Schedule:
    """Everything a nominal-cost run leaves behind for the analyses."""
    p               : int
    seed            : int
    makespan        : int
    node_proc       : List[int]
    node_start      : List[int]
    node_task       : List[int]
    steals          : List[StealRecord] = field(default_factory=list)
    usurpations     : int = 0
    events          : List[TraceEvent] = field(default_factory=list)
    records         : List[ScheduleRecord] = field(default_factory=list)
    activities      : List[Activity] = field(default_factory=list)
    ledgers         : Dict[int, Dict[LedgerCategory, int]] = field(default_factory=dict)
    stack_log       : List[StackRecord] = field(default_factory=list)
    frames          : Dict[int, int] = field(default_factory=dict)
    stack_depth     : Dict[int, int] = field(default_factory=dict)
    usurped         : List[int] = field(default_factory=list)
    usurp_times     : List[int] = field(default_factory=list)

    @property
    def steal_forks(self) -> List[int]:
        return [steal.fork for steal in self.steals]

    def ticks(self, category: LedgerCategory, proc: Optional[int] = None) -> int:
        procs = [proc] if proc is not None else list(self.ledgers)
        return sum(self.ledgers[index].get(category, 0) for index in procs)


class Scheduler(ABC):
    """Abstract class for a dag scheduler"""

    @abstractmethod
    def run(self, dag: Dag, memory: SimMemory) -> Schedule:
        pass

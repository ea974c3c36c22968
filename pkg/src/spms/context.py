from dataclasses import dataclass, field
from typing import List, Tuple

from model.validation.spms_params import SpmsParams
from src.dag.builder import ForkJoinBuilder
from src.memory.sim_memory import SimMemory


@dataclass
class PartitionStats:
    """Subproblem size bookkeeping over every partition of a run."""
    partitions  : int = 0
    sizes       : List[Tuple[int, int, bool]] = field(default_factory=list)
    violations  : List[str] = field(default_factory=list)
    flags       : List[str] = field(default_factory=list)


@dataclass
class SpmsContext:
    fj      : ForkJoinBuilder
    params  : SpmsParams = field(default_factory=SpmsParams)
    stats   : PartitionStats = field(default_factory=PartitionStats)

    @property
    def memory(self) -> SimMemory:
        return self.fj.memory

    @property
    def block_words(self) -> int:
        return self.fj.memory.B

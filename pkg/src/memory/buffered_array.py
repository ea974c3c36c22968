import logging
from typing import List

from model.enums import AccessKind
from model.global_constants import BUFFERED_WRITE_LIMIT
from src.memory.sim_memory import SimArray

logger = logging.getLogger(__name__)


class PhaseDiscipline:

    def __init__(self, length: int, q: int, write_limit: int = BUFFERED_WRITE_LIMIT):
        """Checks the two-phase access rule of a buffered array.

        Phase 1 allows at most `write_limit` writes per word. Phase 2 is
        read-only and must stay clear of the first and last q words.
        """
        self.length = length
        self.q = q
        self.write_limit = write_limit
        self.phase = 1
        self.phase_two_accesses = 0
        self.violations: List[str] = list()
        self.__writes = [0] * (length + 2 * q)

    def on_access(self, kind: AccessKind, offset: int) -> None:
        if self.phase == 1:
            if kind is AccessKind.Write:
                self.__writes[offset] += 1
                if self.__writes[offset] == self.write_limit + 1:
                    self.violations.append(f'word {offset} written more than {self.write_limit} times in phase 1')
            return
        self.phase_two_accesses += 1
        if kind is AccessKind.Write:
            self.violations.append(f'write to word {offset} in read-only phase 2')
        elif offset < self.q or offset >= self.q + self.length:
            self.violations.append(f'phase-2 read of buffer word {offset} (q={self.q})')

    @property
    def passed(self) -> bool:
        return not self.violations


class BufferedArray:

    def __init__(self, underlying: SimArray, length: int, q: int):
        """Array of `length` words guarded by q-word buffers at both ends."""
        self.underlying = underlying
        self.q = q
        self.core = underlying.view(q, length)
        self.discipline = PhaseDiscipline(length, q)

    def seal(self) -> None:
        """Ends phase 1; every later access must be a read of the core."""
        self.discipline.phase = 2

    def release(self) -> None:
        self.underlying.memory.free(self.underlying)

    @property
    def length(self) -> int:
        return self.core.length

    @property
    def passed(self) -> bool:
        return self.discipline.passed

    @property
    def violations(self) -> List[str]:
        return self.discipline.violations

    def __repr__(self) -> str:
        return f'BufferedArray(core={self.core!r}, q={self.q}, phase={self.discipline.phase})'

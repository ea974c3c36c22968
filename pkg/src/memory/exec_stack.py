from dataclasses import dataclass
from typing import List, Optional

from model.enums import AllocationTag
from src.faults import StructuralFault
from src.memory.sim_memory import SimArray, SimMemory


class EmptyStackError(StructuralFault):
    """Raised when popping a stack without live segments."""
    message = 'pop on empty execution stack'


@dataclass
class Segment:
    node    : int
    base    : int
    size    : int


class ExecStack:

    def __init__(self, memory: SimMemory, task: int, capacity: int, proc: Optional[int] = None):
        """Execution stack of one task.

        The stack is a fresh block-aligned allocation; segments are laid
        out back to back without padding.
        """
        self.task = task
        self.proc = proc
        self.array: SimArray = memory.alloc(capacity, tag=AllocationTag.Stack, owner=task)
        self.__memory = memory
        self.__segments: List[Segment] = list()
        self.__top = 0
        self.__released = False

    def push_segment(self, node: int, size: int) -> Segment:
        """Places a segment of `size` words right above the current top."""
        if self.__top + size > self.array.length:
            raise StructuralFault(f'stack of task {self.task} overflows its {self.array.length} words')
        segment = Segment(node=node, base=self.__top, size=size)
        self.__segments.append(segment)
        self.__top += size
        return segment

    def pop_segment(self) -> Segment:
        if not self.__segments:
            raise EmptyStackError(f'task {self.task}')
        segment = self.__segments.pop()
        self.__top = segment.base
        return segment

    def address(self, segment: Segment, slot: int) -> int:
        if not 0 <= slot < segment.size:
            raise StructuralFault(f'slot {slot} outside segment of node {segment.node}')
        return self.array.base + segment.base + slot

    def usurp(self, proc: int) -> None:
        """Hands the stack over to the processor that continues the task."""
        self.proc = proc

    def release(self) -> None:
        if self.__released:
            raise StructuralFault(f'stack of task {self.task} released twice')
        self.__released = True
        self.__memory.free(self.array)

    @property
    def top(self) -> int:
        return self.__top

    @property
    def allocation_id(self) -> int:
        return self.array.allocation.id

    def __repr__(self) -> str:
        return f'ExecStack(task={self.task}, proc={self.proc}, top={self.__top})'

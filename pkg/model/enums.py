from enum import Enum

class AccessKind(str, Enum):
    Read    = 'read'
    Write   = 'write'

class NodeKind(str, Enum):
    Fork    = 'fork'
    Join    = 'join'
    Leaf    = 'leaf'

class Side(int, Enum):
    Left    = 0
    Right   = 1

class AllocationTag(str, Enum):
    Heap        = 'heap'
    Buffered    = 'buffered'
    Scratch     = 'scratch'
    Stack       = 'stack'

class PermuteMode(str, Enum):
    Hardened    = 'hardened'
    Compact     = 'compact'
    Direct      = 'direct'

class InputGenerator(str, Enum):
    Uniform     = 'uniform'
    Sorted      = 'sorted'
    Reverse     = 'reverse'
    FewDistinct = 'few-distinct'

class OutputFormat(str, Enum):
    Json    = 'json'
    Csv     = 'csv'

class LedgerCategory(str, Enum):
    Work        = 'work'
    Miss        = 'miss'
    Fs          = 'fs'
    Steal       = 'steal'
    FailedSteal = 'failed_steal'
    Idle        = 'idle'

class ScheduleEvent(str, Enum):
    Execute     = 'execute'
    Steal       = 'steal'
    StealFailed = 'steal_failed'
    Usurp       = 'usurp'
    Finish      = 'finish'

import logging
from pathlib import Path
from typing import Iterable, List, NamedTuple, Tuple

import pandas as pd

from model.enums import AccessKind, ScheduleEvent

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ['time', 'proc', 'task', 'node', 'kind', 'addr', 'block']
SCHEDULE_COLUMNS = ['time', 'proc', 'event', 'node']
DAG_COLUMNS = ['source', 'target']


class TraceEvent(NamedTuple):
    """One memory access of a scheduled run, ordered by logical time."""
    time    : int
    proc    : int
    task    : int
    node    : int
    kind    : AccessKind
    addr    : int
    block   : int


class ScheduleRecord(NamedTuple):
    time    : int
    proc    : int
    event   : ScheduleEvent
    node    : int


def events_frame(events: Iterable[TraceEvent]) -> pd.DataFrame:
    rows = [(*event[:4], event.kind.value, event.addr, event.block) for event in events]
    return pd.DataFrame(rows, columns=TRACE_COLUMNS)


def schedule_frame(records: Iterable[ScheduleRecord]) -> pd.DataFrame:
    rows = [(record.time, record.proc, record.event.value, record.node) for record in records]
    return pd.DataFrame(rows, columns=SCHEDULE_COLUMNS)


def dump_trace(directory: Path, events: List[TraceEvent], records: List[ScheduleRecord],
               edges: List[Tuple[int, int]]) -> None:
    """Writes trace.csv, schedule.csv and dag.csv into `directory`."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    events_frame(events).to_csv(directory / 'trace.csv', index=False)
    schedule_frame(records).to_csv(directory / 'schedule.csv', index=False)
    pd.DataFrame(edges, columns=DAG_COLUMNS).to_csv(directory / 'dag.csv', index=False)
    logger.info('trace dumped to %s (%d events, %d edges)', directory, len(events), len(edges))

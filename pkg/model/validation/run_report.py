from typing import Any, Dict
from pydantic import BaseModel

from model.global_constants import SCHEMA_VERSION

class RunReport(BaseModel):
    """Flat record of one scheduled SPMS run

    Holds the raw measured terms of the time decomposition
    T_p = (T1 + b Q + b S M/B + b F + T_s + T_u + I) / p
    alongside the estimate itself. The record is serialized
    with a `schema` key.
    """
    n                   : int
    p                   : int
    seed                : int
    c                   : int
    M                   : int
    B                   : int
    b                   : int
    s                   : int
    work                : int
    span                : int
    steals              : int
    usurpations         : int
    steal_ticks         : int
    failed_steal_ticks  : int
    idle_ticks          : int
    q_seq               : int
    q_par               : int
    steal_overhead      : int
    sharing_credit      : int
    fs_delay            : int
    max_block_delay     : int
    invalidations       : int
    kernels             : int
    tp_estimate         : float
    tp_measured         : int
    makespan_nominal    : int
    divergence          : int
    peak_live_words     : int
    partitions          : int
    window_violations   : int
    window_flags        : int
    schema_version      : int = SCHEMA_VERSION

    def to_record(self) -> Dict[str, Any]:
        """Returns the flat record with the schema key."""
        record = self.dict()
        record['schema'] = record.pop('schema_version')
        return record

    @classmethod
    def from_record(cls, record: Dict[str, Any]) -> 'RunReport':
        """Parses a record emitted by to_record (JSON or CSV row)."""
        data = dict(record)
        if 'schema' in data:
            data['schema_version'] = data.pop('schema')
        fields = getattr(cls, 'model_fields', None) or cls.__fields__
        # numpy scalars come back from pandas rows
        data = {key: value.item() if hasattr(value, 'item') else value
                for key, value in data.items() if key in fields}
        return cls(**data)

from typing import Optional
from pydantic import BaseModel, validator

from model.global_constants import DEFAULT_MISS_COST, DEFAULT_STEAL_COST

class CostModel(BaseModel):
    """Tick costs of the scheduler simulator

    b is the cost of a cache miss, s of a successful steal and
    s_fail of an unsuccessful steal attempt (defaults to s).
    """
    b       : int = DEFAULT_MISS_COST
    s       : int = DEFAULT_STEAL_COST
    s_fail  : Optional[int] = None

    @validator('b')
    def miss_cost_positive(cls, value):
        if value < 1:
            raise ValueError('b must be at least 1 tick')
        return value

    @validator('s')
    def steal_not_cheaper_than_miss(cls, value, values):
        if 'b' in values and value < values['b']:
            raise ValueError('s must be >= b')
        return value

    @validator('s_fail', always=True)
    def failed_steal_default(cls, value, values):
        if value is None:
            return values.get('s', DEFAULT_STEAL_COST)
        if value < 1:
            raise ValueError('s_fail must be at least 1 tick')
        return value

from typing import List, Optional
from pydantic import BaseModel, validator

from model.enums import InputGenerator, OutputFormat, PermuteMode
from model.global_constants import (
    DEFAULT_B, DEFAULT_C, DEFAULT_M, DEFAULT_MISS_COST,
    DEFAULT_PROCESSORS, DEFAULT_STEAL_COST
)
from model.validation.cache_config import CacheConfig, is_power_of_two
from model.validation.cost_model import CostModel
from model.validation.spms_params import SpmsParams

class BenchConfig(BaseModel):
    """Validator data model for one bench run

    Either an input file or a generator describes the keys.
    The invariants M >= B^2, p >= 1 and c even >= 6 are checked
    here so the CLI can reject a bad grid before any work.
    """
    n               : int = 1000
    input           : Optional[str] = None
    gen             : InputGenerator = InputGenerator.Uniform
    seed            : int = 1
    c               : int = DEFAULT_C
    B               : int = DEFAULT_B
    M               : int = DEFAULT_M
    p               : int = DEFAULT_PROCESSORS
    seeds           : List[int] = [1]
    b               : int = DEFAULT_MISS_COST
    s               : int = DEFAULT_STEAL_COST
    format          : OutputFormat = OutputFormat.Json
    output          : Optional[str] = None
    report          : Optional[str] = None
    inject_fault    : bool = False

    @validator('n')
    def n_not_negative(cls, value):
        if value < 0:
            raise ValueError('n must be >= 0')
        return value

    @validator('c')
    def c_even_at_least_six(cls, value):
        if value < 6 or value % 2:
            raise ValueError('c must be an even integer >= 6')
        return value

    @validator('B')
    def block_power_of_two(cls, value):
        if not is_power_of_two(value):
            raise ValueError('B must be a power of two and at least 1')
        return value

    @validator('M')
    def tall_cache(cls, value, values):
        if not is_power_of_two(value):
            raise ValueError('M must be a power of two')
        block = values.get('B')
        if block is not None and value < block * block:
            raise ValueError(f'tall cache violated: M={value} < B^2={block * block}')
        return value

    @validator('p')
    def at_least_one_processor(cls, value):
        if value < 1:
            raise ValueError('p must be >= 1')
        return value

    @validator('seeds')
    def seeds_not_empty(cls, value):
        if not value:
            raise ValueError('at least one scheduler seed is required')
        return value

    @validator('s')
    def steal_not_cheaper_than_miss(cls, value, values):
        if 'b' in values and value < values['b']:
            raise ValueError('s must be >= b')
        return value

    def cache(self) -> CacheConfig:
        return CacheConfig(B=self.B, M=self.M)

    def params(self) -> SpmsParams:
        return SpmsParams(c=self.c, output_order=not self.inject_fault,
                          permute_mode=PermuteMode.Hardened)

    def costs(self) -> CostModel:
        return CostModel(b=self.b, s=self.s)

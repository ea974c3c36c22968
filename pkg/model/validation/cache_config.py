from pydantic import BaseModel, validator

from model.global_constants import DEFAULT_B, DEFAULT_M

def is_power_of_two(value: int) -> bool:
    return value >= 1 and value & (value - 1) == 0

class CacheConfig(BaseModel):
    """Validator data model for the simulated cache

    Sizes are in words. The tall cache assumption M >= B^2
    is enforced, both sizes must be powers of two.
    """
    B   : int = DEFAULT_B
    M   : int = DEFAULT_M

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

    @property
    def blocks(self) -> int:
        """Cache capacity in blocks."""
        return self.M // self.B

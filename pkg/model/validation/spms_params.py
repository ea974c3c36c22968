from pydantic import BaseModel, validator

from model.enums import PermuteMode
from model.global_constants import BASE_THRESHOLD, DEFAULT_C

class SpmsParams(BaseModel):
    """Validator data model for the SPMS recursion

    c is the exponent bounding subproblem sizes (n <= 3 r^c),
    base_threshold is the Step 0 cutoff.
    """
    c               : int = DEFAULT_C
    base_threshold  : int = BASE_THRESHOLD
    permute_mode    : PermuteMode = PermuteMode.Hardened
    output_order    : bool = True

    @validator('c')
    def c_even_at_least_six(cls, value):
        if value < 6 or value % 2:
            raise ValueError('c must be an even integer >= 6')
        return value

    @validator('base_threshold')
    def base_threshold_fixed(cls, value):
        if value != BASE_THRESHOLD:
            raise ValueError(f'base_threshold is fixed to {BASE_THRESHOLD}')
        return value

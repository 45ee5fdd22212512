"""Hardware model of the breadth-first FSD: schedule, fixed-point datapath
and cycle-level simulation."""

from .fixed import (
    DEFAULT_FRAC_BITS,
    RAW_MAX,
    RAW_MIN,
    WIDTH,
    FixedWord,
    fx_b_unit,
    fx_direct_enumerate,
    fx_error,
    fx_mul_sym,
    fx_ped_step,
    quantize,
    saturate,
)
from .schedule import GroupId, Hazard, ScheduleEntry, build_schedule, check_hazards, format_trace, parse_trace
from .simulator import (
    DEFAULT_INPUT_SCALE,
    CacheModel,
    CycleStats,
    SimResult,
    Throughput,
    hardwired_symbol,
    quantize_inputs,
    simulate,
    throughput,
)

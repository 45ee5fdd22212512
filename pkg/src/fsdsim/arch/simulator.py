"""Cycle-accurate model of the four-nodes-per-cycle FSD datapath."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ..errors import ConfigurationError, InputShapeError, ParameterError
from ..fsd import DEFAULT_DISTRIBUTION, CandidateList, NodeDistribution
from .fixed import (
    DEFAULT_FRAC_BITS,
    SYMBOLS,
    WIDTH,
    FixedWord,
    fx_b_unit,
    fx_direct_enumerate,
    fx_ped_step,
    quantize,
)
from .schedule import N_COLUMNS, TOP_LEVEL, GroupId, ScheduleEntry, build_schedule

__all__ = [
    "DEFAULT_INPUT_SCALE",
    "RESTART_CYCLES",
    "CacheModel",
    "CycleStats",
    "SimResult",
    "Throughput",
    "hardwired_symbol",
    "quantize_inputs",
    "simulate",
    "throughput",
]

# R and y_zf are multiplied by this before quantization so that a unit
# variance channel with 16-QAM fits the 12-bit, 7-fraction-bit range.
DEFAULT_INPUT_SCALE = 0.5
RESTART_CYCLES = 1
LIST_SIZE = 16
HISTORY_LEVELS = 6


def hardwired_symbol(entry: int, level: int) -> int:
    """Symbols of the two fully expanded levels are fixed by cache position."""
    if level == TOP_LEVEL:
        return SYMBOLS[entry // N_COLUMNS]
    if level == TOP_LEVEL - 1:
        return SYMBOLS[entry % N_COLUMNS]
    raise ValueError(f"level {level} is not hard-wired")


def _entries(g: GroupId) -> range:
    start = (g.column - 1) * N_COLUMNS
    return range(start, start + N_COLUMNS)


@dataclass
class CacheModel:
    """Path-history, b and PED caches (16 entries each).

    Path history stores the 2-bit alphabet index of levels 0..5; levels 6
    and 7 are implied by the entry number.
    """

    frac_bits: int = DEFAULT_FRAC_BITS
    path_history: np.ndarray = field(default=None)
    b_cache: list = field(default=None)
    ped_cache: list = field(default=None)

    def __post_init__(self):
        if self.path_history is None:
            self.path_history = np.zeros((LIST_SIZE, HISTORY_LEVELS), dtype=np.int8)
        if self.b_cache is None:
            self.b_cache = [FixedWord(0, self.frac_bits)] * LIST_SIZE
        if self.ped_cache is None:
            self.ped_cache = [FixedWord(0, self.frac_bits)] * LIST_SIZE

    @staticmethod
    def flip_flops() -> dict[str, int]:
        return {
            "path_history": LIST_SIZE * HISTORY_LEVELS * 2,
            "b_cache": LIST_SIZE * WIDTH,
            "ped_cache": LIST_SIZE * WIDTH,
        }

    def symbol(self, entry: int, level: int) -> int:
        if level >= TOP_LEVEL - 1:
            return hardwired_symbol(entry, level)
        return SYMBOLS[self.path_history[entry, level]]

    def copy(self) -> "CacheModel":
        return CacheModel(self.frac_bits, self.path_history.copy(), list(self.b_cache), list(self.ped_cache))


@dataclass
class CycleStats:
    n_cycles: int
    traversal_cycles: int
    visited_nodes: int
    parallelism: int
    task_log: list[ScheduleEntry]
    load_saturations: int = 0


@dataclass
class SimResult:
    paths: np.ndarray
    peds_raw: np.ndarray
    stats: CycleStats
    cache: CacheModel
    input_scale: float
    trace: list[CacheModel] | None = None

    @property
    def frac_bits(self) -> int:
        return self.cache.frac_bits

    def candidates(self) -> CandidateList:
        """Fixed-point list with PEDs mapped back to the unscaled domain."""
        peds = self.peds_raw / float(1 << self.frac_bits) / self.input_scale**2
        return CandidateList(self.paths.astype(float), peds, visited_nodes=self.stats.visited_nodes)

    def best_index(self) -> int:
        return int(np.argmin(self.peds_raw))


def quantize_inputs(R, y_zf, frac_bits: int = DEFAULT_FRAC_BITS, scale: float = DEFAULT_INPUT_SCALE):
    """Quantized R (list of rows) and y_zf plus the number of saturated loads."""
    R = np.asarray(R, dtype=float) * scale
    y_zf = np.asarray(y_zf, dtype=float) * scale
    n = len(y_zf)
    saturated = 0
    Rq = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            Rq[i][j], sat = quantize(R[i, j], frac_bits)
            saturated += sat
    yq = []
    for v in y_zf:
        w, sat = quantize(v, frac_bits)
        yq.append(w)
        saturated += sat
    return Rq, yq, saturated


def _run_cycle(entry: ScheduleEntry, state: CacheModel, Rq, yq) -> int:
    """Execute one cycle; all reads see ``state`` as it was at cycle start."""
    writes = []
    visited = 0
    for g in entry.d:
        L = g.level
        visited += N_COLUMNS
        if L == TOP_LEVEL:
            zero = FixedWord(0, state.frac_bits)
            for k in range(N_COLUMNS):
                d = fx_ped_step(zero, state.b_cache[k * N_COLUMNS], Rq[L][L], SYMBOLS[k])
                # each level-7 node seeds the PED of its whole column
                for p in range(k * N_COLUMNS, (k + 1) * N_COLUMNS):
                    writes.append(("ped", p, d))
        else:
            for p in _entries(g):
                d = fx_ped_step(state.ped_cache[p], state.b_cache[p], Rq[L][L], state.symbol(p, L))
                writes.append(("ped", p, d))
    for g in entry.b:
        L = g.level
        for p in _entries(g):
            terms = [(Rq[L][j], state.symbol(p, j)) for j in range(L + 1, TOP_LEVEL + 1)]
            writes.append(("b", p, fx_b_unit(yq[L], terms)))
    for g in entry.de:
        L = g.level
        for p in _entries(g):
            s = fx_direct_enumerate(state.b_cache[p], Rq[L][L])
            writes.append(("hist", (p, L), SYMBOLS.index(s)))

    for target, where, value in writes:
        if target == "ped":
            state.ped_cache[where] = value
        elif target == "b":
            state.b_cache[where] = value
        else:
            state.path_history[where] = value
    return visited


def simulate(
    R,
    y_zf,
    dist: NodeDistribution = DEFAULT_DISTRIBUTION,
    parallelism: int = 4,
    frac_bits: int = DEFAULT_FRAC_BITS,
    input_scale: float = DEFAULT_INPUT_SCALE,
    trace: bool = False,
) -> SimResult:
    """Run one tree traversal cycle by cycle.

    Returns the 16 candidates in cache order (column-major over the node
    groups), their raw 12-bit PEDs and the cycle accounting. Input
    saturation at load is counted in ``stats.load_saturations`` rather than
    treated as an error.
    """
    R = np.asarray(R, dtype=float)
    y_zf = np.asarray(y_zf, dtype=float)
    if R.shape != (TOP_LEVEL + 1, TOP_LEVEL + 1) or y_zf.shape != (TOP_LEVEL + 1,):
        raise InputShapeError("the architecture model is built for an 8-level (4x4 16-QAM) tree")
    schedule = build_schedule(TOP_LEVEL + 1, parallelism, dist)
    Rq, yq, saturated = quantize_inputs(R, y_zf, frac_bits, input_scale)

    state = CacheModel(frac_bits)
    # reset: b of the top level is the received sample itself
    state.b_cache = [yq[TOP_LEVEL]] * LIST_SIZE
    snapshots = [state.copy()] if trace else None

    visited = 0
    for entry in schedule:
        visited += _run_cycle(entry, state, Rq, yq)
        if trace:
            snapshots.append(state.copy())

    traversal = schedule[-1].cycle
    stats = CycleStats(
        n_cycles=traversal + RESTART_CYCLES,
        traversal_cycles=traversal,
        visited_nodes=visited,
        parallelism=parallelism,
        task_log=schedule,
        load_saturations=saturated,
    )
    paths = np.array([[state.symbol(p, L) for L in range(TOP_LEVEL + 1)] for p in range(LIST_SIZE)])
    peds = np.array([w.raw for w in state.ped_cache], dtype=np.int64)
    return SimResult(paths, peds, stats, state, input_scale, snapshots)


class Throughput(NamedTuple):
    bits_per_second: float
    bits_per_cycle: float

    @property
    def mbps(self) -> float:
        return self.bits_per_second / 1e6


def throughput(f_c: float, bits_per_symbol: int, n_t: int, n_cycles: int) -> Throughput:
    """Detected bits per second at clock ``f_c`` and ``n_cycles`` per vector."""
    if n_cycles <= 0 or f_c <= 0 or bits_per_symbol <= 0 or n_t <= 0:
        raise ParameterError("throughput parameters must be positive")
    per_cycle = bits_per_symbol * n_t / n_cycles
    return Throughput(f_c * per_cycle, per_cycle)

"""Monte Carlo harness: uncoded BER sweeps, schedule reports and LLR audits.

Every frame ``f`` draws its bits and channel from ``default_rng([seed, f, 0])``
and its unit noise from ``default_rng([seed, f, 1])``. The same noise vector
is scaled to each SNR point and shared by every detector, so comparisons
between detectors and between SNR points are paired.

SNR is Es/N0 with Es the average complex-symbol energy (10 for the
unnormalised 16-QAM alphabet) and N0 the complex noise variance per
receive antenna.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .arch import build_schedule, check_hazards, format_trace, simulate, throughput
from .arch.simulator import DEFAULT_INPUT_SCALE, RESTART_CYCLES
from .errors import ConfigurationError, LatticeTooLargeError
from .fsd import CandidateList, NodeDistribution, fsd_search, hard_decision
from .llr import DEFAULT_LLR_MAX, list_llr
from .mimo import Constellation, apply_channel, generate_channel, map_bits, noise_var_from_snr, real_to_bits, realify
from .oracle import MAX_LATTICE, exhaustive_maxlog_llr, exhaustive_ml, exhaustive_peds, lattice_points, see_lsd, see_sd
from .qrd import decompose

__all__ = [
    "DETECTORS",
    "QRD_MODES",
    "CSV_COLUMNS",
    "SimConfig",
    "BerStats",
    "frame_system",
    "run_sweep",
    "write_csv",
    "format_csv",
    "check_monotone",
    "binomial_sigma",
    "run_schedule_report",
    "run_llr_audit",
]

DETECTORS = ("fsd", "see-sd", "exhaustive", "fsd-fx")
QRD_MODES = ("plain", "sorted")
CSV_COLUMNS = (
    "snr_db", "detector", "qrd", "frames", "bits", "bit_errors", "ber",
    "ml_in_list_rate", "mean_visited_nodes", "fx_agree_rate", "seed", "config_hash",
)


@dataclass
class SimConfig:
    n_t: int = 4
    n_r: int = 4
    order: int = 4
    dist: str = "11111144"
    detectors: tuple[str, ...] = ("fsd",)
    qrd_modes: tuple[str, ...] = ("sorted",)
    snr_db: tuple[float, ...] = (10.0,)
    frames: int = 100
    seed: int = 0
    frac_bits: int = 7
    parallelism: int = 4
    llr_max: float = DEFAULT_LLR_MAX
    llr_stats: bool = False
    workers: int = 1
    out: str | None = None

    def __post_init__(self):
        self.detectors = tuple(self.detectors)
        self.qrd_modes = tuple(self.qrd_modes)
        self.snr_db = tuple(float(s) for s in self.snr_db)

    @classmethod
    def from_dict(cls, data: dict) -> "SimConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "SimConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    @property
    def constellation(self) -> Constellation:
        return Constellation(self.order)

    @property
    def distribution(self) -> NodeDistribution:
        return NodeDistribution.parse(self.dist, self.constellation.n_branches)

    def validate(self) -> "SimConfig":
        if self.frames < 1:
            raise ConfigurationError("frames must be >= 1")
        if not self.snr_db:
            raise ConfigurationError("SNR list is empty")
        if not self.detectors:
            raise ConfigurationError("no detector selected")
        for d in self.detectors:
            if d not in DETECTORS:
                raise ConfigurationError(f"unknown detector {d!r}; choose from {DETECTORS}")
        for q in self.qrd_modes:
            if q not in QRD_MODES:
                raise ConfigurationError(f"unknown qrd mode {q!r}; choose from {QRD_MODES}")
        if not self.qrd_modes:
            raise ConfigurationError("no qrd mode selected")
        if self.n_r < self.n_t:
            raise ConfigurationError("need at least as many receive as transmit antennas")
        c = self.constellation
        if self.distribution.n_levels != 2 * self.n_t:
            raise ConfigurationError(f"distribution {self.dist} does not have {2 * self.n_t} levels")
        if c.n_branches ** (2 * self.n_t) > MAX_LATTICE:
            raise LatticeTooLargeError("sweeps need the exhaustive ML reference; lattice too large")
        if "fsd-fx" in self.detectors and (self.n_t != 4 or self.order != 4 or self.dist != "11111144"):
            raise ConfigurationError("fsd-fx models the 4x4 16-QAM 11111144 architecture only")
        if self.parallelism not in (4, 8):
            raise ConfigurationError("parallelism must be 4 or 8")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")
        return self

    def config_hash(self) -> str:
        data = asdict(self)
        for volatile in ("out", "workers"):
            data.pop(volatile)
        blob = json.dumps(data, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


@dataclass
class BerStats:
    snr_db: float
    detector: str
    qrd: str
    frames: int = 0
    bits: int = 0
    bit_errors: int = 0
    ml_in_list: int = 0
    visited_nodes: int = 0
    fx_agree: int | None = None
    llr_abs_dev: list = field(default_factory=list, repr=False)

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits if self.bits else 0.0

    @property
    def ml_in_list_rate(self) -> float:
        return self.ml_in_list / self.frames if self.frames else 0.0

    @property
    def mean_visited_nodes(self) -> float:
        return self.visited_nodes / self.frames if self.frames else 0.0

    @property
    def fx_agree_rate(self) -> float | None:
        return None if self.fx_agree is None else self.fx_agree / self.frames

    @property
    def llr_mean_abs_dev(self) -> float | None:
        return math.fsum(self.llr_abs_dev) / len(self.llr_abs_dev) if self.llr_abs_dev else None


def frame_system(cfg: SimConfig, frame_idx: int, snr_db: float):
    """Transmit frame and real-valued system of frame ``frame_idx``."""
    c = cfg.constellation
    tx_rng = np.random.default_rng([cfg.seed, frame_idx, 0])
    bits = tx_rng.integers(0, 2, c.order * cfg.n_t)
    ch = generate_channel(tx_rng, cfg.n_t, cfg.n_r)
    frame = map_bits(bits, c, cfg.n_t)
    noise_var = noise_var_from_snr(snr_db, c)
    y = apply_channel(ch, frame, noise_var, np.random.default_rng([cfg.seed, frame_idx, 1]))
    return frame, realify(ch, y, noise_var)


def _run_frames(cfg: SimConfig, frame_range: range) -> list[dict]:
    """Per-frame results keyed by (snr index, detector, qrd)."""
    c = cfg.constellation
    dist = cfg.distribution
    out = []
    for f in frame_range:
        rec = {}
        for si, snr in enumerate(cfg.snr_db):
            frame, system = frame_system(cfg, f, snr)
            ml_bits = ml_path = None
            for mode in cfg.qrd_modes:
                q = decompose(system.H_real, system.y_real, mode)
                if ml_path is None:
                    # the ML point does not depend on the column ordering
                    ml = exhaustive_ml(q.R, q.y_zf, c)
                    ml_path = q.unpermute(ml.path)
                    ml_bits = real_to_bits(ml_path, c)
                    ml_visited = ml.visited_nodes
                float_list = None
                for det in cfg.detectors:
                    r = {"fx_agree": None, "llr_dev": None}
                    if det == "exhaustive":
                        bits, visited, in_list = ml_bits, ml_visited, True
                    elif det == "see-sd":
                        sd = see_sd(q.R, q.y_zf, c)
                        path = q.unpermute(sd.path)
                        bits, visited = real_to_bits(path, c), sd.visited_nodes
                        in_list = bool(np.array_equal(path, ml_path))
                    else:
                        if float_list is None:
                            float_list = fsd_search(q.R, q.y_zf, dist, c)
                            float_bits = hard_decision(float_list, q.perm, c)
                        if det == "fsd":
                            cands = float_list
                            bits = float_bits
                        else:
                            sim = simulate(q.R, q.y_zf, dist, cfg.parallelism, cfg.frac_bits)
                            cands = sim.candidates()
                            bits = real_to_bits(q.unpermute(sim.paths[sim.best_index()]), c)
                            r["fx_agree"] = bool(np.array_equal(bits, float_bits))
                        visited = cands.visited_nodes
                        in_list = bool(np.any(np.all(q.unpermute(cands.paths) == ml_path, axis=1)))
                        if cfg.llr_stats:
                            got = list_llr(cands, q.perm, system.sigma2, constellation=c, l_max=cfg.llr_max).values
                            ref = np.clip(exhaustive_maxlog_llr(q.R, q.y_zf, system.sigma2, perm=q.perm,
                                                                constellation=c), -cfg.llr_max, cfg.llr_max)
                            r["llr_dev"] = float(np.mean(np.abs(got - ref)))
                    r["errors"] = int(np.sum(bits != frame.bits))
                    r["visited"] = int(visited)
                    r["in_list"] = bool(in_list)
                    rec[(si, det, mode)] = r
        out.append(rec)
    return out


def _chunks(n: int, k: int) -> list[range]:
    step = math.ceil(n / k)
    return [range(i, min(i + step, n)) for i in range(0, n, step)]


def run_sweep(cfg: SimConfig) -> list[BerStats]:
    """Simulate every (SNR, detector, qrd) combination.

    Results are reduced in frame order, so the output does not depend on
    the number of worker processes.
    """
    cfg.validate()
    if cfg.workers > 1:
        parts = _chunks(cfg.frames, cfg.workers)
        with ProcessPoolExecutor(cfg.workers) as pool:
            per_frame = [rec for chunk in pool.map(_run_frames, [cfg] * len(parts), parts) for rec in chunk]
    else:
        per_frame = _run_frames(cfg, range(cfg.frames))

    n_bits = cfg.constellation.order * cfg.n_t
    stats = []
    for si, snr in enumerate(cfg.snr_db):
        for det in cfg.detectors:
            for mode in cfg.qrd_modes:
                st = BerStats(snr, det, mode)
                if det == "fsd-fx":
                    st.fx_agree = 0
                for rec in per_frame:
                    r = rec[(si, det, mode)]
                    st.frames += 1
                    st.bits += n_bits
                    st.bit_errors += r["errors"]
                    st.ml_in_list += r["in_list"]
                    st.visited_nodes += r["visited"]
                    if r["fx_agree"] is not None:
                        st.fx_agree += r["fx_agree"]
                    if r["llr_dev"] is not None:
                        st.llr_abs_dev.append(r["llr_dev"])
                stats.append(st)
    if cfg.out:
        write_csv(stats, cfg, cfg.out)
    return stats


def _num(x) -> str:
    return "" if x is None else format(x, ".10g")


def format_csv(stats: list[BerStats], cfg: SimConfig) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    h = cfg.config_hash()
    for s in stats:
        w.writerow([
            _num(s.snr_db), s.detector, s.qrd, s.frames, s.bits, s.bit_errors, _num(s.ber),
            _num(s.ml_in_list_rate), _num(s.mean_visited_nodes), _num(s.fx_agree_rate), cfg.seed, h,
        ])
    return buf.getvalue()


def write_csv(stats: list[BerStats], cfg: SimConfig, path) -> Path:
    path = Path(path)
    try:
        path.write_text(format_csv(stats, cfg))
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc
    return path


def binomial_sigma(errors: int, n: int) -> float:
    p = errors / n
    return math.sqrt(p * (1 - p) / n)


def check_monotone(stats: list[BerStats], n_sigma: float = 2.0) -> list[str]:
    """BER must not rise with SNR by more than ``n_sigma`` standard errors."""
    violations = []
    series: dict[tuple[str, str], list[BerStats]] = {}
    for s in stats:
        series.setdefault((s.detector, s.qrd), []).append(s)
    for (det, mode), rows in series.items():
        rows = sorted(rows, key=lambda s: s.snr_db)
        for lo, hi in zip(rows, rows[1:]):
            sigma = math.hypot(binomial_sigma(lo.bit_errors, lo.bits), binomial_sigma(hi.bit_errors, hi.bits))
            if hi.ber - lo.ber > n_sigma * sigma:
                violations.append(
                    f"{det}/{mode}: BER rises from {lo.ber:.3g} at {lo.snr_db} dB to {hi.ber:.3g} at {hi.snr_db} dB"
                )
    return violations


def run_schedule_report(parallelism: int = 4, dist: str = "11111144", f_c: float = 400e6,
                        bits_per_symbol: int = 4, n_t: int = 4) -> str:
    """Cycle table, node counts and throughput as plain text."""
    nd = NodeDistribution.parse(dist)
    schedule = build_schedule(2 * n_t, parallelism, nd)
    hazards = check_hazards(schedule)
    traversal = schedule[-1].cycle
    n_c = traversal + RESTART_CYCLES
    visited = sum(4 * len(e.d) for e in schedule)
    tp = throughput(f_c, bits_per_symbol, n_t, n_c)
    lines = [
        format_trace(schedule).rstrip("\n"),
        "",
        f"parallelism        {parallelism} nodes/cycle",
        f"node distribution  {nd}",
        f"visited nodes      {visited}",
        f"traversal cycles   {traversal}",
        f"cycles per vector  {n_c}",
        f"clock              {f_c / 1e6:g} MHz",
        f"throughput         {tp.mbps:.1f} Mbps",
        f"bits per cycle     {tp.bits_per_cycle:.3f}",
        f"hazards            {len(hazards)}",
    ]
    return "\n".join(lines) + "\n"


AUDIT_COLUMNS = ("frame", "snr_db", "bit", "list_llr", "oracle_llr", "abs_dev", "clamped")
LIST_SOURCES = ("fsd", "fsd-fx", "lsd", "full")


def run_llr_audit(cfg: SimConfig, list_source: str = "fsd", qrd: str | None = None,
                  lsd_size: int = 16) -> tuple[str, dict]:
    """Per-bit comparison of list LLRs with the full-lattice max-log LLRs.

    The oracle is saturated at the same ``llr_max`` as the list LLR so a full
    lattice list gives zero deviation. Returns the CSV text and a summary.
    """
    cfg.validate()
    if list_source not in LIST_SOURCES:
        raise ConfigurationError(f"unknown list source {list_source!r}; choose from {LIST_SOURCES}")
    c = cfg.constellation
    dist = cfg.distribution
    mode = qrd or cfg.qrd_modes[0]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(AUDIT_COLUMNS)
    devs, clamped, agree = [], 0, 0
    for snr in cfg.snr_db:
        for f in range(cfg.frames):
            _, system = frame_system(cfg, f, snr)
            q = decompose(system.H_real, system.y_real, mode)
            if list_source == "fsd":
                cands = fsd_search(q.R, q.y_zf, dist, c)
            elif list_source == "fsd-fx":
                cands = simulate(q.R, q.y_zf, dist, cfg.parallelism, cfg.frac_bits, DEFAULT_INPUT_SCALE).candidates()
            elif list_source == "lsd":
                cands = see_lsd(q.R, q.y_zf, lsd_size, c)
            else:
                cands = CandidateList(lattice_points(len(q.y_zf), c), exhaustive_peds(q.R, q.y_zf, c))
            got = list_llr(cands, q.perm, system.sigma2, constellation=c, l_max=cfg.llr_max)
            ref = np.clip(exhaustive_maxlog_llr(q.R, q.y_zf, system.sigma2, perm=q.perm, constellation=c),
                          -cfg.llr_max, cfg.llr_max)
            for k in range(len(ref)):
                dev = abs(got.values[k] - ref[k])
                devs.append(dev)
                clamped += bool(got.empty_side[k])
                agree += bool(np.sign(got.values[k]) == np.sign(ref[k]))
                w.writerow([f, _num(snr), k, _num(got.values[k]), _num(ref[k]), _num(dev), int(got.empty_side[k])])
    summary = {
        "bits": len(devs),
        "mean_abs_dev": math.fsum(devs) / len(devs),
        "max_abs_dev": max(devs),
        "clamped_fraction": clamped / len(devs),
        "sign_agreement": agree / len(devs),
    }
    return buf.getvalue(), summary

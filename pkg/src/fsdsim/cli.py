"""Command-line entry point.

    fsdsim sweep --snr 6 10 14 18 --frames 2000 --detector exhaustive fsd --qrd sorted plain --out ber.csv
    fsdsim schedule --parallelism 4 --fc 400e6
    fsdsim llr-audit --snr 20 --frames 20 --list fsd --out audit.csv
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .bench import (
    DETECTORS,
    LIST_SOURCES,
    QRD_MODES,
    SimConfig,
    check_monotone,
    run_llr_audit,
    run_schedule_report,
    run_sweep,
)
from .errors import FsdError

log = logging.getLogger("fsdsim")

SWEEP_HELP = """\
Monte Carlo sweep of uncoded bit error rate. The outer channel decoder is not
modelled, so BER is measured directly on detector hard decisions. SNR is
Es/N0 in dB, with Es the average energy of the (unnormalised) complex
constellation and N0 the complex noise variance per receive antenna.
Exits with status 1 if BER rises with SNR beyond two standard errors."""

# CLI flag -> SimConfig field
_FLAG_FIELDS = {
    "snr": "snr_db", "frames": "frames", "seed": "seed", "detector": "detectors", "qrd": "qrd_modes",
    "dist": "dist", "parallelism": "parallelism", "frac_bits": "frac_bits", "out": "out",
    "n_t": "n_t", "n_r": "n_r", "order": "order", "llr_max": "llr_max", "workers": "workers",
}


def _add_sim_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="JSON file with SimConfig fields; flags override it")
    p.add_argument("--snr", type=float, nargs="+", help="SNR points in dB (Es/N0)")
    p.add_argument("--frames", type=int, help="frames per SNR point")
    p.add_argument("--seed", type=int)
    p.add_argument("--detector", nargs="+", choices=DETECTORS)
    p.add_argument("--qrd", nargs="+", choices=QRD_MODES)
    p.add_argument("--dist", help="node distribution, level 0 first (default 11111144)")
    p.add_argument("--parallelism", type=int, choices=(4, 8), help="nodes per cycle of the fixed-point model")
    p.add_argument("--frac-bits", type=int)
    p.add_argument("--n-t", type=int)
    p.add_argument("--n-r", type=int)
    p.add_argument("--order", type=int, help="bits per complex symbol (4 = 16-QAM)")
    p.add_argument("--llr-max", type=float)
    p.add_argument("--workers", type=int, help="worker processes (results do not depend on it)")
    p.add_argument("--out", help="output CSV path")


def _config(args) -> SimConfig:
    data = json.loads(args.config.read_text()) if args.config else {}
    for flag, name in _FLAG_FIELDS.items():
        value = getattr(args, flag, None)
        if value is not None:
            data[name] = value
    return SimConfig.from_dict(data).validate()


def _cmd_sweep(args) -> int:
    cfg = _config(args)
    if args.llr_stats:
        cfg.llr_stats = True
    stats = run_sweep(cfg)
    for s in stats:
        line = (f"{s.snr_db:6.2f} dB  {s.detector:<10} {s.qrd:<6}  BER {s.ber:.4e}  "
                f"ML-in-list {s.ml_in_list_rate:.3f}  visited {s.mean_visited_nodes:.1f}")
        if s.fx_agree_rate is not None:
            line += f"  fx-agree {s.fx_agree_rate:.3f}"
        if s.llr_mean_abs_dev is not None:
            line += f"  LLR MAD {s.llr_mean_abs_dev:.3f}"
        print(line)
    if cfg.out:
        print(f"wrote {cfg.out}")
    violations = check_monotone(stats)
    for v in violations:
        log.error(v)
    return 1 if violations else 0


def _cmd_schedule(args) -> int:
    report = run_schedule_report(args.parallelism or 4, args.dist or "11111144", args.fc)
    print(report, end="")
    if args.out:
        Path(args.out).write_text(report)
    return 0


def _cmd_llr_audit(args) -> int:
    cfg = _config(args)
    text, summary = run_llr_audit(cfg, args.list)
    if cfg.out:
        Path(cfg.out).write_text(text)
    for k, v in summary.items():
        print(f"{k:<18} {v:.6g}" if isinstance(v, float) else f"{k:<18} {v}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fsdsim", description="Fixed-complexity sphere decoder simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="uncoded BER sweep over SNR", description=SWEEP_HELP)
    _add_sim_flags(p)
    p.add_argument("--llr-stats", action="store_true", help="also measure LLR deviation from the exhaustive oracle")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("schedule", help="cycle schedule and throughput report")
    p.add_argument("--parallelism", type=int, choices=(4, 8))
    p.add_argument("--dist")
    p.add_argument("--fc", type=float, default=400e6, help="clock frequency in Hz")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_schedule)

    p = sub.add_parser("llr-audit", help="compare list LLRs with the full-lattice oracle")
    _add_sim_flags(p)
    p.add_argument("--list", choices=LIST_SOURCES, default="fsd", help="candidate list to audit")
    p.set_defaults(func=_cmd_llr_audit)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FsdError, OSError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())

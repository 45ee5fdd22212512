"""Hard-decision agreement between the 12-bit datapath and floating point,
for a range of SNRs and fraction widths."""

import argparse

import numpy as np

from fsdsim import apply_channel, decompose, fsd_search, generate_channel, hard_decision, map_bits, realify
from fsdsim.arch import simulate
from fsdsim.mimo import noise_var_from_snr, real_to_bits


def agreement(snr_db, frac_bits, n, seed):
    rng = np.random.default_rng(seed)
    agree = saturated = 0
    nv = noise_var_from_snr(snr_db)
    for _ in range(n):
        frame = map_bits(rng.integers(0, 2, 16))
        ch = generate_channel(rng)
        system = realify(ch, apply_channel(ch, frame, nv, rng), nv)
        q = decompose(system.H_real, system.y_real)
        res = simulate(q.R, q.y_zf, frac_bits=frac_bits)
        fx = real_to_bits(q.unpermute(res.paths[res.best_index()]))
        agree += np.array_equal(fx, hard_decision(fsd_search(q.R, q.y_zf), q.perm))
        saturated += res.stats.load_saturations > 0
    return agree / n, saturated / n


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--snr", type=float, nargs="+", default=[0, 10, 20, 30])
    ap.add_argument("--frac-bits", type=int, nargs="+", default=[5, 6, 7, 8])
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    print("snr_db,frac_bits,agree_rate,load_saturation_rate")
    for snr in args.snr:
        for fb in args.frac_bits:
            a, s = agreement(snr, fb, args.n, args.seed)
            print(f"{snr:g},{fb},{a:.4f},{s:.4f}")


if __name__ == "__main__":
    main()

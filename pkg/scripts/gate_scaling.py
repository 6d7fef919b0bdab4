"""Two-site gate counts and application time: fast transform vs folded DFT circuit.

    python scripts/gate_scaling.py --m 2
"""

import argparse
import time

import numpy as np

from fmft.fock import StateVector, enumerate_basis
from fmft.transforms import apply_sequence, dft_matrix, fmft_sequence, gate_count, mft_fold_compile


def timed_apply(seq, m, rng):
    basis = enumerate_basis(seq.n, m)
    v = StateVector(basis, rng.normal(size=basis.dim) + 0j)
    t0 = time.perf_counter()
    apply_sequence(v, seq)
    return time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--max-n", type=int, default=64)
    args = ap.parse_args()
    rng = np.random.default_rng(0)

    print(f"{'N':>4} {'fast givens':>12} {'folded givens':>14} {'fast s':>9} {'folded s':>9}")
    n = 4
    while n <= args.max_n:
        fast, folded = fmft_sequence(n), mft_fold_compile(dft_matrix(n))
        print(
            f"{n:>4} {gate_count(fast)['givens']:>12} {gate_count(folded)['givens']:>14}"
            f" {timed_apply(fast, args.m, rng):>9.4f} {timed_apply(folded, args.m, rng):>9.4f}"
        )
        n *= 2


if __name__ == "__main__":
    main()

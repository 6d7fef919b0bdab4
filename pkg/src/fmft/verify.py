"""Self-check suite behind ``fmft verify``.

Each check returns ``(passed, detail)``.  ``quick`` stays at N <= 8;
``full`` adds N=16 sectors and the N=64, M=2 band check.
"""

from __future__ import annotations

import contextlib
import itertools
import math
import time
from typing import Callable, Iterator
from unittest import mock

import numpy as np

from . import fock
from .bethe import (
    ChainParams,
    assemble_band_diagram,
    bond_histogram,
    full_ed_oracle,
    momentum_label,
    momentum_state,
    slater_oracle,
)
from .fock import StateVector, enumerate_basis, translation_apply
from .io import max_spectral_deviation
from .transforms import (
    apply_sequence,
    dft_matrix,
    fmft_sequence,
    gate_count,
    invert_sequence,
    mft_fold_compile,
    single_body_action,
)

Check = Callable[[], tuple[bool, str]]


def _gate_counts(max_n: int) -> Check:
    def run():
        n = 2
        while n <= max_n:
            p = n.bit_length() - 1
            if gate_count(fmft_sequence(n))["givens"] != n * p // 2:
                return False, f"FMFT count wrong at N={n}"
            n *= 2
        for n in (2, 3, 6, 8):
            if gate_count(mft_fold_compile(dft_matrix(n)))["givens"] != n * (n - 1) // 2:
                return False, f"MFT count wrong at N={n}"
        return True, f"FMFT up to N={max_n}, MFT at N=2,3,6,8"

    return run


def _dft_fidelity(ns) -> Check:
    def run():
        worst = max(
            np.abs(single_body_action(fmft_sequence(n)) - dft_matrix(n).conj()).max() for n in ns
        )
        return worst <= 1e-10, f"max deviation {worst:.2e}"

    return run


def _slater(cases) -> Check:
    def run():
        worst = 0.0
        for n, m in cases:
            for ms in itertools.combinations(range(1, n + 1), m):
                d = np.abs(momentum_state(ms, n).amp - slater_oracle(ms, n).amp).max()
                worst = max(worst, d)
        return worst <= 1e-10, f"max deviation {worst:.2e}"

    return run


def _round_trip(n: int, m: int, trials: int = 5) -> Check:
    def run():
        rng = np.random.default_rng(7)
        seq = fmft_sequence(n)
        inv = invert_sequence(seq)
        basis = enumerate_basis(n, m)
        worst = 0.0
        for _ in range(trials):
            v = StateVector(basis, rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim))
            back = apply_sequence(apply_sequence(v, seq), inv)
            worst = max(worst, np.abs(back.amp - v.amp).max() / v.norm())
        return worst <= 1e-12, f"max deviation {worst:.2e}"

    return run


def _eigenphase(n: int, m: int) -> Check:
    def run():
        worst = 0.0
        for ms in itertools.combinations(range(1, n + 1), m):
            v = momentum_state(ms, n)
            k = 2 * math.pi * momentum_label(ms, n) / n
            worst = max(worst, np.abs(translation_apply(v).amp - np.exp(1j * k) * v.amp).max())
        return worst <= 1e-10, f"max deviation {worst:.2e}"

    return run


def _spectra(cases) -> Check:
    def run():
        worst = leak = kramers = 0.0
        for n, m, u in cases:
            params = ChainParams(n, m, 1.0, u)
            bd = assemble_band_diagram(params)
            worst = max(worst, max_spectral_deviation(bd.all_energies(), full_ed_oracle(params)))
            leak = max(leak, bd.max_leakage)
            for e in bd.entries:
                mirror = bd.entries[(n - e.q) % n]
                kramers = max(kramers, max_spectral_deviation(e.energies, mirror.energies))
        ok = worst <= 1e-9 and leak <= 1e-10 and kramers <= 1e-9
        return ok, f"spectrum {worst:.2e}, leakage {leak:.2e}, q/-q {kramers:.2e}"

    return run


def _band_clusters(n: int, m: int) -> Check:
    def run():
        bd = assemble_band_diagram(ChainParams(n, m, 1.0, 100.0))
        sizes = [len(c) for c in bd.clusters()]
        expected = [c for _, c in sorted(bond_histogram(n, m).items())]
        means = [c.mean() for c in bd.clusters()]
        gaps = np.diff(means)
        ok = sizes == expected and bool(np.all(np.abs(gaps - 100.0) <= 6.0))
        return ok, f"cluster sizes {sizes} (expected {expected})"

    return run


def checks(level: str) -> list[tuple[str, Check]]:
    if level not in ("quick", "full"):
        raise ValueError(f"unknown level {level!r}")
    small = [(8, m, u) for m in (1, 2, 3, 4) for u in (0.0, 1.0, 100.0)]
    out = [
        ("gate counts", _gate_counts(1024)),
        ("single-particle DFT", _dft_fidelity([2, 4, 8])),
        ("Slater oracle N<=8", _slater([(n, m) for n in (2, 4, 8) for m in range(4) if m <= n])),
        ("round trip N=8 M=3", _round_trip(8, 3)),
        ("translation eigenphase N=8 M=3", _eigenphase(8, 3)),
        ("sector spectra N=8", _spectra(small)),
        ("folded DFT path N=6", _spectra([(6, 2, 100.0), (6, 3, 1.0)])),
    ]
    if level == "full":
        out += [
            ("single-particle DFT N<=64", _dft_fidelity([16, 32, 64])),
            ("round trip N=16 M=4", _round_trip(16, 4)),
            ("sector spectra N=16", _spectra([(16, m, u) for m in (2, 3) for u in (0.0, 100.0)])),
            ("bands N=16 M=4", _band_clusters(16, 4)),
            ("bands N=64 M=2", _band_clusters(64, 2)),
        ]
    return out


@contextlib.contextmanager
def mutation(name: str | None) -> Iterator[None]:
    """Deliberately break a sign convention, to show the checks notice."""
    if name is None:
        yield
    elif name == "givens-sign":
        flipped = lambda theta: (math.cos(theta / 2), -math.sin(theta / 2))  # noqa: E731
        with mock.patch.object(fock, "_rotation_coeffs", flipped):
            yield
    elif name == "no-parity":
        with mock.patch.object(fock, "_permutation_parity", lambda states, perm: np.zeros(len(states), dtype=np.int64)):
            yield
    else:
        raise ValueError(f"unknown mutation {name!r}")


def run(level: str = "quick", echo=print) -> bool:
    passed = True
    for name, check in checks(level):
        t0 = time.perf_counter()
        try:
            ok, detail = check()
        except Exception as exc:  # a crash counts as a failure of that check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        passed &= ok
        echo(f"{'PASS' if ok else 'FAIL'}  {name}: {detail} ({time.perf_counter() - t0:.1f}s)")
    return passed

"""Gate sequences realizing single-body mode transforms.

Three gate kinds act on kets, in list order:

``Phase(site, phi)``       exp(i phi n_site)
``Givens(x, y, theta)``    two-site rotation, see :func:`fmft.fock.apply_givens_gate`
``Permute(perm)``          mode relabelling with fermionic parity

A target mode transform is given as a matrix ``T`` whose row ``j`` holds the
coefficients of ``c_k`` in ``f_j = sum_k T[j, k] c_k``.  A sequence realizes
``T`` when it maps the site Fock state ``c†_j1 ... c†_jM |0>`` to
``f†_j1 ... f†_jM |0>``.  Its restriction to one particle
(:func:`single_body_action`) is then ``T^H``; this adjoint is the single
convention map between the two pictures (for the DFT, ``T^H = conj(T)``).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Union

import numpy as np

from .fock import (
    FockError,
    SectorBasis,
    StateVector,
    _check_pair,
    _check_site,
    _givens_inplace,
    _permute,
    _phase_inplace,
    check_permutation,
    enumerate_basis,
)

UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class Phase:
    site: int
    phi: float


@dataclass(frozen=True)
class Givens:
    x: int
    y: int
    theta: float


@dataclass(frozen=True)
class Permute:
    perm: tuple[int, ...]


Gate = Union[Phase, Givens, Permute]


@dataclass(frozen=True)
class GateSequence:
    n: int
    gates: tuple[Gate, ...]

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if isinstance(g, Phase):
                _check_site(g.site, self.n)
            elif isinstance(g, Givens):
                _check_pair(g.x, g.y, self.n)
            elif isinstance(g, Permute):
                check_permutation(g.perm, self.n)
            else:
                raise FockError(f"unknown gate {g!r}")

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)


def dft_matrix(n: int) -> np.ndarray:
    """``T[j, k] = W^(j k) / sqrt(n)`` (0-based) with ``W = exp(2 pi i / n)``."""
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    jk = np.outer(np.arange(n), np.arange(n)) % n
    return np.exp(2j * np.pi * jk / n) / math.sqrt(n)


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.abs(u @ u.conj().T - np.eye(len(u))).max() <= tol)


def bit_reverse_perm(n: int) -> tuple[int, ...]:
    """Image list (1-based) of the bit reversal of 0-based indices over log2(n) bits."""
    p = n.bit_length() - 1
    if p == 0:
        return (1,)
    return tuple(int(format(i, f"0{p}b")[::-1], 2) + 1 for i in range(n))


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def fmft_sequence(n: int, inverse: bool = False) -> GateSequence:
    """Fast mode Fourier transform: (N log2 N)/2 Givens gates plus phases.

    Stages run from the largest stride (pairs N/2 apart, contiguous halves)
    down to neighbours; every butterfly is ``Givens(x, y, pi/2)`` followed
    by ``Phase(y, pi (1 - k / 2^(l-1)))``.  A bit-reverse permutation ends
    the sequence.

    With ``inverse=True`` every twiddle is conjugated (W -> 1/W), which
    yields the inverse transform with the same gate layout.
    """
    if not is_power_of_two(n) or n < 2:
        raise FockError(
            f"FMFT needs N a power of two >= 2, got N={n}; use mft_fold_compile(dft_matrix(N)) instead"
        )
    p = n.bit_length() - 1
    sgn = -1.0 if inverse else 1.0
    gates: list[Gate] = []
    for l in range(p, 0, -1):
        half = 1 << (l - 1)
        for j in range(1, n // (1 << l) + 1):
            for k in range(half):
                x = 1 + k + (j - 1) * (1 << l)
                y = x + half
                gates.append(Givens(x, y, math.pi / 2))
                gates.append(Phase(y, math.pi * (1 - sgn * k / half)))
    gates.append(Permute(bit_reverse_perm(n)))
    return GateSequence(n, gates)


def invert_sequence(seq: GateSequence) -> GateSequence:
    inv: list[Gate] = []
    for g in reversed(seq.gates):
        if isinstance(g, Phase):
            inv.append(Phase(g.site, -g.phi))
        elif isinstance(g, Givens):
            inv.append(Givens(g.x, g.y, -g.theta))
        else:
            perm = [0] * seq.n
            for i, p in enumerate(g.perm, start=1):
                perm[p - 1] = i
            inv.append(Permute(tuple(perm)))
    return GateSequence(seq.n, inv)


def apply_sequence_array(amp: np.ndarray, basis: SectorBasis, seq: GateSequence) -> np.ndarray:
    """Apply ``seq`` to an amplitude array (axis 0 over ``basis``); modifies a copy."""
    if basis.n != seq.n:
        raise FockError(f"sequence for N={seq.n} applied to a basis with N={basis.n}")
    amp = np.array(amp, dtype=np.complex128, copy=True)
    for g in seq.gates:
        if isinstance(g, Givens):
            _givens_inplace(amp, basis, g.x, g.y, g.theta)
        elif isinstance(g, Phase):
            _phase_inplace(amp, basis, g.site, g.phi)
        else:
            amp = _permute(amp, basis, g.perm)
    return amp


def apply_sequence(v: StateVector, seq: GateSequence) -> StateVector:
    return StateVector(v.basis, apply_sequence_array(v.amp, v.basis, seq))


def single_body_action(seq: GateSequence) -> np.ndarray:
    """Matrix of ``seq`` on the one-particle sector; column k is the image of site k+1."""
    basis = enumerate_basis(seq.n, 1)
    # one-particle masks ascend with the site index, so the identity is site order
    return apply_sequence_array(np.eye(seq.n, dtype=np.complex128), basis, seq)


def gate_count(seq: GateSequence) -> dict[str, int]:
    counts = Counter(type(g).__name__.lower() for g in seq.gates)
    return {"givens": counts["givens"], "phase": counts["phase"], "permute": counts["permute"]}


# Folding compiler


def _phase_cols(w: np.ndarray, gates: list, row: int, cols) -> None:
    """Make ``w[row, col]`` real and non-negative by a column phase, recording the gate."""
    for col in cols:
        a = w[row, col]
        if a == 0:
            continue
        phi = -math.atan2(a.imag, a.real)
        if phi != 0.0:
            w[:, col] *= np.exp(1j * phi)
            gates.append(Phase(col + 1, phi))


def mft_fold_compile(target: np.ndarray, zero_tol: float = 1e-14) -> GateSequence:
    """Compile a unitary mode transform into nearest-neighbour Givens and phase gates.

    Each row of ``target`` is folded in turn onto its diagonal site: the
    trailing coefficients are made real by phase gates, then rotations on
    columns (m, m+1), m = N-1 down to the row index, zero the coefficient
    at m+1 one at a time.  All rows are updated together.  A dense target
    takes N(N-1)/2 Givens gates; coefficients already below ``zero_tol``
    are skipped without a gate.

    The returned sequence realizes ``target`` in the sense of the module
    docstring: ``single_body_action(seq) == target.conj().T``.
    """
    w = np.array(target, dtype=np.complex128, copy=True)
    if w.ndim != 2 or w.shape[0] != w.shape[1] or not is_unitary(w):
        raise FockError("mft_fold_compile needs a square unitary target (to 1e-10)")
    n = len(w)
    # Column operations w -> w @ Q_i, with Q_i the one-particle ket matrix of
    # gate i, until w is the identity.  Then T^H = Q_1 Q_2 ..., so kets must
    # see the recorded gates in reverse order.
    recorded: list[Gate] = []
    for r in range(n):
        _phase_cols(w, recorded, r, [n - 1])
        for m in range(n - 2, r - 1, -1):
            _phase_cols(w, recorded, r, [m])
            a, b = w[r, m].real, w[r, m + 1].real
            if abs(b) <= zero_tol:
                w[r, m + 1] = 0.0
                continue
            theta = 2 * math.atan2(-b, a)
            c, t = math.cos(theta / 2), math.sin(theta / 2)
            col_m, col_m1 = w[:, m].copy(), w[:, m + 1].copy()
            w[:, m] = c * col_m - t * col_m1
            w[:, m + 1] = t * col_m + c * col_m1
            w[r, m + 1] = 0.0
            recorded.append(Givens(m + 1, m + 2, theta))
        _phase_cols(w, recorded, r, [r])
    return GateSequence(n, tuple(reversed(recorded)))


def mode_transform_sequence(n: int) -> GateSequence:
    """FMFT when N is a power of two, otherwise the folded DFT circuit."""
    if is_power_of_two(n) and n >= 2:
        return fmft_sequence(n)
    return mft_fold_compile(dft_matrix(n))

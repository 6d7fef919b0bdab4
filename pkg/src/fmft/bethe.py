"""Periodic chain of spinless fermions with nearest-neighbour hopping and repulsion.

    H = -J sum_j (c†_j c_{j+1} + h.c.) + U sum_j n_j n_{j+1},   c_{N+1} = c_1

The hopping part is diagonal in the momentum modes ``f_j`` produced by the
mode Fourier transform.  Each set of momentum modes has total momentum
``k = 2 pi q / N`` with ``q = sum (j - 1) mod N``, and ``H`` is block
diagonal in ``q``.  Blocks are built by pushing momentum states through the
site basis: transform, multiply by the (site-diagonal) interaction,
transform back.  Two brute-force routes check this pipeline: Slater
determinants for the momentum states and exact diagonalization in the site
basis for the spectrum.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .fock import (
    FockError,
    OccupationState,
    SectorBasis,
    StateVector,
    enumerate_basis,
)
from .transforms import (
    GateSequence,
    apply_sequence_array,
    invert_sequence,
    mode_transform_sequence,
)

HERMITIAN_TOL = 1e-9
LEAKAGE_TOL = 1e-10
ORACLE_CAP = 20_000


class SectorLeakageError(RuntimeError):
    """A transformed momentum state left its translation sector."""


@dataclass(frozen=True)
class ChainParams:
    n: int
    m: int
    j: float = 1.0
    u: float = 0.0

    def __post_init__(self):
        if not 3 <= self.n <= 64:
            raise ValueError(f"ring needs 3 <= N <= 64, got N={self.n}")
        if not 0 <= self.m <= self.n:
            raise ValueError(f"M must lie in 0..N={self.n}, got M={self.m}")
        if not (math.isfinite(self.j) and math.isfinite(self.u)):
            raise ValueError("J and U must be finite")

    @property
    def dim(self) -> int:
        return math.comb(self.n, self.m)


def check_modes(modes: Sequence[int], n: int) -> tuple[int, ...]:
    modes = tuple(int(x) for x in modes)
    if any(a >= b for a, b in zip(modes, modes[1:])) or any(not 1 <= x <= n for x in modes):
        raise FockError(f"mode set must be strictly ascending within 1..{n}: {modes}")
    return modes


def momentum_label(modes: Sequence[int], n: int) -> int:
    return sum(x - 1 for x in modes) % n


def shifted_momentum(q: int, n: int) -> tuple[float, float]:
    """``(k, K)`` with k = 2 pi q / N and K = mod(k - pi, 2 pi)."""
    k = 2 * math.pi * q / n
    return k, (k - math.pi) % (2 * math.pi)


@dataclass
class MomentumSector:
    q: int
    k: float
    K: float
    basis: list[tuple[int, ...]]
    # ordinals of the member mode sets, read as site masks, in the full (N, M) basis
    index: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.basis)


def bond_counts(masks: np.ndarray, n: int) -> np.ndarray:
    """Number of occupied nearest-neighbour pairs (with wrap) for each mask."""
    masks = np.asarray(masks, dtype=np.uint64)
    full = np.uint64((1 << n) - 1)
    rolled = ((masks << np.uint64(1)) | (masks >> np.uint64(n - 1))) & full
    return np.bitwise_count(masks & rolled).astype(np.int64)


def interaction_energy(state: OccupationState, params: ChainParams) -> float:
    return params.u * int(bond_counts(np.array([state.mask], dtype=np.uint64), params.n)[0])


def hopping_energy(modes: Sequence[int], params: ChainParams) -> float:
    n = params.n
    return sum(-2 * params.j * math.cos(2 * math.pi * (x - 1) / n) for x in modes)


def _mode_sets(masks: np.ndarray, n: int) -> list[tuple[int, ...]]:
    return [OccupationState(int(mk), n).sites for mk in masks]


def _momentum_of_masks(masks: np.ndarray, n: int) -> np.ndarray:
    q = np.zeros(len(masks), dtype=np.int64)
    for j in range(1, n + 1):
        q += (j - 1) * ((masks >> np.uint64(j - 1)) & np.uint64(1)).astype(np.int64)
    return q % n


def sector_partition(params: ChainParams, basis: Optional[SectorBasis] = None) -> list[MomentumSector]:
    """One sector per residue q = 0..N-1 (possibly empty), members in ascending mask order."""
    n = params.n
    if basis is None:
        basis = enumerate_basis(n, params.m)
    q_all = _momentum_of_masks(basis.states, n)
    sectors = []
    for q in range(n):
        idx = np.flatnonzero(q_all == q)
        k, K = shifted_momentum(q, n)
        sectors.append(MomentumSector(q, k, K, _mode_sets(basis.states[idx], n), idx))
    return sectors


def momentum_state(modes: Sequence[int], n: int, seq: Optional[GateSequence] = None) -> StateVector:
    """``f†_j1 ... f†_jM |0>`` in the site basis, obtained by transforming a Fock state.

    Without ``seq`` the FMFT is used for powers of two and the folded DFT
    circuit otherwise.
    """
    modes = check_modes(modes, n)
    if seq is None:
        seq = mode_transform_sequence(n)
    basis = enumerate_basis(n, len(modes))
    v = StateVector.from_sites(basis, modes)
    return StateVector(basis, apply_sequence_array(v.amp, basis, seq))


def slater_oracle(modes: Sequence[int], n: int) -> StateVector:
    """Brute-force ``f†_j1 ... f†_jM |0>``: amplitude on sites S is a determinant.

    Entry (i, m) of the determinant is ``W^{-(j_i - 1)(s_m - 1)} / sqrt(N)``.
    """
    modes = check_modes(modes, n)
    basis = enumerate_basis(n, len(modes))
    if not modes:
        return StateVector(basis, np.ones(1))
    sites = np.array(_mode_sets(basis.states, n), dtype=np.int64)  # (dim, M)
    j = np.array(modes, dtype=np.int64) - 1
    phase = -j[None, :, None] * (sites[:, None, :] - 1)
    mats = np.exp(2j * np.pi * (phase % n) / n) / math.sqrt(n)
    return StateVector(basis, np.linalg.det(mats))


def estimate_build_ops(params: ChainParams, seq: GateSequence) -> float:
    """Elementary amplitude updates needed for all sector matrices."""
    dim = params.dim
    return 2.0 * len(seq.gates) * dim * dim


def build_sector_matrix(
    sector: MomentumSector,
    params: ChainParams,
    seq: GateSequence,
    *,
    basis: Optional[SectorBasis] = None,
    inverse: Optional[GateSequence] = None,
    return_leakage: bool = False,
):
    """Hamiltonian block of one momentum sector.

    Every member mode set is prepared as a site Fock state, transformed by
    ``seq``, multiplied by the interaction energy of each site configuration,
    transformed back and projected on the sector.  Hopping enters on the
    diagonal.  Raises :class:`SectorLeakageError` if a column puts more than
    ``LEAKAGE_TOL`` of its norm outside the sector.
    """
    if basis is None:
        basis = enumerate_basis(params.n, params.m)
    if inverse is None:
        inverse = invert_sequence(seq)
    d = len(sector)
    if d == 0:
        mat = np.zeros((0, 0), dtype=np.complex128)
        return (mat, 0.0) if return_leakage else mat
    cols = np.zeros((basis.dim, d), dtype=np.complex128)
    cols[sector.index, np.arange(d)] = 1.0
    cols = apply_sequence_array(cols, basis, seq)
    cols *= (params.u * bond_counts(basis.states, params.n))[:, None]
    cols = apply_sequence_array(cols, basis, inverse)

    mat = cols[sector.index]
    outside = np.ones(basis.dim, dtype=bool)
    outside[sector.index] = False
    col_norm = np.linalg.norm(cols, axis=0)
    leak_abs = np.linalg.norm(cols[outside], axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        leak = np.where(leak_abs > 0, leak_abs / col_norm, 0.0)
    worst = float(leak.max())
    if worst > LEAKAGE_TOL:
        raise SectorLeakageError(
            f"sector q={sector.q}: {worst:.3e} of a column left the sector "
            "(broken sign convention or translation symmetry)"
        )
    mat = mat + np.diag([hopping_energy(ms, params) for ms in sector.basis])
    asym = np.abs(mat - mat.conj().T).max()
    if asym > HERMITIAN_TOL * max(1.0, np.abs(mat).max()):
        raise SectorLeakageError(f"sector q={sector.q}: block not Hermitian ({asym:.3e})")
    return (mat, worst) if return_leakage else mat


def diagonalize_sector(matrix: np.ndarray, eigenvectors: bool = False):
    """Ascending eigenvalues (and optionally eigenvectors as columns) of a Hermitian block."""
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.size == 0:
        return (np.zeros(0), np.zeros((0, 0))) if eigenvectors else np.zeros(0)
    scale = max(1.0, float(np.abs(a).max()))
    if np.abs(a - a.conj().T).max() > HERMITIAN_TOL * scale:
        raise ValueError("matrix is not Hermitian")
    a = (a + a.conj().T) / 2
    if eigenvectors:
        return np.linalg.eigh(a)
    return np.linalg.eigvalsh(a)


@dataclass
class SectorSpectrum:
    q: int
    k: float
    K: float
    energies: np.ndarray
    # <H_I> per eigenstate, present when eigenvectors were requested
    interaction: Optional[np.ndarray] = None


@dataclass
class BandDiagram:
    params: ChainParams
    entries: list[SectorSpectrum]
    max_leakage: float = 0.0

    def all_energies(self) -> np.ndarray:
        if not self.entries:
            return np.zeros(0)
        return np.sort(np.concatenate([e.energies for e in self.entries]))

    def rows(self):
        """``(q, k, K, energy)`` tuples in sector order, energies ascending within a sector."""
        for e in self.entries:
            for en in e.energies:
                yield e.q, e.k, e.K, float(en)

    def clusters(self) -> list[np.ndarray]:
        return cluster_energies(self.all_energies(), self.params)


def cluster_gap(params: ChainParams) -> Optional[float]:
    """Gap threshold separating bands, or None when U < 10 J and bands merge."""
    j = abs(params.j)
    if params.u < 10 * j:
        return None
    return max(params.u / 2, 10 * j)


def cluster_energies(energies: np.ndarray, params: ChainParams) -> list[np.ndarray]:
    e = np.sort(np.asarray(energies, dtype=float))
    gap = cluster_gap(params)
    if gap is None or len(e) == 0:
        return [e]
    cuts = np.flatnonzero(np.diff(e) > gap) + 1
    return np.split(e, cuts)


def _sector_job(sector, params, seq, inverse, basis, eigenvectors):
    mat, leak = build_sector_matrix(
        sector, params, seq, basis=basis, inverse=inverse, return_leakage=True
    )
    if not eigenvectors:
        return SectorSpectrum(sector.q, sector.k, sector.K, diagonalize_sector(mat)), leak
    vals, vecs = diagonalize_sector(mat, eigenvectors=True)
    hop = np.array([hopping_energy(ms, params) for ms in sector.basis])
    h_int = mat - np.diag(hop)
    inter = np.einsum("ia,ij,ja->a", vecs.conj(), h_int, vecs).real
    return SectorSpectrum(sector.q, sector.k, sector.K, vals, inter), leak


def assemble_band_diagram(
    params: ChainParams,
    seq: Optional[GateSequence] = None,
    *,
    threads: int = 1,
    eigenvectors: bool = False,
) -> BandDiagram:
    """Diagonalize every momentum sector; entries are ordered by q."""
    if seq is None:
        seq = mode_transform_sequence(params.n)
    if seq.n != params.n:
        raise FockError(f"sequence for N={seq.n} used on a chain with N={params.n}")
    basis = enumerate_basis(params.n, params.m)
    inverse = invert_sequence(seq)
    sectors = sector_partition(params, basis)
    # warm the per-basis gate plans so worker threads only read them
    apply_sequence_array(np.zeros(basis.dim), basis, seq)
    apply_sequence_array(np.zeros(basis.dim), basis, inverse)

    def job(sector):
        return _sector_job(sector, params, seq, inverse, basis, eigenvectors)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, sectors))
    else:
        results = [job(s) for s in sectors]
    return BandDiagram(params, [r[0] for r in results], max(r[1] for r in results))


def bond_histogram(n: int, m: int) -> dict[int, int]:
    """How many site Fock states have exactly p occupied adjacent pairs."""
    counts = np.bincount(bond_counts(enumerate_basis(n, m).states, n))
    return {p: int(c) for p, c in enumerate(counts) if c}


def full_ed_oracle(params: ChainParams, cap: int = ORACLE_CAP, eigenvectors: bool = False):
    """Exact diagonalization of the chain directly in the site Fock basis.

    Hopping amplitudes follow from applying ``c_b`` then ``c†_a`` to the
    ascending-ordered product state, counting the occupied sites each
    operator has to pass.
    """
    n, dim = params.n, params.dim
    if dim > cap:
        raise ValueError(f"sector dimension {dim} exceeds the oracle cap {cap}")
    masks = sorted(sum(1 << (s - 1) for s in c) for c in itertools.combinations(range(1, n + 1), params.m))
    where = {mk: i for i, mk in enumerate(masks)}
    h = np.zeros((dim, dim))
    for i, mk in enumerate(masks):
        occ = [s for s in range(1, n + 1) if mk >> (s - 1) & 1]
        h[i, i] += params.u * sum(1 for s in occ if (s % n + 1) in occ)
        for a in range(1, n + 1):
            b = a % n + 1
            # c†_a c_b and c†_b c_a for the bond (a, a+1 mod N)
            for dst, src in ((a, b), (b, a)):
                if not (mk >> (src - 1) & 1) or (mk >> (dst - 1) & 1):
                    continue
                below_src = sum(1 for s in occ if s < src)
                removed = mk & ~(1 << (src - 1))
                below_dst = sum(1 for s in range(1, dst) if removed >> (s - 1) & 1)
                sign = (-1) ** (below_src + below_dst)
                h[where[removed | (1 << (dst - 1))], i] += -params.j * sign
    if eigenvectors:
        return np.linalg.eigh(h)
    return np.linalg.eigvalsh(h)

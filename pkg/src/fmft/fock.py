"""Fermionic Fock states on a ring of N sites with fixed particle number.

Conventions used everywhere in the package:

* site ``j`` (1-indexed) is bit ``j - 1`` of an occupation mask;
* a mask denotes ``(c†_1)^{n_1} (c†_2)^{n_2} ... (c†_N)^{n_N} |0>``, i.e.
  creation operators in ascending site order;
* amplitudes live on the fixed-(N, M) sector only, stored densely in the
  ascending-mask order of :class:`SectorBasis`.

A :class:`StateVector` may carry a batch of vectors: ``amp`` has shape
``(dim,)`` or ``(dim, k)`` and every gate acts along axis 0.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

MAX_SITES = 64


class FockError(ValueError):
    """Raised for malformed sites, masks, permutations or bases."""


def _bit(site: int) -> int:
    return 1 << (site - 1)


def _popcount(masks: np.ndarray) -> np.ndarray:
    return np.bitwise_count(masks).astype(np.int64)


def _check_site(site: int, n: int) -> None:
    if not 1 <= site <= n:
        raise FockError(f"site {site} outside 1..{n}")


def _check_pair(x: int, y: int, n: int) -> None:
    _check_site(x, n)
    _check_site(y, n)
    if x >= y:
        raise FockError(f"two-site gate needs x < y, got x={x}, y={y}")


@dataclass(frozen=True)
class OccupationState:
    """A single occupation pattern; bit ``j-1`` of ``mask`` is site ``j``."""

    mask: int
    n: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_SITES:
            raise FockError(f"N={self.n} outside 1..{MAX_SITES}")
        if self.mask < 0 or self.mask >> self.n:
            raise FockError(f"mask {self.mask:#x} does not fit in {self.n} sites")

    @classmethod
    def from_sites(cls, sites, n: int) -> "OccupationState":
        mask = 0
        for s in sites:
            _check_site(s, n)
            mask |= _bit(s)
        return cls(mask, n)

    @property
    def sites(self) -> tuple[int, ...]:
        return tuple(j for j in range(1, self.n + 1) if self.mask >> (j - 1) & 1)

    @property
    def m(self) -> int:
        return self.mask.bit_count()

    def occupied(self, site: int) -> bool:
        return bool(self.mask >> (site - 1) & 1)

    def ket(self) -> str:
        """Site 1 first, e.g. ``|1001>`` for sites {1, 4} at N=4."""
        return "|" + "".join("1" if self.occupied(j) else "0" for j in range(1, self.n + 1)) + ">"


@dataclass(frozen=True, eq=False)
class SectorBasis:
    """All N-site occupation masks with exactly M particles, ascending.

    Immutable apart from an internal cache of gate index plans.
    """

    n: int
    m: int
    states: np.ndarray
    _plans: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    def __len__(self) -> int:
        return len(self.states)

    def index(self, masks):
        """Ordinal(s) of the given mask(s); raises if any mask is not in the sector."""
        arr = np.asarray(masks, dtype=np.uint64)
        pos = np.searchsorted(self.states, arr)
        ok = (pos < self.dim) & (self.states[np.minimum(pos, self.dim - 1)] == arr)
        if not np.all(ok):
            bad = arr[~ok] if arr.ndim else arr
            raise FockError(f"mask(s) {np.atleast_1d(bad)[:5].tolist()} not in sector N={self.n}, M={self.m}")
        return int(pos) if arr.ndim == 0 else pos

    def contains(self, masks) -> np.ndarray:
        arr = np.atleast_1d(np.asarray(masks, dtype=np.uint64))
        pos = np.searchsorted(self.states, arr)
        return (pos < self.dim) & (self.states[np.minimum(pos, self.dim - 1)] == arr)

    def same_sector(self, other: "SectorBasis") -> bool:
        return self is other or (self.n == other.n and self.m == other.m)


def enumerate_basis(n: int, m: int) -> SectorBasis:
    """Return the canonical basis of the (n, m) sector in ascending mask order."""
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_SITES:
        raise FockError(f"N must be an integer in 1..{MAX_SITES}, got {n!r}")
    if not isinstance(m, (int, np.integer)) or not 0 <= m <= n:
        raise FockError(f"M must be an integer in 0..N={n}, got {m!r}")
    n, m = int(n), int(m)
    dim = math.comb(n, m)
    bits = [1 << i for i in range(n)]
    masks = np.fromiter(
        (sum(c) for c in itertools.combinations(bits, m)), dtype=np.uint64, count=dim
    )
    masks.sort()
    masks.setflags(write=False)
    return SectorBasis(n, m, masks)


@dataclass
class StateVector:
    basis: SectorBasis
    amp: np.ndarray

    def __post_init__(self):
        self.amp = np.asarray(self.amp, dtype=np.complex128)
        if self.amp.shape[:1] != (self.basis.dim,):
            raise FockError(
                f"amplitude array of shape {self.amp.shape} does not match basis dim {self.basis.dim}"
            )

    @classmethod
    def zeros(cls, basis: SectorBasis) -> "StateVector":
        return cls(basis, np.zeros(basis.dim, dtype=np.complex128))

    @classmethod
    def basis_state(cls, basis: SectorBasis, mask: int, amplitude: complex = 1.0) -> "StateVector":
        v = cls.zeros(basis)
        v.amp[basis.index(mask)] = amplitude
        return v

    @classmethod
    def from_sites(cls, basis: SectorBasis, sites) -> "StateVector":
        return cls.basis_state(basis, OccupationState.from_sites(sites, basis.n).mask)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amp))

    def copy(self) -> "StateVector":
        return StateVector(self.basis, self.amp.copy())

    def __getitem__(self, mask: int) -> complex:
        return self.amp[self.basis.index(mask)]


def jw_string_sign(state: OccupationState, x: int, y: int) -> int:
    """(-1)^(number of occupied sites strictly between x and y)."""
    _check_pair(x, y, state.n)
    between = (_bit(y) - 1) & ~(_bit(x + 1) - 1)
    return -1 if (state.mask & between).bit_count() % 2 else 1


def inner_product(u: StateVector, v: StateVector) -> complex:
    """<u|v>, conjugate-linear in ``u``."""
    if not u.basis.same_sector(v.basis):
        raise FockError("inner product between different sectors")
    return complex(np.vdot(u.amp, v.amp)) if u.amp.ndim == 1 else u.amp.conj().T @ v.amp


# Gate kernels.  Index plans depend only on the basis and the sites involved,
# so they are computed once per basis and cached on it.


def _occupied_plan(basis: SectorBasis, site: int) -> np.ndarray:
    key = ("occ", site)
    plan = basis._plans.get(key)
    if plan is None:
        plan = np.flatnonzero(basis.states & np.uint64(_bit(site)))
        basis._plans[key] = plan
    return plan


def _givens_plan(basis: SectorBasis, x: int, y: int):
    key = ("givens", x, y)
    plan = basis._plans.get(key)
    if plan is None:
        s = basis.states
        bx, by = np.uint64(_bit(x)), np.uint64(_bit(y))
        a = np.flatnonzero((s & bx != 0) & (s & by == 0))
        partner = (s[a] ^ bx) | by
        b = np.searchsorted(s, partner)
        between = np.uint64((_bit(y) - 1) & ~(_bit(x + 1) - 1))
        sign = 1.0 - 2.0 * (_popcount(s[a] & between) & 1)
        plan = (a, b, sign)
        basis._plans[key] = plan
    return plan


def _rotation_coeffs(theta: float) -> tuple[float, float]:
    return math.cos(theta / 2), math.sin(theta / 2)


def _permutation_parity(states: np.ndarray, perm: tuple[int, ...]) -> np.ndarray:
    """Parity of the sort that brings (perm(i_1), ..., perm(i_M)) into ascending order."""
    n = len(perm)
    inversions = np.zeros(len(states), dtype=np.int64)
    for i in range(1, n + 1):
        later_but_lower = 0
        for k in range(i + 1, n + 1):
            if perm[k - 1] < perm[i - 1]:
                later_but_lower |= _bit(k)
        if later_but_lower:
            occ_i = ((states >> np.uint64(i - 1)) & np.uint64(1)).astype(np.int64)
            inversions += occ_i * _popcount(states & np.uint64(later_but_lower))
    return inversions & 1


def _permutation_plan(basis: SectorBasis, perm: tuple[int, ...]):
    key = ("perm", perm)
    plan = basis._plans.get(key)
    if plan is None:
        s = basis.states
        image = np.zeros_like(s)
        for i, p in enumerate(perm, start=1):
            image |= ((s >> np.uint64(i - 1)) & np.uint64(1)) << np.uint64(p - 1)
        target = np.searchsorted(s, image)
        sign = 1.0 - 2.0 * _permutation_parity(s, perm)
        plan = (target, sign)
        basis._plans[key] = plan
    return plan


def _phase_inplace(amp: np.ndarray, basis: SectorBasis, site: int, phi: float) -> None:
    amp[_occupied_plan(basis, site)] *= np.exp(1j * phi)


def _givens_inplace(amp: np.ndarray, basis: SectorBasis, x: int, y: int, theta: float) -> None:
    a, b, sign = _givens_plan(basis, x, y)
    if len(a) == 0:
        return
    c, t = _rotation_coeffs(theta)
    st = (sign * t).reshape((-1,) + (1,) * (amp.ndim - 1))
    amp_a, amp_b = amp[a], amp[b]
    amp[a] = c * amp_a + st * amp_b
    amp[b] = c * amp_b - st * amp_a


def _permute(amp: np.ndarray, basis: SectorBasis, perm: tuple[int, ...]) -> np.ndarray:
    target, sign = _permutation_plan(basis, perm)
    out = np.empty_like(amp)
    out[target] = sign.reshape((-1,) + (1,) * (amp.ndim - 1)) * amp
    return out


def check_permutation(perm, n: int) -> tuple[int, ...]:
    perm = tuple(int(p) for p in perm)
    if len(perm) != n or sorted(perm) != list(range(1, n + 1)):
        raise FockError(f"not a permutation of 1..{n}: {list(perm)}")
    return perm


def apply_phase_gate(v: StateVector, site: int, phi: float) -> StateVector:
    """Multiply every amplitude with ``site`` occupied by ``exp(i phi)``."""
    _check_site(site, v.basis.n)
    out = v.copy()
    _phase_inplace(out.amp, out.basis, site, phi)
    return out


def apply_givens_gate(v: StateVector, x: int, y: int, theta: float) -> StateVector:
    """Two-site rotation of sites ``x < y`` by angle ``theta``.

    States with ``n_x == n_y`` are untouched.  Every other state pairs up as
    A (x occupied, y empty) and B (x empty, y occupied) with the same
    remaining bits, and with ``s`` the Jordan-Wigner sign of the sites
    strictly between x and y::

        amp'_A =  cos(theta/2) amp_A + s sin(theta/2) amp_B
        amp'_B = -s sin(theta/2) amp_A + cos(theta/2) amp_B

    On kets this is ``exp(+(theta/2)(c†_x c_y - c†_y c_x))``.
    """
    _check_pair(x, y, v.basis.n)
    out = v.copy()
    _givens_inplace(out.amp, out.basis, x, y, theta)
    return out


def apply_mode_permutation(v: StateVector, perm) -> StateVector:
    """Relabel mode ``i`` as ``perm[i-1]`` (sites 1-indexed), with fermionic sign.

    ``perm`` is the image list of 1..N.  Realizes the operator P with
    ``P c†_i P^-1 = c†_perm(i)`` and ``P|0> = |0>``.
    """
    perm = check_permutation(perm, v.basis.n)
    return StateVector(v.basis, _permute(v.amp, v.basis, perm))


def translation_perm(n: int) -> tuple[int, ...]:
    return tuple(j % n + 1 for j in range(1, n + 1))


def translation_apply(v: StateVector) -> StateVector:
    """Shift every particle from site j to site j+1 (site N wraps to 1)."""
    return apply_mode_permutation(v, translation_perm(v.basis.n))

import math

import numpy as np
import pytest
import scipy.linalg

from fmft.fock import enumerate_basis


def annihilators(n):
    """Dense c_1..c_n on the full 2^n space, index = occupation mask.

    c_j |mask> = (-1)^(occupied sites below j) |mask without j>, which is
    the ascending creation-order convention.
    """
    dim = 1 << n
    ops = []
    for j in range(1, n + 1):
        c = np.zeros((dim, dim))
        for mask in range(dim):
            if mask >> (j - 1) & 1:
                below = bin(mask & ((1 << (j - 1)) - 1)).count("1")
                c[mask ^ (1 << (j - 1)), mask] = (-1) ** below
        ops.append(c)
    return ops


def dense_givens(n, x, y, theta):
    c = annihilators(n)
    gen = c[x - 1].T @ c[y - 1] - c[y - 1].T @ c[x - 1]
    return scipy.linalg.expm(theta / 2 * gen)


def dense_phase(n, site, phi):
    c = annihilators(n)
    return scipy.linalg.expm(1j * phi * (c[site - 1].T @ c[site - 1]))


def dense_permutation(n, perm):
    """P with P c†_i P^-1 = c†_perm(i), P|0> = |0>, built state by state."""
    c = annihilators(n)
    dim = 1 << n
    p = np.zeros((dim, dim))
    vac = np.zeros(dim)
    vac[0] = 1.0
    for mask in range(dim):
        v = vac.copy()
        for i in reversed([s for s in range(1, n + 1) if mask >> (s - 1) & 1]):
            v = c[perm[i - 1] - 1].T @ v
        p[:, mask] = v
    return p


def restrict(op, n, m):
    """Block of a number-conserving dense operator on the (n, m) sector."""
    idx = enumerate_basis(n, m).states.astype(np.int64)
    return op[np.ix_(idx, idx)]


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def random_vector(rng, basis, batch=None):
    shape = (basis.dim,) if batch is None else (basis.dim, batch)
    v = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return v / np.linalg.norm(v, axis=0)


def binomial_by_count(n, m):
    return sum(1 for mask in range(1 << n) if bin(mask).count("1") == m)


SQ2 = 1 / math.sqrt(2)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

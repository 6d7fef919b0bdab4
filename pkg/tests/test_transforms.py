import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SQ2, random_vector
from fmft.fock import FockError, StateVector, enumerate_basis
from fmft.transforms import (
    GateSequence,
    Givens,
    Permute,
    Phase,
    apply_sequence,
    bit_reverse_perm,
    dft_matrix,
    fmft_sequence,
    gate_count,
    invert_sequence,
    mft_fold_compile,
    single_body_action,
)


def naive_dft(n):
    w = complex(math.cos(2 * math.pi / n), math.sin(2 * math.pi / n))
    return np.array([[w ** (j * k) for k in range(n)] for j in range(n)]) / math.sqrt(n)


def random_single_body(n, rng, layers=3):
    """A random unitary composed from random Givens and phase gates, plus its gates."""
    gates = []
    for _ in range(layers * n):
        x = int(rng.integers(1, n))
        y = int(rng.integers(x + 1, n + 1))
        gates.append(Givens(x, y, float(rng.uniform(-np.pi, np.pi))))
        gates.append(Phase(int(rng.integers(1, n + 1)), float(rng.uniform(-np.pi, np.pi))))
    return single_body_action(GateSequence(n, gates))


def test_dft_two():
    np.testing.assert_allclose(dft_matrix(2), np.array([[1, 1], [1, -1]]) * SQ2, atol=1e-15)


def test_dft_four_second_row():
    np.testing.assert_allclose(dft_matrix(4)[1], np.array([1, 1j, -1, -1j]) / 2, atol=1e-15)


def test_dft_one():
    assert dft_matrix(1).tolist() == [[1]]


@pytest.mark.parametrize("n", [3, 5, 8, 12])
def test_dft_matches_power_table(n):
    np.testing.assert_allclose(dft_matrix(n), naive_dft(n), atol=1e-13)


def test_fmft_two_sites_structure():
    seq = fmft_sequence(2)
    assert seq.gates == (Givens(1, 2, math.pi / 2), Phase(2, math.pi), Permute((1, 2)))


def test_fmft_eight_counts():
    assert gate_count(fmft_sequence(8)) == {"givens": 12, "phase": 12, "permute": 1}


def test_fmft_stage_layout_four():
    givens = [(g.x, g.y) for g in fmft_sequence(4) if isinstance(g, Givens)]
    assert givens == [(1, 3), (2, 4), (1, 2), (3, 4)]
    phases = [g.phi for g in fmft_sequence(4) if isinstance(g, Phase)]
    np.testing.assert_allclose(phases, [math.pi, math.pi / 2, math.pi, math.pi])


def test_fmft_rejects_non_power_of_two():
    with pytest.raises(FockError, match="mft_fold_compile"):
        fmft_sequence(6)


def test_bit_reverse():
    assert bit_reverse_perm(8) == (1, 5, 3, 7, 2, 6, 4, 8)


def test_fmft_four_on_first_site():
    basis = enumerate_basis(4, 1)
    out = apply_sequence(StateVector.from_sites(basis, [1]), fmft_sequence(4))
    np.testing.assert_allclose(out.amp, [0.5] * 4, atol=1e-15)


def test_fmft_two_on_filled():
    basis = enumerate_basis(2, 2)
    out = apply_sequence(StateVector.from_sites(basis, [1, 2]), fmft_sequence(2))
    np.testing.assert_allclose(out.amp, [-1], atol=1e-15)


def test_fmft_two_on_first_site():
    basis = enumerate_basis(2, 1)
    out = apply_sequence(StateVector.from_sites(basis, [1]), fmft_sequence(2))
    np.testing.assert_allclose(out.amp, [SQ2, SQ2], atol=1e-15)


def test_zero_vector_stays_zero():
    basis = enumerate_basis(8, 3)
    out = apply_sequence(StateVector.zeros(basis), fmft_sequence(8))
    assert not out.amp.any()


@pytest.mark.parametrize("n", [2, 4, 8, 16])
def test_vacuum_is_fixed(n):
    out = apply_sequence(StateVector.from_sites(enumerate_basis(n, 0), []), fmft_sequence(n))
    assert out.amp.tolist() == [1]


def test_sequence_rejects_wrong_n():
    with pytest.raises(FockError):
        apply_sequence(StateVector.zeros(enumerate_basis(4, 1)), fmft_sequence(8))


def test_invert_twice_is_structural_identity():
    seq = fmft_sequence(8)
    assert invert_sequence(invert_sequence(seq)) == seq


@pytest.mark.parametrize("n, m", [(2, 1), (8, 3), (16, 4)])
def test_round_trip(n, m, rng):
    basis = enumerate_basis(n, m)
    seq = fmft_sequence(n)
    v = StateVector(basis, random_vector(rng, basis))
    back = apply_sequence(apply_sequence(v, seq), invert_sequence(seq))
    np.testing.assert_allclose(back.amp, v.amp, atol=1e-12)


@pytest.mark.parametrize("n, m", [(2, 1), (4, 2), (8, 3), (8, 4)])
def test_twiddle_conjugate_sequence_inverts(n, m, rng):
    basis = enumerate_basis(n, m)
    v = StateVector(basis, random_vector(rng, basis))
    forward = apply_sequence(v, fmft_sequence(n))
    np.testing.assert_allclose(
        apply_sequence(forward, fmft_sequence(n, inverse=True)).amp,
        apply_sequence(forward, invert_sequence(fmft_sequence(n))).amp,
        atol=1e-12,
    )


def test_single_body_of_one_givens():
    s = single_body_action(GateSequence(2, [Givens(1, 2, math.pi / 2)]))
    np.testing.assert_allclose(s, np.array([[1, 1], [-1, 1]]) * SQ2, atol=1e-15)


def test_single_body_of_empty():
    np.testing.assert_array_equal(single_body_action(GateSequence(5, [])), np.eye(5))


@pytest.mark.parametrize("n", [2, 4, 8, 16, 32, 64])
def test_fmft_single_body_is_conjugate_dft(n):
    np.testing.assert_allclose(single_body_action(fmft_sequence(n)), naive_dft(n).conj(), atol=1e-12)


@pytest.mark.parametrize("n", [4, 64])
def test_fmft_givens_count_formula(n):
    assert gate_count(fmft_sequence(n))["givens"] == n * int(math.log2(n)) // 2


def test_fmft_64_count():
    assert gate_count(fmft_sequence(64))["givens"] == 192


def test_fold_dft_four():
    target = dft_matrix(4)
    seq = mft_fold_compile(target)
    assert gate_count(seq)["givens"] == 6
    np.testing.assert_allclose(single_body_action(seq), target.conj().T, atol=1e-10)


def test_fold_identity_needs_no_givens():
    assert gate_count(mft_fold_compile(np.eye(6)))["givens"] == 0


def test_fold_dft_six():
    seq = mft_fold_compile(dft_matrix(6))
    assert gate_count(seq)["givens"] == 15
    np.testing.assert_allclose(single_body_action(seq), dft_matrix(6).conj().T, atol=1e-10)


def test_fold_dft_64_count():
    assert gate_count(mft_fold_compile(dft_matrix(64)))["givens"] == 2016


def test_fold_uses_neighbour_pairs_only():
    assert all(g.y == g.x + 1 for g in mft_fold_compile(dft_matrix(7)) if isinstance(g, Givens))


def test_fold_rejects_non_unitary():
    with pytest.raises(FockError):
        mft_fold_compile(np.ones((3, 3)))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 9), st.integers(0, 2**32 - 1))
def test_fold_reconstructs_random_unitaries(n, seed):
    target = random_single_body(n, np.random.default_rng(seed))
    seq = mft_fold_compile(target)
    assert gate_count(seq)["givens"] <= n * (n - 1) // 2
    np.testing.assert_allclose(single_body_action(seq), target.conj().T, atol=1e-10)


def test_folded_dft_realizes_dft_on_many_particles(rng):
    # same single-body matrix -> same Fock-space action, so folded and fast agree
    fast = fmft_sequence(8)
    folded = mft_fold_compile(dft_matrix(8))
    basis = enumerate_basis(8, 3)
    v = StateVector(basis, random_vector(rng, basis))
    np.testing.assert_allclose(apply_sequence(v, fast).amp, apply_sequence(v, folded).amp, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([2, 4, 8]), st.data())
def test_forward_preserves_norm(n, data):
    m = data.draw(st.integers(0, n))
    seed = data.draw(st.integers(0, 2**32 - 1))
    basis = enumerate_basis(n, m)
    v = StateVector(basis, random_vector(np.random.default_rng(seed), basis))
    assert apply_sequence(v, fmft_sequence(n)).norm() == pytest.approx(1.0, rel=1e-12)


def test_gate_sequence_validates_sites():
    with pytest.raises(FockError):
        GateSequence(3, [Phase(4, 0.1)])
    with pytest.raises(FockError):
        GateSequence(3, [Givens(2, 2, 0.1)])
    with pytest.raises(FockError):
        GateSequence(3, [Permute((1, 2, 2))])

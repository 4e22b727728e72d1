import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import SIGMA, systems
from mvdyn.core import FiniteMultiSystem, InputError
from mvdyn.dilation import (
    CovariantPair,
    compression_residual,
    covariance_residual,
    fbp_row_dilation,
    full_dilation_round,
    fullness_check,
    isometry_residual,
    least_preimage,
    maximal_dilation_step,
    maximality_check,
    random_covariant_pair,
    row_isometry_residual,
    separate_isometric_dilation,
)
from mvdyn.fock import matrix_norm, orbit_rep

SHIFT_INTO_FIXED = FiniteMultiSystem(((1, 1),))


def psd_sqrt(B):
    w, V = np.linalg.eigh(B)
    return (V * np.sqrt(np.clip(w, 0, None))) @ V.conj().T


def test_seed_reproduces_blocks():
    a = random_covariant_pair(SIGMA, [1, 2], 7)
    b = random_covariant_pair(SIGMA, [1, 2], 7)
    assert all(np.array_equal(x, y) for x, y in zip(a.A, b.A))
    c = random_covariant_pair(SIGMA, [1, 2], 8)
    assert not np.array_equal(a.A[0], c.A[0])


@settings(max_examples=25, deadline=None)
@given(systems(max_m=3, max_n=3), st.integers(0, 2**63), st.sampled_from(["row", "sep"]))
def test_random_pair_norms(sys, seed, mode):
    pair = random_covariant_pair(sys, [1 + (x % 2) for x in range(sys.m)], seed, mode)
    if mode == "row":
        assert abs(matrix_norm(np.hstack(pair.A)) - 0.9) < 1e-12
    else:
        assert all(abs(matrix_norm(a) - 0.9) < 1e-12 for a in pair.A)


def test_support_is_checked():
    A = [np.array([[0, 1], [0, 0]]), np.zeros((2, 2))]
    with pytest.raises(InputError):
        CovariantPair(SIGMA, [0, 1], A)  # A_1 = id cannot move fiber 1 into fiber 0


def test_unitary_pair_needs_no_defect():
    swap = FiniteMultiSystem(((1, 0),))
    pair = CovariantPair(swap, [0, 1], [np.array([[0, 1], [1, 0]])])
    rep = fbp_row_dilation(pair, 2)
    assert rep.defect_rank == 0 and rep.dim == 2
    assert np.array_equal(rep.S[0], pair.A[0])


def test_separately_unitary_pair_needs_no_defect():
    pair = CovariantPair(SIGMA, [0, 1], [np.eye(2), np.array([[0, 1], [1, 0]])], "sep")
    rep = separate_isometric_dilation(pair, 2)
    assert rep.defect_rank == 0


def test_contraction_is_required():
    pair = CovariantPair(SIGMA, [0, 1], [np.eye(2), np.zeros((2, 2))])
    fbp_row_dilation(pair, 1)
    big = CovariantPair(SIGMA, [0, 1], [np.eye(2), np.array([[0, 1], [1, 0]])])
    with pytest.raises(InputError):
        fbp_row_dilation(big, 1)
    with pytest.raises(InputError):
        separate_isometric_dilation(big, 1)  # wrong mode


@settings(max_examples=15, deadline=None)
@given(systems(max_m=3, max_n=3), st.integers(0, 2**63))
def test_row_dilation_properties(sys, seed):
    rng = np.random.default_rng(seed % 2**32)
    dims = [int(d) for d in rng.integers(1, 3, sys.m)]
    pair = random_covariant_pair(sys, dims, seed)
    rep = fbp_row_dilation(pair, 3)
    assert compression_residual(pair, rep) == 0.0
    fs = [rng.normal(size=sys.m) for _ in range(3)]
    assert covariance_residual(rep, fs) < 1e-10
    assert row_isometry_residual(rep) < 1e-10


@settings(max_examples=15, deadline=None)
@given(systems(max_m=3, max_n=3), st.integers(0, 2**63))
def test_separate_dilation_properties(sys, seed):
    rng = np.random.default_rng(seed % 2**32)
    dims = [int(d) for d in rng.integers(1, 3, sys.m)]
    pair = random_covariant_pair(sys, dims, seed, "sep")
    rep = separate_isometric_dilation(pair, 3)
    assert compression_residual(pair, rep) == 0.0
    assert isometry_residual(rep) < 1e-10
    assert covariance_residual(rep, [rng.normal(size=sys.m) for _ in range(3)]) < 1e-10
    for i, a in enumerate(pair.A):
        D = psd_sqrt(np.eye(pair.dim) - a.conj().T @ a)
        for _ in range(3):
            g = pair.pi(rng.normal(size=sys.m)[list(sys.maps[i])])
            assert matrix_norm(a.conj().T @ a @ g - g @ a.conj().T @ a) < 1e-10
            assert matrix_norm(D @ g - g @ D) < 1e-10


def test_maximality_fixtures():
    good = maximality_check(orbit_rep(SHIFT_INTO_FIXED, 0, 3))
    assert good["is_maximal_interior"] and good["residual"] < 1e-10
    bad = maximality_check(orbit_rep(SIGMA, 0, 3))
    assert not bad["is_maximal_interior"] and abs(bad["residual"] - 1) < 1e-12


def test_maximal_step_on_identity_and_swap():
    r = maximal_dilation_step(orbit_rep(SIGMA, 0, 3))
    assert r.changed and r.added == 1
    assert r.residual_after < r.residual_before
    assert r.residual_after < 1e-10
    assert row_isometry_residual(r.rep) < 1e-10
    again = maximal_dilation_step(orbit_rep(SIGMA, 0, 3))
    assert all(np.array_equal(a, b) for a, b in zip(r.rep.S, again.rep.S))


def test_maximal_input_is_left_alone():
    rep = orbit_rep(SHIFT_INTO_FIXED, 0, 3)
    r = maximal_dilation_step(rep)
    assert not r.changed and r.added == 0


def test_selector_is_least_preimage():
    sys = FiniteMultiSystem(((2, 0, 2),))
    assert least_preimage(sys, 0, 2) == 0 and least_preimage(sys, 0, 0) == 1


@pytest.mark.parametrize("seed", range(4))
def test_round_residuals_never_increase(seed):
    rng = np.random.default_rng(seed)
    sys = FiniteMultiSystem(tuple(tuple(int(v) for v in rng.integers(0, 3, 3)) for _ in range(2)))
    rep = fbp_row_dilation(random_covariant_pair(sys, [1, 2, 1], seed), 2)
    seq = [maximality_check(rep)["residual"]]
    for _ in range(3):
        r = maximal_dilation_step(rep)
        rep = r.rep
        seq.append(r.residual_after)
    assert all(b <= a + 1e-12 for a, b in zip(seq, seq[1:]))
    assert row_isometry_residual(rep) < 1e-10

    rep = separate_isometric_dilation(random_covariant_pair(sys, [1, 2, 1], seed, "sep"), 2)
    seq = [fullness_check(rep)["residual"]]
    for _ in range(3):
        r = full_dilation_round(rep)
        rep = r.rep
        seq.append(r.residual_after)
    assert all(b <= a + 1e-12 for a, b in zip(seq, seq[1:]))
    assert isometry_residual(rep) < 1e-10


def test_cycle_becomes_unitary_on_the_original_space():
    cycle = FiniteMultiSystem(((1, 2, 0),))
    rep = orbit_rep(cycle, 0, 3)
    seq = [fullness_check(rep)["residual"]]
    for _ in range(3):
        r = full_dilation_round(rep, scope="all")
        rep = r.rep
        seq.append(r.residual_after)
    assert seq[0] == pytest.approx(1.0) and seq[-1] < 1e-10
    assert all(b <= a + 1e-12 for a, b in zip(seq, seq[1:]))


def test_full_representation_is_left_alone():
    swap = FiniteMultiSystem(((1, 0),))
    pair = CovariantPair(swap, [0, 1], [np.array([[0, 1], [1, 0]])], "sep")
    r = full_dilation_round(separate_isometric_dilation(pair, 2))
    assert not r.changed

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import SIGMA, TAU, systems
from mvdyn.core import FiniteMultiSystem, InputError, Polynomial, poly_mul, random_polynomial
from mvdyn.fock import (
    _power_norm,
    cesaro,
    cesaro_report,
    factor_tail,
    factor_tail_norms,
    fourier_coefficient,
    full_fock_rep,
    gauge_projection,
    matrix_norm,
    norm_estimate,
    orbit_rep,
    phi,
    psi,
    represent,
)


def oracle_matrix(sys, a, depth, sites):
    """Apply each term s_w f to every basis vector xi_u at each site: f(sigma_u x) xi_{wu}."""
    from mvdyn.core import words_up_to

    basis = words_up_to(sys.n, depth)
    index = {w: k for k, w in enumerate(basis)}
    D = len(basis)
    M = np.zeros((D * len(sites), D * len(sites)), dtype=complex)
    for s, x in enumerate(sites):
        for u in basis:
            y = x
            for c in reversed(u):
                y = sys.maps[c - 1][y]
            for w, f in a.terms.items():
                if len(w) + len(u) <= depth:
                    M[s * D + index[w + u], s * D + index[u]] += f[y]
    return M


def test_orbit_rep_of_identity_and_swap():
    rep = orbit_rep(SIGMA, 0, 1)
    assert np.array_equal(np.diag(rep.pi([1, 0])).real, [1, 1, 0])


def test_fixed_point_gives_identity():
    sys = FiniteMultiSystem(((0,),))
    rep = orbit_rep(sys, 0, 2)
    assert np.array_equal(rep.pi([1.0]), np.eye(3))


def test_dimension_count():
    sys = FiniteMultiSystem(((1, 2, 0), (0, 0, 1)))
    assert full_fock_rep(sys, 3).dim == 3 * (1 + 2 + 4 + 8)


def test_unit_and_generator():
    rep = full_fock_rep(SIGMA, 2)
    assert np.array_equal(represent(rep, Polynomial.monomial(2, ())), np.eye(rep.dim))
    assert np.array_equal(represent(rep, Polynomial.monomial(2, (1,))), rep.L[0])


def test_functions_act_faithfully(rng):
    rep = full_fock_rep(TAU, 1)
    for _ in range(5):
        f = rng.normal(size=2)
        assert np.array_equal(np.diag(rep.pi(f))[[0, 3]].real, f)


@settings(max_examples=40, deadline=None)
@given(systems(max_m=3, max_n=2), st.integers(0, 2**32 - 1))
def test_represent_matches_oracle(sys, seed):
    rng = np.random.default_rng(seed)
    a = random_polynomial(sys, rng, 3, 5)
    rep = full_fock_rep(sys, 3)
    assert np.allclose(represent(rep, a), oracle_matrix(sys, a, 3, rep.sites), atol=1e-14)


@settings(max_examples=30, deadline=None)
@given(systems(max_m=3, max_n=3), st.integers(0, 2**32 - 1))
def test_covariance_is_exact(sys, seed):
    rng = np.random.default_rng(seed)
    rep = full_fock_rep(sys, 2)
    f = rng.normal(size=sys.m) + 1j * rng.normal(size=sys.m)
    for i in range(sys.n):
        assert np.array_equal(rep.pi(f) @ rep.L[i], rep.L[i] @ rep.pi(f[list(sys.maps[i])]))


@settings(max_examples=30, deadline=None)
@given(systems(max_m=3, max_n=3))
def test_interior_row_isometry_is_exact(sys):
    rep = full_fock_rep(sys, 3)
    inner = rep.grades < rep.depth
    for i in range(sys.n):
        for j in range(sys.n):
            G = (rep.L[j].T @ rep.L[i])[np.ix_(inner, inner)]
            assert np.array_equal(G, np.eye(inner.sum()) * (i == j))


@settings(max_examples=30, deadline=None)
@given(systems(max_m=3, max_n=2), st.integers(0, 2**32 - 1))
def test_representation_is_multiplicative(sys, seed):
    rng = np.random.default_rng(seed)
    a, b = random_polynomial(sys, rng, 2, 3), random_polynomial(sys, rng, 2, 3)
    rep = full_fock_rep(sys, 4)
    lhs = represent(rep, poly_mul(sys, a, b))
    rhs = represent(rep, a) @ represent(rep, b)
    # the truncation is a co-invariant compression, so this holds on the whole space
    assert np.allclose(lhs, rhs, atol=1e-12)
    P = rep.P_interior(rep.depth - a.degree - b.degree)
    assert np.allclose(lhs @ P, rhs @ P, atol=1e-12)


def test_sum_of_generators_has_norm_sqrt2():
    a = Polynomial(2, {(1,): [1, 1], (2,): [1, 1]})
    for d in range(1, 5):
        assert abs(norm_estimate(SIGMA, a, d) - np.sqrt(2)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(systems(max_m=3, max_n=2), st.integers(0, 2**32 - 1), st.integers(0, 2))
def test_monomial_norm_is_sup_norm_exactly(sys, seed, length):
    rng = np.random.default_rng(seed)
    w = tuple(int(c) for c in rng.integers(1, sys.n + 1, size=length))
    f = rng.normal(size=sys.m) + 1j * rng.normal(size=sys.m)
    a = Polynomial.monomial(sys.m, w, f)
    for d in range(length, length + 2):
        assert norm_estimate(sys, a, d) == np.abs(f).max()


def test_norms_increase_with_depth(rng):
    for _ in range(10):
        sys = FiniteMultiSystem(tuple(tuple(int(v) for v in rng.integers(0, 3, 3)) for _ in range(2)))
        a = random_polynomial(sys, rng, 3, 4)
        seq = [norm_estimate(sys, a, d) for d in range(1, 5)]
        assert all(b >= a_ - 1e-12 for a_, b in zip(seq, seq[1:]))


def test_power_iteration_fallback(rng):
    M = rng.normal(size=(40, 30)) + 1j * rng.normal(size=(40, 30))
    assert abs(_power_norm(M, 1e-14, 5000) - np.linalg.svd(M, compute_uv=False)[0]) < 1e-6
    assert matrix_norm(np.zeros((3, 3))) == 0.0


def test_gauge_symbolic_examples():
    f = np.array([1.0, 2.0])
    a = Polynomial.monomial(2, (), f)
    assert phi(a, 0).equals(a) and phi(a, 1).is_zero()
    g, h = np.array([3.0, 4.0]), np.array([5.0, 6.0])
    b = Polynomial(2, {(1, 2): f, (2, 1): g, (1, 1): h})
    assert psi(b, (1, 1)).equals(Polynomial(2, {(1, 2): f, (2, 1): g}))


def test_gauge_matrix_path_matches_symbolic(rng):
    for _ in range(10):
        sys = FiniteMultiSystem(tuple(tuple(int(v) for v in rng.integers(0, 3, 3)) for _ in range(2)))
        rep = full_fock_rep(sys, 3)
        a = random_polynomial(sys, rng, 3, 6)
        M = represent(rep, a)
        for k in range(4):
            assert np.abs(gauge_projection(rep, M, k) - represent(rep, phi(a, k))).max() < 1e-12


def test_fourier_and_cesaro():
    f, g = np.array([1.0, 2.0]), np.array([3.0, -1.0])
    a = Polynomial(2, {(): f, (1,): g})
    assert np.array_equal(fourier_coefficient(a, ()), f)
    assert np.array_equal(fourier_coefficient(a, (2,)), np.zeros(2))
    c = Polynomial.monomial(2, (), f)
    for k in (1, 2, 5):
        assert cesaro(c, k).equals(c)
    assert cesaro(a, 4).coefficient((1,)).tolist() == (0.75 * g).tolist()
    with pytest.raises(InputError):
        cesaro(a, 0)


def test_cesaro_error_bound(rng):
    for _ in range(5):
        a = random_polynomial(SIGMA, rng, 3, 5)
        for k in (1, 2, 4, 8):
            assert cesaro_report(SIGMA, a, k, 4).holds


def test_factor_tail_examples():
    f, g = np.array([1.0, 2.0]), np.array([3.0, 4.0])
    parts = factor_tail(Polynomial(2, {(1,): f, (2,): g}), 1)
    assert parts[(1,)].equals(Polynomial.monomial(2, (), f))
    assert parts[(2,)].equals(Polynomial.monomial(2, (), g))
    with pytest.raises(InputError, match=r"E_\[\]"):
        factor_tail(Polynomial.monomial(2, (), f), 1)


def test_factor_tail_reconstructs_and_preserves_norm(rng):
    for _ in range(10):
        sys = FiniteMultiSystem(tuple(tuple(int(v) for v in rng.integers(0, 3, 3)) for _ in range(2)))
        k = int(rng.integers(1, 3))
        a = random_polynomial(sys, rng, 3, 6)
        a = Polynomial(sys.m, {w: f for w, f in a.terms.items() if len(w) >= k}) + Polynomial.monomial(sys.m, (1,) * k)
        parts = factor_tail(a, k)
        rebuilt = Polynomial.zero(sys.m)
        for w, aw in parts.items():
            rebuilt = rebuilt + poly_mul(sys, Polynomial.monomial(sys.m, w), aw)
        assert rebuilt.equals(a)
        lhs, rhs = factor_tail_norms(sys, a, k, a.degree + 1)
        assert abs(lhs - rhs) < 1e-10

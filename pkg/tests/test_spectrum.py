import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import SIGMA, TAU, systems
from mvdyn.conjugacy import are_piecewise_conjugate
from mvdyn.core import FiniteMultiSystem, InputError, Polynomial, poly_mul, random_polynomial
from mvdyn.spectrum import (
    character_fiber,
    diagonalize_nest,
    eval_character,
    fiber_dimensions,
    fixed_indices,
    make_character,
    nest_rep,
    random_character,
)


def test_fixed_indices_on_the_pair():
    assert fixed_indices(SIGMA, 0) == [1] and fixed_indices(SIGMA, 1) == [1]
    assert fixed_indices(TAU, 0) == [1] and fixed_indices(TAU, 1) == [2]
    assert fiber_dimensions(SIGMA) == fiber_dimensions(TAU) == [1, 1]


def test_fiber_descriptors():
    both = FiniteMultiSystem(((0, 0), (0, 0)))
    assert character_fiber(both, 0)["descriptor"] == "2-ball"
    assert character_fiber(both, 0, "semicrossed")["descriptor"] == "2-polydisc"
    assert character_fiber(both, 1)["descriptor"] == "point"
    with pytest.raises(InputError):
        character_fiber(both, 0, "other")


def test_character_values():
    a = Polynomial.monomial(2, (), [2.0, 3.0]) + Polynomial.monomial(2, (1,), [5.0, 7.0]) + Polynomial.monomial(2, (2,), [1.0, 1.0])
    chi = make_character(SIGMA, 1, [0.5, 0])
    assert eval_character(SIGMA, a, chi) == pytest.approx(3 + 7 * 0.5)
    with pytest.raises(InputError):
        make_character(SIGMA, 1, [0.5, 0.1])  # swap does not fix 1
    with pytest.raises(InputError):
        make_character(SIGMA, 1, [1.5, 0])
    make_character(SIGMA, 0, [1.0, 0])


def test_polydisc_allows_larger_vectors():
    sys = FiniteMultiSystem(((0,), (0,)))
    make_character(sys, 0, [0.9, 0.9], "semicrossed")
    with pytest.raises(InputError):
        make_character(sys, 0, [0.9, 0.9], "tensor")


@settings(max_examples=60, deadline=None)
@given(systems(max_m=4, max_n=3), st.integers(0, 2**32 - 1), st.sampled_from(["tensor", "semicrossed"]))
def test_characters_are_multiplicative(sys, seed, model):
    rng = np.random.default_rng(seed)
    a = random_polynomial(sys, rng, 3)
    b = random_polynomial(sys, rng, 3)
    chi = random_character(sys, rng, model=model)
    lhs = eval_character(sys, poly_mul(sys, a, b), chi)
    rhs = eval_character(sys, a, chi) * eval_character(sys, b, chi)
    assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(rhs))


def _relabel(sys, perm, alphas):
    m, n = sys.m, sys.n
    maps = [[0] * m for _ in range(n)]
    for x in range(m):
        for i in range(n):
            maps[i][perm[x]] = perm[sys.maps[alphas[x][i] - 1][x]]
    return FiniteMultiSystem(tuple(map(tuple, maps)))


@settings(max_examples=60, deadline=None)
@given(systems(max_m=4, max_n=3), st.randoms(use_true_random=False))
def test_fiber_dimensions_survive_piecewise_conjugacy(sys, r):
    perm = list(range(sys.m))
    r.shuffle(perm)
    alphas = []
    for _ in range(sys.m):
        a = list(range(1, sys.n + 1))
        r.shuffle(a)
        alphas.append(tuple(a))
    other = _relabel(sys, perm, alphas)
    w = are_piecewise_conjugate(sys, other)
    assert w is not None
    dA, dB = fiber_dimensions(sys), fiber_dimensions(other)
    assert all(dA[x] == dB[w.gamma[x]] for x in range(sys.m))


def _nest_system():
    # sigma_1: 0 -> 1, sigma_2: 0 -> 1, both fix 1
    return FiniteMultiSystem(((1, 1), (1, 1)))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_nest_rep_is_a_homomorphism(seed):
    sys = _nest_system()
    rng = np.random.default_rng(seed)
    z = rng.normal(size=2) + 1j * rng.normal(size=2)
    z /= 1.5 * np.linalg.norm(z)
    rho = nest_rep(sys, 0, 1, z)
    a, b = random_polynomial(sys, rng, 2), random_polynomial(sys, rng, 2)
    ab = poly_mul(sys, a, b)
    assert np.abs(rho(ab) - rho(a) @ rho(b)).max() < 1e-12
    B = np.array([[1.0, 0.3], [0.0, 2.0]])
    rb = rho.conjugated(B)
    assert np.abs(rb(ab) - rb(a) @ rb(b)).max() < 1e-12


def test_nest_rep_rejects_bad_letters():
    sys = FiniteMultiSystem(((1, 1), (0, 1)))
    nest_rep(sys, 0, 1, 0.5)
    with pytest.raises(InputError):
        nest_rep(sys, 0, 1, [0.5, 0.5])
    with pytest.raises(InputError):
        nest_rep(sys, 0, 3, 0.5)


@pytest.mark.parametrize("b", [0.0, 0.7, -2.5 + 1j])
def test_diagonalization(b):
    sys = _nest_system()
    rho = nest_rep(sys, 0, 1, [0.6, 0.0]).conjugated([[1.0, b], [0.0, 1.0]])
    f = np.array([0.0, 1.0])
    d = diagonalize_nest(rho, f)
    assert d.applicable
    A = d.A
    assert A[1, 0] == 0 and A[0, 0] == A[1, 1] == 1
    rng = np.random.default_rng(3)
    for _ in range(5):
        g = rng.normal(size=2) + 1j * rng.normal(size=2)
        M = A @ rho(Polynomial.monomial(2, (), g)) @ np.linalg.inv(A)
        assert abs(M[0, 1]) < 1e-12 and abs(M[1, 0]) < 1e-12
    Rf = rho(Polynomial.monomial(2, (), f))
    assert np.linalg.norm(A, 2) <= 1 + np.linalg.norm(Rf, 2) + 1e-12


def test_diagonalization_not_applicable_at_a_fixed_point():
    sys = _nest_system()
    rho = nest_rep(sys, 1, 1, 0.5)
    d = diagonalize_nest(rho, [1.0, 0.0])
    assert not d.applicable and np.array_equal(d.A, np.eye(2))


def test_diagonalization_needs_a_separating_function():
    rho = nest_rep(_nest_system(), 0, 1, 0.5)
    with pytest.raises(InputError):
        diagonalize_nest(rho, [1.0, 1.0])

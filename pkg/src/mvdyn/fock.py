"""Truncated Fock-space representations of the covariance algebra.

The basis of the depth-``d`` Fock space is every word of length ``<= d``,
graded and lexicographic within a grade.  ``L_i xi_w = xi_{iw}`` and the top
grade is annihilated, so the matrices are the compression of the full
representation to a co-invariant subspace.  That compression is multiplicative,
which keeps covariance exact and makes norms nondecreasing in the depth.

A representation with several sites is the direct sum of orbit
representations, laid out site-major: index ``k * D + j`` is ``xi_{w_j}`` at
site ``k``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import FiniteMultiSystem, InputError, Polynomial, words_up_to

#: above this dimension the norm falls back to power iteration
DENSE_LIMIT = 2000


class FockBasis:
    """Words of length ``<= depth`` over ``n`` letters with index lookup."""

    def __init__(self, n: int, depth: int):
        if depth < 0:
            raise InputError(f"depth must be >= 0, got {depth}")
        self.n, self.depth = n, depth
        self.words = words_up_to(n, depth)
        self.index = {w: k for k, w in enumerate(self.words)}
        self.grades = np.array([len(w) for w in self.words])

    @property
    def dim(self) -> int:
        return len(self.words)

    def grade(self, k: int) -> int:
        return int(self.grades[k])


def _creation(basis: FockBasis, i: int) -> np.ndarray:
    L = np.zeros((basis.dim, basis.dim))
    for k, w in enumerate(basis.words):
        if len(w) < basis.depth:
            L[basis.index[(i,) + w], k] = 1.0
    return L


@dataclass
class FockRep:
    sys: FiniteMultiSystem
    depth: int
    sites: tuple
    basis: FockBasis

    @cached_property
    def points(self) -> np.ndarray:
        """``points[k * D + j] = sigma_{w_j}(site_k)``: the point label of each basis vector."""
        tables = np.array([self.sys.word_map(w) for w in self.basis.words])  # (D, m)
        return np.concatenate([tables[:, x] for x in self.sites])

    @cached_property
    def grades(self) -> np.ndarray:
        return np.tile(self.basis.grades, len(self.sites))

    @property
    def dim(self) -> int:
        return self.basis.dim * len(self.sites)

    @cached_property
    def L(self) -> list:
        eye = np.eye(len(self.sites))
        return [np.kron(eye, _creation(self.basis, i)) for i in range(1, self.sys.n + 1)]

    def pi(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=complex)
        return np.diag(f[self.points])

    def word_op(self, w) -> np.ndarray:
        """``L_w`` with the leftmost letter outermost."""
        M = np.eye(self.dim)
        for c in w:
            M = M @ self.L[c - 1]
        return M

    def P_interior(self, k: int) -> np.ndarray:
        """Projection onto grades ``<= k``."""
        return np.diag((self.grades <= k).astype(float))


def orbit_rep(sys: FiniteMultiSystem, x: int, depth: int) -> FockRep:
    return FockRep(sys, depth, (sys.check_point(x),), FockBasis(sys.n, depth))


def full_fock_rep(sys: FiniteMultiSystem, depth: int) -> FockRep:
    return FockRep(sys, depth, tuple(range(sys.m)), FockBasis(sys.n, depth))


def represent(rep: FockRep, a: Polynomial) -> np.ndarray:
    """``sum_w L_w pi(f_w)``, summed in sorted word order."""
    M = np.zeros((rep.dim, rep.dim), dtype=complex)
    for w in sorted(a.terms):
        if len(w) > rep.depth:
            continue  # L_w vanishes identically
        M += rep.word_op(w) @ rep.pi(a.terms[w])
    return M


def _is_monomial_matrix(M: np.ndarray) -> bool:
    nz = M != 0
    return bool(nz.sum(axis=0).max(initial=0) <= 1 and nz.sum(axis=1).max(initial=0) <= 1)


def matrix_norm(M: np.ndarray, tol: float = 1e-12) -> float:
    """Largest singular value.

    A matrix with at most one nonzero per row and column has the moduli of its
    entries as singular values, so that case is read off directly and is exact.
    """
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    if _is_monomial_matrix(M):
        return float(np.abs(M).max())
    D = max(M.shape)
    if D <= DENSE_LIMIT:
        return float(np.linalg.svd(M, compute_uv=False)[0])
    return _power_norm(M, tol, 10 * D)


def _power_norm(M, tol, max_iter):
    rng = np.random.default_rng(0)
    v = rng.normal(size=M.shape[1]) + 1j * rng.normal(size=M.shape[1])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = M.conj().T @ (M @ v)
        new = float(np.linalg.norm(w))
        if new == 0.0:
            return 0.0
        v = w / new
        if abs(new - lam) <= tol * new:
            lam = new
            break
        lam = new
    return float(np.sqrt(lam))


def norm_estimate(sys: FiniteMultiSystem, a: Polynomial, depth: int) -> float:
    """Norm of ``a`` in the depth-``depth`` full Fock representation (a lower bound for the universal norm)."""
    return matrix_norm(represent(full_fock_rep(sys, depth), a))


def norm_sequence(sys: FiniteMultiSystem, a: Polynomial, depths) -> list:
    return [norm_estimate(sys, a, d) for d in depths]


def gauge_unitary(rep: FockRep, z: complex) -> np.ndarray:
    return np.diag(z ** rep.grades)


def gauge_projection(rep: FockRep, M: np.ndarray, k: int) -> np.ndarray:
    """Grade-``k`` part of ``M`` by averaging the gauge action over ``r = 2 depth + 1`` roots of unity."""
    r = 2 * rep.depth + 1
    out = np.zeros_like(M, dtype=complex)
    for j in range(r):
        z = np.exp(2j * np.pi * j / r)
        u = z ** rep.grades
        out += z ** (-k) * (u[:, None] * M * u.conj()[None, :])
    return out / r


def phi(a: Polynomial, k: int) -> Polynomial:
    """Terms whose word has length ``k``."""
    return Polynomial(a.m, {w: f for w, f in a.terms.items() if len(w) == k})


def psi(a: Polynomial, counts) -> Polynomial:
    """Terms whose word has letter counts ``counts`` (``counts[i-1]`` copies of letter ``i``)."""
    counts = tuple(int(c) for c in counts)

    def abel(w):
        return tuple(w.count(i) for i in range(1, len(counts) + 1))

    return Polynomial(a.m, {w: f for w, f in a.terms.items() if abel(w) == counts and max(w, default=0) <= len(counts)})


def fourier_coefficient(a: Polynomial, w) -> np.ndarray:
    return a.coefficient(w)


def cesaro(a: Polynomial, k: int) -> Polynomial:
    """``sum_{i<k} (1 - i/k) Phi_i(a)``."""
    if k < 1:
        raise InputError(f"Cesaro index must be >= 1, got {k}")
    return Polynomial(a.m, {w: (1.0 - len(w) / k) * f for w, f in a.terms.items() if len(w) < k})


@dataclass
class CesaroReport:
    error: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.error <= self.bound * (1 + 1e-12) + 1e-14


def cesaro_report(sys: FiniteMultiSystem, a: Polynomial, k: int, depth: int) -> CesaroReport:
    """Actual error ``||Sigma_k(a) - a||`` against ``(deg a / k) sum_i ||Phi_i(a)||``."""
    err = norm_estimate(sys, cesaro(a, k) - a, depth)
    bound = a.degree / k * sum(norm_estimate(sys, phi(a, i), depth) for i in range(a.degree + 1))
    return CesaroReport(err, bound)


def factor_tail(a: Polynomial, k: int) -> dict:
    """``{w: a_w}`` over ``|w| = k`` with ``a = sum_w s_w a_w``; needs ``E_v(a) = 0`` for ``|v| < k``."""
    for v in sorted(a.terms):
        if len(v) < k:
            raise InputError(f"coefficient E_{list(v)} is nonzero but |v| < {k}")
    parts = {}
    for u, f in a.terms.items():
        parts.setdefault(u[:k], {})[u[k:]] = f
    return {w: Polynomial(a.m, t) for w, t in sorted(parts.items())}


def factor_tail_norms(sys: FiniteMultiSystem, a: Polynomial, k: int, depth: int) -> tuple:
    """``(||a||, ||sum_w a_w^* a_w||^{1/2})`` in the full Fock representation.

    In the truncated picture the tail pieces act on the grades a prefix of
    length ``k`` can still be prepended to, so they are represented at depth
    ``depth - k``; with that choice the identity is exact.
    """
    if depth < k:
        raise InputError(f"depth {depth} is below the prefix length {k}")
    lhs = norm_estimate(sys, a, depth)
    small = full_fock_rep(sys, depth - k)
    G = np.zeros((small.dim, small.dim), dtype=complex)
    for aw in factor_tail(a, k).values():
        R = represent(small, aw)
        G += R.conj().T @ R
    return lhs, float(np.sqrt(max(matrix_norm(G), 0.0)))

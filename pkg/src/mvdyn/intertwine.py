"""Intertwining generators that realise a piecewise conjugacy in a Fock representation.

A unitary field ``v`` on the points of ``(X, sigma)`` with ``v_ij(x) != 0``
only where ``tau_i(x) = sigma_j(x)`` turns the creation operators of
``sigma`` into ``T_i = sum_j L_j pi(v_ij)``, which are covariant for ``tau``
and form a row isometry on the interior.  Here ``tau`` is a system on the
same points; for a witness with bijection ``gamma`` it is ``tau`` pulled back
along ``gamma``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conjugacy import PCWitness, pullback_system, validate_pc_witness
from .core import FiniteMultiSystem, InputError
from .fock import FockRep, matrix_norm

TOL = 1e-12


@dataclass
class UnitaryField:
    v: np.ndarray                        # shape (m, n, n)
    tau: FiniteMultiSystem | None = None

    def __post_init__(self):
        self.v = np.asarray(self.v, dtype=complex)
        if self.v.ndim != 3 or self.v.shape[1] != self.v.shape[2]:
            raise InputError(f"field must have shape (m, n, n), got {self.v.shape}")

    def entry(self, i: int, j: int) -> np.ndarray:
        """The function ``x -> v(x)_{ij}`` for 1-based ``i, j``."""
        return self.v[:, i - 1, j - 1]


def field_problems(sigma: FiniteMultiSystem, field: UnitaryField, tau: FiniteMultiSystem) -> list:
    """Human-readable breaches of unitarity or germ support; empty when the field is valid."""
    out = []
    m, n = sigma.m, sigma.n
    if field.v.shape != (m, n, n) or tau.m != m or tau.n != n:
        return [f"field shape {field.v.shape} does not fit m={m}, n={n}"]
    eye = np.eye(n)
    for x in range(m):
        u = field.v[x]
        if np.abs(u.conj().T @ u - eye).max() > TOL:
            out.append(f"v({x}) is not unitary")
        for i in range(n):
            for j in range(n):
                if abs(u[i, j]) > TOL and tau.maps[i][x] != sigma.maps[j][x]:
                    out.append(f"v({x})[{i + 1},{j + 1}] != 0 but tau_{i + 1}({x}) != sigma_{j + 1}({x})")
    return out


def field_from_assignment(sigma: FiniteMultiSystem, tau: FiniteMultiSystem, w: PCWitness) -> UnitaryField:
    """Permutation field ``v(x)_{i, alpha_x(i)} = 1``, carrying ``tau`` pulled back along ``gamma``."""
    if not validate_pc_witness(sigma, tau, w):
        raise InputError("witness does not validate")
    v = np.zeros((sigma.m, sigma.n, sigma.n))
    for x, a in enumerate(w.alpha):
        for i, ai in enumerate(a):
            v[x, i, ai - 1] = 1.0
    return UnitaryField(v, pullback_system(tau, w.gamma))


@dataclass
class IntertwinerReport:
    T: list
    covariance: float
    row_isometry: float
    recovery: float

    def passes(self, tol: float = 1e-10) -> bool:
        return max(self.covariance, self.row_isometry, self.recovery) < tol


def intertwiners(sigma: FiniteMultiSystem, field: UnitaryField, rep: FockRep, tau=None, n_checks: int = 5, seed: int = 0) -> IntertwinerReport:
    """``T_i = sum_j L_j pi(v_ij)`` with residuals for ``tau``-covariance, row isometry and generator recovery."""
    tau = field.tau if tau is None else tau
    if tau is None:
        raise InputError("intertwiners need the target system on the same points")
    problems = field_problems(sigma, field, tau)
    if problems:
        raise InputError("; ".join(problems))
    n = sigma.n
    T = [sum(rep.L[j - 1] @ rep.pi(field.entry(i, j)) for j in range(1, n + 1)) for i in range(1, n + 1)]

    rng = np.random.default_rng(seed)
    cov = 0.0
    for _ in range(n_checks):
        f = rng.normal(size=sigma.m) + 1j * rng.normal(size=sigma.m)
        for i in range(n):
            cov = max(cov, matrix_norm(rep.pi(f) @ T[i] - T[i] @ rep.pi(f[list(tau.maps[i])])))

    P = rep.grades < rep.depth
    row = 0.0
    for k in range(n):
        for i in range(n):
            G = (T[k].conj().T @ T[i])[:, P] - (k == i) * np.eye(rep.dim)[:, P]
            row = max(row, matrix_norm(G))

    rec = 0.0
    for k in range(1, n + 1):
        S = sum(T[i - 1] @ rep.pi(field.entry(i, k).conj()) for i in range(1, n + 1))
        rec = max(rec, float(np.abs(S - rep.L[k - 1]).max()))
    return IntertwinerReport(T, cov, row, rec)


def inverse_witness(w: PCWitness) -> PCWitness:
    """Witness for the reverse direction: ``gamma^{-1}`` with ``alpha'_{gamma x} = alpha_x^{-1}``."""
    m = len(w.gamma)
    ginv = [0] * m
    alpha = [None] * m
    for x, g in enumerate(w.gamma):
        ginv[g] = x
        a = w.alpha[x]
        inv = [0] * len(a)
        for i, ai in enumerate(a):
            inv[ai - 1] = i + 1
        alpha[g] = tuple(inv)
    return PCWitness(tuple(ginv), tuple(alpha))


def round_trip(sigma: FiniteMultiSystem, tau: FiniteMultiSystem, w: PCWitness, rep: FockRep):
    """Compose the forward generators with the reverse field; returns ``(composites, residual)``.

    The reverse field lives on the points of ``tau``; it is moved to the
    points of ``sigma`` along ``gamma`` before being applied.
    """
    fwd = intertwiners(sigma, field_from_assignment(sigma, tau, w), rep)
    back = field_from_assignment(tau, sigma, inverse_witness(w))
    vb = back.v[list(w.gamma)]           # v'(gamma x)
    n = sigma.n
    comp = [sum(fwd.T[j] @ rep.pi(vb[:, k, j]) for j in range(n)) for k in range(n)]
    P = rep.grades < rep.depth
    res = max(float(np.abs((c - L)[:, P]).max()) for c, L in zip(comp, rep.L))
    return comp, res


# ---- two maps: the rotation field ------------------------------------------

_SC = {0: (0.0, 1.0), 2: (1.0, 0.0), 1: (np.sqrt(0.5), np.sqrt(0.5))}  # h in units of pi/4 -> (sin, cos)


def rotation_field(sigma: FiniteMultiSystem, X1, X2) -> UnitaryField:
    """``v = [[sin h, cos h], [cos h, -sin h]]`` with ``h = 0`` on ``X1``, ``pi/2`` on ``X2``, ``pi/4`` elsewhere.

    The target system swaps the two maps on ``X1`` and keeps them elsewhere;
    off ``X1 u X2`` every entry of ``v`` is nonzero, so the maps must agree there.
    """
    if sigma.n != 2:
        raise InputError("the rotation field needs exactly two maps")
    X1, X2 = {sigma.check_point(x) for x in X1}, {sigma.check_point(x) for x in X2}
    if X1 & X2:
        raise InputError(f"X1 and X2 overlap at {sorted(X1 & X2)}")
    s1, s2 = sigma.maps
    for x in range(sigma.m):
        if x not in X1 | X2 and s1[x] != s2[x]:
            raise InputError(f"point {x} lies outside X1 and X2 but sigma_1({x}) != sigma_2({x})")
    v = np.zeros((sigma.m, 2, 2))
    for x in range(sigma.m):
        s, c = _SC[0 if x in X1 else 2 if x in X2 else 1]
        v[x] = [[s, c], [c, -s]]
    t1 = tuple(s2[x] if x in X1 else s1[x] for x in range(sigma.m))
    t2 = tuple(s1[x] if x in X1 else s2[x] for x in range(sigma.m))
    return UnitaryField(v, FiniteMultiSystem((t1, t2)))


def rotation_intertwiner_n2(sigma: FiniteMultiSystem, X1, X2, rep: FockRep) -> IntertwinerReport:
    return intertwiners(sigma, rotation_field(sigma, X1, X2), rep)


def rotation_sets(sigma: FiniteMultiSystem, tau: FiniteMultiSystem) -> tuple:
    """Split the points for two systems that agree up to swapping the maps pointwise.

    ``X1`` holds the points where ``tau`` is the swap of ``sigma`` and
    ``sigma_1 != sigma_2``; ``X2`` those where they agree and ``sigma_1 != sigma_2``.
    """
    if sigma.n != 2 or tau.n != 2 or sigma.m != tau.m:
        raise InputError("need two systems with two maps on the same points")
    X1, X2 = set(), set()
    (s1, s2), (t1, t2) = sigma.maps, tau.maps
    for x in range(sigma.m):
        if s1[x] == s2[x]:
            if (t1[x], t2[x]) != (s1[x], s2[x]):
                raise InputError(f"no rotation relates the systems at point {x}")
        elif (t1[x], t2[x]) == (s2[x], s1[x]):
            X1.add(x)
        elif (t1[x], t2[x]) == (s1[x], s2[x]):
            X2.add(x)
        else:
            raise InputError(f"no rotation relates the systems at point {x}")
    return X1, X2

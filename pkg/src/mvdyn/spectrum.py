"""Characters of the covariance algebra and 2x2 nest representations.

A character sits over a point ``x`` and a vector ``z`` supported on
``I_x = {i : sigma_i(x) = x}``; it sends ``s_w f`` to ``f(x) z^w``.  Words
that use a letter outside ``I_x`` therefore evaluate to zero.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FiniteMultiSystem, InputError, Polynomial, structure_summary

MODELS = ("tensor", "semicrossed")


@dataclass(frozen=True)
class Character:
    x: int
    z: tuple
    model: str = "tensor"


def fixed_indices(sys: FiniteMultiSystem, x: int) -> list:
    x = sys.check_point(x)
    return [i for i in range(1, sys.n + 1) if sys.maps[i - 1][x] == x]


def make_character(sys: FiniteMultiSystem, x: int, z, model: str = "tensor") -> Character:
    chi = Character(sys.check_point(x), tuple(complex(v) for v in z), model)
    check_character(sys, chi)
    return chi


def check_character(sys: FiniteMultiSystem, chi: Character):
    if chi.model not in MODELS:
        raise InputError(f"unknown model {chi.model!r}")
    z = np.asarray(chi.z, dtype=complex)
    if z.shape != (sys.n,):
        raise InputError(f"z has {z.size} entries, expected {sys.n}")
    I = set(fixed_indices(sys, chi.x))
    off = [i for i in range(1, sys.n + 1) if i not in I and z[i - 1] != 0]
    if off:
        raise InputError(f"z_{off[0]} must vanish: sigma_{off[0]} does not fix {chi.x}")
    size = np.linalg.norm(z) if chi.model == "tensor" else np.abs(z).max(initial=0.0)
    if size > 1 + 1e-12:
        raise InputError(f"z lies outside the unit {'ball' if chi.model == 'tensor' else 'polydisc'}")


def eval_character(sys: FiniteMultiSystem, a: Polynomial, chi: Character) -> complex:
    check_character(sys, chi)
    z = np.asarray(chi.z, dtype=complex)
    total = 0j
    for w in sorted(a.terms):
        total += a.terms[w][chi.x] * np.prod(z[[c - 1 for c in w]])  # empty product is 1
    return complex(total)


def random_character(sys: FiniteMultiSystem, rng: np.random.Generator, x: int | None = None, model: str = "tensor"):
    x = int(rng.integers(sys.m)) if x is None else x
    z = np.zeros(sys.n, dtype=complex)
    I = fixed_indices(sys, x)
    if I:
        v = rng.normal(size=len(I)) + 1j * rng.normal(size=len(I))
        r = rng.uniform(0, 1)
        v *= r / (np.linalg.norm(v) if model == "tensor" else np.abs(v).max())
        z[[i - 1 for i in I]] = v
    return make_character(sys, x, z, model)


def character_fiber(sys: FiniteMultiSystem, x: int, model: str = "tensor") -> dict:
    """The fixed-index set over ``x`` and the shape of the fiber of characters there."""
    if model not in MODELS:
        raise InputError(f"unknown model {model!r}")
    I = fixed_indices(sys, x)
    k = len(I)
    if k == 0:
        shape = "point"
    else:
        shape = f"{k}-ball" if model == "tensor" else f"{k}-polydisc"
    return {"I_x": I, "dimension": k, "model": model, "descriptor": shape}


def fiber_dimensions(sys: FiniteMultiSystem) -> list:
    return [len(s) for s in structure_summary(sys).fixed_indices]


@dataclass
class NestRep2:
    """``a -> [[f_0(y), sum_j f_j(x) z_j], [0, f_0(x)]]`` with ``y = sigma_i(x)``, optionally conjugated by ``B``."""

    sys: FiniteMultiSystem
    x: int
    i: int
    z: np.ndarray
    B: np.ndarray | None = None

    @property
    def y(self) -> int:
        return self.sys.maps[self.i - 1][self.x]

    def raw(self, a: Polynomial) -> np.ndarray:
        x, y = self.x, self.y
        top = sum((a.terms[(j,)][x] * self.z[j - 1] for j in range(1, self.sys.n + 1) if (j,) in a.terms), 0j)
        f0 = a.coefficient(())
        return np.array([[f0[y], top], [0.0, f0[x]]], dtype=complex)

    def __call__(self, a: Polynomial) -> np.ndarray:
        M = self.raw(a)
        if self.B is None:
            return M
        return self.B @ M @ np.linalg.inv(self.B)

    def conjugated(self, B) -> "NestRep2":
        B = np.asarray(B, dtype=complex)
        return NestRep2(self.sys, self.x, self.i, self.z, B if self.B is None else B @ self.B)


def nest_rep(sys: FiniteMultiSystem, x: int, i: int, z, model: str = "tensor") -> NestRep2:
    """2x2 representation through the image point ``sigma_i(x)``.

    A scalar ``z`` is placed on letter ``i``.  A vector ``z`` may only use
    letters ``j`` with ``sigma_j(x) = sigma_i(x)``; any other letter would break
    covariance.
    """
    x = sys.check_point(x)
    if not 1 <= i <= sys.n:
        raise InputError(f"map index {i} outside 1..{sys.n}")
    if np.ndim(z) == 0:
        zz = np.zeros(sys.n, dtype=complex)
        zz[i - 1] = z
    else:
        zz = np.asarray(z, dtype=complex)
        if zz.shape != (sys.n,):
            raise InputError(f"z has {zz.size} entries, expected {sys.n}")
    y = sys.maps[i - 1][x]
    for j in range(1, sys.n + 1):
        if zz[j - 1] != 0 and sys.maps[j - 1][x] != y:
            raise InputError(f"z_{j} must vanish: sigma_{j}({x}) differs from sigma_{i}({x})")
    size = np.linalg.norm(zz) if model == "tensor" else np.abs(zz).max()
    if size > 1 + 1e-12:
        raise InputError("z exceeds the contractive bound")
    return NestRep2(sys, x, i, zz)


@dataclass
class NestDiagonalization:
    applicable: bool
    A: np.ndarray


def diagonalize_nest(rho: NestRep2, f) -> NestDiagonalization:
    """Upper triangular ``A = [[1, F], [0, 1]]`` making ``A rho(g) A^{-1}`` diagonal on functions.

    ``F`` is the corner of ``rho(f)`` for a function ``f`` with ``f(y) = 1`` and
    ``f(x) = 0``.  When ``y = x`` the representation is already scalar on
    functions and nothing is done.
    """
    if rho.x == rho.y:
        return NestDiagonalization(False, np.eye(2, dtype=complex))
    f = np.asarray(f, dtype=complex)
    if f[rho.y] != 1 or f[rho.x] != 0:
        raise InputError(f"f must be 1 at {rho.y} and 0 at {rho.x}")
    F = rho(Polynomial.monomial(rho.sys.m, (), f))[0, 1]
    return NestDiagonalization(True, np.array([[1.0, F], [0.0, 1.0]], dtype=complex))

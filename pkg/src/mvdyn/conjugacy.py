"""Piecewise and strict conjugacy of finite systems, with witnesses.

On a discrete space the open cover of a piecewise conjugacy can be taken to
be the level sets of a point-dependent permutation, so (X, sigma) and
(Y, tau) are piecewise conjugate exactly when some bijection ``gamma``
matches the multisets ``{gamma sigma_i(x)}`` and ``{tau_i gamma(x)}`` at
every point, i.e. when the unlabeled multigraphs are isomorphic.

Permutations are tuples ``alpha`` of 1-based images: ``alpha[i-1] = alpha(i)``.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .core import FiniteMultiSystem, InputError


@dataclass(frozen=True)
class PCWitness:
    gamma: tuple           # gamma[x] = image of x in Y
    alpha: tuple           # alpha[x] = permutation used at x

    def as_dict(self, A: FiniteMultiSystem, B: FiniteMultiSystem):
        return {
            "gamma": {A.labels[x]: B.labels[g] for x, g in enumerate(self.gamma)},
            "alpha": {A.labels[x]: perm_to_cycles(a) for x, a in enumerate(self.alpha)},
        }


@dataclass(frozen=True)
class ConjugacyWitness:
    gamma: tuple
    alpha: tuple

    def as_dict(self, A, B):
        return {
            "gamma": {A.labels[x]: B.labels[g] for x, g in enumerate(self.gamma)},
            "alpha": perm_to_cycles(self.alpha),
        }


def perm_to_cycles(alpha) -> str:
    """Cycle notation with fixed points omitted; the identity is ``"e"``."""
    n = len(alpha)
    seen, parts = set(), []
    for start in range(1, n + 1):
        if start in seen or alpha[start - 1] == start:
            seen.add(start)
            continue
        cyc, k = [], start
        while k not in seen:
            seen.add(k)
            cyc.append(k)
            k = alpha[k - 1]
        parts.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(parts) or "e"


def parse_cycles(text: str, n: int) -> tuple:
    """Parse ``"(1 2)(3)"`` or ``"e"`` into an image tuple of length ``n``."""
    text = text.strip()
    alpha = list(range(1, n + 1))
    if text in ("e", "id", ""):
        return tuple(alpha)
    seen = set()
    body = text.replace(" ", ",")
    pos = 0
    while pos < len(body):
        if body[pos] != "(":
            raise InputError(f"bad cycle notation: {text!r}")
        end = body.find(")", pos)
        if end < 0:
            raise InputError(f"bad cycle notation: {text!r}")
        items = [s for s in body[pos + 1:end].split(",") if s]
        try:
            cyc = [int(s) for s in items]
        except ValueError:
            raise InputError(f"bad cycle notation: {text!r}") from None
        for a in cyc:
            if not 1 <= a <= n or a in seen:
                raise InputError(f"bad cycle notation: {text!r}")
            seen.add(a)
        for k, a in enumerate(cyc):
            alpha[a - 1] = cyc[(k + 1) % len(cyc)]
        pos = end + 1
    return tuple(alpha)


def forgetful_multigraph(sys: FiniteMultiSystem) -> np.ndarray:
    """``c[x][y] = #{i : sigma_i(x) = y}``."""
    c = np.zeros((sys.m, sys.m), dtype=int)
    for row in sys.maps:
        for x, y in enumerate(row):
            c[x, y] += 1
    return c


def _profiles(c: np.ndarray):
    out = [tuple(sorted(r)) for r in c]
    inn = [tuple(sorted(col)) for col in c.T]
    return [(out[x], inn[x], int(c[x, x])) for x in range(len(c))]


def multigraph_isomorphism(cA: np.ndarray, cB: np.ndarray):
    """Lexicographically least vertex bijection ``g`` with ``cA[x,y] == cB[g[x],g[y]]``."""
    m = len(cA)
    if len(cB) != m:
        return None
    pA, pB = _profiles(cA), _profiles(cB)
    if Counter(pA) != Counter(pB):
        return None
    candidates = [[y for y in range(m) if pB[y] == pA[x]] for x in range(m)]
    gamma = [-1] * m
    used = [False] * m

    def extend(x):
        if x == m:
            return True
        for y in candidates[x]:
            if used[y]:
                continue
            ok = all(
                cA[x, z] == cB[y, gamma[z]] and cA[z, x] == cB[gamma[z], y] for z in range(x)
            ) and cA[x, x] == cB[y, y]
            if not ok:
                continue
            gamma[x], used[y] = y, True
            if extend(x + 1):
                return True
            gamma[x], used[y] = -1, False
        return False

    return tuple(gamma) if extend(0) else None


def local_permutation(A: FiniteMultiSystem, B: FiniteMultiSystem, gamma, x: int):
    """Least ``alpha`` with ``tau_i(gamma x) = gamma(sigma_{alpha(i)}(x))`` for all ``i``, or ``None``.

    Greedy matching of equal images is exact: images with equal values are
    interchangeable, so taking the least free index at each step gives the
    lexicographically least assignment.
    """
    n = A.n
    images = [gamma[A.maps[j][x]] for j in range(n)]
    free = [True] * n
    alpha = []
    gx = gamma[x]
    for i in range(n):
        target = B.maps[i][gx]
        for j in range(n):
            if free[j] and images[j] == target:
                free[j] = False
                alpha.append(j + 1)
                break
        else:
            return None
    return tuple(alpha)


def validate_pc_witness(A: FiniteMultiSystem, B: FiniteMultiSystem, w: PCWitness) -> bool:
    if A.m != B.m or A.n != B.n or sorted(w.gamma) != list(range(A.m)):
        return False
    for x in range(A.m):
        a = w.alpha[x]
        if sorted(a) != list(range(1, A.n + 1)):
            return False
        for i in range(A.n):
            if B.maps[i][w.gamma[x]] != w.gamma[A.maps[a[i] - 1][x]]:
                return False
    return True


def are_piecewise_conjugate(A: FiniteMultiSystem, B: FiniteMultiSystem):
    """A :class:`PCWitness` or ``None``.  Returns ``None`` for differing ``m`` or ``n``."""
    if A.m != B.m or A.n != B.n:
        return None
    gamma = multigraph_isomorphism(forgetful_multigraph(A), forgetful_multigraph(B))
    if gamma is None:
        return None
    alpha = tuple(local_permutation(A, B, gamma, x) for x in range(A.m))
    w = PCWitness(gamma, alpha)
    assert validate_pc_witness(A, B, w)
    return w


def _conjugating_bijection(A, B, alpha):
    """Least ``gamma`` with ``tau_i gamma = gamma sigma_{alpha(i)}`` for all ``i``."""
    m, n = A.m, A.n
    gamma = [-1] * m
    used = [False] * m

    def consistent():
        for x in range(m):
            if gamma[x] < 0:
                continue
            for i in range(n):
                y = A.maps[alpha[i] - 1][x]
                if gamma[y] >= 0 and B.maps[i][gamma[x]] != gamma[y]:
                    return False
        return True

    def extend(x):
        if x == m:
            return True
        for y in range(m):
            if used[y]:
                continue
            gamma[x], used[y] = y, True
            if consistent() and extend(x + 1):
                return True
            gamma[x], used[y] = -1, False
        return False

    return tuple(gamma) if extend(0) else None


def validate_conjugacy(A, B, w: ConjugacyWitness) -> bool:
    return A.m == B.m and A.n == B.n and all(
        B.maps[i][w.gamma[x]] == w.gamma[A.maps[w.alpha[i] - 1][x]]
        for x in range(A.m)
        for i in range(A.n)
    )


def are_conjugate(A: FiniteMultiSystem, B: FiniteMultiSystem):
    """Least ``(gamma, alpha)`` realising a global conjugacy, or ``None``."""
    if A.m != B.m or A.n != B.n:
        return None
    best = None
    for alpha in permutations(range(1, A.n + 1)):
        gamma = _conjugating_bijection(A, B, alpha)
        if gamma is not None and (best is None or (gamma, alpha) < best):
            best = (gamma, alpha)
    if best is None:
        return None
    w = ConjugacyWitness(*best)
    assert validate_conjugacy(A, B, w)
    return w


def pullback_system(B: FiniteMultiSystem, gamma) -> FiniteMultiSystem:
    """The system ``gamma^{-1} tau_i gamma`` on the points of the domain of ``gamma``."""
    inv = [0] * len(gamma)
    for x, g in enumerate(gamma):
        inv[g] = x
    maps = tuple(tuple(inv[row[gamma[x]]] for x in range(len(gamma))) for row in B.maps)
    return FiniteMultiSystem(maps)


def brute_force_piecewise(A: FiniteMultiSystem, B: FiniteMultiSystem) -> bool:
    """Exhaustive oracle over all bijections and all per-point permutations."""
    if A.m != B.m or A.n != B.n:
        return False
    perms = list(permutations(range(1, A.n + 1)))
    for gamma in permutations(range(A.m)):
        if all(
            any(
                all(B.maps[i][gamma[x]] == gamma[A.maps[a[i] - 1][x]] for i in range(A.n))
                for a in perms
            )
            for x in range(A.m)
        ):
            return True
    return False

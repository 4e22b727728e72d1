"""Unitaries indexed by the permutation simplex.

A permutation ``alpha`` is a tuple of 1-based images.  Its matrix sends
``e_j`` to ``e_{alpha(j)}``, so ``U_alpha U_beta = U_{alpha o beta}``.
Each ``U_alpha`` has a Hermitian logarithm ``A_alpha`` built cycle by cycle,
and edges of the simplex are joined by ``U_alpha exp(i t A_{alpha^{-1} beta})``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .core import InputError


def perm_matrix(alpha) -> np.ndarray:
    n = len(alpha)
    U = np.zeros((n, n))
    for j, a in enumerate(alpha):
        U[a - 1, j] = 1.0
    return U


def check_perm(alpha) -> tuple:
    alpha = tuple(int(a) for a in alpha)
    if sorted(alpha) != list(range(1, len(alpha) + 1)):
        raise InputError(f"not a permutation: {alpha}")
    return alpha


def compose(alpha, beta) -> tuple:
    """``alpha o beta``."""
    return tuple(alpha[b - 1] for b in beta)


def inverse(alpha) -> tuple:
    out = [0] * len(alpha)
    for j, a in enumerate(alpha):
        out[a - 1] = j + 1
    return tuple(out)


def cycles(alpha) -> list:
    """Cycles ``(c, alpha(c), ...)`` ordered by least element; fixed points included."""
    seen, out = set(), []
    for start in range(1, len(alpha) + 1):
        if start in seen:
            continue
        cyc, k = [], start
        while k not in seen:
            seen.add(k)
            cyc.append(k)
            k = alpha[k - 1]
        out.append(cyc)
    return out


def parity(alpha) -> int:
    """0 for even, 1 for odd."""
    return sum(len(c) - 1 for c in cycles(alpha)) % 2


def canonical_key(alpha) -> tuple:
    """Even permutations first, then lexicographic in the image tuple."""
    return (parity(alpha), tuple(alpha))


@dataclass(frozen=True)
class PermLog:
    alpha: tuple
    U: np.ndarray
    A: np.ndarray


def perm_log(alpha) -> PermLog:
    """Hermitian ``A`` with ``exp(iA) = U_alpha``, spectrum in ``[-pi, pi]``.

    On a cycle ``(c_0 ... c_{l-1})`` the vectors
    ``v_j = sum_k w^{-jk} e_{c_k} / sqrt(l)`` (``w = e^{2 pi i / l}``) have
    eigenvalue ``w^j``; arguments go to ``(-pi, pi]``.  The eigenvalue ``-1`` of
    each even cycle gets ``+pi, -pi, +pi, ...`` in cycle order, which puts the
    trace at ``pi`` for odd permutations and ``0`` for even ones.
    """
    alpha = check_perm(alpha)
    n = len(alpha)
    A = np.zeros((n, n), dtype=complex)
    sign = 1.0
    for cyc in cycles(alpha):
        l = len(cyc)
        idx = np.array(cyc) - 1
        k = np.arange(l)
        for j in range(1, l):
            theta = 2 * np.pi * j / l
            if 2 * j == l:
                theta, sign = sign * np.pi, -sign
            elif 2 * j > l:
                theta -= 2 * np.pi
            v = np.exp(-2j * np.pi * j * k / l) / np.sqrt(l)
            A[np.ix_(idx, idx)] += theta * np.outer(v, v.conj())
    A = (A + A.conj().T) / 2
    return PermLog(alpha, perm_matrix(alpha), A)


def expi(A: np.ndarray, t: float = 1.0) -> np.ndarray:
    """``exp(i t A)`` for Hermitian ``A`` via its eigendecomposition."""
    w, V = np.linalg.eigh(A)
    return (V * np.exp(1j * t * w)) @ V.conj().T


def skeleton_path(alpha, beta, t: float) -> np.ndarray:
    """Unitary on the edge from ``alpha`` to ``beta``, oriented by the canonical order.

    The endpoints are returned as the exact permutation matrices.
    """
    alpha, beta = check_perm(alpha), check_perm(beta)
    if canonical_key(alpha) > canonical_key(beta):
        return skeleton_path(beta, alpha, 1.0 - t)
    if t == 0:
        return perm_matrix(alpha).astype(complex)
    if t == 1:
        return perm_matrix(beta).astype(complex)
    return perm_matrix(alpha) @ expi(perm_log(compose(inverse(alpha), beta)).A, t)


@dataclass(frozen=True)
class BlockPartitionPair:
    A: tuple
    B: tuple

    @property
    def n(self) -> int:
        return sum(len(a) for a in self.A)


def block_pair(A_blocks, B_blocks, n: int | None = None) -> BlockPartitionPair:
    """Validated pair; with ``n`` given, the uncovered points form one final block on each side."""
    A = [frozenset(int(v) for v in a) for a in A_blocks]
    B = [frozenset(int(v) for v in b) for b in B_blocks]
    if len(A) != len(B):
        raise InputError("partitions need the same number of blocks")
    if n is not None:
        restA = frozenset(range(1, n + 1)) - frozenset().union(*A)
        restB = frozenset(range(1, n + 1)) - frozenset().union(*B)
        if restA or restB:
            A.append(restA)
            B.append(restB)
    for side in (A, B):
        pts = sorted(v for blk in side for v in blk)
        if pts != list(range(1, len(pts) + 1)) or any(not blk for blk in side):
            raise InputError(f"not a partition of 1..{len(pts)}: {[sorted(b) for b in side]}")
    if sum(len(a) for a in A) != sum(len(b) for b in B):
        raise InputError("partitions cover different ranges")
    for a, b in zip(A, B):
        if len(a) != len(b):
            raise InputError(f"block sizes differ: {sorted(a)} vs {sorted(b)}")
    return BlockPartitionPair(tuple(A), tuple(B))


def parse_partition(text: str, n: int) -> BlockPartitionPair:
    """``"1,2>2,3;3>1"``: blocks ``A_s > B_s`` separated by ``;``."""
    A, B = [], []
    for part in filter(None, (p.strip() for p in text.split(";"))):
        if ">" not in part:
            raise InputError(f"bad block {part!r}; expected 'a,b>c,d'")
        left, right = part.split(">", 1)
        try:
            A.append([int(v) for v in left.split(",") if v.strip()])
            B.append([int(v) for v in right.split(",") if v.strip()])
        except ValueError:
            raise InputError(f"bad block {part!r}") from None
    return block_pair(A, B, n)


def permutations_respecting(pp: BlockPartitionPair) -> list:
    """All ``alpha`` with ``alpha(A_s) = B_s``, in canonical order."""
    out = [
        a for a in permutations(range(1, pp.n + 1))
        if all(frozenset(a[j - 1] for j in blk) == b for blk, b in zip(pp.A, pp.B))
    ]
    return sorted(out, key=canonical_key)


def block_mask(pp: BlockPartitionPair) -> np.ndarray:
    """True on ``B_s x A_s``."""
    M = np.zeros((pp.n, pp.n), dtype=bool)
    for a, b in zip(pp.A, pp.B):
        M[np.ix_([v - 1 for v in sorted(b)], [v - 1 for v in sorted(a)])] = True
    return M


def block_residual(U, pp: BlockPartitionPair) -> float:
    """Largest modulus outside the block mask."""
    U = np.asarray(U)
    if U.shape != (pp.n, pp.n):
        raise InputError(f"matrix shape {U.shape} does not match n={pp.n}")
    return float(np.abs(U[~block_mask(pp)]).max(initial=0.0))


def check_block_condition(U, pp: BlockPartitionPair) -> bool:
    return block_residual(U, pp) < 1e-12


def barycentric_exp(weights: dict) -> np.ndarray:
    """``exp(i sum_alpha t_alpha A_alpha)``; a single vertex gives its exact permutation matrix."""
    items = [(check_perm(a), float(t)) for a, t in weights.items() if float(t) != 0.0]
    if not items or any(t < 0 for _, t in items) or abs(sum(t for _, t in items) - 1) > 1e-12:
        raise InputError("weights must be nonnegative and sum to 1")
    if len({len(a) for a, _ in items}) != 1:
        raise InputError("permutations of different sizes")
    if len(items) == 1:
        return perm_matrix(items[0][0]).astype(complex)
    return expi(sum(t * perm_log(a).A for a, t in items))


def partition_pairs(n: int) -> list:
    """Every block pair on ``1..n`` up to reordering of blocks."""
    def set_partitions(items):
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        for part in set_partitions(rest):
            yield [[first]] + part
            for k in range(len(part)):
                yield part[:k] + [[first] + part[k]] + part[k + 1:]

    out = []
    parts = [sorted(map(sorted, p)) for p in set_partitions(list(range(1, n + 1)))]
    for A in parts:
        for B in parts:
            for order in permutations(range(len(B))):
                Bo = [B[k] for k in order]
                if len(Bo) == len(A) and all(len(a) == len(b) for a, b in zip(A, Bo)):
                    out.append(block_pair(A, Bo))
    return out


def barycentric_counterexample(n: int = 3, samples: int = 200, seed: int = 0):
    """Search faces of ``P(A, B)`` for an interior point where ``barycentric_exp`` leaves the mask.

    Returns ``(pp, weights, residual)`` for the first hit, or ``None``.
    """
    rng = np.random.default_rng(seed)
    for pp in partition_pairs(n):
        verts = permutations_respecting(pp)
        if len(verts) < 2:
            continue
        for _ in range(samples):
            t = rng.dirichlet(np.ones(len(verts)))
            res = block_residual(barycentric_exp(dict(zip(verts, t))), pp)
            if res > 1e-8:
                return pp, dict(zip(verts, t)), res
    return None


def two_cell_continuation(alpha, beta, gamma, pp: BlockPartitionPair, grid: int = 6) -> dict:
    """Experimental: fill the triangle ``alpha, beta, gamma`` with ``barycentric_exp``.

    Reports the worst block-condition residual over a barycentric grid and
    along the three edges.  Nothing here is guaranteed to satisfy the block
    condition on the open cell.
    """
    verts = [check_perm(alpha), check_perm(beta), check_perm(gamma)]
    interior = 0.0
    for a in range(grid + 1):
        for b in range(grid + 1 - a):
            c = grid - a - b
            if min(a, b, c) == 0:
                continue
            w = {verts[0]: a / grid, verts[1]: b / grid, verts[2]: c / grid}
            interior = max(interior, block_residual(barycentric_exp(w), pp))
    edge = 0.0
    for p, q in ((0, 1), (1, 2), (0, 2)):
        for t in np.linspace(0, 1, grid + 1):
            edge = max(edge, block_residual(skeleton_path(verts[p], verts[q], t), pp))
    return {"interior_residual": interior, "edge_residual": edge, "grid": grid}

"""Isometric dilations of covariant pairs, with maximality and fullness rounds.

A covariant pair is a finite-dimensional Hilbert space ``H`` whose basis
vectors each carry a point label (the diagonal representation of functions),
plus one operator ``A_i`` per map supported on the entries
``label(row) = sigma_i(label(col))``.

Dilations use the minimal Schaeffer layout ``K = H + Dft (x) Fock(depth)``,
where ``Dft`` is the range of the defect operator.  A defect vector with base
label ``b`` placed at word ``w`` carries label ``sigma_w(b)``.  Basis vectors
of ``K`` are either *interior* or *boundary*; the generators kill the
boundary, and every isometry claim is made on the interior only.  The
original space handed to the first construction is remembered as ``origin``
so repeated enlargement rounds can be compared on a fixed subspace.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import FiniteMultiSystem, InputError, words_up_to
from .fock import FockRep, matrix_norm
from .rng import SplitMix64

CLAMP = 1e-13
TOL = 1e-10


@dataclass
class CovariantPair:
    sys: FiniteMultiSystem
    labels: np.ndarray      # point of each basis vector of H
    A: list                 # n square matrices on H
    mode: str = "row"       # "row" or "sep"
    interior: np.ndarray | None = None

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=int)
        self.A = [np.asarray(a, dtype=complex) for a in self.A]
        if self.mode not in ("row", "sep"):
            raise InputError(f"mode must be 'row' or 'sep', got {self.mode!r}")
        if len(self.A) != self.sys.n:
            raise InputError(f"{len(self.A)} operators for {self.sys.n} maps")
        dim = len(self.labels)
        if self.interior is None:
            self.interior = np.ones(dim, dtype=bool)
        for i, a in enumerate(self.A):
            if a.shape != (dim, dim):
                raise InputError(f"A_{i + 1} has shape {a.shape}, expected {(dim, dim)}")
            if np.abs(a[~support_mask(self.sys, self.labels, i)]).max(initial=0.0) > 0:
                raise InputError(f"A_{i + 1} is not supported on label(row) = sigma_{i + 1}(label(col))")

    @property
    def dim(self) -> int:
        return len(self.labels)

    def pi(self, f) -> np.ndarray:
        return np.diag(np.asarray(f, dtype=complex)[self.labels])


def support_mask(sys, labels, i) -> np.ndarray:
    img = np.asarray(sys.maps[i])[labels]
    return labels[:, None] == img[None, :]


def fiber_labels(dims) -> np.ndarray:
    return np.repeat(np.arange(len(dims)), dims)


def random_covariant_pair(sys: FiniteMultiSystem, dims, seed: int, mode: str = "row") -> CovariantPair:
    """Seeded random pair scaled to norm 0.9.

    Blocks are drawn map by map, source point by source point, row-major,
    one complex normal per entry from :class:`SplitMix64`.  Row mode scales
    the whole row ``[A_1 ... A_n]``; separate mode scales each ``A_i``.
    """
    dims = [int(d) for d in dims]
    if len(dims) != sys.m or min(dims) < 1:
        raise InputError(f"need {sys.m} positive fiber dimensions, got {dims}")
    labels = fiber_labels(dims)
    offset = np.concatenate([[0], np.cumsum(dims)])
    rng = SplitMix64(seed)
    A = []
    for row in sys.maps:
        a = np.zeros((len(labels), len(labels)), dtype=complex)
        for x in range(sys.m):
            y = row[x]
            for r in range(dims[y]):
                for c in range(dims[x]):
                    a[offset[y] + r, offset[x] + c] = rng.complex_gauss()
        A.append(a)
    if mode == "row":
        s = matrix_norm(np.hstack(A))
        A = [0.9 * a / s for a in A]
    else:
        A = [0.9 * a / matrix_norm(a) for a in A]
    return CovariantPair(sys, labels, A, mode)


@dataclass
class DilatedRep:
    sys: FiniteMultiSystem
    S: list
    labels: np.ndarray
    interior: np.ndarray
    depth: int
    h_dim: int                   # H sits at indices [0, h_dim)
    origin: np.ndarray           # indices of the first space's interior
    defect_rank: int = 0
    history: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.labels)

    def rho(self, f) -> np.ndarray:
        return np.diag(np.asarray(f, dtype=complex)[self.labels])

    def E(self, points) -> np.ndarray:
        """Spectral projection of the diagonal representation onto ``points``."""
        return np.diag(np.isin(self.labels, list(points)).astype(float))


def as_dilated(rep: FockRep) -> DilatedRep:
    """View a Fock representation as an isometric representation with the top grade as boundary."""
    interior = rep.grades < rep.depth
    return DilatedRep(
        rep.sys, [L.astype(complex) for L in rep.L], rep.points.copy(), interior,
        rep.depth, rep.dim, np.flatnonzero(interior),
    )


def _psd_sqrt_basis(B, block_labels):
    """Range basis of ``B^{1/2}`` for a PSD ``B`` commuting with a label diagonal.

    Returns ``(vectors, sqrt_eigs, labels)``.  Eigenvalues below ``CLAMP`` are
    treated as zero; anything more negative than ``-TOL`` is an error.
    """
    vecs, vals, labs = [], [], []
    for y in np.unique(block_labels):
        idx = np.flatnonzero(block_labels == y)
        w, V = np.linalg.eigh(B[np.ix_(idx, idx)])
        if w.min() < -TOL:
            raise RuntimeError(f"defect operator not PSD: eigenvalue {w.min():.3e}")
        for k in np.flatnonzero(w > CLAMP):
            v = np.zeros(len(block_labels), dtype=complex)
            v[idx] = V[:, k]
            vecs.append(v)
            vals.append(np.sqrt(w[k]))
            labs.append(int(y))
    if not vecs:
        return np.zeros((len(block_labels), 0), dtype=complex), np.zeros(0), np.zeros(0, dtype=int)
    return np.array(vecs).T, np.array(vals), np.array(labs, dtype=int)


def _assemble(sys, A, labels_H, interior_H, depth, C, base):
    """Build ``K = H + Dft (x) Fock(depth)``; ``C[i]`` maps H into the defect basis."""
    n, h = sys.n, len(labels_H)
    r = len(base)
    words = words_up_to(n, depth)
    index = {w: j for j, w in enumerate(words)}
    K = h + r * len(words)
    maps = np.asarray(sys.maps)

    labels = np.empty(K, dtype=int)
    labels[:h] = labels_H
    interior = np.ones(K, dtype=bool)
    interior[:h] = interior_H
    for j, w in enumerate(words):
        lab = base.copy()
        for c in reversed(w):
            lab = maps[c - 1][lab]
        labels[h + j * r: h + (j + 1) * r] = lab
        interior[h + j * r: h + (j + 1) * r] = len(w) < depth

    S = []
    for i in range(1, n + 1):
        s = np.zeros((K, K), dtype=complex)
        s[:h, :h] = A[i - 1]
        s[h:h + r, :h] = C[i - 1]
        for j, w in enumerate(words):
            if len(w) < depth:
                t = index[(i,) + w]
                s[h + t * r: h + (t + 1) * r, h + j * r: h + (j + 1) * r] = np.eye(r)
        S.append(s)
    return S, labels, interior


def _check_pair_depth(depth):
    if depth < 1:
        raise InputError(f"dilation depth must be >= 1, got {depth}")


def fbp_row_dilation(pair: CovariantPair, depth: int, origin=None) -> DilatedRep:
    """Row-isometric dilation of a row contraction.

    The defect ``D = (I - A^*A)^{1/2}`` acts on ``H^n``, where slot ``j`` of a
    vector with label ``x`` is labelled ``sigma_j(x)``; ``D`` commutes with that
    labelling, so its range basis is found block by block.
    """
    if pair.mode != "row":
        raise InputError("row dilation needs a row-contractive pair")
    _check_pair_depth(depth)
    sys, h = pair.sys, pair.dim
    I = np.flatnonzero(pair.interior)
    row = np.hstack([a[:, I] for a in pair.A])
    if matrix_norm(row) > 1 + 1e-12:
        raise InputError(f"row norm {matrix_norm(row):.6g} exceeds 1")
    B = np.eye(row.shape[1]) - row.conj().T @ row
    slot_labels = np.concatenate([np.asarray(row_map)[pair.labels[I]] for row_map in sys.maps])
    V, sq, base = _psd_sqrt_basis(B, slot_labels)
    C = []
    for i in range(sys.n):
        c = np.zeros((len(base), h), dtype=complex)
        c[:, I] = sq[:, None] * V[i * len(I):(i + 1) * len(I), :].conj().T
        C.append(c)
    S, labels, interior = _assemble(sys, pair.A, pair.labels, pair.interior, depth, C, base)
    origin = np.flatnonzero(interior[:h]) if origin is None else np.asarray(origin)
    return DilatedRep(sys, S, labels, interior, depth, h, origin, len(base))


def separate_isometric_dilation(pair: CovariantPair, depth: int, origin=None) -> DilatedRep:
    """Isometric dilation of a separately contractive pair, one defect space per map."""
    if pair.mode != "sep":
        raise InputError("separate dilation needs a separately contractive pair")
    _check_pair_depth(depth)
    sys, h = pair.sys, pair.dim
    I = np.flatnonzero(pair.interior)
    parts = []
    for i, a in enumerate(pair.A):
        ai = a[:, I]
        if matrix_norm(ai) > 1 + 1e-12:
            raise InputError(f"A_{i + 1} has norm {matrix_norm(ai):.6g} > 1")
        B = np.eye(len(I)) - ai.conj().T @ ai
        parts.append(_psd_sqrt_basis(B, np.asarray(sys.maps[i])[pair.labels[I]]))
    r = sum(len(p[2]) for p in parts)
    base = np.concatenate([p[2] for p in parts]) if r else np.zeros(0, dtype=int)
    C, start = [], 0
    for V, sq, lab in parts:
        c = np.zeros((r, h), dtype=complex)
        c[start:start + len(lab), I] = sq[:, None] * V.conj().T
        C.append(c)
        start += len(lab)
    S, labels, interior = _assemble(sys, pair.A, pair.labels, pair.interior, depth, C, base)
    origin = np.flatnonzero(interior[:h]) if origin is None else np.asarray(origin)
    return DilatedRep(sys, S, labels, interior, depth, h, origin, r)


# ---- residuals -------------------------------------------------------------

def compression_residual(pair: CovariantPair, rep: DilatedRep) -> float:
    """``max_i max |P_H S_i|_H - A_i|``; zero by construction."""
    h = pair.dim
    return max(float(np.abs(s[:h, :h] - a).max(initial=0.0)) for s, a in zip(rep.S, pair.A))


def covariance_residual(rep: DilatedRep, fs) -> float:
    maps = rep.sys.maps
    out = 0.0
    for f in fs:
        f = np.asarray(f, dtype=complex)
        for i, s in enumerate(rep.S):
            out = max(out, matrix_norm(rep.rho(f) @ s - s @ rep.rho(f[list(maps[i])])))
    return out


def row_isometry_residual(rep: DilatedRep) -> float:
    """``max_{i,j} ||(S_j^* S_i - delta_ij I) P||`` with ``P`` the interior projection."""
    I = np.flatnonzero(rep.interior)
    eye = np.eye(rep.dim)[:, I]
    out = 0.0
    for i, si in enumerate(rep.S):
        for j, sj in enumerate(rep.S):
            G = sj.conj().T @ si[:, I] - (i == j) * eye
            out = max(out, matrix_norm(G))
    return out


def isometry_residual(rep: DilatedRep) -> float:
    """``max_i ||(S_i^* S_i - I) P||``."""
    I = np.flatnonzero(rep.interior)
    out = 0.0
    for s in rep.S:
        G = s.conj().T @ s[:, I]
        G[I, np.arange(len(I))] -= 1.0
        # ||G||^2 is the top eigenvalue of G^* G, a Hermitian |I| x |I| matrix
        out = max(out, float(np.sqrt(max(np.linalg.eigvalsh(G.conj().T @ G).max(), 0.0))))
    return out


def _compressed(M, idx):
    """Norm of the compression of a Hermitian ``M`` to the coordinates ``idx``."""
    if not len(idx):
        return 0.0
    return float(np.abs(np.linalg.eigvalsh(M[np.ix_(idx, idx)])).max())


def range_union(sys):
    return set().union(*(set(row) for row in sys.maps))


def maximality_check(rep) -> dict:
    """Compare ``sum S_i S_i^*`` with ``E(union sigma_i X)``.

    ``residual`` is compressed to the original space, ``full_residual`` to the
    whole current interior; they agree before any enlargement round.
    """
    if isinstance(rep, FockRep):
        rep = as_dilated(rep)
    R = sum(s @ s.conj().T for s in rep.S)
    M = R - rep.E(range_union(rep.sys))
    residual = _compressed(M, rep.origin)
    return {
        "is_maximal_interior": bool(residual < TOL),
        "residual": residual,
        "full_residual": _compressed(M, np.flatnonzero(rep.interior)),
        "isometry_residual": isometry_residual(rep),
    }


def fullness_check(rep) -> dict:
    """Compare each ``S_i S_i^*`` with ``E(sigma_i X)``, compressed as in :func:`maximality_check`."""
    if isinstance(rep, FockRep):
        rep = as_dilated(rep)
    interior = np.flatnonzero(rep.interior)
    res, full = 0.0, 0.0
    for i, s in enumerate(rep.S):
        M = s @ s.conj().T - rep.E(set(rep.sys.maps[i]))
        res = max(res, _compressed(M, rep.origin))
        full = max(full, _compressed(M, interior))
    return {"is_full_interior": bool(res < TOL), "residual": res, "full_residual": full}


# ---- enlargement rounds ----------------------------------------------------

def least_preimage(sys: FiniteMultiSystem, i: int, y: int) -> int:
    """The selector ``omega_i``: least ``x`` with ``sigma_i(x) = y``."""
    return sys.maps[i].index(y)


def _range_basis(M, labels):
    """Orthonormal basis of the range of ``M``, split by the label of each row.

    ``M`` maps into a space whose label blocks it respects, so the range is
    the direct sum of the ranges of the row blocks.
    """
    vecs, labs = [], []
    for y in np.unique(labels):
        idx = np.flatnonzero(labels == y)
        U, sv, _ = np.linalg.svd(M[idx, :], full_matrices=False)
        for k in np.flatnonzero(sv > TOL):
            v = np.zeros(len(labels), dtype=complex)
            v[idx] = U[:, k]
            vecs.append(v)
            labs.append(int(y))
    if not vecs:
        return np.zeros((len(labels), 0), dtype=complex), np.zeros(0, dtype=int)
    return np.array(vecs).T, np.array(labs, dtype=int)


@dataclass
class RoundResult:
    rep: DilatedRep
    changed: bool
    added: int
    residual_before: float
    residual_after: float


def _prepend(rep: DilatedRep, Q_by_map: dict, new_labels):
    """Adjoin new basis vectors in front of ``K``; ``Q_by_map[i]`` sends them into ``K`` under ``S_i``."""
    k, K = len(new_labels), rep.dim
    A = []
    for i, s in enumerate(rep.S):
        a = np.zeros((k + K, k + K), dtype=complex)
        a[k:, k:] = s
        if i in Q_by_map:
            cols, Q = Q_by_map[i]
            a[k:, cols] = Q
        A.append(a)
    labels = np.concatenate([np.asarray(new_labels, dtype=int), rep.labels])
    interior = np.concatenate([np.ones(k, dtype=bool), rep.interior])
    return A, labels, interior, rep.origin + k


def maximal_dilation_step(rep, depth: int | None = None, scope: str = "origin") -> RoundResult:
    """Adjoin the range of ``P = E(sigma_{i0} X)(I - sum S_i S_i^*)`` on ``V`` and re-dilate.

    ``i0`` is the least map with ``P V != 0``, the new vectors carry labels
    ``omega_{i0}(y)`` and ``S_{i0}`` sends them back onto ``P V``.  ``V`` is
    the original space by default, or the whole current space with
    ``scope="all"``; see :func:`full_dilation_round` for why.
    """
    if scope not in ("origin", "all"):
        raise InputError(f"scope must be 'origin' or 'all', got {scope!r}")
    if isinstance(rep, FockRep):
        rep = as_dilated(rep)
    depth = rep.depth if depth is None else depth
    before = maximality_check(rep)["residual"]
    defect = np.eye(rep.dim) - sum(s @ s.conj().T for s in rep.S)
    if scope == "origin":
        defect = defect[:, rep.origin]
    for i0 in range(rep.sys.n):
        P = rep.E(set(rep.sys.maps[i0])) @ defect
        if matrix_norm(P) > TOL:
            break
    else:
        return RoundResult(rep, False, 0, before, before)
    Q, labs = _range_basis(P, rep.labels)
    new_labels = [least_preimage(rep.sys, i0, int(y)) for y in labs]
    k = len(new_labels)
    A, labels, interior, origin = _prepend(rep, {i0: (slice(0, k), Q)}, new_labels)
    pair = CovariantPair(rep.sys, labels, A, "row", interior)
    out = fbp_row_dilation(pair, depth, origin=origin)
    after = maximality_check(out)["residual"]
    out.history = rep.history + [before]
    return RoundResult(out, True, k, before, after)


def full_dilation_round(rep, depth: int | None = None, scope: str = "origin") -> RoundResult:
    """Adjoin ``H_i = E(sigma_i X)(I - S_i S_i^*) V`` for every ``i`` and re-dilate separately.

    With ``scope="all"``, ``V`` is the whole current space.  The complement of
    a single range inside a truncated Fock space is about as large as the
    space itself, so that round roughly multiplies the dimension by ``n``;
    the default ``scope="origin"`` takes ``V`` to be the original space,
    which is the part the reported residual measures.
    """
    if scope not in ("origin", "all"):
        raise InputError(f"scope must be 'origin' or 'all', got {scope!r}")
    if isinstance(rep, FockRep):
        rep = as_dilated(rep)
    depth = rep.depth if depth is None else depth
    before = fullness_check(rep)["residual"]
    blocks = []
    for i, s in enumerate(rep.S):
        P = rep.E(set(rep.sys.maps[i])) @ (np.eye(rep.dim) - s @ s.conj().T)
        if scope == "origin":
            P = P[:, rep.origin]
        if matrix_norm(P) > TOL:
            Q, labs = _range_basis(P, rep.labels)
            blocks.append((i, Q, [least_preimage(rep.sys, i, int(y)) for y in labs]))
    if not blocks:
        return RoundResult(rep, False, 0, before, before)
    new_labels, Q_by_map, start = [], {}, 0
    for i, Q, labs in blocks:
        Q_by_map[i] = (slice(start, start + len(labs)), Q)
        new_labels += labs
        start += len(labs)
    A, labels, interior, origin = _prepend(rep, Q_by_map, new_labels)
    pair = CovariantPair(rep.sys, labels, A, "sep", interior)
    out = separate_isometric_dilation(pair, depth, origin=origin)
    after = fullness_check(out)["residual"]
    out.history = rep.history + [before]
    return RoundResult(out, True, len(new_labels), before, after)

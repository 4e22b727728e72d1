"""Generalized wandering sets, recurrence and the semisimplicity decision.

On a finite discrete space every subset is open and "dense" means "every
point", so the quantifier over all words collapses to reachability in the
union graph ``x -> sigma_i(x)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import FiniteMultiSystem, InputError, Polynomial, poly_mul, reach, structure_summary, words_up_to


@dataclass(frozen=True)
class WanderingCertificate:
    U: frozenset
    u: tuple
    v: tuple

    def as_dict(self, sys: FiniteMultiSystem | None = None):
        pts = sorted(self.U)
        return {
            "U": [sys.labels[p] for p in pts] if sys is not None else pts,
            "u": list(self.u),
            "v": list(self.v),
        }


@dataclass
class SemisimplicityVerdict:
    semisimple: bool
    certificate: WanderingCertificate | None = None
    proof: dict | None = field(default=None)

    def __post_init__(self):
        if (self.certificate is None) == (self.proof is None):
            raise ValueError("exactly one of certificate / proof must be set")


def _check_set(sys, U):
    U = frozenset(sys.check_point(x) for x in U)
    if not U:
        raise InputError("wandering test needs a non-empty set")
    return U


def is_wandering(sys: FiniteMultiSystem, U, u, v) -> bool:
    """True iff no ``x`` in ``U`` has ``sigma_u sigma_w sigma_v (x)`` in ``U`` for any word ``w``."""
    U = _check_set(sys, U)
    su = sys.word_map(u)
    sv = sys.word_map(v)
    for x in U:
        if any(su[y] in U for y in reach(sys, [sv[x]])):
            return False
    return True


def is_recurrent(sys: FiniteMultiSystem, x: int, u, v) -> bool:
    """Some word ``w`` has ``sigma_{uwv}(x) = x``."""
    x = sys.check_point(x)
    su = sys.word_map(u)
    sv = sys.word_map(v)
    return any(su[y] == x for y in reach(sys, [sv[x]]))


def strongly_connected_components(sys: FiniteMultiSystem) -> list:
    """Tarjan's algorithm on the union graph, iterative.  Components are sorted sets."""
    m = sys.m
    succ = [sorted({row[x] for row in sys.maps}) for x in range(m)]
    index = [-1] * m
    low = [0] * m
    on_stack = [False] * m
    stack, comps = [], []
    counter = 0
    for root in range(m):
        if index[root] >= 0:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, k = work[-1]
            if k < len(succ[v]):
                work[-1] = (v, k + 1)
                w = succ[v][k]
                if index[w] < 0:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    comps.sort(key=lambda c: c[0])
    return comps


def condensation_edges(sys: FiniteMultiSystem, comps=None) -> set:
    comps = strongly_connected_components(sys) if comps is None else comps
    owner = {x: k for k, comp in enumerate(comps) for x in comp}
    return {
        (owner[x], owner[row[x]])
        for x in range(sys.m)
        for row in sys.maps
        if owner[x] != owner[row[x]]
    }


def _escape_word(sys: FiniteMultiSystem, x: int, comp: set):
    """Shortest (then lexicographically least) word ``v`` with ``sigma_v(x)`` outside ``comp``.

    BFS over walks.  The word grows on the left since the newest letter is
    applied last; each node keeps its least word, which stays least under
    further left extension.
    """
    frontier = {x: ()}
    seen = {x}
    while frontier:
        hits, nxt = [], {}
        for y, w in frontier.items():
            for i, row in enumerate(sys.maps, start=1):
                z, wz = row[y], (i,) + w
                if z not in comp:
                    hits.append(wz)
                elif z not in seen:
                    if z not in nxt or wz < nxt[z]:
                        nxt[z] = wz
        if hits:
            return min(hits)
        seen.update(nxt)
        frontier = nxt
    return None


def find_wandering(sys: FiniteMultiSystem):
    """A generalized wandering certificate, or ``None`` when no wandering set exists."""
    m = sys.m
    for i, row in enumerate(sys.maps, start=1):
        missed = frozenset(range(m)) - set(row)
        if missed:
            return WanderingCertificate(missed, (i,), ())
    comps = strongly_connected_components(sys)
    owner = {x: k for k, comp in enumerate(comps) for x in comp}
    leaving = {a for a, _ in condensation_edges(sys, comps)}
    for x in range(m):
        if owner[x] in leaving:
            v = _escape_word(sys, x, set(comps[owner[x]]))
            cert = WanderingCertificate(frozenset([x]), (), v)
            assert is_wandering(sys, cert.U, cert.u, cert.v)
            return cert
    return None


def is_semisimple(sys: FiniteMultiSystem) -> SemisimplicityVerdict:
    cert = find_wandering(sys)
    if cert is not None:
        return SemisimplicityVerdict(False, certificate=cert)
    comps = strongly_connected_components(sys)
    proof = {
        "surjective": structure_summary(sys).surjective,
        "scc_partition": comps,
        "condensation_edges": len(condensation_edges(sys, comps)),
    }
    return SemisimplicityVerdict(True, proof=proof)


@dataclass
class NilpotentWitness:
    """``N = s_v h s_u`` with ``h`` the indicator of the wandering set."""

    v: tuple
    h: np.ndarray
    u: tuple
    polynomial: Polynomial

    @property
    def vanishes(self) -> bool:
        return self.polynomial.is_zero()


def nilpotent_element(sys: FiniteMultiSystem, cert: WanderingCertificate) -> NilpotentWitness:
    if not cert.U or not is_wandering(sys, cert.U, cert.u, cert.v):
        raise InputError(f"not a wandering certificate: {cert}")
    h = np.zeros(sys.m, dtype=complex)
    h[list(cert.U)] = 1.0
    m = sys.m
    N = poly_mul(
        sys,
        poly_mul(sys, Polynomial.monomial(m, cert.v), Polynomial.monomial(m, (), h)),
        Polynomial.monomial(m, cert.u),
    )
    return NilpotentWitness(tuple(cert.v), h, tuple(cert.u), N)


def nonvanishing_certificate(sys: FiniteMultiSystem, max_len: int | None = None):
    """A certificate whose element ``s_v h s_u`` is nonzero, or ``None``.

    ``s_v h s_u = s_{vu} (h o sigma_u)`` vanishes unless ``U`` meets the range
    of ``sigma_u``; the canonical certificate of a non-surjective map never
    does.  Subsets of wandering sets wander, so singletons suffice.  Words are
    searched by total length, then lexicographically, up to ``max_len`` each
    (default ``m``).
    """
    max_len = sys.m if max_len is None else max_len
    words = words_up_to(sys.n, max_len)
    pairs = sorted(((u, v) for u in words for v in words), key=lambda p: (len(p[0]) + len(p[1]), p))
    for u, v in pairs:
        su, sv = sys.word_map(u), sys.word_map(v)
        hit = set(int(y) for y in su)
        for x in sorted(hit):
            if all(su[y] != x for y in reach(sys, [int(sv[x])])):
                return WanderingCertificate(frozenset([x]), u, v)
    return None


def brute_force_wandering(sys: FiniteMultiSystem, max_uv: int = 3, max_w: int | None = None):
    """Exhaustive search over non-empty ``U`` and words ``u, v, w`` of bounded length.

    Independent of reachability: every word ``w`` with ``|w| <= max_w`` is
    composed explicitly.  Returns the first wandering triple found or ``None``.
    """
    from itertools import combinations

    max_w = sys.m if max_w is None else max_w
    m = sys.m
    uvw = words_up_to(sys.n, max(max_uv, max_w))
    tables = {w: sys.word_map(w) for w in uvw}
    ws = [w for w in uvw if len(w) <= max_w]
    uvs = [w for w in uvw if len(w) <= max_uv]
    subsets = [frozenset(c) for r in range(1, m + 1) for c in combinations(range(m), r)]
    for u in uvs:
        for v in uvs:
            # images sigma_{uwv}(x) for each x, across all w
            returns = [set() for _ in range(m)]
            for w in ws:
                t = tables[u][tables[w][tables[v]]]
                for x in range(m):
                    returns[x].add(int(t[x]))
            for U in subsets:
                if all(not (returns[x] & U) for x in U):
                    return WanderingCertificate(U, u, v)
    return None

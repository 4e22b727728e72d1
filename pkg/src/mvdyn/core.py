"""Finite multivariable dynamical systems and their covariance algebra.

Words are tuples of 1-based letters written ``(i_k, ..., i_1)``: the
rightmost letter is applied first, so ``evaluate_word(sys, (2, 1), x)``
is ``sigma_2(sigma_1(x))``.  Every module in the package uses this one
convention.  Point labels are for display only; all semantics use indices.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

Word = tuple  # tuple[int, ...] of 1-based letters

#: coefficients whose max modulus falls below this are dropped
COEFF_EPS = 1e-15


class InputError(ValueError):
    """Raised when an argument violates a documented precondition."""


@dataclass(frozen=True)
class FiniteMultiSystem:
    """``n`` total self-maps of the point set ``{0, ..., m-1}``.

    ``maps[i][x]`` is the index of ``sigma_{i+1}(x)``.
    """

    maps: tuple
    labels: tuple = ()
    name: str = ""

    def __post_init__(self):
        maps = tuple(tuple(int(v) for v in row) for row in self.maps)
        if not maps:
            raise InputError("a system needs at least one map")
        m = len(maps[0])
        if m < 1:
            raise InputError("a system needs at least one point")
        for i, row in enumerate(maps):
            if len(row) != m:
                raise InputError(f"map {i + 1} has length {len(row)}, expected {m}")
            for x, y in enumerate(row):
                if not 0 <= y < m:
                    raise InputError(f"map {i + 1} sends point {x} to {y}, outside [0, {m})")
        labels = tuple(str(s) for s in self.labels) if self.labels else tuple(f"p{x}" for x in range(m))
        if len(labels) != m:
            raise InputError(f"{len(labels)} labels given for {m} points")
        if len(set(labels)) != m:
            raise InputError("duplicate point labels")
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "labels", labels)

    @property
    def m(self) -> int:
        return len(self.maps[0])

    @property
    def n(self) -> int:
        return len(self.maps)

    def check_point(self, x: int) -> int:
        if not isinstance(x, (int, np.integer)) or not 0 <= x < self.m:
            raise InputError(f"point index {x!r} outside [0, {self.m})")
        return int(x)

    def check_word(self, w: Iterable[int]) -> Word:
        w = tuple(int(c) for c in w)
        for c in w:
            if not 1 <= c <= self.n:
                raise InputError(f"letter {c} outside alphabet 1..{self.n}")
        return w

    def word_map(self, w: Iterable[int]) -> np.ndarray:
        """The table of ``sigma_w`` as an integer array of length ``m``."""
        w = self.check_word(w)
        table = np.arange(self.m)
        for c in reversed(w):
            table = np.asarray(self.maps[c - 1])[table]
        return table

    def __repr__(self):
        return f"FiniteMultiSystem(maps={self.maps!r})"


def evaluate_word(sys: FiniteMultiSystem, w: Iterable[int], x: int) -> int:
    """Return ``sigma_w(x)``; the empty word is the identity."""
    x = sys.check_point(x)
    for c in reversed(sys.check_word(w)):
        x = sys.maps[c - 1][x]
    return x


def reach(sys: FiniteMultiSystem, start: Iterable[int]) -> set:
    """Points reachable from ``start`` along walks of any length (including zero)."""
    seen = set(start)
    queue = deque(seen)
    while queue:
        x = queue.popleft()
        for row in sys.maps:
            y = row[x]
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def orbit(sys: FiniteMultiSystem, x: int) -> set:
    """The least set containing ``x`` and closed under every map."""
    return reach(sys, [sys.check_point(x)])


def words_up_to(n: int, length: int):
    """All words of length ``<= length``, graded, lexicographic within a grade."""
    out = [()]
    layer = [()]
    for _ in range(length):
        layer = [w + (c,) for w in layer for c in range(1, n + 1)]
        out.extend(layer)
    return out


def words_of_length(n: int, length: int):
    layer = [()]
    for _ in range(length):
        layer = [w + (c,) for w in layer for c in range(1, n + 1)]
    return layer


@dataclass
class StructureSummary:
    surjective: list
    ranges: list
    range_union: set
    z_set: set
    fixed_indices: list

    def as_dict(self, sys: FiniteMultiSystem | None = None):
        def lab(points):
            pts = sorted(points)
            return [sys.labels[p] for p in pts] if sys is not None else pts

        return {
            "surjective": list(self.surjective),
            "range_union": lab(self.range_union),
            "z_set": lab(self.z_set),
            "fixed_indices": [sorted(s) for s in self.fixed_indices],
        }


def structure_summary(sys: FiniteMultiSystem) -> StructureSummary:
    """Surjectivity, ranges, the set where the images collide, and ``I_x``."""
    ranges = [set(row) for row in sys.maps]
    surjective = [len(r) == sys.m for r in ranges]
    union = set().union(*ranges)
    z_set = {x for x in range(sys.m) if len({row[x] for row in sys.maps}) < sys.n}
    fixed = [{i + 1 for i, row in enumerate(sys.maps) if row[x] == x} for x in range(sys.m)]
    return StructureSummary(surjective, ranges, union, z_set, fixed)


@dataclass
class Polynomial:
    """A finite sum ``sum_w s_w f_w`` with ``f_w`` a complex function on the points."""

    m: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        terms = {}
        for w, f in dict(self.terms).items():
            f = np.asarray(f, dtype=complex).reshape(-1)
            if f.shape != (self.m,):
                raise InputError(f"coefficient for word {w} has length {f.size}, expected {self.m}")
            if not np.all(np.isfinite(f)):
                raise InputError(f"non-finite coefficient for word {w}")
            w = tuple(int(c) for c in w)
            terms[w] = terms[w] + f if w in terms else f.copy()
        self.terms = {w: f for w, f in terms.items() if np.max(np.abs(f)) >= COEFF_EPS}

    @classmethod
    def monomial(cls, m, word=(), coeff=None):
        coeff = np.ones(m) if coeff is None else coeff
        return cls(m, {tuple(word): coeff})

    @classmethod
    def zero(cls, m):
        return cls(m, {})

    @property
    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, w) -> np.ndarray:
        f = self.terms.get(tuple(w))
        return np.zeros(self.m, dtype=complex) if f is None else f.copy()

    def __add__(self, other: "Polynomial") -> "Polynomial":
        terms = {w: f.copy() for w, f in self.terms.items()}
        for w, f in other.terms.items():
            terms[w] = terms[w] + f if w in terms else f.copy()
        return Polynomial(self.m, terms)

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def scale(self, c) -> "Polynomial":
        return Polynomial(self.m, {w: c * f for w, f in self.terms.items()})

    def equals(self, other: "Polynomial", tol: float = 0.0) -> bool:
        diff = self - other
        return all(np.max(np.abs(f)) <= tol for f in diff.terms.values())

    def __repr__(self):
        parts = [f"s{''.join(map(str, w)) or '_0'}*{np.round(f, 6).tolist()}" for w, f in sorted(self.terms.items())]
        return "Polynomial(" + " + ".join(parts) + ")" if parts else "Polynomial(0)"


def pullback(sys: FiniteMultiSystem, f, w) -> np.ndarray:
    """``f o sigma_w`` as a coefficient vector."""
    return np.asarray(f, dtype=complex)[sys.word_map(w)]


def poly_mul(sys: FiniteMultiSystem, a: Polynomial, b: Polynomial) -> Polynomial:
    """Product in the covariance algebra: ``(s_v f)(s_w g) = s_{vw} (f o sigma_w) g``."""
    terms = {}
    for w, g in b.terms.items():
        table = sys.word_map(w)
        for v, f in a.terms.items():
            vw = v + w
            coeff = f[table] * g
            terms[vw] = terms[vw] + coeff if vw in terms else coeff
    return Polynomial(sys.m, terms)


def poly_from_mapping(m: int, terms: Mapping[Sequence[int], Sequence[complex]]) -> Polynomial:
    return Polynomial(m, {tuple(w): f for w, f in terms.items()})


def random_polynomial(sys: FiniteMultiSystem, rng: np.random.Generator, degree: int, n_terms: int = 4) -> Polynomial:
    """Random test polynomial with up to ``n_terms`` words of length ``<= degree``."""
    words = words_up_to(sys.n, degree)
    picks = rng.choice(len(words), size=min(n_terms, len(words)), replace=False)
    terms = {}
    for k in picks:
        terms[words[k]] = rng.normal(size=sys.m) + 1j * rng.normal(size=sys.m)
    return Polynomial(sys.m, terms)


def random_system(rng: np.random.Generator, m: int, n: int) -> FiniteMultiSystem:
    return FiniteMultiSystem(tuple(tuple(int(v) for v in rng.integers(0, m, size=m)) for _ in range(n)))

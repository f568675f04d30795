"""Truncated full Fock space over C^d: an independent moment oracle.

A vector is stored level by level: level ``n`` holds the amplitudes of
all words of length ``n`` as an array of shape ``(d,) * n``, so the word
``(i_1, ..., i_n)`` is entry ``[i_1, ..., i_n]`` and the vacuum is the
0-d array at level 0.  Levels that are identically zero are not stored.

The Wigner integral of a kernel acts through the recursion

    I(e_i (x) g) = S_i I(g) - I(g[i])

where ``S_i = a_i + a_i^*`` is the semicircular generator and ``g[i]``
contracts the first slot of ``g`` with ``e_i``.  It is the product
formula for a first-order factor, rearranged, and never uses the
multi-step contraction machinery of the moment engine.
"""

from fractions import Fraction

import numpy as np

from .errors import CapacityError, ShapeError
from .kernel import Kernel


class FockVector:
    """Graded, level-truncated vector of the full Fock space."""

    __slots__ = ("dim", "max_level", "levels", "exact")

    def __init__(self, dim, max_level, levels=None, exact=False):
        self.dim = int(dim)
        self.max_level = int(max_level)
        self.exact = exact
        self.levels = {}
        for n, a in (levels or {}).items():
            if n > self.max_level:
                raise CapacityError("level %d exceeds max level %d"
                                    % (n, self.max_level))
            a = np.asarray(a, dtype=object if exact else complex)
            if a.shape != (self.dim,) * n:
                raise ShapeError("level %d must have shape %s"
                                 % (n, (self.dim,) * n))
            if np.any(a != 0):
                self.levels[n] = a

    @classmethod
    def vacuum(cls, dim, max_level, exact=False):
        one = Fraction(1) if exact else 1.0
        return cls(dim, max_level, {0: np.array(one, dtype=object if exact
                                                else complex)}, exact)

    def _new(self, levels):
        v = FockVector.__new__(FockVector)
        v.dim, v.max_level, v.exact = self.dim, self.max_level, self.exact
        dt = object if self.exact else complex
        # object arithmetic on 0-d arrays yields bare scalars: re-wrap
        levels = {n: np.asarray(a, dtype=dt) for n, a in levels.items()}
        v.levels = {n: a for n, a in levels.items() if np.any(a != 0)}
        return v

    @property
    def top_level(self):
        return max(self.levels, default=-1)

    def vacuum_amplitude(self):
        a = self.levels.get(0)
        if a is None:
            return Fraction(0) if self.exact else 0j
        return a[()] if self.exact else complex(a[()])

    def amplitude(self, word):
        a = self.levels.get(len(word))
        return 0 if a is None else a[tuple(word)]

    def __add__(self, other):
        out = dict(self.levels)
        for n, a in other.levels.items():
            out[n] = out[n] + a if n in out else a
        return self._new(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return self._new({n: a * c for n, a in self.levels.items()})

    def inner(self, other):
        """``<self, other>``, antilinear in the first slot."""
        s = Fraction(0) if self.exact else 0j
        for n, a in self.levels.items():
            b = other.levels.get(n)
            if b is not None:
                s += (np.conj(a) * b).sum()
        return s

    def truncate(self, level):
        """Drop every word longer than ``level``."""
        return self._new({n: a for n, a in self.levels.items() if n <= level})

    def max_abs_diff(self, other):
        diff = self - other
        return max((float(np.max(np.abs(a.astype(complex))))
                    for a in diff.levels.values()), default=0.0)

    def __repr__(self):
        return "FockVector(dim=%d, max_level=%d, levels=%s)" % (
            self.dim, self.max_level, sorted(self.levels))


def _check_index(v, i):
    if not 0 <= i < v.dim:
        raise ShapeError("basis index %d outside 0..%d" % (i, v.dim - 1))


def create(i, v):
    """Prepend letter ``i`` to every word; words pushed past the top level
    are dropped."""
    _check_index(v, i)
    out = {}
    for n, a in v.levels.items():
        if n + 1 > v.max_level:
            continue
        b = np.zeros((v.dim,) * (n + 1), dtype=a.dtype)
        if v.exact:
            b[...] = Fraction(0)
        b[i] = a
        out[n + 1] = b
    return v._new(out)


def annihilate(i, v):
    """Strip a leading letter ``i``; words starting otherwise vanish."""
    _check_index(v, i)
    return v._new({n - 1: a[i] for n, a in v.levels.items() if n > 0})


def semicircular(i, v):
    return create(i, v) + annihilate(i, v)


def _apply(c, v):
    if c.ndim == 0:
        return v.scale(c[()])
    out = v._new({})
    for i in range(v.dim):
        sub = np.asarray(c[i], dtype=c.dtype)
        if not np.any(sub != 0):
            continue
        out = out + semicircular(i, _apply(sub, v))
        if sub.ndim >= 1:
            inner = np.asarray(sub[i], dtype=c.dtype)
            if np.any(inner != 0):
                out = out - _apply(inner, v)
    return out


def wigner_apply(f, v):
    """Apply the Wigner integral ``I(f)`` to ``v``."""
    if f.dim != v.dim:
        raise ShapeError("kernel dim %d, vector dim %d" % (f.dim, v.dim))
    if v.top_level + f.order > v.max_level:
        raise CapacityError("I(f) would reach level %d > max level %d"
                            % (v.top_level + f.order, v.max_level))
    c = f.dense
    if v.exact and not f.exact:
        raise ShapeError("exact vectors need exact kernels")
    if not v.exact and f.exact:
        c = c.astype(complex)
    return _apply(c, v)


def oracle_moment(f, m, max_level=None):
    """``<Omega, I(f)^m Omega>`` on the truncated Fock space.

    After the k-th application, words longer than ``q (m - k)`` can no
    longer return to the vacuum and are pruned, which keeps the result
    exact for any ``max_level >= q m``.
    """
    q = f.order
    if m < 1:
        raise ValueError("m must be positive")
    if max_level is None:
        max_level = q * m
    if max_level < q * m:
        raise CapacityError("max_level must be at least q*m = %d" % (q * m))
    v = FockVector.vacuum(f.dim, max_level, exact=f.exact)
    for k in range(1, m + 1):
        v = wigner_apply(f, v).truncate(q * (m - k))
    return v.vacuum_amplitude()


def kernel_to_vector(f, max_level):
    """The Fock vector ``f`` placed at level ``order(f)``."""
    return FockVector(f.dim, max_level, {f.order: f.dense}, exact=f.exact)


def vector_level_kernel(v, level):
    """Coefficients of ``v`` at ``level`` as a kernel."""
    a = v.levels.get(level)
    if a is None:
        return Kernel.zeros(level, v.dim, exact=v.exact)
    return Kernel(a, v.dim, v.exact)

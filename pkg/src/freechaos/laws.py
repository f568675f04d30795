"""Semicircle and free Poisson (Marchenko-Pastur) densities and their
moments by adaptive quadrature.

Both continuous parts are square-root shaped at the edges of their
support.  Writing ``x = c - R cos(phi)`` with ``phi`` in ``[0, pi]``
turns ``sqrt(R^2 - (x - c)^2) dx`` into ``R^2 sin(phi)^2 dphi``, which is
smooth, so a Gauss-Legendre rule with bisection converges quickly.  For
the free Poisson law the extra ``1/x`` factor is kept bounded by
evaluating ``x`` as ``(1 - sqrt(lam))^2 + 4 sqrt(lam) sin(phi/2)^2``,
which stays accurate near the hard edge at 0 when ``lam == 1``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundedInputError, DomainError, QuadratureError

SEMICIRCLE = "semicircle"
FREE_POISSON = "free_poisson"
CENTERED_FREE_POISSON = "centered_free_poisson"

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class Law:
    kind: str
    parameter: float

    def __post_init__(self):
        if self.kind not in (SEMICIRCLE, FREE_POISSON, CENTERED_FREE_POISSON):
            raise DomainError("unknown law %r" % (self.kind,))
        if not self.parameter > 0:
            raise DomainError("parameter must be positive")

    @property
    def shift(self):
        """Offset subtracted from the underlying free Poisson variable."""
        return float(self.parameter) if self.kind == CENTERED_FREE_POISSON else 0.0

    @property
    def atom_mass(self):
        if self.kind == SEMICIRCLE or self.parameter > 1:
            return 0.0
        return 1.0 - float(self.parameter)

    @property
    def atom_location(self):
        return -self.shift

    @property
    def support(self):
        p = float(self.parameter)
        if self.kind == SEMICIRCLE:
            r = 2.0 * math.sqrt(p)
            return (-r, r)
        lo, hi = (1 - math.sqrt(p)) ** 2, (1 + math.sqrt(p)) ** 2
        if self.atom_mass > 0:
            lo = 0.0
        return (lo - self.shift, hi - self.shift)


def semicircle(t):
    return Law(SEMICIRCLE, t)


def free_poisson(lam):
    return Law(FREE_POISSON, lam)


def centered_free_poisson(lam):
    return Law(CENTERED_FREE_POISSON, lam)


def density(law, x):
    """Density of the continuous part at ``x`` (atoms excluded).

    For the free Poisson law with rate at most one the continuous part has
    total mass ``lam``; the atom at the origin carries the rest.
    """
    p = float(law.parameter)
    x = np.asarray(x, dtype=float) + law.shift
    if law.kind == SEMICIRCLE:
        inside = 4 * p - x ** 2
        out = np.sqrt(np.clip(inside, 0, None)) / (2 * math.pi * p)
    else:
        inside = 4 * p - (x - 1 - p) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(x > 0, np.sqrt(np.clip(inside, 0, None))
                           / (2 * math.pi * x), 0.0)
    out = np.where(inside > 0, out, 0.0)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# adaptive Gauss-Legendre

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(12)


def _rule(func, a, b):
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * _NODES
    return half * np.dot(_WEIGHTS, func(x))


def adaptive_quad(func, a, b, tol=DEFAULT_TOL, max_depth=40):
    """Integrate a vectorized ``func`` over ``[a, b]``.

    Each interval compares the base rule against the sum over its two
    halves and is bisected until the difference drops below its share of
    ``tol``.  Returns ``(value, error_estimate)``.
    """
    total, err = 0.0, 0.0
    stack = [(a, b, _rule(func, a, b), 0)]
    width = b - a
    while stack:
        lo, hi, whole, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left, right = _rule(func, lo, mid), _rule(func, mid, hi)
        diff = abs(left + right - whole)
        if diff <= tol * (hi - lo) / width:
            total += left + right
            err += diff
            continue
        if depth >= max_depth:
            raise QuadratureError("refinement limit reached",
                                  total + left + right, err + diff)
        stack.append((mid, hi, right, depth + 1))
        stack.append((lo, mid, left, depth + 1))
    return total, err


def quadrature_moment(law, m, tol=DEFAULT_TOL):
    """m-th moment of ``law``: atom contribution plus the continuous part."""
    if not isinstance(m, int) or m < 0 or m > 10:
        raise BoundedInputError("m must be an integer in [0, 10]")
    if not tol >= 1e-12:
        raise DomainError("tol must be at least 1e-12")
    p = float(law.parameter)
    if law.kind == SEMICIRCLE:
        r = 2.0 * math.sqrt(p)

        def integrand(phi):
            x = -r * np.cos(phi)
            return x ** m * (r * np.sin(phi)) ** 2 / (2 * math.pi * p)
    else:
        sq = math.sqrt(p)
        shift = law.shift

        def integrand(phi):
            s = np.sin(0.5 * phi)
            x = (1 - sq) ** 2 + 4 * sq * s ** 2
            # sin(phi)^2 / x with the 1/x edge kept bounded at lam == 1
            jac = 4 * p * np.sin(phi) ** 2 / x
            return (x - shift) ** m * jac / (2 * math.pi)
    value, _ = adaptive_quad(integrand, 0.0, math.pi, tol)
    if law.atom_mass:
        value += law.atom_mass * law.atom_location ** m
    return float(value)

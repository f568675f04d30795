"""Free moment-cumulant transform and the cumulants of the named laws.

Sequences are 1-indexed in the mathematical sense: ``seq[0]`` holds the
first moment (or cumulant).  Each sequence is either *exact*
(:class:`fractions.Fraction` entries) or *float* (binary64); the mode is
chosen at construction and preserved by every transform.
"""

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .errors import BoundedInputError, DomainError, ShapeError
from .partitions import MAX_ENUM, block_type_counts, riordan_refined


def _is_exact(x):
    return isinstance(x, Rational) and not isinstance(x, bool)


@dataclass(frozen=True)
class _Sequence:
    values: tuple
    exact: bool

    def __init__(self, values, exact=None):
        values = tuple(values)
        if len(values) < 1:
            raise ShapeError("a sequence needs at least one entry")
        if exact is None:
            exact = all(_is_exact(v) for v in values)
        conv = Fraction if exact else float
        object.__setattr__(self, "values", tuple(conv(v) for v in values))
        object.__setattr__(self, "exact", bool(exact))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]

    def __iter__(self):
        return iter(self.values)

    def order(self, m):
        """The m-th entry, counting from 1."""
        return self.values[m - 1]


class CumulantSequence(_Sequence):
    """Free cumulants kappa_1..kappa_M."""


class MomentSequence(_Sequence):
    """Moments phi(X), phi(X^2), ..., phi(X^M)."""


def _check_len(seq, M):
    if not isinstance(M, int) or M < 1 or M > MAX_ENUM:
        raise BoundedInputError("M must be an integer in [1, %d]" % MAX_ENUM)
    if len(seq) < M:
        raise ShapeError("sequence has %d entries, need %d" % (len(seq), M))


def _partition_sum(kappa, m, skip_full_block=False):
    zero = Fraction(0) if isinstance(kappa[0], Fraction) else 0.0
    total = zero
    for sizes, count in block_type_counts(m):
        if skip_full_block and sizes == (m,):
            continue
        term = count
        for s in sizes:
            term = term * kappa[s - 1]
            if not term:
                break
        total += term
    return total


def moments_from_cumulants(kappa, M=None):
    """Moments as sums over NC(m) of products of block cumulants."""
    M = len(kappa) if M is None else M
    _check_len(kappa, M)
    vals = kappa.values
    return MomentSequence([_partition_sum(vals, m) for m in range(1, M + 1)],
                          exact=kappa.exact)


def cumulants_from_moments(mu, M=None):
    """Invert :func:`moments_from_cumulants` by forward recursion in m.

    The one-block partition contributes kappa_m with coefficient one, so
    kappa_m = mu_m minus the sum over the remaining partitions, which only
    involves lower cumulants.
    """
    M = len(mu) if M is None else M
    _check_len(mu, M)
    kappa = []
    for m in range(1, M + 1):
        # pad with the slot being solved for; it is never read
        partial = kappa + [mu[m - 1]]
        kappa.append(mu[m - 1] - _partition_sum(partial, m,
                                                skip_full_block=True))
    return CumulantSequence(kappa, exact=mu.exact)


def semicircle_cumulants(t, M):
    if t <= 0:
        raise DomainError("variance must be positive")
    return CumulantSequence([0, t] + [0] * (M - 2) if M >= 2 else [0],
                            exact=_is_exact(t))


def free_poisson_cumulants(lam, centered, M):
    """kappa_m = lam for all m, with kappa_1 = 0 after centering."""
    if not lam > 0:
        raise DomainError("rate must be positive, got %r" % (lam,))
    if M < 1:
        raise BoundedInputError("M must be positive")
    vals = [lam] * M
    if centered:
        vals[0] = 0
    return CumulantSequence(vals, exact=_is_exact(lam))


def centered_poisson_moment(lam, m):
    """phi[Z(lam)^m] = sum_j lam^j R_{m,j}."""
    if not lam > 0:
        raise DomainError("rate must be positive, got %r" % (lam,))
    if not isinstance(m, int) or m < 1 or m > MAX_ENUM:
        raise BoundedInputError("m must be an integer in [1, %d]" % MAX_ENUM)
    if _is_exact(lam):
        lam = Fraction(lam)
    return sum(lam ** j * riordan_refined(m, j) for j in range(1, m + 1))


def additivity_check(kappa_a, kappa_b):
    """Cumulants of a sum of freely independent variables."""
    if len(kappa_a) != len(kappa_b):
        raise ShapeError("length mismatch: %d vs %d"
                         % (len(kappa_a), len(kappa_b)))
    return CumulantSequence([a + b for a, b in zip(kappa_a, kappa_b)],
                            exact=kappa_a.exact and kappa_b.exact)

"""Moments of Wigner integrals ``F = I(f)`` by iterated contraction.

Repeated use of the product formula writes ``I(f)^m`` as a sum over
contraction sequences ``(r_1, ..., r_{m-1})`` of Wigner integrals of the
left-nested contractions ``(...((f ~r_1 f) ~r_2 f) ...) ~r_{m-1} f``.
Only the order-0 terms survive the trace, so

    phi(F^m) = sum over closing sequences of the nested scalar.

Sequence classes (``q`` even):

* ``A``: every ``r_k`` is at most the order of the left operand and ``q``;
* ``B``: ``A`` sequences that close to order 0 (``2 sum r = m q``);
* ``D``: ``B`` sequences with every ``r_k`` in ``{0, q/2, q}``;
* ``E``: the rest of ``B``.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .cumulants import centered_poisson_moment
from .errors import (BoundedInputError, ClassificationError, DomainError,
                     NormalizationError, ShapeError)
from .kernel import (adjoint, axpy, contract, diagonal_kernel,
                     is_mirror_symmetric, max_abs_diff, norm, norm_sq,
                     poisson_kernel)

A, B, D, E = "A", "B", "D", "E"

A_ONLY = "A_only"
B_AND_D = "B_and_D"
B_AND_E = "B_and_E"

MIRROR_TOL = 1e-10

_MAX_M = {2: 8, 4: 6}


@dataclass(frozen=True)
class ContractionSequence:
    q: int
    r: tuple

    @property
    def m(self):
        return len(self.r) + 1

    @property
    def classification(self):
        return classify(self.q, self.r)

    def __str__(self):
        return "(" + ",".join(map(str, self.r)) + ")"


def _orders(q, r):
    """Orders of the left operand before each step, then the final order."""
    orders = [q]
    for rk in r:
        orders.append(orders[-1] + q - 2 * rk)
    return orders


def classify(q, r):
    orders = _orders(q, r)
    for rk, left in zip(r, orders):
        if rk < 0 or rk > q or rk > left:
            raise ClassificationError("%s is not an admissible sequence for q=%d"
                                      % (tuple(r), q))
    if orders[-1] != 0:
        return A_ONLY
    if all(rk in (0, q // 2, q) for rk in r):
        return B_AND_D
    return B_AND_E


def _check_sequence_bounds(q, m):
    if q not in (2, 4, 6):
        raise BoundedInputError("q must be 2, 4 or 6, got %r" % (q,))
    if not isinstance(m, int) or m < 2 or m > 8:
        raise BoundedInputError("m must be an integer in [2, 8], got %r" % (m,))


def enumerate_sequences(q, m, cls):
    """Sequences of the requested class, in lexicographic order."""
    _check_sequence_bounds(q, m)
    if cls not in (A, B, D, E):
        raise ValueError("class must be one of A, B, D, E")
    closing = cls != A
    out = []

    def walk(prefix, order):
        steps = len(prefix)
        if steps == m - 1:
            if not closing or order == 0:
                out.append(prefix)
            return
        for rk in range(min(q, order) + 1):
            nxt = order + q - 2 * rk
            if closing and nxt > q * (m - 2 - steps):
                continue
            walk(prefix + (rk,), nxt)

    walk((), q)
    seqs = [ContractionSequence(q, r) for r in out]
    if cls == D:
        seqs = [s for s in seqs if s.classification == B_AND_D]
    elif cls == E:
        seqs = [s for s in seqs if s.classification == B_AND_E]
    return seqs


@dataclass
class MomentReport:
    m: int
    total: complex
    d_sum: float
    e_sum: float
    per_sequence: list = field(default_factory=list)

    @property
    def imag_residual(self):
        return 0.0 if isinstance(self.total, Fraction) else abs(self.total.imag)

    @property
    def real(self):
        return self.total if isinstance(self.total, Fraction) else self.total.real


def _check_moment_input(f, m):
    q = f.order
    if q % 2 or q not in _MAX_M:
        raise DomainError("moments are supported for q in {2, 4}, got %d" % q)
    if not isinstance(m, int) or m < 2 or m > _MAX_M[q]:
        raise BoundedInputError("m must be in [2, %d] for q=%d" % (_MAX_M[q], q))
    _check_mirror(f)


def _check_mirror(f):
    if f.order % 2:
        raise DomainError("the kernel order must be even, got %d" % f.order)
    tol = 0 if f.exact else MIRROR_TOL
    if not is_mirror_symmetric(f, tol):
        raise DomainError("kernel is not mirror symmetric (tol %g)" % tol)


def _real(x):
    return x if isinstance(x, Fraction) else complex(x).real


def wigner_moment(f, m, keep_sequences=True):
    """phi[I(f)^m] as a sum over closing contraction sequences.

    Nested contractions are evaluated strictly left to right; sequences
    sharing a prefix reuse the cached prefix kernel.
    """
    _check_moment_input(f, m)
    q = f.order
    zero = Fraction(0) if f.exact else 0j
    terms = []

    def walk(prefix, g):
        steps = len(prefix)
        if steps == m - 1:
            terms.append((prefix, g.value))
            return
        for rk in range(min(q, g.order) + 1):
            if g.order + q - 2 * rk > q * (m - 2 - steps):
                continue
            walk(prefix + (rk,), contract(g, f, rk))

    walk((), f)
    total, d_sum, e_sum = zero, zero, zero
    per_sequence = []
    half = q // 2
    for r, val in terms:
        total += val
        if all(rk in (0, half, q) for rk in r):
            d_sum += val
        else:
            e_sum += val
        if keep_sequences:
            per_sequence.append((ContractionSequence(q, r), val))
    return MomentReport(m, total, _real(d_sum), _real(e_sum), per_sequence)


def sequence_value(f, seq):
    """The nested scalar ``(...(f ~r_1 f) ...) ~r_{m-1} f``."""
    if seq.q != f.order:
        raise ShapeError("sequence built for q=%d, kernel has order %d"
                         % (seq.q, f.order))
    g = f
    for rk in seq.r:
        g = contract(g, f, rk)
    if g.order:
        raise ClassificationError("sequence %s does not close" % (seq,))
    return g.value


def wigner_product_expand(f, g):
    """Chaos decomposition of ``I(f) I(g)``: order -> kernel."""
    if f.dim != g.dim:
        raise ShapeError("dimension mismatch")
    out = {}
    for r in range(min(f.order, g.order) + 1):
        h = contract(f, g, r)
        out[h.order] = axpy(1, out[h.order], h) if h.order in out else h
    return out


def fourth_moment_statistic(f):
    """phi(F^4) - 2 phi(F^3); tends to 2 lam^2 - lam at a free Poisson
    limit."""
    m4 = wigner_moment(f, 4, keep_sequences=False).total
    m3 = wigner_moment(f, 3, keep_sequences=False).total
    return _real(m4 - 2 * m3)


@dataclass
class PoissonDefect:
    midpoint: float
    offband: dict

    @property
    def total(self):
        return self.midpoint + sum(self.offband.values())


def poisson_defect(f):
    """Squared norms ``||f ~q/2 f - f||^2`` and ``||f ~r f||^2`` for the
    off-band ``r`` in ``1..q-1`` other than ``q/2``."""
    _check_mirror(f)
    q = f.order
    if q == 0:
        return PoissonDefect(norm_sq(f) * 0, {})
    half = q // 2
    mid = axpy(-1, f, contract(f, f, half))
    offband = {r: norm_sq(contract(f, f, r))
               for r in range(1, q) if r != half}
    return PoissonDefect(norm_sq(mid), offband)


@dataclass
class LemmaDecomposition:
    lhs: float
    rhs: float
    pieces: dict


def lemma2_decomposition(f):
    """Both sides of the variance identity

        phi[(F^2 - F)^2] = 2 lam^2 + ||f ~q/2 f - f||^2 + sum_r ||f ~r f||^2

    with ``lam = ||f||^2``.  The left side comes from the moment engine,
    the right side from contraction norms only.
    """
    _check_moment_input(f, 4)
    mu = {m: wigner_moment(f, m, keep_sequences=False).total for m in (2, 3, 4)}
    lhs = _real(mu[4] - 2 * mu[3] + mu[2])
    lam = norm_sq(f)
    defect = poisson_defect(f)
    rhs = 2 * lam ** 2 + defect.total
    pieces = {"two_lambda_sq": 2 * lam ** 2, "midpoint": defect.midpoint,
              "offband": dict(defect.offband)}
    return LemmaDecomposition(lhs, rhs, pieces)


@dataclass
class DominationRecord:
    term: float
    bound_factor: float
    envelope: float
    first_offband_step: int

    @property
    def holds(self):
        return self.term <= self.envelope * self.bound_factor + 1e-12


def em_domination_check(f, seq):
    """Compare an E-class term with ``||f ~r_j f||`` for its first off-band
    contraction ``r_j``; the constant is the envelope ``(1 + ||f||)^{2m}``."""
    if seq.q != f.order:
        raise ShapeError("sequence built for q=%d, kernel has order %d"
                         % (seq.q, f.order))
    if seq.classification != B_AND_E:
        raise ClassificationError("%s is not in E_%d" % (seq, seq.m))
    _check_mirror(f)
    q = f.order
    j = next(k for k, rk in enumerate(seq.r) if rk not in (0, q // 2, q))
    term = abs(complex(sequence_value(f, seq)))
    bound = norm(contract(f, f, seq.r[j]))
    envelope = (1.0 + norm(f)) ** (2 * seq.m)
    return DominationRecord(term, bound, envelope, j + 1)


# ---------------------------------------------------------------------------
# convergence scans


def poisson_family(p, d, exact=False):
    """Constant family at the free Poisson fixed point, rate ``p``."""
    kernel = poisson_kernel(p, d, exact=exact)
    return lambda n: kernel


def semicircle4_family(lam):
    """``sqrt(lam / n) * sum_{i<n} e_i^{(x)4}``: squared norm ``lam``, with a
    semicircular (not free Poisson) limit."""
    return lambda n: diagonal_kernel(n, 4, (float(lam) / n) ** 0.5)


@dataclass
class ScanRow:
    n: int
    norm_sq: float
    statistic: float
    statistic_gap: float
    defect: PoissonDefect
    moments: dict
    moment_gaps: dict


@dataclass
class ScanTable:
    lam: float
    target_statistic: float
    rows: list
    trend: dict


def _trend(values):
    diffs = [b - a for a, b in zip(values, values[1:])]
    if all(abs(x) <= 1e-15 for x in diffs):
        return "constant"
    if all(x <= 1e-15 for x in diffs):
        return "decreasing"
    if all(x >= -1e-15 for x in diffs):
        return "increasing"
    return "mixed"


def convergence_scan(family, lam, m_max, n_list, norm_tol=1e-8):
    """Tabulate the fourth-moment statistic, the Poisson defect and the
    moment gaps to Z(lam) along ``family(n)`` for ``n`` in ``n_list``."""
    if m_max < 2:
        raise BoundedInputError("m_max must be at least 2")
    target = 2 * lam ** 2 - lam
    rows = []
    for n in n_list:
        f = family(n)
        nsq = norm_sq(f)
        if abs(nsq - lam) > norm_tol:
            raise NormalizationError("||f_%d||^2 = %r, expected %r"
                                     % (n, nsq, lam))
        moments = {m: _real(wigner_moment(f, m, keep_sequences=False).total)
                   for m in range(2, max(m_max, 4) + 1)}
        stat = moments[4] - 2 * moments[3]
        gaps = {m: abs(moments[m] - centered_poisson_moment(lam, m))
                for m in range(2, m_max + 1)}
        rows.append(ScanRow(n, nsq, stat, abs(stat - target), poisson_defect(f),
                            {m: moments[m] for m in range(2, m_max + 1)}, gaps))
    trend = {"statistic_gap": _trend([float(r.statistic_gap) for r in rows]),
             "defect_total": _trend([float(r.defect.total) for r in rows])}
    for m in range(2, m_max + 1):
        trend["gap_%d" % m] = _trend([float(r.moment_gaps[m]) for r in rows])
    return ScanTable(lam, target, rows, trend)


def kernel_summary(f):
    """Handy one-shot diagnostics used by the CLI."""
    return {"order": f.order, "dim": f.dim, "norm_sq": norm_sq(f),
            "mirror_gap": max_abs_diff(f, adjoint(f))}

"""Finite-rank kernels: coefficient tensors over an orthonormal family.

A kernel of order ``q`` over ``d`` basis functions ``e_0..e_{d-1}`` is
``f = sum c[i_1..i_q] e_{i_1} (x) ... (x) e_{i_q}``.  Because the family is
orthonormal, every integral operation on ``f`` (adjoint, contraction,
inner product) is the corresponding finite sum over coefficients, with
no discretization error.

Kernels are stored densely by default.  Large structured kernels (a
diagonal kernel over hundreds of basis functions, say) can be stored as
coalesced coordinate lists instead; every operation accepts both and
returns a sparse kernel when either operand is sparse.

Coefficients are complex binary64, or exact :class:`~fractions.Fraction`
values held in object arrays (real kernels only).  Library indices are
0-based; the text format is 1-based.
"""

from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import CapacityError, KernelFormatError, ShapeError

#: Dense results larger than this many entries are refused.
MAX_DENSE_ENTRIES = 1 << 25

DEFAULT_TOL = 1e-12


def _as_fraction_array(a):
    out = np.empty(a.shape, dtype=object)
    flat = out.reshape(-1)
    for k, v in enumerate(np.asarray(a, dtype=object).reshape(-1)):
        if isinstance(v, complex):
            if v.imag:
                raise ValueError("exact kernels must be real")
            v = v.real
        flat[k] = Fraction(v)
    return out


class Kernel:
    """Order-``q`` kernel over a ``d``-element orthonormal basis."""

    __slots__ = ("order", "dim", "exact", "_dense", "_idx", "_val")

    def __init__(self, coeffs, dim=None, exact=None):
        a = np.asarray(coeffs)
        if exact is None:
            exact = a.dtype == object
        if a.ndim == 0:
            if dim is None:
                raise ShapeError("an order-0 kernel needs an explicit dim")
        else:
            if len(set(a.shape)) != 1:
                raise ShapeError("coefficient array must be hypercubic, got %s"
                                 % (a.shape,))
            if dim is not None and dim != a.shape[0]:
                raise ShapeError("dim %d does not match array" % dim)
            dim = a.shape[0]
        if dim < 1:
            raise ShapeError("dim must be positive")
        self.order = a.ndim
        self.dim = int(dim)
        self.exact = bool(exact)
        self._dense = _as_fraction_array(a) if exact else a.astype(complex)
        self._idx = self._val = None

    @classmethod
    def _raw(cls, a, dim, exact):
        # trusted internal path: ``a`` already has the right dtype/entries
        self = cls.__new__(cls)
        self.order, self.dim, self.exact = a.ndim, int(dim), exact
        self._dense, self._idx, self._val = a, None, None
        return self

    @classmethod
    def from_entries(cls, order, dim, idx, vals, exact=False):
        """Sparse kernel from coordinate lists; duplicates are summed."""
        self = cls.__new__(cls)
        self.order, self.dim, self.exact = int(order), int(dim), bool(exact)
        if exact:
            vals = _as_fraction_array(np.asarray(vals, dtype=object).reshape(-1))
        else:
            vals = np.asarray(vals, dtype=complex).reshape(-1)
        idx = np.asarray(idx, dtype=np.int64)
        if idx.size != len(vals) * order:
            raise ShapeError("index and value lists differ in length")
        idx = idx.reshape(len(vals), order)
        if idx.size and (idx.min() < 0 or idx.max() >= dim):
            raise ShapeError("index out of range for dim %d" % dim)
        self._dense = None
        self._idx, self._val = _coalesce(idx, vals)
        return self

    @classmethod
    def zeros(cls, order, dim, exact=False, sparse=False):
        if sparse:
            return cls.from_entries(order, dim, np.zeros((0, order)), [], exact)
        dt = object if exact else complex
        a = np.zeros((dim,) * order, dtype=dt)
        if exact:
            a = _as_fraction_array(a)
        return cls(a, dim=dim, exact=exact)

    @property
    def is_sparse(self):
        return self._dense is None

    @property
    def dense(self):
        if self._dense is None:
            size = self.dim ** self.order
            if size > MAX_DENSE_ENTRIES:
                raise CapacityError("dense form would hold %d entries" % size)
            a = Kernel.zeros(self.order, self.dim, self.exact)._dense
            if len(self._val) and self.order == 0:
                a[()] = self._val[0]
            elif len(self._val):
                a[tuple(self._idx.T)] = self._val
            return a
        return self._dense

    def entries(self):
        """Coordinates and values of the non-zero coefficients."""
        if self._dense is not None:
            a = self._dense
            mask = a != 0
            if a.ndim == 0:
                return (np.zeros((int(bool(mask)), 0), dtype=np.int64),
                        a.reshape(1)[mask.reshape(1)])
            return np.argwhere(mask).astype(np.int64), a[mask]
        return self._idx, self._val

    def to_sparse(self):
        if self.is_sparse:
            return self
        idx, val = self.entries()
        return Kernel.from_entries(self.order, self.dim, idx, val, self.exact)

    def to_dense(self):
        return self if not self.is_sparse else Kernel(self.dense, self.dim,
                                                      self.exact)

    def to_float(self):
        if not self.exact:
            return self
        if self.is_sparse:
            return Kernel.from_entries(self.order, self.dim, self._idx,
                                       self._val.astype(complex))
        return Kernel(self._dense.astype(complex), self.dim)

    @property
    def nnz(self):
        return len(self.entries()[1])

    @property
    def value(self):
        """The scalar held by an order-0 kernel."""
        if self.order != 0:
            raise ShapeError("only order-0 kernels are scalars")
        idx, val = self.entries()
        if len(val):
            return val[0] if self.exact else complex(val[0])
        return Fraction(0) if self.exact else 0j

    def __getitem__(self, index):
        return self.dense[index]

    def __neg__(self):
        return scale(-1, self)

    def __add__(self, other):
        return axpy(1, self, other)

    def __sub__(self, other):
        return axpy(-1, other, self)

    def __mul__(self, alpha):
        return scale(alpha, self)

    __rmul__ = __mul__

    def __repr__(self):
        kind = "sparse" if self.is_sparse else "dense"
        return "Kernel(order=%d, dim=%d, %s, nnz=%d%s)" % (
            self.order, self.dim, kind, self.nnz, ", exact" if self.exact else "")


def _coalesce(idx, val):
    """Sort rows, sum duplicates and drop zeros."""
    if len(val) == 0:
        return idx.reshape(0, idx.shape[1]), val
    if idx.shape[1] == 0:
        s = val.sum()
        keep = np.array([s != 0])
        return idx[:1][keep], np.array([s], dtype=val.dtype)[keep]
    order = np.lexsort(idx.T[::-1])
    idx, val = idx[order], val[order]
    new = np.ones(len(idx), dtype=bool)
    new[1:] = np.any(idx[1:] != idx[:-1], axis=1)
    starts = np.flatnonzero(new)
    val = np.add.reduceat(val, starts)
    idx = idx[starts]
    keep = np.asarray(val != 0, dtype=bool)
    return idx[keep], val[keep]


def _match(keys_a, keys_b):
    """All pairs ``(i, j)`` with ``keys_a[i] == keys_b[j]`` (row equality)."""
    na = len(keys_a)
    if na == 0 or len(keys_b) == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    if keys_a.shape[1] == 0:
        ia = np.repeat(np.arange(na), len(keys_b))
        ib = np.tile(np.arange(len(keys_b)), na)
        return ia, ib
    _, inv = np.unique(np.concatenate([keys_a, keys_b]), axis=0,
                       return_inverse=True)
    inv = inv.reshape(-1)
    ida, idb = inv[:na], inv[na:]
    border = np.argsort(idb, kind="stable")
    sorted_b = idb[border]
    lo = np.searchsorted(sorted_b, ida, side="left")
    hi = np.searchsorted(sorted_b, ida, side="right")
    counts = hi - lo
    total = int(counts.sum())
    ia = np.repeat(np.arange(na), counts)
    first = np.repeat(lo, counts)
    within = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    ib = border[first + within]
    return ia, ib


def _promote(*kernels):
    """Bring operands to a common numeric mode and storage."""
    dims = {k.dim for k in kernels}
    if len(dims) != 1:
        raise ShapeError("dimension mismatch: %s" % sorted(dims))
    if not all(k.exact for k in kernels):
        kernels = tuple(k.to_float() for k in kernels)
    if any(k.is_sparse for k in kernels):
        kernels = tuple(k.to_sparse() for k in kernels)
    return kernels


def _coerce_scalar(alpha, exact):
    if exact:
        if isinstance(alpha, Rational):
            return Fraction(alpha)
        if isinstance(alpha, complex) and alpha.imag == 0:
            alpha = alpha.real
        if isinstance(alpha, float) and alpha.is_integer():
            return Fraction(int(alpha))
        return None
    return complex(alpha)


def scale(alpha, f):
    a = _coerce_scalar(alpha, f.exact)
    if a is None:
        f, a = f.to_float(), complex(alpha)
    if f.is_sparse:
        idx, val = f.entries()
        return Kernel.from_entries(f.order, f.dim, idx, val * a, f.exact)
    return Kernel(f.dense * a, f.dim, f.exact)


def axpy(alpha, f, g):
    """``alpha * f + g``."""
    if f.order != g.order:
        raise ShapeError("order mismatch: %d vs %d" % (f.order, g.order))
    f, g = _promote(f, g)
    f = scale(alpha, f)
    f, g = _promote(f, g)
    if f.is_sparse:
        fi, fv = f.entries()
        gi, gv = g.entries()
        return Kernel.from_entries(f.order, f.dim, np.concatenate([fi, gi]),
                                   np.concatenate([fv, gv]), f.exact)
    return Kernel._raw(f.dense + g.dense, f.dim, f.exact)


def adjoint(f):
    """Reverse the argument order and conjugate."""
    if f.is_sparse:
        idx, val = f.entries()
        return Kernel.from_entries(f.order, f.dim, idx[:, ::-1],
                                   np.conj(val), f.exact)
    a = f.dense.transpose(tuple(range(f.order))[::-1])
    return Kernel._raw(np.conj(a), f.dim, f.exact)


def max_abs_diff(f, g):
    idx, val = axpy(-1, g, f).entries()
    return float(np.max(np.abs(val.astype(complex)))) if len(val) else 0.0


def is_mirror_symmetric(f, tol=DEFAULT_TOL):
    return max_abs_diff(f, adjoint(f)) <= tol


def contract(f, g, r):
    """The r-th contraction of ``f`` and ``g``.

    The last ``r`` arguments of ``f``, read right to left, are paired with
    the first ``r`` arguments of ``g``, read left to right.  ``r = 0`` is the
    tensor product; for equal orders ``r = q`` gives ``<f, g*>``.
    """
    q, p = f.order, g.order
    if not isinstance(r, (int, np.integer)) or r < 0 or r > min(q, p):
        raise ShapeError("contraction index %r outside [0, %d]" % (r, min(q, p)))
    f, g = _promote(f, g)
    d = f.dim
    out_order = q + p - 2 * r
    if f.is_sparse:
        fi, fv = f.entries()
        gi, gv = g.entries()
        fkey = fi[:, [q - 1 - k for k in range(r)]]
        ia, ib = _match(fkey, gi[:, :r])
        idx = np.concatenate([fi[ia, :q - r], gi[ib, r:]], axis=1)
        return Kernel.from_entries(out_order, d, idx, fv[ia] * gv[ib], f.exact)
    if d ** out_order > MAX_DENSE_ENTRIES:
        raise CapacityError("contraction result would hold %d entries; "
                            "use sparse kernels" % d ** out_order)
    # explicit axis reversal: column k of the matrix is y_1..y_r in order
    axes = tuple(range(q - r)) + tuple(q - 1 - k for k in range(r))
    left = f.dense.transpose(axes).reshape(d ** (q - r), d ** r)
    right = g.dense.reshape(d ** r, d ** (p - r))
    prod = (left @ right).reshape((d,) * out_order)
    return Kernel._raw(prod, d, f.exact)


def tensor(f, g):
    return contract(f, g, 0)


def inner_product(f, g):
    """``<f, g> = sum conj(f) g``."""
    if f.order != g.order:
        raise ShapeError("order mismatch: %d vs %d" % (f.order, g.order))
    f, g = _promote(f, g)
    if f.is_sparse:
        fi, fv = f.entries()
        gi, gv = g.entries()
        ia, ib = _match(fi, gi)
        prod = np.conj(fv[ia]) * gv[ib]
    else:
        prod = np.conj(f.dense) * g.dense
    s = prod.sum()
    if f.exact:
        return Fraction(s)
    return complex(s)


def norm_sq(f):
    val = f.entries()[1]
    if f.exact:
        return sum((v * v for v in val), Fraction(0))
    return float(np.vdot(val, val).real)


def norm(f):
    return float(norm_sq(f)) ** 0.5


def basis_kernel(indices, dim, coeff=1, exact=False):
    """``coeff * e_{i_1} (x) ... (x) e_{i_q}`` (0-based indices)."""
    dt = object if exact else complex
    a = np.zeros((dim,) * len(indices), dtype=dt)
    if exact:
        a = _as_fraction_array(a)
    a[tuple(indices)] = Fraction(coeff) if exact else coeff
    return Kernel(a, dim, exact)


def poisson_kernel(p, d, exact=False):
    """``sum_{i<p} e_i (x) e_i``, whose Wigner integral is centered free
    Poisson with rate p."""
    if p < 1:
        raise ShapeError("p must be positive")
    if p > d:
        raise CapacityError("p = %d basis vectors do not fit in dim %d" % (p, d))
    a = np.zeros((d, d), dtype=object if exact else complex)
    if exact:
        a = _as_fraction_array(a)
    for i in range(p):
        a[i, i] = Fraction(1) if exact else 1.0
    return Kernel(a, d, exact)


def diagonal_kernel(n, order, coeff, dim=None):
    """Sparse ``coeff * sum_{i<n} e_i^{(x) order}``."""
    dim = n if dim is None else dim
    if n > dim:
        raise CapacityError("n = %d exceeds dim %d" % (n, dim))
    idx = np.repeat(np.arange(n)[:, None], order, axis=1)
    return Kernel.from_entries(order, dim, idx, np.full(n, coeff, dtype=complex))


def random_kernel(rng, order, dim, mirror=True, complex_=False):
    """Coefficients uniform in [-1, 1] (real and imaginary parts), then
    mirror-symmetrized as ``(f + f*) / 2`` when ``mirror`` is set."""
    a = rng.uniform(-1, 1, size=(dim,) * order).astype(complex)
    if complex_:
        a = a + 1j * rng.uniform(-1, 1, size=(dim,) * order)
    f = Kernel(a, dim)
    if mirror:
        f = scale(0.5, f + adjoint(f))
    return f


# ---------------------------------------------------------------------------
# text format:  "q d" header, then "i_1 ... i_q re im" per non-zero entry


def _parse_number(tok, exact, lineno):
    try:
        return Fraction(tok) if exact else float(tok)
    except (ValueError, ZeroDivisionError):
        raise KernelFormatError("bad number %r" % tok, lineno) from None


def parse_kernel(text, exact=False):
    header = None
    idx, vals, seen = [], [], {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if header is None:
            if len(toks) != 2:
                raise KernelFormatError("header must be 'q d'", lineno)
            try:
                q, d = int(toks[0]), int(toks[1])
            except ValueError:
                raise KernelFormatError("header must hold two integers",
                                        lineno) from None
            if q < 0 or d < 1:
                raise KernelFormatError("need q >= 0 and d >= 1", lineno)
            header = (q, d)
            continue
        q, d = header
        if len(toks) != q + 2:
            raise KernelFormatError("expected %d fields, got %d"
                                    % (q + 2, len(toks)), lineno)
        try:
            key = tuple(int(t) for t in toks[:q])
        except ValueError:
            raise KernelFormatError("indices must be integers", lineno) from None
        if any(i < 1 or i > d for i in key):
            raise KernelFormatError("index out of range 1..%d" % d, lineno)
        if key in seen:
            raise KernelFormatError("duplicate entry %s (first on line %d)"
                                    % (key, seen[key]), lineno)
        seen[key] = lineno
        re_, im = (_parse_number(t, exact, lineno) for t in toks[q:])
        if exact:
            if im != 0:
                raise KernelFormatError("exact mode needs real coefficients",
                                        lineno)
            vals.append(re_)
        else:
            vals.append(complex(re_, im))
        idx.append([i - 1 for i in key])
    if header is None:
        raise KernelFormatError("empty kernel file")
    q, d = header
    f = Kernel.from_entries(q, d, np.array(idx, dtype=np.int64),
                            np.array(vals, dtype=object if exact else complex),
                            exact)
    return f.to_dense() if d ** q <= 1 << 16 else f


def read_kernel(path, exact=False):
    with open(path) as fh:
        return parse_kernel(fh.read(), exact)


def format_kernel(f):
    lines = ["%d %d" % (f.order, f.dim)]
    idx, val = f.entries()
    for row, v in zip(idx, val):
        if f.exact:
            nums = "%s 0" % v
        else:
            v = complex(v)
            nums = "%.17g %.17g" % (v.real, v.imag)
        lines.append(" ".join([str(int(i) + 1) for i in row] + [nums]))
    return "\n".join(lines) + "\n"


def write_kernel(f, path):
    with open(path, "w") as fh:
        fh.write(format_kernel(f))

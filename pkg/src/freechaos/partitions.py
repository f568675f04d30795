"""Non-crossing partitions and the Catalan / Riordan counts.

Partitions are generated through the block containing ``1``: once that
block ``{1 = a_1 < a_2 < ... < a_k}`` is fixed, the gaps between
consecutive elements (and the tail after ``a_k``) are filled by
independent non-crossing partitions.  Walking the first blocks in
lexicographic order and the gaps left to right yields the partitions in
lexicographic order of their canonical form, so no sorting is needed.

All counts are Python integers, hence exact at any size.
"""

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from itertools import chain, product
from math import comb

from .errors import BoundedInputError

#: Largest ground set that is enumerated explicitly (C_14 = 2,674,440).
MAX_ENUM = 14


@dataclass(frozen=True)
class Partition:
    """A set partition of ``{1..ground_size}`` in canonical form.

    Blocks are tuples sorted ascending and the block tuple is ordered by
    block minimum.  Use :meth:`from_blocks` to canonicalize arbitrary
    input.
    """

    ground_size: int
    blocks: tuple

    def __post_init__(self):
        seen = sorted(x for b in self.blocks for x in b)
        if self.ground_size < 1:
            raise ValueError("ground set must be non-empty")
        if any(len(b) == 0 for b in self.blocks):
            raise ValueError("empty block")
        if seen != list(range(1, self.ground_size + 1)):
            raise ValueError("blocks must be disjoint and cover 1..%d"
                             % self.ground_size)

    @classmethod
    def from_blocks(cls, blocks, ground_size=None):
        canon = tuple(sorted((tuple(sorted(b)) for b in blocks),
                             key=lambda b: b[0] if b else 0))
        if ground_size is None:
            ground_size = sum(len(b) for b in canon)
        return cls(ground_size, canon)

    @property
    def n_blocks(self):
        return len(self.blocks)

    def block_sizes(self):
        return tuple(len(b) for b in self.blocks)

    def has_singletons(self):
        return any(len(b) == 1 for b in self.blocks)

    def __str__(self):
        return "{" + ",".join("{" + ",".join(map(str, b)) + "}"
                              for b in self.blocks) + "}"


def is_noncrossing(p):
    """Return True iff no ``a < b < c < e`` has ``a, c`` in one block and
    ``b, e`` in another."""
    label = {}
    for k, block in enumerate(p.blocks):
        for x in block:
            label[x] = k
    # Two blocks cross iff, seen as arcs between consecutive elements, some
    # element of one block sits strictly inside an arc of the other while
    # another element of it sits outside.  Checking all arcs is O(m^2).
    for block in p.blocks:
        for lo, hi in zip(block, block[1:]):
            inside = {label[x] for x in range(lo + 1, hi)}
            for x in range(1, p.ground_size + 1):
                if (x < lo or x > hi) and label[x] in inside:
                    return False
    return True


def _check_m(m):
    if not isinstance(m, int) or m < 1 or m > MAX_ENUM:
        raise BoundedInputError("m must be an integer in [1, %d], got %r"
                                % (MAX_ENUM, m))


_CACHED_SEGMENT = 10


def _nc_segment(lo, hi, min_block):
    """Yield block tuples of the non-crossing partitions of ``lo..hi``.

    Blocks smaller than ``min_block`` are never produced, which gives the
    singleton-free partitions directly when ``min_block == 2``.
    """
    if hi - lo < _CACHED_SEGMENT:
        return iter(_segment_list(lo, hi, min_block))
    return _segment_gen(lo, hi, min_block)


@lru_cache(maxsize=None)
def _segment_list(lo, hi, min_block):
    return tuple(_segment_gen(lo, hi, min_block))


def _first_blocks(block, hi, min_block):
    # preorder DFS over subsets containing block[0]: lexicographic order
    if len(block) >= min_block:
        yield block
    for nxt in range(block[-1] + 1, hi + 1):
        yield from _first_blocks(block + (nxt,), hi, min_block)


def _segment_gen(lo, hi, min_block):
    if lo > hi:
        yield ()
        return
    for block in _first_blocks((lo,), hi, min_block):
        gaps = [_nc_segment(a + 1, b - 1, min_block)
                for a, b in zip(block, block[1:] + (hi + 1,))]
        if len(gaps) == 1:
            for rest in gaps[0]:
                yield (block,) + rest
            continue
        # later gaps are re-iterated, so materialize them
        gaps = [gaps[0]] + [list(g) for g in gaps[1:]]
        for parts in product(*gaps):
            yield (block,) + tuple(chain.from_iterable(parts))


def iter_nc(m, singleton_free=False):
    """Lazily yield the block tuples of NC(m) in canonical order."""
    _check_m(m)
    return _nc_segment(1, m, 2 if singleton_free else 1)


def enumerate_nc(m):
    """Return NC(m) as a list of :class:`Partition` in lexicographic
    order of canonical form."""
    return [Partition(m, blocks) for blocks in iter_nc(m)]


def catalan(m):
    if m < 0:
        raise BoundedInputError("m must be non-negative")
    return comb(2 * m, m) // (m + 1)


def riordan(m):
    """R_m by binomial inversion of the Catalan numbers."""
    if m < 0:
        raise BoundedInputError("m must be non-negative")
    return sum(comb(m, j) * (-1) ** (m - j) * catalan(j)
               for j in range(m + 1))


@lru_cache(maxsize=None)
def _refined_counts(m):
    counts = Counter(len(blocks) for blocks in iter_nc(m, singleton_free=True))
    return tuple(counts.get(j, 0) for j in range(m + 1))


def riordan_refined(m, j):
    """Number of singleton-free non-crossing partitions of [m] with exactly
    ``j`` blocks."""
    _check_m(m)
    if not isinstance(j, int) or j < 1 or j > m:
        raise BoundedInputError("j must be an integer in [1, m], got %r" % (j,))
    return _refined_counts(m)[j]


@lru_cache(maxsize=None)
def block_type_counts(m):
    """Multiplicity of each block-size multiset across NC(m).

    Returns a tuple of ``(sizes, count)`` pairs with ``sizes`` sorted
    descending.  Moment sums over NC(m) only depend on block sizes, so
    grouping them once makes repeated transforms cheap.
    """
    counts = Counter(tuple(sorted((len(b) for b in blocks), reverse=True))
                     for blocks in iter_nc(m))
    return tuple(sorted(counts.items(), reverse=True))


@dataclass(frozen=True)
class CountTable:
    max_m: int
    catalan: tuple
    riordan: tuple
    refined: tuple  # refined[m][j] for 0 <= j <= m; refined[0] == (0,)

    def rows(self):
        for m in range(self.max_m + 1):
            yield m, self.catalan[m], self.riordan[m], self.refined[m]


def count_table(max_m):
    if not isinstance(max_m, int) or max_m < 0 or max_m > MAX_ENUM:
        raise BoundedInputError("max_m must be in [0, %d]" % MAX_ENUM)
    cat = tuple(catalan(m) for m in range(max_m + 1))
    rio = tuple(riordan(m) for m in range(max_m + 1))
    refined = ((0,),) + tuple(_refined_counts(m) for m in range(1, max_m + 1))
    return CountTable(max_m, cat, rio, refined)

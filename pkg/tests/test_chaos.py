from fractions import Fraction

import numpy as np
import pytest

from freechaos.chaos import (A, B, B_AND_D, B_AND_E, D, E, ContractionSequence,
                             classify, convergence_scan, em_domination_check,
                             enumerate_sequences, fourth_moment_statistic,
                             lemma2_decomposition, poisson_defect,
                             poisson_family, semicircle4_family,
                             sequence_value, wigner_moment,
                             wigner_product_expand)
from freechaos.cumulants import centered_poisson_moment
from freechaos.errors import (BoundedInputError, ClassificationError,
                              DomainError, NormalizationError)
from freechaos.fock import oracle_moment
from freechaos.kernel import (Kernel, axpy, basis_kernel, contract,
                              diagonal_kernel, max_abs_diff, norm_sq,
                              poisson_kernel, random_kernel, scale, tensor)
from freechaos.partitions import riordan


def brute_sequences(q, m):
    """Every vector in {0..q}^{m-1}, filtered by the membership rules."""
    import itertools
    out = {A: [], B: [], D: [], E: []}
    for r in itertools.product(range(q + 1), repeat=m - 1):
        ok = all(r[k] <= (k + 1) * q - 2 * sum(r[:k]) for k in range(m - 1))
        if not ok:
            continue
        out[A].append(r)
        if 2 * sum(r) == m * q:
            out[B].append(r)
            key = D if all(x in (0, q // 2, q) for x in r) else E
            out[key].append(r)
    return out


@pytest.mark.parametrize("q", [2, 4, 6])
@pytest.mark.parametrize("m", range(2, 7))
def test_enumeration_matches_brute_force(q, m):
    brute = brute_sequences(q, m)
    for cls in (A, B, D, E):
        assert [s.r for s in enumerate_sequences(q, m, cls)] == brute[cls]


@pytest.mark.parametrize("q", [2, 4, 6])
@pytest.mark.parametrize("m", range(2, 9))
def test_b_splits_into_d_and_e(q, m):
    b = {s.r for s in enumerate_sequences(q, m, B)}
    d = {s.r for s in enumerate_sequences(q, m, D)}
    e = {s.r for s in enumerate_sequences(q, m, E)}
    assert d | e == b and not d & e
    assert len(d) == riordan(m)


def test_sequence_examples():
    assert [s.r for s in enumerate_sequences(2, 2, B)] == [(2,)]
    assert enumerate_sequences(2, 2, E) == []
    assert [s.r for s in enumerate_sequences(4, 2, B)] == [(4,)]
    assert ContractionSequence(4, (2, 4)).classification == B_AND_D
    assert ContractionSequence(4, (1, 3, 4)).classification == B_AND_E
    with pytest.raises(ClassificationError):
        classify(2, (3,))
    with pytest.raises(BoundedInputError):
        enumerate_sequences(3, 4, B)
    with pytest.raises(BoundedInputError):
        enumerate_sequences(2, 9, B)


@pytest.mark.parametrize("p", [1, 2, 3])
def test_poisson_kernel_moments_exact(p):
    f = poisson_kernel(p, p + 1, exact=True)
    for m in range(2, 9):
        rep = wigner_moment(f, m)
        assert rep.total == centered_poisson_moment(p, m)
        assert rep.d_sum == rep.total and rep.e_sum == 0
    assert fourth_moment_statistic(f) == 2 * p * p - p


def test_second_moment_is_norm():
    rng = np.random.default_rng(0)
    for q in (2, 4):
        f = random_kernel(rng, q, 3, complex_=True)
        rep = wigner_moment(f, 2)
        assert abs(rep.total - norm_sq(f)) <= 1e-12 * norm_sq(f)


def test_rank_one_q4_against_oracle():
    f = basis_kernel((0, 0, 0, 0), 1)
    expected = oracle_moment(f, 4, 16)
    assert wigner_moment(f, 4).total == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("seed", range(6))
def test_moments_real_and_sign_rule(seed):
    rng = np.random.default_rng(seed)
    q = 2 if seed % 2 else 4
    f = random_kernel(rng, q, 3, complex_=bool(seed % 3))
    for m in range(2, 6):
        rep = wigner_moment(f, m)
        assert rep.imag_residual <= 1e-10 * max(1, abs(rep.total))
        assert rep.total == pytest.approx(rep.d_sum + rep.e_sum, abs=1e-9)
        neg = wigner_moment(scale(-1, f), m)
        assert neg.total == (-1) ** m * rep.total


def test_domain_errors():
    with pytest.raises(DomainError):
        wigner_moment(basis_kernel((0, 1), 2), 3)
    with pytest.raises(DomainError):
        wigner_moment(basis_kernel((0, 0, 0), 2), 3)
    with pytest.raises(BoundedInputError):
        wigner_moment(poisson_kernel(1, 1), 9)
    with pytest.raises(BoundedInputError):
        wigner_moment(random_kernel(np.random.default_rng(0), 4, 2), 7)


def test_zero_kernel():
    z = Kernel.zeros(4, 2)
    assert wigner_moment(z, 4).total == 0
    assert fourth_moment_statistic(z) == 0
    rec = lemma2_decomposition(z)
    assert rec.lhs == rec.rhs == 0
    assert poisson_defect(z).total == 0


def test_product_expand():
    rng = np.random.default_rng(1)
    f, g = random_kernel(rng, 2, 3), random_kernel(rng, 2, 3)
    out = wigner_product_expand(f, g)
    assert sorted(out) == [0, 2, 4]
    assert out[0].value == pytest.approx(contract(f, g, 2).value)
    c = Kernel(np.array(1.5), dim=3)
    single = wigner_product_expand(f, c)
    assert list(single) == [2] and max_abs_diff(single[2], scale(1.5, f)) == 0
    p = poisson_kernel(2, 3)
    assert max_abs_diff(wigner_product_expand(p, p)[2], p) < 1e-15


def test_statistic_on_poisson():
    for p in (1, 2, 4):
        assert fourth_moment_statistic(poisson_kernel(p, p)) == pytest.approx(
            2 * p * p - p, abs=1e-12)


def test_semicircular_control_approaches_two_lambda_sq():
    lam = 1.5
    vals = [fourth_moment_statistic(semicircle4_family(lam)(n))
            for n in (4, 64, 1024)]
    # phi(F^3) ~ n^{-1/2}, so the statistic creeps up to 2 lam^2
    assert abs(vals[-1] - 2 * lam ** 2) < abs(vals[0] - 2 * lam ** 2)
    assert abs(vals[-1] - 2 * lam ** 2) < 0.15


def test_lemma_decomposition_poisson():
    for p in (1, 2, 3):
        rec = lemma2_decomposition(poisson_kernel(p, p, exact=True))
        assert rec.lhs == rec.rhs == 2 * p * p
        assert rec.pieces["midpoint"] == 0


@pytest.mark.parametrize("seed", range(10))
def test_lemma_decomposition_random(seed):
    rng = np.random.default_rng(100 + seed)
    f = random_kernel(rng, 4, int(rng.integers(2, 7)), complex_=seed % 2 == 1)
    rec = lemma2_decomposition(f)
    assert abs(rec.lhs - rec.rhs) <= 1e-10 * max(1, abs(rec.rhs))


def test_poisson_defect_examples():
    d = poisson_defect(poisson_kernel(3, 3))
    assert d.midpoint == 0 and d.offband == {}
    # f(t1..t4) = u(t1,t4) v(t2,t3) with u = e1(x)e1, v = e2(x)e2
    f = basis_kernel((0, 1, 1, 0), 2)
    d = poisson_defect(f)
    assert d.midpoint == 0
    assert d.offband[1] == 1
    assert d.total > 0


def test_em_domination():
    rng = np.random.default_rng(5)
    f = random_kernel(rng, 4, 3)
    for seq in enumerate_sequences(4, 4, E):
        rec = em_domination_check(f, seq)
        assert rec.holds
        assert rec.term == pytest.approx(abs(sequence_value(f, seq)))
    with pytest.raises(ClassificationError):
        em_domination_check(f, ContractionSequence(4, (2, 4)))
    # zero off-band contractions force zero E terms
    z = Kernel.zeros(4, 2)
    for seq in enumerate_sequences(4, 4, E):
        rec = em_domination_check(z, seq)
        assert rec.bound_factor == 0 and rec.term == 0 and rec.holds


def test_em_terms_vanish_for_diagonal_family():
    terms = []
    for n in (4, 16, 64):
        f = semicircle4_family(1.0)(n)
        worst = max(em_domination_check(f, s).term
                    for s in enumerate_sequences(4, 4, E))
        terms.append(worst)
    assert terms[0] > terms[1] > terms[2]


def test_scan_poisson_family():
    table = convergence_scan(poisson_family(2, 3), 2, 6, [1, 2, 3])
    for row in table.rows:
        assert all(g <= 1e-12 for g in row.moment_gaps.values())
        assert row.statistic_gap <= 1e-12
    assert table.trend["gap_4"] == "constant"


def test_scan_semicircle_family():
    table = convergence_scan(semicircle4_family(1.0), 1.0, 4, [4, 16, 64])
    assert all(row.moments[2] == pytest.approx(1.0) for row in table.rows)
    off = [sum(r.defect.offband.values()) for r in table.rows]
    assert off[0] > off[1] > off[2]
    assert table.rows[-1].moment_gaps[4] > 0.5


def test_scan_normalization_error():
    with pytest.raises(NormalizationError):
        convergence_scan(poisson_family(2, 2), 1.0, 4, [1])


def test_zero_padding_leaves_moments():
    rng = np.random.default_rng(9)
    f = random_kernel(rng, 4, 2)
    padded = Kernel(np.pad(f.dense, [(0, 1)] * 4))
    for m in range(2, 5):
        assert wigner_moment(padded, m).total == pytest.approx(
            wigner_moment(f, m).total, rel=1e-12)
    assert poisson_defect(padded).total == pytest.approx(
        poisson_defect(f).total, rel=1e-12)


def test_deterministic_reports():
    f = random_kernel(np.random.default_rng(11), 4, 3)
    a, b = wigner_moment(f, 5), wigner_moment(f, 5)
    assert a.total == b.total
    assert [v for _, v in a.per_sequence] == [v for _, v in b.per_sequence]

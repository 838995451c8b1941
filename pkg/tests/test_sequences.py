import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsor.complex import (
    ComplexError,
    HilbertComplex,
    betti_numbers,
    conjugate,
    harmonic_basis,
    log_torsion_det,
    random_complex,
    random_gram,
    random_invertible,
)
from torsor.sequences import (
    ChainMap,
    ConditioningWarning,
    build_les,
    chain_iso_transfer,
    connecting_homomorphism,
    identity_map,
    induced_cohomology_map,
    length2_torsion,
    milnor_residual,
    milnor_terms,
    random_ses,
    split_ses,
)


def class_defect(a_vecs, basis_a, c, j):
    """Distance of ``basis_a - a_vecs`` from ``im d_{j-1}`` (columnwise, worst case)."""
    diff = basis_a - a_vecs
    if j == 0 or c.d(j - 1).size == 0:
        return float(np.linalg.norm(diff))
    sol, *_ = np.linalg.lstsq(c.d(j - 1), diff, rcond=None)
    return float(np.linalg.norm(c.d(j - 1) @ sol - diff))


def brute_force_delta_defect(s, k, rng):
    """Zigzag with arbitrary least-squares lifts; compares classes, not harmonic coordinates."""
    delta = connecting_homomorphism(s, k)
    hb = harmonic_basis(s.B, k)
    ha = harmonic_basis(s.A, k + 1)
    worst = 0.0
    for col in range(hb.shape[1]):
        b = hb[:, col]
        lift, *_ = np.linalg.lstsq(s.beta[k], b, rcond=None)
        if s.alpha[k].shape[1]:
            lift = lift + s.alpha[k] @ rng.standard_normal(s.alpha[k].shape[1])
        y = s.C.d(k) @ lift
        a, *_ = np.linalg.lstsq(s.alpha[k + 1], y, rcond=None)
        worst = max(worst, class_defect(a[:, None], (ha @ delta[:, col])[:, None], s.A, k + 1))
    return worst


# ---------------------------------------------------------------- induced maps


def test_induced_identity():
    c = random_complex((2, 3, 2), seed=1, random_grams=True)
    for j in c.degrees():
        h = induced_cohomology_map(identity_map(c), j)
        np.testing.assert_allclose(h, np.eye(h.shape[0]), atol=1e-10)


def test_induced_scalar_on_zero_differentials():
    c = HilbertComplex.zero((2, 3))
    f = ChainMap.build(c, c, [2.5 * np.eye(2), 2.5 * np.eye(3)])
    np.testing.assert_allclose(induced_cohomology_map(f, 1), 2.5 * np.eye(3), atol=1e-12)


def test_induced_rejects_non_chain_map():
    c = HilbertComplex.build([[[1.0]]])
    f = ChainMap.build(c, c, [np.eye(1), 2 * np.eye(1)])
    with pytest.raises(ComplexError):
        induced_cohomology_map(f, 0)


def test_induced_functorial():
    rng = np.random.default_rng(3)
    c0 = random_complex((2, 4, 3, 1), seed=5, random_grams=True)
    f = [random_invertible(n, rng) for n in c0.dims]
    g = [random_invertible(n, rng) for n in c0.dims]
    c1 = conjugate(c0, [np.linalg.inv(x) for x in f])  # f: c0 -> c1 is a chain map
    c2 = conjugate(c1, [np.linalg.inv(x) for x in g])
    fm, gm = ChainMap.build(c0, c1, f), ChainMap.build(c1, c2, g)
    for j in c0.degrees():
        lhs = induced_cohomology_map(gm.compose(fm), j)
        rhs = induced_cohomology_map(gm, j) @ induced_cohomology_map(fm, j)
        np.testing.assert_allclose(lhs, rhs, atol=1e-9)


# ---------------------------------------------------------------- connecting homomorphism


def test_delta_vanishes_on_direct_sum():
    a = random_complex((2, 3, 2), seed=1)
    b = random_complex((1, 3, 2), seed=2)
    s = split_ses(a, b)
    for k in range(2):
        np.testing.assert_allclose(connecting_homomorphism(s, k), 0, atol=1e-12)


def test_delta_twisted_matches_brute_force():
    rng = np.random.default_rng(0)
    nonzero = 0
    for seed in range(15):
        s = random_ses((2, 3, 2), (2, 3, 1), seed=seed)
        for k in range(2):
            assert brute_force_delta_defect(s, k, rng) < 1e-9
            nonzero += np.linalg.norm(connecting_homomorphism(s, k)) > 1e-6
    assert nonzero > 0


def test_delta_empty_when_b_acyclic_in_degree():
    s = random_ses((1, 2, 1), (1, 1, 0), seed=3)
    d = connecting_homomorphism(s, 0)
    assert d.shape[1] == 0
    assert betti_numbers(s.B)[0] == 0


def test_les_complex_property():
    for seed in range(10):
        s = random_ses((2, 3, 2, 1), (1, 3, 2, 1), seed=seed, random_grams=True)
        les = build_les(s)
        for j in range(len(les.diffs) - 1):
            np.testing.assert_allclose(les.diffs[j + 1] @ les.diffs[j], 0, atol=1e-9)


# ---------------------------------------------------------------- long exact sequence


def test_les_direct_sum_torsion_zero():
    s = split_ses(random_complex((2, 3, 2), seed=4), random_complex((1, 3, 2), seed=5))
    assert log_torsion_det(build_les(s)) == pytest.approx(0.0, abs=1e-12)


def test_les_random_twisted_acyclic():
    for seed in range(10):
        les = build_les(random_ses((2, 3, 2), (2, 4, 1), seed=seed))
        assert sum(betti_numbers(les, tol=1e-9)) == 0


def test_les_of_acyclic_pieces_is_empty():
    a = random_complex((1, 2, 1), seed=1, acyclic=True)
    b = random_complex((2, 3, 1), seed=2, acyclic=True)
    les = build_les(split_ses(a, b))
    assert sum(les.dims) == 0
    assert log_torsion_det(les) == 0.0


# ---------------------------------------------------------------- length-two torsion


def test_length2_isometric_split():
    alpha = np.array([[1.0], [0.0]])
    beta = np.array([[0.0, 1.0]])
    assert length2_torsion(alpha, beta) == 0.0


def test_length2_scaled_alpha():
    assert length2_torsion(np.array([[2.0], [0.0]]), np.array([[0.0, 1.0]])) == pytest.approx(math.log(2))


def test_length2_scaled_beta():
    assert length2_torsion(np.array([[1.0], [0.0]]), np.array([[0.0, 3.0]])) == pytest.approx(-math.log(3))


# ---------------------------------------------------------------- Milnor


def test_milnor_direct_sum():
    a, b = random_complex((2, 3, 2), seed=8), random_complex((1, 3, 2), seed=9)
    s = split_ses(a, b)
    t = milnor_terms(s)
    assert milnor_residual(s) < 1e-12
    assert t["C"] == pytest.approx(t["A"] + t["B"], abs=1e-12)


def test_milnor_random_corpus():
    for seed in range(30):
        s = random_ses((1, 3, 4, 2), (2, 4, 3, 1), seed=seed, random_grams=seed % 2 == 1)
        assert milnor_residual(s) < 1e-8


def test_milnor_scaled_maps():
    for seed in range(5):
        # chi(A) = chi(B) = 1, so the local term is log 2 - log 3
        s = random_ses((2, 3, 2), (1, 3, 3), seed=seed, alpha_scale=2.0, beta_scale=3.0)
        assert milnor_terms(s)["local"] == pytest.approx(math.log(2) - math.log(3))
        assert milnor_residual(s) < 1e-8


@settings(max_examples=25, deadline=None)
@given(
    st.integers(0, 2**32 - 1),
    st.lists(st.integers(0, 4), min_size=2, max_size=4),
    st.lists(st.integers(0, 4), min_size=2, max_size=4),
    st.booleans(),
)
def test_milnor_property(seed, da, db, grams):
    n = min(len(da), len(db))
    s = random_ses(da[:n], db[:n], seed=seed, random_grams=grams)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConditioningWarning)
        assert milnor_residual(s) < 1e-8


def test_milnor_warns_on_near_degenerate_spectrum():
    a = HilbertComplex.build([[[1e-5]]])
    b = HilbertComplex.build([[[1.0]]])
    with pytest.warns(ConditioningWarning):
        milnor_residual(split_ses(a, b))


# ---------------------------------------------------------------- chain isomorphism transfer


def test_transfer_identity():
    c = random_complex((2, 3, 1), seed=1)
    assert chain_iso_transfer(identity_map(c)) < 1e-14


def test_transfer_scalar():
    c = random_complex((2, 4, 3), seed=2, random_grams=True)
    f = ChainMap.build(c, c, [3.0 * np.eye(n) for n in c.dims])
    assert chain_iso_transfer(f) < 1e-10


def test_transfer_metric_change():
    rng = np.random.default_rng(5)
    for i in range(20):
        c = random_complex((2, 4, 3, 1), seed=i)
        other = HilbertComplex.build(c.diffs, [random_gram(n, rng) for n in c.dims], c.dims)
        f = ChainMap.build(c, other, [np.eye(n) for n in c.dims])
        assert chain_iso_transfer(f) < 1e-8


def test_transfer_random_isomorphism():
    rng = np.random.default_rng(6)
    for i in range(20):
        c = random_complex((1, 3, 3, 1), seed=i, random_grams=True)
        f = [random_invertible(n, rng) for n in c.dims]
        target = HilbertComplex.build(
            [f[j + 1] @ c.diffs[j] @ np.linalg.inv(f[j]) for j in range(len(c.diffs))],
            [random_gram(n, rng) for n in c.dims],
            c.dims,
        )
        assert chain_iso_transfer(ChainMap.build(c, target, f)) < 1e-8


def test_transfer_rejects_singular():
    c = HilbertComplex.zero((2,))
    with pytest.raises(ComplexError):
        chain_iso_transfer(ChainMap.build(c, c, [np.diag([1.0, 0.0])]))


# ---------------------------------------------------------------- generator


def test_random_ses_uncoupled_is_direct_sum():
    s = random_ses((2, 3, 1), (1, 2, 2), seed=4, coupled=False)
    np.testing.assert_allclose(s.C.diffs[0][:3, 2:], 0)


def test_random_ses_d_squared():
    s = random_ses((2, 3, 3, 1), (1, 3, 3, 2), seed=11)
    for j in range(len(s.C.diffs) - 1):
        assert np.linalg.norm(s.C.diffs[j + 1] @ s.C.diffs[j]) < 1e-12


def test_random_ses_zero_a():
    s = random_ses((0, 0, 0), (1, 3, 2), seed=2)
    s.validate()
    for k in range(2):
        assert connecting_homomorphism(s, k).size == 0
    assert log_torsion_det(s.C) == pytest.approx(log_torsion_det(s.B), abs=1e-12)


def test_random_ses_is_seeded():
    a, b = random_ses((1, 2), (2, 1), seed=3), random_ses((1, 2), (2, 1), seed=3)
    np.testing.assert_array_equal(a.C.diffs[0], b.C.diffs[0])

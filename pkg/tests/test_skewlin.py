"""Pfaffian and block-assembly checks against combinatorial oracles.

The elimination Pfaffian is validated three ways: small cases pinned by hand
from the matching sum, the brute-force oracle on random matrices, and the
algebraic identities Pf(A)^2 = det(A) and Pf(R A R^T) = det(R) Pf(A).
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import airy

from halfspace_airy.errors import (InconsistencyError, InvalidInputError,
                                   SizeLimitError)
from halfspace_airy.skewlin import (KernelValue, SkewMatrix,
                                    assemble_block_skew, pfaffian,
                                    pfaffian_bruteforce)


def random_skew(rng, dim):
    """Random complex skew matrix with entries of modulus <= 1."""
    re = rng.uniform(-0.5, 0.5, (dim, dim))
    im = rng.uniform(-0.5, 0.5, (dim, dim))
    a = re + 1j * im
    return (a - a.T) / 2.0


def test_two_by_two_is_the_upper_entry():
    a = 0.7 - 0.2j
    m = [[0.0, a], [-a, 0.0]]
    assert pfaffian(m) == pytest.approx(a, abs=1e-14)
    assert pfaffian_bruteforce(m) == pytest.approx(a, abs=1e-14)


def test_four_by_four_matching_sum():
    # a12 a34 - a13 a24 + a14 a23 = 1*6 - 2*5 + 3*4 = 8
    m = np.array([[0, 1, 2, 3],
                  [-1, 0, 4, 5],
                  [-2, -4, 0, 6],
                  [-3, -5, -6, 0]], dtype=float)
    assert pfaffian(m) == pytest.approx(8.0, abs=1e-12)
    assert pfaffian_bruteforce(m) == pytest.approx(8.0, abs=1e-12)


def test_zero_matrix_and_empty_matrix():
    assert pfaffian(np.zeros((4, 4))) == 0.0
    assert pfaffian(np.zeros((0, 0))) == pytest.approx(1.0)
    assert pfaffian_bruteforce(np.zeros((0, 0))) == pytest.approx(1.0)


def test_pf_squared_is_det():
    rng = np.random.default_rng(7)
    for dim in (2, 4, 6, 8):
        for _ in range(25):
            m = random_skew(rng, dim)
            pf = pfaffian(m)
            assert abs(pf * pf - np.linalg.det(m)) <= 1e-9


def test_elimination_matches_brute_force():
    rng = np.random.default_rng(3)
    for dim in (2, 4, 6, 8):
        for _ in range(5):
            m = random_skew(rng, dim)
            fast = pfaffian(m)
            slow = pfaffian_bruteforce(m)
            assert abs(fast - slow) <= 1e-12 * max(1.0, abs(slow))


def test_congruence_scales_by_det():
    rng = np.random.default_rng(11)
    for dim in (2, 4, 6):
        for _ in range(10):
            m = random_skew(rng, dim)
            r = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            lhs = pfaffian(r @ m @ r.T)
            rhs = np.linalg.det(r) * pfaffian(m)
            assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(rhs))


def test_direct_sum_multiplies():
    rng = np.random.default_rng(5)
    a = random_skew(rng, 4)
    b = random_skew(rng, 2)
    m = np.zeros((6, 6), dtype=complex)
    m[:4, :4] = a
    m[4:, 4:] = b
    assert pfaffian(m) == pytest.approx(pfaffian(a) * pfaffian(b), abs=1e-13)


@settings(max_examples=50, deadline=None)
@given(half_dim=st.integers(1, 4), seed=st.integers(0, 2**32 - 1))
def test_pf_squared_property(half_dim, seed):
    m = random_skew(np.random.default_rng(seed), 2 * half_dim)
    pf = pfaffian(m)
    assert abs(pf * pf - np.linalg.det(m)) <= 1e-9


@settings(max_examples=50, deadline=None)
@given(scale=st.floats(-2.0, 2.0).filter(lambda c: c == 0.0 or abs(c) >= 1e-6),
       seed=st.integers(0, 2**32 - 1))
def test_scaling_property(scale, seed):
    # Pf(c A) = c^n Pf(A) for a 2n x 2n matrix
    m = random_skew(np.random.default_rng(seed), 6)
    assert pfaffian(scale * m) == pytest.approx(scale**3 * pfaffian(m), abs=1e-12)


def test_odd_dimension_rejected():
    with pytest.raises(InvalidInputError):
        SkewMatrix(np.zeros((3, 3)))


def test_non_square_rejected():
    with pytest.raises(InvalidInputError):
        SkewMatrix(np.zeros((2, 4)))


def test_symmetry_violation_rejected():
    m = np.array([[0.0, 1.0], [-1.0 + 1e-6, 0.0]])
    with pytest.raises(InvalidInputError):
        SkewMatrix(m)


def test_brute_force_size_limit():
    m = random_skew(np.random.default_rng(0), 12)
    with pytest.raises(SizeLimitError):
        pfaffian_bruteforce(m)


def test_condition_estimate():
    assert SkewMatrix([[0.0, 1.0], [-1.0, 0.0]]).condition_estimate() == pytest.approx(1.0)
    m = np.zeros((4, 4))
    m[0, 1], m[1, 0] = 1.0, -1.0
    m[2, 3], m[3, 2] = 1e-10, -1e-10
    assert SkewMatrix(m).condition_estimate() == pytest.approx(1e10, rel=1e-6)


def test_single_point_block():
    kern = lambda p, q: KernelValue(0.0, 0.5, -0.5, 0.0)
    m = assemble_block_skew([1.0], kern)
    assert m.dim == 2
    assert pfaffian(m) == pytest.approx(0.5)


def test_empty_point_list():
    m = assemble_block_skew([], None)
    assert m.dim == 0
    assert pfaffian(m) == pytest.approx(1.0)


def test_skew_violation_names_the_pair():
    kern = lambda p, q: KernelValue(0.0, 1.0, 1.0, 0.0)  # k21 should be -1
    with pytest.raises(InconsistencyError) as ei:
        assemble_block_skew([0.25, 1.0], kern)
    assert "0.25" in str(ei.value)


def _airy_kernel(x, y):
    aix, aipx, _, _ = airy(x)
    aiy, aipy, _, _ = airy(y)
    if x == y:
        return aipx * aipx - x * aix * aix
    return (aix * aipy - aipx * aiy) / (x - y)


@pytest.mark.parametrize("points", [(0.3, 0.9), (-0.5, 0.4, 1.1)])
def test_determinantal_embedding(points):
    # scalar symmetric kernel embedded in 2x2 blocks: Pf equals the det
    kern = lambda p, q: KernelValue(0.0, _airy_kernel(p, q), -_airy_kernel(q, p), 0.0)
    m = assemble_block_skew(points, kern)
    det = np.linalg.det(np.array([[_airy_kernel(p, q) for q in points] for p in points]))
    assert pfaffian(m) == pytest.approx(det, abs=1e-10)


def test_hadamard_type_decay_bound():
    # every entry of block (i, j) is bounded by C e^{-d x_i} e^{-d x_j} with
    # x >= 0, so |Pf| <= (2n)^{n/2} C^n prod_i e^{-d x_i} by Hadamard rows
    big_c, d = 1.5, 0.8

    def kern(p, q):
        pref = big_c * np.exp(-d * (p + q))
        g = lambda a, b: 0.9 * np.cos(a + 2.0 * b)
        return KernelValue(pref * np.sin(p - q), pref * g(p, q),
                           -pref * g(q, p), 0.5 * pref * np.sin(p - q))

    rng = np.random.default_rng(17)
    for n in (2, 3, 4):
        xs = np.sort(rng.uniform(0.0, 3.0, n))
        m = assemble_block_skew(xs, kern)
        bound = (2 * n) ** (n / 2.0) * big_c**n * np.prod(np.exp(-d * xs))
        assert abs(pfaffian(m)) <= bound + 1e-12

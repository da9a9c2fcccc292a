"""Scaling data, particle lattices, and action linearizations."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from halfspace_airy.errors import InvalidInputError, LatticeError, SingularityError
from halfspace_airy.kernels import LatticeSpec, ScalingParams, eval_G, eval_S


def test_scale_constants_at_half():
    p = ScalingParams(0.5)
    assert p.sigma_q == pytest.approx(1.81712059283214, abs=1e-11)
    assert p.f_q == pytest.approx(0.30285343213869, abs=1e-11)
    # cubes are rational at q = 1/2
    assert p.sigma_q ** 3 == pytest.approx(6.0, rel=1e-12)
    assert p.f_q ** 3 == pytest.approx(1.0 / 36.0, rel=1e-12)
    assert p.u == pytest.approx(1.0)
    assert p.sigma == pytest.approx(math.sqrt(2.0))


@pytest.mark.parametrize("q", [0.1, 0.3, 0.5, 0.8])
def test_scales_match_defining_formulas(q):
    p = ScalingParams(q)
    assert p.sigma_q == pytest.approx(
        q ** (1 / 3) * (1 + q) ** (1 / 3) / (1 - q), rel=1e-14)
    assert p.f_q == pytest.approx(
        q ** (1 / 3) / (2 * (1 + q) ** (2 / 3)), rel=1e-14)
    assert p.u == pytest.approx(q / (1 - q), rel=1e-14)
    assert p.sigma == pytest.approx(math.sqrt(q) / (1 - q), rel=1e-14)


@settings(max_examples=60, deadline=None)
@given(q=st.floats(0.05, 0.95))
def test_quadratic_action_coefficient_relation(q):
    # sigma_q^2 f_q collapses to q / (2 (1-q)^2), the curvature of the
    # one-step action; both scale factors inherit it.
    p = ScalingParams(q)
    assert p.sigma_q ** 2 * p.f_q == pytest.approx(
        q / (2 * (1 - q) ** 2), rel=1e-12)


@pytest.mark.parametrize("q", [0.0, 1.0, -0.2, 1.7])
def test_bad_q_rejected(q):
    with pytest.raises(InvalidInputError):
        ScalingParams(q)


def test_bad_varpi_rejected():
    with pytest.raises(InvalidInputError):
        ScalingParams(0.5, math.inf)
    with pytest.raises(InvalidInputError):
        ScalingParams(0.5, math.nan)


def test_corner_weight_tuning():
    p = ScalingParams(0.5, 1.0)
    assert p.c_of_N(1000) == pytest.approx(
        1.0 - 1.0 / (p.sigma_q * 10.0), rel=1e-14)
    # varpi = 0 means the corner weight sits exactly at critical
    assert ScalingParams(0.5, 0.0).c_of_N(64) == 1.0
    with pytest.raises(InvalidInputError):
        p.c_of_N(0)


def test_corner_weight_clamped_into_open_interval():
    low = ScalingParams(0.5, 80.0).c_of_N(1)
    high = ScalingParams(0.5, -80.0).c_of_N(1)
    assert 0.5 < low < 0.5 + 1e-9
    assert 2.0 - 1e-9 < high < 2.0


def test_integer_time_floor():
    p = ScalingParams(0.5)
    assert p.T_of(0.0, 5) == 0
    assert p.T_of(1.23, 50) == 16  # floor(1.23 * 50^(2/3))
    with pytest.raises(InvalidInputError):
        p.T_of(-0.1, 50)


def test_curve_drifts_alternate():
    p = ScalingParams(0.5, 0.7)
    assert p.drift(1) == pytest.approx(-math.sqrt(2.0) * 0.7)
    assert p.drift(2) == pytest.approx(math.sqrt(2.0) * 0.7)
    with pytest.raises(InvalidInputError):
        p.drift(0)


def test_offsets_carry_scale():
    off = ScalingParams(0.5, -0.25).offsets()
    assert off.a1 == pytest.approx(3.25)
    assert off.aq(1) == pytest.approx(3.25 / ScalingParams(0.5).sigma_q)


# ---------------------------------------------------------------------------
# lattices
# ---------------------------------------------------------------------------

def test_lattice_geometry():
    p = ScalingParams(0.5)
    lat = LatticeSpec(1.0, 1000, p)
    assert lat.spacing == pytest.approx(1.0 / (p.sigma_q * 10.0), rel=1e-14)
    assert lat.offset == pytest.approx(
        -lat.spacing * (2 * 0.5 * 1000 + 0.5 * lat.T) / 0.5, rel=1e-14)
    assert lat.T == p.T_of(1.0, 1000)


@pytest.mark.parametrize("k", [-7, 0, 13, 2048])
def test_lattice_roundtrip(k):
    lat = LatticeSpec(0.5, 729, ScalingParams(0.3, 0.4))
    assert lat.index_of(lat.position(k)) == k
    assert lat.contains(lat.position(k))


def test_off_lattice_point_reports_fraction():
    lat = LatticeSpec(1.0, 1000, ScalingParams(0.5))
    x = lat.position(4) + 0.37 * lat.spacing
    assert not lat.contains(x)
    with pytest.raises(LatticeError, match="fractional label"):
        lat.index_of(x)


def test_lattice_rejects_bad_size():
    with pytest.raises(InvalidInputError):
        LatticeSpec(1.0, 0, ScalingParams(0.5))


# ---------------------------------------------------------------------------
# actions
# ---------------------------------------------------------------------------

def test_actions_vanish_at_one():
    for q in (0.2, 0.5, 0.9):
        assert eval_S(1.0, q) == pytest.approx(0.0, abs=1e-14)
        assert eval_G(1.0, q) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("q", [0.3, 0.5, 0.7])
@pytest.mark.parametrize("h", [0.01, -0.01])
def test_action_taylor_coefficients(q, h):
    # S = (sigma_q^3 / 3) h^3 + O(h^4); G = -(q / (2(1-q)^2)) h^2 + O(h^3).
    # A wrong leading coefficient would overshoot these remainders 100x.
    p = ScalingParams(q)
    S = eval_S(1.0 + h, q)
    G = eval_G(1.0 + h, q)
    assert abs(S - p.sigma_q ** 3 * h ** 3 / 3.0) <= 40.0 * abs(h) ** 4
    assert abs(G + q * h ** 2 / (2.0 * (1.0 - q) ** 2)) <= 20.0 * abs(h) ** 3


def test_actions_accept_arrays():
    z = np.array([1.2 + 0.0j, 0.7 + 0.5j, -1.0 + 2.0j])
    S = eval_S(z, 0.5)
    G = eval_G(z, 0.5)
    assert S.shape == z.shape and G.shape == z.shape
    assert np.all(np.isfinite(S)) and np.all(np.isfinite(G))
    assert S[0] == pytest.approx(eval_S(1.2, 0.5))


@pytest.mark.parametrize("z", [0.3, 3.0, -1.0])
def test_actions_raise_on_cut(z):
    # real axis outside (q, 1/q) carries the poles and log cuts
    with pytest.raises(SingularityError):
        eval_S(z, 0.5)
    with pytest.raises(SingularityError):
        eval_G(z, 0.5)


def test_actions_reject_bad_q():
    with pytest.raises(InvalidInputError):
        eval_S(1.2, 1.5)
    with pytest.raises(InvalidInputError):
        eval_G(1.2, 0.0)

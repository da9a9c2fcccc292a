"""Contour construction and quadrature accuracy checks.

Closed-circle residues, ray truncation stability, Cauchy deformation
invariance, and the geometric guarantees of the saddle contours (enclosing
or staying inside the unit circle) are pinned here.
"""

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from halfspace_airy.contour import (Contour, ContourOffsets, ContourPiece,
                                    integrate, integrate_double, make_circle,
                                    make_gamma, make_ray_pair)
from halfspace_airy.errors import ConstructionError, EvaluationError

TWO_PI_I = 2j * np.pi

# sigma_q at q = 1/2; any positive value works for the geometry checks but
# this matches the scaling actually used downstream
SIGMA_HALF = 1.81712059283214


def test_residue_on_unit_circle():
    c = make_circle(1.0)
    assert integrate(lambda z: 1.0 / z, c) == pytest.approx(TWO_PI_I, abs=1e-10)


def test_holomorphic_integrand_vanishes():
    c = make_circle(1.0)
    assert abs(integrate(lambda z: z**2, c)) <= 1e-10


def test_enclosed_shifted_pole():
    c = make_circle(2.0)
    assert integrate(lambda z: 1.0 / (z - 1.0), c) == pytest.approx(TWO_PI_I, abs=1e-10)


def test_modest_rule_already_resolves_residue():
    c = make_circle(1.0)
    rule = c.with_rule(order=16, panels=8)
    assert integrate(lambda z: 1.0 / z, c, rule=rule) == pytest.approx(TWO_PI_I, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(k=st.integers(-4, 4), r=st.floats(0.5, 3.0))
def test_circle_moments(k, r):
    val = integrate(lambda z: z**k, make_circle(r))
    want = TWO_PI_I if k == -1 else 0.0
    assert abs(val - want) <= 1e-9 * max(1.0, r ** abs(k))


def test_ray_pair_endpoints():
    c = make_ray_pair(1.0, np.pi / 3.0, L=5.0)
    assert c.start == pytest.approx(1.0 + 5.0 * np.exp(-1j * np.pi / 3.0), abs=1e-12)
    assert c.end == pytest.approx(1.0 + 5.0 * np.exp(+1j * np.pi / 3.0), abs=1e-12)
    assert not c.is_closed


def test_ray_pair_opens_leftward_at_obtuse_angle():
    c = make_ray_pair(-3.0, 2.0 * np.pi / 3.0, L=5.0)
    assert c.start.real < -3.0 and c.end.real < -3.0
    assert c.start.imag < 0.0 < c.end.imag


def test_cubic_decay_makes_truncation_irrelevant():
    vals = [integrate(lambda z: np.exp(z**3 / 3.0), make_ray_pair(1.0, np.pi / 3.0, L=L))
            for L in (5.0, 7.0)]
    assert abs(vals[0] - vals[1]) <= 1e-10


def test_deformation_between_parallel_rays():
    f = lambda z: np.exp(z**3 / 3.0 - 2.0 * z)
    a = integrate(f, make_ray_pair(1.0, np.pi / 3.0, L=6.0))
    b = integrate(f, make_ray_pair(3.0, np.pi / 3.0, L=6.0))
    assert abs(a - b) <= 1e-8


def test_panel_doubling_self_convergence():
    f = lambda z: np.exp(z**3 / 3.0 - 2.0 * z)
    c = make_ray_pair(1.0, np.pi / 3.0)
    a = integrate(f, c)
    b = integrate(f, c, rule=c.with_rule(panels=2 * c.rule.panel_count))
    assert abs(a - b) <= 1e-10


def test_double_residue_product():
    c = make_circle(1.0)
    val = integrate_double(lambda z, w: 1.0 / (z * w), c, c)
    assert val == pytest.approx(TWO_PI_I**2, rel=1e-10)


def test_double_residue_mixed_radii():
    val = integrate_double(lambda z, w: 1.0 / (z * w), make_circle(1.0), make_circle(2.0))
    assert val == pytest.approx(TWO_PI_I**2, rel=1e-10)


def test_zero_integrand():
    c = make_circle(1.0)
    assert integrate(lambda z: np.zeros_like(z), c) == 0.0
    assert integrate_double(lambda z, w: np.zeros_like(z * w), c, c) == 0.0


def test_gamma_plus_encloses_unit_circle():
    off = ContourOffsets(varpi=1.0, sigma_q=SIGMA_HALF)
    c = make_gamma(off.aq(3), N=1000, sign=+1)
    assert c.is_closed
    assert np.min(np.abs(c.rule.nodes)) > 1.0
    assert c.winding_number(0.0) == 1
    assert c.winding_number(1.0) == 1


def test_gamma_minus_stays_inside_unit_circle():
    off = ContourOffsets(varpi=1.0, sigma_q=SIGMA_HALF)
    c = make_gamma(-off.aq(2), N=1000, sign=-1)
    assert c.is_closed
    assert np.max(np.abs(c.rule.nodes)) < 1.0
    assert c.winding_number(0.0) == 1


def test_gamma_residue_check():
    # closed curve around the origin, so the residue integral is exact
    c = make_gamma(2.0, N=50, sign=+1)
    assert integrate(lambda z: 1.0 / z, c) == pytest.approx(TWO_PI_I, abs=1e-8)


def test_offsets_ordering():
    off = ContourOffsets(varpi=-0.5)
    assert (off.a1, off.a2, off.a3) == (3.5, 6.5, 9.5)
    assert 3.0 <= off.a1 < off.a2 < off.a3
    with pytest.raises(ConstructionError):
        off.aq(1)


def test_offsets_scaling():
    off = ContourOffsets(varpi=0.0, sigma_q=2.0)
    assert off.aq(2) == pytest.approx(3.0)
    assert off.a(3) == pytest.approx(9.0)


@settings(max_examples=40, deadline=None)
@given(r=st.floats(0.5, 2.5), ang=st.floats(0.0, 2.0 * np.pi),
       rho=st.floats(0.1, 4.0), ccw=st.booleans())
def test_winding_counts_enclosure(r, ang, rho, ccw):
    assume(abs(rho - r) > 0.3)
    point = rho * np.exp(1j * ang)
    want = (1 if ccw else -1) if rho < r else 0
    assert make_circle(r, ccw=ccw).winding_number(point) == want


@pytest.mark.parametrize("phi", [0.0, np.pi, -0.5, 4.0])
def test_invalid_ray_angle(phi):
    with pytest.raises(ConstructionError):
        make_ray_pair(0.0, phi)


def test_invalid_sizes():
    with pytest.raises(ConstructionError):
        make_ray_pair(0.0, np.pi / 3.0, L=0.0)
    with pytest.raises(ConstructionError):
        make_circle(0.0)
    with pytest.raises(ConstructionError):
        make_gamma(1.0, N=0, sign=+1)
    with pytest.raises(ConstructionError):
        make_gamma(1.0, N=100, sign=2)
    with pytest.raises(ConstructionError):
        make_circle(1.0, order=1)
    with pytest.raises(ConstructionError):
        make_circle(1.0, panels=0)


def _line_piece(a, b):
    return ContourPiece(z=lambda t: a + (b - a) * t,
                        dz=lambda t: (b - a) * np.ones_like(t, dtype=complex),
                        t0=0.0, t1=1.0)


def test_pieces_must_join():
    with pytest.raises(ConstructionError):
        Contour([_line_piece(0.0, 1.0), _line_piece(2.0, 3.0)])
    with pytest.raises(ConstructionError):
        Contour([])


def test_vanishing_derivative_rejected():
    p = ContourPiece(z=lambda t: t**2 + 0j, dz=lambda t: 2.0 * t + 0j,
                     t0=-1.0, t1=1.0)
    with pytest.raises(ConstructionError):
        Contour([p])


def test_nonfinite_integrand_is_reported():
    c = make_circle(1.0)

    def bad(z):
        v = np.ones_like(z)
        v[2] = np.nan
        return v

    with pytest.raises(EvaluationError) as ei:
        integrate(bad, c)
    assert "node 2" in str(ei.value)


def test_nonfinite_double_integrand_is_reported():
    c = make_circle(1.0)

    def bad(z, w):
        v = np.ones_like(z * w)
        v[1, 3] = np.nan
        return v

    with pytest.raises(EvaluationError):
        integrate_double(bad, c, c)

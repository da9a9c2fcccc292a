"""Pfaffian correlation kernels for half-space geometric LPP and its limits.

This module implements the matrix correlation kernels of the half-space
geometric weight model and the kernels obtained from it under critical
scaling:

* ``kernel_geo``: finite model, double contour integrals over circles.
* ``kernel_preN``: pre-limit kernel at finite ``N`` in scaled variables,
  integrated over wedge-plus-arc contours around the unit circle.
* ``kernel_limit``: the limiting kernel, integrated over infinite rays.
* ``kernel_cross``: the crossover kernel in parabolic coordinates.
* ``kernel_airy_extended``: the scalar extended Airy kernel.
* ``airy_limit_scaled``: large-time scaled forms of the limit kernel
  together with their Airy-type limits.

All 2x2 block values are returned as :class:`~.skewlin.KernelValue` with
the convention ``k21(x, y) = -k12(y, x)``.

Contour anchors are not taken at the large offsets ``|varpi| + 3i`` that
make the error analysis convenient; at those anchors the integrands reach
``exp(243)`` and double precision keeps no digits.  Every contour is
instead placed, by Cauchy deformation past no poles, at small anchors
where the integrand is O(1) at the anchor and decays along the rays.  The
deformation invariance is part of the test suite.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfcx

from .contour import (
    GL_ORDER,
    PANELS_PER_PIECE,
    Contour,
    ContourOffsets,
    ContourPiece,
    make_circle,
    make_gamma,
    make_ray_pair,
)
from .errors import (
    ConfigurationError,
    DiagonalAmbiguityError,
    EvaluationError,
    InvalidInputError,
    LatticeError,
    SingularityError,
)
from .skewlin import KernelValue

TWO_PI_I = 2j * math.pi
# Relative offsets, in units of sigma_q^{-1} N^{-1/3}, at which the three
# wedge contours of the pre-limit kernel are anchored (inner minus, outer
# minus, plus).  They are added to |varpi| so the required poles stay on
# the correct side for every N.
DEFAULT_GAMMA_OFFSETS = (0.5, 1.0, 1.5)
# Value used for "upper branch" selection of the 22 correction term when
# the caller opts in via convention="upper-formula".
UPPER_FORMULA = "upper-formula"

_PI3 = math.pi / 3.0
_2PI3 = 2.0 * math.pi / 3.0
_PI2 = math.pi / 2.0


# ---------------------------------------------------------------------------
# scaling data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingParams:
    """Critical scaling data for the half-space geometric model.

    Parameters
    ----------
    q : float
        Geometric weight parameter, in (0, 1).
    varpi : float
        Boundary strength parameter of the critically tuned corner weight.

    Attributes
    ----------
    sigma_q, f_q : float
        Cube-root fluctuation scale and the time-quadratic coefficient,
        ``sigma_q = q^{1/3}(1+q)^{1/3}/(1-q)`` and
        ``f_q = q^{1/3} / (2 (1+q)^{2/3})``.
    u, sigma : float
        Walk drift ``q/(1-q)`` and diffusive scale ``sqrt(q)/(1-q)``.
    """

    q: float
    varpi: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 < self.q < 1.0):
            raise InvalidInputError(f"q must lie in (0, 1), got {self.q}")
        if not np.isfinite(self.varpi):
            raise InvalidInputError(f"varpi must be finite, got {self.varpi}")

    @property
    def sigma_q(self) -> float:
        q = self.q
        return q ** (1.0 / 3.0) * (1.0 + q) ** (1.0 / 3.0) / (1.0 - q)

    @property
    def f_q(self) -> float:
        q = self.q
        return q ** (1.0 / 3.0) / (2.0 * (1.0 + q) ** (2.0 / 3.0))

    @property
    def u(self) -> float:
        return self.q / (1.0 - self.q)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.q) / (1.0 - self.q)

    def c_of_N(self, N: int) -> float:
        """Critically tuned corner weight ``1 - varpi / (sigma_q N^{1/3})``.

        The value is clamped into the admissible open interval
        ``(q, 1/q)``; the clamp only binds at very small N.
        """
        if N < 1:
            raise InvalidInputError(f"N must be a positive integer, got {N}")
        c = 1.0 - self.varpi / (self.sigma_q * N ** (1.0 / 3.0))
        lo = self.q
        hi = 1.0 / self.q
        margin = 1e-12 * (hi - lo)
        return min(max(c, lo + margin), hi - margin)

    def T_of(self, t: float, N: int) -> int:
        """Integer time ``floor(t N^{2/3})`` of the scaled time ``t >= 0``."""
        if t < 0:
            raise InvalidInputError(f"scaled time must be >= 0, got {t}")
        return int(math.floor(t * N ** (2.0 / 3.0)))

    def drift(self, i: int) -> float:
        """Drift ``(-1)^i sqrt(2) varpi`` of the i-th limiting curve."""
        if i < 1:
            raise InvalidInputError(f"curve index must be >= 1, got {i}")
        return (-1.0) ** i * math.sqrt(2.0) * self.varpi

    def offsets(self) -> ContourOffsets:
        return ContourOffsets(self.varpi, self.sigma_q)


class LatticeSpec:
    """Affine lattice carrying the scaled particle positions at one time.

    At scaled time ``t`` and size ``N`` the admissible positions are
    ``x = spacing * k + offset`` for integer ``k``, where ``spacing`` is
    ``1 / (sigma_q N^{1/3})`` and ``offset`` collects the deterministic
    drift ``-(2qN + q T_t) / (1-q)`` in the same units.  ``k`` is the
    integer particle label ``lambda_i - i`` of the un-scaled model.
    """

    def __init__(self, t: float, N: int, params: ScalingParams):
        if N < 1:
            raise InvalidInputError(f"N must be a positive integer, got {N}")
        self.t = float(t)
        self.N = int(N)
        self.params = params
        self.T = params.T_of(t, N)
        self.spacing = 1.0 / (params.sigma_q * N ** (1.0 / 3.0))
        q = params.q
        self.offset = -self.spacing * (2.0 * q * N + q * self.T) / (1.0 - q)

    def index_of(self, x: float, tol: float = 1e-9) -> int:
        """Integer label of the lattice point ``x``; error if off-lattice."""
        k = (x - self.offset) / self.spacing
        k_round = round(k)
        if abs(k - k_round) > tol:
            raise LatticeError(
                f"x={x!r} is not on the time-{self.t} lattice: "
                f"fractional label {k - k_round:+.3e} exceeds {tol}"
            )
        return int(k_round)

    def contains(self, x: float, tol: float = 1e-9) -> bool:
        try:
            self.index_of(x, tol)
        except LatticeError:
            return False
        return True

    def position(self, k: int) -> float:
        return self.spacing * k + self.offset

    def __repr__(self) -> str:
        return (f"LatticeSpec(t={self.t}, N={self.N}, T={self.T}, "
                f"spacing={self.spacing:.6g}, offset={self.offset:.6g})")


# ---------------------------------------------------------------------------
# log-linearizations of the action
# ---------------------------------------------------------------------------

def _check_off_cuts(z: np.ndarray, q: float) -> None:
    on_axis = np.abs(z.imag) == 0.0
    bad = on_axis & ((z.real <= q) | (z.real >= 1.0 / q))
    if np.any(bad):
        first = z[bad].ravel()[0]
        raise SingularityError(
            f"point {first} lies on a pole or branch cut of the action "
            f"(real axis outside ({q}, {1.0 / q:.6g}))"
        )


def eval_S(z, q: float):
    """Cubic-type action ``log(1-q/z) - log(1-qz) - (2q/(1-q)) log z``.

    Vanishes to second order at ``z = 1``.  Raises
    :class:`SingularityError` when any evaluation point lies on the real
    axis outside ``(q, 1/q)``, where the integrand has poles or cuts.
    """
    if not (0.0 < q < 1.0):
        raise InvalidInputError(f"q must lie in (0, 1), got {q}")
    zc = np.asarray(z, dtype=complex)
    _check_off_cuts(zc, q)
    out = (np.log(1.0 - q / zc) - np.log(1.0 - q * zc)
           - (2.0 * q / (1.0 - q)) * np.log(zc))
    return out if out.ndim else complex(out)


def eval_G(z, q: float):
    """Quadratic-type action ``log(1-q/z) - (q/(1-q)) log z - log(1-q)``.

    Vanishes to first order at ``z = 1``.  Same singularity contract as
    :func:`eval_S`.
    """
    if not (0.0 < q < 1.0):
        raise InvalidInputError(f"q must lie in (0, 1), got {q}")
    zc = np.asarray(z, dtype=complex)
    _check_off_cuts(zc, q)
    out = (np.log(1.0 - q / zc) - (q / (1.0 - q)) * np.log(zc)
           - math.log(1.0 - q))
    return out if out.ndim else complex(out)


# ---------------------------------------------------------------------------
# contour cache and separable quadrature forms
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=256)
def _ray(anchor: float, phi: float, order: int, panels: int) -> Contour:
    return make_ray_pair(complex(anchor), phi, order=order, panels=panels)


def _finite_or_raise(val, what: str):
    if not np.all(np.isfinite(np.asarray(val))):
        raise EvaluationError(f"non-finite value while evaluating {what}")
    return val


class _DoubleForm:
    """Double contour integral with separable x/y dependence.

    Represents ``I(x, y) = (2 pi i)^{-2} int int h(z, w)
    e^{ez(z) + ew(w)} e^{sx x z + sy y w} dz dw`` with the (x, y)
    independent part contracted into a single matrix, so that evaluating
    on point grids reduces to two matrix products.
    """

    def __init__(self, cz: Contour, cw: Contour, hfun, ez: np.ndarray,
                 ew: np.ndarray, sx: float, sy: float, name: str = "double"):
        rz, rw = cz.rule, cw.rule
        core = hfun(rz.nodes[:, None], rw.nodes[None, :])
        core = core * np.exp(ez[:, None] + ew[None, :])
        self._m = (rz.weights[:, None] * rw.weights[None, :]) * core
        self._m /= TWO_PI_I ** 2
        _finite_or_raise(self._m, name)
        self._zn = rz.nodes
        self._wn = rw.nodes
        self._sx = sx
        self._sy = sy
        self._name = name

    def matrix(self, xs, ys) -> np.ndarray:
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        ys = np.atleast_1d(np.asarray(ys, dtype=float))
        u = np.exp(self._sx * np.outer(xs, self._zn))
        v = np.exp(self._sy * np.outer(self._wn, ys))
        return _finite_or_raise(u @ self._m @ v, self._name)

    def value(self, x: float, y: float) -> complex:
        return complex(self.matrix([x], [y])[0, 0])


class _SingleForm:
    """Single contour integral ``(2 pi i)^{-1} int g(w) e^{e(w)} ... dw``."""

    def __init__(self, c: Contour, gfun, e: np.ndarray, name: str = "single"):
        r = c.rule
        self._m = r.weights * gfun(r.nodes) * np.exp(e) / TWO_PI_I
        _finite_or_raise(self._m, name)
        self._wn = r.nodes
        self._name = name

    def vector(self, xs, sign: float) -> np.ndarray:
        """Values ``sum_j m_j e^{sign x w_j}`` for each x."""
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        e = np.exp(sign * np.outer(xs, self._wn))
        return _finite_or_raise(e @ self._m, self._name)

    def total(self) -> complex:
        return complex(np.sum(self._m))


# ---------------------------------------------------------------------------
# limiting kernel
# ---------------------------------------------------------------------------

def _limit_anchors(varpi: float):
    a11 = 0.75
    a12w = max(0.5, 0.4 - varpi)
    a12z = a12w + 0.5
    a22 = -max(varpi, 0.0) - 0.5
    return a11, a12z, a12w, a22


@functools.lru_cache(maxsize=8)
def _limit_double(kind: str, s: float, t: float, f: float, varpi: float,
                  order: int, panels: int) -> _DoubleForm:
    a11, a12z, a12w, a22 = _limit_anchors(varpi)
    w = varpi
    if kind == "11":
        cz = _ray(a11, _PI3, order, panels)
        cw = _ray(a11, _PI3, order, panels)
        h = lambda z, zz: ((z - zz) * (z + w) * (zz + w)
                           / (z * zz * (z + zz)))
        ez = cz.rule.nodes ** 3 / 3.0 - f * s * cz.rule.nodes ** 2
        ew = cw.rule.nodes ** 3 / 3.0 - f * t * cw.rule.nodes ** 2
        return _DoubleForm(cz, cw, h, ez, ew, -1.0, -1.0, "limit k11")
    if kind == "12":
        cz = _ray(a12z, _PI3, order, panels)
        cw = _ray(a12w, _2PI3, order, panels)
        h = lambda z, zz: ((z + zz) * (z + w)
                           / (2.0 * z * (z - zz) * (zz + w)))
        ez = cz.rule.nodes ** 3 / 3.0 - f * s * cz.rule.nodes ** 2
        ew = -cw.rule.nodes ** 3 / 3.0 + f * t * cw.rule.nodes ** 2
        return _DoubleForm(cz, cw, h, ez, ew, -1.0, 1.0, "limit k12")
    if kind == "22":
        cz = _ray(a22, _2PI3, order, panels)
        cw = _ray(a22, _2PI3, order, panels)
        h = lambda z, zz: ((z - zz)
                           / (4.0 * (z + zz) * (z + w) * (zz + w)))
        ez = -cz.rule.nodes ** 3 / 3.0 + f * s * cz.rule.nodes ** 2
        ew = -cw.rule.nodes ** 3 / 3.0 + f * t * cw.rule.nodes ** 2
        return _DoubleForm(cz, cw, h, ez, ew, 1.0, 1.0, "limit k22")
    raise ValueError(kind)


def _gauss_pair_term(q2: float, c, varpi: float):
    """Pair-interaction piece of the 22 correction terms, in closed form.

    Evaluates (1/2 pi i) int z e^{q2 z^2 + c z} / (2 (z - varpi)(z + varpi)) dz
    over an upward 2pi/3 contour left of both poles, for q2 > 0.  Partial
    fractions reduce it to two Gaussian integrals with a simple pole, each
    an erfc; erfcx keeps the product stable for large |c|.  Vectorized
    over c.
    """
    c_arr = np.asarray(c, dtype=float)
    rt = math.sqrt(q2)
    body = np.exp(-c_arr * c_arr / (4.0 * q2))

    def half(p):
        g = c_arr / (2.0 * rt) + rt * p
        out = body * erfcx(np.abs(g))
        neg = g < 0.0
        if np.any(neg):
            out = np.where(neg,
                           2.0 * np.exp(q2 * p * p + c_arr * p) - out, out)
        return out

    val = -(half(varpi) + half(-varpi)) / 8.0
    return _finite_or_raise(val if c_arr.ndim else float(val),
                            "22 pair term")


@functools.lru_cache(maxsize=16)
def _limit_r22_singles(s: float, t: float, f: float, varpi: float,
                       order: int, panels: int):
    """The two cubic single-integral pieces of the 22 correction term.

    Piece 1 integrates over the variable tied to time s (anchored just
    right of varpi), piece 2 over the variable tied to time t (just left
    of varpi).  The third, pair-interaction piece has a Gaussian integrand
    and goes through _gauss_pair_term instead of quadrature.
    """
    w = varpi
    c1 = _ray(w + 0.6, _2PI3, order, panels)
    c2 = _ray(w - 0.6, _2PI3, order, panels)
    g_res = lambda z: 1.0 / (4.0 * (z - w))
    e1 = -c1.rule.nodes ** 3 / 3.0 + f * s * c1.rule.nodes ** 2
    e2 = -c2.rule.nodes ** 3 / 3.0 + f * t * c2.rule.nodes ** 2
    p1 = _SingleForm(c1, g_res, e1, "limit r22 piece 1")
    p2 = _SingleForm(c2, g_res, e2, "limit r22 piece 2")
    return p1, p2


def _limit_r12(s: float, x: float, t: float, y: float, f: float) -> float:
    if not s < t:
        return 0.0
    var = 4.0 * math.pi * f * (t - s)
    return -math.exp(-(y - x) ** 2 / (4.0 * f * (t - s))) / math.sqrt(var)


def _limit_r22_upper(s: float, x: float, t: float, y: float, f: float,
                     varpi: float, order: int, panels: int) -> complex:
    """Correction term of the 22 block, valid for y > x."""
    w = varpi
    p1, p2 = _limit_r22_singles(s, t, f, w, order, panels)
    val = complex(p1.vector([x], 1.0)[0]) * math.exp(
        w ** 3 / 3.0 + f * t * w ** 2 - y * w)
    val -= complex(p2.vector([y], 1.0)[0]) * math.exp(
        w ** 3 / 3.0 + f * s * w ** 2 - x * w)
    if s + t > 0:
        val += _gauss_pair_term(f * (s + t), y - x, w)
    return val


def _branch_22(d: float, same_point: bool, convention, what: str) -> int:
    """Branch selector for skew-extended 22 corrections.

    Returns +1 for the upper formula, -1 for the reflected one, 0 for a
    coincident point.  ``d`` is the branch coordinate (positive means
    upper).
    """
    if same_point:
        return 0
    if d > 0:
        return 1
    if d < 0:
        return -1
    if convention == UPPER_FORMULA:
        return 1
    raise DiagonalAmbiguityError(
        f"{what}: the 22 correction term has two one-sided formulas and "
        f"the arguments sit exactly on the boundary between them; pass "
        f"convention='upper-formula' to select the upper one"
    )


def kernel_limit(s: float, x: float, t: float, y: float,
                 params: ScalingParams, *, convention=None,
                 order: int = GL_ORDER,
                 panels: int = PANELS_PER_PIECE) -> KernelValue:
    """Limiting kernel at space-time points ``(s, x)`` and ``(t, y)``.

    Both times must be >= 0.  The 22 block carries a skew-extended
    correction term defined by a one-sided formula; for ``x == y`` at
    distinct times the side is ambiguous and an error is raised unless
    ``convention="upper-formula"`` is passed.
    """
    if s < 0 or t < 0:
        raise InvalidInputError(
            f"times must be >= 0, got s={s}, t={t}")
    f = params.f_q
    w = params.varpi
    k11 = _limit_double("11", s, t, f, w, order, panels).value(x, y)
    i12 = _limit_double("12", s, t, f, w, order, panels).value(x, y)
    k12 = i12 + _limit_r12(s, x, t, y, f)
    i21 = _limit_double("12", t, s, f, w, order, panels).value(y, x)
    k21 = -(i21 + _limit_r12(t, y, s, x, f))
    k22 = _limit_double("22", s, t, f, w, order, panels).value(x, y)
    branch = _branch_22(y - x, (s == t and x == y), convention,
                        "kernel_limit")
    if branch > 0:
        k22 += _limit_r22_upper(s, x, t, y, f, w, order, panels)
    elif branch < 0:
        k22 -= _limit_r22_upper(t, y, s, x, f, w, order, panels)
    return KernelValue(k11, k12, k21, k22)


def crossover_gauge(s: float, x: float, params: ScalingParams) -> float:
    """Gauge factor linking the limit kernel to the crossover kernel."""
    f = params.f_q
    return math.exp(-s ** 3 * f ** 3 / 3.0 + (x + f ** 2 * s ** 2) * f * s)


# ---------------------------------------------------------------------------
# crossover kernel
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=8)
def _cross_double(kind: str, s: float, t: float, varpi: float,
                  order: int, panels: int) -> _DoubleForm:
    """Crossover blocks; anchors are shifted so z + s and w + t sit at the
    same safe positions as the limit-kernel variables."""
    w = varpi
    if kind == "11":
        cz = _ray(0.75 - s, _PI3, order, panels)
        cw = _ray(0.75 - t, _PI3, order, panels)
        h = lambda z, zz: ((z + s - zz - t) * (z + s + w) * (zz + t + w)
                           / ((z + s + zz + t) * (z + s) * (zz + t)))
        ez = cz.rule.nodes ** 3 / 3.0
        ew = cw.rule.nodes ** 3 / 3.0
        return _DoubleForm(cz, cw, h, ez, ew, -1.0, -1.0, "cross k11")
    if kind == "12":
        aw = max(0.5, 0.4 - w)
        az = aw + 0.5
        cz = _ray(az - s, _PI3, order, panels)
        cw = _ray(aw - t, _2PI3, order, panels)
        h = lambda z, zz: ((z + s + zz + t) * (z + w + s)
                           / (2.0 * (z + s) * (z + s - zz - t)
                              * (zz + w + t)))
        ez = cz.rule.nodes ** 3 / 3.0
        ew = -cw.rule.nodes ** 3 / 3.0
        return _DoubleForm(cz, cw, h, ez, ew, -1.0, 1.0, "cross k12")
    if kind == "22":
        a = -max(w, 0.0) - 0.5
        cz = _ray(a - s, _2PI3, order, panels)
        cw = _ray(a - t, _2PI3, order, panels)
        h = lambda z, zz: ((z + s - zz - t)
                           / (4.0 * (z + s + zz + t) * (z + s + w)
                              * (zz + t + w)))
        ez = -cz.rule.nodes ** 3 / 3.0
        ew = -cw.rule.nodes ** 3 / 3.0
        return _DoubleForm(cz, cw, h, ez, ew, 1.0, 1.0, "cross k22")
    raise ValueError(kind)


def _cross_r12(s: float, x: float, t: float, y: float) -> float:
    if not s < t:
        return 0.0
    d = s - t
    expo = (-(d ** 4) + 6.0 * (x + y) * d ** 2 + 3.0 * (x - y) ** 2) / (12.0 * d)
    return -math.exp(expo) / math.sqrt(4.0 * math.pi * (t - s))


def _cross_r22_upper(s: float, x: float, t: float, y: float, varpi: float,
                     order: int, panels: int) -> complex:
    """Correction term of the crossover 22 block, valid for
    ``x - s^2 > y - t^2``."""
    w = varpi
    c1 = _ray(w + 0.6, _2PI3, order, panels)
    z1 = c1.rule.nodes
    g1 = _SingleForm(c1, lambda z: 1.0 / (4.0 * (z - w)),
                     -(z1 - s) ** 3 / 3.0 + x * (z1 - s), "cross r22 piece 1")
    val = g1.total() * math.exp((w + t) ** 3 / 3.0 - y * (w + t))
    c2 = _ray(w - 0.6, _2PI3, order, panels)
    z2 = c2.rule.nodes
    g2 = _SingleForm(c2, lambda z: 1.0 / (4.0 * (z - w)),
                     -(z2 - t) ** 3 / 3.0 + y * (z2 - t), "cross r22 piece 2")
    val -= g2.total() * math.exp((w + s) ** 3 / 3.0 - x * (w + s))
    if s + t > 0:
        # same pair integrand as the limit kernel once the cubics cancel
        pref = math.exp((s ** 3 + t ** 3) / 3.0 - y * t - x * s)
        val += pref * _gauss_pair_term(s + t, s * s - t * t + y - x, w)
    return val


def kernel_cross(s: float, x: float, t: float, y: float, varpi: float, *,
                 convention=None, order: int = GL_ORDER,
                 panels: int = PANELS_PER_PIECE) -> KernelValue:
    """Crossover kernel at ``(s, x)`` and ``(t, y)``; times must be >= 0.

    In these coordinates the 22 correction branch is selected by the sign
    of ``(x - s^2) - (y - t^2)``; on the boundary (distinct arguments) an
    error is raised unless ``convention="upper-formula"``.
    """
    if s < 0 or t < 0:
        raise InvalidInputError(f"times must be >= 0, got s={s}, t={t}")
    k11 = _cross_double("11", s, t, varpi, order, panels).value(x, y)
    i12 = _cross_double("12", s, t, varpi, order, panels).value(x, y)
    k12 = i12 + _cross_r12(s, x, t, y)
    i21 = _cross_double("12", t, s, varpi, order, panels).value(y, x)
    k21 = -(i21 + _cross_r12(t, y, s, x))
    k22 = _cross_double("22", s, t, varpi, order, panels).value(x, y)
    branch = _branch_22((x - s ** 2) - (y - t ** 2),
                        (s == t and x == y), convention, "kernel_cross")
    if branch > 0:
        k22 += _cross_r22_upper(s, x, t, y, varpi, order, panels)
    elif branch < 0:
        k22 -= _cross_r22_upper(t, y, s, x, varpi, order, panels)
    return KernelValue(k11, k12, k21, k22)


# ---------------------------------------------------------------------------
# extended Airy kernel
# ---------------------------------------------------------------------------

def _extended_airy_gaussian(t1: float, x1: float, t2: float,
                            x2: float) -> float:
    """Heat-type drift term of the extended Airy kernel; zero for
    t2 <= t1."""
    if not t2 > t1:
        return 0.0
    d = t2 - t1
    return -math.exp(-(x2 - x1) ** 2 / (4.0 * d) - d * (x2 + x1) / 2.0
                     + d ** 3 / 12.0) / math.sqrt(4.0 * math.pi * d)


def kernel_airy_extended(t1: float, x1: float, t2: float, x2: float, *,
                         alpha: float | None = None, beta: float = 1.0,
                         order: int = GL_ORDER,
                         panels: int = PANELS_PER_PIECE) -> complex:
    """Scalar extended Airy kernel.

    The double integral runs over a right wedge anchored at ``alpha`` and
    a left wedge anchored at ``beta``; they must satisfy
    ``alpha + t1 > beta + t2`` so the pair pole stays between them.  The
    default ``alpha = beta + (t2 - t1) + 1`` always does.
    """
    if alpha is None:
        alpha = beta + (t2 - t1) + 1.0
    if not alpha + t1 > beta + t2:
        raise ConfigurationError(
            f"anchors must satisfy alpha + t1 > beta + t2, got "
            f"alpha={alpha}, beta={beta}, t1={t1}, t2={t2}")
    cz = _ray(alpha, _PI3, order, panels)
    cw = _ray(beta, _2PI3, order, panels)
    h = lambda z, w: 1.0 / (z + t1 - w - t2)
    ez = cz.rule.nodes ** 3 / 3.0
    ew = -cw.rule.nodes ** 3 / 3.0
    form = _DoubleForm(cz, cw, h, ez, ew, -1.0, 1.0, "extended Airy")
    return form.value(x1, x2) + _extended_airy_gaussian(t1, x1, t2, x2)


# ---------------------------------------------------------------------------
# scaled large-time forms and their Airy limits
# ---------------------------------------------------------------------------

def _gue_h11(t: float, w: float):
    return lambda z, zz: (t * (z - zz) * (z + t + w) * (zz + t + w)
                          / ((z + t) * (zz + t) * (z + zz + 2.0 * t)))


def _gue_h12(t: float, w: float):
    return lambda z, zz: ((z + zz + 2.0 * t) * (z + w + t)
                          / (2.0 * (z + t) * (z - zz) * (zz + w + t)))


def _gue_h22(t: float, w: float):
    return lambda z, zz: (t ** 3 * (z - zz)
                          / (4.0 * (z + zz + 2.0 * t) * (z + w + t)
                             * (zz + w + t)))


def _scaled22_pieces(t: float, x: float, y: float, w: float,
                     order: int, panels: int) -> complex:
    """Four-piece form of the scaled 22 block, valid for every t > 0 with
    y > x: a shifted double integral plus three residue-style singles."""
    ca = -t - max(w, 0.0) - 0.5
    cz = _ray(ca, _2PI3, order, panels)
    cwc = _ray(ca, _2PI3, order, panels)
    ez = -cz.rule.nodes ** 3 / 3.0
    ew = -cwc.rule.nodes ** 3 / 3.0
    val = _DoubleForm(cz, cwc, _gue_h22(t, w), ez, ew, 1.0, 1.0,
                      "scaled 22 piece A").value(x, y)
    cb = _ray(max(t - 0.75, w + 0.4), _2PI3, order, panels)
    zb = cb.rule.nodes
    piece_b = _SingleForm(cb, lambda z: 1.0 / (4.0 * (z - w)),
                          -(zb - t) ** 3 / 3.0 + x * (zb - t),
                          "scaled 22 piece B").total()
    val += t ** 3 * math.exp((w + t) ** 3 / 3.0 - y * (w + t)) * piece_b
    cc = _ray(w - 0.4, _2PI3, order, panels)
    zc = cc.rule.nodes
    piece_c = _SingleForm(cc, lambda z: 1.0 / (4.0 * (z - w)),
                          -(zc - t) ** 3 / 3.0 + y * (zc - t),
                          "scaled 22 piece C").total()
    val -= t ** 3 * math.exp((w + t) ** 3 / 3.0 - x * (w + t)) * piece_c
    piece_d = _gauss_pair_term(2.0 * t, y - x, w)
    val += t ** 3 * math.exp(2.0 * t ** 3 / 3.0 - t * (x + y)) * piece_d
    return val


def _scaled22(t: float, x: float, y: float, w: float,
              order: int, panels: int) -> complex:
    """Scaled 22 block.  For t beyond the first contour offset all four
    pieces combine into one double integral over vertical lines; below it
    the piece form is used (with the skew extension for y < x)."""
    if t > abs(w) + 3.0:
        c = _ray(-1.0, _PI2, order, panels)
        ez = -c.rule.nodes ** 3 / 3.0
        return _DoubleForm(c, c, _gue_h22(t, w), ez, ez, 1.0, 1.0,
                           "scaled 22 combined").value(x, y)
    if y >= x:
        return _scaled22_pieces(t, x, y, w, order, panels)
    return -_scaled22_pieces(t, y, x, w, order, panels)


def airy_limit_scaled(t: float, x: float, y: float, which: str,
                      params: ScalingParams, *, order: int = GL_ORDER,
                      panels: int = PANELS_PER_PIECE) -> tuple:
    """Scaled large-time block of the limit kernel and its Airy limit.

    Returns ``(lhs, rhs)`` where ``lhs`` is the exactly rewritten scaled
    block at time parameter ``t > 0`` and ``rhs`` the corresponding
    t -> infinity limit:

    * ``which="11"``: ``t e^{-2t^3/3} e^{t(x+y)} k11`` against the
      antisymmetrized Gaussian-type integral.
    * ``which="12"``: ``e^{t(x-y)} k12`` against the Airy kernel.
    * ``which="22"``: ``t^3 e^{2t^3/3} e^{-t(x+y)} k22`` against its
      antisymmetric limit.

    The blocks are evaluated at equal scaled time ``t`` and positions
    shifted by ``-t^2``; the rewriting keeps every integrand O(1).
    """
    if t <= 0:
        raise InvalidInputError(f"t must be positive, got {t}")
    w = params.varpi
    if which == "11":
        c = _ray(1.0, _PI3, order, panels)
        ez = c.rule.nodes ** 3 / 3.0
        lhs = _DoubleForm(c, c, _gue_h11(t, w), ez, ez, -1.0, -1.0,
                          "scaled 11").value(x, y)
        rhs = _DoubleForm(c, c, lambda z, zz: (z - zz) / 2.0, ez, ez,
                          -1.0, -1.0, "limit of scaled 11").value(x, y)
        return lhs, rhs
    if which == "12":
        cz = _ray(1.0, _PI3, order, panels)
        cw = _ray(0.5, _2PI3, order, panels)
        ez = cz.rule.nodes ** 3 / 3.0
        ew = -cw.rule.nodes ** 3 / 3.0
        lhs = _DoubleForm(cz, cw, _gue_h12(t, w), ez, ew, -1.0, 1.0,
                          "scaled 12").value(x, y)
        rhs = _DoubleForm(cz, cw, lambda z, zz: 1.0 / (z - zz), ez, ew,
                          -1.0, 1.0, "Airy kernel").value(x, y)
        return lhs, rhs
    if which == "22":
        lhs = _scaled22(t, x, y, w, order, panels)
        c = _ray(-1.0, _PI2, order, panels)
        ez = -c.rule.nodes ** 3 / 3.0
        rhs = _DoubleForm(c, c, lambda z, zz: (z - zz) / 8.0, ez, ez,
                          1.0, 1.0, "limit of scaled 22").value(x, y)
        return lhs, rhs
    raise InvalidInputError(f"which must be '11', '12' or '22', got {which!r}")


# ---------------------------------------------------------------------------
# finite-model kernel
# ---------------------------------------------------------------------------

def _int_power_exponent(z: np.ndarray, terms) -> np.ndarray:
    """Sum ``c * Log(f(z))`` over (coefficient, values) pairs.

    Every coefficient is an integer (or a real constant times an integer
    lattice datum), so exponentiating the sum is branch-unambiguous.
    """
    out = np.zeros_like(z, dtype=complex)
    for coeff, vals in terms:
        if coeff != 0:
            out = out + coeff * np.log(vals)
    return out


def _circle_double(r1: float, r2: float, hfun, e1fun, e2fun, order: int,
                   panels: int, name: str) -> complex:
    c1 = _circle_cached(r1, order, panels)
    c2 = _circle_cached(r2, order, panels)
    n1, n2 = c1.rule.nodes, c2.rule.nodes
    mat = hfun(n1[:, None], n2[None, :])
    mat = mat * np.exp(e1fun(n1)[:, None] + e2fun(n2)[None, :])
    val = c1.rule.weights @ mat @ c2.rule.weights
    _finite_or_raise(val, name)
    return complex(val / TWO_PI_I ** 2)


@functools.lru_cache(maxsize=64)
def _circle_cached(r: float, order: int, panels: int) -> Contour:
    return make_circle(r, order=order, panels=max(panels, 8))


@functools.lru_cache(maxsize=64)
def _saddle_circle(r: float, order: int, panels: int) -> Contour:
    """Circle with panels graded toward the positive real axis.

    Coefficient-extraction integrands peak sharply near theta = 0 when
    the extracted power is large; grading keeps the peak resolved.
    """
    lower = ContourPiece(z=lambda t: r * np.exp(1j * t),
                         dz=lambda t: 1j * r * np.exp(1j * t),
                         t0=-np.pi, t1=0.0, grade="end")
    upper = ContourPiece(z=lambda t: r * np.exp(1j * t),
                         dz=lambda t: 1j * r * np.exp(1j * t),
                         t0=0.0, t1=np.pi, grade="start")
    return Contour([lower, upper], order=order, panels=max(panels, 8))


def kernel_geo(u: int, x: int, v: int, y: int, q: float, c: float, N: int,
               M_u: int, M_v: int, *, order: int = GL_ORDER,
               panels: int = PANELS_PER_PIECE) -> KernelValue:
    """Finite-model kernel at integer sites ``(u, x)`` and ``(v, y)``.

    ``M_u`` and ``M_v`` are the numbers of row variables absorbed up to
    column indices ``u`` and ``v``; the contour layout of the 12 block
    depends on the order of ``u`` and ``v``.  ``c`` must lie in
    ``(q, 1/q)``.
    """
    if not (0.0 < q < 1.0):
        raise InvalidInputError(f"q must lie in (0, 1), got {q}")
    if not (q < c < 1.0 / q):
        raise InvalidInputError(
            f"c must lie in (q, 1/q) = ({q}, {1.0 / q:.6g}), got {c}")
    for name, val in (("x", x), ("y", y)):
        if val != int(val):
            raise InvalidInputError(f"{name} must be an integer, got {val!r}")
    x, y = int(x), int(y)

    r1 = (1.0 + 1.0 / q) / 2.0
    r2 = max(c, q, 1.0) + 1.0

    # exponent helpers; written out because each block pairs signs
    # differently
    def ep(z, k, M):
        return _int_power_exponent(z, [(-k, z), (M + N, 1.0 - q / z),
                                       (-N, 1.0 - q * z)])

    def em(z, k, M):
        return _int_power_exponent(z, [(k, z), (-(M + N), 1.0 - q / z),
                                       (N, 1.0 - q * z)])

    h11 = lambda z, w: ((z - w) / ((z * z - 1.0) * (w * w - 1.0)
                                   * (z * w - 1.0))
                        * (1.0 - c / z) * (1.0 - c / w))
    k11 = _circle_double(r1, r1, h11, lambda z: ep(z, x, M_u),
                         lambda w: ep(w, y, M_v), order, panels, "geo k11")

    def geo12(uu, xx, Mu, vv, yy, Mv):
        rz = (1.0 + 1.0 / q) / 2.0
        if uu >= vv:
            if max(c, q) >= rz:
                raise ConfigurationError(
                    f"c={c} crowds the inner 12 contour of radius {rz}")
            rw = (max(c, q) + rz) / 2.0
        else:
            rw = max(c, q, rz) + 0.5
        h12 = lambda z, w: ((z * w - 1.0)
                            / (z * (z - w) * (z * z - 1.0))
                            * (z - c) / (w - c))
        return _circle_double(rz, rw, h12, lambda z: ep(z, xx, Mu),
                              lambda w: em(w, yy, Mv), order, panels,
                              "geo k12")

    k12 = geo12(u, x, M_u, v, y, M_v)
    k21 = -geo12(v, y, M_v, u, x, M_u)

    h22 = lambda z, w: ((z - w) / (z * w - 1.0)
                        / ((z - c) * (w - c)))
    k22 = _circle_double(r2, r2, h22, lambda z: em(z, x, M_u),
                         lambda w: em(w, y, M_v), order, panels, "geo k22")
    return KernelValue(k11, k12, k21, k22)


def geo_process_kernel(q: float, c: float, N: int, M_of, **kw):
    """Space-time kernel callable over points ``p = (u, x)`` for the
    finite model; ``M_of(u)`` gives the column count at index u."""
    def kern(p1, p2):
        (u, x), (v, y) = p1, p2
        return kernel_geo(u, x, v, y, q, c, N, M_of(u), M_of(v), **kw)
    return kern


# ---------------------------------------------------------------------------
# pre-limit kernel
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=8)
def _gamma_contours(q: float, varpi: float, N: int, a1: float, a2: float,
                    a3: float, order: int, panels: int):
    sigma_q = ScalingParams(q, varpi).sigma_q
    gp3 = make_gamma(a3 / sigma_q, N, +1, order=order, panels=panels)
    gm1 = make_gamma(a1 / sigma_q, N, -1, order=order, panels=panels)
    gm2 = make_gamma(-a2 / sigma_q, N, -1, order=order, panels=panels)
    return gp3, gm1, gm2


def _check_gamma_properties(gp3: Contour, gm1: Contour, gm2: Contour,
                            c_N: float, q: float) -> None:
    bad = []
    n3 = np.abs(gp3.rule.nodes)
    # (1) the plus contour winds once around the unit circle; it must also
    # stay inside the annulus where the integrand is analytic
    if n3.min() <= 1.0 or n3.max() >= 1.0 / q or gp3.winding_number(0.0) != 1:
        bad.append(1)
    # (2) the outer minus contour encloses c, 1/c and q, and sits inside
    # the plus contour
    ok2 = (gm1.winding_number(c_N) == 1
           and gm1.winding_number(1.0 / c_N) == 1
           and gm1.winding_number(q) == 1)
    if ok2:
        sample = gm1.rule.nodes[:: max(1, gm1.rule.nodes.size // 8)]
        ok2 = all(gp3.winding_number(p) == 1 for p in sample)
    if not ok2:
        bad.append(2)
    # (3) the inner minus contour stays inside the unit circle, still
    # encloses q, and excludes both c and 1/c
    n2 = np.abs(gm2.rule.nodes)
    if (n2.max() >= 1.0 or gm2.winding_number(c_N) != 0
            or gm2.winding_number(1.0 / c_N) != 0
            or gm2.winding_number(q) != 1):
        bad.append(3)
    # (4) no point of the inner minus contour has its reciprocal inside;
    # guaranteed when the contour stays strictly inside the unit circle
    if n2.max() >= 1.0:
        bad.append(4)
    if bad:
        raise ConfigurationError(
            f"pre-limit contour properties violated: {bad}")


def kernel_preN(s: float, x: float, t: float, y: float,
                params: ScalingParams, N: int, *,
                convention=None, offsets=None,
                order: int = GL_ORDER, panels: int = PANELS_PER_PIECE,
                check_contours: bool = True) -> KernelValue:
    """Pre-limit kernel at size ``N`` and scaled points ``(s, x), (t, y)``.

    ``x`` and ``y`` must lie on the scaled particle lattices of times
    ``s`` and ``t``; off-lattice positions raise :class:`LatticeError`.
    Contours are wedge-plus-arc loops around the unit circle whose
    required pole enclosures are verified at construction; a violation
    raises :class:`ConfigurationError` naming the failed properties.
    """
    if N < 2:
        raise InvalidInputError(f"N must be at least 2, got {N}")
    q = params.q
    lat_s = LatticeSpec(s, N, params)
    lat_t = LatticeSpec(t, N, params)
    kx = lat_s.index_of(x)
    ky = lat_t.index_of(y)
    Ts, Tt = lat_s.T, lat_t.T
    c_N = params.c_of_N(N)
    if offsets is None:
        offsets = tuple(abs(params.varpi) + d for d in DEFAULT_GAMMA_OFFSETS)
    a1, a2, a3 = offsets
    gp3, gm1, gm2 = _gamma_contours(q, params.varpi, N, a1, a2, a3,
                                    order, panels)
    if check_contours:
        _check_gamma_properties(gp3, gm1, gm2, c_N, q)

    sigma_q = params.sigma_q
    n13 = sigma_q * N ** (1.0 / 3.0)
    n23 = n13 * n13
    lnq1 = math.log(1.0 - q)

    def ep(z, T, k):
        # exp of this is e^{N S(z) + T G(z) - k log z}, branch safe because
        # all three coefficients are integers
        return _int_power_exponent(
            z, [(-k, z), (T + N, 1.0 - q / z), (-N, 1.0 - q * z)]) - T * lnq1

    def em(z, T, k):
        return -ep(z, T, k)

    def dbl(cz, cw, h, e1, e2, name):
        r1, r2 = cz.rule, cw.rule
        mat = h(r1.nodes[:, None], r2.nodes[None, :])
        mat = mat * np.exp(e1(r1.nodes)[:, None] + e2(r2.nodes)[None, :])
        val = r1.weights @ mat @ r2.weights
        _finite_or_raise(val, name)
        return complex(val / TWO_PI_I ** 2)

    h11 = lambda z, w: (4.0 * sigma_q ** 2 * n23 * (z - w)
                        / ((z * z - 1.0) * (w * w - 1.0) * (z * w - 1.0))
                        * (1.0 - c_N / z) * (1.0 - c_N / w))
    k11 = dbl(gp3, gp3, h11, lambda z: ep(z, Ts, kx),
              lambda w: ep(w, Tt, ky), "preN k11")

    h12 = lambda z, w: (n13 * (z * w - 1.0)
                        / (z * (z - w) * (z * z - 1.0))
                        * (z - c_N) / (w - c_N))
    i12 = dbl(gp3, gm1, h12, lambda z: ep(z, Ts, kx),
              lambda w: em(w, Tt, ky), "preN k12")
    i21 = dbl(gp3, gm1, h12, lambda z: ep(z, Tt, ky),
              lambda w: em(w, Ts, kx), "preN k21")

    h22 = lambda z, w: ((z - w) / (4.0 * (z * w - 1.0)
                                   * (z - c_N) * (w - c_N)))
    k22 = dbl(gm2, gm2, h22, lambda z: em(z, Ts, kx),
              lambda w: em(w, Tt, ky), "preN k22")

    def r12(sa, ka, Ta, sb, kb, Tb):
        # single-contour correction of the 12 block, present for sa < sb;
        # after combining logs the integrand is z^{kb-ka-1} times an
        # integer power of (1-q/z)/(1-q), so any loop around 0 and q
        # works; a circle through the saddle keeps it O(1)
        if not sa < sb:
            return 0.0
        n = Tb - Ta
        m = kb - ka
        if n == 0:
            return -n13 if m == 0 else 0.0
        if m > 0:
            rho = q * (n + m) / m
        else:
            rho = max(q * n, 1.0)
        rho = max(rho, q + 0.3 * (1.0 - q))
        circ = _saddle_circle(rho, order, panels)
        zc = circ.rule.nodes
        expo = _int_power_exponent(zc, [(m - 1, zc), (-n, 1.0 - q / zc)]) \
            + n * lnq1
        val = np.sum(circ.rule.weights * np.exp(expo)) / TWO_PI_I
        _finite_or_raise(val, "preN r12")
        return -n13 * complex(val)

    def r22_upper(ka, Ta, kb, Tb):
        # correction of the 22 block for position_b > position_a
        sc_b = complex(np.exp(em(np.array([c_N + 0j]), Tb, kb)[0]))
        z1 = gm1.rule.nodes
        p1 = np.sum(gm1.rule.weights * np.exp(em(z1, Ta, ka))
                    / (4.0 * (c_N * z1 - 1.0))) / TWO_PI_I
        val = complex(p1) * sc_b
        sc_a = complex(np.exp(em(np.array([c_N + 0j]), Ta, ka)[0]))
        z2 = gm2.rule.nodes
        p2 = np.sum(gm2.rule.weights * np.exp(em(z2, Tb, kb))
                    / (4.0 * (c_N * z2 - 1.0))) / TWO_PI_I
        val -= sc_a * complex(p2)
        expo = _int_power_exponent(
            z2, [(kb - ka - 1, z2), (-Ta, 1.0 - q * z2),
                 (-Tb, 1.0 - q / z2)]) + (Ta + Tb) * lnq1
        p3 = np.sum(gm2.rule.weights * (1.0 - z2 * z2) * np.exp(expo)
                    / (4.0 * (1.0 - c_N * z2) * (z2 - c_N))) / TWO_PI_I
        val += complex(p3)
        _finite_or_raise(val, "preN r22")
        return val

    k12 = i12 + r12(s, kx, Ts, t, ky, Tt)
    k21 = -(i21 + r12(t, ky, Tt, s, kx, Ts))

    same = (Ts == Tt and kx == ky)
    branch = _branch_22(y - x, same, convention, "kernel_preN")
    if branch > 0:
        k22 += r22_upper(kx, Ts, ky, Tt)
    elif branch < 0:
        k22 -= r22_upper(ky, Tt, kx, Ts)
    return KernelValue(k11, k12, k21, k22)


# ---------------------------------------------------------------------------
# equal-time block kernels for Fredholm work
# ---------------------------------------------------------------------------

class BlockKernel:
    """Equal-time matrix kernel exposing batched block evaluation.

    ``b11(xs, ys)``, ``b12(xs, ys)`` and ``b22(xs, ys)`` return the block
    matrices over point grids; the 21 block is derived from skewness.
    Scalar evaluation goes through the same evaluators.
    """

    def __init__(self, b11, b12, b22, name: str = "kernel"):
        self._b11 = b11
        self._b12 = b12
        self._b22 = b22
        self.name = name

    def __call__(self, x: float, y: float) -> KernelValue:
        k11 = complex(self._b11([x], [y])[0, 0])
        k12 = complex(self._b12([x], [y])[0, 0])
        k21 = -complex(self._b12([y], [x])[0, 0])
        k22 = complex(self._b22([x], [y])[0, 0])
        return KernelValue(k11, k12, k21, k22)

    def matrices(self, xs):
        """Block matrices on a common grid, with the antisymmetry of the
        diagonal blocks enforced exactly."""
        xs = np.asarray(xs, dtype=float)
        m11 = self._b11(xs, xs)
        m12 = self._b12(xs, xs)
        m22 = self._b22(xs, xs)
        m11 = (m11 - m11.T) / 2.0
        m22 = (m22 - m22.T) / 2.0
        return m11, m12, -m12.T, m22


def equal_time_limit_kernel(t0: float, params: ScalingParams, *,
                            order: int = GL_ORDER,
                            panels: int = PANELS_PER_PIECE) -> BlockKernel:
    """Limit kernel restricted to one time ``t0 >= 0``, batch ready."""
    if t0 < 0:
        raise InvalidInputError(f"t0 must be >= 0, got {t0}")
    f = params.f_q
    w = params.varpi
    d11 = _limit_double("11", t0, t0, f, w, order, panels)
    d12 = _limit_double("12", t0, t0, f, w, order, panels)
    d22 = _limit_double("22", t0, t0, f, w, order, panels)
    p1, p2 = _limit_r22_singles(t0, t0, f, w, order, panels)
    gauss = math.exp(w ** 3 / 3.0 + f * t0 * w ** 2)

    def b22(xs, ys):
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        ys = np.atleast_1d(np.asarray(ys, dtype=float))
        out = d22.matrix(xs, ys)
        upper = (np.outer(p1.vector(xs, 1.0), gauss * np.exp(-w * ys))
                 - np.outer(gauss * np.exp(-w * xs), p2.vector(ys, 1.0)))
        lower = (np.outer(p1.vector(ys, 1.0), gauss * np.exp(-w * xs))
                 - np.outer(gauss * np.exp(-w * ys), p2.vector(xs, 1.0)))
        if t0 > 0:
            upper = upper + _gauss_pair_term(
                2.0 * f * t0, ys[None, :] - xs[:, None], w)
            lower = lower + _gauss_pair_term(
                2.0 * f * t0, xs[None, :] - ys[:, None], w)
        sign = np.sign(ys[None, :] - xs[:, None])
        out = out + np.where(sign > 0, upper, 0.0) \
            - np.where(sign < 0, lower.T, 0.0)
        return out

    return BlockKernel(d11.matrix, d12.matrix, b22,
                       name=f"equal-time limit kernel (t0={t0})")


def scaled_gue_kernel(t: float, varpi: float = 0.0, *,
                      order: int = GL_ORDER,
                      panels: int = PANELS_PER_PIECE) -> BlockKernel:
    """Gauge-transformed equal-time limit kernel in scaled form.

    Valid for ``t > |varpi| + 3``, where all 22 correction pieces combine
    into a single double integral.  As ``t`` grows the 12 block tends to
    the Airy kernel and the diagonal blocks vanish, so gap probabilities
    of this kernel approach GUE Tracy-Widom values.
    """
    if t <= abs(varpi) + 3.0:
        raise ConfigurationError(
            f"scaled form needs t > |varpi| + 3 = {abs(varpi) + 3.0}, "
            f"got {t}")
    cz3 = _ray(1.0, _PI3, order, panels)
    cw3 = _ray(0.5, _2PI3, order, panels)
    cv = _ray(-1.0, _PI2, order, panels)
    e3 = cz3.rule.nodes ** 3 / 3.0
    ew = -cw3.rule.nodes ** 3 / 3.0
    ev = -cv.rule.nodes ** 3 / 3.0
    d11 = _DoubleForm(cz3, cz3, _gue_h11(t, varpi), e3, e3, -1.0, -1.0,
                      "scaled 11")
    d12 = _DoubleForm(cz3, cw3, _gue_h12(t, varpi), e3, ew, -1.0, 1.0,
                      "scaled 12")
    d22 = _DoubleForm(cv, cv, _gue_h22(t, varpi), ev, ev, 1.0, 1.0,
                      "scaled 22")
    return BlockKernel(
        lambda xs, ys: d11.matrix(xs, ys) / t,
        d12.matrix,
        lambda xs, ys: d22.matrix(xs, ys) / t ** 3,
        name=f"scaled equal-time kernel (t={t})")


def airy_embedding_kernel(*, order: int = GL_ORDER,
                          panels: int = PANELS_PER_PIECE) -> BlockKernel:
    """Airy kernel embedded as the 12 block of a matrix kernel.

    Gap probabilities of this kernel reproduce the GUE Tracy-Widom
    distribution exactly, which serves as a reference for the scaled
    kernels.
    """
    cz = _ray(1.0, _PI3, order, panels)
    cw = _ray(0.5, _2PI3, order, panels)
    ez = cz.rule.nodes ** 3 / 3.0
    ew = -cw.rule.nodes ** 3 / 3.0
    d12 = _DoubleForm(cz, cw, lambda z, w: 1.0 / (z - w), ez, ew,
                      -1.0, 1.0, "Airy kernel")

    def zero(xs, ys):
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        ys = np.atleast_1d(np.asarray(ys, dtype=float))
        return np.zeros((xs.size, ys.size), dtype=complex)

    return BlockKernel(zero, d12.matrix, zero, name="embedded Airy kernel")


def airy_point(x: float, y: float, **kw) -> complex:
    """Airy kernel value through the contour representation."""
    k = airy_embedding_kernel(**kw)
    return complex(k(x, y).k12)


def gauge_kernel(base: BlockKernel, f) -> BlockKernel:
    """Conjugate a block kernel by a positive gauge function ``f``.

    The blocks transform as ``k11 -> f(x) f(y) k11``,
    ``k12 -> (f(x)/f(y)) k12`` and ``k22 -> k22 / (f(x) f(y))``; Pfaffian
    correlations are unchanged.
    """

    def fa(xs):
        return np.vectorize(f)(np.atleast_1d(np.asarray(xs, dtype=float)))

    return BlockKernel(
        lambda xs, ys: np.outer(fa(xs), fa(ys)) * base._b11(xs, ys),
        lambda xs, ys: np.outer(fa(xs), 1.0 / fa(ys)) * base._b12(xs, ys),
        lambda xs, ys: base._b22(xs, ys) / np.outer(fa(xs), fa(ys)),
        name=f"{base.name} (gauged)")

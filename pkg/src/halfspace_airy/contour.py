"""Complex contours and Gauss-Legendre quadrature on them.

Contours are piecewise-smooth parametrized curves; a quadrature rule maps a
contour to nodes z(t_i) and weights z'(t_i) * w_i so that line integrals are
plain weighted sums.  Wedge-plus-arc saddle contours concentrate panels near
the wedge tip (the saddle), where the integrand varies fastest; the closing
arc gets ordinary panels so the rule stays accurate even when the arc
contribution is not negligible.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConstructionError, EvaluationError

GL_ORDER = 24
PANELS_PER_PIECE = 16
ARC_NODES = 64
RAY_TRUNCATION = 10.0
JOIN_TOL = 1e-12


@dataclass(frozen=True)
class ContourPiece:
    """One smooth piece t -> z(t) on [t0, t1] with derivative dz(t).

    ``quad`` selects panelled Gauss-Legendre ("gl") or uniform midpoint
    ("uniform", used for arcs).  ``grade`` packs panels quadratically toward
    the "start" or "end" of the parameter interval.
    """

    z: Callable
    dz: Callable
    t0: float
    t1: float
    quad: str = "gl"
    grade: Optional[str] = None
    n_uniform: int = ARC_NODES


class Contour:
    """Immutable piecewise-smooth contour with an attached quadrature rule.

    Parameters
    ----------
    pieces : sequence of ContourPiece
        Consecutive pieces must join continuously (gap <= ``JOIN_TOL``) and
        have nonvanishing derivative (checked at sample points).
    order, panels : int
        Gauss-Legendre order and panel count per piece for the default rule.

    Raises
    ------
    ConstructionError
        On join gaps, empty piece lists, or vanishing derivatives.
    """

    def __init__(self, pieces, order: int = GL_ORDER, panels: int = PANELS_PER_PIECE):
        pieces = tuple(pieces)
        if not pieces:
            raise ConstructionError("a contour needs at least one piece")
        for p, pn in zip(pieces, pieces[1:]):
            gap = abs(complex(p.z(p.t1)) - complex(pn.z(pn.t0)))
            if gap > JOIN_TOL:
                raise ConstructionError(f"consecutive pieces fail to join: gap {gap:.3e} > {JOIN_TOL:.0e}")
        for p in pieces:
            ts = np.linspace(p.t0, p.t1, 7)
            if np.any(np.abs(p.dz(ts)) == 0):
                raise ConstructionError("contour piece has vanishing derivative")
        self._pieces = pieces
        self._rule = QuadratureRule(self, order=order, panels=panels)

    @property
    def pieces(self):
        return self._pieces

    @property
    def rule(self):
        return self._rule

    @property
    def start(self) -> complex:
        p = self._pieces[0]
        return complex(p.z(p.t0))

    @property
    def end(self) -> complex:
        p = self._pieces[-1]
        return complex(p.z(p.t1))

    @property
    def is_closed(self) -> bool:
        return abs(self.start - self.end) <= 1e-9

    def with_rule(self, order: int = GL_ORDER, panels: int = PANELS_PER_PIECE):
        """A fresh rule on this contour (used by self-convergence checks)."""
        return QuadratureRule(self, order=order, panels=panels)

    def winding_number(self, point: complex) -> int:
        """Winding of a closed contour around ``point`` via the residue sum."""
        r = self._rule
        val = np.sum(r.weights / (r.nodes - point)) / (2j * np.pi)
        return int(np.rint(val.real))


class QuadratureRule:
    """Nodes and weights for integrals along a contour.

    ``weights`` already contain the parametrization derivative, so
    ``sum(f(nodes) * weights)`` approximates the contour integral of f.
    """

    def __init__(self, contour: Contour, order: int = GL_ORDER, panels: int = PANELS_PER_PIECE):
        if order < 2:
            raise ConstructionError(f"Gauss-Legendre order must be >= 2, got {order}")
        if panels < 1:
            raise ConstructionError(f"panel count must be >= 1, got {panels}")
        xg, wg = np.polynomial.legendre.leggauss(order)
        nodes, weights = [], []
        for p in contour.pieces:
            if p.quad == "uniform":
                dt = (p.t1 - p.t0) / p.n_uniform
                ts = p.t0 + dt * (np.arange(p.n_uniform) + 0.5)
                nodes.append(p.z(ts))
                weights.append(p.dz(ts) * dt)
                continue
            frac = np.arange(panels + 1) / panels
            if p.grade == "start":
                frac = frac**2
            elif p.grade == "end":
                frac = 1.0 - (1.0 - frac) ** 2
            edges = p.t0 + (p.t1 - p.t0) * frac
            for a, b in zip(edges, edges[1:]):
                ts = 0.5 * (b - a) * xg + 0.5 * (a + b)
                nodes.append(p.z(ts))
                weights.append(p.dz(ts) * wg * 0.5 * (b - a))
        self.nodes = np.concatenate(nodes)
        self.weights = np.concatenate(weights)
        self.order = order
        self.panel_count = panels
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)


@dataclass(frozen=True)
class ContourOffsets:
    """The three pivot offsets used by the asymptotic contours.

    a_i = |varpi| + 3i, scaled variants a_i^q = a_i / sigma_q.  They are
    strictly increasing and at least 3 apart from the spectral parameter.
    """

    varpi: float
    sigma_q: Optional[float] = None
    a1: float = field(init=False)
    a2: float = field(init=False)
    a3: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "a1", abs(self.varpi) + 3.0)
        object.__setattr__(self, "a2", abs(self.varpi) + 6.0)
        object.__setattr__(self, "a3", abs(self.varpi) + 9.0)

    def a(self, i: int) -> float:
        return (self.a1, self.a2, self.a3)[i - 1]

    def aq(self, i: int) -> float:
        if self.sigma_q is None:
            raise ConstructionError("sigma_q not set; scaled offsets unavailable")
        return self.a(i) / self.sigma_q


def make_ray_pair(z0: complex, phi: float, L: float = RAY_TRUNCATION,
                  order: int = GL_ORDER, panels: int = PANELS_PER_PIECE) -> Contour:
    """Truncated two-ray contour through z0 at angles -phi and +phi.

    Runs from z0 + L e^{-i phi} up through z0 to z0 + L e^{+i phi}
    (increasing imaginary part).  phi must lie in (0, pi) and L must be
    positive, else ConstructionError.
    """
    if not (0.0 < phi < np.pi):
        raise ConstructionError(f"ray angle must lie strictly between 0 and pi, got {phi}")
    if L <= 0:
        raise ConstructionError(f"ray truncation length must be positive, got {L}")
    em, ep = np.exp(-1j * phi), np.exp(1j * phi)
    lower = ContourPiece(z=lambda t: z0 - t * em, dz=lambda t: -em * np.ones_like(t),
                         t0=-L, t1=0.0, grade="end")
    upper = ContourPiece(z=lambda t: z0 + t * ep, dz=lambda t: ep * np.ones_like(t),
                         t0=0.0, t1=L, grade="start")
    return Contour([lower, upper], order=order, panels=panels)


def make_circle(r: float, ccw: bool = True,
                order: int = GL_ORDER, panels: int = PANELS_PER_PIECE) -> Contour:
    """Zero-centered circle of radius r, counter-clockwise by default."""
    if r <= 0:
        raise ConstructionError(f"circle radius must be positive, got {r}")
    s = 1.0 if ccw else -1.0
    piece = ContourPiece(z=lambda t: r * np.exp(1j * s * t),
                         dz=lambda t: 1j * s * r * np.exp(1j * s * t),
                         t0=0.0, t1=2.0 * np.pi)
    return Contour([piece], order=order, panels=panels)


def make_gamma(a: float, N: int, sign: int,
               order: int = GL_ORDER, panels: int = PANELS_PER_PIECE) -> Contour:
    """Closed saddle contour: wedge anchored at 1 + a N^{-1/3} plus return arc.

    The wedge legs have length N^{-1/12} at angle pi/3 (sign=+1) or 2 pi/3
    (sign=-1) off the real axis, traversed with increasing imaginary part;
    the zero-centered arc through the wedge endpoints closes the curve
    counter-clockwise.

    Raises
    ------
    ConstructionError
        If N < 1, sign is not +-1, or the arc geometry degenerates
        (nonpositive radius / wedge endpoints off the open upper half-plane).
    """
    if N < 1:
        raise ConstructionError(f"gamma contour needs N >= 1, got {N}")
    if sign not in (+1, -1):
        raise ConstructionError(f"gamma contour sign must be +1 or -1, got {sign}")
    phi = np.pi / 3.0 if sign == +1 else 2.0 * np.pi / 3.0
    c0 = 1.0 + a * N ** (-1.0 / 3.0)
    ell = N ** (-1.0 / 12.0)
    tip = c0 + ell * np.exp(1j * phi)
    radius = abs(tip)
    theta = np.angle(tip)
    if radius <= 0 or not (0.0 < theta < np.pi):
        raise ConstructionError(
            f"gamma arc degenerate: radius {radius:.3e}, tip angle {theta:.3e}")
    em, ep = np.exp(-1j * phi), np.exp(1j * phi)
    lower = ContourPiece(z=lambda t: c0 - t * em, dz=lambda t: -em * np.ones_like(t),
                         t0=-ell, t1=0.0, grade="end")
    upper = ContourPiece(z=lambda t: c0 + t * ep, dz=lambda t: ep * np.ones_like(t),
                         t0=0.0, t1=ell, grade="start")
    arc = ContourPiece(z=lambda t: radius * np.exp(1j * t),
                       dz=lambda t: 1j * radius * np.exp(1j * t),
                       t0=theta, t1=2.0 * np.pi - theta)
    return Contour([lower, upper, arc], order=order, panels=panels)


def integrate(f, contour: Contour, rule: Optional[QuadratureRule] = None) -> complex:
    """Integral of a vectorized integrand f(z) along the contour.

    Returns the bare contour integral; callers supply any 1/(2 pi i)
    normalization themselves.

    Raises
    ------
    EvaluationError
        If f produces a non-finite value at any node (named in the message).
    """
    r = rule if rule is not None else contour.rule
    vals = np.asarray(f(r.nodes), dtype=complex)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        i = int(np.argwhere(bad)[0][0])
        raise EvaluationError(f"integrand returned a non-finite value at node {i} (z = {r.nodes[i]})")
    return complex(np.sum(vals * r.weights))


def integrate_double(f, contour_z: Contour, contour_w: Contour,
                     rule_z: Optional[QuadratureRule] = None,
                     rule_w: Optional[QuadratureRule] = None) -> complex:
    """Tensor-product double integral of f(z, w) over a pair of contours.

    f must broadcast over meshgrid arrays.  Returns the bare double
    integral; callers apply the 1/(2 pi i)^2 prefactor themselves.
    """
    rz = rule_z if rule_z is not None else contour_z.rule
    rw = rule_w if rule_w is not None else contour_w.rule
    Z = rz.nodes[:, None]
    W = rw.nodes[None, :]
    vals = np.asarray(f(Z, W), dtype=complex)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        i, j = (int(v) for v in np.argwhere(bad)[0])
        raise EvaluationError(
            f"double integrand returned a non-finite value at node pair ({i}, {j}), "
            f"z = {rz.nodes[i]}, w = {rw.nodes[j]}")
    return complex(rz.weights @ vals @ rw.weights)

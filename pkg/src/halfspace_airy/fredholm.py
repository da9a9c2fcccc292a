"""Correlation functions and Fredholm-Pfaffian gap probabilities.

The gap probability of a Pfaffian point process is the alternating series
1 + sum_n (-1)^n / n! int rho_n over the gap region, where rho_n is the
Pfaffian of the assembled 2n x 2n kernel matrix.  Two independent routes
are provided: term-by-term summation of the series over a shared
quadrature grid, and the block Pfaffian Pf(J - Q) on its own grid.  The
routes share no reduction step, so their agreement is a meaningful
cross-check.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (BudgetError, ConditioningError, InconsistencyError,
                     InvalidInputError)
from .kernels import BlockKernel, airy_embedding_kernel
from .skewlin import assemble_block_skew, pfaffian

DEFAULT_CUT = 10.0
DEFAULT_SERIES_GRID = 16
DEFAULT_PFAFFIAN_GRID = 24
# largest number of Pfaffian submatrices a series evaluation may enumerate
SERIES_SUBSET_BUDGET = 300_000
IMAG_TOL_SOFT = 1e-8
IMAG_TOL_HARD = 1e-6


# ---------------------------------------------------------------------------
# reference measures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UniformLattice:
    """Plain affine lattice, spacing * k + offset.

    Duck-compatible with the scaled particle lattices for reference-measure
    purposes; the default is the integer lattice of the finite models.
    """

    spacing: float = 1.0
    offset: float = 0.0

    def position(self, k: int) -> float:
        return self.spacing * k + self.offset


@dataclass(frozen=True)
class ReferenceMeasure:
    """Reference measure fixing how gap integrals become weighted sums.

    ``counting`` carries a particle lattice (scaled ``LatticeSpec`` or
    ``UniformLattice``) and a scale factor per atom; the scaled counting
    measure uses the lattice spacing itself.  ``lebesgue`` uses
    Gauss-Legendre nodes on the requested interval; ``product`` takes a
    tuple of times and pairs each with a Lebesgue grid, producing
    space-time points (t, x).
    """

    kind: str
    lattice: object = None
    scale: Optional[float] = None
    times: Optional[tuple] = None

    @staticmethod
    def counting(lattice, scale: Optional[float] = None
                 ) -> "ReferenceMeasure":
        if scale is None:
            scale = lattice.spacing
        return ReferenceMeasure("counting", lattice=lattice, scale=scale)

    @staticmethod
    def lebesgue() -> "ReferenceMeasure":
        return ReferenceMeasure("lebesgue")

    @staticmethod
    def product(times: Sequence[float]) -> "ReferenceMeasure":
        if len(times) == 0:
            raise InvalidInputError("product measure needs at least one time")
        return ReferenceMeasure("product", times=tuple(times))

    def nodes_weights(self, lo: float, hi: float, size: int):
        """Points and weights representing this measure on ``(lo, hi]``."""
        if hi < lo:
            raise InvalidInputError(f"empty interval ({lo}, {hi}]")
        if self.kind == "counting":
            lat = self.lattice
            k_lo = math.floor((lo - lat.offset) / lat.spacing + 1e-12) + 1
            k_hi = math.floor((hi - lat.offset) / lat.spacing + 1e-12)
            pts = [lat.position(k) for k in range(k_lo, k_hi + 1)]
            return pts, np.full(len(pts), self.scale)
        if self.kind == "lebesgue":
            nodes, wts = np.polynomial.legendre.leggauss(size)
            half = (hi - lo) / 2.0
            return list(lo + half * (nodes + 1.0)), wts * half
        if self.kind == "product":
            nodes, wts = np.polynomial.legendre.leggauss(size)
            half = (hi - lo) / 2.0
            xs = lo + half * (nodes + 1.0)
            pts = [(t, x) for t in self.times for x in xs]
            return pts, np.tile(wts * half, len(self.times))
        raise InvalidInputError(f"unknown reference measure kind {self.kind!r}")


@dataclass
class GapProbabilityResult:
    """Gap probability with the diagnostics of how it was obtained.

    ``term_magnitudes`` holds |T_n| for the series route (empty for the
    discretized route); ``tail_bound`` is the superexponential envelope
    estimate of the truncated tail.
    """

    value: float
    n_terms_used: int
    term_magnitudes: list = field(default_factory=list)
    method: str = "series"
    tail_bound: Optional[float] = None


# ---------------------------------------------------------------------------
# block-matrix assembly on a point grid
# ---------------------------------------------------------------------------

def _interleave_blocks(m11, m12, m21, m22) -> np.ndarray:
    n = m11.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    out[0::2, 0::2] = m11
    out[0::2, 1::2] = m12
    out[1::2, 0::2] = m21
    out[1::2, 1::2] = m22
    return out


def _grid_matrix(points, kernel) -> np.ndarray:
    """Exactly skew 2n x 2n kernel matrix over the point grid."""
    if isinstance(kernel, BlockKernel):
        m = _interleave_blocks(*kernel.matrices(np.asarray(points,
                                                           dtype=float)))
        return (m - m.T) / 2.0
    return assemble_block_skew(points, kernel).entries


def _realize(value: complex, what: str) -> float:
    if abs(value.imag) > IMAG_TOL_HARD:
        raise InconsistencyError(
            f"{what} has imaginary residual {value.imag:.3e} beyond "
            f"{IMAG_TOL_HARD:.0e}; the kernel is not consistently skew")
    return float(value.real)


def correlation_rho(points, kernel) -> float:
    """n-point correlation: Pfaffian of the assembled block matrix.

    Points must be pairwise distinct; the value of an actual point
    process is real up to quadrature dust, so the real part is returned
    and an imaginary residual above 1e-6 raises an inconsistency error.
    """
    pts = list(points)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if pts[i] == pts[j]:
                raise InvalidInputError(
                    f"correlation points must be pairwise distinct, got "
                    f"{pts[i]!r} twice")
    val = pfaffian(assemble_block_skew(pts, kernel))
    return _realize(val, "correlation")


# ---------------------------------------------------------------------------
# gap probabilities
# ---------------------------------------------------------------------------

def _envelope_tail(mags, n_max: int) -> float:
    """Tail estimate from the (2n)^{n/2} C^n / n! term envelope, with C
    fitted conservatively to the computed terms."""
    C = 0.0
    for n, m in enumerate(mags, start=1):
        if m > 0.0:
            C = max(C, (m * math.factorial(n)
                        / (2.0 * n) ** (n / 2.0)) ** (1.0 / n))
    if C == 0.0:
        return 0.0
    tail = 0.0
    for k in range(n_max + 1, n_max + 80):
        try:
            term = (2.0 * k) ** (k / 2.0) * C ** k / math.factorial(k)
        except OverflowError:
            return math.inf
        tail += term
        if term < 1e-30:
            break
    return tail


def _check_term_decay(mags) -> None:
    floor = max(1e-13, 1e-12 * max(mags, default=0.0))
    consecutive = 0
    for n in range(4, len(mags) + 1):
        if mags[n - 1] >= mags[n - 2] and mags[n - 1] > floor:
            consecutive += 1
            if consecutive >= 2:
                raise ConditioningError(
                    f"series term magnitudes stopped decreasing at n={n} "
                    f"({mags[n - 1]:.3e} >= {mags[n - 2]:.3e}); use a "
                    f"denser quadrature grid or a smaller cutoff")
        else:
            consecutive = 0


def gap_series(t: float, kernel, reference: ReferenceMeasure,
               n_max: int = 8, cutoff: Optional[float] = None,
               grid_size: int = DEFAULT_SERIES_GRID) -> GapProbabilityResult:
    """Gap probability by direct summation of the alternating series.

    Term n sums (-1)^n prod(w) Pf over all n-subsets of the shared grid
    on ``(t, cutoff]`` (permutation symmetry collapses the n-fold sum to
    subsets; coincident tuples have repeated block rows and vanish).
    """
    if n_max < 0:
        raise InvalidInputError(f"n_max must be >= 0, got {n_max}")
    if cutoff is None:
        cutoff = t + DEFAULT_CUT
    if cutoff < t:
        raise InvalidInputError(f"cutoff {cutoff} below threshold {t}")
    if cutoff == t or n_max == 0:
        return GapProbabilityResult(1.0, 0, [], "series", 0.0)
    points, weights = reference.nodes_weights(t, cutoff, grid_size)
    G = len(points)
    if G == 0:
        return GapProbabilityResult(1.0, 0, [], "series", 0.0)
    depth = min(n_max, G)
    n_subsets = sum(math.comb(G, n) for n in range(1, depth + 1))
    if n_subsets > SERIES_SUBSET_BUDGET:
        raise BudgetError(
            f"series over {G} grid points to depth {depth} needs "
            f"{n_subsets} Pfaffians (budget {SERIES_SUBSET_BUDGET}); "
            f"reduce the grid or use the discretized route")
    m = _grid_matrix(points, kernel)
    weights = np.asarray(weights, dtype=float)

    total = 1.0 + 0.0j
    mags = []
    for n in range(1, depth + 1):
        term = 0.0 + 0.0j
        for sub in itertools.combinations(range(G), n):
            rows = np.array([2 * i + a for i in sub for a in (0, 1)])
            term += (np.prod(weights[list(sub)])
                     * pfaffian(m[np.ix_(rows, rows)]))
        term *= (-1.0) ** n
        total += term
        mags.append(abs(term))
    _check_term_decay(mags)
    value = _realize(total, "gap series")
    return GapProbabilityResult(value, depth, mags, "series",
                                _envelope_tail(mags, depth))


def gap_discretized(t: float, kernel, reference: ReferenceMeasure,
                    grid_size: int = DEFAULT_PFAFFIAN_GRID,
                    cutoff: Optional[float] = None) -> GapProbabilityResult:
    """Gap probability as the block Pfaffian Pf(J - Q).

    J is block diagonal with [[0, 1], [-1, 0]] per grid node and Q has
    2 x 2 blocks sqrt(w_i w_j) K(x_i, x_j).  With one node x of weight w
    this reads Pf [[ -w K11, 1 - w K12], [w K21 - 1, -w K22]]
    = 1 - w K12(x, x), the series truncated after n = 1, which fixes the
    sign conventions.
    """
    if grid_size < 8:
        raise InvalidInputError(f"grid_size must be >= 8, got {grid_size}")
    if cutoff is None:
        cutoff = t + DEFAULT_CUT
    if cutoff < t:
        raise InvalidInputError(f"cutoff {cutoff} below threshold {t}")
    if cutoff == t:
        return GapProbabilityResult(1.0, 0, [], "discretized-pfaffian", 0.0)
    points, weights = reference.nodes_weights(t, cutoff, grid_size)
    G = len(points)
    if G == 0:
        return GapProbabilityResult(1.0, 0, [], "discretized-pfaffian", 0.0)
    m = _grid_matrix(points, kernel)
    root = np.repeat(np.sqrt(np.asarray(weights, dtype=float)), 2)
    q = root[:, None] * m * root[None, :]
    j = np.zeros_like(q)
    j[0::2, 1::2] = np.eye(G)
    j[1::2, 0::2] = -np.eye(G)
    value = _realize(pfaffian(j - q), "gap Pfaffian")
    return GapProbabilityResult(value, G, [], "discretized-pfaffian", None)


@functools.lru_cache(maxsize=4)
def _airy_kernel_cached(order: Optional[int], panels: Optional[int]):
    kw = {}
    if order is not None:
        kw["order"] = order
    if panels is not None:
        kw["panels"] = panels
    return airy_embedding_kernel(**kw)


def f2_airy_reference(s: float, grid_size: int = 48,
                      cut: float = DEFAULT_CUT, *,
                      order: Optional[int] = None,
                      panels: Optional[int] = None) -> float:
    """GUE Tracy-Widom distribution det(I - K_Ai) on (s, s+cut].

    The Airy kernel is evaluated through its contour representation and
    discretized on a Gauss-Legendre grid; this doubles as the
    determinantal reference for the Pfaffian embedding cross-check.
    """
    kern = _airy_kernel_cached(order, panels)
    nodes, wts = np.polynomial.legendre.leggauss(grid_size)
    half = cut / 2.0
    xs = s + half * (nodes + 1.0)
    a = kern._b12(xs, xs)
    root = np.sqrt(wts * half)
    det = np.linalg.det(np.eye(grid_size) - root[:, None] * a * root[None, :])
    return _realize(complex(det), "Airy determinant")


def factorial_moment_predict(sets, counts, kernel,
                             reference: ReferenceMeasure,
                             grid_size: int = 12) -> float:
    """Joint factorial moment E[prod_j M(A_j)! / (M(A_j) - n_j)!].

    ``sets`` are disjoint half-open windows (lo, hi]; the moment is the
    integral of rho_n over A_1^{n_1} x ... x A_m^{n_m}, reduced to
    distinct-subset sums per window (ordered tuples contribute n_j! and
    coincident ones vanish).
    """
    windows = [tuple(wd) for wd in sets]
    counts = list(counts)
    if len(windows) != len(counts):
        raise InvalidInputError("one count per window required")
    if any(n < 0 for n in counts):
        raise InvalidInputError("counts must be nonnegative")
    order_w = sorted(range(len(windows)), key=lambda i: windows[i][0])
    for a, b in zip(order_w, order_w[1:]):
        if windows[b][0] < windows[a][1]:
            raise InvalidInputError(
                f"windows {windows[a]} and {windows[b]} overlap")

    per_window = []
    for (lo, hi), n in zip(windows, counts):
        if n == 0:
            continue
        pts, wts = reference.nodes_weights(lo, hi, grid_size)
        if len(pts) < n:
            return 0.0
        per_window.append((pts, np.asarray(wts, dtype=float), n))
    if not per_window:
        return 1.0

    total = 0.0 + 0.0j
    choices = [list(itertools.combinations(range(len(p)), n))
               for p, _, n in per_window]
    for combo in itertools.product(*choices):
        pts = []
        coeff = 1.0
        for (wpts, wwts, n), sub in zip(per_window, combo):
            pts.extend(wpts[i] for i in sub)
            coeff *= math.factorial(n) * float(np.prod(wwts[list(sub)]))
        total += coeff * pfaffian(assemble_block_skew(pts, kernel))
    return _realize(total, "factorial moment")

"""Skew-symmetric linear algebra: Pfaffians and block kernel assembly.

Every correlation computed by this package reduces to the Pfaffian of a
2n x 2n skew-symmetric matrix built from 2x2 kernel blocks.  Two independent
Pfaffian routes are kept side by side: an O(n^3) elimination and a
combinatorial matching sum used as an oracle for small dimensions.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InconsistencyError, InvalidInputError, SizeLimitError

SKEW_CONSTRUCT_TOL = 1e-12
ASSEMBLE_SKEW_TOL = 1e-8
BRUTE_FORCE_MAX_DIM = 10


@dataclass(frozen=True)
class KernelValue:
    """One 2x2 kernel block K(p, p') with complex entries."""

    k11: complex
    k12: complex
    k21: complex
    k22: complex

    def as_array(self):
        return np.array([[self.k11, self.k12], [self.k21, self.k22]], dtype=complex)


class SkewMatrix:
    """Even-dimensional skew-symmetric complex matrix.

    Parameters
    ----------
    entries : array_like
        Square array of even dimension with A = -A^T entrywise to within
        ``SKEW_CONSTRUCT_TOL`` in absolute value.

    Raises
    ------
    InvalidInputError
        If the dimension is odd, the array is not square, or skew-symmetry
        is violated beyond tolerance.
    """

    def __init__(self, entries):
        a = np.asarray(entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidInputError(f"expected a square matrix, got shape {a.shape}")
        if a.shape[0] % 2 != 0:
            raise InvalidInputError(f"skew matrices here must have even dimension, got {a.shape[0]}")
        viol = np.max(np.abs(a + a.T)) if a.size else 0.0
        if viol > SKEW_CONSTRUCT_TOL:
            raise InvalidInputError(f"skew-symmetry violated: max |A + A^T| = {viol:.3e} > {SKEW_CONSTRUCT_TOL:.0e}")
        # exact skew-symmetrization removes representation dust
        self._a = (a - a.T) / 2.0
        self._a.setflags(write=False)

    @property
    def entries(self):
        return self._a

    @property
    def dim(self) -> int:
        return self._a.shape[0]

    def condition_estimate(self) -> float:
        """2-norm condition number; callers widen tolerances near singularity."""
        if self.dim == 0:
            return 1.0
        try:
            return float(np.linalg.cond(self._a, 2))
        except np.linalg.LinAlgError:
            return np.inf


def pfaffian(a) -> complex:
    """Pfaffian via skew-symmetric elimination with partial pivoting.

    Congruence transforms by unit lower-triangular matrices (determinant 1)
    reduce the matrix to skew tridiagonal form; row/column swaps each flip
    the sign.  The Pfaffian is the signed product of the superdiagonal of
    the even rows.

    Parameters
    ----------
    a : SkewMatrix or array_like
        Arrays are validated through ``SkewMatrix`` first.

    Returns
    -------
    complex
        Pf(a); the empty matrix gives 1.
    """
    if not isinstance(a, SkewMatrix):
        a = SkewMatrix(a)
    n = a.dim
    if n == 0:
        return 1.0 + 0.0j
    m = a.entries.copy()
    pf = 1.0 + 0.0j
    for k in range(0, n - 1, 2):
        # pivot: move the largest entry of column k below the diagonal into row k+1
        kp = k + 1 + int(np.argmax(np.abs(m[k + 1:, k])))
        if kp != k + 1:
            m[[k + 1, kp], :] = m[[kp, k + 1], :]
            m[:, [k + 1, kp]] = m[:, [kp, k + 1]]
            pf = -pf
        pivot = m[k + 1, k]
        if pivot == 0:
            return 0.0 + 0.0j
        pf *= m[k, k + 1]
        if k + 2 < n:
            tau = m[k, k + 2:] / m[k, k + 1]
            col = m[k + 2:, k + 1]
            m[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return complex(pf)


def pfaffian_bruteforce(a) -> complex:
    """Pfaffian as the signed sum over perfect matchings.

    The permutation-sum definition collapses (2^n n!)-fold symmetry onto
    perfect matchings; this evaluates that sum by recursive expansion along
    the first remaining row.  Oracle use only.

    Raises
    ------
    SizeLimitError
        For dimension above ``BRUTE_FORCE_MAX_DIM``.
    """
    if not isinstance(a, SkewMatrix):
        a = SkewMatrix(a)
    n = a.dim
    if n > BRUTE_FORCE_MAX_DIM:
        raise SizeLimitError(f"brute-force Pfaffian limited to dim <= {BRUTE_FORCE_MAX_DIM}, got {n}")
    if n == 0:
        return 1.0 + 0.0j
    m = a.entries

    def expand(idx):
        if not idx:
            return 1.0 + 0.0j
        i = idx[0]
        total = 0.0 + 0.0j
        for pos in range(1, len(idx)):
            j = idx[pos]
            sign = 1.0 if pos % 2 == 1 else -1.0
            rest = idx[1:pos] + idx[pos + 1:]
            total += sign * m[i, j] * expand(rest)
        return total

    return complex(expand(tuple(range(n))))


def assemble_block_skew(points, kernel) -> SkewMatrix:
    """Assemble the 2n x 2n block matrix [K(p_i, p_j)] for a point tuple.

    Parameters
    ----------
    points : sequence
        Points accepted by ``kernel``; n points give a 2n x 2n matrix.
    kernel : callable
        ``kernel(p, p')`` returning a :class:`KernelValue`.

    Raises
    ------
    InconsistencyError
        If any pair violates kernel skew-symmetry
        K_ij(p, p') = -K_ji(p', p) beyond ``ASSEMBLE_SKEW_TOL``; the message
        names the offending pair.  Within tolerance, the matrix is
        symmetrized exactly before wrapping.
    """
    pts = list(points)
    n = len(pts)
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            kij = kernel(pts[i], pts[j]).as_array()
            if i == j:
                block = kij
                viol = np.max(np.abs(block + block.T))
            else:
                kji = kernel(pts[j], pts[i]).as_array()
                viol = np.max(np.abs(kij + kji.T))
                block = kij
            if viol > ASSEMBLE_SKEW_TOL:
                raise InconsistencyError(
                    f"kernel skew-symmetry violated at point pair ({pts[i]!r}, {pts[j]!r}): "
                    f"max |K(p,p') + K(p',p)^T| = {viol:.3e} > {ASSEMBLE_SKEW_TOL:.0e}"
                )
            out[2 * i:2 * i + 2, 2 * j:2 * j + 2] = block
            if j > i:
                out[2 * j:2 * j + 2, 2 * i:2 * i + 2] = -block.T
    out = (out - out.T) / 2.0
    return SkewMatrix(out)

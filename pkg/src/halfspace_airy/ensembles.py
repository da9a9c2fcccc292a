"""Samplers for discrete half-space interlacing ensembles.

Covers reverse geometric random walks, exact rejection sampling and Glauber
dynamics for walks conditioned to interlace above a floor, a Metropolis
chain for the boundary-weighted Schur measure on partition sequences,
avoiding reverse Brownian motions built from bridge decompositions, and
empirical window statistics for comparing Monte Carlo output against
Pfaffian predictions.

All samplers accept ``seed`` as an integer, a ``numpy.random.Generator``,
or ``None``; identical integer seeds reproduce identical sample streams.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetError, InconsistencyError, InvalidInputError

DEFAULT_MAX_ATTEMPTS = 1_000_000
DEFAULT_RBM_GRID = 512
# Proposal randomness is drawn in blocks to keep the hot loop cheap.
PROPOSAL_CHUNK = 1 << 16


def _rng(seed):
    return np.random.default_rng(seed)


def _as_int(val, name):
    if isinstance(val, (bool, np.bool_)) or int(val) != val:
        raise InvalidInputError(f"{name} must be an integer, got {val!r}")
    return int(val)


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Partition:
    """Weakly decreasing tuple of nonnegative integers, trailing zeros trimmed."""

    parts: tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(_as_int(p, "partition part") for p in self.parts)
        if any(p < 0 for p in parts):
            raise InvalidInputError(f"partition parts must be >= 0, got {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise InvalidInputError(
                f"partition parts must be weakly decreasing, got {parts}"
            )
        while parts and parts[-1] == 0:
            parts = parts[:-1]
        object.__setattr__(self, "parts", parts)

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def row(self, i: int) -> int:
        """Part number ``i`` (1-based); zero beyond the last nonzero part."""
        if i < 1:
            raise InvalidInputError(f"row index must be >= 1, got {i}")
        return self.parts[i - 1] if i <= len(self.parts) else 0

    def interlaces(self, other: "Partition") -> bool:
        """True when ``self`` interlaces below ``other``.

        The condition is other_1 >= self_1 >= other_2 >= self_2 >= ...
        """
        n = max(len(self.parts), len(other.parts)) + 1
        for i in range(1, n + 1):
            if not (other.row(i) >= self.row(i) >= other.row(i + 1)):
                return False
        return True

    def __len__(self) -> int:
        return len(self.parts)


@dataclass(frozen=True)
class IncreasingPath:
    """Integer path on times 0..T with nonnegative increments."""

    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(_as_int(v, "path value") for v in self.values)
        if not vals:
            raise InvalidInputError("a path needs at least one value")
        if any(vals[j + 1] < vals[j] for j in range(len(vals) - 1)):
            raise InvalidInputError(f"path values must be weakly increasing, got {vals}")
        object.__setattr__(self, "values", vals)

    @property
    def t_max(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, j: int) -> int:
        return self.values[j]

    def __len__(self) -> int:
        return len(self.values)


def _normalize_floor(g, T):
    """Floor as a length ``T + 1`` tuple, or None for no floor.

    Accepts None, a single integer (constant floor), or a sequence of
    integers indexed by time. The floor must be increasing.
    """
    if g is None:
        return None
    if np.isscalar(g) and not isinstance(g, (str, bytes)):
        if np.isneginf(g):
            return None
        vals = (int(_as_int(g, "floor value")),) * (T + 1)
    else:
        vals = tuple(_as_int(v, "floor value") for v in g)
        if len(vals) != T + 1:
            raise InvalidInputError(
                f"floor must have {T + 1} values for T={T}, got {len(vals)}"
            )
    if any(vals[j + 1] < vals[j] for j in range(len(vals) - 1)):
        raise InvalidInputError(f"floor must be increasing, got {vals}")
    return vals


def _check_signature(yvec):
    ys = tuple(_as_int(y, "exit value") for y in yvec)
    if not ys:
        raise InvalidInputError("exit data must be nonempty")
    if any(ys[i] < ys[i + 1] for i in range(len(ys) - 1)):
        raise InvalidInputError(f"exit data must be weakly decreasing, got {ys}")
    return ys


def _interlacing_ok(values, floor):
    """Check B_i(r-1) >= B_{i+1}(r) with the floor as path k+1."""
    k, n = values.shape
    for i in range(k - 1):
        if np.any(values[i, :-1] < values[i + 1, 1:]):
            return False
    if floor is not None:
        fl = np.asarray(floor)
        if np.any(values[k - 1, :-1] < fl[1:]):
            return False
    return True


@dataclass(frozen=True)
class GeomLineEnsemble:
    """Interlacing collection of increasing paths with fixed exit data.

    Path i ends at ``exit_data[i]`` and stays weakly above path i+1 shifted
    one step left; the floor (when present) plays the role of path k+1.
    """

    paths: tuple[IncreasingPath, ...]
    exit_data: tuple[int, ...]
    floor: tuple[int, ...] | None = None

    def __post_init__(self):
        if not self.paths:
            raise InvalidInputError("ensemble needs at least one path")
        lengths = {len(p) for p in self.paths}
        if len(lengths) != 1:
            raise InvalidInputError("all paths must share the same time domain")
        ys = _check_signature(self.exit_data)
        object.__setattr__(self, "exit_data", ys)
        if len(ys) != len(self.paths):
            raise InvalidInputError(
                f"{len(self.paths)} paths need {len(self.paths)} exit values"
            )
        T = self.paths[0].t_max
        fl = _normalize_floor(self.floor, T)
        object.__setattr__(self, "floor", fl)
        for p, y in zip(self.paths, ys):
            if p[T] != y:
                raise InvalidInputError(f"path ends at {p[T]}, exit data says {y}")
        if not _interlacing_ok(self.path_values(), fl):
            raise InvalidInputError("paths violate the interlacing condition")

    @property
    def k(self) -> int:
        return len(self.paths)

    @property
    def t_max(self) -> int:
        return self.paths[0].t_max

    def path_values(self) -> np.ndarray:
        """Paths as an integer array of shape (k, T + 1)."""
        return np.array([p.values for p in self.paths], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class BrownianEnsembleSample:
    """Discretized avoiding reverse Brownian motions on a uniform grid.

    ``curves[i]`` holds curve i on ``grid``; accepted samples are strictly
    ordered top to bottom above the floor at every grid point. ``attempts``
    counts rejection rounds, so 1 / attempts estimates the avoidance
    probability of the free measure.
    """

    grid: np.ndarray
    curves: np.ndarray
    drifts: tuple[float, ...]
    exit_data: tuple[float, ...]
    attempts: int


# ---------------------------------------------------------------------------
# Reverse geometric walks and rejection sampling
# ---------------------------------------------------------------------------


def _geometric(rng, q, size):
    # pmf (1 - q) q^k on {0, 1, ...}; numpy's geometric starts at 1
    return rng.geometric(1.0 - q, size=size) - 1


def _check_q(q):
    if not (0.0 <= q < 1.0):
        raise InvalidInputError(f"jump parameter must lie in [0, 1), got {q}")
    return float(q)


def sample_reverse_walk(T, y, q, seed=None) -> IncreasingPath:
    """Walk run backwards from value ``y`` at time ``T`` with geometric jumps.

    The value at time j is y minus the sum of T - j independent geometric
    variables with mass (1 - q) q^k, so the path increases in time and
    q = 0 gives the constant path at y.
    """
    T = _as_int(T, "T")
    if T < 0:
        raise InvalidInputError(f"T must be >= 0, got {T}")
    y = _as_int(y, "y")
    q = _check_q(q)
    rng = _rng(seed)
    jumps = _geometric(rng, q, T)
    suffix = np.concatenate([np.cumsum(jumps[::-1])[::-1], [0]])
    return IncreasingPath(tuple(int(y - s) for s in suffix))


def _prepare_boundary(T, yvec, qvec, g):
    ys = _check_signature(yvec)
    qs = tuple(_check_q(q) for q in qvec)
    if len(qs) != len(ys):
        raise InvalidInputError(f"{len(ys)} exit values need {len(ys)} jump parameters")
    fl = _normalize_floor(g, T)
    if fl is not None and fl[T] > ys[-1]:
        raise InvalidInputError(
            f"floor value {fl[T]} at time {T} exceeds lowest exit value {ys[-1]}"
        )
    return ys, qs, fl


def sample_interlacing_rejection(
    T, yvec, qvec, g=None, seed=None, max_attempts=DEFAULT_MAX_ATTEMPTS
):
    """Exact sample of interlacing-conditioned reverse walks, by rejection.

    Draws independent reverse walks with exit data ``yvec`` until the
    interlacing event holds above the floor ``g``. Returns the accepted
    ensemble together with the attempt count; the reciprocal of the mean
    attempt count estimates the acceptance probability of the event.
    """
    T = _as_int(T, "T")
    if T < 0:
        raise InvalidInputError(f"T must be >= 0, got {T}")
    ys, qs, fl = _prepare_boundary(T, yvec, qvec, g)
    max_attempts = _as_int(max_attempts, "max_attempts")
    if max_attempts < 1:
        raise InvalidInputError(f"max_attempts must be >= 1, got {max_attempts}")
    rng = _rng(seed)
    k = len(ys)
    for attempt in range(1, max_attempts + 1):
        values = np.empty((k, T + 1), dtype=np.int64)
        for i in range(k):
            jumps = _geometric(rng, qs[i], T)
            suffix = np.concatenate([np.cumsum(jumps[::-1])[::-1], [0]])
            values[i] = ys[i] - suffix
        if _interlacing_ok(values, fl):
            paths = tuple(IncreasingPath(tuple(map(int, row))) for row in values)
            return GeomLineEnsemble(paths, ys, fl), attempt
    raise BudgetError(
        f"no interlacing sample in {max_attempts} attempts; "
        "use the Glauber chain for this boundary data"
    )


# ---------------------------------------------------------------------------
# Glauber dynamics for the interlacing-conditioned law
# ---------------------------------------------------------------------------


def _glauber_admissible(state, i, t, zeta, T, floor):
    """Single-site move legality: path shape and interlacing, exit data fixed.

    Moves at t = T are never admissible (they would change the exit data),
    which also makes the chain aperiodic.
    """
    if t >= T:
        return False
    k = state.shape[0]
    cand = state[i, t] + zeta
    if zeta == 1:
        if cand > state[i, t + 1]:
            return False
        if t > 0 and i > 0 and state[i - 1, t - 1] < cand:
            return False
    else:
        if t > 0 and cand < state[i, t - 1]:
            return False
        if i + 1 < k:
            if cand < state[i + 1, t + 1]:
                return False
        elif floor is not None and cand < floor[t + 1]:
            return False
    return True


def _proposal_stream(rng, k, T, n_steps):
    done = 0
    while done < n_steps:
        m = min(PROPOSAL_CHUNK, n_steps - done)
        iis = rng.integers(0, k, size=m)
        tts = rng.integers(0, T + 1, size=m)
        zzs = 2 * rng.integers(0, 2, size=m) - 1
        uus = rng.random(m)
        yield from zip(iis, tts, zzs, uus)
        done += m


def run_glauber(
    T, yvec, qvec, g=None, n_steps=0, seed=None, coupled_with=None, *, observer=None
):
    """Single-site Glauber chain whose invariant law is the conditioned ensemble.

    Each step proposes moving one path value at one time by +-1, chosen
    uniformly, and accepts admissible candidates with probability given by
    the ratio of reverse-walk weights. Only the values at time zero carry
    weight, so the ratio is q_i for a down move at time zero and one
    otherwise.

    When ``coupled_with`` is a pair ``(yvec_top, g_top)`` with boundary data
    ordered above ``(yvec, g)``, a second chain is driven by the same
    proposal and uniform stream, and the pair (bottom, top) is returned;
    the shared stream keeps the chains pathwise ordered at every step.

    ``observer``, when given, is called as ``observer(step, state)`` (or
    ``observer(step, bottom, top)`` in coupled mode) after every step with
    live integer arrays of shape (k, T + 1); copy before storing.
    """
    T = _as_int(T, "T")
    if T < 0:
        raise InvalidInputError(f"T must be >= 0, got {T}")
    n_steps = _as_int(n_steps, "n_steps")
    if n_steps < 0:
        raise InvalidInputError(f"n_steps must be >= 0, got {n_steps}")
    ys, qs, fl = _prepare_boundary(T, yvec, qvec, g)
    k = len(ys)
    boundaries = [(ys, fl)]
    if coupled_with is not None:
        try:
            y_top, g_top = coupled_with
        except (TypeError, ValueError):
            raise InvalidInputError(
                "coupled_with must be a pair (yvec_top, g_top)"
            ) from None
        ys_t, _, fl_t = _prepare_boundary(T, y_top, qs, g_top)
        if len(ys_t) != k:
            raise InvalidInputError(
                f"coupled boundary data has {len(ys_t)} paths, expected {k}"
            )
        if any(b > t for b, t in zip(ys, ys_t)):
            raise InvalidInputError(
                f"coupled exit data must dominate: {ys} vs {ys_t}"
            )
        if fl is not None:
            if fl_t is None or any(b > t for b, t in zip(fl, fl_t)):
                raise InvalidInputError("coupled floor must dominate the base floor")
        boundaries.append((ys_t, fl_t))

    states = [
        np.tile(np.asarray(by, dtype=np.int64)[:, None], (1, T + 1))
        for by, _ in boundaries
    ]
    rng = _rng(seed)
    for step, (i, t, zeta, u) in enumerate(_proposal_stream(rng, k, T, n_steps)):
        accept_bar = qs[i] if (t == 0 and zeta == -1) else 1.0
        for state, (_, floor) in zip(states, boundaries):
            if _glauber_admissible(state, i, t, zeta, T, floor):
                if accept_bar >= u:
                    state[i, t] += zeta
        if observer is not None:
            observer(step, *states)

    out = []
    for state, (by, floor) in zip(states, boundaries):
        paths = tuple(IncreasingPath(tuple(map(int, row))) for row in state)
        out.append(GeomLineEnsemble(paths, by, floor))
    return out[0] if coupled_with is None else (out[0], out[1])


# ---------------------------------------------------------------------------
# Metropolis chain for the boundary-weighted Schur measure
# ---------------------------------------------------------------------------


def _schur_move_ratio(lam, j, i, zeta, M, N, q, c, n_active):
    """Weight ratio for moving row i of column j by zeta.

    The chain weight is c to the alternating sum of the first column, times
    q to the weight increments along the sequence, times the number of
    column-strict tableaux of the last column in N letters. Interior
    columns cancel entirely; the first column trades a power of q for a
    power of c; the last column pays q twice and the dimension ratio.
    """
    if 0 < j < M:
        return 1.0
    if j == 0:
        sign = 1 if i % 2 == 0 else -1
        return c ** (zeta * sign) * q ** (-zeta)
    ell = np.zeros(N, dtype=np.int64)
    ell[:n_active] = lam[M, :n_active]
    ell += N - 1 - np.arange(N)
    ratio = q ** (2 * zeta)
    for i2 in range(N):
        if i2 != i:
            ratio *= (ell[i] + zeta - ell[i2]) / (ell[i] - ell[i2])
    return ratio


def sample_pfaffian_schur_glauber(
    N, M, q, c, k_max, depth_cutoff, n_steps, seed=None, *, observer=None
):
    """Metropolis chain on interlacing partition sequences of length M + 1.

    The target weight is the boundary factor c^(l1 - l2 + l3 - ...) of the
    first partition, times q to the total weight added along the sequence,
    times the principally specialized Schur polynomial of the last
    partition in N variables. Moves change a single part by +-1 and are
    rejected when they break interlacing.

    Only the top ``min(k_max, N)`` rows can move; rows beyond N are zero
    under the exact measure, and the chain is restricted to column weights
    at most ``depth_cutoff``, which truncates states of mass comparable to
    q to the cutoff.

    Returns the final state as a tuple of M + 1 partitions. ``observer``
    is called after every step as ``observer(step, lam)`` with the live
    (M + 1, k_max) array of parts; copy before storing.
    """
    N = _as_int(N, "N")
    M = _as_int(M, "M")
    k_max = _as_int(k_max, "k_max")
    depth_cutoff = _as_int(depth_cutoff, "depth_cutoff")
    n_steps = _as_int(n_steps, "n_steps")
    if N < 1 or M < 1:
        raise InvalidInputError(f"N and M must be >= 1, got N={N}, M={M}")
    if k_max < 1:
        raise InvalidInputError(f"k_max must be >= 1, got {k_max}")
    if depth_cutoff < 0:
        raise InvalidInputError(f"depth_cutoff must be >= 0, got {depth_cutoff}")
    if n_steps < 0:
        raise InvalidInputError(f"n_steps must be >= 0, got {n_steps}")
    if not (0.0 < q < 1.0):
        raise InvalidInputError(f"q must lie in (0, 1), got {q}")
    if not (q < c < 1.0 / q):
        raise InvalidInputError(f"c must lie in (q, 1/q) = ({q}, {1.0 / q}), got {c}")

    n_active = min(k_max, N)
    lam = np.zeros((M + 1, k_max), dtype=np.int64)
    rng = _rng(seed)
    done = 0
    step = 0
    while done < n_steps:
        m = min(PROPOSAL_CHUNK, n_steps - done)
        cols = rng.integers(0, M + 1, size=m)
        rows = rng.integers(0, k_max, size=m)
        zetas = 2 * rng.integers(0, 2, size=m) - 1
        us = rng.random(m)
        done += m
        for j, i, zeta, u in zip(cols, rows, zetas, us):
            if i < n_active:
                new = lam[j, i] + zeta
                ok = new >= 0 and lam[j].sum() + zeta <= depth_cutoff
                # column shape: parts stay weakly decreasing
                if ok and i > 0:
                    ok = new <= lam[j, i - 1]
                if ok and i + 1 < k_max:
                    ok = new >= lam[j, i + 1]
                # interlacing with the previous column
                if ok and j > 0:
                    ok = new >= lam[j - 1, i]
                    if ok and i > 0:
                        ok = new <= lam[j - 1, i - 1]
                # interlacing with the next column
                if ok and j < M:
                    ok = new <= lam[j + 1, i]
                    if ok:
                        below = lam[j + 1, i + 1] if i + 1 < k_max else 0
                        ok = new >= below
                if ok:
                    ratio = _schur_move_ratio(lam, j, i, zeta, M, N, q, c, n_active)
                    if ratio >= u:
                        lam[j, i] = new
            if observer is not None:
                observer(step, lam)
            step += 1
    return tuple(Partition(tuple(map(int, row))) for row in lam)


# ---------------------------------------------------------------------------
# Avoiding reverse Brownian motions
# ---------------------------------------------------------------------------


def _normalize_rbm_floor(g, grid):
    if g is None:
        return None
    if callable(g):
        vals = np.asarray([float(g(t)) for t in grid])
    elif np.isscalar(g):
        if np.isneginf(g):
            return None
        vals = np.full(grid.shape, float(g))
    else:
        vals = np.asarray(g, dtype=float)
        if vals.shape != grid.shape:
            raise InvalidInputError(
                f"floor needs one value per grid point, got {vals.shape}"
            )
    if not np.all(np.isfinite(vals)):
        raise InvalidInputError("floor values must be finite")
    return vals


def sample_avoiding_rbm(
    b,
    yvec,
    muvec,
    g=None,
    grid_size=DEFAULT_RBM_GRID,
    seed=None,
    max_attempts=DEFAULT_MAX_ATTEMPTS,
):
    """Strictly ordered reverse Brownian motions, by rejection on a grid.

    Each free curve is assembled as y + bridge(b - t) + X (b - t), with a
    standard Brownian bridge on [0, b] and X an independent normal with
    mean mu and variance 1 / b, so curve i has mean y_i + mu_i (b - t) and
    covariance min(b - s, b - t). Candidates are redrawn until the strict
    ordering curve_1 > ... > curve_k > floor holds at every grid point;
    the event is only checked on the grid, a discretization of the
    continuum avoidance event.
    """
    b = float(b)
    if not (b > 0.0) or not np.isfinite(b):
        raise InvalidInputError(f"b must be positive and finite, got {b}")
    ys = tuple(float(y) for y in yvec)
    mus = tuple(float(m) for m in muvec)
    if not ys:
        raise InvalidInputError("exit data must be nonempty")
    if len(mus) != len(ys):
        raise InvalidInputError(f"{len(ys)} curves need {len(ys)} drifts")
    if any(ys[i] <= ys[i + 1] for i in range(len(ys) - 1)):
        raise InvalidInputError(f"exit data must be strictly decreasing, got {ys}")
    grid_size = _as_int(grid_size, "grid_size")
    if grid_size < 2:
        raise InvalidInputError(f"grid_size must be >= 2, got {grid_size}")
    max_attempts = _as_int(max_attempts, "max_attempts")
    if max_attempts < 1:
        raise InvalidInputError(f"max_attempts must be >= 1, got {max_attempts}")
    grid = np.linspace(0.0, b, grid_size)
    floor = _normalize_rbm_floor(g, grid)
    if floor is not None and floor[-1] >= ys[-1]:
        raise InvalidInputError(
            f"floor at time b is {floor[-1]}, must lie below exit value {ys[-1]}"
        )
    k = len(ys)
    rng = _rng(seed)
    sqrt_dt = np.sqrt(np.diff(grid))
    back = (b - grid)[None, :]
    for attempt in range(1, max_attempts + 1):
        incs = rng.normal(0.0, 1.0, size=(k, grid_size - 1)) * sqrt_dt
        w = np.concatenate([np.zeros((k, 1)), np.cumsum(incs, axis=1)], axis=1)
        bridge = w - (grid / b)[None, :] * w[:, -1:]
        x = rng.normal(0.0, 1.0, size=(k, 1)) / np.sqrt(b) + np.asarray(mus)[:, None]
        curves = np.asarray(ys)[:, None] + bridge[:, ::-1] + x * back
        ordered = bool(np.all(curves[:-1] > curves[1:]))
        if ordered and floor is not None:
            ordered = bool(np.all(curves[-1] > floor))
        if ordered:
            return BrownianEnsembleSample(grid, curves, mus, ys, attempt)
    raise BudgetError(f"no avoiding sample in {max_attempts} attempts")


# ---------------------------------------------------------------------------
# Rescaling and empirical statistics
# ---------------------------------------------------------------------------


def _partition_rows(sample_entry, k):
    if isinstance(sample_entry, Partition):
        rows = list(sample_entry.parts)
    else:
        rows = [int(v) for v in sample_entry]
    if any(v != 0 for v in rows[k:]):
        raise InvalidInputError(
            f"sample has {len(rows)} nonzero rows, more than k_rows={k}"
        )
    return [rows[i] if i < len(rows) else 0 for i in range(k)]


def rescale_samples(samples, params, times, *, n, k_rows=None):
    """Edge-scaled point configurations from sampled partition sequences.

    For each requested time t, the column at index floor(t n^{2/3}) is
    mapped through x_i = (lam_i - 2qn/(1-q) - qT/(1-q) - i) / (sigma_q
    n^{1/3}), which lands exactly on the reference lattice of that time.
    Returns {t: array of shape (n_samples, k_rows)} with rows strictly
    decreasing in i.

    Pass ``k_rows`` explicitly when comparing window counts against exact
    predictions: trimmed zero rows still carry points at -i (before
    centering), and dropping them biases counts in windows that cover
    those positions. The default uses the longest row count seen.
    """
    sigma_q = params.sigma_q
    q = params.q
    if n <= 0 or not np.isfinite(n):
        raise InvalidInputError(f"n must be positive, got {n}")
    samples = list(samples)
    if not samples:
        raise InvalidInputError("no samples to rescale")
    n_cols = len(samples[0])
    if n_cols < 1 or any(len(s) != n_cols for s in samples):
        raise InvalidInputError("all samples must be sequences of equal length")
    if k_rows is None:
        k = 1
        for seq in samples:
            for entry in seq:
                k = max(k, len(entry))
    else:
        k = _as_int(k_rows, "k_rows")
        if k < 1:
            raise InvalidInputError(f"k_rows must be >= 1, got {k}")
    spacing = 1.0 / (sigma_q * float(n) ** (1.0 / 3.0))
    out = {}
    for t in times:
        t = float(t)
        if t < 0:
            raise InvalidInputError(f"times must be >= 0, got {t}")
        col = int(np.floor(t * float(n) ** (2.0 / 3.0)))
        if col >= n_cols:
            raise InvalidInputError(
                f"time {t} needs column {col}, but samples have {n_cols} columns"
            )
        shift = (2.0 * q * n + q * col) / (1.0 - q)
        vals = np.empty((len(samples), k))
        for s, seq in enumerate(samples):
            rows = _partition_rows(seq[col], k)
            for i0, lam_i in enumerate(rows):
                vals[s, i0] = spacing * (lam_i - shift - (i0 + 1))
        # lattice membership: (x - offset) / spacing must be integral
        offset = -spacing * shift
        resid = (vals - offset) / spacing
        if np.max(np.abs(resid - np.round(resid))) > 1e-9:
            raise InconsistencyError("rescaled values left the reference lattice")
        out[t] = vals
    return out


@dataclass(frozen=True)
class WindowMoments:
    """Per-window counts and factorial moments with standard errors."""

    windows: tuple[tuple[float, float], ...]
    n_samples: int
    mean: np.ndarray = field(repr=False)
    mean_se: np.ndarray = field(repr=False)
    fact2: np.ndarray = field(repr=False)
    fact2_se: np.ndarray = field(repr=False)


def empirical_onepoint(configs, windows) -> WindowMoments:
    """Window counts, their means, and factorial moments up to order two.

    ``configs`` is a sequence of point configurations (one array of
    positions per sample); windows are half-open intervals (lo, hi].
    Standard errors are i.i.d. estimates across samples; thin correlated
    chains before calling this.
    """
    rows = [np.asarray(cfg, dtype=float).ravel() for cfg in configs]
    if len(rows) < 100:
        raise InvalidInputError(f"need at least 100 samples, got {len(rows)}")
    wins = []
    for lo, hi in windows:
        lo, hi = float(lo), float(hi)
        if not (hi > lo):
            raise InvalidInputError(f"empty window ({lo}, {hi}]")
        wins.append((lo, hi))
    if not wins:
        raise InvalidInputError("at least one window required")
    n = len(rows)
    counts = np.empty((n, len(wins)))
    for s, pts in enumerate(rows):
        for w, (lo, hi) in enumerate(wins):
            counts[s, w] = np.count_nonzero((pts > lo) & (pts <= hi))
    fact2 = counts * (counts - 1.0)
    return WindowMoments(
        windows=tuple(wins),
        n_samples=n,
        mean=counts.mean(axis=0),
        mean_se=counts.std(axis=0, ddof=1) / np.sqrt(n),
        fact2=fact2.mean(axis=0),
        fact2_se=fact2.std(axis=0, ddof=1) / np.sqrt(n),
    )

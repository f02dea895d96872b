"""
Time Grids and Trajectories

A Trajectory holds the matrix representation F(t) on a time grid together
with the derived quantities the witnesses monitor: eigenvalue branches,
body semi-axes, volume factor and f(t).
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from src.exceptions import DimensionError, NonInvertibleFrameError
from src.linalg.superop import FMatrix, MapFlags, SuperOperator, classify, spectrum

logger = logging.getLogger(__name__)

DEGENERATE_GAP = 1e-8
MAX_REFINEMENT_DEPTH = 12
SINGULAR_FLOOR = 1e-12


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing times starting at 0"""
    points: np.ndarray

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        if points.ndim != 1 or points.size < 3:
            raise DimensionError(f"time grid needs at least 3 points, got {points.size}")
        if points[0] != 0.0:
            raise DimensionError(f"time grid must start at t = 0, got {points[0]:.6g}")
        if np.any(np.diff(points) <= 0.0):
            raise DimensionError("time grid must be strictly increasing")
        points.flags.writeable = False
        object.__setattr__(self, "points", points)

    @classmethod
    def uniform(cls, t_max: float = 5.0, points: int = 501) -> "TimeGrid":
        if t_max <= 0.0:
            raise DimensionError(f"t_max must be positive, got {t_max}")
        return cls(np.linspace(0.0, float(t_max), int(points)))

    def __len__(self) -> int:
        return self.points.size

    @property
    def t_max(self) -> float:
        return float(self.points[-1])

    @property
    def spacing(self) -> float:
        """Smallest step"""
        return float(np.diff(self.points).min())

    def index_of(self, t: float) -> int:
        """Index of a grid time (tolerates round-off in t)"""
        idx = int(np.argmin(np.abs(self.points - t)))
        if abs(self.points[idx] - t) > 1e-9 * max(1.0, abs(t)):
            raise ValueError(f"t = {t:.6g} is not a grid point")
        return idx


@dataclass(frozen=True)
class Trajectory:
    """
    Dynamical map sampled on a grid.

    Attributes:
        frames: (n, d^2, d^2) matrix representations F(t_i)
        eigenvalues: (n, d^2) eigenvalue branches, branch 0 the stationary one
        semi_axes: (n, d^2 - 1) singular values of Delta_t, descending
        vol: |Det Delta_t|
        f: d^-2 Re Tr F(t)
        q: (n, d^2 - 1) translation vectors
        flags: classification flags holding at every sampled frame
        commutative: frames verified to commute pairwise
    """
    grid: TimeGrid
    dim: int
    family: str
    route: str
    frames: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)
    semi_axes: np.ndarray = field(repr=False)
    vol: np.ndarray = field(repr=False)
    f: np.ndarray = field(repr=False)
    q: np.ndarray = field(repr=False)
    flags: MapFlags
    commutative: bool
    analytic_eigenvalues: bool = False

    @property
    def times(self) -> np.ndarray:
        return self.grid.points

    @property
    def q_norm(self) -> np.ndarray:
        return np.linalg.norm(self.q, axis=1)

    def frame(self, index: int) -> FMatrix:
        return FMatrix(self.dim, self.frames[index])

    def superop(self, index: int) -> SuperOperator:
        return self.frame(index).to_superop()

    def eigen_moduli(self) -> np.ndarray:
        return np.abs(self.eigenvalues)

    def has_real_spectrum(self, tol: float = 1e-9) -> bool:
        return bool(np.max(np.abs(self.eigenvalues.imag)) <= tol)


def _min_gap(values: np.ndarray) -> Optional[float]:
    """Smallest separation between non-degenerate eigenvalues"""
    diff = np.abs(values[:, None] - values[None, :])
    diff = diff[np.triu_indices(values.size, k=1)]
    diff = diff[diff > DEGENERATE_GAP]
    return float(diff.min()) if diff.size else None


def _assign(previous: np.ndarray, current: np.ndarray) -> np.ndarray:
    cost = np.abs(previous[:, None] - current[None, :])
    _, cols = linear_sum_assignment(cost)
    return current[cols]


def match_eigenvalue_paths(
    times: np.ndarray,
    eigenvalues_at: Callable[[float], np.ndarray],
    max_depth: int = MAX_REFINEMENT_DEPTH,
) -> np.ndarray:
    """
    Follow eigenvalue branches across a grid by optimal nearest-neighbour
    assignment. A step whose largest motion exceeds half the smallest
    non-degenerate gap is bisected until it does not (or max_depth is hit).

    Args:
        times: Grid times
        eigenvalues_at: t -> eigenvalues, the first one pinned to the stationary branch

    Returns:
        (n, m) array of matched branches
    """
    paths = [np.asarray(eigenvalues_at(times[0]))]
    warned = False

    def step(t_a: float, t_b: float, previous: np.ndarray, depth: int) -> np.ndarray:
        nonlocal warned
        current = np.asarray(eigenvalues_at(t_b))
        rest = _assign(previous[1:], current[1:])
        matched = np.concatenate([current[:1], rest])
        motion = float(np.max(np.abs(matched - previous)))
        gap = _min_gap(previous)
        if gap is not None and motion > 0.5 * gap:
            if depth >= max_depth:
                if not warned:
                    logger.warning("Eigenvalue matching hit refinement depth %d near t=%.6g", max_depth, t_b)
                    warned = True
                return matched
            mid = 0.5 * (t_a + t_b)
            half = step(t_a, mid, previous, depth + 1)
            return step(mid, t_b, half, depth + 1)
        return matched

    for t_a, t_b in zip(times[:-1], times[1:]):
        paths.append(step(float(t_a), float(t_b), paths[-1], 0))
    return np.array(paths)


def _flags_from(frames: np.ndarray, dim: int, samples: int = 11) -> MapFlags:
    picks = np.unique(np.linspace(0, len(frames) - 1, samples).astype(int))
    flags = None
    for i in picks:
        current = classify(FMatrix(dim, frames[i]).to_superop())
        flags = current if flags is None else flags & current
    return flags


def assemble_trajectory(
    grid: TimeGrid,
    dim: int,
    family: str,
    route: str,
    frames: np.ndarray,
    commutative: bool,
    frame_at: Callable[[float], FMatrix],
    analytic_eigenvalues: Optional[Callable[[float], np.ndarray]] = None,
) -> Trajectory:
    """
    Derive every per-time scalar from the frames.

    Eigenvalue branches come from analytic_eigenvalues when given, else from
    matching numerical spectra of frame_at (which may be called between grid
    points during refinement).
    """
    frames = np.asarray(frames)
    if np.max(np.abs(frames.imag)) <= 1e-12 * max(1.0, np.abs(frames).max()):
        frames = frames.real.copy()
    times = grid.points
    d2 = dim * dim

    if analytic_eigenvalues is not None:
        eigenvalues = np.array([analytic_eigenvalues(float(t)) for t in times], dtype=complex)
    else:
        eigenvalues = match_eigenvalue_paths(times, lambda t: spectrum(frame_at(t)).eigenvalues)

    delta = frames[:, 1:, 1:]
    semi_axes = np.linalg.svd(delta, compute_uv=False)
    vol = np.abs(np.linalg.det(delta))
    f = np.real(np.trace(frames, axis1=1, axis2=2)) / d2
    q = np.real(frames[:, 1:, 0])

    traj = Trajectory(
        grid=grid,
        dim=dim,
        family=family,
        route=route,
        frames=frames,
        eigenvalues=eigenvalues,
        semi_axes=semi_axes,
        vol=vol,
        f=f,
        q=q,
        flags=_flags_from(frames, dim),
        commutative=commutative,
        analytic_eigenvalues=analytic_eigenvalues is not None,
    )
    logger.info("Assembled %s trajectory (%s route, %d points)", family, route, len(grid))
    return traj


def divisor(traj: Trajectory, t: float, s: float) -> SuperOperator:
    """
    Intermediate map V_{t,s} = Lambda_t Lambda_s^-1.

    Raises:
        NonInvertibleFrameError: if |Det F(s)| < 1e-12
    """
    if t < s:
        raise ValueError(f"divisor needs t >= s, got t = {t:.6g} < s = {s:.6g}")
    i, j = traj.grid.index_of(t), traj.grid.index_of(s)
    f_t = traj.frames[i].astype(complex)
    f_s = traj.frames[j].astype(complex)
    if abs(np.linalg.det(f_s)) < SINGULAR_FLOOR:
        raise NonInvertibleFrameError("frame is not invertible", time=float(traj.times[j]))
    between = np.linalg.solve(f_s.T, f_t.T).T
    return FMatrix(traj.dim, between).to_superop()

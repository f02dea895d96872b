"""Propagation of generators and map families into trajectories"""

from src.dynamics.propagation import (
    propagate_commutative,
    propagate_ode,
    trajectory_from_maps,
    verify_commutative,
)
from src.dynamics.trajectory import TimeGrid, Trajectory, divisor, match_eigenvalue_paths

__all__ = [
    'propagate_commutative',
    'propagate_ode',
    'trajectory_from_maps',
    'verify_commutative',
    'TimeGrid',
    'Trajectory',
    'divisor',
    'match_eigenvalue_paths',
]

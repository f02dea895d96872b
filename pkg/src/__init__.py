"""
Non-Markovianity Witnesses

Divisibility witnesses for time-local quantum dynamical maps: operator
bases, superoperator geometry, generator families, propagation and a batch
front-end.
"""

from src.dynamics import TimeGrid, Trajectory, propagate_commutative, propagate_ode, trajectory_from_maps
from src.linalg import FMatrix, SuperOperator, matrix_rep
from src.witness import WitnessReport, aggregate

__version__ = "0.1.0"

__all__ = [
    'TimeGrid',
    'Trajectory',
    'propagate_commutative',
    'propagate_ode',
    'trajectory_from_maps',
    'FMatrix',
    'SuperOperator',
    'matrix_rep',
    'WitnessReport',
    'aggregate',
]

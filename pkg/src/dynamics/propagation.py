"""
Propagation

Three ways to turn a model into a Trajectory: the exponential formula for
commutative generators, time-ordered integration of dF/dt = L_t F for any
generator, and direct sampling of a given map family.
"""

import logging
from dataclasses import replace
from typing import Optional

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp

from src.exceptions import NonCommutativeGeneratorError, SingularGeneratorError, StepSizeError
from src.dynamics.trajectory import TimeGrid, Trajectory, assemble_trajectory
from src.linalg.superop import FMatrix, SuperOperator, commute_check, matrix_rep
from src.models.generators import MapFamily, TimeLocalGenerator

logger = logging.getLogger(__name__)

COMMUTATOR_TOL = 1e-10
COMMUTATOR_PAIRS = 20
ODE_RTOL = 1e-10
ODE_ATOL = 1e-12


def verify_commutative(
    gen: TimeLocalGenerator,
    t_max: float,
    pairs: int = COMMUTATOR_PAIRS,
    seed: int = 0,
) -> float:
    """
    Sample [L_t, L_s] at random time pairs.

    Returns:
        Largest relative commutator residual found

    Raises:
        NonCommutativeGeneratorError: if a residual exceeds 1e-10 * max(1, |L_t||L_s|)
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    checked = 0
    for t, s in rng.uniform(0.0, t_max, size=(pairs, 2)):
        try:
            l_t, l_s = gen.evaluate(t), gen.evaluate(s)
        except SingularGeneratorError:
            continue
        scale = max(1.0, np.linalg.norm(l_t.matrix) * np.linalg.norm(l_s.matrix))
        residual = commute_check(l_t, l_s)
        worst = max(worst, residual / scale)
        checked += 1
        if residual > COMMUTATOR_TOL * scale:
            raise NonCommutativeGeneratorError(
                f"generator '{gen.family}' fails commutativity: |[L_t, L_s]| = {residual:.3g} at s = {s:.6g}",
                time=float(t),
            )
    logger.debug("Commutativity verified on %d pairs (worst relative residual %.2e)", checked, worst)
    return worst


def _exponential_frame(gen: TimeLocalGenerator, t: float) -> FMatrix:
    if gen.analytic_spectrum is not None:
        spec = gen.analytic_spectrum
        matrix = spec.superop(spec.eigenvalues(t))
    else:
        matrix = scipy.linalg.expm(gen.integrated(t).matrix)
    return matrix_rep(SuperOperator(gen.dim, matrix))


def propagate_commutative(
    gen: TimeLocalGenerator,
    grid: TimeGrid,
    use_analytic: bool = True,
) -> Trajectory:
    """
    Lambda_t = exp(int_0^t L_u du) for a commutative generator.

    With an analytic spectrum the frames are R diag(exp(int mu)) R^-1 and the
    eigenvalue branches are exact; otherwise the integrated generator is
    exponentiated and branches are matched numerically.

    Raises:
        NonCommutativeGeneratorError: if the generator is not declared
            commutative or fails the sampled re-verification
    """
    if not gen.commutative:
        raise NonCommutativeGeneratorError(f"generator '{gen.family}' is not declared commutative")
    verify_commutative(gen, grid.t_max)

    if not use_analytic and gen.analytic_spectrum is not None:
        gen = replace(gen, analytic_spectrum=None)

    frames = np.array([_exponential_frame(gen, float(t)).entries for t in grid.points])
    analytic = gen.analytic_spectrum.eigenvalues if gen.analytic_spectrum is not None else None
    route = "commutative-analytic" if analytic is not None else "commutative-expm"
    return assemble_trajectory(
        grid, gen.dim, gen.family, route, frames,
        commutative=True,
        frame_at=lambda t: _exponential_frame(gen, t),
        analytic_eigenvalues=analytic,
    )


def propagate_ode(gen: TimeLocalGenerator, grid: TimeGrid) -> Trajectory:
    """
    Integrate dF/dt = L_t F, F(0) = I with DOP853 (rtol 1e-10, atol 1e-12).

    Raises:
        StepSizeError: if the integrator cannot continue, with the failing time
        SingularGeneratorError: if L_t is undefined inside the grid
    """
    d2 = gen.dim * gen.dim

    def rhs(t, y):
        return (gen.evaluate(t).matrix @ y.reshape(d2, d2)).reshape(-1)

    sol = solve_ivp(
        rhs,
        (0.0, grid.t_max),
        np.eye(d2, dtype=complex).reshape(-1),
        method="DOP853",
        t_eval=grid.points,
        rtol=ODE_RTOL,
        atol=ODE_ATOL,
        dense_output=True,
    )
    if sol.status == -1:
        raise StepSizeError(f"ODE integration failed: {sol.message}", time=float(sol.t[-1]))
    logger.debug("ODE route for %s: %d rhs evaluations", gen.family, sol.nfev)

    def frame_at(t: float) -> FMatrix:
        return matrix_rep(SuperOperator(gen.dim, sol.sol(t).reshape(d2, d2)))

    frames = np.array([
        matrix_rep(SuperOperator(gen.dim, y.reshape(d2, d2))).entries for y in sol.y.T
    ])
    commutative = False
    if gen.commutative:
        try:
            verify_commutative(gen, grid.t_max)
            commutative = True
        except NonCommutativeGeneratorError as e:
            logger.warning("Declared commutativity rejected: %s", e)
    return assemble_trajectory(grid, gen.dim, gen.family, "ode", frames, commutative, frame_at)


def _maps_commute(maps: MapFamily, t_max: float, pairs: int = COMMUTATOR_PAIRS, seed: int = 0) -> bool:
    rng = np.random.default_rng(seed)
    for t, s in rng.uniform(0.0, t_max, size=(pairs, 2)):
        a, b = maps.at(t), maps.at(s)
        scale = max(1.0, np.linalg.norm(a.matrix) * np.linalg.norm(b.matrix))
        if commute_check(a, b) > COMMUTATOR_TOL * scale:
            return False
    return True


def trajectory_from_maps(
    maps: MapFamily,
    grid: TimeGrid,
    generator: Optional[TimeLocalGenerator] = None,
) -> Trajectory:
    """Sample Lambda_t directly; the generator, if any, only labels the result"""
    family = generator.family if generator is not None else maps.family

    def frame_at(t: float) -> FMatrix:
        return matrix_rep(maps.at(t))

    frames = np.array([frame_at(float(t)).entries for t in grid.points])
    return assemble_trajectory(
        grid, maps.dim, family, "maps", frames,
        commutative=_maps_commute(maps, grid.t_max),
        frame_at=frame_at,
        analytic_eigenvalues=maps.eigenvalues_fn,
    )

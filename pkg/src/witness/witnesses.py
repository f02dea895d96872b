"""
Non-Markovianity Witnesses

Each witness monitors one quantity along a Trajectory (or along the
generator on the grid) and returns a WitnessRecord. Sampled witnesses only
ever find violations; a clean run is reported as such, never as a proof.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from src.exceptions import DimensionError, SingularGeneratorError
from src.dynamics.trajectory import TimeGrid, Trajectory
from src.linalg import sampling
from src.linalg.bases import gell_mann_basis
from src.linalg.superop import ccp_test, hs_norm, trace_norm, witness_f
from src.models.generators import TimeLocalGenerator
from src.witness.report import (
    WitnessRecord,
    inapplicable,
    monotone_record,
    pointwise_record,
    record_from_margins,
)

logger = logging.getLogger(__name__)

DERIV_TOL = 1e-9
POSITIVITY_TOL = 1e-9
STRUCTURE_TOL = 1e-9


@dataclass(frozen=True)
class BodyDescriptor:
    """Accessible-state body Lambda_t[B]: centre q_t, block Delta_t and its semi-axes"""
    center: np.ndarray
    delta: np.ndarray = field(repr=False)
    semi_axes: np.ndarray = field(repr=False)
    axes: Optional[np.ndarray] = field(default=None, repr=False)


def body_descriptor(traj: Trajectory, index: int) -> BodyDescriptor:
    """Body at grid index; Hermitian maps also get their (shared) eigen-axes"""
    frame = traj.frame(index)
    delta = np.asarray(frame.delta)
    axes = None
    if traj.flags.hermitian:
        _, axes = np.linalg.eigh(0.5 * (delta + delta.conj().T))
    return BodyDescriptor(center=np.asarray(frame.q), delta=delta, semi_axes=traj.semi_axes[index], axes=axes)


def _over_grid(times: np.ndarray, fn: Callable[[float], np.ndarray], width: int) -> np.ndarray:
    """fn at every grid time, NaN rows where the generator is singular"""
    out = np.full((times.size, width), np.nan)
    for i, t in enumerate(times):
        try:
            out[i] = fn(float(t))
        except SingularGeneratorError as e:
            logger.debug("Generator undefined at t=%.6g: %s", t, e)
    return out


def _first_positive(times: np.ndarray, values: np.ndarray, tol: float) -> Optional[float]:
    with np.errstate(invalid="ignore"):
        hits = np.flatnonzero(values > tol)
    return float(times[hits[0]]) if hits.size else None


def w_volume(
    traj: Trajectory,
    generator: Optional[TimeLocalGenerator] = None,
    tol: float = DERIV_TOL,
) -> WitnessRecord:
    """
    Vol(t) = |Det Delta_t| must not increase.

    For commutative generators d/dt Vol = Vol * Re Tr L_t, so Tr L_t <= 0 is
    checked as well and reported under details.
    """
    details = {}
    if generator is not None and traj.commutative:
        trace = _over_grid(traj.times, lambda t: np.real(generator.evaluate(t).trace()), 1)[:, 0]
        scale = max(1.0, float(np.nanmax(np.abs(trace)))) if np.isfinite(trace).any() else 1.0
        first = _first_positive(traj.times, trace, tol * scale)
        details["generator_trace"] = {
            "violated": first is not None,
            "first_violation_time": first,
        }
    return monotone_record("volume", traj.times, traj.vol, tol, series_label="Vol(t)", details=details)


def w_eigen_moduli(
    traj: Trajectory,
    generator: Optional[TimeLocalGenerator] = None,
    tol: float = DERIV_TOL,
) -> WitnessRecord:
    """Every branch |lambda_a(t)| must not increase (commutative dynamics only)"""
    if not traj.commutative:
        return inapplicable("eigen_moduli", "trajectory is not commutative")

    details = {"branches": int(traj.eigenvalues.shape[1]),
               "branch_source": "analytic" if traj.analytic_eigenvalues else "matched"}
    if generator is not None and generator.analytic_spectrum is not None:
        width = traj.eigenvalues.shape[1]
        re_mu = _over_grid(traj.times, lambda t: np.real(generator.analytic_spectrum.rates(t)), width)
        worst = np.nanmax(re_mu, axis=1) if np.isfinite(re_mu).any() else np.full(traj.times.size, np.nan)
        first = _first_positive(traj.times, worst, tol)
        details["analytic_rates"] = {"violated": first is not None, "first_violation_time": first}

    return monotone_record(
        "eigen_moduli", traj.times, traj.eigen_moduli(), tol,
        series_label="largest branch increment since previous grid point", details=details,
    )


def w_f_monotone(traj: Trajectory, tol: float = DERIV_TOL, structure_tol: float = STRUCTURE_TOL) -> WitnessRecord:
    """f(t) = d^-2 Tr F(t) must not increase (commutative, real spectrum)"""
    if not traj.commutative:
        return inapplicable("f_monotone", "trajectory is not commutative")
    if not traj.has_real_spectrum(structure_tol):
        return inapplicable("f_monotone", "eigenvalues are not real")
    return monotone_record("f_monotone", traj.times, traj.f, tol, series_label="f(t)")


def w_ew_functional(generator: TimeLocalGenerator, grid: TimeGrid, tol: float = DERIV_TOL) -> WitnessRecord:
    """<alpha|(id (x) L_t)[P+]|alpha> must stay <= 0"""
    values = _over_grid(grid.points, lambda t: witness_f(generator.evaluate(t)), 1)[:, 0]
    return pointwise_record("ew_functional", grid.points, values, tol,
                            series_label="<alpha|(id x L_t)[P+]|alpha>")


def _blp_samples(d: int, k: int, samples: int, rng: np.random.Generator) -> np.ndarray:
    """
    Hermitian operators on C^k (x) C^d with unit trace norm.

    First half: differences of random mixed states (k = 1) or Ginibre
    Hermitian matrices (k >= 2). Second half: pure-state differences,
    weighted p, 1-p for k >= 2.
    """
    n = k * d
    first = samples // 2
    second = samples - first

    if k == 1:
        a = sampling.random_density_matrices(n, first, rng) - sampling.random_density_matrices(n, first, rng)
    else:
        a = sampling.random_hermitian(n, first, rng)

    psi = sampling.random_pure_states(n, second, rng)
    phi = sampling.random_pure_states(n, second, rng)
    weight = np.full(second, 0.5) if k == 1 else rng.uniform(0.0, 1.0, size=second)
    b = (weight[:, None, None] * np.einsum("ni,nj->nij", psi, psi.conj())
         - (1.0 - weight)[:, None, None] * np.einsum("ni,nj->nij", phi, phi.conj()))

    x = np.concatenate([a, b]) if samples else np.zeros((0, n, n), dtype=complex)
    norms = trace_norm(x)
    return x / np.where(norms > 0, norms, 1.0)[:, None, None]


def w_blp(
    traj: Trajectory,
    k: int = 1,
    samples: int = 200,
    seed: int = 0,
    probes: Optional[Sequence[np.ndarray]] = None,
    tol: float = DERIV_TOL,
) -> WitnessRecord:
    """
    Trace-norm contraction |(id_k (x) Lambda_t)[X]|_1 over sampled Hermitian X.

    k = 1 is the trace-distance (P-divisibility) test, k = d the
    CP-divisibility one. Optional probes are appended to the samples.

    Raises:
        DimensionError: if k < 1 or k > d
    """
    d = traj.dim
    if k < 1 or k > d:
        raise DimensionError(f"positivity order k must satisfy 1 <= k <= d = {d}, got {k}")

    rng = np.random.default_rng(seed)
    x = _blp_samples(d, k, samples, rng)
    if probes:
        x = np.concatenate([x, np.asarray(probes, dtype=complex).reshape(-1, k * d, k * d)])
    if x.shape[0] == 0:
        return inapplicable("blp", "no samples or probes requested")

    norms = np.empty((traj.times.size, x.shape[0]))
    for i in range(traj.times.size):
        norms[i] = trace_norm(traj.superop(i).apply_extended(x, k))

    record = monotone_record(
        "blp", traj.times, norms, tol,
        series_label="largest trace-norm increment since previous grid point",
        details={"order": k, "samples": samples, "probes": 0 if not probes else len(probes), "seed": seed},
    )
    increments = np.diff(norms, axis=0)
    scale = max(1.0, float(np.max(np.abs(norms)))) if norms.size else 1.0
    hits = int(np.sum(np.any(increments > tol * scale, axis=0))) if norms.size else 0
    total = x.shape[0]
    if hits:
        record.details["note"] = f"violation found in {hits} of {total} samples"
    else:
        record.details["note"] = f"no violation found in {total} samples"
    return record


def w_hs_norm(traj: Trajectory, samples: int = 100, seed: int = 0, tol: float = DERIV_TOL) -> WitnessRecord:
    """
    |Lambda_t[X]|_2 over random normal X, together with |Delta_t x| over
    random Bloch directions; unital trajectories only.
    """
    if not traj.flags.unital:
        return inapplicable("hs_norm", "trajectory is not unital")
    if samples == 0:
        return inapplicable("hs_norm", "no samples requested")

    d = traj.dim
    rng = np.random.default_rng(seed)
    x_ops = sampling.random_normal_operators(d, samples, rng)
    bloch = sampling.random_unit_vectors(d * d - 1, samples, rng)

    basis = gell_mann_basis(d)
    coeffs = np.array([basis.coefficients(x) for x in x_ops]).reshape(samples, d * d)
    x0 = coeffs[:, 0] / np.sqrt(d)
    xv = coeffs[:, 1:]

    op_norms = np.empty((traj.times.size, samples))
    bloch_norms = np.empty((traj.times.size, samples))
    residual = 0.0
    for i in range(traj.times.size):
        delta = traj.frames[i, 1:, 1:]
        op_norms[i] = hs_norm(traj.superop(i).apply(x_ops))
        bloch_norms[i] = np.linalg.norm(bloch @ delta.T, axis=1)
        identity = np.abs(x0) ** 2 * d + np.linalg.norm(xv @ delta.T, axis=1) ** 2
        residual = max(residual, float(np.max(np.abs(op_norms[i] ** 2 - identity))))

    return monotone_record(
        "hs_norm", traj.times, np.hstack([op_norms, bloch_norms]), tol,
        series_label="largest norm increment since previous grid point",
        details={"samples": samples, "seed": seed, "bloch_identity_residual": residual},
    )


def w_body_containment(traj: Trajectory, tol: float = DERIV_TOL) -> WitnessRecord:
    """
    B(t) inside B(s) for all grid s < t.

    Hermitian maps: branchwise |lambda_a(t)| <= |lambda_a(s)| on the shared
    eigen-axes. Normal maps: sorted singular values of Delta dominate, i.e.
    containment up to a rotation.
    """
    if not traj.commutative:
        return inapplicable("body_containment", "trajectory is not commutative")
    if traj.flags.hermitian:
        values = np.abs(traj.eigenvalues[:, 1:])
        mode = "hermitian, shared axes"
    elif traj.flags.normal:
        values = traj.semi_axes
        mode = "normal, up to rotation"
    else:
        return inapplicable("body_containment", "trajectory is neither Hermitian nor normal")

    scale = max(1.0, float(np.max(values)))
    running_min = np.minimum.accumulate(values, axis=0)
    excess = np.max(values[1:] - running_min[:-1], axis=1) - tol * scale
    times = traj.times
    series = np.concatenate([[0.0], np.max(values[1:] - running_min[:-1], axis=1)])
    return record_from_margins(
        "body_containment", times[1:], times[1:], excess,
        series=series, series_label="largest semi-axis excess over earlier bodies",
        details={"mode": mode},
    )


def w_cp_divisibility(
    generator: Optional[TimeLocalGenerator],
    grid: TimeGrid,
    tol: float = POSITIVITY_TOL,
) -> WitnessRecord:
    """
    Conditional complete positivity of L_t at every grid time, plus the
    closed-form rate conditions of the built-in families reported alongside.
    """
    if generator is None:
        return inapplicable("cp_divisibility", "no time-local generator available")

    times = grid.points
    neg_min_eig = _over_grid(times, lambda t: -ccp_test(generator.evaluate(t), tol).min_eig, 1)[:, 0]
    if not np.isfinite(neg_min_eig).any():
        return inapplicable("cp_divisibility", "generator undefined on the whole grid")

    details = {}
    if generator.conditions(float(times[0])) is not None:
        for group in ("cp", "p"):
            def worst(t, group=group):
                values = getattr(generator.conditions(t), group)
                return -float(np.min(values)) if len(values) else 0.0

            margins = _over_grid(times, worst, 1)[:, 0]
            labels = getattr(generator.conditions(float(times[0])), f"{group}_labels")
            first = _first_positive(times, margins, tol)
            details[f"{group}_rate_conditions"] = {
                "violated": first is not None,
                "first_violation_time": first,
                "conditions": list(labels),
            }

    return pointwise_record("cp_divisibility", times, neg_min_eig, tol,
                            series_label="-min eig of projected Choi block", details=details)

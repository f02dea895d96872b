"""
Microscopic Models

System-environment models whose reduced dynamics feed the generator layer:
the Lorentzian bath behind amplitude damping, and pure decoherence from a
Hamiltonian that is block diagonal in the system eigenbasis.
"""

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from src.exceptions import DimensionError, NonHermitianInputError, RateDomainError, StepSizeError
from src.models.generators import MapFamily
from src.linalg.superop import SuperOperator

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class LorentzianBath:
    """
    Lorentzian spectral density J(w) = gamma_m width^2 / (2 pi [(w - omega_c)^2 + width^2]).

    detuning is the offset between the system transition and omega_c.
    """
    gamma_m: float
    width: float
    omega_c: float = 0.0
    detuning: float = 0.0

    def __post_init__(self):
        if self.width <= 0.0:
            raise ValueError(f"Lorentzian width must be positive, got {self.width}")
        if self.gamma_m < 0.0:
            raise ValueError(f"coupling gamma_m must be non-negative, got {self.gamma_m}")

    def spectral_density(self, omega: np.ndarray) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        return self.gamma_m * self.width ** 2 / (2 * np.pi * ((omega - self.omega_c) ** 2 + self.width ** 2))

    def kernel(self, tau: np.ndarray) -> np.ndarray:
        """Memory kernel k(tau) = gamma_m width / 2 * exp(-(width - i detuning) tau)"""
        tau = np.asarray(tau, dtype=float)
        return 0.5 * self.gamma_m * self.width * np.exp(-(self.width - 1j * self.detuning) * tau)

    @property
    def strong_coupling(self) -> bool:
        return 2.0 * self.gamma_m > self.width


@dataclass(frozen=True)
class LorentzianG:
    """Solution G(t) on [0, t_max]; also exposes G'(t)"""
    bath: LorentzianBath
    t_max: float
    _solution: object = field(repr=False)

    def _check(self, t: float) -> None:
        if t < 0.0 or t > self.t_max * (1 + 1e-12):
            raise RateDomainError(f"G(t) requested at t = {t:.6g}, outside [0, {self.t_max}]")

    def __call__(self, t: float) -> complex:
        self._check(t)
        return complex(self._solution(min(float(t), self.t_max))[0])

    def derivative(self, t: float) -> complex:
        self._check(t)
        return complex(-self._solution(min(float(t), self.t_max))[1])


def lorentzian_G(bath: LorentzianBath, t_max: float) -> LorentzianG:
    """
    Integrate G'(t) = -int_0^t k(t - tau) G(tau) dtau for the Lorentzian kernel.

    With h(t) = int_0^t k(t - tau) G(tau) dtau the memory integral becomes the
    initial-value problem G' = -h, h' = k(0) G - (width - i detuning) h,
    G(0) = 1, h(0) = 0, solved by DOP853 with dense output.

    Args:
        bath: Bath parameters
        t_max: End of the domain on which G is needed

    Returns:
        Callable G(t) with a derivative() method
    """
    k0 = 0.5 * bath.gamma_m * bath.width
    decay = bath.width - 1j * bath.detuning

    def rhs(t, y):
        return np.array([-y[1], k0 * y[0] - decay * y[1]])

    sol = solve_ivp(
        rhs,
        (0.0, float(t_max)),
        np.array([1.0 + 0.0j, 0.0j]),
        method="DOP853",
        rtol=1e-12,
        atol=1e-14,
        dense_output=True,
    )
    if sol.status == -1:
        raise StepSizeError(f"Lorentzian memory integration failed: {sol.message}", time=float(sol.t[-1]))
    logger.debug("Lorentzian G integrated on [0, %.3g] with %d steps", t_max, sol.t.size)
    return LorentzianG(bath=bath, t_max=float(t_max), _solution=sol.sol)


def resonant_G(bath: LorentzianBath, t: np.ndarray) -> np.ndarray:
    """
    Closed form for zero detuning:
    G = exp(-width t / 2) [cosh(D t / 2) + width / D sinh(D t / 2)], D = sqrt(width^2 - 2 gamma_m width).
    """
    t = np.asarray(t, dtype=float)
    lam = bath.width
    disc = np.sqrt(complex(lam * lam - 2.0 * bath.gamma_m * lam))
    if abs(disc) < 1e-12:
        return np.exp(-lam * t / 2) * (1.0 + lam * t / 2)
    value = np.exp(-lam * t / 2) * (np.cosh(disc * t / 2) + lam / disc * np.sinh(disc * t / 2))
    return value.real


@dataclass(frozen=True)
class DecoherenceModel:
    """
    H = sum_k |k><k| (x) Z_k with Z_k = eps_k I + H_B + B_k.

    Attributes:
        eps: System energies eps_k (length d)
        h_b: Environment Hamiltonian (d_B x d_B, Hermitian)
        b_ops: Coupling operators B_k (d of them, Hermitian)
        rho_b: Environment state (density matrix)
    """
    eps: np.ndarray
    h_b: np.ndarray = field(repr=False)
    b_ops: np.ndarray = field(repr=False)
    rho_b: np.ndarray = field(repr=False)

    def __post_init__(self):
        eps = np.asarray(self.eps, dtype=float)
        h_b = np.asarray(self.h_b, dtype=complex)
        b_ops = np.asarray(self.b_ops, dtype=complex)
        rho_b = np.asarray(self.rho_b, dtype=complex)
        d_b = h_b.shape[0]

        if eps.ndim != 1 or eps.size < 2:
            raise DimensionError(f"need at least two system energies, got {eps.size}")
        if b_ops.shape != (eps.size, d_b, d_b) or rho_b.shape != (d_b, d_b) or h_b.shape != (d_b, d_b):
            raise DimensionError(
                f"inconsistent shapes: eps {eps.shape}, h_b {h_b.shape}, b_ops {b_ops.shape}, rho_b {rho_b.shape}"
            )
        for name, op in [("h_b", h_b), ("rho_b", rho_b)] + [(f"b_ops[{k}]", b) for k, b in enumerate(b_ops)]:
            if np.linalg.norm(op - op.conj().T) > HERMITIAN_TOL:
                raise NonHermitianInputError(f"{name} is not Hermitian")
        if abs(np.trace(rho_b) - 1.0) > HERMITIAN_TOL or np.linalg.eigvalsh(rho_b).min() < -HERMITIAN_TOL:
            raise NonHermitianInputError("rho_b must be a density matrix (PSD, unit trace)")

        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "h_b", h_b)
        object.__setattr__(self, "b_ops", b_ops)
        object.__setattr__(self, "rho_b", rho_b)

    @property
    def dim(self) -> int:
        return self.eps.size

    def z_operators(self) -> np.ndarray:
        eye = np.eye(self.h_b.shape[0])
        return np.array([e * eye + self.h_b + b for e, b in zip(self.eps, self.b_ops)])


def decoherence_factors(model: DecoherenceModel, t: float, pin_diagonal: bool = True) -> np.ndarray:
    """
    c_kl(t) = Tr(exp(-i Z_k t) rho_B exp(i Z_l t)).

    The computed c_kk equal 1 up to rounding; pin_diagonal replaces them by 1 exactly.
    """
    propagators = []
    for z in model.z_operators():
        w, v = np.linalg.eigh(z)
        propagators.append((v * np.exp(-1j * w * t)) @ v.conj().T)
    propagators = np.array(propagators)
    c = np.einsum("kij,jm,lim->kl", propagators, model.rho_b, propagators.conj())
    if pin_diagonal:
        np.fill_diagonal(c, 1.0)
    return c


def perfect_decoherence(model: DecoherenceModel) -> MapFamily:
    """
    Lambda_t[rho] = sum_kl c_kl(t) P_k rho P_l, i.e. the entrywise product C(t) o rho.

    The superoperator is diagonal in the matrix units, so c_kl are its eigenvalues.
    """
    def superop(t: float) -> SuperOperator:
        return SuperOperator(model.dim, np.diag(decoherence_factors(model, t).reshape(-1)))

    return MapFamily(
        dim=model.dim,
        family="perfect_decoherence",
        superop_fn=superop,
        eigenvalues_fn=lambda t: decoherence_factors(model, t).reshape(-1),
    )


def two_level_decoherence(g: float, eps: Sequence[float] = (0.0, 0.0)) -> DecoherenceModel:
    """Qubit system, qubit environment, rho_B = I/2, H_B = 0, B_k = (-1)^k g sigma_x"""
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    return DecoherenceModel(
        eps=np.asarray(eps, dtype=float),
        h_b=np.zeros((2, 2)),
        b_ops=np.array([g * sx, -g * sx]),
        rho_b=np.eye(2) / 2,
    )

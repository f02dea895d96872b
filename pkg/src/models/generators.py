"""
Time-Local Generators

Built-in channel families as generators L_t, with time-independent
eigen-operators and analytic eigenvalue functions mu_a(t) where they exist.

Families that are linear in their rates, L_t = sum_r gamma_r(t) K_r, share
one implementation: the integrated generator is sum_r Gamma_r(t) K_r and the
eigenvalue exponents are a fixed linear combination of the Gamma_r(t).
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import quad_vec

from src.exceptions import DimensionError, SingularGeneratorError
from src.linalg.bases import PAULI, gell_mann_basis, mub_bases, weyl_operators
from src.linalg.superop import SuperOperator
from src.models.rates import RateFunction, as_rate, from_callable

logger = logging.getLogger(__name__)

RateLike = Union[float, RateFunction]
SINGULAR_FLOOR = 1e-12


@dataclass(frozen=True)
class AnalyticSpectrum:
    """
    Fixed eigen-operators X_a (right) and Y_a (left, Tr(X_a Y_b^dag) = delta_ab)
    with eigenvalue rates mu_a(t) and exponents log lambda_a(t) = int_0^t mu_a.
    Index 0 is the stationary branch (mu_0 = 0).
    """
    eigen_operators: np.ndarray = field(repr=False)
    dual_operators: np.ndarray = field(repr=False)
    rates: Callable[[float], np.ndarray] = field(repr=False)
    log_eigenvalues: Callable[[float], np.ndarray] = field(repr=False)

    def eigenvalues(self, t: float) -> np.ndarray:
        return np.exp(self.log_eigenvalues(t))

    def superop(self, diagonal: np.ndarray) -> np.ndarray:
        """sum_a diagonal[a] |X_a>><<Y_a| in the computational basis"""
        n = self.eigen_operators.shape[0]
        right = self.eigen_operators.reshape(n, -1).T
        left = self.dual_operators.reshape(n, -1).conj()
        return (right * diagonal[None, :]) @ left


@dataclass(frozen=True)
class RateConditions:
    """
    Closed-form divisibility conditions at one time; every entry must be >= 0.

    cp: GKLS rates (complete positivity of the intermediate maps)
    p: eigenvalue conditions -Re mu_a (positivity for these families)
    """
    cp: np.ndarray
    p: np.ndarray
    cp_labels: Tuple[str, ...] = ()
    p_labels: Tuple[str, ...] = ()


@dataclass(frozen=True)
class TimeLocalGenerator:
    """
    Generator L_t of a dynamical map.

    Built-in families are linear in their rates; custom generators supply a
    t -> d^2 x d^2 matrix hook instead. Declared commutativity is verified
    by sampling before any route relies on it.
    """
    dim: int
    family: str
    commutative: bool
    terms: Tuple[SuperOperator, ...] = field(default=(), repr=False)
    rates: Tuple[RateFunction, ...] = field(default=(), repr=False)
    rate_labels: Tuple[str, ...] = field(default=(), repr=False)
    analytic_spectrum: Optional[AnalyticSpectrum] = field(default=None, repr=False)
    matrix_hook: Optional[Callable[[float], np.ndarray]] = field(default=None, repr=False)
    dissipative: Optional[Tuple[int, ...]] = None
    t_max: Optional[float] = None

    def evaluate(self, t: float) -> SuperOperator:
        """L_t as a superoperator"""
        if self.matrix_hook is not None:
            return SuperOperator(self.dim, np.asarray(self.matrix_hook(float(t)), dtype=complex))
        n = self.dim * self.dim
        matrix = np.zeros((n, n), dtype=complex)
        for rate, term in zip(self.rates, self.terms):
            matrix += rate(float(t)) * term.matrix
        return SuperOperator(self.dim, matrix)

    def rate_values(self, t: float) -> np.ndarray:
        return np.array([rate(float(t)) for rate in self.rates])

    def integrated(self, t: float) -> SuperOperator:
        """int_0^t L_u du"""
        n = self.dim * self.dim
        if t == 0.0:
            return SuperOperator(self.dim, np.zeros((n, n), dtype=complex))
        if self.matrix_hook is not None:
            result, _ = quad_vec(lambda u: self.evaluate(u).matrix, 0.0, float(t),
                                 epsabs=1e-10, epsrel=1e-10)
            return SuperOperator(self.dim, np.asarray(result, dtype=complex))
        matrix = np.zeros((n, n), dtype=complex)
        for rate, term in zip(self.rates, self.terms):
            matrix += rate.integral(float(t)) * term.matrix
        return SuperOperator(self.dim, matrix)

    def conditions(self, t: float) -> Optional[RateConditions]:
        """Closed-form CP and eigenvalue conditions, when the family has them"""
        if self.analytic_spectrum is None or not self.rates:
            return None
        mu = self.analytic_spectrum.rates(float(t))
        keep = self.dissipative if self.dissipative is not None else range(len(self.rates))
        return RateConditions(
            cp=self.rate_values(t)[list(keep)],
            p=-np.real(mu[1:]),
            cp_labels=tuple(self.rate_labels[i] for i in keep),
            p_labels=tuple(f"mu_{i}" for i in range(1, len(mu))),
        )


def _linear_generator(
    dim: int,
    family: str,
    terms: Sequence[SuperOperator],
    rates: Sequence[RateFunction],
    rate_labels: Sequence[str],
    eigen_operators: np.ndarray,
    dual_operators: np.ndarray,
    coefficients: np.ndarray,
) -> TimeLocalGenerator:
    """mu(t) = coefficients @ gamma(t), log lambda(t) = coefficients @ Gamma(t)"""
    rates = tuple(rates)
    coefficients = np.asarray(coefficients, dtype=complex)

    def mu(t: float) -> np.ndarray:
        return coefficients @ np.array([r(t) for r in rates])

    def log_lambda(t: float) -> np.ndarray:
        return coefficients @ np.array([r.integral(t) for r in rates])

    spectrum = AnalyticSpectrum(
        eigen_operators=eigen_operators,
        dual_operators=dual_operators,
        rates=mu,
        log_eigenvalues=log_lambda,
    )
    t_max = min((r.t_max for r in rates if r.t_max is not None), default=None)
    return TimeLocalGenerator(
        dim=dim,
        family=family,
        commutative=True,
        terms=tuple(terms),
        rates=rates,
        rate_labels=tuple(rate_labels),
        analytic_spectrum=spectrum,
        t_max=t_max,
    )


def _conjugation_term(u: np.ndarray, weight: float = 1.0) -> SuperOperator:
    """weight * (U rho U^dag - rho)"""
    d = u.shape[0]
    return SuperOperator(d, weight * (np.kron(u, u.conj()) - np.eye(d * d)))


def _check_count(name: str, gammas: Sequence, expected: int) -> None:
    if len(gammas) != expected:
        raise DimensionError(f"{name} needs {expected} rates, got {len(gammas)}")


def pauli_channel(g1: RateLike, g2: RateLike, g3: RateLike) -> TimeLocalGenerator:
    """
    L_t[rho] = 1/2 sum_k gamma_k(t) (sigma_k rho sigma_k - rho).

    Eigen-operators are the normalized Pauli matrices with
    mu_k = -(gamma_j + gamma_l), {j, l} the complement of k.
    """
    rates = [as_rate(g) for g in (g1, g2, g3)]
    sigmas = [PAULI["X"], PAULI["Y"], PAULI["Z"]]
    terms = [_conjugation_term(s, 0.5) for s in sigmas]
    basis = gell_mann_basis(2).elements
    coefficients = np.array([
        [0.0, 0.0, 0.0],
        [0.0, -1.0, -1.0],
        [-1.0, 0.0, -1.0],
        [-1.0, -1.0, 0.0],
    ])
    return _linear_generator(2, "pauli", terms, rates, ("gamma_1", "gamma_2", "gamma_3"),
                             basis, basis, coefficients)


def dephasing_qubit(gamma: RateLike) -> TimeLocalGenerator:
    """L_t[rho] = 1/2 gamma(t) (sigma_z rho sigma_z - rho)"""
    rate = as_rate(gamma)
    basis = gell_mann_basis(2).elements
    coefficients = np.array([[0.0], [-1.0], [-1.0], [0.0]])
    return _linear_generator(2, "dephasing_qubit", [_conjugation_term(PAULI["Z"], 0.5)], [rate],
                             ("gamma",), basis, basis, coefficients)


def _weyl_eigen_operators(d: int) -> np.ndarray:
    weyl = weyl_operators(d)
    return np.array([weyl.operator(m, n) for m, n in weyl.indices()]) / np.sqrt(d)


def _weyl_phase(d: int, k: int, l: int, m: int, n: int) -> complex:
    """U_kl U_mn U_kl^dag = omega^(lm - kn) U_mn"""
    return np.exp(2j * np.pi * ((l * m - k * n) % d) / d)


def dephasing_weyl(d: int, gammas: Sequence[RateLike]) -> TimeLocalGenerator:
    """L_t[rho] = 1/2 sum_{k=1}^{d-1} gamma_k(t) (U_k0 rho U_k0^dag - rho)"""
    _check_count("dephasing_weyl", gammas, d - 1)
    weyl = weyl_operators(d)
    rates = [as_rate(g) for g in gammas]
    terms = [_conjugation_term(weyl.operator(k, 0), 0.5) for k in range(1, d)]
    ops = _weyl_eigen_operators(d)
    coefficients = np.array([
        [0.5 * (_weyl_phase(d, k, 0, m, n) - 1.0) for k in range(1, d)]
        for m, n in weyl.indices()
    ])
    return _linear_generator(d, "dephasing_weyl", terms, rates,
                             tuple(f"gamma_{k}" for k in range(1, d)), ops, ops, coefficients)


def weyl_channel(d: int, gammas: Sequence[RateLike]) -> TimeLocalGenerator:
    """
    L_t[rho] = sum_{(k,l) != (0,0)} gamma_kl(t) (U_kl rho U_kl^dag - rho).

    Rates are ordered lexicographically in (k, l), skipping (0, 0).
    """
    weyl = weyl_operators(d)
    pairs = weyl.indices(include_identity=False)
    _check_count("weyl_channel", gammas, len(pairs))
    rates = [as_rate(g) for g in gammas]
    terms = [_conjugation_term(weyl.operator(k, l)) for k, l in pairs]
    ops = _weyl_eigen_operators(d)
    coefficients = np.array([
        [_weyl_phase(d, k, l, m, n) - 1.0 for k, l in pairs]
        for m, n in weyl.indices()
    ])
    return _linear_generator(d, "weyl", terms, rates,
                             tuple(f"gamma_{k}{l}" for k, l in pairs), ops, ops, coefficients)


def dephasing_gellmann(d: int, gammas: Sequence[RateLike]) -> TimeLocalGenerator:
    """L_t[rho] = -1/2 sum_l gamma_l(t) [V_l, [V_l, rho]] with the diagonal Gell-Mann V_l"""
    _check_count("dephasing_gellmann", gammas, d - 1)
    basis = gell_mann_basis(d)
    diagonals = basis.elements[len(basis) - (d - 1):]
    rates = [as_rate(g) for g in gammas]

    eye = np.eye(d)
    terms = []
    for v in diagonals:
        sq = v @ v
        terms.append(SuperOperator(d, -0.5 * (np.kron(sq, eye) + np.kron(eye, sq.T) - 2 * np.kron(v, v.conj()))))

    v_diag = np.array([np.real(np.diag(v)) for v in diagonals])      # (d-1, d)
    coefficients = np.zeros((len(basis), d - 1))
    for alpha, element in enumerate(basis.elements):
        rows, cols = np.nonzero(np.abs(element) > 1e-14)
        i, j = rows[0], cols[0]
        if i != j:
            coefficients[alpha] = -0.5 * (v_diag[:, i] - v_diag[:, j]) ** 2

    return _linear_generator(d, "dephasing_gellmann", terms, rates,
                             tuple(f"gamma_{l}" for l in range(1, d)),
                             basis.elements, basis.elements, coefficients)


def generalized_pauli(d: int, gammas: Sequence[RateLike]) -> TimeLocalGenerator:
    """
    L_t[rho] = sum_a gamma_a(t) (P_a[rho] - rho), P_a the dephasing in the a-th MUB.

    Eigen-operators W_a^k = sum_l omega^(lk) |psi_l><psi_l| (k = 1..d-1) with
    mu = -(gamma - gamma_a), gamma the sum of all rates.
    """
    mubs = mub_bases(d)
    _check_count("generalized_pauli", gammas, d + 1)
    rates = [as_rate(g) for g in gammas]
    omega = np.exp(2j * np.pi / d)

    terms = []
    ops = [np.eye(d, dtype=complex) / np.sqrt(d)]
    coefficients = [np.zeros(d + 1)]
    for alpha in range(d + 1):
        projectors = mubs.projectors(alpha)
        dephase = sum(np.kron(p, p.conj()) for p in projectors)
        terms.append(SuperOperator(d, dephase - np.eye(d * d)))
        for k in range(1, d):
            w = np.tensordot(omega ** (np.arange(d) * k), projectors, axes=1)
            ops.append(w / np.sqrt(d))
            row = -np.ones(d + 1)
            row[alpha] = 0.0
            coefficients.append(row)

    ops = np.array(ops)
    return _linear_generator(d, "generalized_pauli", terms, rates,
                             tuple(f"gamma_{a}" for a in range(1, d + 2)),
                             ops, ops, np.array(coefficients))


def hamiltonian_generator(h: np.ndarray) -> TimeLocalGenerator:
    """L[rho] = -i [H, rho] (time independent)"""
    h = np.asarray(h, dtype=complex)
    d = h.shape[0]
    matrix = -1j * (np.kron(h, np.eye(d)) - np.kron(np.eye(d), h.T))
    return custom_generator(d, lambda t: matrix, commutative=True, family="hamiltonian")


def custom_generator(
    dim: int,
    hook: Callable[[float], np.ndarray],
    commutative: bool = False,
    family: str = "custom",
) -> TimeLocalGenerator:
    """Generator from a t -> d^2 x d^2 matrix hook (computational basis, row stacking)"""
    return TimeLocalGenerator(dim=dim, family=family, commutative=commutative, matrix_hook=hook)


@dataclass(frozen=True)
class MapFamily:
    """Dynamical maps given directly as t -> Lambda_t"""
    dim: int
    family: str
    superop_fn: Callable[[float], SuperOperator] = field(repr=False)
    eigenvalues_fn: Optional[Callable[[float], np.ndarray]] = field(default=None, repr=False)

    def at(self, t: float) -> SuperOperator:
        return self.superop_fn(float(t))


@dataclass(frozen=True)
class AmplitudeDampingModel:
    """
    Qubit amplitude damping governed by one function G(t), G(0) = 1.

    The map is always available; the generator is undefined where G vanishes.
    """
    G: Callable[[float], complex] = field(repr=False)
    G_dot: Callable[[float], complex] = field(repr=False)
    generator: TimeLocalGenerator = field(repr=False)
    maps: MapFamily = field(repr=False)


def amplitude_damping_superop(g: complex) -> SuperOperator:
    """[[r00 + (1-|G|^2) r11, G r01], [G* r10, |G|^2 r11]]"""
    g2 = abs(g) ** 2
    matrix = np.array([
        [1.0, 0.0, 0.0, 1.0 - g2],
        [0.0, g, 0.0, 0.0],
        [0.0, 0.0, np.conj(g), 0.0],
        [0.0, 0.0, 0.0, g2],
    ], dtype=complex)
    return SuperOperator(2, matrix)


def amplitude_damping(
    G: Callable[[float], complex],
    G_dot: Optional[Callable[[float], complex]] = None,
    t_max: Optional[float] = None,
) -> AmplitudeDampingModel:
    """
    Build the amplitude-damping map family and its generator

        L_t[rho] = -i[H_t, rho] + gamma(t) (s_- rho s_+ - 1/2 {s_+ s_-, rho}),
        H_t = -s(t)/2 s_+ s_-,  s(t) = -2 Im(G'/G),  gamma(t) = -2 Re(G'/G),

    with s_- = |0><1|. Without G_dot the derivative is a central difference.

    Raises:
        SingularGeneratorError: when L_t is evaluated where |G(t)| < 1e-12
    """
    if abs(G(0.0) - 1.0) > 1e-9:
        raise ValueError(f"amplitude damping requires G(0) = 1, got {G(0.0)}")

    if G_dot is None:
        h = 1e-6

        def G_dot(t: float) -> complex:
            lo = max(0.0, t - h)
            hi = t + h if t_max is None else min(t_max, t + h)
            return (G(hi) - G(lo)) / (hi - lo)

    def log_derivative(t: float) -> complex:
        g = G(t)
        if abs(g) < SINGULAR_FLOOR:
            raise SingularGeneratorError("amplitude-damping generator is singular (G = 0)", time=t)
        return G_dot(t) / g

    gamma = from_callable(lambda t: -2.0 * np.real(log_derivative(t)), "gamma(t)",
                          antiderivative=lambda t: -2.0 * np.log(abs(G(t))), t_max=t_max)
    shift = from_callable(lambda t: -2.0 * np.imag(log_derivative(t)), "s(t)", t_max=t_max)

    lower = np.array([[0, 1], [0, 0]], dtype=complex)           # |0><1|
    excited = lower.conj().T @ lower                            # |1><1|
    eye = np.eye(2)
    hamiltonian = -0.5 * excited
    coherent = SuperOperator(2, -1j * (np.kron(hamiltonian, eye) - np.kron(eye, hamiltonian.T)))
    dissipator = SuperOperator(2, np.kron(lower, lower.conj())
                               - 0.5 * (np.kron(excited, eye) + np.kron(eye, excited.T)))

    ket0 = np.array([[1, 0], [0, 0]], dtype=complex)
    ket1 = np.array([[0, 0], [0, 1]], dtype=complex)
    right = np.array([ket0, lower, lower.conj().T, ket1 - ket0])
    left = np.array([eye.astype(complex), lower, lower.conj().T, ket1])

    def mu(t: float) -> np.ndarray:
        z = log_derivative(t)
        return np.array([0.0, z, np.conj(z), 2.0 * np.real(z)])

    def log_lambda(t: float) -> np.ndarray:
        with np.errstate(divide="ignore"):
            z = np.log(complex(G(t)))
        return np.array([0.0, z, np.conj(z), 2.0 * np.real(z)])

    spectrum = AnalyticSpectrum(eigen_operators=right, dual_operators=left, rates=mu, log_eigenvalues=log_lambda)
    generator = TimeLocalGenerator(
        dim=2,
        family="amplitude_damping",
        commutative=True,
        terms=(coherent, dissipator),
        rates=(shift, gamma),
        rate_labels=("s", "gamma"),
        dissipative=(1,),
        analytic_spectrum=spectrum,
        t_max=t_max,
    )

    def eigenvalues(t: float) -> np.ndarray:
        g = complex(G(t))
        return np.array([1.0, g, np.conj(g), abs(g) ** 2])

    maps = MapFamily(
        dim=2,
        family="amplitude_damping",
        superop_fn=lambda t: amplitude_damping_superop(complex(G(t))),
        eigenvalues_fn=eigenvalues,
    )
    return AmplitudeDampingModel(G=G, G_dot=G_dot, generator=generator, maps=maps)

"""
Operator Bases and Reference Objects

Generalized Gell-Mann basis, Weyl unitaries, mutually unbiased bases for
prime dimensions, and the maximally entangled projector.

Conventions:
    Gell-Mann ordering is part of the public contract: G_0 = I/sqrt(d), then
    the symmetric off-diagonal elements for pairs i < j in lexicographic
    order, then the antisymmetric ones in the same order, then the diagonal
    V_l for l = 1..d-1. Every matrix representation downstream depends on it.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Tuple

import numpy as np

from src.exceptions import DimensionError, UnsupportedDimensionError


def _check_dim(d: int) -> None:
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise DimensionError(f"Hilbert-space dimension must be an integer >= 2, got {d!r}")


def is_prime(n: int) -> bool:
    """Trial-division primality test (dimensions are small)"""
    if n < 2:
        return False
    return all(n % p for p in range(2, int(n ** 0.5) + 1))


@dataclass(frozen=True)
class OperatorBasis:
    """Hermitian orthonormal operator basis of M_d(C)"""
    dim: int
    elements: np.ndarray = field(repr=False)
    labels: Tuple[str, ...] = field(default=(), repr=False)

    def __post_init__(self):
        self.elements.flags.writeable = False

    def __len__(self) -> int:
        return self.elements.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        """d^2 x d^2 unitary whose columns are vec(G_alpha) (row stacking)"""
        return self.elements.reshape(len(self), -1).T

    def gram(self) -> np.ndarray:
        """Hilbert-Schmidt Gram matrix Tr(G_a^dag G_b)"""
        flat = self.elements.reshape(len(self), -1)
        return flat.conj() @ flat.T

    def coefficients(self, operator: np.ndarray) -> np.ndarray:
        """Expansion coefficients Tr(G_alpha^dag X)"""
        return self.matrix.conj().T @ np.asarray(operator).reshape(-1)

    def compose(self, coefficients: np.ndarray) -> np.ndarray:
        """Operator sum_alpha c_alpha G_alpha"""
        return np.tensordot(np.asarray(coefficients), self.elements, axes=1)


@dataclass(frozen=True)
class WeylFamily:
    """Weyl unitaries U_kl = sum_m omega^(mk) |m><m+l|, indexed operators[k, l]"""
    dim: int
    omega: complex
    operators: np.ndarray = field(repr=False)

    def operator(self, k: int, l: int) -> np.ndarray:
        """U_kl with indices taken mod d"""
        return self.operators[k % self.dim, l % self.dim]

    def indices(self, include_identity: bool = True) -> List[Tuple[int, int]]:
        """Lexicographic (k, l) pairs; (0, 0) first when included"""
        pairs = [(k, l) for k in range(self.dim) for l in range(self.dim)]
        return pairs if include_identity else pairs[1:]


@dataclass(frozen=True)
class MubSet:
    """d+1 mutually unbiased bases; bases[alpha][:, l] is |psi_l^(alpha)>"""
    dim: int
    bases: np.ndarray = field(repr=False)

    def projectors(self, alpha: int) -> np.ndarray:
        """Rank-one projectors |psi_l><psi_l| of basis alpha, shape (d, d, d)"""
        vectors = self.bases[alpha].T
        return np.einsum("li,lj->lij", vectors, vectors.conj())


@dataclass(frozen=True)
class MaxEntangledProjector:
    """|alpha> = d^(-1/2) sum_i |i (x) i> and P+ = |alpha><alpha|"""
    dim: int
    vector: np.ndarray = field(repr=False)
    projector: np.ndarray = field(repr=False)


def _diagonal_elements(d: int) -> List[np.ndarray]:
    mats = []
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        mats.append(np.diag(diag / np.sqrt(l * (l + 1))).astype(complex))
    return mats


@lru_cache(maxsize=None)
def gell_mann_basis(d: int) -> OperatorBasis:
    """
    Normalized generalized Gell-Mann basis.

    Args:
        d: Hilbert-space dimension (>= 2)

    Returns:
        OperatorBasis with d^2 Hermitian elements, orthonormal under
        Tr(A^dag B), G_0 = I/sqrt(d)
    """
    _check_dim(d)
    elements = [np.eye(d, dtype=complex) / np.sqrt(d)]
    labels = ["I"]
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]

    for i, j in pairs:
        mx = np.zeros((d, d), dtype=complex)
        mx[i, j] = mx[j, i] = 1.0 / np.sqrt(2)
        elements.append(mx)
        labels.append(f"S{i}{j}")

    for i, j in pairs:
        mx = np.zeros((d, d), dtype=complex)
        mx[i, j] = -1.0j / np.sqrt(2)
        mx[j, i] = 1.0j / np.sqrt(2)
        elements.append(mx)
        labels.append(f"A{i}{j}")

    elements.extend(_diagonal_elements(d))
    labels.extend(f"V{l}" for l in range(1, d))

    return OperatorBasis(dim=d, elements=np.array(elements), labels=tuple(labels))


@lru_cache(maxsize=None)
def weyl_operators(d: int) -> WeylFamily:
    """Weyl unitaries in the phase convention of the defining sum (no rephasing)"""
    _check_dim(d)
    omega = np.exp(2j * np.pi / d)
    ops = np.zeros((d, d, d, d), dtype=complex)
    for k in range(d):
        for l in range(d):
            for m in range(d):
                ops[k, l, m, (m + l) % d] = omega ** (m * k)
    ops.flags.writeable = False
    return WeylFamily(dim=d, omega=complex(omega), operators=ops)


@lru_cache(maxsize=None)
def mub_bases(d: int) -> MubSet:
    """
    Complete set of d+1 MUBs for prime d.

    Basis 0 is the computational basis. For odd prime d the remaining bases
    are |psi_l^(r)> = d^(-1/2) sum_m omega^(r m^2 + l m) |m>, r = 0..d-1.
    For d = 2 the quadratic phase degenerates, so the remaining two are the
    sigma_x and sigma_y eigenbases (i^(r m) (-1)^(l m) / sqrt(2)).
    """
    _check_dim(d)
    if not is_prime(d):
        raise UnsupportedDimensionError(
            f"unsupported dimension {d}: MUB construction requires prime d"
        )

    m = np.arange(d)
    bases = [np.eye(d, dtype=complex)]
    if d == 2:
        for r in range(2):
            bases.append(np.array([
                (1j ** (r * m)) * (-1.0) ** (l * m) for l in range(2)
            ]).T / np.sqrt(2))
    else:
        omega = np.exp(2j * np.pi / d)
        for r in range(d):
            cols = [omega ** ((r * m * m + l * m) % d) for l in range(d)]
            bases.append(np.array(cols).T / np.sqrt(d))

    stacked = np.array(bases)
    stacked.flags.writeable = False
    return MubSet(dim=d, bases=stacked)


@lru_cache(maxsize=None)
def max_entangled(d: int) -> MaxEntangledProjector:
    """Maximally entangled vector on C^d (x) C^d and its projector"""
    _check_dim(d)
    vector = np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
    projector = np.outer(vector, vector.conj())
    vector.flags.writeable = False
    projector.flags.writeable = False
    return MaxEntangledProjector(dim=d, vector=vector, projector=projector)


PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

"""
Superoperator Calculus

Matrix representations, block decomposition, spectra, Choi matrices,
damping bases, structural classification and the conditional complete
positivity test.

We use the row-stacking convention vec(X) = X.reshape(-1), so that
vec(A X B) = (A (x) B^T) vec(X) and the Hilbert-Schmidt inner product is
Tr(A^dag B) = vec(A)^dag vec(B). A map on M_d(C) is stored as its d^2 x d^2
matrix in the elementary-matrix basis.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from src.exceptions import (
    DefectiveMapError,
    DimensionError,
    NotTraceAnnihilatingError,
    NotTracePreservingError,
)
from src.linalg.bases import OperatorBasis, gell_mann_basis, max_entangled

logger = logging.getLogger(__name__)

STRUCTURE_TOL = 1e-9
POSITIVITY_TOL = 1e-9
DEFECTIVE_COND = 1e10


def vec(matrix: np.ndarray) -> np.ndarray:
    """Row-stacking vectorization"""
    return np.asarray(matrix).reshape(-1)


def unvec(vector: np.ndarray) -> np.ndarray:
    """Inverse of vec for square matrices"""
    vector = np.asarray(vector)
    d = int(round(np.sqrt(vector.size)))
    return vector.reshape(d, d)


@dataclass(frozen=True)
class SuperOperator:
    """Linear map on d x d complex matrices"""
    dim: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = self.dim * self.dim
        if self.matrix.shape != (n, n):
            raise DimensionError(
                f"superoperator on d={self.dim} needs a {n}x{n} matrix, got {self.matrix.shape}"
            )

    @classmethod
    def identity(cls, d: int) -> "SuperOperator":
        return cls(d, np.eye(d * d, dtype=complex))

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], d: int) -> "SuperOperator":
        """Tabulate fn on the elementary matrices |i><j|"""
        columns = []
        for idx in range(d * d):
            unit = np.zeros(d * d, dtype=complex)
            unit[idx] = 1.0
            columns.append(vec(fn(unvec(unit))))
        return cls(d, np.array(columns, dtype=complex).T)

    @classmethod
    def from_kraus(cls, kraus_ops: Sequence[np.ndarray]) -> "SuperOperator":
        """sum_i K_i rho K_i^dag -> sum_i K_i (x) conj(K_i)"""
        ops = [np.asarray(k, dtype=complex) for k in kraus_ops]
        d = ops[0].shape[0]
        return cls(d, sum(np.kron(k, k.conj()) for k in ops))

    @classmethod
    def from_conjugations(
        cls,
        unitaries: Sequence[np.ndarray],
        weights: Sequence[float],
    ) -> "SuperOperator":
        """sum_i w_i U_i rho U_i^dag (weights need not be positive)"""
        unitaries = [np.asarray(u, dtype=complex) for u in unitaries]
        d = unitaries[0].shape[0]
        matrix = sum(w * np.kron(u, u.conj()) for w, u in zip(weights, unitaries))
        return cls(d, np.asarray(matrix, dtype=complex))

    def __call__(self, operator: np.ndarray) -> np.ndarray:
        return self.apply(operator)

    def apply(self, operators: np.ndarray) -> np.ndarray:
        """Apply to a single d x d operator or a stack (..., d, d)"""
        operators = np.asarray(operators)
        d = self.dim
        flat = operators.reshape(*operators.shape[:-2], d * d)
        out = np.einsum("ab,...b->...a", self.matrix, flat)
        return out.reshape(operators.shape[:-2] + (d, d))

    def apply_extended(self, operators: np.ndarray, k: int) -> np.ndarray:
        """Apply (id_k (x) Phi) to operators on C^k (x) C^d, shape (..., kd, kd)"""
        operators = np.asarray(operators)
        d = self.dim
        lead = operators.shape[:-2]
        blocks = operators.reshape(lead + (k, d, k, d))
        blocks = np.moveaxis(blocks, -3, -2)          # (..., k, k, d, d)
        mapped = self.apply(blocks)
        mapped = np.moveaxis(mapped, -2, -3)          # (..., k, d, k, d)
        return mapped.reshape(lead + (k * d, k * d))

    def extend(self, k: int) -> "SuperOperator":
        """id_k (x) self as a superoperator on C^k (x) C^d"""
        if k < 1:
            raise DimensionError(f"extension order must be >= 1, got {k}")
        return SuperOperator.from_function(lambda x: self.apply_extended(x, k), k * self.dim)

    def compose(self, other: "SuperOperator") -> "SuperOperator":
        """self o other"""
        if other.dim != self.dim:
            raise DimensionError(f"cannot compose d={self.dim} with d={other.dim}")
        return SuperOperator(self.dim, self.matrix @ other.matrix)

    def dual(self) -> "SuperOperator":
        """Heisenberg-picture map defined by Tr(A^dag Phi[B]) = Tr(Phi*[A]^dag B)"""
        return SuperOperator(self.dim, self.matrix.conj().T)

    def trace(self) -> complex:
        """Sum of eigenvalues"""
        return complex(np.trace(self.matrix))


@dataclass(frozen=True)
class FMatrix:
    """
    Representation F_ab = Tr(G_a Phi[G_b]) in the Gell-Mann ordering.

    Stored real when the map is Hermiticity-preserving; `entries` always
    gives the complex view.
    """
    dim: int
    data: np.ndarray = field(repr=False)

    @classmethod
    def identity(cls, d: int) -> "FMatrix":
        return cls(d, np.eye(d * d))

    @property
    def entries(self) -> np.ndarray:
        return self.data.astype(complex, copy=False)

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.data)

    @property
    def q(self) -> np.ndarray:
        """Translation vector (column 0 below the corner)"""
        return self.data[1:, 0]

    @property
    def delta(self) -> np.ndarray:
        """(d^2-1) x (d^2-1) contraction block"""
        return self.data[1:, 1:]

    def is_trace_preserving(self, tol: float = 1e-12) -> bool:
        row = self.entries[0].copy()
        row[0] -= 1.0
        return bool(np.max(np.abs(row)) <= tol * max(1.0, np.abs(self.data).max()))

    def to_superop(self, basis: Optional[OperatorBasis] = None) -> SuperOperator:
        basis = basis or gell_mann_basis(self.dim)
        b = basis.matrix
        return SuperOperator(self.dim, b @ self.entries @ b.conj().T)


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalues (lambda_0 pinned first) and SVD F = O1 Sigma O2^-1"""
    eigenvalues: np.ndarray
    singular_values: np.ndarray
    left_factor: np.ndarray = field(repr=False)
    right_factor: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class DampingBasis:
    """Biorthonormal eigen-operators: Phi[F_a] = l_a F_a, Phi*[G_a] = conj(l_a) G_a"""
    eigenvalues: np.ndarray
    right_eigenvectors: np.ndarray = field(repr=False)
    left_eigenvectors: np.ndarray = field(repr=False)
    self_dual: bool = False


@dataclass(frozen=True)
class MapFlags:
    hermitian: bool
    normal: bool
    unital: bool
    trace_preserving: bool
    hermiticity_preserving: bool = True

    def __and__(self, other: "MapFlags") -> "MapFlags":
        return MapFlags(
            hermitian=self.hermitian and other.hermitian,
            normal=self.normal and other.normal,
            unital=self.unital and other.unital,
            trace_preserving=self.trace_preserving and other.trace_preserving,
            hermiticity_preserving=self.hermiticity_preserving and other.hermiticity_preserving,
        )


@dataclass(frozen=True)
class CcpResult:
    passes: bool
    min_eig: float


def _ordering(eigenvalues: np.ndarray, identity_overlap: np.ndarray) -> np.ndarray:
    """
    Permutation that puts the trace-preservation root first: the eigenvalue
    closest to 1 whose eigenvector overlaps the identity most. The rest are
    sorted by decreasing modulus, then real part, then imaginary part.
    """
    dist = np.abs(eigenvalues - 1.0)
    candidates = np.flatnonzero(dist <= dist.min() + 1e-9)
    pinned = int(candidates[np.argmax(np.abs(identity_overlap[candidates]))])
    rest = [i for i in range(len(eigenvalues)) if i != pinned]
    rest.sort(key=lambda i: (
        -round(abs(eigenvalues[i]), 12),
        -round(eigenvalues[i].real, 12),
        -round(eigenvalues[i].imag, 12),
    ))
    return np.array([pinned] + rest)


def matrix_rep(phi: SuperOperator, basis: Optional[OperatorBasis] = None) -> FMatrix:
    """F_ab = Tr(G_a phi[G_b])"""
    basis = basis or gell_mann_basis(phi.dim)
    if basis.dim != phi.dim:
        raise DimensionError(f"basis dimension {basis.dim} does not match map dimension {phi.dim}")
    b = basis.matrix
    entries = b.conj().T @ phi.matrix @ b
    if np.max(np.abs(entries.imag)) <= 1e-12 * max(1.0, np.abs(entries).max()):
        entries = entries.real.copy()
    return FMatrix(phi.dim, entries)


def block_decompose(F: FMatrix, tol: float = 1e-9) -> Tuple[np.ndarray, np.ndarray]:
    """Split a trace-preserving F into (q, Delta)"""
    if not F.is_trace_preserving(tol):
        raise NotTracePreservingError("block form requires row 0 of F to be (1, 0, ..., 0)")
    return F.q, F.delta


def bloch_vector(rho: np.ndarray, basis: Optional[OperatorBasis] = None) -> np.ndarray:
    """x_a = sqrt(d) Tr(G_a rho), so that rho = (I + sqrt(d) sum x_a G_a) / d"""
    rho = np.asarray(rho)
    basis = basis or gell_mann_basis(rho.shape[0])
    return np.sqrt(basis.dim) * basis.coefficients(rho)[1:].real


def state_from_bloch(x: np.ndarray, basis: OperatorBasis) -> np.ndarray:
    d = basis.dim
    coeffs = np.concatenate([[1.0 / np.sqrt(d)], np.asarray(x) / np.sqrt(d)])
    return basis.compose(coeffs)


def spectrum(F: FMatrix) -> SpectralData:
    """Eigenvalues and singular value decomposition of F"""
    entries = F.entries
    w, v = np.linalg.eig(entries)
    order = _ordering(w, v[0])
    u, s, vh = np.linalg.svd(F.data)
    right = vh.conj().T
    return SpectralData(eigenvalues=w[order], singular_values=s, left_factor=u, right_factor=right)


def volume_factor(F: FMatrix) -> float:
    """|Det Delta|, the volume of the accessible-state body relative to t=0"""
    if F.is_trace_preserving(1e-9):
        return float(abs(np.linalg.det(F.delta)))
    return float(abs(np.linalg.det(F.entries)))


def choi(phi: SuperOperator) -> np.ndarray:
    """(id (x) phi)[P+] with normalized P+"""
    d = phi.dim
    tensor = phi.matrix.reshape(d, d, d, d)               # [a, b, i, j] = <a|phi(|i><j|)|b>
    return tensor.transpose(2, 0, 3, 1).reshape(d * d, d * d) / d


def from_choi(J: np.ndarray) -> SuperOperator:
    """Inverse of choi()"""
    J = np.asarray(J)
    d = int(round(np.sqrt(J.shape[0])))
    tensor = J.reshape(d, d, d, d)                        # [i, a, j, b]
    return SuperOperator(d, d * tensor.transpose(1, 3, 0, 2).reshape(d * d, d * d))


def witness_f(phi: SuperOperator) -> float:
    """<alpha|(id (x) phi)[P+]|alpha>, equal to d^-2 times the eigenvalue sum"""
    alpha = max_entangled(phi.dim).vector
    return float(np.real(alpha.conj() @ choi(phi) @ alpha))


def damping_basis(phi: SuperOperator, tol: float = STRUCTURE_TOL) -> DampingBasis:
    """
    Left/right eigen-operators of phi.

    Normal maps get an orthonormal self-dual basis from the complex Schur
    form; otherwise the general eigensolver is used and non-diagonalizable
    maps raise DefectiveMapError.
    """
    d = phi.dim
    S = phi.matrix
    norm = max(1.0, np.linalg.norm(S))
    identity = vec(np.eye(d)) / np.sqrt(d)

    if np.linalg.norm(S @ S.conj().T - S.conj().T @ S) <= tol * norm ** 2:
        T, Z = scipy.linalg.schur(S, output="complex")
        w = np.diag(T).copy()
        order = _ordering(w, identity.conj() @ Z)
        right = Z[:, order].T.reshape(-1, d, d)
        return DampingBasis(
            eigenvalues=w[order],
            right_eigenvectors=right,
            left_eigenvectors=right.copy(),
            self_dual=True,
        )

    w, R = np.linalg.eig(S)
    R = R / np.linalg.norm(R, axis=0, keepdims=True)
    cond = np.linalg.cond(R)
    if not np.isfinite(cond) or cond > DEFECTIVE_COND:
        raise DefectiveMapError(f"defective map: eigenvector matrix condition number {cond:.3g}")
    L = np.linalg.inv(R)
    order = _ordering(w, identity.conj() @ R)
    right = R[:, order].T.reshape(-1, d, d)
    left = L[order, :].conj().reshape(-1, d, d)
    return DampingBasis(eigenvalues=w[order], right_eigenvectors=right, left_eigenvectors=left)


def classify(phi: SuperOperator, tol: float = STRUCTURE_TOL) -> MapFlags:
    """Hermitian / normal / unital / trace-preserving flags"""
    d = phi.dim
    F = matrix_rep(phi).entries
    scale = max(1.0, np.linalg.norm(F))
    identity = np.eye(d)
    return MapFlags(
        hermitian=bool(np.linalg.norm(F - F.conj().T) <= tol * scale),
        normal=bool(np.linalg.norm(F @ F.conj().T - F.conj().T @ F) <= tol * scale ** 2),
        unital=bool(np.linalg.norm(phi(identity) - identity) <= tol * scale),
        trace_preserving=bool(np.linalg.norm(phi.dual()(identity) - identity) <= tol * scale),
        hermiticity_preserving=bool(np.max(np.abs(F.imag)) <= tol * scale),
    )


def commute_check(a: SuperOperator, b: SuperOperator) -> float:
    """Frobenius norm of the commutator [A, B]"""
    if a.dim != b.dim:
        raise DimensionError(f"cannot compare maps on d={a.dim} and d={b.dim}")
    return float(np.linalg.norm(a.matrix @ b.matrix - b.matrix @ a.matrix))


def is_trace_annihilating(L: SuperOperator, tol: float = STRUCTURE_TOL) -> bool:
    residual = np.linalg.norm(L.dual()(np.eye(L.dim)))
    return bool(residual <= tol * max(1.0, np.linalg.norm(L.matrix)))


def ccp_test(L: SuperOperator, tol: float = POSITIVITY_TOL) -> CcpResult:
    """
    Conditional complete positivity of a generator.

    Positivity of (1 - P+) (id (x) L)[P+] (1 - P+) is equivalent to
    V_{t+eps,t} = 1 + eps L + o(eps) being completely positive.
    """
    if not is_trace_annihilating(L):
        raise NotTraceAnnihilatingError("ccp_test requires a trace-annihilating generator")
    d = L.dim
    proj = np.eye(d * d) - max_entangled(d).projector
    block = proj @ choi(L) @ proj
    block = 0.5 * (block + block.conj().T)
    min_eig = float(np.linalg.eigvalsh(block).min())
    return CcpResult(passes=min_eig >= -tol, min_eig=min_eig)


def trace_norm(operators: np.ndarray) -> np.ndarray:
    """Trace norm of Hermitian operators, batched over leading axes"""
    operators = np.asarray(operators)
    hermitian = 0.5 * (operators + np.swapaxes(operators.conj(), -1, -2))
    return np.abs(np.linalg.eigvalsh(hermitian)).sum(axis=-1)


def hs_norm(operators: np.ndarray) -> np.ndarray:
    """Hilbert-Schmidt (Frobenius) norm, batched over leading axes"""
    return np.linalg.norm(np.asarray(operators), axis=(-2, -1))

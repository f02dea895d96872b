"""
Random operators and maps for sampled witnesses and property checks.

Every function takes an explicit numpy Generator so that results are a pure
function of the seed.
"""

from typing import Optional

import numpy as np
from scipy.stats import unitary_group

from src.linalg.superop import FMatrix, SuperOperator


def haar_unitaries(d: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitaries, shape (size, d, d)"""
    if size == 0:
        return np.zeros((0, d, d), dtype=complex)
    mats = unitary_group.rvs(d, size=size, random_state=rng)
    return np.asarray(mats).reshape(size, d, d)


def ginibre(d: int, size: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((size, d, d)) + 1j * rng.standard_normal((size, d, d))


def random_density_matrices(d: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Hilbert-Schmidt distributed states W W^dag / Tr(W W^dag)"""
    w = ginibre(d, size, rng)
    rho = w @ np.swapaxes(w.conj(), -1, -2)
    return rho / np.trace(rho, axis1=-2, axis2=-1).real[:, None, None]


def random_pure_states(d: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Normalized Gaussian vectors, shape (size, d)"""
    psi = rng.standard_normal((size, d)) + 1j * rng.standard_normal((size, d))
    return psi / np.linalg.norm(psi, axis=1, keepdims=True)


def random_hermitian(d: int, size: int, rng: np.random.Generator) -> np.ndarray:
    w = ginibre(d, size, rng)
    return 0.5 * (w + np.swapaxes(w.conj(), -1, -2))


def random_normal_operators(d: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """U diag(z) U^dag with Haar U and complex Gaussian z"""
    u = haar_unitaries(d, size, rng)
    z = rng.standard_normal((size, d)) + 1j * rng.standard_normal((size, d))
    return np.einsum("nij,nj,nkj->nik", u, z, u.conj())


def random_unit_vectors(n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points on the unit sphere in R^n"""
    x = rng.standard_normal((size, n))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def random_unital_channel(d: int, rng: np.random.Generator, terms: int = 4) -> SuperOperator:
    """Convex mixture of Haar unitary conjugations (unital, CPTP)"""
    weights = rng.dirichlet(np.ones(terms))
    return SuperOperator.from_conjugations(haar_unitaries(d, terms, rng), weights)


def random_channel(d: int, rng: np.random.Generator, rank: Optional[int] = None) -> SuperOperator:
    """CPTP map from a Haar-random isometry C^d -> C^d (x) C^rank"""
    rank = rank or d
    v = haar_unitaries(d * rank, 1, rng)[0][:, :d]
    kraus = v.reshape(d, rank, d).transpose(1, 0, 2)
    return SuperOperator.from_kraus(list(kraus))


def random_hp_tp_map(d: int, rng: np.random.Generator) -> SuperOperator:
    """Hermiticity- and trace-preserving map (not necessarily positive)"""
    n = d * d
    F = np.zeros((n, n))
    F[0, 0] = 1.0
    F[1:, :] = rng.standard_normal((n - 1, n))
    return FMatrix(d, F).to_superop()

"""
Unit tests for superoperators and their matrix representation
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from src.exceptions import DefectiveMapError, DimensionError, NotTraceAnnihilatingError, NotTracePreservingError
from src.linalg import sampling
from src.linalg.bases import PAULI, gell_mann_basis, max_entangled
from src.linalg.superop import (
    FMatrix,
    SuperOperator,
    block_decompose,
    bloch_vector,
    ccp_test,
    choi,
    classify,
    commute_check,
    damping_basis,
    from_choi,
    hs_norm,
    is_trace_annihilating,
    matrix_rep,
    spectrum,
    state_from_bloch,
    trace_norm,
    vec,
    volume_factor,
    witness_f,
)
from src.models.generators import amplitude_damping_superop


@pytest.fixture
def rng():
    """Seeded generator"""
    return np.random.default_rng(1234)


def dephasing_map(lam: float) -> SuperOperator:
    """Qubit dephasing with coherence factor lam"""
    p = 0.5 * (1.0 - lam)
    return SuperOperator.from_conjugations([np.eye(2), PAULI["Z"]], [1.0 - p, p])


def test_row_stacking_identity(rng):
    """Test vec(A X B) = (A kron B^T) vec(X)"""
    a, x, b = (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)) for _ in range(3))
    np.testing.assert_allclose(vec(a @ x @ b), np.kron(a, b.T) @ vec(x), atol=1e-12)


def test_from_kraus_matches_function(rng):
    """Test Kraus and tabulated constructions agree"""
    channel = sampling.random_channel(3, rng)
    kraus_like = SuperOperator.from_function(channel, 3)
    np.testing.assert_allclose(kraus_like.matrix, channel.matrix, atol=1e-12)

    k = [np.sqrt(0.3) * np.eye(2), np.sqrt(0.7) * PAULI["X"]]
    phi = SuperOperator.from_kraus(k)
    rho = np.array([[0.6, 0.2j], [-0.2j, 0.4]])
    np.testing.assert_allclose(phi(rho), 0.3 * rho + 0.7 * PAULI["X"] @ rho @ PAULI["X"], atol=1e-12)


def test_apply_is_batched(rng):
    """Test apply over a stack equals applying one by one"""
    phi = sampling.random_channel(2, rng)
    stack = sampling.random_density_matrices(2, 5, rng)
    batched = phi.apply(stack)
    for i in range(5):
        np.testing.assert_allclose(batched[i], phi(stack[i]), atol=1e-12)


def test_apply_extended_gives_choi(rng):
    """Test (id (x) Phi)[P+] through apply_extended equals choi"""
    phi = sampling.random_channel(3, rng)
    extended = phi.apply_extended(max_entangled(3).projector, 3)
    np.testing.assert_allclose(extended, choi(phi), atol=1e-12)
    np.testing.assert_allclose(phi.apply_extended(np.eye(3), 1), phi(np.eye(3)), atol=1e-12)


def test_extend_matches_kraus_extension():
    """Test id_k (x) Phi built from Kraus operators I (x) K"""
    k = [np.sqrt(0.25) * np.eye(2), np.sqrt(0.75) * PAULI["Y"]]
    extended = SuperOperator.from_kraus(k).extend(2)
    assert extended.dim == 4
    expected = SuperOperator.from_kraus([np.kron(np.eye(2), op) for op in k])
    np.testing.assert_allclose(extended.matrix, expected.matrix, atol=1e-12)
    with pytest.raises(DimensionError):
        SuperOperator.identity(2).extend(0)


def test_compose_and_dual(rng):
    """Test composition order and the Hilbert-Schmidt adjoint"""
    a = sampling.random_channel(2, rng)
    b = sampling.random_channel(2, rng)
    rho = sampling.random_density_matrices(2, 1, rng)[0]
    np.testing.assert_allclose(a.compose(b)(rho), a(b(rho)), atol=1e-12)

    x = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    lhs = np.trace(x.conj().T @ a(rho))
    rhs = np.trace(a.dual()(x).conj().T @ rho)
    assert abs(lhs - rhs) < 1e-12

    with pytest.raises(DimensionError):
        a.compose(SuperOperator.identity(3))


def test_superop_shape_checked():
    """Test wrong matrix size is rejected"""
    with pytest.raises(DimensionError):
        SuperOperator(2, np.eye(3))


def test_matrix_rep_identity_and_roundtrip(rng):
    """Test F of the identity map and F -> superop -> F"""
    F = matrix_rep(SuperOperator.identity(3))
    assert F.is_real
    np.testing.assert_allclose(F.data, np.eye(9), atol=1e-12)

    phi = sampling.random_channel(3, rng)
    F = matrix_rep(phi)
    assert F.is_real
    np.testing.assert_allclose(F.to_superop().matrix, phi.matrix, atol=1e-12)


def test_matrix_rep_block_form():
    """Test amplitude-damping F has row 0 = e0 and translation q_z = 1 - |G|^2"""
    g = np.sqrt(0.5)
    F = matrix_rep(amplitude_damping_superop(g))
    assert F.is_trace_preserving()
    q, delta = block_decompose(F)
    np.testing.assert_allclose(q, [0.0, 0.0, 0.5], atol=1e-12)
    np.testing.assert_allclose(np.diag(delta), [g, g, 0.5], atol=1e-12)


def test_block_decompose_requires_trace_preservation():
    """Test non-TP maps are rejected"""
    with pytest.raises(NotTracePreservingError):
        block_decompose(FMatrix(2, 2.0 * np.eye(4)))


def test_bloch_roundtrip(rng):
    """Test Bloch vector conventions"""
    basis = gell_mann_basis(2)
    ket0 = np.array([[1.0, 0.0], [0.0, 0.0]])
    np.testing.assert_allclose(bloch_vector(ket0), [0.0, 0.0, 1.0], atol=1e-12)

    rho = sampling.random_density_matrices(3, 1, rng)[0]
    x = bloch_vector(rho)
    np.testing.assert_allclose(state_from_bloch(x, gell_mann_basis(3)), rho, atol=1e-12)
    np.testing.assert_allclose(state_from_bloch(np.zeros(3), basis), np.eye(2) / 2, atol=1e-12)


def test_spectrum_pins_stationary_eigenvalue(rng):
    """Test lambda_0 = 1 comes first for a channel"""
    F = matrix_rep(sampling.random_channel(2, rng))
    data = spectrum(F)
    assert abs(data.eigenvalues[0] - 1.0) < 1e-10
    moduli = np.abs(data.eigenvalues[1:])
    assert np.all(np.diff(moduli) <= 1e-12)
    np.testing.assert_allclose(
        data.left_factor @ np.diag(data.singular_values) @ data.right_factor.conj().T, F.data, atol=1e-12
    )


def test_volume_factor_dephasing():
    """Test Vol = |Det Delta| = lambda^2 for qubit dephasing"""
    assert abs(volume_factor(matrix_rep(dephasing_map(0.3))) - 0.09) < 1e-12


@pytest.mark.parametrize("d", [2, 3, 4])
def test_witness_f_equals_normalized_trace(d, rng):
    """Test <alpha|(id (x) Phi)[P+]|alpha> = d^-2 sum of eigenvalues on HP-TP maps"""
    for _ in range(200):
        phi = sampling.random_hp_tp_map(d, rng)
        expected = np.real(np.sum(np.linalg.eigvals(phi.matrix))) / d ** 2
        assert abs(witness_f(phi) - expected) <= 1e-9


def test_witness_f_local_observables(rng):
    """Test f = 1/4 (1 + <XX> - <YY> + <ZZ>) on the qubit Choi state"""
    phi = sampling.random_channel(2, rng)
    J = choi(phi)

    def expectation(a, b):
        return np.real(np.trace(J @ np.kron(PAULI[a], PAULI[b])))

    expected = 0.25 * (1.0 + expectation("X", "X") - expectation("Y", "Y") + expectation("Z", "Z"))
    assert abs(witness_f(phi) - expected) <= 1e-10


@given(st.integers(min_value=2, max_value=4), st.integers(min_value=0, max_value=2 ** 31))
@settings(max_examples=25, deadline=None)
def test_choi_roundtrip(d, seed):
    """Test from_choi inverts choi"""
    phi = sampling.random_hp_tp_map(d, np.random.default_rng(seed))
    np.testing.assert_allclose(from_choi(choi(phi)).matrix, phi.matrix, atol=1e-10)


def test_choi_of_channel_is_state(rng):
    """Test channel Choi matrices are PSD with unit trace"""
    J = choi(sampling.random_channel(3, rng))
    assert abs(np.trace(J) - 1.0) < 1e-12
    assert np.linalg.eigvalsh(0.5 * (J + J.conj().T)).min() > -1e-12


def test_damping_basis_non_normal():
    """Test biorthonormal eigen-operators of amplitude damping"""
    phi = amplitude_damping_superop(0.6)
    db = damping_basis(phi)
    assert not db.self_dual
    assert abs(db.eigenvalues[0] - 1.0) < 1e-12
    for lam, r in zip(db.eigenvalues, db.right_eigenvectors):
        np.testing.assert_allclose(phi(r), lam * r, atol=1e-10)
    overlaps = np.einsum("aij,bij->ab", db.left_eigenvectors.conj(), db.right_eigenvectors)
    np.testing.assert_allclose(overlaps, np.eye(4), atol=1e-10)


def test_damping_basis_normal_is_self_dual(rng):
    """Test normal maps get an orthonormal self-dual basis"""
    phi = sampling.random_unital_channel(2, rng)
    phi = SuperOperator(2, 0.5 * (phi.matrix + phi.dual().matrix))
    db = damping_basis(phi)
    assert db.self_dual
    gram = np.einsum("aij,bij->ab", db.right_eigenvectors.conj(), db.right_eigenvectors)
    np.testing.assert_allclose(gram, np.eye(4), atol=1e-10)
    for lam, r in zip(db.eigenvalues, db.right_eigenvectors):
        np.testing.assert_allclose(phi(r), lam * r, atol=1e-10)


def test_damping_basis_defective():
    """Test a Jordan block is reported as defective"""
    matrix = np.eye(4, dtype=complex)
    matrix[1, 2] = 1.0
    with pytest.raises(DefectiveMapError):
        damping_basis(SuperOperator(2, matrix))


def test_classify_flags(rng):
    """Test Hermitian / normal / unital / TP classification"""
    flags = classify(dephasing_map(0.4))
    assert flags.hermitian and flags.normal and flags.unital and flags.trace_preserving

    flags = classify(amplitude_damping_superop(0.5))
    assert not flags.normal and not flags.unital and flags.trace_preserving

    u = sampling.haar_unitaries(2, 1, rng)[0]
    flags = classify(SuperOperator.from_kraus([u]))
    assert flags.normal and flags.unital


def test_commute_check():
    """Test dephasing maps commute, dephasing and a rotation do not"""
    assert commute_check(dephasing_map(0.2), dephasing_map(0.7)) < 1e-12
    rotation = SuperOperator.from_kraus([expm(-0.4j * PAULI["X"])])
    assert commute_check(dephasing_map(0.2), rotation) > 1e-3


def test_ccp_test_on_generators():
    """Test conditional complete positivity on dephasing generators"""
    z = PAULI["Z"]
    dissipator = 0.5 * (np.kron(z, z.conj()) - np.eye(4))
    assert is_trace_annihilating(SuperOperator(2, dissipator))
    assert ccp_test(SuperOperator(2, dissipator)).passes

    result = ccp_test(SuperOperator(2, -dissipator))
    assert not result.passes
    assert result.min_eig < 0

    with pytest.raises(NotTraceAnnihilatingError):
        ccp_test(SuperOperator.identity(2))


def test_norms():
    """Test trace and Hilbert-Schmidt norms"""
    x = np.diag([1.0, -2.0])
    assert abs(trace_norm(x) - 3.0) < 1e-12
    assert abs(hs_norm(x) - np.sqrt(5.0)) < 1e-12
    np.testing.assert_allclose(trace_norm(np.array([x, 2 * x])), [3.0, 6.0])

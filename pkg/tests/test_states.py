import math

import numpy as np
import pytest

from lindbladkit.states import (
    DensityMatrix,
    basis_state,
    from_statevector,
    maximally_mixed,
    purity_deficit,
    reconstruct,
    renyi_entropy,
    spectrum,
    validate,
)

RHO_1 = DensityMatrix(np.eye(2) / 2)
RHO_2 = DensityMatrix(np.full((2, 2), 0.5))


def random_state(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return DensityMatrix(rho / np.trace(rho))


def test_validate_passes_equal_mixture():
    report = validate(RHO_1, 1e-9)
    assert report.passed
    assert report.hermiticity_defect == 0.0
    assert report.trace_defect == 0.0
    assert report.min_eigenvalue == pytest.approx(0.5)


def test_validate_rejects_wrong_trace():
    report = validate(DensityMatrix(np.eye(2)), 1e-9)
    assert not report.passed
    assert report.trace_defect == pytest.approx(1.0)


def test_validate_rejects_negative_eigenvalue():
    # Characteristic polynomial of [[1, 1], [1, 0]] is x^2 - x - 1,
    # so the eigenvalues are (1 +- sqrt 5)/2: trace fine, not positive.
    report = validate(DensityMatrix([[1.0, 1.0], [1.0, 0.0]]), 1e-9)
    assert not report.passed
    assert report.trace_defect <= 1e-15
    assert report.min_eigenvalue == pytest.approx((1 - math.sqrt(5)) / 2)


def test_validate_requires_positive_tol():
    with pytest.raises(ValueError):
        validate(RHO_1, 0.0)


def test_purity_deficit_values():
    assert purity_deficit(RHO_1) == pytest.approx(0.5)
    assert purity_deficit(RHO_2) == pytest.approx(0.0, abs=1e-15)
    assert purity_deficit(DensityMatrix(np.diag([0.9, 0.1]))) == pytest.approx(0.18)


def test_renyi_entropy_values():
    assert renyi_entropy(basis_state(3, 1)) == pytest.approx(0.0, abs=1e-15)
    assert renyi_entropy(RHO_1) == pytest.approx(math.log(2))
    assert renyi_entropy(DensityMatrix(np.diag([0.5, 0.25, 0.25]))) == pytest.approx(-math.log(3 / 8))


def test_renyi_entropy_clips_drifted_purity():
    # Slightly superunital purity must not give a negative entropy.
    drifted = DensityMatrix(np.diag([1.0 + 5e-10, -5e-10]))
    assert renyi_entropy(drifted) == 0.0
    assert purity_deficit(drifted) < 0.0  # raw value stays unclipped


def test_spectrum_of_coherent_superposition():
    spec = spectrum(RHO_2)
    np.testing.assert_allclose(spec.eigenvalues, [1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(spec.eigenvectors[:, 0], [2**-0.5, 2**-0.5], atol=1e-15)


def test_spectrum_of_diagonal_state():
    spec = spectrum(DensityMatrix(np.diag([0.2, 0.5, 0.3])))
    np.testing.assert_allclose(spec.eigenvalues, [0.5, 0.3, 0.2])
    np.testing.assert_allclose(np.abs(spec.eigenvectors), np.eye(3)[:, [1, 2, 0]], atol=1e-15)


def test_spectrum_rejects_non_hermitian():
    with pytest.raises(ValueError, match="Hermiticity"):
        spectrum(DensityMatrix([[0.5, 1.0], [0.0, 0.5]]))


def test_spectrum_reconstruction_roundtrip():
    rng = np.random.default_rng(11)
    for dim in (2, 3, 5, 8):
        rho = random_state(rng, dim)
        spec = spectrum(rho)
        assert abs(np.sum(spec.eigenvalues) - 1.0) < 1e-12
        np.testing.assert_allclose(reconstruct(spec).entries, rho.entries, atol=1e-10)


def test_spectrum_phase_fix_is_deterministic():
    rng = np.random.default_rng(3)
    rho = random_state(rng, 4)
    a = spectrum(rho)
    b = spectrum(rho)
    np.testing.assert_array_equal(a.eigenvectors, b.eigenvectors)
    for k in range(4):
        i = np.argmax(np.abs(a.eigenvectors[:, k]))
        assert a.eigenvectors[i, k].imag == pytest.approx(0.0, abs=1e-14)
        assert a.eigenvectors[i, k].real > 0


def test_from_statevector_matches_outer_products():
    np.testing.assert_allclose(from_statevector([2**-0.5, 2**-0.5]).entries, RHO_2.entries)
    np.testing.assert_allclose(from_statevector([1.0, 0.0]).entries, np.diag([1.0, 0.0]))
    np.testing.assert_allclose(
        from_statevector([2**-0.5, 1j * 2**-0.5]).entries,
        [[0.5, -0.5j], [0.5j, 0.5]],
    )


def test_from_statevector_rejects_unnormalized():
    with pytest.raises(ValueError, match="normalized"):
        from_statevector([1.0, 1.0])


def test_from_statevector_is_pure():
    rng = np.random.default_rng(5)
    c = rng.normal(size=6) + 1j * rng.normal(size=6)
    c /= np.linalg.norm(c)
    rho = from_statevector(c)
    assert purity_deficit(rho) == pytest.approx(0.0, abs=1e-14)


def test_purity_bounds_and_entropy_identity():
    rng = np.random.default_rng(7)
    for _ in range(50):
        dim = int(rng.integers(2, 7))
        rho = random_state(rng, dim)
        deficit = purity_deficit(rho)
        assert -1e-12 <= deficit <= 1 - 1 / dim + 1e-12
        assert renyi_entropy(rho) == pytest.approx(-math.log(1 - deficit), abs=1e-12)


def test_rank_one_top_eigenvector_regenerates_projector():
    rng = np.random.default_rng(13)
    for _ in range(20):
        c = rng.normal(size=3) + 1j * rng.normal(size=3)
        c /= np.linalg.norm(c)
        rho = from_statevector(c)
        top = spectrum(rho).eigenvectors[:, 0]
        np.testing.assert_allclose(np.outer(top, top.conj()), rho.entries, atol=1e-12)


def test_maximally_mixed_has_max_deficit():
    assert purity_deficit(maximally_mixed(4)) == pytest.approx(0.75)


def test_density_matrix_structure_checks():
    with pytest.raises(ValueError, match="square"):
        DensityMatrix(np.zeros((2, 3)))
    with pytest.raises(ValueError, match="finite"):
        DensityMatrix([[np.inf, 0.0], [0.0, 1.0]])


def test_entries_are_immutable():
    with pytest.raises(ValueError):
        RHO_1.entries[0, 0] = 2.0

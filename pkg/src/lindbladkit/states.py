"""Density matrices, validation, spectral analysis and purity/entropy measures."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_TOL = 1e-9


def _as_complex_matrix(entries) -> np.ndarray:
    mat = np.asarray(entries, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {mat.shape}")
    if mat.shape[0] < 1:
        raise ValueError("density matrix must have dimension >= 1")
    if not np.all(np.isfinite(mat)):
        raise ValueError("density matrix entries must be finite")
    return np.ascontiguousarray(mat)


@dataclass(frozen=True)
class DensityMatrix:
    """N x N complex state operator.

    Construction only checks structure (square, finite). Physical invariants
    (Hermiticity, unit trace, positivity) are checked by :func:`validate`, so
    that slightly drifted states coming out of an integrator can still be
    represented and inspected.
    """

    entries: np.ndarray

    def __post_init__(self):
        mat = _as_complex_matrix(self.entries)
        mat.setflags(write=False)
        object.__setattr__(self, "entries", mat)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def population(self, n: int) -> float:
        """Occupation of basis level ``n`` (0-based), Re(rho_nn)."""
        return float(self.entries[n, n].real)

    def populations(self) -> np.ndarray:
        return np.diag(self.entries).real.copy()

    def coherence(self, n: int, m: int) -> complex:
        return complex(self.entries[n, m])


def maximally_mixed(dim: int) -> DensityMatrix:
    """The identity/N state, the unique maximum-entropy state."""
    return DensityMatrix(np.eye(dim) / dim)


def basis_state(dim: int, level: int) -> DensityMatrix:
    """Projector onto a single basis level (0-based)."""
    mat = np.zeros((dim, dim), dtype=complex)
    mat[level, level] = 1.0
    return DensityMatrix(mat)


def from_statevector(coeffs, tol: float = DEFAULT_TOL) -> DensityMatrix:
    """Rank-1 projector |psi><psi| built from amplitudes on the energy basis.

    Raises ValueError if the amplitudes are not normalized within ``tol``.
    """
    c = np.asarray(coeffs, dtype=complex).ravel()
    norm2 = float(np.vdot(c, c).real)
    if abs(norm2 - 1.0) > tol:
        raise ValueError(f"statevector not normalized: sum |c_n|^2 = {norm2!r}")
    return DensityMatrix(np.outer(c, c.conj()))


@dataclass(frozen=True)
class ValidationReport:
    """Measured defects of a candidate density matrix against a tolerance."""

    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float
    tol: float

    @property
    def passed(self) -> bool:
        return (
            self.hermiticity_defect <= self.tol
            and self.trace_defect <= self.tol
            and self.min_eigenvalue >= -self.tol
        )


def validate(rho: DensityMatrix, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Report Hermiticity defect, trace defect and minimum eigenvalue.

    The minimum eigenvalue is computed on the Hermitian part (rho + rho†)/2,
    which coincides with the spectrum whenever the Hermiticity check passes.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    mat = rho.entries
    herm_defect = float(np.max(np.abs(mat - mat.conj().T)))
    trace_defect = float(abs(np.trace(mat) - 1.0))
    herm_part = 0.5 * (mat + mat.conj().T)
    min_eig = float(np.linalg.eigvalsh(herm_part)[0])
    return ValidationReport(herm_defect, trace_defect, min_eig, tol)


def purity_deficit(rho: DensityMatrix) -> float:
    """1 - Tr[rho^2]; zero exactly on pure states, 1 - 1/N on the maximally mixed one."""
    mat = rho.entries
    return float(1.0 - np.trace(mat @ mat).real)


def renyi_entropy(rho: DensityMatrix) -> float:
    """-log Tr[rho^2] (natural log), the order-2 entropy of the state.

    Tr[rho^2] is clipped into (0, 1] for the log only, so small positive
    integrator drift cannot produce a spurious negative entropy. The stored
    state is never altered.
    """
    p2 = 1.0 - purity_deficit(rho)
    p2 = min(max(p2, np.finfo(float).tiny), 1.0)
    return float(-np.log(p2))


@dataclass(frozen=True)
class StateSpectrum:
    """Eigendecomposition of a state: ensemble weights plus orthonormal vectors.

    ``eigenvalues`` are sorted descending; ``eigenvectors[:, k]`` belongs to
    ``eigenvalues[k]``. Each vector's global phase is fixed by making its
    largest-magnitude component real and positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)


def spectrum(rho: DensityMatrix, tol: float = DEFAULT_TOL) -> StateSpectrum:
    """Hermitian eigendecomposition of a valid state.

    Raises ValueError on non-Hermitian input (defect beyond ``tol``).
    """
    mat = rho.entries
    herm_defect = float(np.max(np.abs(mat - mat.conj().T)))
    if herm_defect > tol:
        raise ValueError(f"cannot diagonalize: Hermiticity defect {herm_defect:g} > {tol:g}")
    vals, vecs = np.linalg.eigh(0.5 * (mat + mat.conj().T))
    order = np.argsort(vals)[::-1]
    vals = vals[order]
    vecs = vecs[:, order]
    for k in range(vecs.shape[1]):
        i = int(np.argmax(np.abs(vecs[:, k])))
        pivot = vecs[i, k]
        if abs(pivot) > 0:
            vecs[:, k] *= np.conj(pivot) / abs(pivot)
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return StateSpectrum(vals, vecs)


def reconstruct(spec: StateSpectrum) -> DensityMatrix:
    """Rebuild sum_n w_n |v_n><v_n| from a spectrum."""
    vecs = spec.eigenvectors
    mat = (vecs * spec.eigenvalues) @ vecs.conj().T
    return DensityMatrix(mat)

"""Vectorized states and N^2 x N^2 superoperators.

Vectorization is row-major: |rho> = [rho_11, rho_12, ..., rho_NN]. In that
ordering vec(A X B) = (A kron B^T) vec(X), so the commutator superoperator of
a Hamiltonian H is H kron I - I kron H^T. The equation of motion is

    d|rho>/dt = -i [L0 + sum_m f_m L_m + i LD] |rho>

i.e. the full generator is G(f) = -i (L0 + sum_m f_m L_m) + LD.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import ControlSystem, RateModel
from .states import DensityMatrix

SUPPORT_TOL = 1e-12


@dataclass(frozen=True)
class VectorizedState:
    """Row-major flattening of a density matrix."""

    dim: int
    v: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.v, dtype=complex).ravel()
        if vec.shape[0] != self.dim * self.dim:
            raise ValueError(f"vector length {vec.shape[0]} != dim^2 = {self.dim ** 2}")
        vec.setflags(write=False)
        object.__setattr__(self, "v", vec)


def vectorize(rho: DensityMatrix) -> VectorizedState:
    return VectorizedState(rho.dim, rho.entries.reshape(-1))


def devectorize(state: VectorizedState) -> DensityMatrix:
    return DensityMatrix(state.v.reshape(state.dim, state.dim))


def commutator_superop(h: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> [H, rho] in row-major vectorization."""
    h = np.asarray(h, dtype=complex)
    eye = np.eye(h.shape[0])
    return np.kron(h, eye) - np.kron(eye, h.T)


def dissipator_superop(model: RateModel) -> np.ndarray:
    """Matrix of the rate-model dissipator: elements (kn,kn) = -Gamma_kn,
    (nn,kk) = +gamma_nk and (nn,nn) = -sum_k gamma_kn."""
    n = model.dim
    ld = np.zeros((n * n, n * n), dtype=complex)
    out_rates = model.gamma.sum(axis=0)

    def idx(a: int, b: int) -> int:
        return a * n + b

    for k in range(n):
        for m in range(n):
            if k != m:
                ld[idx(k, m), idx(k, m)] = -model.big_gamma[k, m]
    for k in range(n):
        ld[idx(k, k), idx(k, k)] = -out_rates[k]
        for m in range(n):
            if m != k:
                ld[idx(k, k), idx(m, m)] += model.gamma[k, m]
    return ld


@dataclass(frozen=True)
class Liouvillian:
    """Drift, control and dissipative superoperators of one system."""

    dim: int
    l0: np.ndarray
    controls: tuple[np.ndarray, ...]
    ld: np.ndarray

    @property
    def num_controls(self) -> int:
        return len(self.controls)

    def generator(self, fields) -> np.ndarray:
        """G(f) = -i (L0 + sum_m f_m L_m) + LD."""
        f = np.asarray(fields, dtype=float).ravel()
        if f.shape[0] != self.num_controls:
            raise ValueError(f"expected {self.num_controls} field values, got {f.shape[0]}")
        acc = self.l0.astype(complex).copy()
        for fm, lm in zip(f, self.controls):
            acc += fm * lm
        return -1j * acc + self.ld

    def trace_functional(self) -> np.ndarray:
        """Row vector selecting the populations; a left null vector of G(f)."""
        w = np.zeros(self.dim * self.dim)
        w[:: self.dim + 1] = 1.0
        return w


def build_liouvillian(sys: ControlSystem, model: RateModel | None = None) -> Liouvillian:
    """Assemble L0, L1..LM and LD for a control system and optional rate model."""
    n = sys.dim
    if model is None:
        model = RateModel.zeros(n)
    if model.dim != n:
        raise ValueError(f"rate model dim {model.dim} != system dim {n}")
    l0 = commutator_superop(sys.h0)
    controls = tuple(commutator_superop(h) for h in sys.controls)
    ld = dissipator_superop(model)
    for arr in (l0, *controls, ld):
        arr.setflags(write=False)
    return Liouvillian(n, l0, controls, ld)


@dataclass(frozen=True)
class SupportReport:
    """Whether control and dissipative superoperators act on disjoint entries."""

    disjoint: bool
    overlapping_entries: tuple[tuple[int, int], ...]


def support_disjointness(liou: Liouvillian, tol: float = SUPPORT_TOL) -> SupportReport:
    """Scan for positions where some L_m and LD are both nonzero.

    Disjoint supports mean no choice of control fields can cancel the
    dissipative term entry by entry.
    """
    control_support = np.zeros(liou.l0.shape, dtype=bool)
    for lm in liou.controls:
        control_support |= np.abs(lm) > tol
    ld_support = np.abs(liou.ld) > tol
    overlap = control_support & ld_support
    entries = tuple((int(i), int(j)) for i, j in zip(*np.nonzero(overlap)))
    return SupportReport(len(entries) == 0, entries)


def cancellation_residual(liou: Liouvillian, rho: DensityMatrix) -> float:
    """min over real fields f of || sum_m f_m L_m |rho> + i LD |rho> ||_2.

    Solved as a real-stacked linear least-squares problem; strictly positive
    whenever the dissipative push on rho has a component outside the span of
    the control directions.
    """
    if liou.num_controls < 1:
        raise ValueError("needs at least one control")
    vec = vectorize(rho).v
    cols = [lm @ vec for lm in liou.controls]
    a = np.column_stack(cols)
    b = 1j * (liou.ld @ vec)
    a_real = np.vstack([a.real, a.imag])
    b_real = np.concatenate([b.real, b.imag])
    f, *_ = np.linalg.lstsq(a_real, -b_real, rcond=None)
    return float(np.linalg.norm(a @ f + b))

"""Hamiltonian structure and dissipation channels.

Dissipation is carried in two interchangeable forms: a rate model
(population-relaxation matrix gamma plus pairwise dephasing matrix Gamma)
and explicit Lindblad operators. ``rates_to_lindblad`` converts the former
into the latter; the two dissipators then agree entrywise, which the test
suite verifies exhaustively.

Conventions (hbar = 1 throughout):
  - gamma[n, k] is the rate of the incoherent transition |k> -> |n>, i.e. it
    multiplies rho_kk in the gain term of d(rho_nn)/dt.
  - Gamma[k, n] is the total dephasing rate of the coherence rho_kn.
  - Lindblad operators carry units of sqrt(rate).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CompletePositivityError

HERMITICITY_TOL = 1e-12


def _check_hermitian(mat: np.ndarray, name: str, tol: float = HERMITICITY_TOL):
    defect = float(np.max(np.abs(mat - mat.conj().T)))
    if defect > tol:
        raise ValueError(f"{name} is not Hermitian (defect {defect:g})")


@dataclass(frozen=True)
class ControlSystem:
    """Internal Hamiltonian plus M control Hamiltonians with field handles."""

    h0: np.ndarray
    controls: tuple[np.ndarray, ...] = ()
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        h0 = np.asarray(self.h0, dtype=complex)
        if h0.ndim != 2 or h0.shape[0] != h0.shape[1]:
            raise ValueError("h0 must be a square matrix")
        _check_hermitian(h0, "h0")
        h0.setflags(write=False)
        ctrls = []
        for m, h in enumerate(self.controls):
            h = np.asarray(h, dtype=complex)
            if h.shape != h0.shape:
                raise ValueError(f"control {m} shape {h.shape} != h0 shape {h0.shape}")
            _check_hermitian(h, f"control {m}")
            h.setflags(write=False)
            ctrls.append(h)
        labels = tuple(self.labels) if self.labels else tuple(f"f{m + 1}" for m in range(len(ctrls)))
        if len(labels) != len(ctrls):
            raise ValueError("labels length must match number of controls")
        object.__setattr__(self, "h0", h0)
        object.__setattr__(self, "controls", tuple(ctrls))
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.h0.shape[0]

    @property
    def num_controls(self) -> int:
        return len(self.controls)


@dataclass(frozen=True)
class RateModel:
    """Population-relaxation rates gamma and dephasing rates Gamma.

    gamma[n, k]: rate of |k> -> |n>, nonnegative, zero diagonal.
    big_gamma[k, n]: dephasing rate of rho_kn, symmetric, nonnegative, zero diagonal.
    """

    gamma: np.ndarray
    big_gamma: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gamma, dtype=float)
        G = np.asarray(self.big_gamma, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape != G.shape:
            raise ValueError("gamma and big_gamma must be square matrices of equal shape")
        if np.any(g < 0) or np.any(G < 0):
            raise ValueError("rates must be nonnegative")
        if np.any(np.abs(np.diag(g)) > 0) or np.any(np.abs(np.diag(G)) > 0):
            raise ValueError("gamma and big_gamma must have zero diagonal")
        if not np.allclose(G, G.T, atol=0, rtol=0):
            raise ValueError("big_gamma must be symmetric")
        g.setflags(write=False)
        G.setflags(write=False)
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "big_gamma", G)

    @property
    def dim(self) -> int:
        return self.gamma.shape[0]

    @classmethod
    def zeros(cls, dim: int) -> "RateModel":
        return cls(np.zeros((dim, dim)), np.zeros((dim, dim)))

    @classmethod
    def two_level(cls, gamma_12: float = 0.0, gamma_21: float = 0.0, dephasing: float = 0.0) -> "RateModel":
        """Two-level rates: gamma_12 is decay |2> -> |1>, gamma_21 is pumping |1> -> |2>."""
        g = np.array([[0.0, gamma_12], [gamma_21, 0.0]])
        G = np.array([[0.0, dephasing], [dephasing, 0.0]])
        return cls(g, G)


@dataclass(frozen=True)
class LindbladChannels:
    """Explicit dissipation operators V_s; an empty list is a closed system."""

    ops: tuple[np.ndarray, ...] = ()

    def __post_init__(self):
        cleaned = []
        for s, v in enumerate(self.ops):
            v = np.asarray(v, dtype=complex)
            if v.ndim != 2 or v.shape[0] != v.shape[1]:
                raise ValueError(f"channel {s} must be a square matrix")
            if not np.all(np.isfinite(v)):
                raise ValueError(f"channel {s} has non-finite entries")
            v.setflags(write=False)
            cleaned.append(v)
        object.__setattr__(self, "ops", tuple(cleaned))


@dataclass(frozen=True)
class TwoLevelSystem:
    """Energies and dipole moments of a driven two-level system (hbar = 1)."""

    e1: float
    e2: float
    d1: float = 1.0
    d2: float = 1.0

    def __post_init__(self):
        if not self.e1 < self.e2:
            raise ValueError("requires e1 < e2")

    @property
    def omega(self) -> float:
        return self.e2 - self.e1


SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def standard_two_level(sys: TwoLevelSystem) -> ControlSystem:
    """H0 = diag(E1, E2) with sigma_x and sigma_y couplings scaled by the dipoles."""
    h0 = np.diag([sys.e1, sys.e2]).astype(complex)
    return ControlSystem(h0, (sys.d1 * SIGMA_X, sys.d2 * SIGMA_Y))


def total_hamiltonian(sys: ControlSystem, fields) -> np.ndarray:
    """H0 + sum_m f_m H_m for a concrete field vector."""
    f = np.asarray(fields, dtype=float).ravel()
    if f.shape[0] != sys.num_controls:
        raise ValueError(f"expected {sys.num_controls} field values, got {f.shape[0]}")
    h = sys.h0.astype(complex).copy()
    for fm, hm in zip(f, sys.controls):
        h += fm * hm
    return h


def dissipator_rates(model: RateModel, rho) -> np.ndarray:
    """Dissipator action in the rate-model form.

    Diagonal: gain/loss balance sum_k [gamma_nk rho_kk - gamma_kn rho_nn].
    Off-diagonal: -Gamma_kn rho_kn. Accepts a DensityMatrix or a bare array.
    """
    mat = np.asarray(getattr(rho, "entries", rho), dtype=complex)
    if mat.shape != model.gamma.shape:
        raise ValueError(f"state shape {mat.shape} does not match rate model dim {model.dim}")
    pops = np.diag(mat)
    gain = model.gamma @ pops
    loss = model.gamma.sum(axis=0) * pops
    out = -model.big_gamma * mat
    np.fill_diagonal(out, gain - loss)
    return out


def dissipator_lindblad(channels: LindbladChannels, rho) -> np.ndarray:
    """(1/2) sum_s ([V_s rho, V_s†] + [V_s, rho V_s†])."""
    mat = np.asarray(getattr(rho, "entries", rho), dtype=complex)
    out = np.zeros_like(mat)
    for v in channels.ops:
        if v.shape != mat.shape:
            raise ValueError(f"channel shape {v.shape} does not match state shape {mat.shape}")
        vdag = v.conj().T
        vdv = vdag @ v
        out += v @ mat @ vdag - 0.5 * (vdv @ mat + mat @ vdv)
    return out


def induced_dephasing_floor(model: RateModel) -> np.ndarray:
    """Minimum dephasing implied by the decays: Gamma_kn >= (out_k + out_n)/2.

    out_j is the total relaxation rate out of level |j>. For N > 2 this
    pairwise bound is a convention (the two-level case fixes only
    Gamma >= (gamma_12 + gamma_21)/2); it is what makes the jump-operator
    construction in :func:`rates_to_lindblad` exact.
    """
    out_rates = model.gamma.sum(axis=0)
    floor = 0.5 * (out_rates[:, None] + out_rates[None, :])
    np.fill_diagonal(floor, 0.0)
    return floor


def complete_positivity_defect(model: RateModel) -> float:
    """Largest violation of Gamma_kn >= floor_kn; <= 0 means the model is CP-consistent."""
    if model.dim < 2:
        return 0.0
    resid = induced_dephasing_floor(model) - model.big_gamma
    np.fill_diagonal(resid, -np.inf)
    return float(np.max(resid))


def _pure_dephasing_channels(residual: np.ndarray, tol: float) -> list[np.ndarray]:
    """Diagonal operators reproducing pairwise pure-dephasing rates exactly.

    Embeds sqrt(2 R_kn) as Euclidean distances via the classical
    double-centering construction; the Gram factor's eigenvectors give the
    diagonals. By Schoenberg's theorem the embedding exists exactly when the
    dephasing semigroup is completely positive, so a failure here is a CP
    violation, not a limitation of diagonal channels.
    """
    n = residual.shape[0]
    centering = np.eye(n) - np.ones((n, n)) / n
    gram = -centering @ residual @ centering
    vals, vecs = np.linalg.eigh(gram)
    scale = max(1.0, float(np.max(np.abs(residual))))
    if vals[0] < -tol * scale:
        raise CompletePositivityError(
            "pure-dephasing rates are not realizable by any Lindblad channels: "
            f"conditional-negativity defect {-vals[0]:g}"
        )
    ops = []
    for lam, vec in zip(vals, vecs.T):
        if lam > tol * scale:
            ops.append(np.diag(np.sqrt(lam) * vec).astype(complex))
    return ops


def rates_to_lindblad(model: RateModel, tol: float = 1e-12) -> LindbladChannels:
    """Lindblad operators equivalent to a rate model.

    Two-level case: the exact triple (V1 = sqrt(gamma_21)|2><1|,
    V2 = sqrt(gamma_12)|1><2|, V3 = diag(sqrt(2*Gamma~), 0)) with
    Gamma~ = Gamma - (gamma_12 + gamma_21)/2.

    General case: one jump operator sqrt(gamma_nk)|n><k| per decay channel
    plus diagonal operators for whatever pure dephasing remains above the
    decay-induced floor.

    Raises CompletePositivityError when any dephasing rate sits below its
    floor, or (N > 2) when the residual rates violate the conditional
    negativity the Lindblad form requires.
    """
    defect = complete_positivity_defect(model)
    if defect > tol:
        raise CompletePositivityError(
            f"dephasing below decay-induced floor by {defect:g}; the rate model is not completely positive"
        )
    n = model.dim
    if n == 2:
        gamma_21 = model.gamma[1, 0]
        gamma_12 = model.gamma[0, 1]
        tilde = max(model.big_gamma[0, 1] - 0.5 * (gamma_12 + gamma_21), 0.0)
        v1 = np.array([[0.0, 0.0], [np.sqrt(gamma_21), 0.0]], dtype=complex)
        v2 = np.array([[0.0, np.sqrt(gamma_12)], [0.0, 0.0]], dtype=complex)
        v3 = np.diag([np.sqrt(2.0 * tilde), 0.0]).astype(complex)
        return LindbladChannels((v1, v2, v3))
    ops = []
    for dst in range(n):
        for src in range(n):
            rate = model.gamma[dst, src]
            if rate > 0.0:
                v = np.zeros((n, n), dtype=complex)
                v[dst, src] = np.sqrt(rate)
                ops.append(v)
    residual = model.big_gamma - induced_dephasing_floor(model)
    residual = np.where(residual > tol, residual, 0.0)
    if np.any(residual > 0.0):
        ops.extend(_pure_dephasing_channels(residual, tol))
    return LindbladChannels(tuple(ops))

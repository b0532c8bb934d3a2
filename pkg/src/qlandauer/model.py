"""Initial states, Hamiltonians and single-qubit state functionals.

Qubit states are plain ``(..., 2, 2)`` complex arrays in the ordered basis
``{|1>, |0>}``; ``|1>`` is the excited level of the free Hamiltonian
``sigma_z`` (energy +1).  All constructors broadcast over array arguments.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from qlandauer.linalg import hermitian_eig, kron

PSD_TOL = 1e-12

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

# Environment energies in basis order (|1>, |0>).
ENV_ENERGIES = np.array([1.0, -1.0])

H_SYSTEM = kron(SZ, I2)
H_ENV = kron(I2, SZ)
H_FREE = H_SYSTEM + H_ENV

SXX = kron(SX, SX)
SYY = kron(SY, SY)
SZZ = kron(SZ, SZ)


class ModelKind(str, Enum):
    XX = "xx"
    ISING = "ising"
    GENERIC = "generic"


@dataclass(frozen=True)
class InteractionModel:
    """Two-body coupling sum_k J_k sigma^k (x) sigma^k on top of the free part."""

    kind: ModelKind
    jx: float
    jy: float = 0.0
    jz: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        if self.kind is ModelKind.XX and (self.jx != self.jy or self.jz != 0.0):
            raise ValueError("XX model needs jx == jy and jz == 0")
        if self.kind is ModelKind.ISING and (self.jy != 0.0 or self.jz != 0.0):
            raise ValueError("Ising model needs jy == jz == 0")

    @classmethod
    def xx(cls, j):
        return cls(ModelKind.XX, j, j, 0.0)

    @classmethod
    def ising(cls, j):
        return cls(ModelKind.ISING, j, 0.0, 0.0)

    @classmethod
    def generic(cls, jx, jy, jz):
        return cls(ModelKind.GENERIC, jx, jy, jz)

    @classmethod
    def from_kind(cls, kind, j, jy=None, jz=None):
        """Build from a kind tag and a single coupling (generic: j, jy, jz)."""
        kind = ModelKind(kind)
        if kind is ModelKind.XX:
            return cls.xx(j)
        if kind is ModelKind.ISING:
            return cls.ising(j)
        return cls.generic(j, j if jy is None else jy, j if jz is None else jz)

    @property
    def couplings(self):
        return (self.jx, self.jy, self.jz)

    @property
    def coupling(self):
        """Characteristic coupling J (used for the XX swap time)."""
        return self.jx

    def swap_time(self):
        if self.kind is not ModelKind.XX:
            raise ValueError("swap time is only defined for the XX model")
        if self.jx == 0:
            raise ValueError("swap time undefined for J = 0")
        return np.pi / (4.0 * abs(self.jx))

    def period(self):
        """Period of the XX population dynamics, pi / (2J)."""
        return 2.0 * self.swap_time()


@dataclass(frozen=True)
class SystemStateParams:
    alpha_sq: float
    w: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.alpha_sq <= 1.0:
            raise ValueError(f"alpha_sq must lie in [0, 1], got {self.alpha_sq}")
        if not 0.0 <= self.w <= 1.0:
            raise ValueError(f"w must lie in [0, 1], got {self.w}")

    @classmethod
    def from_delta(cls, alpha_sq, delta):
        """Parameterize by the coherence delta instead of the fraction w."""
        if not 0.0 <= alpha_sq <= 1.0:
            raise ValueError(f"alpha_sq must lie in [0, 1], got {alpha_sq}")
        cap = max_coherence(alpha_sq)
        if delta < 0.0 or delta > cap + 1e-15:
            raise ValueError(f"delta must lie in [0, {cap:.6g}] for alpha_sq={alpha_sq}, got {delta}")
        w = 0.0 if cap == 0.0 else min(delta / cap, 1.0)
        return cls(alpha_sq, w)

    @property
    def delta(self):
        return coherence(self.alpha_sq, self.w)

    @property
    def v_z(self):
        return 1.0 - 2.0 * self.alpha_sq

    @property
    def v_norm(self):
        return float(np.hypot(2.0 * self.delta, self.v_z))

    def state(self):
        return system_state(self.alpha_sq, self.w)


@dataclass(frozen=True)
class EnvironmentParams:
    beta: float

    def __post_init__(self):
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise ValueError(f"beta must be finite and > 0, got {self.beta}")

    @property
    def partition_function(self):
        return 2.0 * np.cosh(self.beta)

    def state(self):
        return thermal_state(self.beta)


def max_coherence(alpha_sq):
    """Largest admissible delta, alpha * sqrt(1 - alpha^2)."""
    alpha_sq = np.asarray(alpha_sq, dtype=float)
    out = np.sqrt(np.clip(alpha_sq * (1.0 - alpha_sq), 0.0, None))
    return float(out) if out.ndim == 0 else out


def coherence(alpha_sq, w):
    out = np.asarray(w, dtype=float) * max_coherence(alpha_sq)
    return float(out) if out.ndim == 0 else out


def system_state(alpha_sq, w=0.0):
    """[[1 - a2, d], [d, a2]] with d = w * sqrt(a2 (1 - a2))."""
    a2 = np.asarray(alpha_sq, dtype=float)
    w = np.asarray(w, dtype=float)
    if np.any((a2 < 0) | (a2 > 1)):
        raise ValueError("alpha_sq must lie in [0, 1]")
    if np.any((w < 0) | (w > 1)):
        raise ValueError("w must lie in [0, 1]")
    a2, w = np.broadcast_arrays(a2, w)
    d = w * np.sqrt(a2 * (1.0 - a2))
    rho = np.empty(a2.shape + (2, 2), dtype=complex)
    rho[..., 0, 0] = 1.0 - a2
    rho[..., 0, 1] = d
    rho[..., 1, 0] = d
    rho[..., 1, 1] = a2
    return rho


def thermal_populations(beta):
    """(p_excited, p_ground) = (e^-b, e^b) / 2cosh(b), computed without overflow."""
    beta = np.asarray(beta, dtype=float)
    if np.any(~(beta > 0)) or np.any(~np.isfinite(beta)):
        raise ValueError("beta must be finite and > 0")
    x = np.exp(-2.0 * beta)
    p_exc = x / (1.0 + x)
    p_gnd = 1.0 / (1.0 + x)
    return p_exc, p_gnd


def thermal_state(beta):
    p_exc, p_gnd = thermal_populations(beta)
    rho = np.zeros(np.shape(p_exc) + (2, 2), dtype=complex)
    rho[..., 0, 0] = p_exc
    rho[..., 1, 1] = p_gnd
    return rho


def ground_state():
    """Zero-temperature limit of the thermal state, |0><0|."""
    return np.diag([0.0, 1.0]).astype(complex)


def excited_state():
    return np.diag([1.0, 0.0]).astype(complex)


def hamiltonian_from_couplings(jx, jy=0.0, jz=0.0):
    """sz(x)I + I(x)sz + sum_k J_k sk(x)sk; broadcasts over coupling arrays."""
    jx, jy, jz = np.broadcast_arrays(*(np.asarray(j, dtype=float) for j in (jx, jy, jz)))
    return (
        H_FREE
        + jx[..., None, None] * SXX
        + jy[..., None, None] * SYY
        + jz[..., None, None] * SZZ
    )


def total_hamiltonian(model):
    return hamiltonian_from_couplings(*model.couplings)


def interaction_hamiltonian(model):
    return total_hamiltonian(model) - H_FREE


def _clamped_spectrum(rho):
    lam = hermitian_eig(rho).eigenvalues
    if np.any(lam < -PSD_TOL):
        raise ValueError(f"state has eigenvalue {lam.min():.3e} < -{PSD_TOL}")
    return np.clip(lam, 0.0, 1.0)


def von_neumann_entropy(rho):
    """-sum lam ln lam in nats, with 0 ln 0 = 0."""
    lam = _clamped_spectrum(rho)
    terms = np.where(lam > 0, -lam * np.log(np.where(lam > 0, lam, 1.0)), 0.0)
    out = terms.sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def linear_entropy(rho):
    rho = np.asarray(rho, dtype=complex)
    purity = np.sum(np.abs(rho) ** 2, axis=(-2, -1))
    out = 2.0 * (1.0 - purity)
    return float(out) if np.ndim(out) == 0 else out


def bloch_vector(rho):
    """(vx, vy, vz) with rho = (1 + v.sigma) / 2; excited |1> maps to vz = +1."""
    rho = np.asarray(rho, dtype=complex)
    r01 = rho[..., 0, 1]
    return np.stack(
        [2.0 * r01.real, -2.0 * r01.imag, (rho[..., 0, 0] - rho[..., 1, 1]).real],
        axis=-1,
    )


def from_bloch(v):
    v = np.asarray(v, dtype=float)
    if np.any(np.linalg.norm(v, axis=-1) > 1.0 + 1e-12):
        raise ValueError("Bloch vector longer than 1")
    return 0.5 * (
        I2 + v[..., 0, None, None] * SX + v[..., 1, None, None] * SY + v[..., 2, None, None] * SZ
    )

"""Exact unitary dynamics and the three heat quantities.

For a system qubit coupled to a thermal environment qubit, this module
evaluates

* ``beta_q``   - beta times the heat dissipated into the environment,
* ``delta_s``  - the entropy-change (Landauer) bound S(rho_S(0)) - S(rho_S(t)),
* ``thermo_b`` - the fluctuation-relation bound -ln <exp(-beta Q)>, with the
  average taken over the two-point measurement of the environment energy.

The vectorised core is :func:`evaluate`, which takes precomputed joint
propagators so coupling- or time-sweeps only diagonalise each Hamiltonian once.
"""

from dataclasses import dataclass

import numpy as np

from qlandauer.linalg import dagger, hermitian_eig, kron, partial_trace, propagator
from qlandauer.model import (
    I2,
    SZ,
    ModelKind,
    thermal_populations,
    thermal_state,
    total_hamiltonian,
    von_neumann_entropy,
)

PSD_TOL = 1e-12
PSD_HARD_TOL = 1e-9
KRAUS_TOL = 1e-12
DEFAULT_POINTS_PER_PERIOD = 400
DEFAULT_WINDOW_POINTS = 400


@dataclass(frozen=True)
class BoundsRecord:
    """beta<Q>, Delta S and B at one time (fields may also be equal-shape arrays)."""

    t: float
    beta_q: float
    delta_s: float
    thermo_b: float

    def rows(self):
        cols = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in
                                     (self.t, self.beta_q, self.delta_s, self.thermo_b)))
        return np.stack([c.ravel() for c in cols], axis=-1)


@dataclass(frozen=True)
class KrausSet:
    """Kraus operators M[nu, mu] = sqrt(p_mu) <nu|U|mu> of the reduced system map.

    ``operators`` has shape ``(2, 2, 2, 2)``: final environment level ``nu``,
    initial level ``mu``, then the 2x2 system operator.
    """

    operators: np.ndarray

    def __iter__(self):
        return iter(self.operators.reshape(-1, 2, 2))

    def __len__(self):
        return 4

    def completeness(self):
        m = self.operators
        return np.einsum("nmji,nmjk->ik", m.conj(), m)

    def completeness_error(self):
        return float(np.max(np.abs(self.completeness() - I2)))

    def apply(self, rho):
        m = self.operators
        return np.einsum("nmij,...jk,nmlk->...il", m, rho, m.conj())


def joint_propagator(model, t):
    return propagator(total_hamiltonian(model), t)


def _enforce_psd(rho):
    """Clamp tiny negative eigenvalues of evolved states; reject genuine violations."""
    eig = hermitian_eig(0.5 * (rho + dagger(rho)))
    lam = eig.eigenvalues
    lo = lam.min(axis=-1)
    if np.any(lo < -PSD_HARD_TOL):
        raise ValueError(f"evolved state has eigenvalue {lo.min():.3e}")
    bad = lo < -PSD_TOL
    if not np.any(bad):
        return rho
    clamped = np.clip(lam, 0.0, None)
    clamped /= clamped.sum(axis=-1, keepdims=True)
    v = eig.eigenvectors
    fixed = (v * clamped[..., None, :]) @ dagger(v)
    return np.where(bad[..., None, None], fixed, rho)


def evolve_with(u, sys, env, check=True):
    rho0 = kron(sys, env)
    rho_t = u @ rho0 @ dagger(u)
    return _enforce_psd(rho_t) if check else rho_t


def evolve(model, sys, env, t, check=True):
    """rho(t) = U (rho_S (x) rho_E) U^dagger for the model's total Hamiltonian."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be >= 0")
    return evolve_with(joint_propagator(model, t), sys, env, check=check)


def _energy(rho):
    return np.real(np.einsum("ij,...ji->...", SZ, rho))


def raw_heat(env0, rho_t):
    """<Q> = Tr[H_E (rho_E(t) - rho_E(0))] without the beta prefactor."""
    rho_e = partial_trace(rho_t, "E")
    return _energy(rho_e) - _energy(env0)


def dissipated_heat(env0, rho_t, beta):
    return np.asarray(beta) * raw_heat(env0, rho_t)


def entropic_bound(sys0, rho_t):
    return von_neumann_entropy(sys0) - von_neumann_entropy(partial_trace(rho_t, "S"))


def _tpm_average(u, sys0, beta):
    """<exp(-beta Q)> = sum_{nu,mu} p_nu Tr[<nu|U|mu> rho_S <mu|U^+|nu>].

    The thermal weight sits on the final environment level nu: the initial
    weight p_mu cancels against exp(+beta E_mu) from the heat exponent.
    """
    u4 = u.reshape(u.shape[:-2] + (2, 2, 2, 2))  # [s', nu, s, mu]
    per_nu = np.einsum("...anbm,...bc,...ancm->...n", u4, sys0, u4.conj()).real
    p_exc, p_gnd = thermal_populations(beta)
    return per_nu[..., 0] * p_exc + per_nu[..., 1] * p_gnd


def _tpm_bound(u, sys0, beta):
    avg = _tpm_average(u, sys0, beta)
    if np.any(avg <= 0):
        raise FloatingPointError("non-positive fluctuation average; state or propagator corrupted")
    return -np.log(avg)


def thermodynamic_bound(model, sys0, beta, t):
    return _tpm_bound(joint_propagator(model, t), sys0, beta)


def kraus_set(model, beta, t):
    u = np.asarray(joint_propagator(model, t))
    if u.ndim != 2:
        raise ValueError("kraus_set takes a scalar time")
    u4 = u.reshape(2, 2, 2, 2)
    p = np.array(thermal_populations(beta), dtype=float)
    ops = np.sqrt(p)[None, :, None, None] * np.transpose(u4, (1, 3, 0, 2))
    ks = KrausSet(ops)
    err = ks.completeness_error()
    if err > KRAUS_TOL:
        raise ValueError(f"Kraus completeness violated by {err:.3e}")
    return ks


def evaluate(u, sys0, beta, check=True):
    """(beta_q, delta_s, thermo_b) for precomputed propagators.

    ``u``, ``sys0`` and ``beta`` broadcast against each other over leading
    batch dimensions.
    """
    beta = np.asarray(beta, dtype=float)
    env0 = thermal_state(beta)
    rho_t = evolve_with(u, sys0, env0, check=check)
    beta_q = beta * raw_heat(env0, rho_t)
    delta_s = entropic_bound(sys0, rho_t)
    thermo_b = _tpm_bound(u, sys0, beta)
    return beta_q, delta_s, thermo_b


def bounds_at(model, sys0, beta, t):
    beta_q, delta_s, thermo_b = evaluate(joint_propagator(model, t), sys0, beta)
    return BoundsRecord(t, float(beta_q), float(delta_s), float(thermo_b))


def default_times(model, t_max=None, steps=None):
    """Uniform time grid; for XX the default density is 400 points per period."""
    if t_max is None:
        t_max = 2.0 * np.pi
    if steps is None:
        if model.kind is ModelKind.XX and model.jx != 0:
            steps = int(np.ceil(t_max / model.period() * DEFAULT_POINTS_PER_PERIOD)) + 1
        else:
            steps = DEFAULT_WINDOW_POINTS
    return np.linspace(0.0, t_max, steps)


def bounds_series(model, sys0, beta, times):
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise ValueError("times must be >= 0")
    beta_q, delta_s, thermo_b = evaluate(joint_propagator(model, times), sys0, beta)
    return BoundsRecord(times, beta_q, delta_s, thermo_b)


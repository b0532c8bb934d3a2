"""Closed-form maxima, Clausius thresholds, boundary curves, region labels
and coupling-averaged bounds."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from qlandauer.engine import evaluate
from qlandauer.linalg import dagger, kron, propagator
from qlandauer.model import (
    H_ENV,
    ModelKind,
    SystemStateParams,
    hamiltonian_from_couplings,
    max_coherence,
    system_state,
    thermal_populations,
    thermal_state,
)

TIE_EPS = 1e-9
BOUNDARY_FTOL = 1e-10
BRACKET_INTERVALS = 64
MAX_BISECTIONS = 200

SHORT_T_EVAL = 100.0
LONG_T_EVAL = 1000.0
DEFAULT_SAMPLES = 500


class RegionLabel(str, Enum):
    NEGATIVE_HEAT = "NegativeHeat"
    BOTH_BOUNDS_NEGATIVE = "BothBoundsNegative"
    THERMO_TIGHTER = "ThermoTighter"
    ENTROPIC_TIGHTER = "EntropicTighter"
    TIE = "Tie"


@dataclass(frozen=True)
class MaxPointResult:
    b_max: float
    ds_max: float
    ds_beta: float
    ds_v: float
    beta_q_max: float


@dataclass(frozen=True)
class AveragedRecord:
    mean_beta_q: float
    mean_ds: float
    mean_b: float
    n_samples: int
    j_max: float
    t_eval: float
    seed: int


@dataclass(frozen=True)
class BoundaryCurve:
    points: np.ndarray  # (k, 2) rows of (alpha_sq, delta)
    missing: np.ndarray  # alpha_sq values with no sign change or no converged root


def _scalar(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def one_minus_tanh(beta):
    x = np.exp(-2.0 * np.asarray(beta, dtype=float))
    return 2.0 * x / (1.0 + x)


def b_max(v_z, beta):
    """-ln[1 - v_z tanh(beta)], written to keep 1 - tanh(beta) exact at large beta."""
    v_z = np.asarray(v_z, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if np.any(np.abs(v_z) > 1.0) or np.any(beta <= 0):
        raise ValueError("need |v_z| <= 1 and beta > 0")
    x = v_z * np.tanh(beta)
    # log1p keeps the sign for tiny v_z; the split form keeps accuracy as x -> 1
    near_one = -np.log((1.0 - v_z) + v_z * one_minus_tanh(beta))
    return _scalar(np.where(np.abs(x) < 0.5, -np.log1p(-x), near_one))


def ds_beta(beta):
    """beta tanh(beta) - ln cosh(beta); rises from 0 to ln 2."""
    beta = np.asarray(beta, dtype=float)
    x = np.exp(-2.0 * beta)
    return _scalar(np.log(2.0) - np.log1p(x) - beta * 2.0 * x / (1.0 + x))


def ds_v(v_norm):
    """ln sqrt(1-|v|^2) + |v| artanh|v|, continuous up to ln 2 at |v| = 1."""
    v = np.clip(np.asarray(v_norm, dtype=float), 0.0, 1.0)
    lo = np.where(v < 1.0, (1.0 - v) * np.log1p(-np.where(v < 1.0, v, 0.0)), 0.0)
    return _scalar(0.5 * ((1.0 + v) * np.log1p(v) + lo))


def ds_max(v_norm, beta):
    """Entropic bound at the swap time, returned as MaxPointResult-style parts."""
    v = np.asarray(v_norm, dtype=float)
    if np.any(v < 0) or np.any(v > 1.0 + 1e-12) or np.any(np.asarray(beta) <= 0):
        raise ValueError("need 0 <= v_norm <= 1 and beta > 0")
    sb = ds_beta(beta)
    sv = ds_v(v)
    return _scalar(np.asarray(sb) - np.asarray(sv)), sb, sv


def beta_q_max(v_z, beta):
    """beta<Q> at the swap time: the environment ends with the system's populations."""
    beta = np.asarray(beta, dtype=float)
    return _scalar(beta * (np.asarray(v_z, dtype=float) + np.tanh(beta)))


def bloch_components(alpha_sq, w):
    a2 = np.asarray(alpha_sq, dtype=float)
    d = np.asarray(w, dtype=float) * max_coherence(a2)
    v_z = 1.0 - 2.0 * a2
    return v_z, np.minimum(np.hypot(2.0 * d, v_z), 1.0)


def max_point(alpha_sq, w, beta):
    v_z, v = bloch_components(alpha_sq, w)
    ds, sb, sv = ds_max(v, beta)
    return MaxPointResult(
        b_max=b_max(v_z, beta), ds_max=ds, ds_beta=sb, ds_v=sv, beta_q_max=beta_q_max(v_z, beta)
    )


def clausius_threshold(kind, beta, j_max=None):
    """Largest alpha^2 with non-negative (averaged) dissipated heat."""
    kind = ModelKind(kind)
    if beta <= 0:
        raise ValueError("beta must be > 0")
    if kind is ModelKind.XX:
        return 0.5 * (1.0 + np.tanh(beta))
    if kind is ModelKind.ISING:
        if j_max is None or j_max <= 0:
            raise ValueError("Ising threshold needs j_max > 0")
        raw = 0.5 * (1.0 + np.tanh(beta) * (j_max / np.arctan(j_max / 2.0) - 1.0))
        return min(raw, 1.0)
    raise ValueError("no closed-form threshold for the generic model; use averaged_clausius_threshold")


# -- region labels ---------------------------------------------------------


def classify_values(beta_q, delta_s, thermo_b, eps=TIE_EPS):
    """Vectorised labelling; returns an array of RegionLabel values (strings)."""
    beta_q, delta_s, thermo_b = np.broadcast_arrays(
        *(np.asarray(x, dtype=float) for x in (beta_q, delta_s, thermo_b))
    )
    conds = [
        beta_q < -eps,
        (delta_s < -eps) & (thermo_b < -eps),
        np.abs(thermo_b - delta_s) <= eps,
        thermo_b > delta_s,
    ]
    choices = [
        RegionLabel.NEGATIVE_HEAT.value,
        RegionLabel.BOTH_BOUNDS_NEGATIVE.value,
        RegionLabel.TIE.value,
        RegionLabel.THERMO_TIGHTER.value,
    ]
    return np.select(conds, choices, default=RegionLabel.ENTROPIC_TIGHTER.value)


def classify(beta_q, delta_s, thermo_b, eps=TIE_EPS):
    return RegionLabel(str(classify_values(beta_q, delta_s, thermo_b, eps)))


def classify_max_point(alpha_sq, w, beta):
    r = max_point(alpha_sq, w, beta)
    return classify(r.beta_q_max, r.ds_max, r.b_max)


def max_point_labels(alpha_sq, w, beta):
    v_z, v = bloch_components(alpha_sq, w)
    ds, _, _ = ds_max(v, beta)
    return classify_values(beta_q_max(v_z, beta), ds, b_max(v_z, beta))


# -- boundary curve --------------------------------------------------------

def boundary_residual(alpha_sq, delta, beta):
    """b_max - ds_max for the state with ground population alpha_sq and coherence delta."""
    v_z = 1.0 - 2.0 * alpha_sq
    v = min(float(np.hypot(2.0 * delta, v_z)), 1.0)
    return b_max(v_z, beta) - ds_max(v, beta)[0]


def _bisect(f, lo, hi, flo):
    mid = 0.5 * (lo + hi)
    fmid = f(mid)
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if abs(fmid) < BOUNDARY_FTOL or mid in (lo, hi):
            break
        if (fmid < 0) == (flo < 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return mid, fmid


def boundary_point(alpha_sq, beta):
    """delta in [0, alpha sqrt(1 - alpha^2)] where b_max = ds_max, or None."""
    cap = max_coherence(alpha_sq)
    f = lambda d: boundary_residual(alpha_sq, d, beta)  # noqa: E731
    grid = np.linspace(0.0, cap, BRACKET_INTERVALS + 1)
    vals = [f(d) for d in grid]
    for d, fd in zip(grid, vals):
        if abs(fd) < BOUNDARY_FTOL:
            return float(d)
    for i in range(BRACKET_INTERVALS):
        if (vals[i] < 0) != (vals[i + 1] < 0):
            root, froot = _bisect(f, grid[i], grid[i + 1], vals[i])
            return float(root) if abs(froot) < BOUNDARY_FTOL else None
    return None


def boundary_curve(beta, alpha_sq_grid):
    if beta <= 0:
        raise ValueError("beta must be > 0")
    grid = np.asarray(alpha_sq_grid, dtype=float)
    if np.any((grid < 0) | (grid > 1)):
        raise ValueError("alpha_sq grid must lie in [0, 1]")
    points, missing = [], []
    for a2 in grid:
        d = boundary_point(float(a2), beta)
        if d is None:
            missing.append(float(a2))
        else:
            points.append((float(a2), d))
    return BoundaryCurve(np.array(points, dtype=float).reshape(-1, 2), np.array(missing))


# -- state grids -----------------------------------------------------------

def admissible_grid(n_alpha, n_delta=None):
    """(alpha_sq, delta) grid points with delta <= alpha sqrt(1 - alpha^2)."""
    n_delta = n_alpha if n_delta is None else n_delta
    a2 = np.linspace(0.0, 1.0, n_alpha)
    d = np.linspace(0.0, 0.5, n_delta)
    A, D = np.meshgrid(a2, d, indexing="ij")
    keep = D <= max_coherence(A) + 1e-15
    return A[keep], D[keep]


def sample_states(n, seed=0):
    """Seeded random states: alpha_sq uniform on [0, 1], delta uniform on its admissible range."""
    rng = np.random.default_rng(seed)
    a2 = rng.random(n)
    d = rng.random(n) * max_coherence(a2)
    return a2, d


def w_from_delta(alpha_sq, delta):
    cap = max_coherence(alpha_sq)
    return np.where(cap > 0, np.minimum(delta / np.where(cap > 0, cap, 1.0), 1.0), 0.0)


# -- coupling averages -----------------------------------------------------

def draw_couplings(kind, j_max, n_samples, seed=0):
    """Per-sample (jx, jy, jz), J uniform on (0, j_max]; generic draws all three."""
    kind = ModelKind(kind)
    if n_samples < 1 or j_max <= 0:
        raise ValueError("need n_samples >= 1 and j_max > 0")
    rng = np.random.default_rng(seed)
    if kind is ModelKind.GENERIC:
        j = j_max * (1.0 - rng.random((n_samples, 3)))
        return j
    j = j_max * (1.0 - rng.random(n_samples))
    zeros = np.zeros_like(j)
    if kind is ModelKind.XX:
        return np.stack([j, j, zeros], axis=-1)
    return np.stack([j, zeros, zeros], axis=-1)


class CouplingEnsemble:
    """Propagators for n sampled couplings at one evaluation time.

    Built once and reused across initial states and temperatures.
    """

    def __init__(self, kind, j_max, n_samples, t_eval, seed=0):
        if t_eval <= 0:
            raise ValueError("t_eval must be > 0")
        self.kind = ModelKind(kind)
        self.j_max = float(j_max)
        self.n_samples = int(n_samples)
        self.t_eval = float(t_eval)
        self.seed = int(seed)
        self.couplings = draw_couplings(kind, j_max, n_samples, seed)
        h = hamiltonian_from_couplings(*self.couplings.T)
        self.propagators = propagator(h, self.t_eval)
        # Unitary U keeps the (PSD) initial spectrum up to this error, so the
        # per-sample eigenvalue check on evolved states can be skipped.
        eye = np.eye(4)
        self.unitarity_error = float(np.max(np.abs(dagger(self.propagators) @ self.propagators - eye)))
        if self.unitarity_error > 1e-12:
            raise FloatingPointError(f"ensemble propagators not unitary ({self.unitarity_error:.2e})")

    def samples(self, sys0, beta):
        """Per-sample (beta_q, delta_s, thermo_b), each of shape (n_samples,)."""
        return evaluate(self.propagators, np.asarray(sys0)[None], beta, check=False)

    def average(self, params, beta):
        if isinstance(params, SystemStateParams):
            params = params.state()
        q, ds, b = self.samples(params, beta)
        return AveragedRecord(
            mean_beta_q=float(np.mean(q)),
            mean_ds=float(np.mean(ds)),
            mean_b=float(np.mean(b)),
            n_samples=self.n_samples,
            j_max=self.j_max,
            t_eval=self.t_eval,
            seed=self.seed,
        )

    def mean_heat(self, sys0, beta):
        """Averaged beta<Q> only (skips the entropy evaluations)."""
        env0 = thermal_state(beta)
        u = self.propagators
        rho_t = u @ kron(np.asarray(sys0)[None], env0) @ dagger(u)
        e_t = np.real(np.einsum("ij,nji->n", H_ENV, rho_t))
        p_exc, p_gnd = thermal_populations(beta)
        return float(beta * (np.mean(e_t) - (p_exc - p_gnd)))

    def averages_for(self, alpha_sq, delta, beta, chunk=64):
        """Mean (beta_q, delta_s, thermo_b) for many states; arrays of len(alpha_sq)."""
        a2 = np.asarray(alpha_sq, dtype=float)
        w = w_from_delta(a2, np.asarray(delta, dtype=float))
        out = np.empty((3, a2.size))
        for start in range(0, a2.size, chunk):
            sl = slice(start, start + chunk)
            sys0 = system_state(a2[sl], w[sl])
            q, ds, b = evaluate(self.propagators[None], sys0[:, None], beta, check=False)
            out[:, sl] = np.stack([q.mean(-1), ds.mean(-1), b.mean(-1)])
        return out


def averaged_bounds(kind, params, beta, j_max, n_samples=DEFAULT_SAMPLES, t_eval=LONG_T_EVAL, seed=0):
    return CouplingEnsemble(kind, j_max, n_samples, t_eval, seed).average(params, beta)


def classify_averaged(kind, alpha_sq, w, beta, j_max, n_samples=DEFAULT_SAMPLES,
                      t_eval=LONG_T_EVAL, seed=0):
    r = averaged_bounds(kind, SystemStateParams(alpha_sq, w), beta, j_max, n_samples, t_eval, seed)
    return classify(r.mean_beta_q, r.mean_ds, r.mean_b)


def averaged_clausius_threshold(kind, beta, j_max, n_samples=10_000, t_eval=LONG_T_EVAL,
                                seed=0, tol=1e-4, ensemble=None):
    """Monte-Carlo counterpart of the closed-form threshold.

    Bisects alpha^2 for the sign change of the coupling-averaged heat; returns
    1.0 when the heat stays non-negative over the whole range.
    """
    ens = ensemble or CouplingEnsemble(kind, j_max, n_samples, t_eval, seed)
    heat = lambda a2: ens.mean_heat(system_state(a2), beta)  # noqa: E731
    lo, hi = 0.0, 1.0
    if heat(hi) >= 0:
        return 1.0
    if heat(lo) < 0:
        return 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if heat(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# -- parallel helpers ------------------------------------------------------

def map_chunks(fn, n, threads=None, chunk=None):
    """Apply ``fn(slice)`` over ``range(n)`` in chunks; results concatenate in index order."""
    threads = threads or 1
    chunk = chunk or max(1, -(-n // (4 * threads)))
    slices = [slice(i, min(i + chunk, n)) for i in range(0, n, chunk)]
    if threads == 1 or len(slices) == 1:
        parts = [fn(s) for s in slices]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(fn, slices))
    return np.concatenate(parts, axis=-1) if parts else np.empty(0)

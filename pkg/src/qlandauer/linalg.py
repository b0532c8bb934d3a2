"""Dense complex linear algebra for 2x2 and 4x4 Hermitian problems.

Every function accepts stacks of matrices with arbitrary leading batch
dimensions, shape ``(..., n, n)`` with ``n`` in ``{2, 4}``.  The basis order
is ``{|1>, |0>}`` for each qubit and ``system (x) environment`` for pairs, so
index ``2*s + e`` addresses the joint basis state ``|s>_S |e>_E``.
"""

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100
NEGLIGIBLE_OFFDIAG = 1e-150

ALLOWED_DIMS = (2, 4)


class ConvergenceError(RuntimeError):
    """Jacobi sweeps hit the iteration cap before the off-diagonal norm vanished."""


@dataclass(frozen=True)
class HermitianEig:
    eigenvalues: np.ndarray  # (..., n) ascending
    eigenvectors: np.ndarray  # (..., n, n) unitary, columns are eigenvectors

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues[..., None, :]) @ dagger(v)


def dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def _as_square(m, dims=ALLOWED_DIMS):
    m = np.asarray(m, dtype=complex)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2] or m.shape[-1] not in dims:
        raise ValueError(f"expected (..., n, n) matrices with n in {dims}, got shape {m.shape}")
    return m


def hermiticity_error(m):
    """Max-abs entrywise distance between ``m`` and its adjoint."""
    m = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(m - dagger(m)), initial=0.0))


def kron(a, b):
    """Kronecker product of two (stacks of) 2x2 matrices."""
    a = _as_square(a, dims=(2,))
    b = _as_square(b, dims=(2,))
    out = np.einsum("...ij,...kl->...ikjl", a, b)
    return out.reshape(out.shape[:-4] + (4, 4))


def commutator(a, b):
    return a @ b - b @ a


def _offdiag_norm(a):
    n = a.shape[-1]
    mask = ~np.eye(n, dtype=bool)
    return np.sqrt(np.sum(np.abs(a[:, mask]) ** 2, axis=-1))


def _rotate(a, v, p, q):
    """One complex Jacobi rotation zeroing a[:, p, q] for every matrix in the stack."""
    app = a[:, p, p].real
    aqq = a[:, q, q].real
    apq = a[:, p, q]
    r = np.abs(apq)
    # entries this small are far below JACOBI_TOL; rotating them risks overflow
    active = r > NEGLIGIBLE_OFFDIAG
    r_safe = np.where(active, r, 1.0)
    phase = np.where(active, apq / r_safe, 1.0)  # e^{i phi}
    theta = (aqq - app) / (2.0 * r_safe)
    sgn = np.where(theta >= 0.0, 1.0, -1.0)
    t = sgn / (np.abs(theta) + np.hypot(theta, 1.0))
    t = np.where(active, t, 0.0)
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c

    # W = diag(1, e^{-i phi}) @ [[c, s], [-s, c]]
    w_pp = c.astype(complex)
    w_pq = s.astype(complex)
    w_qp = -s * np.conj(phase)
    w_qq = c * np.conj(phase)

    # A <- A W (columns), V <- V W
    for m in (a, v):
        cp = m[:, :, p].copy()
        cq = m[:, :, q]
        m[:, :, p] = cp * w_pp[:, None] + cq * w_qp[:, None]
        m[:, :, q] = cp * w_pq[:, None] + cq * w_qq[:, None]
    # A <- W^dagger A (rows)
    rp = a[:, p, :].copy()
    rq = a[:, q, :]
    a[:, p, :] = np.conj(w_pp)[:, None] * rp + np.conj(w_qp)[:, None] * rq
    a[:, q, :] = np.conj(w_pq)[:, None] * rp + np.conj(w_qq)[:, None] * rq

    a[active, p, q] = 0.0
    a[active, q, p] = 0.0


def hermitian_eig(m, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Eigendecomposition of Hermitian matrices by cyclic Jacobi rotations.

    Eigenvalues are returned in ascending order.  Pairs whose
    off-diagonal entry is already zero are left untouched, so structural
    zeros (e.g. conserved-parity blocks) survive exactly in the eigenvectors.

    Raises ValueError for non-Hermitian input and ConvergenceError when the
    sweep cap is reached.
    """
    m = _as_square(m)
    if hermiticity_error(m) > HERMITIAN_TOL:
        raise ValueError(f"matrix is not Hermitian (max |m - m^+| = {hermiticity_error(m):.3e})")
    n = m.shape[-1]
    batch = m.shape[:-2]
    a = (0.5 * (m + dagger(m))).reshape(-1, n, n).copy()
    v = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy()
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]

    for _ in range(max_sweeps):
        if np.all(_offdiag_norm(a) < tol):
            break
        for p, q in pairs:
            _rotate(a, v, p, q)
    else:
        if not np.all(_offdiag_norm(a) < tol):
            raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")

    lam = np.real(np.diagonal(a, axis1=-2, axis2=-1)).copy()
    order = np.argsort(lam, axis=-1, kind="stable")
    lam = np.take_along_axis(lam, order, axis=-1)
    v = np.take_along_axis(v, order[:, None, :], axis=-1)
    return HermitianEig(lam.reshape(batch + (n,)), v.reshape(batch + (n, n)))


def eigvalsh(m):
    return hermitian_eig(m).eigenvalues


def propagator(h, t):
    """U = exp(-i h t) for Hermitian ``h``.

    ``t`` may be a scalar or an array; it broadcasts against the batch
    dimensions of ``h`` (a 1-D time grid with a single ``h`` gives one
    propagator per time).
    """
    eig = hermitian_eig(h)
    t = np.asarray(t, dtype=float)
    lam = eig.eigenvalues
    v = eig.eigenvectors
    phases = np.exp(-1j * lam * t[..., None])
    return (v * phases[..., None, :]) @ dagger(v)


def partial_trace(rho, keep):
    """Reduce a (stack of) 4x4 system-environment state to one qubit.

    ``keep`` is ``"S"`` (trace out the environment) or ``"E"`` (trace out
    the system).
    """
    rho = _as_square(rho, dims=(4,))
    tr = np.trace(rho, axis1=-2, axis2=-1)
    if np.max(np.abs(tr - 1.0), initial=0.0) > TRACE_TOL:
        raise ValueError("partial_trace expects unit-trace states")
    r = rho.reshape(rho.shape[:-2] + (2, 2, 2, 2))
    if keep == "S":
        return np.einsum("...ijkj->...ik", r)
    if keep == "E":
        return np.einsum("...ijil->...jl", r)
    raise ValueError(f"keep must be 'S' or 'E', got {keep!r}")

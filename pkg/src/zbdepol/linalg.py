"""Small dense linear algebra for one- and two-qubit Hermitian matrices.

Everything here works on plain ``numpy`` complex arrays of shape (2, 2) or
(4, 4).  The Hermitian eigensolver is a cyclic complex Jacobi method, which is
exact enough and simple at these sizes; it is the only eigensolver used by the
fidelity code.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
CLIP_TOL = 1e-10  # eigenvalues in [-CLIP_TOL, 0) are round-off
PSD_TOL = 1e-6  # below -PSD_TOL a matrix is genuinely not PSD
JACOBI_TOL = 1e-14
# eigenvalues this small are below the solver's resolution; treated as zero
# when taking square roots, where round-off would otherwise be amplified
RANK_TOL = 1e-14

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (I2, SX, SY, SZ)


class InvalidStateError(ValueError):
    """A matrix or Bloch vector does not describe a physical state."""


class DimensionError(ValueError):
    pass


class NotHermitianError(ValueError):
    pass


class NotPSDError(ValueError):
    pass


def _as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in (2, 4):
        raise DimensionError(f"expected a 2x2 or 4x4 matrix, got shape {m.shape}")
    return m


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def validate_density(rho, tol: float = TRACE_TOL) -> np.ndarray:
    """Return ``rho`` as a complex array, raising if it is not a valid state."""
    rho = _as_matrix(rho)
    if not is_hermitian(rho, tol):
        raise InvalidStateError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise InvalidStateError(f"density matrix trace {np.trace(rho).real!r} != 1")
    lam, _ = hermitian_eig(rho)
    if lam[0] < -CLIP_TOL:
        raise InvalidStateError(f"density matrix has eigenvalue {lam[0]:.3e} < 0")
    return rho


def bloch_to_density(a) -> np.ndarray:
    """Qubit state ``(I + a.sigma)/2`` for a Bloch vector with ``|a| <= 1``."""
    a = np.asarray(a, dtype=float)
    if a.shape != (3,):
        raise DimensionError(f"Bloch vector must have 3 components, got {a.shape}")
    if np.linalg.norm(a) > 1.0 + HERMITIAN_TOL:
        raise InvalidStateError(f"|a| = {np.linalg.norm(a)!r} exceeds 1")
    return 0.5 * (I2 + a[0] * SX + a[1] * SY + a[2] * SZ)


def density_to_bloch(rho) -> np.ndarray:
    rho = _as_matrix(rho)
    if rho.shape != (2, 2):
        raise DimensionError("Bloch vectors exist only for single-qubit states")
    return np.array([np.trace(rho @ s).real for s in (SX, SY, SZ)])


def hermitian_eig(m, tol: float = JACOBI_TOL, max_sweeps: int = 60):
    """Eigen-decomposition of a small Hermitian matrix by cyclic Jacobi sweeps.

    Returns ``(eigenvalues, V)`` with eigenvalues ascending and the columns of
    ``V`` the matching orthonormal eigenvectors, so that ``m @ V == V @ diag``.
    """
    a = _as_matrix(m).copy()
    if not is_hermitian(a, HERMITIAN_TOL * max(1.0, np.max(np.abs(a)))):
        raise NotHermitianError("hermitian_eig requires a Hermitian matrix")
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)

    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2))
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                phase = apq / mag
                app, aqq = a[p, p].real, a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0)) if theta else 1.0
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                # unitary acting on the (p, q) plane: phase removal then rotation
                g = np.eye(n, dtype=complex)
                g[p, p] = c
                g[p, q] = s
                g[q, p] = -s * phase.conjugate()
                g[q, q] = c * phase.conjugate()
                a = g.conj().T @ a @ g
                a[p, q] = a[q, p] = 0.0
                v = v @ g
    else:
        off = np.sqrt(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2))
        if off > 1e3 * tol:
            raise ArithmeticError(f"Jacobi sweeps did not converge (off-norm {off:.2e})")

    lam = np.diag(a).real.copy()
    order = np.argsort(lam, kind="stable")
    return lam[order], v[:, order]


def psd_sqrt(m) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix."""
    lam, v = hermitian_eig(m)
    if lam[0] < -PSD_TOL:
        raise NotPSDError(f"matrix has eigenvalue {lam[0]:.3e}")
    lam = np.where(lam > RANK_TOL, lam, 0.0)
    r = (v * np.sqrt(lam)) @ v.conj().T
    return 0.5 * (r + r.conj().T)


def uhlmann_fidelity(rho, sigma) -> float:
    """Squared Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``."""
    rho = _as_matrix(rho)
    sigma = _as_matrix(sigma)
    if rho.shape != sigma.shape:
        raise DimensionError(f"shape mismatch {rho.shape} vs {sigma.shape}")
    s = psd_sqrt(rho)
    inner = s @ sigma @ s
    lam, _ = hermitian_eig(0.5 * (inner + inner.conj().T))
    if lam[0] < -PSD_TOL:
        raise NotPSDError(f"inner product matrix has eigenvalue {lam[0]:.3e}")
    root_sum = np.sum(np.sqrt(lam[lam > RANK_TOL]))
    return float(root_sum**2)


def tensor(rho_a, rho_b) -> np.ndarray:
    rho_a, rho_b = _as_matrix(rho_a), _as_matrix(rho_b)
    if rho_a.shape != (2, 2) or rho_b.shape != (2, 2):
        raise DimensionError("tensor expects two single-qubit matrices")
    return np.kron(rho_a, rho_b)


def partial_trace(rho, keep: int) -> np.ndarray:
    """Reduced state of qubit ``keep`` (0 or 1) of a two-qubit matrix."""
    r = _as_matrix(rho).reshape(2, 2, 2, 2)
    if keep == 0:
        return np.einsum("ijkj->ik", r)
    if keep == 1:
        return np.einsum("jijk->ik", r)
    raise ValueError("keep must be 0 or 1")


def pure_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())

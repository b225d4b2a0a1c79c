"""Pauli-diagonal qubit channels built from a LambdaVector.

Every Kraus operator of this family is a scaled Pauli matrix, ``K_i = k_i sigma_i``
with ``sigma_0`` the identity, so a channel is stored as the four real
coefficients and matrices are only formed for two-qubit application.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .linalg import PAULIS, CLIP_TOL, PSD_TOL, bloch_to_density, density_to_bloch, validate_density
from .noise import LambdaVector

# sign patterns (s_x, s_y, s_z) of the radicands 1 + s.Lambda for k0..k3
_SIGNS = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)


class NotCompletelyPositiveError(ValueError):
    pass


@dataclass(frozen=True)
class KrausCoefficients:
    k: np.ndarray

    def __post_init__(self):
        k = np.array(self.k, dtype=float)
        if k.shape != (4,) or np.any(k < 0):
            raise ValueError(f"need four non-negative coefficients, got {self.k}")
        if abs(np.sum(k * k) - 1.0) > 1e-10:
            raise ValueError(f"coefficients are not trace preserving: sum k^2 = {np.sum(k * k)!r}")
        k.flags.writeable = False
        object.__setattr__(self, "k", k)

    @property
    def weights(self) -> np.ndarray:
        return self.k**2

    def operators(self) -> list[np.ndarray]:
        return [c * p for c, p in zip(self.k, PAULIS)]


def _lam(lam) -> np.ndarray:
    return np.asarray(lam.lam if isinstance(lam, LambdaVector) else lam, dtype=float)


def quarter_sums(lam) -> np.ndarray:
    """The four radicands (1 +- Lx +- Ly +- Lz)/4, in k0..k3 order."""
    return 0.25 * (1.0 + _SIGNS @ _lam(lam))


def cp_check(lam) -> tuple[bool, np.ndarray]:
    q = quarter_sums(lam)
    return bool(np.all(q >= -CLIP_TOL)), q


def kraus_from_lambda(lam) -> KrausCoefficients:
    q = quarter_sums(lam)
    if np.any(q < -PSD_TOL):
        raise NotCompletelyPositiveError(f"Lambda={_lam(lam)} gives negative Kraus weights {q}")
    return KrausCoefficients(np.sqrt(np.clip(q, 0.0, None)))


def apply_single(lam, rho, method: str = "bloch") -> np.ndarray:
    """Apply the channel to a qubit state, either by Bloch contraction or Kraus sum."""
    rho = validate_density(rho)
    lam_v = _lam(lam)
    if method == "bloch":
        if np.any(quarter_sums(lam_v) < -PSD_TOL):
            raise NotCompletelyPositiveError(f"Lambda={lam_v} is not completely positive")
        return bloch_to_density(lam_v * density_to_bloch(rho))
    if method == "kraus":
        k = kraus_from_lambda(lam_v)
        return sum(w * p @ rho @ p for w, p in zip(k.weights, PAULIS))
    raise ValueError(f"unknown method {method!r}")


def two_qubit_kraus(lam_a, lam_b) -> list[np.ndarray]:
    ka, kb = kraus_from_lambda(lam_a), kraus_from_lambda(lam_b)
    return [np.kron(a, b) for a, b in itertools.product(ka.operators(), kb.operators())]


def apply_two_qubit(lam_a, lam_b, rho) -> np.ndarray:
    """Independent channels on each qubit: sum over (K_r x K_s) rho (K_r x K_s)^dag."""
    rho = validate_density(rho)
    if rho.shape != (4, 4):
        raise ValueError("apply_two_qubit expects a 4x4 state")
    out = np.zeros((4, 4), dtype=complex)
    for k in two_qubit_kraus(lam_a, lam_b):
        out += k @ rho @ k.conj().T
    return 0.5 * (out + out.conj().T)


@dataclass(frozen=True)
class DivisibilityReport:
    divisible: bool
    residual: float
    t: float
    s: float


def divisibility_check(lam_fn: Callable[[float], object], t: float, s: float, tol: float = 1e-10) -> DivisibilityReport:
    """Semigroup test Lambda_i(t+s) == Lambda_i(t) Lambda_i(s) for Pauli-diagonal maps."""
    if t < 0 or s < 0:
        raise ValueError("t and s must be non-negative")
    lt, ls, lts = _lam(lam_fn(t)), _lam(lam_fn(s)), _lam(lam_fn(t + s))
    residual = float(np.max(np.abs(lts - lt * ls)))
    return DivisibilityReport(residual <= tol, residual, t, s)

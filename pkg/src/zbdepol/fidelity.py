"""Closed-form input/output fidelities for the zero-bandwidth depolarizing channel."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .channel import apply_single, apply_two_qubit, cp_check
from .linalg import InvalidStateError, bloch_to_density, uhlmann_fidelity
from .noise import LambdaVector

log = logging.getLogger(__name__)


class UnsupportedFormulaError(ValueError):
    pass


@dataclass(frozen=True)
class TwoQubitPureAmps:
    """Amplitudes of a|00> + b|01> + c|10> + d|11>."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        norm = sum(abs(v) ** 2 for v in self.vector)
        if abs(norm - 1.0) > 1e-12:
            raise InvalidStateError(f"amplitudes have norm^2 {norm!r}")

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d], dtype=complex)

    @classmethod
    def normalized(cls, amps) -> "TwoQubitPureAmps":
        v = np.asarray(amps, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(*v)


def _lam(lam) -> np.ndarray:
    return np.asarray(lam.lam if isinstance(lam, LambdaVector) else lam, dtype=float)


def _require_cp(lam: np.ndarray) -> None:
    ok, q = cp_check(lam)
    if not ok:
        raise ValueError(f"Lambda={lam} is not completely positive (quarter sums {q})")


def single_qubit_fidelity(a, lam) -> float:
    """F = (xi + sqrt(chi (1 - |a|^2)))/2 for input Bloch vector ``a``."""
    a = np.asarray(a, dtype=float)
    a2 = float(a @ a)
    if a2 > 1.0 + 1e-12:
        raise InvalidStateError(f"|a|^2 = {a2!r} exceeds 1")
    lam = _lam(lam)
    _require_cp(lam)
    xi = 1.0 + float(np.sum(a * a * lam))
    chi = 1.0 - float(np.sum(a * a * lam * lam))
    # a normalised vector leaves |a|^2 a few ulps off 1; the square root would blow that up
    mixedness = 1.0 - a2 if 1.0 - a2 > 8 * np.finfo(float).eps else 0.0
    return 0.5 * (xi + math.sqrt(max(chi * mixedness, 0.0)))


def two_qubit_pure_fidelity(psi: TwoQubitPureAmps, lam) -> float:
    """<psi| (Phi x Phi)(|psi><psi|) |psi> for an isotropic channel with scalar Lambda."""
    lam_v = np.atleast_1d(_lam(lam))
    if lam_v.size == 3 and not np.allclose(lam_v, lam_v[0], rtol=0.0, atol=1e-12):
        raise UnsupportedFormulaError("closed form holds only for Lambda_x = Lambda_y = Lambda_z")
    big = float(lam_v[0])
    _require_cp(np.full(3, big))
    conc = abs(psi.b * psi.c - psi.a * psi.d)
    return ((1.0 + big) / 2.0) ** 2 - 4.0 * big * (1.0 - big) / 2.0 * conc**2


def pure_fidelity_any(psi: TwoQubitPureAmps, lam) -> float:
    """Two-qubit pure-state fidelity, by closed form when isotropic, else brute force."""
    try:
        return two_qubit_pure_fidelity(psi, lam)
    except UnsupportedFormulaError:
        log.info("anisotropic Lambda: falling back to explicit channel overlap")
        v = psi.vector
        out = apply_two_qubit(lam, lam, np.outer(v, v.conj()))
        return float(np.real(v.conj() @ out @ v))


def m_family_state(m: float) -> np.ndarray:
    """(|00><00| + |11><11|)/2 + m (|00><11| + |11><00|)/2."""
    if not 0.0 <= m <= 1.0:
        raise ValueError(f"m must lie in [0, 1], got {m}")
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = rho[3, 3] = 0.5
    rho[0, 3] = rho[3, 0] = 0.5 * m
    return rho


def two_qubit_m_fidelity(m: float, lam) -> float:
    if not 0.0 <= m <= 1.0:
        raise ValueError(f"m must lie in [0, 1], got {m}")
    lam = _lam(lam)
    _require_cp(lam)
    lx2, ly2, lz2 = lam**2
    u = 1.0 + lz2
    v = m * m * (lx2 + ly2)
    root = math.sqrt(max(u * u - m * m * (lx2 + ly2) ** 2, 0.0))
    return 0.25 * (u + v + math.sqrt(1.0 - m * m) * root)


def single_qubit_fidelity_uhlmann(a, lam) -> float:
    rho = bloch_to_density(a)
    return uhlmann_fidelity(rho, apply_single(lam, rho))


def m_fidelity_uhlmann(m: float, lam) -> float:
    rho = m_family_state(m)
    return uhlmann_fidelity(rho, apply_two_qubit(lam, lam, rho))

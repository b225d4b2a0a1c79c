"""Fixed-step time integrators for the local (Lindblad) and memory-kernel master equations."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .channel import apply_single
from .linalg import PAULIS, SX, SY, SZ, density_to_bloch, validate_density
from .noise import AXES

TRACE_DRIFT_TOL = 1e-10
KERNEL_DRIFT_TOL = 1e-6


class StabilityError(ArithmeticError):
    pass


@dataclass(frozen=True)
class EvolutionTrace:
    times: np.ndarray
    states: np.ndarray  # (n, 2, 2)
    method: str

    @property
    def step(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def bloch(self) -> np.ndarray:
        return np.array([density_to_bloch(r) for r in self.states])

    def columns(self) -> tuple[list[str], np.ndarray]:
        """Flat table: t, re/im of every entry, then the Bloch components."""
        names = ["t"]
        cols = [self.times]
        for i in range(2):
            for j in range(2):
                names += [f"re_{i}{j}", f"im_{i}{j}"]
                cols += [self.states[:, i, j].real, self.states[:, i, j].imag]
        names += ["ax", "ay", "az"]
        cols += list(self.bloch.T)
        return names, np.column_stack(cols)


def _grid(T: float, h: float) -> np.ndarray:
    if not (T > 0 and h > 0):
        raise ValueError("T and h must be positive")
    if h > T / 100 * (1 + 1e-12):
        raise ValueError(f"step h={h} exceeds T/100={T / 100}")
    n = int(round(T / h))
    return h * np.arange(n + 1)


def depolarizing_generator(gamma: float, rho: np.ndarray) -> np.ndarray:
    """-(gamma/2) [rho - (1/3) sum_i sigma_i rho sigma_i]."""
    twirl = (SX @ rho @ SX + SY @ rho @ SY + SZ @ rho @ SZ) / 3.0
    return -0.5 * gamma * (rho - twirl)


def lindblad_evolve(gamma: float, rho0, T: float, h: float) -> EvolutionTrace:
    """Classic RK4 on the isotropic depolarizing Lindblad equation."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if h * gamma > 0.1:
        raise StabilityError(f"h*gamma = {h * gamma} > 0.1")
    rho = validate_density(rho0).copy()
    times = _grid(T, h)
    states = np.empty((len(times), 2, 2), dtype=complex)
    states[0] = rho
    f = lambda r: depolarizing_generator(gamma, r)  # noqa: E731
    for n in range(1, len(times)):
        k1 = f(rho)
        k2 = f(rho + 0.5 * h * k1)
        k3 = f(rho + 0.5 * h * k2)
        k4 = f(rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
        states[n] = rho
    drift = float(np.max(np.abs(np.trace(states, axis1=1, axis2=2) - 1.0)))
    if drift > TRACE_DRIFT_TOL:
        raise StabilityError(f"trace drift {drift:.2e}")
    return EvolutionTrace(times, states, "lindblad")


def memory_kernel_evolve(
    kappa: float, rho0, T: float, h: float, history_steps: int | None = None, axis: str = "x"
) -> EvolutionTrace:
    """Integrate d rho/dt = -kappa int_0^t [rho(s) - s rho(s) s] ds, s the Pauli along ``axis``.

    The history integral is a trapezoid sum over the stored trajectory, the
    outer step a Heun predictor-corrector.  ``history_steps`` truncates the
    memory to the most recent steps; ``None`` keeps all of it.
    """
    pauli = PAULIS[AXES[axis] + 1]

    def _kernel_term(rho: np.ndarray) -> np.ndarray:
        return rho - pauli @ rho @ pauli

    if not kappa > 0:
        raise ValueError("kappa must be positive")
    if h > 0.01 / math.sqrt(kappa) * (1 + 1e-12):
        raise ValueError(f"step h={h} exceeds 0.01/sqrt(kappa)")
    rho = validate_density(rho0).copy()
    times = _grid(T, h)
    n_steps = len(times)
    states = np.empty((n_steps, 2, 2), dtype=complex)
    # cumulative trapezoid integral of the kernel term, cum[n] = int_0^{t_n}
    cum = np.zeros((n_steps, 2, 2), dtype=complex)
    states[0] = rho
    d_prev = _kernel_term(rho)

    def window(n: int, total: np.ndarray) -> np.ndarray:
        if history_steps is None or n - history_steps <= 0:
            return total
        return total - cum[n - history_steps]

    for n in range(n_steps - 1):
        mem = window(n, cum[n])
        pred = rho - h * kappa * mem
        mem_pred = window(n + 1, cum[n] + 0.5 * h * (d_prev + _kernel_term(pred)))
        rho = rho - 0.5 * h * kappa * (mem + mem_pred)
        rho = 0.5 * (rho + rho.conj().T)
        d_new = _kernel_term(rho)
        cum[n + 1] = cum[n] + 0.5 * h * (d_prev + d_new)
        d_prev = d_new
        states[n + 1] = rho

    drift = float(np.max(np.abs(np.trace(states, axis1=1, axis2=2) - 1.0)))
    if drift > KERNEL_DRIFT_TOL:
        raise StabilityError(f"trace drift {drift:.2e}")
    return EvolutionTrace(times, states, "memory-kernel")


def exact_trace(lam_fn: Callable[[float], object], rho0, times) -> EvolutionTrace:
    """Evolve by direct channel application at each time."""
    rho0 = validate_density(rho0)
    times = np.asarray(times, dtype=float)
    states = np.array([apply_single(lam_fn(float(t)), rho0) for t in times])
    return EvolutionTrace(times, states, "exact-lambda")

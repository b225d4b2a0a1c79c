"""Monte-Carlo ground truth: sample a static field, rotate the qubit exactly, average.

Samples are split into fixed-size blocks.  Block ``b`` draws from a generator
seeded by ``(seed, b)`` and block statistics are merged in block order, so the
estimate is bit-identical for any number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .linalg import density_to_bloch, validate_density
from .noise import NoiseModel, sample_r

BLOCK_SIZE = 1 << 14


@dataclass(frozen=True)
class RealizationRotation:
    """Fixed-field evolution: rotation about ``axis`` by ``2 r t``."""

    axis: np.ndarray
    r: float
    t: float

    @classmethod
    def from_field(cls, r_vec, t: float) -> "RealizationRotation":
        r_vec = np.asarray(r_vec, dtype=float)
        r = float(np.linalg.norm(r_vec))
        axis = r_vec / r if r > 0 else np.array([0.0, 0.0, 1.0])
        return cls(axis, r, t)

    @property
    def angle(self) -> float:
        return 2.0 * self.r * self.t

    def unitary(self) -> np.ndarray:
        return _unitaries(self.r * self.axis[None, :], self.t)[0]


def _unitaries(r_vecs: np.ndarray, t: float) -> np.ndarray:
    """exp(i t r.sigma) = cos(rt) I + i sin(rt) rhat.sigma, batched over rows."""
    r = np.linalg.norm(r_vecs, axis=1)
    c = np.cos(r * t)
    # sin(rt)/r, finite at r = 0
    s_over_r = t * np.sinc(r * t / math.pi)
    n = r_vecs * s_over_r[:, None]
    u = np.empty((len(r), 2, 2), dtype=complex)
    u[:, 0, 0] = c + 1j * n[:, 2]
    u[:, 0, 1] = 1j * n[:, 0] + n[:, 1]
    u[:, 1, 0] = 1j * n[:, 0] - n[:, 1]
    u[:, 1, 1] = c - 1j * n[:, 2]
    return u


def evolve_fixed_r(rho0, r_vec, t: float) -> np.ndarray:
    """State after time ``t`` under d rho/dt = i [r.sigma, rho] with a constant field."""
    if t < 0:
        raise ValueError("t must be non-negative")
    rho0 = validate_density(rho0)
    if rho0.shape != (2, 2):
        raise ValueError("evolve_fixed_r is single-qubit")
    u = _unitaries(np.asarray(r_vec, dtype=float).reshape(1, 3), t)[0]
    out = u @ rho0 @ u.conj().T
    return 0.5 * (out + out.conj().T)


@dataclass(frozen=True)
class McEstimate:
    mean: np.ndarray
    stderr_re: np.ndarray
    stderr_im: np.ndarray
    n: int
    seed: int

    @property
    def stderr(self) -> np.ndarray:
        """Per-entry standard error of the complex mean."""
        return np.hypot(self.stderr_re, self.stderr_im)

    @property
    def bloch(self) -> np.ndarray:
        return density_to_bloch(self.mean)

    @property
    def bloch_stderr(self) -> np.ndarray:
        # ax = 2 Re rho01, ay = -2 Im rho01, az = 2 rho00 - 1
        return 2.0 * np.array([self.stderr_re[0, 1], self.stderr_im[0, 1], self.stderr_re[0, 0]])


def _block_stats(samples: np.ndarray):
    """Count, mean and summed squared deviations of a (n, d, d) complex block."""
    mean = samples.mean(axis=0)
    dev = samples - mean
    return len(samples), mean, np.sum(dev.real**2, axis=0), np.sum(dev.imag**2, axis=0)


def _merge(stats):
    # Chan et al. pairwise update, applied strictly in block order
    n, mean, m2r, m2i = stats[0]
    for nb, mb, m2rb, m2ib in stats[1:]:
        tot = n + nb
        delta = mb - mean
        mean = mean + delta * (nb / tot)
        m2r = m2r + m2rb + delta.real**2 * (n * nb / tot)
        m2i = m2i + m2ib + delta.imag**2 * (n * nb / tot)
        n = tot
    return n, mean, m2r, m2i


def _identity_estimate(rho0: np.ndarray, n: int, seed: int) -> McEstimate:
    # at t = 0 every realization is the identity, so skip the sampling round-off
    zero = np.zeros(rho0.shape)
    return McEstimate(rho0.copy(), zero, zero.copy(), n, seed)


def _run_blocks(block_fn, n: int, seed: int, workers: int):
    sizes = [min(BLOCK_SIZE, n - start) for start in range(0, n, BLOCK_SIZE)]
    jobs = [(b, size, np.random.default_rng([seed, b])) for b, size in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            stats = list(pool.map(lambda job: _block_stats(block_fn(job[2], job[1])), jobs))
    else:
        stats = [_block_stats(block_fn(rng, size)) for _, size, rng in jobs]
    total, mean, m2r, m2i = _merge(stats)
    scale = 1.0 / math.sqrt(total * (total - 1))
    return mean, np.sqrt(m2r) * scale, np.sqrt(m2i) * scale


def mc_average(model: NoiseModel, rho0, t: float, n: int, seed: int, workers: int = 1) -> McEstimate:
    """Average of exact fixed-field evolutions over ``n`` sampled fields."""
    if n < 100:
        raise ValueError("need at least 100 samples")
    rho0 = validate_density(rho0)
    if t == 0.0:
        return _identity_estimate(rho0, n, seed)

    def block(rng, size):
        u = _unitaries(sample_r(model, rng, size), t)
        return u @ rho0 @ np.conj(np.swapaxes(u, 1, 2))

    mean, se_re, se_im = _run_blocks(block, n, seed, workers)
    return McEstimate(0.5 * (mean + mean.conj().T), se_re, se_im, n, seed)


def mc_average_two_qubit(model: NoiseModel, rho0, t: float, n: int, seed: int, workers: int = 1) -> McEstimate:
    """Two-qubit average with an independent field on each qubit."""
    if n < 100:
        raise ValueError("need at least 100 samples")
    rho0 = validate_density(rho0)
    if rho0.shape != (4, 4):
        raise ValueError("mc_average_two_qubit expects a 4x4 state")
    if t == 0.0:
        return _identity_estimate(rho0, n, seed)

    def block(rng, size):
        ua = _unitaries(sample_r(model, rng, size), t)
        ub = _unitaries(sample_r(model, rng, size), t)
        u = np.einsum("nij,nkl->nikjl", ua, ub).reshape(size, 4, 4)
        return u @ rho0 @ np.conj(np.swapaxes(u, 1, 2))

    mean, se_re, se_im = _run_blocks(block, n, seed, workers)
    return McEstimate(0.5 * (mean + mean.conj().T), se_re, se_im, n, seed)

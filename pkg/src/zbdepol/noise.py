"""Zero-bandwidth noise distributions p(r) and the contraction factors they induce.

For a random but time-constant field ``r`` the averaged qubit channel contracts
the Bloch vector componentwise by

    Lambda_i(t) = < r_i^2/r^2 + (1 - r_i^2/r^2) cos(2 r t) >_p

which is what every evaluator in this module computes, by closed form, by
quadrature or (in :mod:`zbdepol.oracle`) by sampling.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy import integrate

AXES = {"x": 0, "y": 1, "z": 2}
# above this many characteristic periods the transient is below e^-50
OSCILLATION_GUARD = 50.0
GAUSS_LEGENDRE_LEVELS = (32, 64, 128, 256)
GAUSS_HERMITE_LEVELS = (32, 64, 128)
RADIAL_TABLE_POINTS = 4096


class NoClosedFormError(ValueError):
    """The model has no closed-form Lambda; use :func:`lambda_quadrature`."""


class ConvergenceError(ArithmeticError):
    def __init__(self, message: str, error_estimate: float):
        super().__init__(f"{message} (achieved error estimate {error_estimate:.3e})")
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class Lorentzian3Axis:
    """Cauchy field of half-width gamma/2 along one of the three axes, chosen uniformly."""

    gamma: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")

    @property
    def scale(self) -> float:
        return self.gamma

    isotropic = True


@dataclass(frozen=True)
class TelegraphAxis:
    """Two-point field +-amplitude along a fixed axis."""

    axis: str
    amplitude: float

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of x, y, z, got {self.axis!r}")
        if not self.amplitude > 0:
            raise ValueError(f"amplitude must be positive, got {self.amplitude}")

    @property
    def scale(self) -> float:
        return self.amplitude

    isotropic = False


@dataclass(frozen=True)
class GaussianAniso:
    """Centered Gaussian p(r) ~ exp(-sum_i r_i^2 / d_i^2)."""

    d: tuple[float, float, float]

    def __post_init__(self):
        d = tuple(float(v) for v in self.d)
        if len(d) != 3 or not all(v > 0 for v in d):
            raise ValueError(f"need three positive widths, got {self.d}")
        object.__setattr__(self, "d", d)

    @property
    def scale(self) -> float:
        # slowest-decaying transient is set by the narrowest width
        return min(self.d)

    @property
    def isotropic(self) -> bool:
        return self.d[0] == self.d[1] == self.d[2]


@dataclass(frozen=True)
class RadialCustom:
    """Spherically symmetric field with a user density of |r| supported on [0, rmax].

    ``pdf`` is the density of the magnitude |r| itself (it already includes the
    4 pi r^2 shell factor), vectorised over numpy arrays.
    """

    pdf: Callable[[np.ndarray], np.ndarray]
    rmax: float
    label: str = "custom"
    _table: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.rmax > 0:
            raise ValueError(f"rmax must be positive, got {self.rmax}")
        norm, _ = integrate.quad(lambda r: float(self.pdf(np.asarray(r))), 0.0, self.rmax, limit=200)
        if abs(norm - 1.0) > 1e-6:
            raise ValueError(f"radial pdf integrates to {norm!r} on [0, rmax], not 1")
        grid = np.linspace(0.0, self.rmax, RADIAL_TABLE_POINTS)
        dens = np.clip(np.asarray(self.pdf(grid), dtype=float), 0.0, None)
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(grid))])
        cdf /= cdf[-1]
        object.__setattr__(self, "_table", (grid, cdf))

    @property
    def scale(self) -> float:
        return self.rmax

    isotropic = True


NoiseModel = Union[Lorentzian3Axis, TelegraphAxis, GaussianAniso, RadialCustom]


@dataclass(frozen=True)
class LambdaVector:
    """Bloch contraction factors (Lambda_x, Lambda_y, Lambda_z) at time ``t``."""

    lam: np.ndarray
    t: float = 0.0
    method: str = "analytic"

    def __post_init__(self):
        lam = np.array(self.lam, dtype=float)
        if lam.shape != (3,):
            raise ValueError(f"LambdaVector needs 3 components, got {lam.shape}")
        lam.flags.writeable = False
        object.__setattr__(self, "lam", lam)

    def __iter__(self):
        return iter(self.lam)

    def __getitem__(self, i):
        return self.lam[i]

    @property
    def x(self) -> float:
        return float(self.lam[0])

    @property
    def y(self) -> float:
        return float(self.lam[1])

    @property
    def z(self) -> float:
        return float(self.lam[2])


def _check_time(t: float) -> None:
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")


def lambda_analytic(model: NoiseModel, t: float) -> LambdaVector:
    """Closed-form Lambda(t) for the models that have one."""
    _check_time(t)
    if isinstance(model, Lorentzian3Axis):
        v = (1.0 + 2.0 * math.exp(-model.gamma * t)) / 3.0
        return LambdaVector((v, v, v), t)
    if isinstance(model, TelegraphAxis):
        lam = np.full(3, math.cos(2.0 * model.amplitude * t))
        lam[AXES[model.axis]] = 1.0
        return LambdaVector(lam, t)
    if isinstance(model, GaussianAniso) and model.isotropic:
        s = (model.d[0] * t) ** 2
        v = 1.0 / 3.0 + (2.0 / 3.0) * (1.0 - 2.0 * s) * math.exp(-s)
        return LambdaVector((v, v, v), t)
    raise NoClosedFormError(f"no closed form for {model!r}")


def asymptotic_lambda(model: NoiseModel) -> LambdaVector:
    """Long-time limit: the angular second moments < r_i^2 / r^2 >."""
    if isinstance(model, TelegraphAxis):
        lam = np.zeros(3)
        lam[AXES[model.axis]] = 1.0
        return LambdaVector(lam, math.inf, "asymptotic")
    if model.isotropic:
        return LambdaVector(np.full(3, 1.0 / 3.0), math.inf, "asymptotic")
    return LambdaVector(_gaussian_angular_moments(model.d), math.inf, "asymptotic")


def _gaussian_angular_moments(d) -> np.ndarray:
    # < x_i^2 / r^2 > = int_0^inf ds < x_i^2 exp(-s r^2) >, a product of 1D Gaussian moments
    d2 = np.asarray(d, dtype=float) ** 2
    out = np.empty(3)
    for i in range(3):
        def integrand(s, i=i):
            f = 1.0 + s * d2
            return 0.5 * d2[i] / f[i] / np.sqrt(np.prod(f))
        out[i], _ = integrate.quad(integrand, 0.0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)
    return out


def lambda_quadrature(model: NoiseModel, t: float, tol: float = 1e-8, method: str = "auto") -> LambdaVector:
    """Numerical Lambda(t) for any model.

    ``method`` only matters for the anisotropic Gaussian: ``"angular"`` (the
    default behind ``"auto"``) does the radial integral in closed form and
    integrates the smooth remainder over the sphere; ``"hermite"`` uses a
    product Gauss-Hermite rule on the raw integrand, which only resolves
    moderate ``t * max(d)``.
    """
    _check_time(t)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if t == 0.0:
        return LambdaVector(np.ones(3), 0.0, "quadrature")

    if isinstance(model, TelegraphAxis):
        # a two-point law: the probability average is an exact two-term sum
        lam = np.full(3, 0.5 * (math.cos(2 * model.amplitude * t) + math.cos(-2 * model.amplitude * t)))
        lam[AXES[model.axis]] = 1.0
        return LambdaVector(lam, t, "exact-sum")

    if isinstance(model, (Lorentzian3Axis, GaussianAniso)) and t * model.scale > OSCILLATION_GUARD:
        lam = asymptotic_lambda(model).lam
        return LambdaVector(lam, t, "asymptotic")

    if isinstance(model, Lorentzian3Axis):
        c = _cauchy_cosine_transform(model.gamma, t, tol)
        v = (1.0 + 2.0 * c) / 3.0
        return LambdaVector((v, v, v), t, "quadrature")

    if isinstance(model, RadialCustom):
        c = _cosine_average(model.pdf, 0.0, model.rmax, t, tol)
        v = 1.0 / 3.0 + 2.0 / 3.0 * c
        return LambdaVector((v, v, v), t, "quadrature")

    if isinstance(model, GaussianAniso):
        if method == "hermite":
            return LambdaVector(_gaussian_hermite(model.d, t, tol), t, "hermite")
        if model.isotropic and method == "auto":
            dd = model.d[0]
            norm = 4.0 / (math.sqrt(math.pi) * dd**3)
            # exp(-1600) underflows, so the finite range is exact in double precision
            c = _cosine_average(lambda r: norm * r * r * np.exp(-((r / dd) ** 2)), 0.0, 40.0 * dd, t, tol)
            v = 1.0 / 3.0 + 2.0 / 3.0 * c
            return LambdaVector((v, v, v), t, "quadrature")
        return LambdaVector(_gaussian_angular(model.d, t, tol), t, "quadrature")

    raise TypeError(f"unknown noise model {model!r}")


def _cosine_average(pdf, lo: float, hi: float, t: float, tol: float) -> float:
    """int_lo^hi pdf(r) cos(2 r t) dr on a finite range, by QUADPACK's weighted cosine rule."""
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(lambda r: float(pdf(np.asarray(r))), lo, hi,
                                      weight="cos", wvar=2.0 * t, epsabs=tol * 1e-2, epsrel=0.0, limit=400)
        except integrate.IntegrationWarning as exc:
            raise ConvergenceError(f"cosine transform at t={t} failed: {exc}", math.nan) from None
    if err > tol:
        raise ConvergenceError(f"cosine transform at t={t} did not reach tol={tol}", err)
    return val


def _cauchy_cosine_transform(gamma: float, t: float, tol: float) -> float:
    # Fold the even density onto [0, inf) and rescale u = w y.  The mass below u = 1
    # is taken in closed form and only (cos u - 1) is integrated there, so no piece
    # degrades as w -> 0; above u = 1 it is a unit-frequency Fourier tail.
    wh = 2.0 * t * 0.5 * gamma
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            core, e1 = integrate.quad(lambda u: (math.cos(u) - 1.0) / (u * u + wh * wh), 0.0, 1.0,
                                      epsabs=tol * 1e-2, epsrel=0.0, limit=200)
            tail, e2 = integrate.quad(lambda u: 1.0 / (u * u + wh * wh), 1.0, math.inf,
                                      weight="cos", wvar=1.0, epsabs=tol * 1e-2, limlst=200)
        except integrate.IntegrationWarning as exc:
            raise ConvergenceError(f"cosine transform at t={t} failed: {exc}", math.nan) from None
    err = 2.0 / math.pi * wh * (e1 + e2)
    if err > tol:
        raise ConvergenceError(f"cosine transform at t={t} did not reach tol={tol}", err)
    return 2.0 / math.pi * (math.atan(1.0 / wh) + wh * (core + tail))


def _gaussian_angular(d, t: float, tol: float) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    prev = None
    for n in GAUSS_LEGENDRE_LEVELS:
        cur = _gaussian_angular_rule(d, t, n)
        if prev is not None:
            err = float(np.max(np.abs(cur - prev)))
            if err < tol:
                return cur
        prev = cur
    raise ConvergenceError(f"angular quadrature at t={t} did not converge", err)


def _gaussian_angular_rule(d: np.ndarray, t: float, n: int) -> np.ndarray:
    # radial part done exactly:
    #   int_0^inf r^2 e^{-q r^2} cos(2rt) dr = sqrt(pi)/(4 q^1.5) (1 - 2t^2/q) e^{-t^2/q}
    mu, wmu = np.polynomial.legendre.leggauss(n)
    phi = np.arange(2 * n) * (np.pi / n)
    mu, phi = np.meshgrid(mu, phi, indexing="ij")
    w = np.broadcast_to(wmu[:, None] * (np.pi / n), mu.shape)
    s = np.sqrt(1.0 - mu * mu)
    unit = np.stack([s * np.cos(phi), s * np.sin(phi), mu])
    q = np.sum(unit**2 / d[:, None, None] ** 2, axis=0)
    transient = (1.0 - 2.0 * t * t / q) * np.exp(-t * t / q)
    base = w * q**-1.5 * (math.sqrt(math.pi) / 4.0) / (math.pi**1.5 * np.prod(d))
    n2 = unit**2
    return np.array([np.sum(base * (n2[i] + (1.0 - n2[i]) * transient)) for i in range(3)])


def _gaussian_hermite(d, t: float, tol: float) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    prev = None
    for n in GAUSS_HERMITE_LEVELS:
        u, w = np.polynomial.hermite.hermgauss(n)
        w = w / math.sqrt(math.pi)
        x, y, z = np.meshgrid(d[0] * u, d[1] * u, d[2] * u, indexing="ij")
        weight = w[:, None, None] * w[None, :, None] * w[None, None, :]
        r2 = x * x + y * y + z * z
        # (sin(rt)/r)^2 is entire in r^2, so the integrand is smooth at the origin
        sinc2 = (t * np.sinc(np.sqrt(r2) * t / math.pi)) ** 2
        cur = np.array([1.0 - 2.0 * np.sum(weight * (r2 - c * c) * sinc2) for c in (x, y, z)])
        if prev is not None:
            err = float(np.max(np.abs(cur - prev)))
            if err < tol:
                return cur
        prev = cur
    raise ConvergenceError(f"Gauss-Hermite quadrature at t={t} did not converge", err)


def sample_r(model: NoiseModel, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Draw field vectors from p(r); shape (3,) or (size, 3)."""
    n = 1 if size is None else int(size)
    out = np.zeros((n, 3))
    if isinstance(model, Lorentzian3Axis):
        axis = rng.integers(0, 3, size=n)
        u = rng.random(n)
        out[np.arange(n), axis] = 0.5 * model.gamma * np.tan(np.pi * (u - 0.5))
    elif isinstance(model, TelegraphAxis):
        sign = np.where(rng.random(n) < 0.5, -1.0, 1.0)
        out[:, AXES[model.axis]] = sign * model.amplitude
    elif isinstance(model, GaussianAniso):
        out[:] = rng.standard_normal((n, 3)) * (np.asarray(model.d) / math.sqrt(2.0))
    elif isinstance(model, RadialCustom):
        grid, cdf = model._table
        mag = np.interp(rng.random(n), cdf, grid)
        direction = rng.standard_normal((n, 3))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        out[:] = mag[:, None] * direction
    else:
        raise TypeError(f"unknown noise model {model!r}")
    return out[0] if size is None else out


def model_from_config(cfg: dict) -> NoiseModel:
    """Build a model from a config mapping with keys kind, gamma, amplitude, axis, d, rmax."""
    kind = str(cfg.get("kind", "")).lower()
    if kind in ("lorentzian", "lorentzian3axis"):
        return Lorentzian3Axis(float(cfg["gamma"]))
    if kind in ("telegraph", "telegraphaxis"):
        return TelegraphAxis(str(cfg.get("axis", "x")), float(cfg["amplitude"]))
    if kind in ("gaussian", "gaussiananiso"):
        d = cfg.get("d", [1.0, 1.0, 1.0])
        if np.isscalar(d):
            d = [d, d, d]
        return GaussianAniso(tuple(float(v) for v in d))
    if kind in ("radial", "radialcustom"):
        # config documents can only name built-in radial shapes
        shape = cfg.get("shape", "uniform-ball")
        rmax = float(cfg["rmax"])
        if shape == "uniform-ball":
            return RadialCustom(lambda r: 3.0 * r**2 / rmax**3, rmax, shape)
        if shape == "uniform-radius":
            return RadialCustom(lambda r: np.full_like(np.asarray(r, dtype=float), 1.0 / rmax), rmax, shape)
        raise ValueError(f"unknown radial shape {shape!r}")
    raise ValueError(f"unknown noise kind {cfg.get('kind')!r}")


def model_to_config(model: NoiseModel) -> dict:
    if isinstance(model, Lorentzian3Axis):
        return {"kind": "lorentzian", "gamma": model.gamma}
    if isinstance(model, TelegraphAxis):
        return {"kind": "telegraph", "axis": model.axis, "amplitude": model.amplitude}
    if isinstance(model, GaussianAniso):
        return {"kind": "gaussian", "d": list(model.d)}
    return {"kind": "radial", "rmax": model.rmax, "shape": model.label}

"""Exit criteria for the package, one test per criterion at its stated tolerance.

Each test records a single ``PASS``/``FAIL`` line with the measured quantities;
the lines are echoed together in the pytest terminal summary.
"""

import math

import numpy as np
import pytest

from zbdepol.channel import apply_single, apply_two_qubit, cp_check, divisibility_check, kraus_from_lambda
from zbdepol.cli import cmd_kraus, main
from zbdepol.config import load_config
from zbdepol.dynamics import memory_kernel_evolve
from zbdepol.fidelity import (
    TwoQubitPureAmps,
    m_fidelity_uhlmann,
    single_qubit_fidelity,
    single_qubit_fidelity_uhlmann,
    two_qubit_m_fidelity,
    two_qubit_pure_fidelity,
)
from zbdepol.linalg import SX, bloch_to_density, pure_state
from zbdepol.noise import (
    GaussianAniso,
    Lorentzian3Axis,
    RadialCustom,
    TelegraphAxis,
    asymptotic_lambda,
    lambda_analytic,
    lambda_quadrature,
)
from zbdepol.oracle import mc_average

from conftest import ACCEPTANCE_LINES, random_bloch, random_cp_lambda, random_density

pytestmark = pytest.mark.acceptance

DIAG = np.ones(3) / math.sqrt(3)
# zero-variance entries (e.g. the telegraph axis) are compared at round-off level
SIGMA_FLOOR = 1e-12


def _record(n: int, passed: bool, detail: str) -> None:
    line = f"{'PASS' if passed else 'FAIL'} criterion {n}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, line


def _mc_vs_lambda(model, times, n, seed0):
    """Worst |MC - Lambda_i a_i| / 3 sigma over a time grid, Bloch input along (1,1,1).

    Returns the ratio, the count of component checks and where the worst one sits.
    """
    rho0 = bloch_to_density(DIAG)
    worst, where = 0.0, ""
    for k, t in enumerate(times):
        est = mc_average(model, rho0, float(t), n, seed=seed0 + k)
        target = lambda_quadrature(model, float(t)).lam * DIAG
        ratio = np.abs(est.bloch - target) / np.maximum(3 * est.bloch_stderr, SIGMA_FLOOR)
        i = int(np.argmax(ratio))
        if ratio[i] > worst:
            worst, where = float(ratio[i]), f"t={t:.2f} {'xyz'[i]}"
    return worst, 3 * len(times), where


def test_criterion_1_telegraph_closed_form():
    rng = np.random.default_rng(1)
    a = 1.0
    times = np.linspace(0, 2 * math.pi / a, 20)
    states = [random_density(rng) for _ in range(100)]
    worst = 0.0
    for t in times:
        lam = lambda_analytic(TelegraphAxis("x", a), t)
        c2, s2 = math.cos(a * t) ** 2, math.sin(a * t) ** 2
        for rho in states:
            bloch = apply_single(lam, rho, "bloch")
            kraus = apply_single(lam, rho, "kraus")
            closed = c2 * rho + s2 * SX @ rho @ SX
            worst = max(worst, np.max(np.abs(bloch - kraus)), np.max(np.abs(bloch - closed)))
    mc, checks, where = _mc_vs_lambda(TelegraphAxis("x", a), times, 100_000, seed0=1000)
    _record(1, worst < 1e-12 and mc <= 1.0,
            f"telegraph Kraus vs Bloch vs closed form max {worst:.2e} (< 1e-12); MC N=1e5 worst |dev|/3sigma {mc:.3f} (<= 1) over {checks} checks, at {where}")


def test_criterion_2_gaussian_asymptote():
    target = np.array([1 / math.sqrt(2)] + [1 / math.sqrt(6)] * 3)
    k10 = kraus_from_lambda(lambda_analytic(GaussianAniso((1, 1, 1)), 10.0)).k
    dev = float(np.max(np.abs(k10 - target)))
    table = cmd_kraus(load_config(preset="fig1-upper"))
    data = np.array(table.rows, dtype=float)
    t, k = data[:, 0], data[:, 1:]
    # Lambda dips below its plateau and then climbs back monotonically; after the
    # turning point (d t)^2 = 3/2 the distance to the plateau must never grow
    tail = t > math.sqrt(1.5)
    dist = np.abs(k[tail] - target)
    monotone = bool(np.all(np.diff(dist, axis=0) <= 1e-15))
    end = float(np.max(np.abs(k[-1] - target)))
    _record(2, dev < 1e-3 and monotone and end < 1e-3 and table.ok,
            f"k(t=10) - (1/sqrt2, 1/sqrt6 x3) max {dev:.2e} (< 1e-3); fig1-upper CSV monotone approach after the dip: {monotone}")


def test_criterion_3_fig1_lower():
    model = GaussianAniso((1, 2, 3))
    mc, checks, where = _mc_vs_lambda(model, np.linspace(0.3, 3.0, 10), 100_000, seed0=3000)
    plateau = asymptotic_lambda(model).lam
    stationary = lambda_quadrature(model, 10.0).lam
    st_dev = float(np.max(np.abs(stationary - plateau)))
    gaps = np.abs(np.diff(np.sort(stationary)))
    distinct = bool(np.min(gaps) > 0.05)
    _record(3, mc <= 1.0 and st_dev < 1e-3 and distinct,
            f"d=(1,2,3) MC N=1e5 worst |dev|/3sigma {mc:.4f} (<= 1) over {checks} checks, at {where}; stationary vs moments {st_dev:.2e} (< 1e-3); "
            f"plateaus {np.round(stationary, 4).tolist()} distinct")


def test_criterion_4_lorentzian():
    worst = 0.0
    for gamma in (0.5, 1.0, 2.0):
        model = Lorentzian3Axis(gamma)
        for t in np.linspace(0, 5, 51):
            quad = lambda_quadrature(model, t).lam
            worst = max(worst, float(np.max(np.abs(quad - (1 + 2 * math.exp(-gamma * t)) / 3))))
    est = mc_average(Lorentzian3Axis(1.0), bloch_to_density((0, 0, 1)), 1.0, 1_000_000, seed=4)
    z = abs(est.bloch[2] - (1 + 2 * math.exp(-1)) / 3) / est.bloch_stderr[2]
    rng = np.random.default_rng(4)
    lam_inf = lambda_quadrature(Lorentzian3Axis(1.0), 40.0)
    steady = 0.0
    for _ in range(100):
        a = random_bloch(rng)
        out = apply_single(lam_inf, bloch_to_density(a), "kraus")
        steady = max(steady, float(np.max(np.abs(out - bloch_to_density(a / 3)))))
    _record(4, worst < 1e-6 and z <= 3 and steady < 1e-6,
            f"quadrature vs (1+2e^-Gt)/3 max {worst:.2e} (< 1e-6); MC N=1e6 |z| {z:.2f} (<= 3); "
            f"steady-state contraction by 1/3 max dev {steady:.2e} (< 1e-6)")


def test_criterion_5_kraus_validity():
    models = [
        Lorentzian3Axis(1.0),
        TelegraphAxis("x", 1.0),
        GaussianAniso((1, 1, 1)),
        GaussianAniso((1, 2, 3)),
        RadialCustom(lambda r: 3 * r**2 / 8.0, 2.0, "uniform-ball"),
    ]
    times = np.linspace(0, 20, 1000)
    norm_dev, min_q = 0.0, 1.0
    for model in models:
        for t in times:
            lam = lambda_quadrature(model, t)
            ok, q = cp_check(lam)
            k = kraus_from_lambda(lam).k
            norm_dev = max(norm_dev, abs(float(np.sum(k * k)) - 1))
            min_q = min(min_q, float(q.min()))
    # the alternative Lorentzian weights with (1 - e^-Gt)/2 on each Pauli term
    e = np.exp(-times[1:])
    alt = float(np.min(np.abs((1 + e) / 2 + 3 * (1 - e) / 2 - 1)))
    _record(5, norm_dev < 1e-10 and min_q >= -1e-10 and alt > 1e-10,
            f"sum k^2 - 1 max {norm_dev:.2e} (< 1e-10); min k_i^2 {min_q:.2e} (>= -1e-10); "
            f"/2 Lorentzian variant violates trace by >= {alt:.2e}")


def test_criterion_6_memory_kernel():
    a, h = 1.0, 1e-3
    T = 2 * math.pi / a
    rho0 = bloch_to_density((0, 0, 1))
    tr = memory_kernel_evolve(2 * a * a, rho0, T, h)
    exact = np.array([math.cos(a * t) ** 2 * rho0 + math.sin(a * t) ** 2 * SX @ rho0 @ SX for t in tr.times])
    dev = float(np.max(np.abs(tr.states - exact)))
    printed = memory_kernel_evolve(a * a / 2, rho0, T, h)
    dev_printed = float(np.max(np.abs(printed.states - exact)))
    _record(6, dev < 2e-4 and dev_printed > 0.1,
            f"kappa=2a^2 max state deviation {dev:.2e} (< 2e-4); printed a^2/2 deviation {dev_printed:.3f} (fails)")


def test_criterion_7_divisibility():
    exp_rep = divisibility_check(lambda t: np.full(3, math.exp(-0.8 * t)), 0.5, 0.5)
    tel = TelegraphAxis("x", 1.0)
    tel_rep = divisibility_check(lambda t: lambda_analytic(tel, t), 0.5, 0.5)
    lor = Lorentzian3Axis(1.0)
    lor_rep = divisibility_check(lambda t: lambda_analytic(lor, t), 0.5, 0.5)
    passed = exp_rep.divisible and exp_rep.residual < 1e-12 and not tel_rep.divisible and tel_rep.residual > 0.1
    _record(7, passed,
            f"exponential residual {exp_rep.residual:.1e} divisible; telegraph residual {tel_rep.residual:.3f} not divisible; "
            f"Lorentzian residual {lor_rep.residual:.4e} (reported)")


def test_criterion_8_fidelity():
    rng = np.random.default_rng(8)
    single = max(abs(single_qubit_fidelity(a, lam) - single_qubit_fidelity_uhlmann(a, lam))
                 for a, lam in ((random_bloch(rng), random_cp_lambda(rng)) for _ in range(1000)))
    grid = np.round(np.arange(0.1, 0.95, 0.1), 10)
    pure = 0.0
    for k in range(500):
        psi = TwoQubitPureAmps.normalized(rng.normal(size=4) + 1j * rng.normal(size=4))
        lam = np.full(3, grid[k % len(grid)])
        v = psi.vector
        brute = float(np.real(v.conj() @ apply_two_qubit(lam, lam, pure_state(v)) @ v))
        pure = max(pure, abs(two_qubit_pure_fidelity(psi, lam) - brute))
    model = GaussianAniso((1, 1, 1))
    ms = [1.0, 0.9, 0.7, 0.4, 0.0]
    mdev, ordered = 0.0, True
    for t in np.linspace(0, 5, 101):
        lam = lambda_quadrature(model, t)
        f = [two_qubit_m_fidelity(m, lam) for m in ms]
        mdev = max(mdev, max(abs(fm - m_fidelity_uhlmann(m, lam)) for m, fm in zip(ms, f)))
        if t > 0:
            ordered &= all(x < y for x, y in zip(f, f[1:]))
    f_inf = two_qubit_m_fidelity(0.0, lambda_quadrature(model, 10.0))
    passed = single < 1e-10 and pure < 1e-10 and mdev < 1e-8 and ordered and abs(f_inf - 5 / 9) < 1e-3
    _record(8, passed,
            f"single-qubit {single:.1e} (< 1e-10); two-qubit pure {pure:.1e} (< 1e-10); m-family {mdev:.1e} (< 1e-8); "
            f"ordering m=1<...<m=0 {ordered}; F(m=0, t=10) - 5/9 = {f_inf - 5 / 9:.1e}")


def test_criterion_9_determinism(tmp_path, capsys):
    args = ["oracle", "--preset", "fig1-lower", "--points", "4", "--t-max", "2", "--samples", "50000", "--seed", "9"]
    paths = [tmp_path / f"run{i}.csv" for i in range(3)]
    codes = [main(args + ["--out", str(paths[0])]),
             main(args + ["--out", str(paths[1])]),
             main(args + ["--out", str(paths[2]), "--workers", "4"])]
    capsys.readouterr()
    blobs = [p.read_bytes() for p in paths]
    same = blobs[0] == blobs[1] == blobs[2]
    _record(9, same and codes == [0, 0, 0],
            f"two identical-seed runs and a 4-worker run byte-identical: {same}; exit codes {codes}")

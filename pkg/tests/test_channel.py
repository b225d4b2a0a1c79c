import math

import numpy as np
import pytest
from hypothesis import given, settings

from zbdepol.channel import (
    KrausCoefficients,
    NotCompletelyPositiveError,
    apply_single,
    apply_two_qubit,
    cp_check,
    divisibility_check,
    kraus_from_lambda,
    quarter_sums,
    two_qubit_kraus,
)
from zbdepol.fidelity import m_family_state
from zbdepol.linalg import bloch_to_density, density_to_bloch, pure_state, tensor, uhlmann_fidelity
from zbdepol.noise import GaussianAniso, Lorentzian3Axis, RadialCustom, TelegraphAxis, lambda_analytic, lambda_quadrature

from conftest import cp_lambdas, random_cp_lambda, random_density

MODELS = [
    Lorentzian3Axis(1.0),
    TelegraphAxis("x", 1.0),
    TelegraphAxis("y", 2.5),
    GaussianAniso((1, 1, 1)),
    GaussianAniso((1, 2, 3)),
    RadialCustom(lambda r: 3 * r**2 / 8.0, 2.0),
]


@pytest.mark.parametrize(
    "lam, k",
    [
        ((1, 1, 1), (1, 0, 0, 0)),
        ((1 / 3, 1 / 3, 1 / 3), (1 / math.sqrt(2), 1 / math.sqrt(6), 1 / math.sqrt(6), 1 / math.sqrt(6))),
    ],
)
def test_kraus_examples(lam, k):
    np.testing.assert_allclose(kraus_from_lambda(lam).k, k, atol=1e-15)


@pytest.mark.parametrize("at", [0.0, 0.3, 1.0, 2.0, 3.5])
def test_kraus_telegraph(at):
    c = math.cos(2 * at)
    np.testing.assert_allclose(kraus_from_lambda((1, c, c)).k, [abs(math.cos(at)), abs(math.sin(at)), 0, 0], atol=1e-8)


def test_lorentzian_kraus_weights_sum_to_one():
    for t in np.linspace(0, 6, 25):
        e = math.exp(-t)
        w = kraus_from_lambda(lambda_analytic(Lorentzian3Axis(1.0), t)).weights
        np.testing.assert_allclose(w, [(1 + e) / 2, (1 - e) / 6, (1 - e) / 6, (1 - e) / 6], atol=1e-14)
        assert w.sum() == pytest.approx(1.0, abs=1e-14)


def test_kraus_coefficient_validation():
    with pytest.raises(ValueError):
        KrausCoefficients((1, 0, 0))
    with pytest.raises(ValueError):
        KrausCoefficients((0.9, 0, 0, 0))
    with pytest.raises(ValueError):
        KrausCoefficients((-1, 0, 0, 0))
    assert len(KrausCoefficients((1, 0, 0, 0)).operators()) == 4


def test_cp_check_examples():
    assert cp_check((1, 1, 1))[0]
    ok, q = cp_check((1, 1, -1))
    assert not ok
    assert q.min() == pytest.approx(-0.5)
    # the four radicands add up to 1 for every Lambda
    assert quarter_sums((0.2, -0.4, 0.9)).sum() == pytest.approx(1.0)


def test_non_cp_lambda_is_rejected():
    with pytest.raises(NotCompletelyPositiveError):
        kraus_from_lambda((1, 1, -1))
    with pytest.raises(NotCompletelyPositiveError):
        apply_single((1, 1, -1), np.eye(2) / 2)
    # round-off below zero is clipped rather than rejected
    k = kraus_from_lambda((1, 1, 1 + 1e-11))
    assert k.k[1] == k.k[2] == 0.0


@pytest.mark.parametrize("model", MODELS, ids=repr)
def test_builtin_models_are_cp(model):
    for t in np.linspace(0, 8, 41):
        assert cp_check(lambda_quadrature(model, t))[0]


def test_apply_single_examples(rng):
    rho = random_density(rng)
    np.testing.assert_allclose(apply_single((1, 1, 1), rho), rho, atol=1e-15)
    np.testing.assert_allclose(apply_single((0.2, -0.3, 0.5), np.eye(2) / 2), np.eye(2) / 2, atol=1e-15)
    out = apply_single((1 / 3, 1 / 3, 1 / 3), np.diag([1.0, 0.0]))
    np.testing.assert_allclose(out, np.diag([2 / 3, 1 / 3]), atol=1e-15)
    with pytest.raises(ValueError):
        apply_single((1, 1, 1), rho, method="matrix")


def test_kraus_and_bloch_paths_agree_1000(rng):
    for _ in range(1000):
        lam, rho = random_cp_lambda(rng), random_density(rng)
        out_b = apply_single(lam, rho, "bloch")
        out_k = apply_single(lam, rho, "kraus")
        assert np.max(np.abs(out_b - out_k)) < 1e-12
        assert abs(np.trace(out_b) - 1) < 1e-12
        assert np.linalg.eigvalsh(out_b)[0] >= -1e-10
        np.testing.assert_allclose(density_to_bloch(out_b), lam * density_to_bloch(rho), atol=1e-12)


@settings(max_examples=200)
@given(cp_lambdas())
def test_channel_is_contractive_and_unital(lam):
    assert np.all(np.abs(lam) <= 1 + 1e-12)
    assert np.array_equal(apply_single(lam, np.eye(2) / 2), np.eye(2) / 2)
    out = apply_single(lam, bloch_to_density((0.6, 0.0, -0.8)), "kraus")
    assert np.linalg.eigvalsh(out)[0] >= -1e-10


@pytest.mark.parametrize("model", MODELS, ids=repr)
def test_contraction_for_builtin_models(model):
    for t in np.linspace(0, 6, 13):
        assert np.all(np.abs(lambda_quadrature(model, t).lam) <= 1 + 1e-12)


def test_two_qubit_identity_and_factorisation(rng):
    rho = random_density(rng, 4)
    np.testing.assert_allclose(apply_two_qubit((1, 1, 1), (1, 1, 1), rho), rho, atol=1e-15)
    assert len(two_qubit_kraus((0.5, 0.5, 0.5), (1, 0.2, 0.2))) == 16
    for _ in range(100):
        la, lb = random_cp_lambda(rng), random_cp_lambda(rng)
        ra, rb = random_density(rng), random_density(rng)
        out = apply_two_qubit(la, lb, tensor(ra, rb))
        assert np.max(np.abs(out - tensor(apply_single(la, ra), apply_single(lb, rb)))) < 1e-12
        assert abs(np.trace(apply_two_qubit(la, lb, random_density(rng, 4))) - 1) < 1e-12


def test_two_qubit_rejects_qubit_state():
    with pytest.raises(ValueError):
        apply_two_qubit((1, 1, 1), (1, 1, 1), np.eye(2) / 2)


def test_bell_state_loses_more_fidelity_than_product():
    lam = lambda_analytic(GaussianAniso((1, 1, 1)), 0.7)
    bell = m_family_state(1.0)
    prod = pure_state(np.array([1, 0, 0, 0], dtype=complex))
    f_bell = uhlmann_fidelity(bell, apply_two_qubit(lam, lam, bell))
    f_prod = uhlmann_fidelity(prod, apply_two_qubit(lam, lam, prod))
    assert f_bell < f_prod


def test_divisibility_exponential_family():
    rep = divisibility_check(lambda t: np.full(3, math.exp(-0.7 * t)), 0.4, 1.1)
    assert rep.divisible
    assert rep.residual < 1e-12


def test_divisibility_telegraph_fails():
    model = TelegraphAxis("x", 1.0)
    rep = divisibility_check(lambda t: lambda_analytic(model, t), 0.5, 0.5)
    assert not rep.divisible
    assert rep.residual == pytest.approx(abs(math.cos(2.0) - math.cos(1.0) ** 2), abs=1e-14)


def test_divisibility_lorentzian_residual_is_reported():
    model = Lorentzian3Axis(1.0)
    rep = divisibility_check(lambda t: lambda_analytic(model, t), 1.0, 1.0)
    e = math.exp(-1.0)
    expected = abs((1 + 2 * e * e) / 3 - ((1 + 2 * e) / 3) ** 2)
    assert rep.residual == pytest.approx(expected, abs=1e-15)
    assert not rep.divisible
    with pytest.raises(ValueError):
        divisibility_check(lambda t: lambda_analytic(model, t), -1.0, 1.0)

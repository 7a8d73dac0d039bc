import cmath

import numpy as np

from bethe19 import boundary as B
from bethe19.weights import ModelKind, ModelParams, crossing_data

from conftest import U0, V0


def test_k_minus_upper_triangular(model):
    k = B.build_k_minus(model, U0).matrix
    assert k[1, 0] == 0 and k[2, 0] == 0 and k[2, 1] == 0


def test_k_minus_at_zero_is_scalar(model):
    k = B.build_k_minus(model, 0).matrix
    assert np.linalg.norm(k - k[0, 0] * np.eye(3)) / abs(k[0, 0]) < 1e-13


def test_zf_k_minus_zero_value():
    p = ModelParams()
    k = B.build_k_minus(p, 0).matrix
    xi, eta = p.xi_minus, p.eta
    assert abs(k[0, 0] - cmath.sinh(xi) * cmath.sinh(xi - eta / 2)) < 1e-15


def test_ik_k11_equals_k33():
    p = ModelParams(kind="ik")
    k = B.build_k_minus(p, U0).matrix
    assert k[0, 0] == k[2, 2]


def test_diagonal_when_beta_zero(model):
    p = model.with_(beta_minus=0, beta_plus=0)
    for k in (B.build_k_minus(p, U0).matrix, B.build_k_plus(p, U0).matrix):
        assert np.count_nonzero(k - np.diag(np.diag(k))) == 0


def test_k_plus_construction(model):
    cd = crossing_data(model)
    kp = B.build_k_plus(model, U0).matrix
    swapped = model.with_(xi_minus=model.xi_plus, beta_minus=model.beta_plus)
    km = B.build_k_minus(swapped, -U0 - cd.rho).matrix
    if model.kind is ModelKind.ZF:
        assert np.allclose(kp, km, rtol=0, atol=1e-15)
    else:
        scale = [cmath.exp(-2 * model.eta), 1, cmath.exp(2 * model.eta)]
        assert np.allclose(kp, km * np.array(scale)[None, :], atol=1e-14)


def test_k_plus_perturbation():
    p = ModelParams(kplus_perturbation=(0, 1, 1e-3))
    diff = B.build_k_plus(p, U0).matrix - B.build_k_plus(ModelParams(), U0).matrix
    assert abs(diff[0, 1] - 1e-3) < 1e-15 and np.count_nonzero(diff) == 1


def test_reflection_equations(model):
    assert B.check_reflection_left(model, U0, V0) < 1e-10
    assert B.check_reflection_right(model, U0, V0) < 1e-10
    assert B.check_reflection_left(model, U0, U0) < 1e-12


def test_reflection_diagonal_case(model):
    p = model.with_(beta_minus=0, beta_plus=0)
    assert B.check_reflection_left(p, U0, V0) < 1e-10
    assert B.check_reflection_right(p, U0, V0) < 1e-10


def test_reflection_sweep(rng, model):
    from bethe19.weights import random_points
    pts = random_points(rng, model, 40, shifts=(0, model.eta / 2))
    for u, v in zip(pts[::2], pts[1::2]):
        assert B.check_reflection_left(model, u, v) < 1e-10
        assert B.check_reflection_right(model, u, v) < 1e-10

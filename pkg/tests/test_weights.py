import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bethe19 import weights as W
from bethe19.weights import ModelKind, ModelParams, PoleError

from conftest import U0, V0

points = st.complex_numbers(min_magnitude=0.05, max_magnitude=1.0, allow_nan=False, allow_infinity=False)


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(epsilon=0)
    with pytest.raises(ValueError):
        ModelParams(length=0)
    for bad in (0, 1j * np.pi / 2, 1j * np.pi):
        with pytest.raises(ValueError):
            ModelParams(eta=bad)
    p = ModelParams(kind="ik")
    assert p.kind is ModelKind.IK and hash(p) == hash(ModelParams(kind=ModelKind.IK))


def test_zf_weights_at_zero():
    w = W.eval_weights(ModelParams(), 0)
    for name, val in dict(a=1, b=0, c=1, d=0, d_tilde=0, f=0, e=1, h=1, h_tilde=1).items():
        assert abs(getattr(w, name) - val) < 1e-14, name


def test_zf_b_spot_value():
    w = W.eval_weights(ModelParams(eta=0.3), 0.3)
    assert abs(w.b - np.sinh(0.3) / np.sinh(0.6)) < 1e-15


def test_tilde_relations(model):
    w = W.eval_weights(model, U0)
    assert w.a == 1
    if model.kind is ModelKind.ZF:
        assert w.d_tilde == w.d and w.h_tilde == w.h
    else:
        assert abs(w.d_tilde + cmath.exp(-2 * model.eta) * w.d) < 1e-15


def test_pole_refusal():
    p = ModelParams()
    with pytest.raises(PoleError):
        W.eval_weights(p, -p.eta)
    with pytest.raises(PoleError):
        W.eval_weights(p, -p.eta / 2)
    q = ModelParams(kind="ik")
    with pytest.raises(PoleError):
        W.eval_weights(q, -1.5 * q.eta + 0.5j * np.pi)


def test_r_matrix_pattern(model):
    r = W.build_r_matrix(model, U0)
    w = W.eval_weights(model, U0)
    assert np.count_nonzero(r) == 19
    assert r[0, 0] == w.a and r[4, 4] == w.e and r[8, 8] == w.a
    assert r[2, 6] == w.h and r[6, 2] == w.h_tilde
    assert r[1, 0] == 0


def test_r_zero_is_permutation(model):
    assert np.abs(W.build_r_matrix(model, 0) - W.P9).max() < 1e-14


def test_crossing_data_choice(model):
    cd = W.crossing_data(model)
    eta = model.eta
    if model.kind is ModelKind.ZF:
        assert np.array_equal(cd.m_matrix, W.I3) and cd.rho == eta / 2
    else:
        assert np.allclose(np.diag(cd.m_matrix), [cmath.exp(-2 * eta), 1, cmath.exp(2 * eta)])
        assert cd.rho == 1.5 * eta


def test_printed_shift_is_not_crossing(model):
    # documents why rho is half the naive value: with the doubled shift X is not scalar
    cd = W.crossing_data(model)
    m1 = np.kron(cd.m_matrix, W.I3)
    x = (W.partial_transpose(W.build_r_matrix(model, U0), 1) @ m1
         @ W.partial_transpose(W.build_r_matrix(model, -U0 - 4 * cd.rho), 2) @ np.linalg.inv(m1))
    assert W.rel_residual(x, x[0, 0] * np.eye(9)) > 1e-3


def test_basic_identities(model):
    assert W.check_ybe(model, U0, V0) < 1e-11
    assert W.check_ybe(model, U0, U0) < 1e-12
    assert W.check_unitarity(model, U0) < 1e-11
    assert W.check_pt(model, U0) < 1e-12
    res, zeta = W.check_crossing(model, U0)
    assert res < 1e-10 and np.isfinite(zeta) and abs(zeta) > 1e-8
    assert W.check_m_symmetry(model, U0) < 1e-12


@settings(max_examples=20, deadline=None)
@given(points, points, st.sampled_from(["zf", "ik"]), st.sampled_from([1, -1]))
def test_identities_random(u, v, kind, eps):
    p = ModelParams(kind=kind, epsilon=eps)
    try:
        assert W.check_ybe(p, u, v) < 1e-10
        assert W.check_unitarity(p, u) < 1e-10
        assert W.check_pt(p, u) < 1e-10
        assert W.check_crossing(p, u)[0] < 1e-10
    except PoleError:
        pass


def test_r21_two_forms(model):
    r = W.build_r_matrix(model, U0)
    assert W.rel_residual(W.r21(model, U0), W.partial_transpose(W.partial_transpose(r, 1), 2)) < 1e-13


def test_partial_transpose_index_map(rng):
    x = rng.normal(size=(9, 9))
    t1, t2 = W.partial_transpose(x, 1), W.partial_transpose(x, 2)
    i1, i2, j1, j2 = 2, 0, 1, 2
    assert t1[3 * i1 + i2, 3 * j1 + j2] == x[3 * j1 + i2, 3 * i1 + j2]
    assert t2[3 * i1 + i2, 3 * j1 + j2] == x[3 * i1 + j2, 3 * j1 + i2]
    with pytest.raises(ValueError):
        W.partial_transpose(x, 3)


def test_weight_perturbation_breaks_ybe():
    p = ModelParams(weight_perturbation=("e", 1e-3))
    assert W.check_ybe(p, U0, V0) > 1e-6


def test_random_points_avoid_poles(rng, model):
    pts = W.random_points(rng, model, 30, radius=0.05)
    assert len(pts) == 30
    assert all(min(abs(x) for x in W.weight_poles(model, z)) > 0.05 for z in pts)

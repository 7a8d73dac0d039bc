"""Upper-triangular reflection matrices and the two reflection equations."""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .numerics import kron, mat_inv, rel_residual
from .weights import I3, ModelKind, ModelParams, build_r_matrix, crossing_data, partial_transpose, r21


@dataclass(frozen=True)
class KMatrix:
    side: str
    matrix: np.ndarray
    params_snapshot: ModelParams


def _k_entries(kind: ModelKind, eta: complex, xi: complex, beta: complex, eps: int, u: complex) -> np.ndarray:
    sh, ch, ex = cmath.sinh, cmath.cosh, cmath.exp
    k = np.zeros((3, 3), dtype=complex)
    if kind is ModelKind.ZF:
        k[0, 0] = sh(u + xi) * sh(u + xi - eta / 2)
        k[1, 1] = sh(xi - u) * sh(u + xi - eta / 2)
        k[2, 2] = sh(u - xi) * sh(u - xi + eta / 2)
        k[0, 1] = beta * sh(2 * u) * sh(u + xi - eta / 2)
        k[1, 2] = beta * sh(2 * u) * sh(xi - u)
        k[0, 2] = beta**2 * sh(eta / 2) / sh(eta) * sh(2 * u) * sh(2 * u - eta / 2)
    else:
        p = eps * 1j * cmath.pi / 4
        k[0, 0] = k[2, 2] = sh(u + 0.75 * eta + p) * ch(u + 0.75 * eta - p)
        k[1, 1] = sh(-u + 0.75 * eta + p) * ch(u + 0.75 * eta - p)
        k[0, 1] = beta * sh(2 * u) * ch(u + 0.75 * eta - p)
        k[1, 2] = beta * sh(2 * u) * ex(-eta) * sh(u + 0.75 * eta + p)
        k[0, 2] = (-(beta**2) * ex(-eta) / ch(eta / 2)) * sh(2 * u) * ch(u + eta / 4 + p) * sh(u + 0.75 * eta + p)
    return k


def build_k_minus(params: ModelParams, u: complex) -> KMatrix:
    k = _k_entries(params.kind, params.eta, params.xi_minus, params.beta_minus, params.epsilon, complex(u))
    return KMatrix("minus", k, params)


def build_k_plus(params: ModelParams, u: complex) -> KMatrix:
    """K+(u) = K-(-u-rho) M with the minus-side constants replaced by plus ones."""
    cd = crossing_data(params)
    k = _k_entries(params.kind, params.eta, params.xi_plus, params.beta_plus, params.epsilon,
                   -complex(u) - cd.rho) @ cd.m_matrix
    if params.kplus_perturbation is not None:
        i, j, delta = params.kplus_perturbation
        k[i, j] += delta
    return KMatrix("plus", k, params)


def check_reflection_left(params: ModelParams, u: complex, v: complex) -> float:
    k1 = kron(build_k_minus(params, u).matrix, I3)
    k2 = kron(I3, build_k_minus(params, v).matrix)
    lhs = build_r_matrix(params, u - v) @ k1 @ r21(params, u + v) @ k2
    rhs = k2 @ build_r_matrix(params, u + v) @ k1 @ r21(params, u - v)
    return rel_residual(lhs, rhs)


def check_reflection_right(params: ModelParams, u: complex, v: complex) -> float:
    cd = crossing_data(params)
    m1 = kron(cd.m_matrix, I3)
    m1_inv = mat_inv(m1)
    k1t = partial_transpose(kron(build_k_plus(params, u).matrix, I3), 1)
    k2t = partial_transpose(kron(I3, build_k_plus(params, v).matrix), 2)
    w = -u - v - 2 * cd.rho
    lhs = build_r_matrix(params, v - u) @ k1t @ m1_inv @ r21(params, w) @ m1 @ k2t
    rhs = k2t @ m1 @ build_r_matrix(params, w) @ m1_inv @ k1t @ r21(params, v - u)
    return rel_residual(lhs, rhs)

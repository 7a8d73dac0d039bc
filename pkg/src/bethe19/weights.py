"""Boltzmann weights and R-matrices of the ZF and IK 19-vertex models."""

from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass, fields, replace

import numpy as np

from .numerics import kron, mat_inv, rel_residual

POLE_RADIUS = 1e-6
DEGENERACY_RADIUS = 1e-6


class ModelKind(str, enum.Enum):
    ZF = "zf"
    IK = "ik"


class PoleError(ValueError):
    """An evaluation point lies within the exclusion radius of a pole."""


@dataclass(frozen=True)
class ModelParams:
    """All free constants of one model; hashable so results can be cached.

    ``xi_minus``/``xi_plus`` are ignored for IK, ``epsilon`` for ZF.
    The two ``*_perturbation`` fields exist only for negative controls.
    """

    kind: ModelKind = ModelKind.ZF
    eta: complex = 0.43 + 0.17j
    xi_minus: complex = 0.31 - 0.22j
    xi_plus: complex = -0.27 + 0.41j
    beta_minus: complex = 0.7 + 0.2j
    beta_plus: complex = -0.5 + 0.6j
    epsilon: int = 1
    length: int = 1
    kplus_perturbation: tuple[int, int, complex] | None = None
    weight_perturbation: tuple[str, complex] | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        for name in ("eta", "xi_minus", "xi_plus", "beta_minus", "beta_plus"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.epsilon not in (1, -1):
            raise ValueError(f"epsilon must be +1 or -1, got {self.epsilon}")
        if int(self.length) != self.length or self.length < 1:
            raise ValueError(f"length must be a positive integer, got {self.length}")
        # covers eta in {0, i pi/2, i pi} and their i pi periodic images
        if abs(cmath.sinh(2 * self.eta)) < DEGENERACY_RADIUS:
            raise ValueError(f"eta={self.eta} is at a degenerate point")

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class WeightVector:
    a: complex
    b: complex
    c: complex
    d: complex
    d_tilde: complex
    e: complex
    f: complex
    h: complex
    h_tilde: complex


@dataclass(frozen=True)
class CrossingData:
    m_matrix: np.ndarray
    rho: complex
    zeta_probe: complex | None = None


def _guard(value: complex, label: str, radius: float = POLE_RADIUS) -> complex:
    if abs(value) < radius:
        raise PoleError(f"denominator {label} vanishes (|.|={abs(value):.2e})")
    return value


def eval_weights(params: ModelParams, u: complex) -> WeightVector:
    sh, ch, ex = cmath.sinh, cmath.cosh, cmath.exp
    eta = params.eta
    u = complex(u)
    s_ue = _guard(sh(u + eta), "sinh(u+eta)")
    b = sh(u) / s_ue
    c = sh(eta) / s_ue
    if params.kind is ModelKind.ZF:
        den = _guard(sh(u + eta / 2), "sinh(u+eta/2)") * s_ue
        d = sh(eta) * sh(u) / den
        f = sh(u - eta / 2) * sh(u) / den
        e = (ch(eta / 2 - u) * ch(u + eta) - ch(eta / 2)) / den
        h = sh(eta) * sh(eta / 2) / den
        w = dict(a=1.0 + 0j, b=b, c=c, d=d, d_tilde=d, e=e, f=f, h=h, h_tilde=h)
    else:
        den = _guard(ch(u + 1.5 * eta), "cosh(u+3eta/2)") * s_ue
        d = ex(eta) * sh(eta) * sh(u) / den
        f = ch(u + eta / 2) * sh(u) / den
        e = (ch(u - eta / 2) * sh(u + 2 * eta) - ch(eta / 2) * sh(eta)) / den
        h = (den - ex(2 * eta) * ch(u + eta / 2) * sh(u)) / den
        h_tilde = (den - ex(-2 * eta) * ch(u + eta / 2) * sh(u)) / den
        w = dict(a=1.0 + 0j, b=b, c=c, d=d, d_tilde=-ex(-2 * eta) * d, e=e, f=f, h=h, h_tilde=h_tilde)
    if params.weight_perturbation is not None:
        name, delta = params.weight_perturbation
        w[name] = w[name] + delta
    return WeightVector(**w)


# (row, col) -> weight name, 0-based, row index = 3*i1 + i2
R_PATTERN = {
    (0, 0): "a", (1, 1): "b", (1, 3): "c", (2, 2): "f", (2, 4): "d", (2, 6): "h",
    (3, 1): "c", (3, 3): "b", (4, 2): "d_tilde", (4, 4): "e", (4, 6): "d",
    (5, 5): "b", (5, 7): "c", (6, 2): "h_tilde", (6, 4): "d_tilde", (6, 6): "f",
    (7, 5): "c", (7, 7): "b", (8, 8): "a",
}


def permutation_matrix(dim: int = 3) -> np.ndarray:
    p = np.zeros((dim * dim, dim * dim), dtype=complex)
    for i in range(dim):
        for j in range(dim):
            p[i * dim + j, j * dim + i] = 1.0
    return p


P9 = permutation_matrix(3)
I3 = np.eye(3, dtype=complex)


def build_r_matrix(params: ModelParams, u: complex) -> np.ndarray:
    w = eval_weights(params, u)
    r = np.zeros((9, 9), dtype=complex)
    for pos, name in R_PATTERN.items():
        r[pos] = getattr(w, name)
    return r


def r21(params: ModelParams, u: complex) -> np.ndarray:
    return P9 @ build_r_matrix(params, u) @ P9


def partial_transpose(x: np.ndarray, space: int, dims: tuple[int, int] = (3, 3)) -> np.ndarray:
    """Transpose on factor ``space`` (1 or 2) of a two-factor operator.

    Index map for space 1: <i1 i2| X^{t1} |j1 j2> = <j1 i2| X |i1 j2>;
    for space 2 the roles of i2 and j2 are swapped instead.
    """
    d1, d2 = dims
    t = np.asarray(x).reshape(d1, d2, d1, d2)
    if space == 1:
        t = t.transpose(2, 1, 0, 3)
    elif space == 2:
        t = t.transpose(0, 3, 2, 1)
    else:
        raise ValueError("space must be 1 or 2")
    return t.reshape(d1 * d2, d1 * d2)


def crossing_data(params: ModelParams) -> CrossingData:
    """Crossing matrix M and shift rho.

    rho is the value for which R^{t1}(u) M1 R^{t2}(-u-2 rho) M1^{-1} is
    scalar with the weights above: eta/2 for ZF, 3 eta/2 for IK.
    """
    eta = params.eta
    if params.kind is ModelKind.ZF:
        return CrossingData(I3.copy(), eta / 2)
    m = np.diag([cmath.exp(-2 * eta), 1.0, cmath.exp(2 * eta)]).astype(complex)
    return CrossingData(m, 1.5 * eta)


def check_ybe(params: ModelParams, u: complex, v: complex) -> float:
    r12 = kron(build_r_matrix(params, u - v), I3)
    r23 = kron(I3, build_r_matrix(params, v))
    swap23 = kron(I3, P9)
    r13 = swap23 @ kron(build_r_matrix(params, u), I3) @ swap23
    return rel_residual(r12 @ r13 @ r23, r23 @ r13 @ r12)


def check_unitarity(params: ModelParams, u: complex) -> float:
    prod = build_r_matrix(params, u) @ r21(params, -u)
    return float(np.linalg.norm(prod - np.eye(9)) / np.linalg.norm(prod))


def check_pt(params: ModelParams, u: complex) -> float:
    r = build_r_matrix(params, u)
    return rel_residual(r21(params, u), partial_transpose(partial_transpose(r, 1), 2))


def check_crossing(params: ModelParams, u: complex) -> tuple[float, complex]:
    cd = crossing_data(params)
    m1 = kron(cd.m_matrix, I3)
    x = (
        partial_transpose(build_r_matrix(params, u), 1)
        @ m1
        @ partial_transpose(build_r_matrix(params, -u - 2 * cd.rho), 2)
        @ mat_inv(m1)
    )
    zeta = complex(x[0, 0])
    return rel_residual(x, zeta * np.eye(9)), zeta


def check_m_symmetry(params: ModelParams, u: complex) -> float:
    m = crossing_data(params).m_matrix
    mm = kron(m, m)
    r = build_r_matrix(params, u)
    return float(np.linalg.norm(r @ mm - mm @ r) / (np.linalg.norm(r) * np.linalg.norm(mm)))


def weight_poles(params: ModelParams, u: complex) -> list[complex]:
    """Values that must stay away from zero for the weights at ``u``."""
    eta = params.eta
    out = [cmath.sinh(u + eta)]
    if params.kind is ModelKind.ZF:
        out.append(cmath.sinh(u + eta / 2))
    else:
        out.append(cmath.cosh(u + 1.5 * eta))
    return out


def random_points(rng: np.random.Generator, params: ModelParams, count: int,
                  shifts: tuple[complex, ...] = (0,), radius: float = 1e-2) -> list[complex]:
    """Seeded points in the unit square, rejected near weight poles at u+shift."""
    pts: list[complex] = []
    while len(pts) < count:
        z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        if all(abs(p) > radius for s in shifts for p in weight_poles(params, z + s)):
            pts.append(z)
    return pts

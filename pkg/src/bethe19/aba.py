"""Bethe-ansatz scalar functions and the eigenstate constructions Psi_n and Phi_n."""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .boundary import build_k_minus
from .double_row import build_double_row, f_functions, omega_weights, pseudovacuum
from .weights import ModelKind, ModelParams, PoleError, eval_weights

MIN_SEPARATION = 1e-4
MAX_N = 3
AMPLITUDES = ("a11", "a21", "a31", "e01", "e04", "e05")

sh, ch, ex = cmath.sinh, cmath.cosh, cmath.exp


def _den(value: complex, label: str, radius: float = 1e-12) -> complex:
    if abs(value) < radius:
        raise PoleError(f"{label} vanishes (|.|={abs(value):.2e})")
    return value


def _ik_phase(params: ModelParams) -> complex:
    return params.epsilon * 1j * math.pi / 4


def delta_functions(params: ModelParams, u: complex) -> tuple[complex, complex, complex]:
    u = complex(u)
    f1, _, f3, f4 = f_functions(params, u)
    km = build_k_minus(params, u).matrix
    w = eval_weights(params, u)
    n2 = 2 * params.length
    d1 = km[0, 0]
    d2 = (km[1, 1] - f1 * km[0, 0]) * w.b**n2
    d3 = (km[2, 2] - f4 * km[0, 0] - f3 * km[1, 1]) * w.f**n2
    return complex(d1), complex(d2), complex(d3)


def amplitude(params: ModelParams, name: str, u: complex, v: complex) -> complex:
    eta = params.eta
    d, s = complex(u) - complex(v), complex(u) + complex(v)
    if name == "a11":
        return sh(s) * sh(d - eta) / _den(sh(d) * sh(s + eta), "a11 denominator")
    if params.kind is ModelKind.ZF:
        if name == "a21":
            num = sh(s) * sh(d - eta) * sh(d + eta / 2) * sh(s + 1.5 * eta)
            den = sh(d) * sh(d - eta / 2) * sh(s + eta / 2) * sh(s + eta)
        elif name == "a31":
            num = sh(d + eta / 2) * sh(s + 1.5 * eta)
            den = sh(d - eta / 2) * sh(s + eta / 2)
        elif name == "e01":
            num = sh(d - eta) * sh(d + eta / 2)
            den = sh(d - eta / 2) * sh(d + eta)
        elif name == "e04":
            num = sh(2 * v) * sh(eta)
            den = sh(d - eta / 2) * sh(2 * v + eta)
        elif name == "e05":
            num, den = -sh(eta), sh(s + eta / 2)
        else:
            raise KeyError(name)
    else:
        if name == "a21":
            num = sh(d + eta) * sh(s + 2 * eta) * ch(d - eta / 2) * ch(s + eta / 2)
            den = sh(d) * sh(s + eta) * ch(d + eta / 2) * ch(s + 1.5 * eta)
        elif name == "a31":
            num = ch(d + 1.5 * eta) * ch(s + 2.5 * eta)
            den = ch(d + eta / 2) * ch(s + 1.5 * eta)
        elif name == "e01":
            num, den = ch(d - eta / 2), ch(d + eta / 2)
        elif name == "e04":
            num = ex(eta) * sh(2 * v) * sh(eta)
            den = ch(d + eta / 2) * sh(2 * v + eta)
        elif name == "e05":
            num, den = -ex(eta) * sh(eta), ch(s + 1.5 * eta)
        else:
            raise KeyError(name)
    return num / _den(den, f"{name} denominator")


def omega(params: ModelParams, u: complex, v: complex) -> complex:
    return 1.0 / _den(amplitude(params, "e01", u, v), "e01")


def _check_distinct(rapidities, min_sep: float = MIN_SEPARATION):
    for a, b in itertools.combinations(rapidities, 2):
        if abs(a - b) < min_sep:
            raise ValueError(f"rapidities {a} and {b} closer than {min_sep}")


def gamma_coefficient(params: ModelParams, i: int, rapidities, deltas=None) -> complex:
    """Gamma_i^{(n)} for the recurrence; ``i`` is 1-based, 2 <= i <= n."""
    us = [complex(x) for x in rapidities]
    n = len(us)
    if not 2 <= i <= n:
        raise IndexError(f"gamma index {i} outside 2..{n}")
    ui = us[i - 1]
    d1, d2, _ = deltas if deltas is not None else delta_functions(params, ui)
    pre = np.prod([omega(params, ui, us[j]) for j in range(1, i - 1)])
    others = [us[k] for k in range(1, n) if k != i - 1]
    t1 = d1 * amplitude(params, "e04", us[0], ui) * np.prod([amplitude(params, "a11", ui, x) for x in others])
    t2 = d2 * amplitude(params, "e05", us[0], ui) * np.prod([amplitude(params, "a21", ui, x) for x in others])
    return complex(pre * (t1 + t2))


@dataclass(frozen=True)
class BetheState:
    vector: np.ndarray
    rapidities: tuple[complex, ...]
    kind: str
    params_snapshot: ModelParams

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))


def _psi_vector(params: ModelParams, us: tuple[complex, ...], memo: dict) -> np.ndarray:
    if us in memo:
        return memo[us]
    if not us:
        out = pseudovacuum(params.length)
    else:
        ops = build_double_row(params, us[0])
        out = ops.B1 @ _psi_vector(params, us[1:], memo)
        if len(us) >= 2:
            acc = np.zeros_like(out)
            for i in range(2, len(us) + 1):
                rest = us[1:i - 1] + us[i:]
                acc += gamma_coefficient(params, i, us) * _psi_vector(params, rest, memo)
            out = out - ops.B2 @ acc
    memo[us] = out
    return out


def _prep(params: ModelParams, rapidities, max_n: int | None) -> tuple[complex, ...]:
    us = tuple(complex(x) for x in rapidities)
    cap = MAX_N if max_n is None else max_n
    if len(us) > cap:
        raise ValueError(f"n={len(us)} exceeds the configured maximum {cap}")
    _check_distinct(us)
    return us


def build_psi(params: ModelParams, rapidities, max_n: int | None = None) -> BetheState:
    us = _prep(params, rapidities, max_n)
    vec = _psi_vector(params, us, {})
    vec.setflags(write=False)
    return BetheState(vec, us, "psi", params)


def g_scalar(params: ModelParams, u: complex) -> complex:
    u = complex(u)
    eta = params.eta
    if params.kind is ModelKind.ZF:
        den = sh(u + eta / 2 - params.xi_plus)
    else:
        den = sh(u + 0.75 * eta - _ik_phase(params))
    d2 = delta_functions(params, u)[1]
    return params.beta_plus * sh(2 * u + eta) / _den(den, "g denominator") * d2


def s_function(params: ModelParams, u1: complex, u2: complex) -> complex:
    eta = params.eta
    s, d = complex(u1) + complex(u2), complex(u1) - complex(u2)
    if params.kind is ModelKind.ZF:
        num = sh(s) * sh(d - eta) * sh(s + 1.5 * eta)
        return num / _den(sh(d - eta / 2) * sh(s + eta / 2) ** 2, "s denominator")
    p = _ik_phase(params)
    den = sh(s) * ch(d + eta / 2) * ch(s + 1.5 * eta) ** 2
    bracket = ch(u1 + eta / 4 - p) * ch(u1 + 0.75 * eta + p) + ch(u2 - eta / 4 + p) * ch(u2 + 1.25 * eta - p)
    return ch(s + eta / 2) * sh(s + 2 * eta) / _den(den, "s denominator") * bracket


def g_coefficient(params: ModelParams, removed, rapidities) -> complex:
    """Coefficient of Psi_k(remaining) in Phi_n; ``removed`` holds 0-based indices."""
    us = [complex(x) for x in rapidities]
    removed = sorted(set(removed))
    if not removed:
        raise ValueError("removed index set must be nonempty")
    val = 1.0 + 0j
    for m in removed:
        val *= g_scalar(params, us[m])
        for mp in removed:
            if mp < m:
                val *= s_function(params, us[mp], us[m])
        for mpp in range(len(us)):
            if mpp in removed:
                continue
            val *= amplitude(params, "a21", us[m], us[mpp])
            if m > mpp:
                val *= omega(params, us[m], us[mpp])
    return val


def phi_terms(n: int):
    """Removed-index tuples of the Phi_n expansion, lexicographic within each size."""
    return [rem for r in range(1, n + 1) for rem in itertools.combinations(range(n), r)]


def build_phi(params: ModelParams, rapidities, max_n: int | None = None) -> BetheState:
    us = _prep(params, rapidities, max_n)
    memo: dict = {}
    out = _psi_vector(params, us, memo).copy()
    for rem in phi_terms(len(us)):
        keep = tuple(x for k, x in enumerate(us) if k not in rem)
        out += g_coefficient(params, rem, us) * _psi_vector(params, keep, memo)
    out.setflags(write=False)
    return BetheState(out, us, "phi", params)


def lambda_eigenvalue(params: ModelParams, u: complex, rapidities) -> complex:
    u = complex(u)
    w = omega_weights(params, u)
    dl = delta_functions(params, u)
    total = 0j
    for a, name in enumerate(("a11", "a21", "a31")):
        total += w[a] * dl[a] * np.prod([amplitude(params, name, u, x) for x in rapidities])
    return complex(total)


def theta_function(params: ModelParams, u: complex) -> complex:
    u = complex(u)
    eta = params.eta
    if params.kind is ModelKind.ZF:
        xi = params.xi_plus
        return sh(2 * u + eta) * sh(u + xi + eta / 2) / _den(sh(2 * u) * sh(u + eta / 2 - xi), "theta denominator")
    p = _ik_phase(params)
    return -sh(2 * u + eta) * sh(u + eta / 4 - 3 * p) / _den(sh(2 * u) * sh(u + 0.75 * eta - p), "theta denominator")


def bethe_residual(params: ModelParams, rapidities, j: int) -> complex:
    us = [complex(x) for x in rapidities]
    uj = us[j]
    d1, d2, _ = delta_functions(params, uj)
    prod = 1.0 + 0j
    for k, x in enumerate(us):
        if k != j:
            prod *= amplitude(params, "a21", uj, x) / _den(amplitude(params, "a11", uj, x), "a11")
    return d1 / _den(d2, "Delta2") + theta_function(params, uj) * prod


def bethe_residuals(params: ModelParams, rapidities) -> np.ndarray:
    return np.array([bethe_residual(params, rapidities, j) for j in range(len(rapidities))])

"""Single- and double-row monodromies, operator extraction and the transfer matrix.

Embedding convention: the full space is aux (x) site_1 (x) ... (x) site_L with
row-major Kronecker composition, so an aux-space index ``i`` selects rows
``i*3**L ... (i+1)*3**L - 1``. Two-auxiliary objects live on
aux_1 (x) aux_2 (x) quantum.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .boundary import build_k_minus, build_k_plus
from .numerics import kron, mat_inv, rel_residual
from .weights import I3, P9, ModelParams, build_r_matrix, eval_weights, r21

MAX_LENGTH = 4


class DegenerateError(ValueError):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def quantum_dim(length: int) -> int:
    return 3**length


def pseudovacuum(length: int) -> np.ndarray:
    v = np.zeros(quantum_dim(length), dtype=complex)
    v[0] = 1.0
    return v


def embed_aux_site(r: np.ndarray, site: int, length: int) -> np.ndarray:
    """Lift a 9x9 operator on aux (x) site to aux (x) site_1 ... site_L (site is 0-based)."""
    nfac = length + 1
    op = kron(r, np.eye(3 ** (length - 1))).reshape([3] * (2 * nfac))
    perm = list(range(nfac))
    perm[1], perm[1 + site] = perm[1 + site], perm[1]
    op = op.transpose(perm + [p + nfac for p in perm])
    return op.reshape(3 * 3**length, 3 * 3**length)


@dataclass(frozen=True)
class MonodromyBlocks:
    matrix: np.ndarray
    u: complex
    flag: str

    def block(self, i: int, j: int) -> np.ndarray:
        return aux_block(self.matrix, i, j)


def aux_block(full: np.ndarray, i: int, j: int) -> np.ndarray:
    d = full.shape[0] // 3
    return full[i * d:(i + 1) * d, j * d:(j + 1) * d]


def assemble_blocks(blocks) -> np.ndarray:
    return np.block([[np.asarray(blocks[i][j]) for j in range(3)] for i in range(3)])


def _check_length(params: ModelParams):
    if params.length > MAX_LENGTH:
        raise ValueError(f"length {params.length} exceeds desk-scale cap {MAX_LENGTH}")


@functools.lru_cache(maxsize=512)
def build_monodromy(params: ModelParams, u: complex) -> MonodromyBlocks:
    _check_length(params)
    r = build_r_matrix(params, u)
    t = np.eye(3 * quantum_dim(params.length), dtype=complex)
    for site in range(params.length):
        t = t @ embed_aux_site(r, site, params.length)
    return MonodromyBlocks(_frozen(t), complex(u), "plain")


@functools.lru_cache(maxsize=512)
def build_hat_monodromy(params: ModelParams, u: complex) -> MonodromyBlocks:
    inv = mat_inv(build_monodromy(params, -complex(u)).matrix)
    return MonodromyBlocks(_frozen(inv), complex(u), "hat")


@dataclass(frozen=True)
class OperatorSet:
    full: np.ndarray
    u: complex

    def _b(self, i, j):
        return aux_block(self.full, i, j)

    A1 = property(lambda s: s._b(0, 0))
    B1 = property(lambda s: s._b(0, 1))
    B2 = property(lambda s: s._b(0, 2))
    C1 = property(lambda s: s._b(1, 0))
    A2 = property(lambda s: s._b(1, 1))
    B3 = property(lambda s: s._b(1, 2))
    C2 = property(lambda s: s._b(2, 0))
    C3 = property(lambda s: s._b(2, 1))
    A3 = property(lambda s: s._b(2, 2))


@functools.lru_cache(maxsize=512)
def build_double_row(params: ModelParams, u: complex) -> OperatorSet:
    u = complex(u)
    d = quantum_dim(params.length)
    km = kron(build_k_minus(params, u).matrix, np.eye(d))
    full = build_monodromy(params, u).matrix @ km @ build_hat_monodromy(params, u).matrix
    return OperatorSet(_frozen(full), u)


@dataclass(frozen=True)
class ShiftedSet:
    D1: np.ndarray
    D2: np.ndarray
    D3: np.ndarray
    f_values: tuple[complex, complex, complex, complex]


def f_functions(params: ModelParams, u: complex, rtol: float = 1e-12) -> tuple[complex, complex, complex, complex]:
    w = eval_weights(params, 2 * complex(u))
    c, e, ht = w.c, w.e, w.h_tilde
    den = c * c - e
    if abs(den) < rtol * max(1.0, abs(c * c), abs(e)):
        raise DegenerateError(f"c(2u)^2 - e(2u) vanishes at u={u}")
    return c, ht, c * (ht - 1) / den, (c * c - ht * e) / den


def shifted_operators(opset: OperatorSet, params: ModelParams, u: complex | None = None) -> ShiftedSet:
    u = opset.u if u is None else u
    f = f_functions(params, u)
    d1 = opset.A1
    d2 = opset.A2 - f[0] * opset.A1
    d3 = opset.A3 - f[1] * opset.A1 - f[2] * d2
    return ShiftedSet(d1, d2, d3, f)


def omega_weights(params: ModelParams, u: complex) -> tuple[complex, complex, complex]:
    f1, f2, f3, _ = f_functions(params, u)
    kp = build_k_plus(params, u).matrix
    return (kp[0, 0] + f1 * kp[1, 1] + f2 * kp[2, 2], kp[1, 1] + f3 * kp[2, 2], kp[2, 2])


def transfer_trace(params: ModelParams, u: complex) -> np.ndarray:
    """t(u) = Tr_a[(K+ (x) 1) U(u)]."""
    d = quantum_dim(params.length)
    prod = kron(build_k_plus(params, u).matrix, np.eye(d)) @ build_double_row(params, u).full
    return sum(aux_block(prod, i, i) for i in range(3))


@functools.lru_cache(maxsize=512)
def transfer_matrix(params: ModelParams, u: complex) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (t, t_d, t_u); t is the trace route, t_d + t_u the decomposition."""
    u = complex(u)
    ops = build_double_row(params, u)
    sh = shifted_operators(ops, params, u)
    w1, w2, w3 = omega_weights(params, u)
    kp = build_k_plus(params, u).matrix
    td = w1 * sh.D1 + w2 * sh.D2 + w3 * sh.D3
    tu = kp[0, 1] * ops.C1 + kp[0, 2] * ops.C2 + kp[1, 2] * ops.C3
    t = transfer_trace(params, u)
    return _frozen(t), _frozen(td), _frozen(tu)


def periodic_transfer(params: ModelParams, u: complex) -> np.ndarray:
    t = build_monodromy(params, u).matrix
    return sum(aux_block(t, i, i) for i in range(3))


def _two_aux(op: np.ndarray, slot: int, d: int) -> np.ndarray:
    """Lift an (aux (x) quantum) operator to aux_1 (x) aux_2 (x) quantum."""
    x = op.reshape(3, d, 3, d)
    if slot == 1:
        return np.einsum("ipjq,kl->ikpjlq", x, I3).reshape(9 * d, 9 * d)
    return np.einsum("kplq,ij->ikpjlq", x, I3).reshape(9 * d, 9 * d)


def check_global_rtt(params: ModelParams, u: complex, v: complex) -> float:
    """Residual of Rc(u-v) T1(u) T2(v) = T1(v) T2(u) Rc(u-v) with Rc = P R."""
    d = quantum_dim(params.length)
    rc = kron(P9 @ build_r_matrix(params, u - v), np.eye(d))
    tu, tv = build_monodromy(params, u).matrix, build_monodromy(params, v).matrix
    lhs = rc @ _two_aux(tu, 1, d) @ _two_aux(tv, 2, d)
    rhs = _two_aux(tv, 1, d) @ _two_aux(tu, 2, d) @ rc
    return rel_residual(lhs, rhs)


def check_global_reflection(params: ModelParams, u: complex, v: complex) -> float:
    d = quantum_dim(params.length)
    eye = np.eye(d)
    u1 = _two_aux(build_double_row(params, u).full, 1, d)
    u2 = _two_aux(build_double_row(params, v).full, 2, d)
    lhs = kron(build_r_matrix(params, u - v), eye) @ u1 @ kron(r21(params, u + v), eye) @ u2
    rhs = u2 @ kron(build_r_matrix(params, u + v), eye) @ u1 @ kron(r21(params, u - v), eye)
    return rel_residual(lhs, rhs)


def commutator_residual(params: ModelParams, u: complex, v: complex) -> float:
    a = transfer_matrix(params, u)[0]
    b = transfer_matrix(params, v)[0]
    return float(np.linalg.norm(a @ b - b @ a) / (np.linalg.norm(a) * np.linalg.norm(b)))

"""Dense complex linear algebra used throughout the package.

Everything here is a thin, checked layer over numpy/scipy. Tolerances are
relative to operand Frobenius norms.
"""

from __future__ import annotations

import cmath
import warnings

import numpy as np
import scipy.linalg as sla

DEFAULT_RTOL = 1e-10


class DimensionError(ValueError):
    pass


class SingularMatrixError(np.linalg.LinAlgError):
    """Raised when a factorization hits a pivot below tolerance."""

    def __init__(self, message: str, pivot: float):
        super().__init__(f"{message} (pivot magnitude {pivot:.3e})")
        self.pivot = pivot


def as_cmatrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-d array, got shape {m.shape}")
    return m


def mat_mul(a, b) -> np.ndarray:
    a, b = as_cmatrix(a), as_cmatrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    out = a @ b
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("non-finite entries in matrix product")
    return out


def kron(*factors) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, as_cmatrix(f))
    return out


def mat_inv(a, rtol: float = DEFAULT_RTOL, cond_cap: float = 1e12) -> np.ndarray:
    """Inverse by LU with partial pivoting.

    Refuses when the smallest pivot is below ``rtol * max|a|`` or the
    1-norm condition estimate exceeds ``cond_cap``.
    """
    a = as_cmatrix(a)
    n, m = a.shape
    if n != m:
        raise DimensionError(f"cannot invert non-square {a.shape}")
    scale = np.abs(a).max()
    if scale == 0.0:
        raise SingularMatrixError("zero matrix", 0.0)
    with warnings.catch_warnings():
        # an exactly zero pivot is reported below as SingularMatrixError
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(a, check_finite=True)
    pivots = np.abs(np.diag(lu))
    if pivots.min() < rtol * scale:
        raise SingularMatrixError("matrix singular to tolerance", float(pivots.min()))
    inv = sla.lu_solve((lu, piv), np.eye(n, dtype=complex))
    cond = np.linalg.norm(a, 1) * np.linalg.norm(inv, 1)
    if cond > cond_cap:
        raise SingularMatrixError(f"condition estimate {cond:.3e} above cap", float(pivots.min()))
    return inv


def lstsq(a, b, rtol: float = DEFAULT_RTOL) -> tuple[np.ndarray, float]:
    """Least-squares solve via SVD; returns ``(x, residual_norm)``.

    Raises SingularMatrixError if the smallest singular value is below
    ``rtol`` times the largest.
    """
    a = as_cmatrix(a)
    b = np.asarray(b, dtype=complex)
    if a.shape[0] < a.shape[1]:
        raise DimensionError(f"underdetermined system {a.shape}")
    if b.shape[0] != a.shape[0]:
        raise DimensionError(f"rhs length {b.shape[0]} does not match {a.shape}")
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[-1] <= rtol * s[0]:
        raise SingularMatrixError("rank-deficient least-squares matrix", float(s[-1] if s.size else 0.0))
    x = vh.conj().T @ ((u.conj().T @ b).T / s).T
    return x, float(np.linalg.norm(a @ x - b))


def condition_number(a) -> float:
    s = np.linalg.svd(as_cmatrix(a), compute_uv=False)
    return float(s[0] / s[-1]) if s[-1] > 0 else float("inf")


def rel_residual(lhs, rhs) -> float:
    lhs = np.asarray(lhs)
    denom = np.linalg.norm(lhs)
    diff = np.linalg.norm(lhs - np.asarray(rhs))
    return float(diff / denom) if denom > 0 else float(diff)


def csinh(z: complex) -> complex:
    # sinh(x+iy) = sinh x cos y + i cosh x sin y
    return cmath.sinh(complex(z))


def ccosh(z: complex) -> complex:
    return cmath.cosh(complex(z))

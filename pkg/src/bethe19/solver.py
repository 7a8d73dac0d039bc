"""Numerical solution of the Bethe equations by grid scan and damped Newton."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .aba import MAX_N, bethe_residuals
from .numerics import condition_number
from .weights import ModelKind, ModelParams

CONVERGENCE_SLACK = 10.0
HALF_PI = 0.5j * math.pi


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class RootSearchConfig:
    re_min: float = -1.0
    re_max: float = 1.0
    im_min: float = -math.pi / 2
    im_max: float = math.pi / 2
    step: float = 0.05
    newton_tol: float = 1e-12
    max_iter: int = 60
    damping: float = 1.0
    dedup_radius: float = 1e-6
    exclusion_radius: float = 1e-3
    seed: int = 0
    lattice_size: int = 5
    random_starts: int = 60
    perturbation: float = 0.1

    def __post_init__(self):
        if self.step <= 0 or self.newton_tol <= 0 or self.dedup_radius <= 0 or self.exclusion_radius <= 0:
            raise ValueError("step and tolerances must be positive")
        if self.re_max <= self.re_min or self.im_max <= self.im_min:
            raise ValueError("empty search rectangle")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")


@dataclass(frozen=True)
class RootSet:
    rapidities: tuple[complex, ...]
    residuals: tuple[float, ...]
    converged: bool
    iterations: int
    jacobian_cond: float
    flags: tuple[str, ...] = field(default=())

    @property
    def n(self) -> int:
        return len(self.rapidities)

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else 0.0


def canonical_rapidity(u: complex) -> complex:
    """Representative mod i*pi with imaginary part in [-pi/2, pi/2)."""
    u = complex(u)
    im = (u.imag + math.pi / 2) % math.pi - math.pi / 2
    return complex(u.real, im)


def canonical_key(rapidities) -> tuple[tuple[float, float], ...]:
    return tuple(sorted((z.real, z.imag) for z in map(canonical_rapidity, rapidities)))


def _near_zero(z: complex, radius: float) -> bool:
    return abs(np.sinh(z)) < radius


def guard_violations(params: ModelParams, rapidities, radius: float) -> list[str]:
    """Labels of the kinematic singular sets that the rapidities sit on."""
    eta = params.eta
    us = [complex(x) for x in rapidities]
    out = []
    single = {"2u": lambda u: 2 * u, "2u+eta": lambda u: 2 * u + eta, "u+eta": lambda u: u + eta}
    if params.kind is ModelKind.ZF:
        single["u+eta/2"] = lambda u: u + eta / 2
        single["theta"] = lambda u: u + eta / 2 - params.xi_plus
    else:
        p = params.epsilon * math.pi / 4 * 1j
        single["cosh(u+3eta/2)"] = lambda u: u + 1.5 * eta + HALF_PI
        single["theta"] = lambda u: u + 0.75 * eta - p
    for j, u in enumerate(us):
        for label, fn in single.items():
            if _near_zero(fn(u), radius):
                out.append(f"u{j}:{label}")
    diff_shifts = [0, -eta / 2, eta / 2, -eta, eta,
                   HALF_PI + eta / 2, HALF_PI - eta / 2, HALF_PI + 1.5 * eta]
    sum_shifts = [0, eta / 2, eta, 1.5 * eta, 2 * eta,
                  HALF_PI + 1.5 * eta, HALF_PI + eta / 2, HALF_PI + 2.5 * eta]
    for i, j in itertools.permutations(range(len(us)), 2):
        d, s = us[i] - us[j], us[i] + us[j]
        if any(_near_zero(d + c, radius) for c in diff_shifts):
            out.append(f"u{i}-u{j}")
        if any(_near_zero(s + c, radius) for c in sum_shifts):
            out.append(f"u{i}+u{j}")
    return out


def _residual_vector(params: ModelParams, us: np.ndarray) -> np.ndarray:
    try:
        with np.errstate(all="ignore"):
            r = bethe_residuals(params, us)
    except (ValueError, ZeroDivisionError, ArithmeticError):
        return np.full(len(us), np.inf, dtype=complex)
    return r if np.all(np.isfinite(r)) else np.full(len(us), np.inf, dtype=complex)


def _jacobian(params: ModelParams, us: np.ndarray) -> np.ndarray:
    n = len(us)
    jac = np.zeros((n, n), dtype=complex)
    with np.errstate(invalid="ignore", over="ignore"):
        for k in range(n):
            h = 1e-7 * (abs(us[k]) + 1)
            e = np.zeros(n, dtype=complex)
            e[k] = h
            jac[:, k] = (_residual_vector(params, us + e) - _residual_vector(params, us - e)) / (2 * h)
    return jac


def solve_system(params: ModelParams, n: int, initial_guess, config: RootSearchConfig = RootSearchConfig()) -> RootSet:
    """Damped Newton with backtracking on the n-component Bethe residual map."""
    us = np.array([complex(x) for x in initial_guess], dtype=complex)
    if us.shape != (n,):
        raise ValueError(f"expected {n} initial values, got {us.shape}")
    f = _residual_vector(params, us)
    if not np.all(np.isfinite(f)):
        raise SolverError("initial guess sits on a singular set")
    norm = np.abs(f).max()
    it, cond = 0, float("nan")
    for it in range(1, config.max_iter + 1):
        if norm < config.newton_tol:
            break
        jac = _jacobian(params, us)
        if not np.all(np.isfinite(jac)):
            raise SolverError("Jacobian not finite")
        cond = condition_number(jac)
        if cond > 1e14:
            raise SolverError(f"Jacobian singular to tolerance (cond {cond:.2e})")
        delta = np.linalg.solve(jac, f)
        lam = config.damping
        for _ in range(9):
            trial = us - lam * delta
            ft = _residual_vector(params, trial)
            nt = np.abs(ft).max()
            if nt < norm:
                break
            lam /= 2
        else:
            break
        us, f, norm = trial, ft, nt
        if n > 1 and min(abs(a - b) for a, b in itertools.combinations(us, 2)) < config.dedup_radius:
            raise SolverError("rapidities collided during iteration")
    if n:
        jac = _jacobian(params, us)
        cond = condition_number(jac) if np.all(np.isfinite(jac)) else float("inf")
    res = tuple(float(x) for x in np.abs(f))
    converged = bool(norm < config.newton_tol * CONVERGENCE_SLACK)
    return RootSet(tuple(complex(x) for x in us), res, converged, it, cond)


def _accept(params: ModelParams, rs: RootSet, config: RootSearchConfig) -> RootSet | None:
    if not rs.converged:
        return None
    if guard_violations(params, rs.rapidities, config.exclusion_radius):
        return None
    us = [canonical_rapidity(u) for u in rs.rapidities]
    us.sort(key=lambda z: (z.real, z.imag))
    # re-evaluate on the canonical representatives (the equations are i*pi periodic)
    res = tuple(float(x) for x in np.abs(_residual_vector(params, np.array(us))))
    return replace(rs, rapidities=tuple(us), residuals=res)


def _same_multiset(a, b, radius: float) -> bool:
    a = [canonical_rapidity(x) for x in a]
    b = [canonical_rapidity(x) for x in b]

    def close(x, y):
        d = x - y
        return min(abs(d), abs(d - 1j * math.pi), abs(d + 1j * math.pi)) < radius

    return any(all(close(x, y) for x, y in zip(a, perm)) for perm in itertools.permutations(b))


def deduplicate(sets, radius: float) -> list[RootSet]:
    out: list[RootSet] = []
    for rs in sets:
        if not any(_same_multiset(rs.rapidities, o.rapidities, radius) for o in out):
            out.append(rs)
    out.sort(key=lambda r: canonical_key(r.rapidities))
    return out


def _flag_mirrors(params: ModelParams, sets: list[RootSet], radius: float) -> list[RootSet]:
    """Flag sets that map onto another set under u -> -u - eta applied to a nonempty subset."""
    out = []
    for i, rs in enumerate(sets):
        flags = list(rs.flags)
        n = rs.n
        for mask in range(1, 2**n):
            img = _mirror(params, rs.rapidities, mask)
            for j, other in enumerate(sets):
                if j != i and _same_multiset(img, other.rapidities, radius * 100):
                    flags.append(f"mirror-of:{j}")
        out.append(replace(rs, flags=tuple(sorted(set(flags)))))
    return out


def _mirror(params: ModelParams, rapidities, mask: int) -> list[complex]:
    return [-u - params.eta if mask >> k & 1 else u for k, u in enumerate(rapidities)]


def _polish_all(params: ModelParams, n: int, guesses, config: RootSearchConfig) -> list[RootSet]:
    found = []
    for g in guesses:
        try:
            rs = solve_system(params, n, g, config)
        except (SolverError, np.linalg.LinAlgError):
            continue
        rs = _accept(params, rs, config)
        if rs is not None:
            found.append(rs)
    return found


def _grid(config: RootSearchConfig):
    re = np.arange(config.re_min, config.re_max + config.step / 2, config.step)
    im = np.arange(config.im_min, config.im_max + config.step / 2, config.step)
    return re, im


def scan_n1(params: ModelParams, config: RootSearchConfig = RootSearchConfig()) -> list[RootSet]:
    re, im = _grid(config)
    vals = np.full((len(re), len(im)), np.inf)
    for a, x in enumerate(re):
        for b, y in enumerate(im):
            r = _residual_vector(params, np.array([complex(x, y)]))
            vals[a, b] = abs(r[0])
    found = []
    for a in range(1, len(re) - 1):
        for b in range(1, len(im) - 1):
            v = vals[a, b]
            if np.isfinite(v) and v <= vals[a - 1:a + 2, b - 1:b + 2].min():
                try:
                    rs = solve_system(params, 1, [complex(re[a], im[b])], config)
                except SolverError:
                    continue
                rs = _accept(params, rs, config)
                if rs is not None:
                    found.append(rs)
    return _flag_mirrors(params, deduplicate(found, config.dedup_radius), config.dedup_radius)


def _lattice_guesses(n: int, config: RootSearchConfig):
    re = np.linspace(config.re_min, config.re_max, config.lattice_size + 2)[1:-1]
    im = np.linspace(config.im_min, config.im_max, config.lattice_size + 2)[1:-1]
    pts = [complex(x, y) for x in re for y in im]
    # deterministic subsample of n-subsets, strided to stay cheap
    combos = list(itertools.combinations(pts, n))
    stride = max(1, len(combos) // 400)
    return [list(c) for c in combos[::stride]]


def multi_start(params: ModelParams, n: int, config: RootSearchConfig = RootSearchConfig(),
                allow_conjectural: bool = False) -> list[RootSet]:
    if n < 1:
        return []
    if n > MAX_N and not allow_conjectural:
        raise ValueError(f"n={n} lies beyond the verified range (max {MAX_N}); pass allow_conjectural")
    if n == 1:
        return scan_n1(params, config)
    rng = np.random.default_rng(config.seed)
    guesses = _lattice_guesses(n, config)
    lower = multi_start(params, 1, config)
    singles = [rs.rapidities[0] for rs in lower]
    for combo in itertools.combinations(singles, min(n, len(singles))):
        for _ in range(4):
            base = list(combo) + [complex(*rng.uniform(-1, 1, 2)) for _ in range(n - len(combo))]
            jitter = config.perturbation * (rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n))
            guesses.append([b + j for b, j in zip(base, jitter)])
    for _ in range(config.random_starts):
        guesses.append(list(rng.uniform(config.re_min, config.re_max, n)
                            + 1j * rng.uniform(config.im_min, config.im_max, n)))
    sets = deduplicate(_polish_all(params, n, guesses, config), config.dedup_radius)
    # close the list under u -> -u - eta on subsets, re-polishing each image
    frontier = sets
    while frontier:
        images = [_mirror(params, rs.rapidities, mask) for rs in frontier for mask in range(1, 2**n)]
        merged = deduplicate(sets + _polish_all(params, n, images, config), config.dedup_radius)
        frontier = [rs for rs in merged if not any(_same_multiset(rs.rapidities, o.rapidities, config.dedup_radius)
                                                   for o in sets)]
        sets = merged
    if n > MAX_N:
        sets = [replace(rs, flags=rs.flags + ("conjectural",)) for rs in sets]
    return _flag_mirrors(params, sets, config.dedup_radius)

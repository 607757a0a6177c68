"""Discrete Hammerstein operator pair and a shell-localized fixed point solver.

``T_i(x, y)(t_k) = h * sum_j G_i(t_k, s_j) f_i(s_j, x_j, y_j)`` on the uniform
periodic grid, solved by damped Picard iteration with a Newton fallback.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .cone import (
    EXPANSIVE,
    ConeSpec,
    OperatorHandle,
    RetractionConfig,
    ShellBounds,
    extend_operator,
    star_transform,
    sup_norm,
    unstar_fixed_point,
)
from .errors import ConfigurationError, EvaluationError, InputError, NoConvergenceError
from .expr import Expression
from .green import build_green, grid_nodes

log = logging.getLogger(__name__)

NONNEGATIVE = "nonnegative"
NONPOSITIVE = "nonpositive"
_VARS = ("x", "y")


@dataclass(frozen=True)
class SingularForm:
    """``sign * (factor / v**exponent + pert)`` with ``v`` the singular variable."""

    variable: str
    exponent: float
    factor: str = "1"
    pert: str = "0"
    sign: int = 1

    def __post_init__(self):
        if self.variable not in _VARS:
            raise InputError(f"singular variable must be 'x' or 'y', got {self.variable!r}")
        if not self.exponent > 0:
            raise InputError("singular exponent must be positive")
        if self.sign not in (1, -1):
            raise InputError("singular sign must be +1 or -1")

    def compile(self) -> Callable:
        g = Expression(self.factor)
        p = Expression(self.pert)
        idx = _VARS.index(self.variable)
        lam = float(self.exponent)
        s = float(self.sign)

        def f(t, x, y):
            v = np.asarray((x, y)[idx], dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                return s * (g(t, x, y) / np.power(v, lam) + p(t, x, y))

        return f


@dataclass(frozen=True)
class Nonlinearity:
    """Right-hand side ``f(t, x, y)``, vectorized over numpy arrays.

    ``singular`` flags, per argument ``(x, y)``, whether ``f`` blows up at zero.
    ``source`` or ``form`` keep the textual definition for serialization.
    """

    func: Callable = field(compare=False)
    sign: str = NONNEGATIVE
    singular: tuple = ("none", "none")
    source: str | None = None
    form: SingularForm | None = None

    def __post_init__(self):
        if self.sign not in (NONNEGATIVE, NONPOSITIVE):
            raise InputError(f"unknown sign declaration {self.sign!r}")
        for flag in self.singular:
            if flag not in ("none", "at_zero"):
                raise InputError(f"unknown singular flag {flag!r}")
        self._check_sign()

    @classmethod
    def from_expression(cls, source: str, sign: str = NONNEGATIVE):
        return cls(func=Expression(source), sign=sign, source=source)

    @classmethod
    def from_singular(cls, form: SingularForm, sign: str | None = None):
        if sign is None:
            sign = NONNEGATIVE if form.sign > 0 else NONPOSITIVE
        flags = tuple("at_zero" if v == form.variable else "none" for v in _VARS)
        return cls(func=form.compile(), sign=sign, singular=flags, form=form)

    def __call__(self, t, x, y):
        return self.func(t, x, y)

    def _check_sign(self, samples: int = 256):
        rng = np.random.default_rng(0)
        t = rng.uniform(0.0, 10.0, samples)
        x, y = 10.0 ** rng.uniform(-3, 3, (2, samples))
        with np.errstate(all="ignore"):
            v = np.asarray(self.func(t, x, y), dtype=float)
        v = v[np.isfinite(v)]
        bad = v < 0 if self.sign == NONNEGATIVE else v > 0
        if np.any(bad):
            raise ConfigurationError(f"nonlinearity violates its declared sign ({self.sign})")

    def __eq__(self, other):
        if not isinstance(other, Nonlinearity):
            return NotImplemented
        if self.source is None and self.form is None:
            return self is other
        return (self.source, self.form, self.sign, self.singular) == (
            other.source, other.form, other.sign, other.singular)

    def __hash__(self):
        return hash((self.source, self.form, self.sign, self.singular))


def evaluate_singular(nl: Nonlinearity, t, x, y, floor):
    """Evaluate ``nl`` with its singular arguments clamped below at ``floor``.

    ``floor`` is a positive scalar or an ``(x_floor, y_floor)`` pair. Returns
    ``(values, clamped)``.
    """
    floors = (floor, floor) if np.isscalar(floor) else tuple(floor)
    args = [np.asarray(x, dtype=float), np.asarray(y, dtype=float)]
    clamped = False
    for k, flag in enumerate(nl.singular):
        if flag == "at_zero":
            if not floors[k] > 0:
                raise EvaluationError("clamp floor must be positive")
            low = args[k] < floors[k]
            if np.any(low):
                clamped = True
                args[k] = np.maximum(args[k], floors[k])
    with np.errstate(all="ignore"):
        v = np.asarray(nl.func(t, args[0], args[1]), dtype=float)
    if not np.all(np.isfinite(v)):
        raise EvaluationError("nonlinearity is not finite at the evaluation points")
    return v, clamped


@dataclass(frozen=True)
class ProblemSpec:
    """``x'' + a_1 x = f_1(t, x, y)``, ``y'' + a_2 y = f_2(t, x, y)``, T-periodic."""

    T: float
    coeffs: tuple
    nonlins: tuple
    n: int = 256

    def __post_init__(self):
        if len(self.coeffs) != 2 or len(self.nonlins) != 2:
            raise InputError("a problem has exactly two components")
        for a in self.coeffs:
            if not math.isclose(a.T, self.T, rel_tol=1e-12):
                raise InputError("coefficient period differs from problem period")

    @cached_property
    def kernels(self) -> tuple:
        return tuple(build_green(a, self.n) for a in self.coeffs)

    @property
    def nodes(self) -> np.ndarray:
        return grid_nodes(self.T, self.n)

    def cones(self) -> tuple:
        return tuple(ConeSpec(k.c) for k in self.kernels)

    def check_sign_compatibility(self):
        for i, (k, nl) in enumerate(zip(self.kernels, self.nonlins)):
            want = NONNEGATIVE if k.sign == "positive" else NONPOSITIVE
            if nl.sign != want:
                raise ConfigurationError(
                    f"component {i + 1}: {k.sign} Green's function needs a {want} "
                    f"nonlinearity, got {nl.sign}"
                )


def assemble(problem: ProblemSpec, floors=None, kernels=None) -> OperatorHandle:
    """Build the discrete operator pair.

    ``floors[i]`` is the clamp floor for component ``i`` when it appears as a
    singular argument; ``None`` disables clamping.
    """
    kernels = kernels if kernels is not None else problem.kernels
    problem.check_sign_compatibility()
    s = grid_nodes(problem.T, problem.n)
    nls = problem.nonlins

    def fn(pair, trace):
        x, y = (np.asarray(u, dtype=float) for u in pair)
        out = []
        for k, nl in zip(kernels, nls):
            if floors is not None and "at_zero" in nl.singular:
                f, clamped = evaluate_singular(nl, s, x, y, floors)
                if clamped and trace is not None:
                    trace.clamped = True
            else:
                with np.errstate(all="ignore"):
                    f = np.asarray(nl.func(s, x, y), dtype=float)
                if not np.all(np.isfinite(f)):
                    raise EvaluationError("nonlinearity is not finite on the iterate")
            out.append(k.apply(f))
        return tuple(out)

    return OperatorHandle(fn=fn, label="T")


@dataclass(frozen=True)
class SolverConfig:
    damping: float = 0.5
    tol: float = 1e-8
    loc_rtol: float = 1e-6
    max_picard: int = 400
    stall_window: int = 10
    stall_reduction: float = 0.01
    max_newton: int = 40
    handoff: float = 1e-3
    fd_rel: float = 1e-6
    retraction: RetractionConfig = field(default_factory=RetractionConfig)


@dataclass
class SolveResult:
    solution: tuple
    residual: float
    norms: tuple
    localization: tuple
    cone_ok: tuple
    iterations: int
    strategy: str
    clamp_activity: bool
    tol: float = 1e-8
    start: int = 0

    @property
    def success(self) -> bool:
        return (
            math.isfinite(self.residual)
            and self.residual <= self.tol
            and all(self.localization)
            and all(self.cone_ok)
            and not self.clamp_activity
        )


def _split(z, n):
    return z[:n], z[n:]


def _residual(op, z, n):
    x, y = _split(z, n)
    tx, ty = op((x, y))
    return z - np.concatenate([tx, ty])


def _picard(op, z, cfg, n):
    """Picard iteration that takes the full step when it halves the residual
    and the damped step otherwise.

    Returns ``(z, residual, steps, stalled, best_z)``.
    """
    F = _residual(op, z, n)
    res = float(np.abs(F).max())
    history = [res]
    best = (res, z)
    for step in range(1, cfg.max_picard + 1):
        if res <= cfg.tol:
            return z, res, step - 1, False, z
        full = z - F
        try:
            F_full = _residual(op, full, n)
            res_full = float(np.abs(F_full).max())
        except EvaluationError:
            res_full = math.inf
        if res_full <= 0.5 * res:
            z, F, res = full, F_full, res_full
        else:
            z = z - cfg.damping * F
            F = _residual(op, z, n)
            res = float(np.abs(F).max())
        if res < best[0]:
            best = (res, z)
        history.append(res)
        if len(history) > cfg.stall_window:
            if history[-1] > (1.0 - cfg.stall_reduction) * history[-1 - cfg.stall_window]:
                return z, res, step, True, best[1]
    return z, res, cfg.max_picard, res > cfg.tol, best[1] if res > cfg.tol else z


def fd_jacobian(F, z, F0=None, rel=1e-6):
    """Dense forward-difference Jacobian of ``F`` at ``z``."""
    F0 = F(z) if F0 is None else F0
    J = np.empty((F0.size, z.size))
    for j in range(z.size):
        step = rel * (1.0 + abs(z[j]))
        zp = z.copy()
        zp[j] += step
        J[:, j] = (F(zp) - F0) / step
    return J


def newton(F, z, tol, max_iter=40, rel=1e-6):
    """Newton with backtracking on the sup-norm of ``F``. Returns (z, res, iterations)."""
    Fz = F(z)
    res = float(np.abs(Fz).max())
    for it in range(1, max_iter + 1):
        if res <= tol:
            return z, res, it - 1
        J = fd_jacobian(F, z, Fz, rel)
        try:
            d = np.linalg.solve(J, -Fz)
        except np.linalg.LinAlgError:
            d = np.linalg.lstsq(J, -Fz, rcond=None)[0]
        step = 1.0
        for _ in range(12):
            zn = z + step * d
            try:
                Fn = F(zn)
                rn = float(np.abs(Fn).max())
            except (EvaluationError, ConfigurationError, FloatingPointError):
                rn = math.inf
            if math.isfinite(rn) and rn < res:
                break
            step *= 0.5
        else:
            return z, res, it
        z, Fz, res = zn, Fn, rn
    return z, res, max_iter


def _certify(raw, pair, shell, cones, cfg):
    out, trace = raw.evaluate(pair)
    res = max(sup_norm(np.asarray(p) - np.asarray(o)) for p, o in zip(pair, out))
    norms = tuple(sup_norm(u) for u in pair)
    loc = shell.contains(pair, cfg.loc_rtol)
    cone_ok = tuple(c.contains(u) for c, u in zip(cones, pair))
    return res, norms, loc, cone_ok, trace.clamped


def clamp_floors(shell: ShellBounds, cones) -> tuple:
    return tuple(c.c * r / 2.0 for c, r in zip(cones, shell.r))


def solve_fixed_point(problem: ProblemSpec, shell: ShellBounds, cfg: SolverConfig | None = None):
    """Find a fixed point of the operator pair inside ``shell``.

    Expansive components are star-transformed, the result is extended by the
    shell retraction, and nine constant starts are iterated. The best converged
    start (smallest residual of the raw operator) is returned.

    Raises
    ------
    NoConvergenceError
        If no start reaches ``cfg.tol``; ``best`` holds the best attempt.
    """
    cfg = cfg or SolverConfig()
    n = problem.n
    cones = problem.cones()
    floors = clamp_floors(shell, cones)
    raw = assemble(problem, floors=floors)

    starred = {i for i, b in enumerate(shell.behavior) if b == EXPANSIVE}
    op = raw
    for i in sorted(starred):
        op = star_transform(op, i, shell)
    N = extend_operator(op, shell, cfg.retraction, cones, strict=False)

    def levels(i):
        r, R = shell.r[i], shell.R[i]
        return (r, math.sqrt(r * R), R)

    starts = [(a, b) for a in levels(0) for b in levels(1)]
    results = []
    for k, (a, b) in enumerate(starts):
        z0 = np.concatenate([np.full(n, a), np.full(n, b)])
        try:
            z, res, iters, stalled, best_z = _picard(N, z0, cfg, n)
            strategy = "picard"
            if res > cfg.tol:
                target = max(cfg.tol, cfg.handoff * (1.0 + float(np.abs(best_z).max())))
                z, res, more = newton(
                    lambda w: _residual(N, w, n), best_z, target, cfg.max_newton, cfg.fd_rel
                )
                iters += more
                strategy = "picard+newton"
        except (EvaluationError, ConfigurationError, np.linalg.LinAlgError) as exc:
            log.debug("start %d failed: %s", k, exc)
            continue
        v = _split(z, n)
        if not all(shell.contains(v, cfg.loc_rtol)):
            continue
        u = unstar_fixed_point(v, starred, shell, cfg.loc_rtol)
        raw_res = _certify(raw, u, shell, cones, cfg)[0]
        if raw_res > cfg.tol:
            # the extension's sup-norm terms are not smooth; finish on the raw map
            try:
                w, _, more = newton(
                    lambda w: _residual(raw, w, n), np.concatenate(u), cfg.tol,
                    cfg.max_newton, cfg.fd_rel,
                )
            except (EvaluationError, ConfigurationError, np.linalg.LinAlgError):
                continue
            u = _split(w, n)
            iters += more
            strategy += "+polish"
            raw_res = _certify(raw, u, shell, cones, cfg)[0]
        results.append((raw_res, k, u, iters, strategy))

    if not results:
        raise NoConvergenceError("every start failed to evaluate", best=None)
    results.sort(key=lambda item: (item[0], item[1]))
    res, k, u, iters, strategy = results[0]
    res, norms, loc, cone_ok, clamped = _certify(raw, u, shell, cones, cfg)
    result = SolveResult(
        solution=tuple(np.asarray(c) for c in u), residual=res, norms=norms,
        localization=loc, cone_ok=cone_ok, iterations=iters, strategy=strategy,
        clamp_activity=clamped, tol=cfg.tol, start=k,
    )
    if not res <= cfg.tol:
        raise NoConvergenceError(
            f"no start converged to {cfg.tol:g}; best residual {res:.3e}", best=result
        )
    return result

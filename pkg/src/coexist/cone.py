"""Cones of sampled functions, the shell retraction, and the star transforms.

A point of the product space is a pair ``(x1, x2)`` of 1-D arrays. The product
norm is the maximum of the component sup-norms.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, InvariantViolation

COMPRESSIVE = "compressive"
EXPANSIVE = "expansive"


def sup_norm(u) -> float:
    u = np.asarray(u, dtype=float)
    if u.size == 0:
        return 0.0
    return float(np.abs(u).max())


def product_norm(pair) -> float:
    return max(sup_norm(u) for u in pair)


@dataclass(frozen=True)
class ConeSpec:
    """``K = {u >= 0 : min u >= c * max u}`` on the grid."""

    c: float

    def __post_init__(self):
        if not 0.0 < self.c < 1.0:
            raise DomainError(f"cone constant must lie in (0, 1), got {self.c}")

    def contains(self, u, tol: float = 1e-9) -> bool:
        u = np.asarray(u, dtype=float)
        top = float(u.max())
        slack = tol * max(1.0, abs(top))
        return bool(u.min() >= -slack and u.min() >= self.c * top - slack)


@dataclass(frozen=True)
class ShellBounds:
    r: tuple
    R: tuple
    behavior: tuple = (COMPRESSIVE, COMPRESSIVE)

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(float(v) for v in self.r))
        object.__setattr__(self, "R", tuple(float(v) for v in self.R))
        object.__setattr__(self, "behavior", tuple(self.behavior))
        if not (len(self.r) == len(self.R) == len(self.behavior)):
            raise DomainError("radii and behavior tags must have matching lengths")
        for r, R in zip(self.r, self.R):
            if not 0.0 < r < R:
                raise DomainError(f"shell needs 0 < r < R, got r={r}, R={R}")
        for b in self.behavior:
            if b not in (COMPRESSIVE, EXPANSIVE):
                raise DomainError(f"unknown behavior tag {b!r}")

    @property
    def expansive_count(self) -> int:
        return sum(b == EXPANSIVE for b in self.behavior)

    def contains(self, pair, rtol: float = 1e-6) -> tuple:
        out = []
        for u, r, R in zip(pair, self.r, self.R):
            nu = sup_norm(u)
            out.append(bool(r * (1 - rtol) <= nu <= R * (1 + rtol)))
        return tuple(out)


@dataclass(frozen=True)
class RetractionConfig:
    """Seeds ``h_i``; ``None`` means the constant function 1 of matching length."""

    h: tuple = (None, None)

    def seed(self, i: int, n: int) -> np.ndarray:
        h = self.h[i] if i < len(self.h) else None
        if h is None:
            return np.ones(n)
        h = np.asarray(h, dtype=float)
        if h.shape != (n,) or h.min() < 0 or h.max() <= 0:
            raise DomainError("retraction seed must be a nonzero nonnegative grid function")
        return h


@dataclass
class EvalTrace:
    """Side information collected while evaluating an operator chain."""

    rescaled: list = field(default_factory=list)
    retracted: list = field(default_factory=list)
    clamped: bool = False


@dataclass(frozen=True)
class OperatorHandle:
    """Immutable pair operator ``(x1, x2) -> (T1, T2)``.

    ``fn(pair, trace)`` does the work; ``trace`` may be ``None``.
    """

    fn: Callable
    shell: ShellBounds | None = None
    label: str = "T"

    def __call__(self, pair):
        return self.fn(tuple(pair), None)

    def evaluate(self, pair):
        trace = EvalTrace()
        out = self.fn(tuple(pair), trace)
        return out, trace


def retract(x, r: float, h=None) -> np.ndarray:
    """Push ``x`` with ``||x|| < r`` onto the sphere of radius ``r``; identity otherwise."""
    x = np.asarray(x, dtype=float)
    nx = sup_norm(x)
    if nx >= r:
        return x
    if h is None:
        h = np.ones_like(x)
    y = x + (r - nx) ** 2 * np.asarray(h, dtype=float)
    ny = sup_norm(y)
    if ny == 0.0:
        raise InvariantViolation("retraction denominator vanished")
    return r * y / ny


def extend_operator(
    T: OperatorHandle,
    shell: ShellBounds,
    cfg: RetractionConfig | None = None,
    cones: Sequence[ConeSpec] | None = None,
    strict: bool = True,
) -> OperatorHandle:
    """Return ``N = T o rho`` defined on the ball ``||x_i|| <= R_i``.

    Components above ``R_i`` are first rescaled radially to ``R_i`` (recorded in
    the trace). With ``strict`` and ``cones`` given, inputs outside the cone
    raise :class:`DomainError`.
    """
    cfg = cfg or RetractionConfig()

    def fn(pair, trace):
        moved = []
        for i, (u, r, R) in enumerate(zip(pair, shell.r, shell.R)):
            u = np.asarray(u, dtype=float)
            if strict and cones is not None and not cones[i].contains(u):
                raise DomainError(f"component {i + 1} is not in its cone")
            nu = sup_norm(u)
            if nu > R:
                u = u * (R / nu)
                if trace is not None:
                    trace.rescaled.append(i)
            elif nu < r and trace is not None:
                trace.retracted.append(i)
            moved.append(retract(u, r, cfg.seed(i, u.size)))
        return T.fn(tuple(moved), trace)

    return OperatorHandle(fn=fn, shell=shell, label=f"ext({T.label})")


def star_factor(u, r: float, R: float) -> float:
    """``sigma(u) = (R + r)/||u|| - 1``; swaps the spheres of radii ``r`` and ``R``."""
    nu = sup_norm(u)
    if nu < r * (1 - 1e-9):
        raise DomainError(f"star factor undefined below the inner radius ({nu} < {r})")
    return (R + r) / nu - 1.0


def star_transform(T: OperatorHandle, i: int, shell: ShellBounds) -> OperatorHandle:
    """Turn the expansive component ``i`` (0-based) into a compressive one.

    The argument is unstarred in every component before ``T`` is applied, and
    component ``i`` of the output is divided by the same factor. Fixed points
    ``v`` of the result map to fixed points ``sigma(v_i) v_i`` of ``T``.
    """
    r, R = shell.r[i], shell.R[i]

    def fn(pair, trace):
        s = star_factor(pair[i], r, R)
        moved = list(pair)
        moved[i] = s * np.asarray(pair[i], dtype=float)
        out = list(T.fn(tuple(moved), trace))
        out[i] = np.asarray(out[i]) / s
        return tuple(out)

    return OperatorHandle(fn=fn, shell=shell, label=f"star{i + 1}({T.label})")


def unstar_fixed_point(v, starred, shell: ShellBounds, rtol: float = 1e-6):
    """Map a fixed point of the starred operator back to one of the original."""
    if not all(shell.contains(v, rtol)):
        raise DomainError("point to unstar lies outside the shell")
    u = []
    for i, vi in enumerate(v):
        vi = np.asarray(vi, dtype=float)
        if i in starred:
            vi = star_factor(vi, shell.r[i], shell.R[i]) * vi
        u.append(vi)
    return tuple(u)

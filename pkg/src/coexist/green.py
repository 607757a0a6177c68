"""Periodic Green's function of Hill's operator ``z'' + a(t) z``.

The kernel is assembled from the fundamental pair of the homogeneous
equation by variation of parameters, with one 2x2 periodicity correction per
source node.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from . import kernels
from .errors import InputError, InvariantViolation, MixedSignError, ResonanceError


def grid_nodes(T: float, n: int) -> np.ndarray:
    """Uniform periodic nodes ``t_i = i*T/n``, ``i = 0..n-1``."""
    return np.arange(n) * (T / n)


@dataclass(frozen=True)
class HillCoefficient:
    """Coefficient ``a(t)`` of Hill's equation on ``[0, T]``.

    Exactly one of ``value`` (constant form) or ``samples`` (values on a
    uniform periodic grid over ``[0, T)``) is set.
    """

    T: float
    value: float | None = None
    samples: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if not (np.isfinite(self.T) and self.T > 0):
            raise InputError(f"period must be positive, got {self.T!r}")
        if (self.value is None) == (self.samples is None):
            raise InputError("give exactly one of a constant value or samples")
        if self.value is not None and not np.isfinite(self.value):
            raise InputError("non-finite coefficient value")
        if self.samples is not None:
            s = np.asarray(self.samples, dtype=float)
            if s.ndim != 1 or s.size < 4:
                raise InputError("coefficient samples must be a 1-D array of length >= 4")
            if not np.all(np.isfinite(s)):
                raise InputError("non-finite coefficient sample")
            object.__setattr__(self, "samples", s)

    @classmethod
    def constant(cls, T, value):
        return cls(T=float(T), value=float(value))

    @classmethod
    def sampled(cls, T, samples):
        return cls(T=float(T), samples=np.asarray(samples, dtype=float))

    @property
    def is_constant(self) -> bool:
        return self.value is not None

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.is_constant:
            return np.full(t.shape, self.value)
        s = self.samples
        knots = np.arange(s.size + 1) * (self.T / s.size)
        spline = CubicSpline(knots, np.append(s, s[0]), bc_type="periodic")
        return spline(np.mod(t, self.T))


@dataclass(frozen=True)
class FundamentalPair:
    """Solutions with initial data (1, 0) and (0, 1) on ``n + 1`` nodes including ``t = T``."""

    t: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray

    @property
    def monodromy(self) -> np.ndarray:
        return np.array([[self.phi[-1], self.psi[-1]], [self.dphi[-1], self.dpsi[-1]]])

    @property
    def wronskian(self) -> np.ndarray:
        return self.phi * self.dpsi - self.dphi * self.psi

    @property
    def trace(self) -> float:
        return float(self.phi[-1] + self.dpsi[-1])


@dataclass(frozen=True)
class GreenKernel:
    n: int
    T: float
    values: np.ndarray = field(repr=False)
    m: float
    M: float
    sign: str
    c: float
    # G(T, s_j); equals the first row when the construction is periodic
    values_at_period: np.ndarray = field(repr=False, default=None)

    @property
    def h(self) -> float:
        return self.T / self.n

    @property
    def nodes(self) -> np.ndarray:
        return grid_nodes(self.T, self.n)

    def apply(self, f: np.ndarray) -> np.ndarray:
        """Rectangle-rule quadrature ``h * sum_j G(t_k, s_j) f_j``."""
        return self.h * (self.values @ f)


def integrate_hill(coeff: HillCoefficient, n: int) -> FundamentalPair:
    """Integrate both initial value problems with fixed-step RK4, ``h = T/n``."""
    if n < 32 or n % 2:
        raise InputError(f"grid size must be even and >= 32, got {n}")
    h = coeff.T / n
    t = np.arange(n + 1) * h
    a_nodes = np.ascontiguousarray(coeff(t), dtype=float)
    a_mid = np.ascontiguousarray(coeff(t[:-1] + 0.5 * h), dtype=float)
    if not (np.all(np.isfinite(a_nodes)) and np.all(np.isfinite(a_mid))):
        raise InputError("non-finite coefficient sample")
    sol = kernels.rk4_hill(a_nodes, a_mid, h)
    return FundamentalPair(t=t, phi=sol[:, 0], dphi=sol[:, 1], psi=sol[:, 2], dpsi=sol[:, 3])


def is_nonresonant(fp: FundamentalPair, tol: float = 1e-6) -> bool:
    return abs(fp.trace - 2.0) > tol


def build_green(
    coeff: HillCoefficient,
    n: int,
    resonance_tol: float = 1e-6,
    sign_tol: float = 1e-10,
) -> GreenKernel:
    """Assemble ``G(t_i, s_j)`` on the periodic grid.

    Raises
    ------
    ResonanceError
        If ``|trace(monodromy) - 2| <= resonance_tol``.
    MixedSignError
        If the kernel does not have a strict constant sign.
    """
    fp = integrate_hill(coeff, n)
    if not is_nonresonant(fp, resonance_tol):
        raise ResonanceError(
            f"Hill equation is resonant: monodromy trace {fp.trace:.12g} is within "
            f"{resonance_tol:g} of 2"
        )
    phi, psi = fp.phi[:n], fp.psi[:n]
    phiT, dphiT, psiT, dpsiT = fp.phi[n], fp.dphi[n], fp.psi[n], fp.dpsi[n]

    # jump data of the causal particular solution at t = T, one column per source s_j
    jump = np.vstack([phi * psiT - phiT * psi, phi * dpsiT - dphiT * psi])
    corr = np.linalg.solve(fp.monodromy - np.eye(2), -jump)
    g1, g2 = corr

    causal = np.outer(psi, phi) - np.outer(phi, psi)  # K(t_k, s_j)
    causal *= np.tri(n, n, 0)
    values = causal + np.outer(phi, g1) + np.outer(psi, g2)
    at_period = jump[0] + phiT * g1 + psiT * g2

    lo, hi = float(values.min()), float(values.max())
    if lo > sign_tol:
        sign, c = "positive", lo / hi
    elif hi < -sign_tol:
        sign, c = "negative", hi / lo
    else:
        raise MixedSignError(
            f"Green's function is not of strict constant sign (min {lo:.3e}, max {hi:.3e})"
        )
    if not 0.0 < c < 1.0:
        raise InvariantViolation(f"cone constant {c} outside (0, 1)")
    return GreenKernel(
        n=n, T=coeff.T, values=values, m=lo, M=hi, sign=sign, c=c,
        values_at_period=at_period,
    )


def periodic_second_difference(x: np.ndarray, h: float) -> np.ndarray:
    return (np.roll(x, -1) - 2.0 * x + np.roll(x, 1)) / h**2


def green_residual(kernel: GreenKernel, coeff: HillCoefficient, probe: np.ndarray) -> float:
    """Max-norm of ``(D^2 + a) Gf - f`` with second-order periodic differences."""
    probe = np.asarray(probe, dtype=float)
    if probe.shape != (kernel.n,):
        raise InputError(f"probe has shape {probe.shape}, kernel expects ({kernel.n},)")
    x = kernel.apply(probe)
    a = coeff(kernel.nodes)
    r = periodic_second_difference(x, kernel.h) + a * x - probe
    return float(np.abs(r).max())

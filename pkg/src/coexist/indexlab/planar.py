"""Fixed point indices of planar maps of the closed first quadrant.

With ``X_1 = X_2 = R`` and ``K = R_+^2`` the cone index of ``N`` on a
rectangle equals the Brouwer degree of ``I - N o rho_K`` on the preimage of
that rectangle under the clamp retraction ``rho_K``. Edges lying on an axis
are therefore pushed slightly into the negative half-plane before the
boundary is sampled; there ``x_i - N_i`` is strictly negative, so the shift
adds no zeros.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .. import kernels
from ..cone import COMPRESSIVE, EXPANSIVE, ShellBounds
from ..errors import BoundaryZeroError, ConfigurationError, RefinementError

DEFAULT_STEPS = 4096


@dataclass(frozen=True)
class Rect:
    a1: float
    b1: float
    a2: float
    b2: float

    def __post_init__(self):
        if not (0 <= self.a1 < self.b1 and 0 <= self.a2 < self.b2):
            raise ConfigurationError(f"bad rectangle {self}")

    @classmethod
    def from_shell(cls, r, R):
        return cls(r[0], R[0], r[1], R[1])

    def contains(self, p, closed=False) -> bool:
        x1, x2 = p
        if closed:
            return self.a1 <= x1 <= self.b1 and self.a2 <= x2 <= self.b2
        # relative interior in the quadrant: an edge on an axis belongs to the set
        lo1 = (x1 >= 0) if self.a1 == 0 else (x1 > self.a1)
        lo2 = (x2 >= 0) if self.a2 == 0 else (x2 > self.a2)
        return lo1 and lo2 and x1 < self.b1 and x2 < self.b2

    def center(self):
        return (0.5 * (self.a1 + self.b1), 0.5 * (self.a2 + self.b2))


@dataclass(frozen=True)
class PlanarMap:
    """``N(x1, x2) -> (N1, N2)`` on the closed quadrant, vectorized.

    ``profiles`` holds ``(g1, g2)`` when ``N_i(x) = g_i(x_i)``.
    """

    fn: Callable
    profiles: tuple | None = None
    label: str = "N"

    def __post_init__(self):
        rng = np.random.default_rng(1)
        x1, x2 = 10.0 ** rng.uniform(-3, 2, (2, 512))
        x1[:32] = 0.0
        x2[32:64] = 0.0
        n1, n2 = self(x1, x2)
        if np.any(np.asarray(n1) < 0) or np.any(np.asarray(n2) < 0):
            raise ConfigurationError(f"{self.label} leaves the first quadrant")

    @classmethod
    def separable(cls, g1, g2, label="N"):
        return cls(fn=lambda x1, x2: (g1(x1), g2(x2)), profiles=(g1, g2), label=label)

    def __call__(self, x1, x2):
        n1, n2 = self.fn(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
        shape = np.broadcast(np.asarray(x1), np.asarray(x2)).shape
        return np.broadcast_to(n1, shape).astype(float), np.broadcast_to(n2, shape).astype(float)


def band_retraction(r):
    """One-dimensional shell retraction ``x -> max(x, r_i)`` per component."""
    r1, r2 = r

    def rho(x1, x2):
        return np.maximum(x1, r1), np.maximum(x2, r2)

    return rho


def displacement(N, r=None):
    """``F = I - N o rho o clamp`` as a vectorized callable."""
    rho = band_retraction(r) if r is not None else None

    def F(x1, x2):
        y1, y2 = np.maximum(x1, 0.0), np.maximum(x2, 0.0)
        if rho is not None:
            y1, y2 = rho(y1, y2)
        n1, n2 = N(y1, y2)
        return x1 - n1, x2 - n2

    return F


def boundary_polyline(rect: Rect, steps: int = DEFAULT_STEPS, axis_shift=0.02):
    """Counter-clockwise boundary samples, ``steps`` per edge, no repeated corner."""
    a1 = rect.a1 if rect.a1 > 0 else -axis_shift * (rect.b1 - rect.a1)
    a2 = rect.a2 if rect.a2 > 0 else -axis_shift * (rect.b2 - rect.a2)
    b1, b2 = rect.b1, rect.b2
    s = np.arange(steps) / steps
    xs = np.concatenate([a1 + s * (b1 - a1), np.full(steps, b1), b1 - s * (b1 - a1), np.full(steps, a1)])
    ys = np.concatenate([np.full(steps, a2), a2 + s * (b2 - a2), np.full(steps, b2), b2 - s * (b2 - a2)])
    return xs, ys


def winding_degree(N, rect: Rect, steps: int = DEFAULT_STEPS, retraction=None,
                   zero_tol: float = 1e-6) -> int:
    """Degree of ``I - N`` on ``rect`` as the winding number of its boundary image.

    ``retraction`` is an optional pair of inner radii for the band retraction.

    Raises
    ------
    BoundaryZeroError
        If ``|F|`` on the sampled boundary drops below ``zero_tol`` times the
        scale of the rectangle.
    RefinementError
        If consecutive samples turn by more than ``pi/2``.
    """
    F = displacement(N, retraction)
    xs, ys = boundary_polyline(rect, steps)
    f1, f2 = F(xs, ys)
    f1 = np.ascontiguousarray(f1, dtype=float)
    f2 = np.ascontiguousarray(f2, dtype=float)
    scale = max(1.0, rect.b1, rect.b2)
    mags = np.hypot(f1, f2)
    k = int(np.argmin(mags))
    if not mags[k] > zero_tol * scale:
        raise BoundaryZeroError(
            f"I - N vanishes on the boundary near ({xs[k]:.6g}, {ys[k]:.6g})"
        )
    total, worst = kernels.winding_sum(f1, f2)
    if worst > math.pi / 2:
        raise RefinementError(f"angular step {worst:.3f} exceeds pi/2; increase steps")
    return int(round(total / (2.0 * math.pi)))


def certify_behavior(N, r, R, samples: int = 257) -> tuple:
    """Strict compressive/expansive tags per component, sampled on the shell faces.

    Raises :class:`ConfigurationError` when a component satisfies neither
    strict condition.
    """
    tags = []
    for i in (0, 1):
        j = 1 - i
        other = np.linspace(r[j], R[j], samples)
        signs = []
        for rad in (r[i], R[i]):
            args = [None, None]
            args[i], args[j] = np.full(samples, rad), other
            ni = N(args[0], args[1])[i]
            d = ni - rad
            if np.all(d > 0):
                signs.append(1)
            elif np.all(d < 0):
                signs.append(-1)
            else:
                signs.append(0)
        if signs == [1, -1]:
            tags.append(COMPRESSIVE)
        elif signs == [-1, 1]:
            tags.append(EXPANSIVE)
        else:
            raise ConfigurationError(
                f"component {i + 1} satisfies no strict band condition on [{r[i]}, {R[i]}]"
            )
    return tuple(tags)


LEDGER_ORDER = ("K_R", "K_r", "mixed_1", "mixed_2", "shell")


@dataclass
class Ledger:
    degrees: dict
    behavior: tuple
    strip: int

    @property
    def values(self) -> tuple:
        return tuple(self.degrees[k] for k in LEDGER_ORDER)

    @property
    def expansive_count(self) -> int:
        return sum(b == EXPANSIVE for b in self.behavior)

    @property
    def shell_sign_ok(self) -> bool:
        return self.degrees["shell"] == (-1) ** self.expansive_count

    @property
    def additivity_ok(self) -> bool:
        d = self.degrees
        strip_ok = self.strip == d["mixed_1"] - d["K_r"]
        return strip_ok and d["K_R"] == d["mixed_2"] + self.strip + d["shell"]


def ledger_check(N, shell: ShellBounds, steps: int = DEFAULT_STEPS) -> Ledger:
    """Degrees of ``I - N o rho`` over the five sets used in the index computation.

    The rectangles are ``[0,R1]x[0,R2]``, ``[0,r1]x[0,r2]``, ``[0,R1]x[0,r2]``,
    ``[0,r1]x[0,R2]`` and the shell; ``[r1,R1]x[0,r2]`` is computed as well to
    check additivity.
    """
    tags = certify_behavior(N, shell.r, shell.R)
    if tags != tuple(shell.behavior):
        raise ConfigurationError(f"declared behavior {shell.behavior} but sampled {tags}")
    (r1, r2), (R1, R2) = shell.r, shell.R
    rects = {
        "K_R": Rect(0, R1, 0, R2),
        "K_r": Rect(0, r1, 0, r2),
        "mixed_1": Rect(0, R1, 0, r2),
        "mixed_2": Rect(0, r1, 0, R2),
        "shell": Rect(r1, R1, r2, R2),
    }
    deg = {k: winding_degree(N, rect, steps, retraction=shell.r) for k, rect in rects.items()}
    strip = winding_degree(N, Rect(r1, R1, 0, r2), steps, retraction=shell.r)
    return Ledger(degrees=deg, behavior=tags, strip=strip)


@dataclass(frozen=True)
class HomotopyConfig:
    """Auxiliary map ``S`` (second component only) and the constant ``mu0``.

    ``alpha = sup x2``, ``beta = sup N2``, ``gamma = inf S`` over the region;
    ``mu0`` must exceed ``(alpha + beta) / gamma``.
    """

    S: Callable
    mu0: float
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise ConfigurationError("inf of the auxiliary map must be positive")
        if not self.mu0 > (self.alpha + self.beta) / self.gamma:
            raise ConfigurationError(
                f"mu0={self.mu0} does not exceed (alpha+beta)/gamma="
                f"{(self.alpha + self.beta) / self.gamma:.6g}"
            )

    @classmethod
    def for_region(cls, N, S, mu0, rect: Rect, samples: int = 201):
        x1, x2 = np.meshgrid(np.linspace(rect.a1, rect.b1, samples),
                             np.linspace(rect.a2, rect.b2, samples))
        beta = float(np.abs(N(x1, x2)[1]).max())
        gamma = float(np.abs(np.broadcast_to(S(x1, x2), x1.shape)).min())
        return cls(S=S, mu0=float(mu0), alpha=float(rect.b2), beta=beta, gamma=gamma)


def check_product_hypotheses(N, S, rect: Rect, samples: int = 513):
    """Sampled check of the two boundary hypotheses on ``U x V``.

    ``U = [0, b1)`` must contain 0. On ``x1 = b1`` no ``N1 = lam x1`` with
    ``lam > 1`` means ``N1 < b1``; on the relative boundary of ``V`` no
    ``x2 - N2 = mu S`` with ``mu > 0`` means ``x2 - N2 < 0`` when ``S > 0``.
    """
    if rect.a1 != 0:
        raise ConfigurationError("the first factor must contain 0")
    x2 = np.linspace(rect.a2, rect.b2, samples)
    if not np.all(N(np.full(samples, rect.b1), x2)[0] < rect.b1):
        raise ConfigurationError("hypothesis on the first component fails at x1 = b1")
    x1 = np.linspace(rect.a1, rect.b1, samples)
    faces = [rect.b2] if rect.a2 == 0 else [rect.a2, rect.b2]
    for v in faces:
        d = v - N(x1, np.full(samples, v))[1]
        s = np.broadcast_to(S(x1, np.full(samples, v)), d.shape)
        if np.any(s <= 0) or np.any(d >= 0):
            raise ConfigurationError(f"hypothesis on the second component fails at x2 = {v}")


@dataclass
class HomotopyReport:
    times: tuple
    degrees: tuple
    direct: int

    @property
    def passed(self) -> bool:
        return len(set(self.degrees)) == 1 and self.degrees[0] == 0 and self.degrees[-1] == self.direct


def homotopy_invariance_probe(N, cfg: HomotopyConfig, rect: Rect, steps: int = DEFAULT_STEPS,
                              times=(0.0, 0.25, 0.5, 0.75, 1.0)) -> HomotopyReport:
    """Degrees of ``I - H(., t)`` with ``H = (t N1, N2 + (1 - t) mu0 S)``."""
    check_product_hypotheses(N, cfg.S, rect)
    degrees = []
    for t in times:
        def H(x1, x2, t=t):
            n1, n2 = N(x1, x2)
            return t * n1, n2 + (1.0 - t) * cfg.mu0 * cfg.S(x1, x2)

        try:
            degrees.append(winding_degree(H, rect, steps))
        except BoundaryZeroError as exc:
            raise BoundaryZeroError(f"homotopy not admissible at t={t}: {exc}") from None
    direct = winding_degree(N, rect, steps)
    return HomotopyReport(times=tuple(times), degrees=tuple(degrees), direct=direct)


def _newton2(N, p, tol=1e-12, max_iter=60):
    def F(z):
        with np.errstate(all="ignore"):
            return z - np.array(N(z[0], z[1]), dtype=float)

    x = np.array(p, dtype=float)
    for _ in range(max_iter):
        Fx = F(x)
        if not np.all(np.isfinite(Fx)):
            return None
        if np.abs(Fx).max() < tol:
            return x
        J = np.empty((2, 2))
        for j in range(2):
            d = 1e-7 * (1.0 + abs(x[j]))
            xp = x.copy()
            xp[j] += d
            J[:, j] = (F(xp) - Fx) / d
        if not np.all(np.isfinite(J)):
            return None
        try:
            step = np.linalg.solve(J, -Fx)
        except np.linalg.LinAlgError:
            return None
        x = np.maximum(x + step, 1e-12)
    Fx = F(x)
    return x if np.all(np.isfinite(Fx)) and np.abs(Fx).max() < 1e-9 else None


@dataclass
class MultiplicityReport:
    shell_degrees: tuple
    remainder: int
    fixed_points: list
    regions: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        small = len(self.shell_degrees) - 1
        hit = [any(reg == k for reg in self.regions) for k in range(small)]
        outer = any(reg == "remainder" for reg in self.regions)
        return (all(abs(d) == 1 for d in self.shell_degrees)
                and self.remainder % 2 == 1
                and all(hit) and outer
                and len(self.fixed_points) >= small + 1)


def multiplicity_probe(N, shells: Sequence[Rect], steps: int = DEFAULT_STEPS,
                       starts_per_axis: int = 9) -> MultiplicityReport:
    """Degrees on nested shells and fixed points located by Newton.

    ``shells`` lists the ``2m`` disjoint inner shells followed by the outer one.
    Newton starts from the shell centers and from a geometric grid over the
    outer shell; distinct limits are classified by region.
    """
    *inner, outer = shells
    for k, a in enumerate(inner):
        for b in inner[k + 1:]:
            if not (a.b1 < b.a1 or b.b1 < a.a1 or a.b2 < b.a2 or b.b2 < a.a2):
                raise ConfigurationError("inner shells must be disjoint")
        if not (outer.a1 <= a.a1 and a.b1 <= outer.b1 and outer.a2 <= a.a2 and a.b2 <= outer.b2):
            raise ConfigurationError("inner shells must lie inside the outer shell")
    for s in shells:
        certify_behavior(N, (s.a1, s.a2), (s.b1, s.b2))

    degrees = tuple(winding_degree(N, s, steps) for s in shells)
    remainder = degrees[-1] - sum(degrees[:-1])

    g1 = np.geomspace(outer.a1, outer.b1, starts_per_axis)
    g2 = np.geomspace(outer.a2, outer.b2, starts_per_axis)
    starts = [s.center() for s in shells] + [(u, v) for u in g1 for v in g2]
    found = []
    for p in starts:
        x = _newton2(N, p)
        if x is None or not outer.contains(x, closed=True):
            continue
        if all(np.abs(x - q).max() > 1e-6 * (1 + np.abs(q).max()) for q in found):
            found.append(x)
    found.sort(key=lambda q: (q[0], q[1]))
    regions = []
    for q in found:
        where = [k for k, s in enumerate(inner) if s.contains(q, closed=True)]
        regions.append(where[0] if where else "remainder")
    return MultiplicityReport(shell_degrees=degrees, remainder=remainder,
                              fixed_points=[tuple(map(float, q)) for q in found], regions=regions)

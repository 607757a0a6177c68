"""Sampled certificates for the alpha/beta band inequalities and a radius sweep.

For a positive kernel, component ``i`` needs

* alpha band: ``f_i >= x_i / (m_i T c_i)`` for ``x_i`` in ``[c_i alpha, alpha]``
* beta band:  ``f_i <= x_i / (M_i T)`` for ``x_i`` in ``[c_i beta, beta]``

with the other variable ranging over ``[c_j r_j, R_j]``. For a negative kernel
the inequalities flip to ``f_i <= x_i / (M_i T c_i)`` and ``f_i >= x_i / (m_i T)``.
Sampling is dense but not rigorous; margins are reported so that near
failures are visible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cone import COMPRESSIVE, EXPANSIVE, ShellBounds
from .errors import ConfigurationError, EvaluationError, NotFoundError

ALPHA = "alpha"
BETA = "beta"
SUB = "sub"
SUPER = "super"
DEFAULT_DENSITY = 64


@dataclass
class BandCheckReport:
    """Outcome of one band check.

    ``min_margin`` is the worst slack over all samples minus the strictness
    allowance ``eps``, so ``passed`` is exactly ``min_margin >= 0``.
    """

    component: int
    kind: str
    radius: float
    min_margin: float
    samples: int
    eps: float = 0.0
    worst_point: tuple = field(default=(), repr=False)

    @property
    def passed(self) -> bool:
        return self.min_margin >= 0.0

    def as_dict(self):
        return {
            "component": self.component + 1,
            "kind": self.kind,
            "radius": self.radius,
            "min_margin": self.min_margin,
            "samples": self.samples,
            "pass": self.passed,
        }


def _axis(lo, hi, density):
    # density counts intervals so that doubling it nests the samples
    return np.linspace(lo, hi, int(density) + 1)


def _band(i, radius, kind, other_box, kernel, nl, T, density, floor, eps_rel):
    if not radius > 0:
        raise ConfigurationError("band radius must be positive")
    c, m, M = kernel.c, kernel.m, kernel.M
    if kernel.sign == "positive":
        coef = 1.0 / (m * T * c) if kind == ALPHA else 1.0 / (M * T)
        lower = kind == ALPHA  # f must lie above the linear bound
    else:
        coef = 1.0 / (M * T * c) if kind == ALPHA else 1.0 / (m * T)
        lower = kind == BETA
    ts = _axis(0.0, T, density)
    xi = _axis(c * radius, radius, density)
    xj = _axis(other_box[0], other_box[1], density)
    tt, ai, aj = np.meshgrid(ts, xi, xj, indexing="ij", sparse=True)
    args = [None, None]
    args[i], args[1 - i] = ai, aj
    if floor is not None:
        for k, flag in enumerate(nl.singular):
            if flag == "at_zero" and float(np.min(args[k])) < floor[k]:
                raise EvaluationError(
                    f"band sample {float(np.min(args[k])):.3e} lies below the clamp floor "
                    f"{floor[k]:.3e}"
                )
    with np.errstate(all="ignore"):
        f = np.broadcast_to(np.asarray(nl.func(tt, args[0], args[1]), dtype=float),
                            (ts.size, xi.size, xj.size))
    if not np.all(np.isfinite(f)):
        raise EvaluationError("nonlinearity is not finite on the band samples")
    bound = coef * ai
    slack = f - bound if lower else bound - f
    k = int(np.argmin(slack))
    idx = np.unravel_index(k, slack.shape)
    eps = eps_rel * max(1.0, float(np.abs(bound).max()))
    return BandCheckReport(
        component=i, kind=kind, radius=float(radius),
        min_margin=float(slack[idx]) - eps, samples=int(slack.size), eps=eps,
        worst_point=(float(ts[idx[0]]), float(xi[idx[1]]), float(xj[idx[2]])),
    )


def check_alpha_band(i, radius, other_box, kernel, nl, T, density=DEFAULT_DENSITY,
                     floor=None, eps_rel=1e-9):
    """``f_i >= x_i/(m_i T c_i)`` on ``[c_i radius, radius] x other_box`` (positive kernel)."""
    if kernel.sign != "positive":
        raise ConfigurationError("alpha band of this form needs a positive kernel")
    return _band(i, radius, ALPHA, other_box, kernel, nl, T, density, floor, eps_rel)


def check_beta_band(i, radius, other_box, kernel, nl, T, density=DEFAULT_DENSITY,
                    floor=None, eps_rel=1e-9):
    """``f_i <= x_i/(M_i T)`` on ``[c_i radius, radius] x other_box`` (positive kernel)."""
    if kernel.sign != "positive":
        raise ConfigurationError("beta band of this form needs a positive kernel")
    return _band(i, radius, BETA, other_box, kernel, nl, T, density, floor, eps_rel)


def check_negative_bands(i, radius, kind, other_box, kernel, nl, T, density=DEFAULT_DENSITY,
                         floor=None, eps_rel=1e-9):
    """Band check for a negative kernel; ``kind`` is ``"alpha"`` or ``"beta"``."""
    if kernel.sign != "negative":
        raise ConfigurationError("negative band checks need a negative kernel")
    return _band(i, radius, kind, other_box, kernel, nl, T, density, floor, eps_rel)


def check_band(i, radius, kind, other_box, kernel, nl, T, density=DEFAULT_DENSITY,
               floor=None, eps_rel=1e-9):
    """Dispatch on the kernel sign."""
    return _band(i, radius, kind, other_box, kernel, nl, T, density, floor, eps_rel)


@dataclass
class RadiusCertificate:
    alpha: tuple
    beta: tuple
    shell: ShellBounds
    reports: list

    def as_dict(self):
        return {
            "alpha": list(self.alpha),
            "beta": list(self.beta),
            "r": list(self.shell.r),
            "R": list(self.shell.R),
            "behavior": list(self.shell.behavior),
            "bands": [rep.as_dict() for rep in self.reports],
        }


def shell_from_radii(alpha, beta) -> ShellBounds:
    r = tuple(min(a, b) for a, b in zip(alpha, beta))
    R = tuple(max(a, b) for a, b in zip(alpha, beta))
    tags = tuple(COMPRESSIVE if a < b else EXPANSIVE for a, b in zip(alpha, beta))
    return ShellBounds(r, R, tags)


def other_boxes(shell: ShellBounds, kernels):
    """``[c_j r_j, R_j]``, indexed by the component that uses it."""
    return (
        (kernels[1].c * shell.r[1], shell.R[1]),
        (kernels[0].c * shell.r[0], shell.R[0]),
    )


def verify_radii(problem, alpha, beta, density=DEFAULT_DENSITY, eps_rel=1e-9):
    """Check all four bands for explicit radii. Returns ``(certificate, ok)``."""
    kernels = problem.kernels
    shell = shell_from_radii(alpha, beta)
    boxes = other_boxes(shell, kernels)
    reports = []
    for i in (0, 1):
        for kind, rad in ((ALPHA, alpha[i]), (BETA, beta[i])):
            reports.append(check_band(i, rad, kind, boxes[i], kernels[i], problem.nonlins[i],
                                      problem.T, density, eps_rel=eps_rel))
    ok = all(rep.passed for rep in reports)
    return RadiusCertificate(tuple(alpha), tuple(beta), shell, reports), ok


def _candidates(lo, hi):
    count = int(math.floor(math.log2(hi / lo) + 1e-12)) + 1
    return lo * 2.0 ** np.arange(count)


def _pick(i, box, kernel, nl, T, cands, mode, density, eps_rel, best_margins):
    passes = {}
    for kind in (ALPHA, BETA):
        ok = []
        worst = -math.inf
        for rad in cands:
            try:
                rep = _band(i, rad, kind, box, kernel, nl, T, density, None, eps_rel)
            except EvaluationError:
                continue
            worst = max(worst, rep.min_margin)
            if rep.passed:
                ok.append(float(rad))
        passes[kind] = ok
        key = f"component {i + 1} {kind}"
        best_margins[key] = max(best_margins.get(key, -math.inf), worst)
    best = None
    for a in passes[ALPHA]:
        for b in passes[BETA]:
            if (mode == SUB and a < b) or (mode == SUPER and b < a):
                ratio = max(a, b) / min(a, b)
                if best is None or ratio < best[0]:
                    best = (ratio, a, b)
    return None if best is None else best[1:]


def find_radii(problem, lo=1e-4, hi=1e6, modes=None, density=DEFAULT_DENSITY,
               eps_rel=1e-9, max_rounds=20) -> RadiusCertificate:
    """Geometric sweep (ratio 2) for admissible ``(alpha_i, beta_i)``.

    ``modes[i]`` is ``"sub"`` (look for ``alpha < beta``, compressive) or
    ``"super"`` (``beta < alpha``, expansive); ``None`` tries both, sub first.
    Each component's box for the other variable starts as the whole range and
    is narrowed to ``[c_j r_j, R_j]`` as radii are found; the sweep alternates
    until the radii stop changing.

    Raises
    ------
    NotFoundError
        On exhaustion. A finite sweep cannot tell a uniform limit from a slow
        approach, so failure does not disprove existence.
    """
    if not (lo > 0 and hi / lo >= 1e2):
        raise ConfigurationError("search range needs lo > 0 and hi/lo >= 100")
    kernels = problem.kernels
    cands = _candidates(lo, hi)
    modes = tuple(modes) if modes is not None else (None, None)
    boxes = [(kernels[1].c * lo, hi), (kernels[0].c * lo, hi)]
    found = [None, None]
    best_margins = {}
    for _ in range(max_rounds):
        new = []
        for i in (0, 1):
            choice = None
            for mode in ((modes[i],) if modes[i] else (SUB, SUPER)):
                choice = _pick(i, boxes[i], kernels[i], problem.nonlins[i], problem.T,
                               cands, mode, density, eps_rel, best_margins)
                if choice is not None:
                    break
            new.append(choice)
        if new == found and all(c is not None for c in new):
            break
        found = new
        for i in (0, 1):
            j = 1 - i
            if found[j] is not None:
                a, b = found[j]
                boxes[i] = (kernels[j].c * min(a, b), max(a, b))
    else:
        found = [None, None] if not all(found) else found
    if not all(c is not None for c in found):
        raise NotFoundError(
            "no admissible radii in the sweep range (a finite sweep cannot distinguish a "
            "uniform limit from a slow approach)",
            best_margins=best_margins,
        )
    alpha = tuple(c[0] for c in found)
    beta = tuple(c[1] for c in found)
    cert, ok = verify_radii(problem, alpha, beta, density, eps_rel)
    if not ok:
        raise NotFoundError("radii did not re-verify on their joint box",
                            best_margins={f"{r.kind}{r.component + 1}": r.min_margin
                                          for r in cert.reports})
    return cert

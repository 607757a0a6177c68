"""Fixture suites shipped with the index lab (see ``fixtures.json``)."""
from __future__ import annotations

import json
import math
from functools import lru_cache
from importlib import resources

import numpy as np

from ..cone import ShellBounds
from ..expr import Expression
from .planar import (
    HomotopyConfig,
    PlanarMap,
    Rect,
    homotopy_invariance_probe,
    ledger_check,
    multiplicity_probe,
)

SUITES = ("ledger", "signs", "homotopy", "multiplicity")


@lru_cache(maxsize=1)
def load_fixtures() -> dict:
    text = resources.files(__package__).joinpath("fixtures.json").read_text()
    return json.loads(text)


def power_profile(gamma):
    return lambda s: np.power(np.maximum(s, 0.0), gamma)


def logpoly_profile(kappa, roots):
    logs = [math.log(v) for v in roots]

    def g(s):
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            u = np.log(s)
            p = np.ones_like(u)
            for a in logs:
                p = p * (u - a)
            out = s * np.exp(-kappa * p)
        return np.where(s > 0, out, 0.0)

    return g


def profile(name):
    spec = load_fixtures()["profiles"][name]
    if spec["kind"] == "power":
        return power_profile(spec["gamma"])
    if spec["kind"] == "logpoly":
        return logpoly_profile(spec["kappa"], spec["roots"])
    raise ValueError(f"unknown profile kind {spec['kind']!r}")


def separable_map(names) -> PlanarMap:
    return PlanarMap.separable(profile(names[0]), profile(names[1]), label="x".join(names))


def expression_map(src1, src2) -> PlanarMap:
    e1, e2 = Expression(src1), Expression(src2)
    return PlanarMap(fn=lambda x1, x2: (e1(0.0, x1, x2), e2(0.0, x1, x2)), label=f"({src1}, {src2})")


def run_suite(name, steps=4096):
    """Run one suite. Returns a list of ``(label, expected, computed)`` rows."""
    fx = load_fixtures()
    rows = []
    if name == "ledger":
        spec = fx["ledger"]
        shell = ShellBounds(spec["r"], spec["R"], spec["behavior"])
        led = ledger_check(separable_map(spec["profiles"]), shell, steps)
        rows.append(("ledger", tuple(spec["expected"]), led.values))
        rows.append(("additivity", True, led.additivity_ok))
    elif name == "signs":
        for spec in fx["signs"]:
            shell = ShellBounds(spec["r"], spec["R"], spec["behavior"])
            led = ledger_check(separable_map(spec["profiles"]), shell, steps)
            rows.append((f"shell degree {spec['name']}", spec["expected_shell"], led.degrees["shell"]))
    elif name == "homotopy":
        spec = fx["homotopy"]
        N = expression_map(spec["N1"], spec["N2"])
        S_expr = Expression(spec["S"])
        rect = Rect(*spec["rect"])
        cfg = HomotopyConfig.for_region(N, lambda x1, x2: S_expr(0.0, x1, x2), spec["mu0"], rect)
        rep = homotopy_invariance_probe(N, cfg, rect, steps)
        for t, d in zip(rep.times, rep.degrees):
            rows.append((f"degree at t={t:g}", spec["expected"], d))
        rows.append(("endpoint equals direct degree", rep.degrees[-1], rep.direct))
    elif name == "multiplicity":
        spec = fx["multiplicity"]
        shells = [Rect(*s) for s in spec["shells"]]
        rep = multiplicity_probe(separable_map(spec["profiles"]), shells, steps)
        rows.append(("shell degrees", tuple(spec["expected_degrees"]), rep.shell_degrees))
        rows.append(("remainder degree", spec["expected_remainder"], rep.remainder))
        rows.append(("fixed points located", True, rep.passed and len(rep.fixed_points) >= spec["min_fixed_points"]))
    else:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return rows

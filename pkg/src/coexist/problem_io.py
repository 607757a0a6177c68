"""JSON problem files.

A problem file looks like::

    {
      "period": "2*pi",
      "n": 256,
      "components": [
        {"coefficient": {"constant": "1/9"},
         "nonlinearity": "x^0.5 + sin(t+y)^2", "sign": "nonnegative"},
        {"coefficient": {"samples": [0.11, 0.12, ...]},
         "singular": {"variable": "y", "exponent": 1, "factor": "2+cos(x)",
                      "pert": "0", "sign": -1}}
      ],
      "radii": {"alpha": [1, 0.5], "beta": [10, 20]},
      "search": {"lo": 1e-4, "hi": 1e6, "modes": [null, "super"]},
      "solver": {"tol": 1e-8},
      "density": 64
    }

``period`` and constant coefficients may be numbers or constant expressions.
A component gives either ``nonlinearity`` (with ``sign``) or ``singular``.
``radii``, ``search``, ``solver`` and ``density`` are optional.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .errors import InputError
from .expr import evaluate_constant
from .green import HillCoefficient, grid_nodes
from .hammerstein import NONNEGATIVE, Nonlinearity, ProblemSpec, SingularForm, SolverConfig
from .shells import DEFAULT_DENSITY

_TOP_KEYS = {"name", "period", "n", "components", "radii", "search", "solver", "density"}
_SOLVER_KEYS = {f.name for f in fields(SolverConfig)} - {"retraction"}
DEFAULT_SEARCH = {"lo": 1e-4, "hi": 1e6, "modes": None}


@dataclass
class ProblemFile:
    """A parsed problem file: the operator data plus run options."""

    problem: ProblemSpec
    radii: tuple | None = None
    search: dict = field(default_factory=lambda: dict(DEFAULT_SEARCH))
    solver: SolverConfig = field(default_factory=SolverConfig)
    density: int = DEFAULT_DENSITY
    name: str = ""

    def with_grid(self, n):
        """Copy with a different grid size (kernels are rebuilt lazily)."""
        p = self.problem
        return replace(self, problem=ProblemSpec(p.T, p.coeffs, p.nonlins, int(n)))

    def __eq__(self, other):
        if not isinstance(other, ProblemFile):
            return NotImplemented
        return to_dict(self) == to_dict(other)


def _require(cond, msg):
    if not cond:
        raise InputError(msg)


def _number(value, what):
    try:
        v = evaluate_constant(value)
    except InputError as exc:
        raise InputError(f"{what}: {exc}") from None
    _require(math.isfinite(v), f"{what} must be finite")
    return v


def _coefficient(doc, T, i):
    _require(isinstance(doc, dict) and len(doc) == 1 and set(doc) <= {"constant", "samples"},
             f"component {i + 1}: coefficient needs exactly one of 'constant' or 'samples'")
    if "constant" in doc:
        return HillCoefficient.constant(T, _number(doc["constant"], f"component {i + 1} coefficient"))
    samples = doc["samples"]
    _require(isinstance(samples, list) and all(isinstance(v, (int, float)) and not isinstance(v, bool)
                                               for v in samples),
             f"component {i + 1}: samples must be a list of numbers")
    return HillCoefficient.sampled(T, samples)


def _nonlinearity(doc, i):
    has_expr, has_sing = "nonlinearity" in doc, "singular" in doc
    _require(has_expr != has_sing,
             f"component {i + 1}: give exactly one of 'nonlinearity' or 'singular'")
    if has_expr:
        src = doc["nonlinearity"]
        _require(isinstance(src, str), f"component {i + 1}: nonlinearity must be a string")
        return Nonlinearity.from_expression(src, doc.get("sign", NONNEGATIVE))
    s = doc["singular"]
    _require(isinstance(s, dict) and {"variable", "exponent"} <= set(s),
             f"component {i + 1}: singular needs 'variable' and 'exponent'")
    extra = set(s) - {"variable", "exponent", "factor", "pert", "sign"}
    _require(not extra, f"component {i + 1}: unknown singular keys {sorted(extra)}")
    form = SingularForm(
        variable=s["variable"],
        exponent=_number(s["exponent"], "singular exponent"),
        factor=str(s.get("factor", "1")),
        pert=str(s.get("pert", "0")),
        sign=int(s.get("sign", 1)),
    )
    return Nonlinearity.from_singular(form, doc.get("sign"))


def _probe(nl: Nonlinearity, T, i):
    t = grid_nodes(T, 16)[:, None, None]
    v = 10.0 ** np.linspace(-2, 2, 9)
    with np.errstate(all="ignore"):
        out = np.asarray(nl(t, v[None, :, None], v[None, None, :]), dtype=float)
    _require(np.all(np.isfinite(out)),
             f"component {i + 1}: nonlinearity is not finite on the probe grid")


def _pair(value, what):
    _require(isinstance(value, (list, tuple)) and len(value) == 2, f"{what} must be a pair")
    out = tuple(_number(v, what) for v in value)
    _require(all(v > 0 for v in out), f"{what} must be positive")
    return out


def from_dict(doc) -> ProblemFile:
    """Validate and build a :class:`ProblemFile`. Raises :class:`InputError`."""
    _require(isinstance(doc, dict), "problem document must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    _require(not unknown, f"unknown keys {sorted(unknown)}")
    _require("period" in doc and "components" in doc, "'period' and 'components' are required")
    T = _number(doc["period"], "period")
    _require(T > 0, "period must be positive")
    n = doc.get("n", 256)
    _require(isinstance(n, int) and not isinstance(n, bool), "'n' must be an integer")
    _require(n >= 32 and n % 2 == 0, "'n' must be even and at least 32")
    comps = doc["components"]
    _require(isinstance(comps, list) and len(comps) == 2, "exactly two components are required")
    coeffs, nonlins = [], []
    for i, comp in enumerate(comps):
        _require(isinstance(comp, dict), f"component {i + 1} must be an object")
        extra = set(comp) - {"coefficient", "nonlinearity", "sign", "singular"}
        _require(not extra, f"component {i + 1}: unknown keys {sorted(extra)}")
        _require("coefficient" in comp, f"component {i + 1}: missing coefficient")
        coeffs.append(_coefficient(comp["coefficient"], T, i))
        nl = _nonlinearity(comp, i)
        _probe(nl, T, i)
        nonlins.append(nl)
    problem = ProblemSpec(T, tuple(coeffs), tuple(nonlins), n)

    radii = None
    if doc.get("radii") is not None:
        r = doc["radii"]
        _require(isinstance(r, dict) and set(r) == {"alpha", "beta"},
                 "'radii' needs 'alpha' and 'beta'")
        alpha, beta = _pair(r["alpha"], "alpha"), _pair(r["beta"], "beta")
        _require(all(a != b for a, b in zip(alpha, beta)), "alpha_i and beta_i must differ")
        radii = (alpha, beta)

    search = dict(DEFAULT_SEARCH)
    s = doc.get("search") or {}
    _require(isinstance(s, dict) and set(s) <= set(DEFAULT_SEARCH), "bad 'search' block")
    search.update(s)
    search["lo"] = _number(search["lo"], "search lo")
    search["hi"] = _number(search["hi"], "search hi")
    if search["modes"] is not None:
        modes = search["modes"]
        _require(isinstance(modes, list) and len(modes) == 2
                 and all(m in (None, "sub", "super") for m in modes),
                 "search modes must be a pair of null, 'sub' or 'super'")
        search["modes"] = list(modes)

    sv = doc.get("solver") or {}
    _require(isinstance(sv, dict), "'solver' must be an object")
    extra = set(sv) - _SOLVER_KEYS
    _require(not extra, f"unknown solver keys {sorted(extra)}")
    solver = SolverConfig(**{k: type(getattr(SolverConfig(), k))(v) for k, v in sv.items()})

    density = doc.get("density", DEFAULT_DENSITY)
    _require(isinstance(density, int) and density >= 2, "'density' must be an integer >= 2")
    name = doc.get("name", "")
    _require(isinstance(name, str), "'name' must be a string")
    return ProblemFile(problem, radii, search, solver, density, name)


def _nl_dict(nl: Nonlinearity) -> dict:
    if nl.form is not None:
        f = nl.form
        return {"singular": {"variable": f.variable, "exponent": f.exponent, "factor": f.factor,
                             "pert": f.pert, "sign": f.sign}, "sign": nl.sign}
    if nl.source is None:
        raise InputError("a nonlinearity built from a bare callable cannot be serialized")
    return {"nonlinearity": nl.source, "sign": nl.sign}


def to_dict(pf: ProblemFile) -> dict:
    """Inverse of :func:`from_dict` (numbers are written in full precision)."""
    p = pf.problem
    comps = []
    for a, nl in zip(p.coeffs, p.nonlins):
        coef = {"constant": a.value} if a.is_constant else {"samples": [float(v) for v in a.samples]}
        comps.append({"coefficient": coef, **_nl_dict(nl)})
    default = SolverConfig()
    solver = {k: getattr(pf.solver, k) for k in sorted(_SOLVER_KEYS)
              if getattr(pf.solver, k) != getattr(default, k)}
    doc = {"period": p.T, "n": p.n, "components": comps, "search": dict(pf.search),
           "solver": solver, "density": pf.density}
    if pf.radii is not None:
        doc["radii"] = {"alpha": list(pf.radii[0]), "beta": list(pf.radii[1])}
    if pf.name:
        doc["name"] = pf.name
    return doc


def loads(text: str) -> ProblemFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"not valid JSON: {exc}") from None
    return from_dict(doc)


def load(path) -> ProblemFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text)


def dumps(pf: ProblemFile) -> str:
    return json.dumps(to_dict(pf), indent=2, sort_keys=True) + "\n"


def dump(pf: ProblemFile, path):
    Path(path).write_text(dumps(pf))

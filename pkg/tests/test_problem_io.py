import copy
import json

import numpy as np
import pytest

from coexist import problem_io
from coexist.errors import ConfigurationError, InputError

BASE = {
    "period": "2*pi",
    "n": 64,
    "components": [
        {"coefficient": {"constant": "1/9"}, "nonlinearity": "x^0.5 + sin(t+y)^2"},
        {"coefficient": {"samples": [0.1, 0.12, 0.11, 0.09]},
         "singular": {"variable": "y", "exponent": 2, "factor": "2+cos(x)", "sign": -1}},
    ],
    "radii": {"alpha": [1, 0.5], "beta": [10, 20]},
    "search": {"lo": 0.001, "modes": ["sub", None]},
    "solver": {"tol": 1e-9, "max_newton": 10},
    "density": 16,
}


def test_round_trip_is_identity():
    pf = problem_io.from_dict(copy.deepcopy(BASE))
    again = problem_io.loads(problem_io.dumps(pf))
    assert again == pf
    assert again.problem.coeffs[0] == pf.problem.coeffs[0]
    assert again.problem.nonlins == pf.problem.nonlins
    assert np.array_equal(again.problem.coeffs[1].samples, pf.problem.coeffs[1].samples)
    assert problem_io.dumps(again) == problem_io.dumps(pf)


def test_parsed_values():
    pf = problem_io.from_dict(copy.deepcopy(BASE))
    assert pf.problem.T == pytest.approx(2 * np.pi)
    assert pf.problem.coeffs[0].value == pytest.approx(1 / 9)
    assert pf.radii == ((1.0, 0.5), (10.0, 20.0))
    assert pf.search == {"lo": 0.001, "hi": 1e6, "modes": ["sub", None]}
    assert pf.solver.tol == 1e-9 and pf.solver.max_newton == 10
    assert pf.problem.nonlins[1].singular == ("none", "at_zero")
    assert pf.problem.nonlins[1].sign == "nonpositive"


def test_shipped_problems_round_trip(problems_dir):
    for path in sorted(problems_dir.glob("*.json")):
        if path.stem in ("malformed",):
            continue
        pf = problem_io.load(path)
        assert problem_io.loads(problem_io.dumps(pf)) == pf


def _mutate(fn):
    doc = copy.deepcopy(BASE)
    fn(doc)
    return doc


@pytest.mark.parametrize("mutation", [
    lambda d: d.pop("period"),
    lambda d: d.update(period="-1"),
    lambda d: d.update(n=33),
    lambda d: d.update(n=16),
    lambda d: d.update(extra=1),
    lambda d: d["components"].pop(),
    lambda d: d["components"][0].update(nonlinearity="x +"),
    lambda d: d["components"][0].update(singular={"variable": "x", "exponent": 1}),
    lambda d: d["components"][0].pop("nonlinearity"),
    lambda d: d["components"][0].update(coefficient={"constant": 1, "samples": [1]}),
    lambda d: d["components"][0].update(coefficient={"samples": ["a"]}),
    lambda d: d["components"][1]["singular"].update(variable="t"),
    lambda d: d["components"][1]["singular"].update(exponent=0),
    lambda d: d["radii"].update(alpha=[1, 20]),
    lambda d: d["radii"].update(beta=[-1, 2]),
    lambda d: d["search"].update(modes=["up", None]),
    lambda d: d["solver"].update(colour="red"),
    lambda d: d.update(density=1),
    lambda d: d["components"][0].update(nonlinearity="1/(x-1)^2"),
])
def test_invalid_documents(mutation):
    with pytest.raises(InputError):
        problem_io.from_dict(_mutate(mutation))


def test_sign_violation_is_a_configuration_error():
    doc = _mutate(lambda d: d["components"][0].update(nonlinearity="sin(t)"))
    with pytest.raises(ConfigurationError):
        problem_io.from_dict(doc)


def test_unreadable_inputs(tmp_path):
    with pytest.raises(InputError):
        problem_io.load(tmp_path / "missing.json")
    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(InputError):
        problem_io.load(tmp_path / "bad.json")


def test_with_grid_changes_only_n():
    pf = problem_io.from_dict(copy.deepcopy(BASE))
    other = pf.with_grid(128)
    assert other.problem.n == 128
    assert json.loads(problem_io.dumps(other))["n"] == 128
    assert other.problem.nonlins == pf.problem.nonlins

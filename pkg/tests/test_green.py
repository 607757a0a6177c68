import math

import numpy as np
import pytest

from coexist.errors import InputError, MixedSignError, ResonanceError
from coexist.green import (
    HillCoefficient,
    build_green,
    green_residual,
    grid_nodes,
    integrate_hill,
    is_nonresonant,
)

from .conftest import closed_form_green, closed_form_green_negative

T = 2 * math.pi


@pytest.fixture(scope="module")
def k19():
    return build_green(HillCoefficient.constant(T, 1 / 9), 256)


def test_negative_kernel_matches_closed_form():
    k = build_green(HillCoefficient.constant(T, -1.0), 256)
    exact = closed_form_green_negative(1.0, T, k.nodes, k.nodes)
    assert np.abs(k.values - exact).max() < 1e-9
    assert k.sign == "negative"
    # most negative on the diagonal, closest to zero at half a period
    assert k.m == pytest.approx(-math.cosh(math.pi) / (2 * math.sinh(math.pi)), rel=1e-8)
    assert k.M == pytest.approx(-1 / (2 * math.sinh(math.pi)), rel=1e-8)
    assert k.c == pytest.approx(1 / math.cosh(math.pi), rel=1e-8)


def test_trace_matches_constant_coefficient_formula():
    for a in (0.01, 1 / 9, 0.2, -0.5):
        fp = integrate_hill(HillCoefficient.constant(T, a), 512)
        exact = 2 * math.cos(math.sqrt(a) * T) if a > 0 else 2 * math.cosh(math.sqrt(-a) * T)
        assert fp.trace == pytest.approx(exact, rel=1e-8, abs=1e-9)


def test_wronskian_is_conserved():
    samples = 1 / 9 + 0.08 * np.cos(grid_nodes(T, 64)) ** 3
    fp = integrate_hill(HillCoefficient.sampled(T, samples), 512)
    assert np.abs(fp.wronskian - 1).max() < 1e-8
    assert np.linalg.det(fp.monodromy) == pytest.approx(1.0, abs=1e-8)


def test_symmetric_and_periodic(k19):
    assert np.abs(k19.values - k19.values.T).max() < 1e-11
    # G(T, s) equals G(0, s)
    assert np.abs(k19.values_at_period - k19.values[0]).max() < 1e-12


def test_residual_is_second_order():
    coeff = HillCoefficient.constant(T, 1 / 9)
    res = []
    for n in (128, 256, 512):
        k = build_green(coeff, n)
        res.append(green_residual(k, coeff, np.sin(2 * k.nodes)))
    ratios = [res[i] / res[i + 1] for i in range(2)]
    assert all(3 <= r <= 5 for r in ratios)


def test_sampled_constant_equals_constant():
    a = build_green(HillCoefficient.constant(T, 0.15), 128)
    b = build_green(HillCoefficient.sampled(T, np.full(40, 0.15)), 128)
    assert np.abs(a.values - b.values).max() < 1e-12


def test_sampled_coefficient_interpolates_periodically():
    s = 0.1 + 0.05 * np.sin(grid_nodes(T, 32))
    coeff = HillCoefficient.sampled(T, s)
    t = np.linspace(0, 3 * T, 301)
    assert np.abs(coeff(t) - (0.1 + 0.05 * np.sin(t))).max() < 1e-4


def test_apply_integrates_constant_source(k19):
    # x'' + x/9 = 1 has the periodic solution x = 9; the rectangle rule on the
    # kinked kernel is second order, so the error is O(h^2)
    err = np.abs(k19.apply(np.ones(k19.n)) - 9).max()
    assert err < 0.2 * k19.h ** 2


def test_resonant_rejected():
    with pytest.raises(ResonanceError):
        build_green(HillCoefficient.constant(T, 4.0), 256)
    assert is_nonresonant(integrate_hill(HillCoefficient.constant(T, 0.25), 512))


def test_mixed_sign_rejected():
    # k = 1/sqrt(2) is non-resonant but k T / 2 exceeds pi / 2
    with pytest.raises(MixedSignError):
        build_green(HillCoefficient.constant(T, 0.5), 256)


@pytest.mark.parametrize("kwargs", [
    {"value": float("nan")},
    {"value": 1.0, "samples": [1, 2, 3, 4]},
    {},
    {"samples": [1.0, 2.0]},
])
def test_bad_coefficients(kwargs):
    with pytest.raises(InputError):
        HillCoefficient(T, **kwargs)


def test_bad_grid():
    with pytest.raises(InputError):
        integrate_hill(HillCoefficient.constant(T, 0.1), 31)


def test_cone_constant_ratio_is_extreme_ratio(k19):
    exact = closed_form_green(1 / 3, T, k19.nodes, k19.nodes)
    assert k19.c == pytest.approx(exact.min() / exact.max(), rel=1e-8)

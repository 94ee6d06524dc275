import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zetalab.quadrature import Antiderivatives, PairGrid, compensated_cumsum, interval_integral


def _grid(steps=(0.1, 0.25, 0.05, 0.2)):
    t = [0.0]
    for h in steps:
        t += [t[-1] + h, t[-1] + 2 * h]
    return PairGrid(np.array(t))


coef = st.floats(-5, 5, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(coef, coef, coef, st.floats(0.0, 1.2))
def test_quadratics_integrated_exactly(a, b, c, x):
    g = _grid()
    f = lambda u: a + b * u + c * u * u
    F = lambda u: a * u + b * u**2 / 2 + c * u**3 / 3
    FF = lambda u: a * u**2 / 2 + b * u**3 / 6 + c * u**4 / 12
    anti = Antiderivatives(g, f(g.t))
    assert np.allclose(anti.first, F(g.t), atol=1e-12)
    assert np.allclose(anti.second, FF(g.t), atol=1e-12)
    assert anti.first_at(x) == pytest.approx(F(x), abs=1e-12)
    assert anti.second_at(x) == pytest.approx(FF(x), abs=1e-12)
    assert anti.value(x) == pytest.approx(f(x), abs=1e-12)


def test_interval_integral_exact_for_linear():
    g = _grid()
    f = lambda u, side="right": 3.0 - 2.0 * u
    for a, b in [(0.0, 1.2), (0.03, 1.17), (0.21, 0.26), (0.5, 0.5)]:
        exact = 3 * (b - a) - (b * b - a * a)
        assert interval_integral(g, f(g.t), a, b, f) == pytest.approx(exact, abs=1e-13)


def test_interval_integral_rejects_outside():
    g = _grid()
    with pytest.raises(ValueError):
        interval_integral(g, g.t, -0.1, 0.5, lambda u, side="right": u)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 0.6), st.floats(0.0, 0.6), st.integers(0, 2**31))
def test_cauchy_schwarz_on_same_weights(a, w, seed):
    g = _grid()
    b = min(1.2, a + w)
    rng = np.random.default_rng(seed)
    f, h = rng.normal(size=g.t.size), rng.normal(size=g.t.size)
    fa = lambda vals: (lambda u, side="right": float(np.interp(u, g.t, vals)))
    lhs = abs(interval_integral(g, f * h, a, b, fa(f * h)))
    # endpoint samples must come from the same functions for the inequality to hold
    ff = interval_integral(g, f * f, a, b, lambda u, side="right": fa(f)(u) ** 2)
    hh = interval_integral(g, h * h, a, b, lambda u, side="right": fa(h)(u) ** 2)
    fh = interval_integral(g, f * h, a, b, lambda u, side="right": fa(f)(u) * fa(h)(u))
    assert abs(fh) <= math.sqrt(ff * hh) * (1 + 1e-12) + 1e-15
    assert lhs >= 0


def test_unequal_pair_rejected():
    with pytest.raises(ValueError):
        PairGrid(np.array([0.0, 0.1, 0.3]))
    with pytest.raises(ValueError):
        PairGrid(np.array([0.0, 0.1]))


def test_compensated_cumsum_beats_naive():
    x = np.array([1.0, 1e100, 1.0, -1e100] * 10_000)
    out = compensated_cumsum(x)
    assert out[-1] == 20_000.0
    rng = np.random.default_rng(0)
    y = rng.normal(size=100_003)
    assert compensated_cumsum(y)[-1] == pytest.approx(math.fsum(y), abs=1e-12)


def test_compensated_cumsum_chunk_independent_of_threads():
    rng = np.random.default_rng(1)
    y = rng.normal(size=50_000)
    assert compensated_cumsum(y).tobytes() == compensated_cumsum(y.copy()).tobytes()

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from confdimlab.confdim import DecaySeries, ModulusSeries, estimate_confdim, fit_decay_rate
from confdimlab.errors import BadExponent, Inconclusive, TooFewLevels

EPS = 0.05


def planted(p_cross, base=2.0, levels=range(1, 7)):
    """Series with per-level rate (1 - eps) * base**(p_cross - p): it decays
    exactly when p > p_cross."""
    def fn(p):
        r = (1 - EPS) * base ** (p_cross - p)
        return [(k, 3.0 * r**k) for k in levels]
    return fn


def test_exact_geometric_rate():
    assert fit_decay_rate(DecaySeries(2.0, [(1, 1), (2, 0.5), (3, 0.25), (4, 0.125)])) == pytest.approx(0.5, rel=1e-14)


def test_constant_rate():
    s = DecaySeries(2.0, [(k, 0.7) for k in range(5)])
    assert fit_decay_rate(s) == pytest.approx(1.0, rel=1e-14)
    assert s.fitted_rate == pytest.approx(1.0, rel=1e-14)


def test_zero_modulus_counts_as_decay():
    assert fit_decay_rate(DecaySeries(2.0, [(1, 1.0), (2, 0.0), (3, 0.0)])) == 0.0


def test_too_few_levels():
    with pytest.raises(TooFewLevels):
        fit_decay_rate(DecaySeries(2.0, [(1, 1.0), (2, 0.5)]))
    with pytest.raises(ValueError):
        DecaySeries(2.0, [(1, -1.0)])


@given(st.integers(0, 2**32 - 1), st.floats(0.3, 1.5))
def test_noisy_geometric(seed, rate):
    # values with +-5% multiplicative noise over ten levels: the fit on the
    # last five is within 0.03 of the planted rate
    rng = np.random.default_rng(seed)
    ks = np.arange(10)
    noise = rng.uniform(0.95, 1.05, ks.size)
    s = DecaySeries(2.0, list(zip(ks, 2.0 * rate**ks * noise)))
    assert abs(fit_decay_rate(s) - rate) <= 0.03 * max(1.0, rate)


def test_planted_crossover():
    est = estimate_confdim(series_fn=planted(1.5), p_lo=1.1, p_hi=4.0, eps_rate=EPS)
    lo, hi = est.bracket
    assert hi - lo <= 0.05
    assert lo <= 1.5 <= hi
    assert abs(est.p_star - 1.5) <= 0.05
    assert not est.warnings


@given(st.floats(1.3, 3.8))
def test_planted_crossover_anywhere(p_cross):
    est = estimate_confdim(series_fn=planted(p_cross), p_lo=1.1, p_hi=4.0, eps_rate=EPS)
    assert est.bracket[0] <= p_cross <= est.bracket[1]


def test_bracket_halves_each_step():
    est = estimate_confdim(series_fn=planted(2.2), p_lo=1.1, p_hi=4.0, eps_rate=EPS, steps=6)
    coarse = (4.0 - 1.1) / 4
    assert est.bracket[1] - est.bracket[0] == pytest.approx(coarse / 2**6, rel=1e-12)
    assert est.steps == 6


def test_no_crossover_is_inconclusive():
    with pytest.raises(Inconclusive):
        estimate_confdim(series_fn=planted(10.0), p_lo=1.1, p_hi=4.0)
    with pytest.raises(Inconclusive):
        estimate_confdim(series_fn=planted(1.0), p_lo=1.1, p_hi=4.0)


def test_non_monotone_classification_is_flagged():
    def fn(p):
        r = 0.5 if p < 2.0 else 2.0
        return [(k, r**k) for k in range(1, 5)]

    with pytest.raises(Inconclusive) as info:
        estimate_confdim(series_fn=fn, p_lo=1.1, p_hi=4.0)
    assert len(info.value.offending) == 2


def test_bad_ranges():
    with pytest.raises(BadExponent):
        estimate_confdim(series_fn=planted(2), p_lo=1.0)
    with pytest.raises(BadExponent):
        estimate_confdim(series_fn=planted(2), p_lo=2.0, p_hi=1.5)
    with pytest.raises(TooFewLevels):
        estimate_confdim("grid", range(1, 3))


def test_grid_crossing_rate_law():
    # the square's crossing modulus scales by exactly 2**(2 - p) per level
    series = ModulusSeries("grid", range(1, 5), "crossing:left,right", tol=1e-6)
    for p in (1.5, 2.0, 3.0):
        values = [v for _, v in series(p)]
        for a, b in zip(values, values[1:]):
            assert b / a == pytest.approx(2 ** (2 - p), rel=1e-4)
    assert len(series.rows) == 12


def test_grid_estimate_small_levels():
    est = estimate_confdim("grid", range(1, 5), 1.2, 3.0, "crossing:left,right", steps=8)
    assert 1.8 <= est.p_star <= 2.2
    assert est.p_star == pytest.approx(2 + math.log2(1 / 0.95), abs=0.01)


def test_carpet_estimate_in_sanity_bracket():
    est = estimate_confdim("carpet", range(1, 5), 1.2, 3.0, "crossing:left,right", steps=6)
    assert 1.0 < est.p_star < math.log(8) / math.log(3) + 0.1
    assert est.table and all(r["converged"] for r in est.table)

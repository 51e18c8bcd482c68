"""Weight-sequence checks against closed forms and asymptotics.

Oracles: hand-derived Taylor coefficients (degree <= 2), the closed-form
symbol (geometric resummation), and the k^(-alpha-1) coefficient
asymptotics of (1 - z)^alpha-type generating functions.
"""

import math

import numpy as np
import pytest

from fracstep.cq_weights import (
    Generator,
    WeightSequence,
    apply_discrete_derivative,
    averaged_weights,
    base_weights,
    consistency_residual,
    symbol,
)


def test_alpha_one_collapses_to_integer_order_stencil():
    # both generators reduce to the classical second-order stencil at alpha = 1
    for kind in ("fbdf2", "gng2"):
        w = base_weights(Generator(kind, 1.0), 3).values
        assert w.tolist() == [1.5, -2.0, 0.5, 0.0]


def test_leading_weights_match_hand_expansion():
    # fbdf2: w0 = (3/2)^a, w1 = -(4a/3)(3/2)^a, w2 = (3/2)^a * (a(a-1)/2 * 10/9 ... ) at a=1/2: -(3/2)^(1/2)/18
    s = 1.5 ** 0.5
    w = base_weights(Generator("fbdf2", 0.5), 4).values
    assert abs(w[0] - s) <= 1e-15
    assert abs(w[1] - (-(2.0 / 3.0) * s)) <= 1e-15
    assert abs(w[2] - (-s / 18.0)) <= 1e-15
    # gng2: w0 = 1 + a/2, w1 = (1 + a/2)(-a) - a/2
    w = base_weights(Generator("gng2", 0.5), 2).values
    assert w[0] == 1.25
    assert w[1] == -0.875


def test_series_sums_to_symbol_inside_disk():
    for kind in ("fbdf2", "gng2"):
        for alpha in (0.25, 0.5, 0.9):
            gen = Generator(kind, alpha)
            w = base_weights(gen, 600).values
            for zeta in (0.3, -0.5, -0.9, 0.5 * np.exp(0.7j)):
                powers = zeta ** np.arange(601)
                assert abs(np.sum(w * powers) - symbol(gen, zeta)) <= 1e-12


def test_symbol_endpoint_values():
    for alpha in (0.1, 0.5, 0.9):
        fb = Generator("fbdf2", alpha)
        gn = Generator("gng2", alpha)
        assert abs(symbol(fb, -1.0) - 4.0 ** alpha) <= 1e-14
        assert abs(symbol(gn, -1.0) - 2.0 ** alpha * (1.0 + alpha)) <= 1e-14
        assert symbol(fb, 1.0) == 0.0
        assert symbol(gn, 1.0) == 0.0


def test_averaging_is_exact_neighbor_mean():
    gen = Generator("fbdf2", 0.5)
    base = base_weights(gen, 50)
    avg = averaged_weights(base).values
    w = base.values
    assert avg[0] == w[0] / 2.0
    assert np.all(avg[1:] == (w[1:] + w[:-1]) / 2.0)
    # worked example at alpha = 1
    avg1 = averaged_weights(base_weights(Generator("fbdf2", 1.0), 2)).values
    assert avg1.tolist() == [0.75, -0.25, -0.75]


def test_averaged_symbol_vanishes_at_minus_one():
    # alternating sums of averaged weights telescope to w_N / 2, so they
    # must shrink at the rate the base weights decay
    gen = Generator("gng2", 0.4)
    base = base_weights(gen, 800)
    avg = averaged_weights(base).values
    signs = np.where(np.arange(avg.size) % 2 == 0, 1.0, -1.0)
    assert abs(np.sum(avg * signs)) <= abs(base.values[-1])
    assert abs(np.sum(avg * signs)) <= 1e-4


def test_weight_decay_rate():
    ks = np.arange(128, 2049)
    logk = np.log(ks)
    for kind in ("fbdf2", "gng2"):
        for alpha in (0.25, 0.5, 0.75):
            w = base_weights(Generator(kind, alpha), 2048).values
            slope = np.polyfit(logk, np.log(np.abs(w[128:])), 1)[0]
            assert abs(slope - (-alpha - 1.0)) <= 0.1


def test_partial_sum_decay_rate():
    ks = np.arange(128, 2049)
    logk = np.log(ks)
    for kind in ("fbdf2", "gng2"):
        for alpha in (0.25, 0.5, 0.75):
            w = base_weights(Generator(kind, alpha), 2048).values
            ps = np.abs(np.cumsum(w))
            slope = np.polyfit(logk, np.log(ps[128:]), 1)[0]
            assert abs(slope - (-alpha)) <= 0.1


def test_consistency_residual_is_second_order():
    taus = (1e-2, 5e-3, 2.5e-3)
    for kind in ("fbdf2", "gng2"):
        for alpha in (0.3, 0.5, 0.8):
            gen = Generator(kind, alpha)
            r = [consistency_residual(gen, t) for t in taus]
            assert 1.9 <= math.log2(r[0] / r[1]) <= 2.1
            assert 1.9 <= math.log2(r[1] / r[2]) <= 2.1
        assert consistency_residual(Generator(kind, 0.5), 1e-3) <= 1e-5


def test_discrete_derivative_of_quadratic():
    # D^alpha t^2 = Gamma(3)/Gamma(3-alpha) * t^(2-alpha); second-order rule
    # should converge with rate ~2, checked at t = 1
    for kind in ("fbdf2", "gng2"):
        for alpha in (0.3, 0.7):
            errs = []
            for n in (64, 128, 256):
                tau = 1.0 / n
                t = tau * np.arange(n + 1)
                ws = base_weights(Generator(kind, alpha), n)
                out = apply_discrete_derivative(ws, tau, t ** 2)
                exact = math.gamma(3.0) / math.gamma(3.0 - alpha)
                errs.append(abs(out[-1] - exact))
            assert math.log2(errs[0] / errs[1]) >= 1.9
            assert math.log2(errs[1] / errs[2]) >= 1.9


def test_discrete_derivative_of_constant_decays_like_partial_sums():
    # on the constant 1 the rule returns tau^-alpha * cumsum(w), which decays
    # like t^-alpha (no spurious convergence-to-zero to report)
    alpha = 0.5
    n = 512
    tau = 1.0 / n
    ws = base_weights(Generator("fbdf2", alpha), n)
    out = apply_discrete_derivative(ws, tau, np.ones(n + 1))
    ts = tau * np.arange(128, n + 1)
    slope = np.polyfit(np.log(ts), np.log(np.abs(out[128:])), 1)[0]
    assert abs(slope - (-alpha)) <= 0.1


def test_weight_values_are_immutable():
    ws = base_weights(Generator("fbdf2", 0.5), 8)
    with pytest.raises((ValueError, RuntimeError)):
        ws.values[0] = 99.0


def test_validation_rejections():
    with pytest.raises(ValueError):
        Generator("bdf3", 0.5)
    for bad_alpha in (0.0, -0.1, 1.1):
        with pytest.raises(ValueError):
            Generator("fbdf2", bad_alpha)
    gen = Generator("fbdf2", 0.5)
    with pytest.raises(ValueError):
        base_weights(gen, -1)
    ws = base_weights(gen, 4)
    with pytest.raises(ValueError):
        averaged_weights(averaged_weights(ws))
    with pytest.raises(ValueError):
        apply_discrete_derivative(ws, 0.0, np.ones(3))
    with pytest.raises(ValueError):
        apply_discrete_derivative(ws, 0.1, np.ones(6))
    for bad_tau in (0.0, -1.0, 0.75):
        with pytest.raises(ValueError):
            consistency_residual(gen, bad_tau)
    with pytest.raises(ValueError):
        symbol(gen, 1.5)
    with pytest.raises(ValueError):
        WeightSequence(np.ones(3), "squared", gen)

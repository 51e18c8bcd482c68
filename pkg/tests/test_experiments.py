"""Registry, sweep harness, and report arithmetic.

Oracles: the erfc closed form for the half-order relaxation amplitude,
an independent term-by-term series for the fractional eigenrelation,
and exactly reproducible rerun/round-trip comparisons.
"""

import math

import numpy as np
import pytest

from fracstep.experiments import (
    EXAMPLES,
    ExperimentConfig,
    error_against_reference,
    has_exact_solution,
    make_problem,
    measure,
    reference_solution,
    theoretical_order,
)
from fracstep.mittag_leffler import mittag_leffler
from fracstep.spatial import assemble_spectral
from fracstep.stepping import acn, run
from fracstep.cq_weights import Generator

# E_1/2(-1) to 20 places, from the erfc closed form evaluated at 50-digit
# precision; the ex3 amplitude at t = 1 adds t^3 = 1 on top.
_E_HALF_MINUS_ONE = 0.42758357615580700441


def test_registry_covers_examples_and_validates():
    assert EXAMPLES == ("table1", "ex1", "ex2", "ex3")
    for example in EXAMPLES:
        prob = make_problem(example, 0.5)
        assert prob.final_time == 1.0
        assert prob.label == example
    with pytest.raises(ValueError):
        make_problem("table9", 0.5)
    with pytest.raises(ValueError):
        make_problem("ex1", 1.2)
    with pytest.raises(ValueError):
        make_problem("ex1", 0.0)
    assert has_exact_solution("table1") and has_exact_solution("ex1") and has_exact_solution("ex3")
    assert not has_exact_solution("ex2")
    with pytest.raises(ValueError):
        has_exact_solution("bogus")


def test_ex1_starts_from_rest():
    prob = make_problem("ex1", 0.3)
    x = np.linspace(0.0, math.pi, 9)
    assert prob.u0_mode == 0.0
    assert np.max(np.abs(prob.u0(x))) == 0.0
    assert prob.exact_mode(0.0) == 0.0
    assert np.max(np.abs(prob.exact(x, 0.0))) == 0.0


def test_relaxation_amplitude_satisfies_eigenrelation():
    # The fractional derivative of E_a(-t^a) equals -E_a(-t^a): shifting
    # the series index once reproduces the series itself with a sign.
    # Sum the shifted series independently, term by term.
    for alpha in (0.3, 0.5, 0.7):
        for t in (0.25, 0.5, 1.0):
            total = 0.0
            sign = -1.0
            for j in range(1, 400):
                term = sign * t ** (alpha * (j - 1)) / math.gamma(alpha * (j - 1) + 1.0)
                total += term
                sign = -sign
                if abs(term) < 1e-18:
                    break
            assert abs(total + mittag_leffler(alpha, -(t ** alpha))) <= 1e-12


def test_ex3_exact_value_at_midpoint():
    prob = make_problem("ex3", 0.5)
    got = prob.exact(np.array([math.pi / 2.0]), 1.0)[0]
    assert abs(got - (_E_HALF_MINUS_ONE + 1.0)) <= 1e-14
    # independent route: E_1/2(-1) = e * erfc(1)
    assert abs(got - (math.e * math.erfc(1.0) + 1.0)) <= 1e-13
    assert abs(prob.exact_mode(1.0) - got) <= 1e-15


def test_ex3_source_balances_exact_solution():
    # At the single mode, d^a/dt^a (E + t^3) + (E + t^3) must equal the
    # source amplitude c t^(3-a) + t^3 with c = 6/Gamma(4-a): the E part
    # cancels by the eigenrelation and the t^3 part matches term by term.
    alpha = 0.4
    prob = make_problem("ex3", alpha)
    c = 6.0 / math.gamma(4.0 - alpha)
    x = np.array([math.pi / 2.0])
    for t in (0.3, 0.8):
        assert abs(prob.source(x, t)[0] - (c * t ** (3.0 - alpha) + t ** 3)) <= 1e-15


def test_ex2_has_no_closed_form():
    prob = make_problem("ex2", 0.5)
    assert prob.exact is None and prob.exact_mode is None
    x = np.array([math.pi / 2.0])
    assert abs(prob.source(x, 0.25)[0] + 0.25) <= 1e-15


def test_config_validation_rejects_bad_sweeps():
    good = dict(example="table1", alphas=(0.5,), n_steps=(16, 32),
                scheme_family="acn", generator_kind="fbdf2")
    ExperimentConfig(**good)
    for bad in (
        dict(good, example="table7"),
        dict(good, scheme_family="theta"),
        dict(good, generator_kind="bdf3"),
        dict(good, space="fd"),
        dict(good, alphas=()),
        dict(good, alphas=(1.0,)),
        dict(good, n_steps=()),
        dict(good, n_steps=(48,)),
        dict(good, n_steps=(16, 64)),        # skips a halving
        dict(good, n_steps=(32, 16)),        # wrong direction
        dict(good, eval_mode="last"),
        dict(good, eval_time=0.3),           # 0.3 * 16 is not an integer
        dict(good, eval_time=0.0),
        dict(good, eval_time=1.5),
        dict(good, n_ref=4096),              # exact solution known
        dict(good, history="magic"),
    ):
        with pytest.raises(ValueError):
            ExperimentConfig(**bad)
    with pytest.raises(ValueError):
        ExperimentConfig(**dict(good, example="ex2", n_ref=100))
    with pytest.raises(ValueError):
        ExperimentConfig(**dict(good, example="ex2", n_ref=64))  # < 4x largest


def test_ex2_config_fills_default_reference():
    cfg = ExperimentConfig(example="ex2", alphas=(0.5,), n_steps=(16, 32),
                           scheme_family="acn", generator_kind="fbdf2")
    assert cfg.n_ref == 4096
    assert cfg.taus == (1.0 / 16.0, 1.0 / 32.0)


def test_reference_comparison_guards():
    prob = make_problem("ex2", 0.5)
    disc = assemble_spectral()
    scheme = acn(Generator("fbdf2", 0.5))
    with pytest.raises(ValueError):
        reference_solution(prob, disc, scheme, 100)
    traj = run(scheme, disc, prob, 64)
    ref = run(scheme, disc, prob, 96)  # does not nest the 64-step grid
    with pytest.raises(ValueError):
        error_against_reference(disc, traj, ref, "fixed", 0.5)
    # self comparison is exactly zero in both evaluation modes
    assert error_against_reference(disc, traj, traj, "fixed", 0.5) == 0.0
    assert error_against_reference(disc, traj, traj, "max") == 0.0
    with pytest.raises(ValueError):
        error_against_reference(disc, traj, traj, "fixed", 0.13)  # off the grid


def test_measure_reduced_order_sweep():
    cfg = ExperimentConfig(example="table1", alphas=(0.5,), n_steps=(128, 256, 512),
                           scheme_family="acn", generator_kind="fbdf2")
    rep = measure(cfg)
    assert [r.order is None for r in rep.rows] == [True, False, False]
    assert abs(rep.rows[1].order - 0.48) <= 0.03
    assert abs(rep.rows[2].order - 0.49) <= 0.03
    assert rep.metadata["flags"] == ()
    assert rep.metadata["reference"] == "exact solution"


def test_measure_reference_sweep_max_norm():
    cfg = ExperimentConfig(example="ex2", alphas=(0.9,), n_steps=(64, 128, 256),
                           scheme_family="acn", generator_kind="gng2",
                           eval_mode="max", n_ref=1024)
    rep = measure(cfg)
    assert rep.metadata["reference"] == "same-scheme reference run, 1024 steps"
    for row in rep.rows[1:]:
        assert 1.6 <= row.order <= 2.1  # near 1 + alpha
    assert all(row.error > 0.0 for row in rep.rows)


def test_measure_orders_are_log2_ratios():
    cfg = ExperimentConfig(example="ex1", alphas=(0.4, 0.6), n_steps=(16, 32, 64),
                           scheme_family="acn", generator_kind="gng2")
    rep = measure(cfg)
    assert len(rep.rows) == 6
    for i, row in enumerate(rep.rows):
        if i % 3 == 0:
            assert row.order is None  # first line of each alpha block
        else:
            want = math.log2(rep.rows[i - 1].error / row.error)
            assert abs(row.order - want) <= 1e-12


def test_measure_rerun_is_bit_identical():
    cfg = ExperimentConfig(example="table1", alphas=(0.3,), n_steps=(16, 32),
                           scheme_family="bdf2", generator_kind="fbdf2")
    assert measure(cfg).rows == measure(cfg).rows


def test_spectral_sweep_ignores_mesh_width():
    base = dict(example="table1", alphas=(0.5,), n_steps=(16, 32),
                scheme_family="acn", generator_kind="fbdf2", space="spectral")
    a = measure(ExperimentConfig(**base))
    b = measure(ExperimentConfig(**base, h=math.pi / 64))
    assert a.rows == b.rows


def test_nonmonotone_errors_are_flagged_not_fatal():
    cfg = ExperimentConfig(example="ex3", alphas=(0.1,), n_steps=(4, 8, 16, 32, 64),
                           scheme_family="macn", generator_kind="fbdf2")
    rep = measure(cfg)
    assert rep.metadata["flags"] == ("alpha=0.1: error sequence is not strictly decreasing",)
    assert len(rep.rows) == 5  # rows still reported


def test_fem_cross_run_matches_spectral_to_mesh_accuracy():
    # The fem sweep must agree with the spectral one up to the spatial
    # error; calibrate the h^2 constant on a coarser mesh, then allow a
    # factor of two at the target width.
    base = dict(example="table1", alphas=(0.5,), n_steps=(64,),
                scheme_family="acn", generator_kind="fbdf2")
    e_spec = measure(ExperimentConfig(**base)).rows[0].error
    e_coarse = measure(ExperimentConfig(**base, space="fem", h=math.pi / 512)).rows[0].error
    e_fine = measure(ExperimentConfig(**base, space="fem", h=math.pi / 1024)).rows[0].error
    h_coarse = math.pi / 512
    h_fine = math.pi / 1024
    c_fit = abs(e_coarse - e_spec) / h_coarse ** 2
    assert abs(e_fine - e_spec) <= 2.0 * c_fit * h_fine ** 2


def test_theoretical_order_mapping():
    assert theoretical_order("table1", "acn", "fixed", 0.3) == 0.3
    assert theoretical_order("ex1", "acn", "fixed", 0.8) == 0.8
    assert theoretical_order("ex2", "acn", "fixed", 0.5) == 2.0
    assert theoretical_order("ex2", "acn", "max", 0.5) == 1.5
    assert theoretical_order("ex3", "macn", "fixed", 0.5) == 2.0
    assert theoretical_order("table1", "bdf2", "fixed", 0.5) is None
    assert theoretical_order("ex3", "acn", "fixed", 0.5) is None

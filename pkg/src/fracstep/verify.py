"""Built-in invariant checks behind `fracstep verify`.

Each check is a small self-contained assertion about the library: kernel
decay rates, consistency order, fixed points, history bookkeeping,
special-function identities, and report arithmetic. run_checks() prints
one PASS/FAIL line per check and returns a process exit code.
"""

from __future__ import annotations

import math

import numpy as np

from .cq_weights import (
    Generator,
    apply_discrete_derivative,
    averaged_weights,
    base_weights,
    consistency_residual,
)
from .experiments import ExperimentConfig, make_problem, measure
from .mittag_leffler import mittag_leffler
from .reporting import parse_csv, render_csv
from .spatial import assemble_fem, assemble_spectral, l2_norm
from .stepping import ProblemSpec, acn, bdf2_plain, macn, residue_term, run

def _steady_problem():
    return ProblemSpec(
        label="steady",
        final_time=1.0,
        u0=np.sin,
        u0_grad=np.cos,
        u0_mode=1.0,
        source=lambda x, t: np.sin(x),
        exact=lambda x, t: np.sin(x),
        exact_mode=lambda t: 1.0,
    )


def _loglog_slope(ks, vals):
    return np.polyfit(np.log(np.asarray(ks, float)), np.log(np.asarray(vals, float)), 1)[0]


def check_weight_tail_decay():
    for kind in ("fbdf2", "gng2"):
        for alpha in (0.3, 0.7):
            ws = base_weights(Generator(kind, alpha), 4096).values
            ks = np.arange(64, 4097, 64)
            slope = _loglog_slope(ks, np.abs(ws[ks]))
            assert abs(slope + (1.0 + alpha)) <= 0.1, (
                f"{kind} alpha={alpha}: tail slope {slope:.3f}, expected {-(1 + alpha):.3f}"
            )


def check_kernel_partial_sums():
    for kind in ("fbdf2", "gng2"):
        for alpha in (0.3, 0.7):
            ws = base_weights(Generator(kind, alpha), 4096).values
            partial = np.cumsum(ws)
            ks = np.arange(64, 4097, 64)
            slope = _loglog_slope(ks, np.abs(partial[ks]))
            assert abs(slope + alpha) <= 0.1, (
                f"{kind} alpha={alpha}: partial-sum slope {slope:.3f}, expected {-alpha:.3f}"
            )


def check_consistency_second_order():
    for kind in ("fbdf2", "gng2"):
        gen = Generator(kind, 0.5)
        res = [abs(consistency_residual(gen, tau)) for tau in (1e-2, 5e-3, 2.5e-3)]
        for a, b in zip(res, res[1:]):
            rate = math.log2(a / b)
            assert 1.9 <= rate <= 2.1, f"{kind}: consistency rate {rate:.3f} outside [1.9, 2.1]"
        assert abs(consistency_residual(gen, 1e-3)) <= 1e-5, f"{kind}: residual too large at tau=1e-3"


def check_quadratic_derivative_rate():
    alpha = 0.5
    exact = math.gamma(3.0) / math.gamma(3.0 - alpha)  # times t^(2-alpha) at t = 1
    for kind in ("fbdf2", "gng2"):
        gen = Generator(kind, alpha)
        errs = []
        for n in (64, 128, 256):
            tau = 1.0 / n
            t = tau * np.arange(n + 1)
            approx = apply_discrete_derivative(base_weights(gen, n), tau, t ** 2)
            errs.append(abs(approx[-1] - exact))
        for a, b in zip(errs, errs[1:]):
            rate = math.log2(a / b)
            assert rate >= 1.9, f"{kind}: derivative rate {rate:.3f} below 1.9"


def check_steady_state_fixed_point():
    prob = _steady_problem()
    gen = Generator("fbdf2", 0.4)
    for disc in (assemble_spectral(), assemble_fem(math.pi / 64)):
        scale = l2_norm(disc, run(acn(gen), disc, prob, 1).states[0])
        for scheme in (acn(gen), macn(gen), bdf2_plain(gen)):
            traj = run(scheme, disc, prob, 32)
            drift = max(
                l2_norm(disc, traj.states[k] - traj.states[0]) for k in range(1, 33)
            )
            assert drift <= 1e-10 * scale, (
                f"{scheme.family}: steady drift {drift:.2e} exceeds 1e-10 relative"
            )


def check_history_fft_matches_naive():
    prob = make_problem("table1", 0.5)
    disc = assemble_spectral()
    scheme = acn(Generator("fbdf2", 0.5))
    slow = run(scheme, disc, prob, 256, history="naive")
    fast = run(scheme, disc, prob, 256, history="fft")
    scale = np.max(np.abs(slow.states))
    diff = np.max(np.abs(slow.states - fast.states))
    assert diff <= 1e-12 * scale, f"fft history deviates by {diff:.2e} (scale {scale:.2e})"


def check_ml_exponential_limit():
    for z in np.linspace(-5.0, 0.0, 21):
        got = mittag_leffler(1.0, float(z))
        assert abs(got - math.exp(z)) <= 1e-13, f"E_1({z:.2f}) off by {abs(got - math.exp(z)):.2e}"


def check_ml_square_root_identity():
    for z in np.linspace(-2.0, 0.0, 17):
        got = mittag_leffler(0.5, float(z))
        want = math.exp(z * z) * math.erfc(-z)
        assert abs(got - want) <= 1e-11, f"E_1/2({z:.2f}) off by {abs(got - want):.2e}"


def check_macn_defect_rejected():
    gen = Generator("fbdf2", 0.5)
    try:
        macn(gen, a1=-0.3, a2=0.1)
    except ValueError:
        pass
    else:
        raise AssertionError("correction pair violating 1/2 + a1 - a2 = 0 was accepted")
    macn(gen)  # the default pair must construct


def check_averaged_symbol_vanishes():
    for alpha in (0.3, 0.7):
        base = base_weights(Generator("fbdf2", alpha), 2048).values
        avg = averaged_weights(base_weights(Generator("fbdf2", alpha), 2048)).values
        signs = (-1.0) ** np.arange(2049)
        total = float(np.sum(signs * avg))
        telescoped = 0.5 * base[-1]
        assert abs(abs(total) - abs(telescoped)) <= 1e-13, (
            f"alpha={alpha}: alternating sum {total:.3e} vs telescoped {telescoped:.3e}"
        )


def check_residue_corrected_order():
    alpha = 0.5
    scheme = acn(Generator("fbdf2", alpha))
    prob = make_problem("table1", alpha)
    disc = assemble_spectral()
    corrected = []
    residues = []
    for n_steps in (128, 256, 512):
        traj = run(scheme, disc, prob, n_steps)
        n = n_steps // 2
        i3 = residue_term(scheme, disc, prob, traj.tau, n)
        e = np.array([prob.exact_mode(0.5)]) - traj.states[n]
        corrected.append(l2_norm(disc, e - i3))
        residues.append(l2_norm(disc, i3))
    for a, b in zip(corrected, corrected[1:]):
        rate = math.log2(a / b)
        assert 1.8 <= rate <= 2.2, f"corrected order {rate:.3f} outside [1.8, 2.2]"
    for a, b in zip(residues, residues[1:]):
        ratio = a / b
        assert abs(ratio - 2.0 ** alpha) <= 0.05, f"residue ratio {ratio:.4f} vs {2.0 ** alpha:.4f}"


def _small_config(**overrides):
    base = dict(
        example="table1", alphas=(0.5,), n_steps=(16, 32, 64),
        scheme_family="acn", generator_kind="fbdf2", space="spectral",
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def check_order_column_arithmetic():
    rep = measure(_small_config())
    for prev, row in zip(rep.rows, rep.rows[1:]):
        want = math.log2(prev.error / row.error)
        assert row.order is not None and abs(row.order - want) <= 1e-12, "order is not the log2 ratio"
    assert rep.rows[0].order is None, "first row must not carry an order"


def check_sweep_rerun_bit_identical():
    a = measure(_small_config())
    b = measure(_small_config())
    assert a.rows == b.rows, "rerun produced different rows"


def check_spectral_reports_ignore_h():
    a = measure(_small_config(h=None))
    b = measure(_small_config(h=math.pi / 64))
    assert a.rows == b.rows, "spectral sweep depends on the fem mesh width"


def check_csv_round_trip():
    rep = measure(_small_config())
    back = parse_csv(render_csv(rep))
    assert back.rows == rep.rows, "csv round trip changed the rows"
    for key in ("scheme", "generator", "space", "eval"):
        assert back.metadata[key] == rep.metadata[key], f"csv round trip lost {key}"


CHECKS = (
    ("weight-tail-decay", check_weight_tail_decay),
    ("kernel-partial-sums", check_kernel_partial_sums),
    ("consistency-second-order", check_consistency_second_order),
    ("quadratic-derivative-rate", check_quadratic_derivative_rate),
    ("steady-state-fixed-point", check_steady_state_fixed_point),
    ("history-fft-matches-naive", check_history_fft_matches_naive),
    ("ml-exponential-limit", check_ml_exponential_limit),
    ("ml-square-root-identity", check_ml_square_root_identity),
    ("macn-defect-rejected", check_macn_defect_rejected),
    ("averaged-symbol-vanishes", check_averaged_symbol_vanishes),
    ("residue-corrected-order", check_residue_corrected_order),
    ("order-column-arithmetic", check_order_column_arithmetic),
    ("sweep-rerun-bit-identical", check_sweep_rerun_bit_identical),
    ("spectral-reports-ignore-h", check_spectral_reports_ignore_h),
    ("csv-round-trip", check_csv_round_trip),
)


def run_checks() -> int:
    failures = 0
    for name, fn in CHECKS:
        try:
            fn()
        except AssertionError as exc:
            failures += 1
            print(f"FAIL {name}: {exc}")
        except Exception as exc:  # noqa: BLE001 - a crash is also a failure
            failures += 1
            print(f"FAIL {name}: unexpected {type(exc).__name__}: {exc}")
        else:
            print(f"PASS {name}")
    if failures:
        print(f"{failures} of {len(CHECKS)} checks failed")
        return 1
    print(f"all {len(CHECKS)} checks passed")
    return 0

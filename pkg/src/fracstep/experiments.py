"""Benchmark problem registry and the convergence-study harness.

Four built-in problems on (0, pi) with T = 1, all single sine mode:

  table1  u0 = sin x, f = 0,          exact amplitude E_a(-t^a)
  ex1     u0 = 0,     f = -sin x,     exact amplitude E_a(-t^a) - 1
  ex2     u0 = 0,     f = -t sin x,   no closed form (reference run)
  ex3     u0 = sin x, f = (6t^(3-a)/Gamma(4-a) + t^3) sin x,
                                      exact amplitude E_a(-t^a) + t^3

measure() runs a (alpha, tau) sweep, evaluates L2 errors at a fixed time
or in the max-over-steps norm, and assembles a ConvergenceReport whose
orders are base-2 logs of consecutive error ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cq_weights import GENERATOR_KINDS, Generator
from .mittag_leffler import mittag_leffler
from .spatial import assemble_fem, assemble_spectral, l2_norm
from .stepping import (
    ProblemSpec,
    SchemeSpec,
    Trajectory,
    acn,
    bdf2_plain,
    error_norm,
    macn,
    run,
)

EXAMPLES = ("table1", "ex1", "ex2", "ex3")
FINAL_TIME = 1.0
DEFAULT_N_REF = 2 ** 12
DEFAULT_FEM_H = math.pi / 1024

_FAMILY_FACTORIES = {"acn": acn, "macn": macn, "bdf2": bdf2_plain}


def _relaxation_amplitude(alpha: float):
    def amp(t: float) -> float:
        return mittag_leffler(alpha, -(t ** alpha)) if t > 0.0 else 1.0

    return amp


def make_problem(example: str, alpha: float) -> ProblemSpec:
    """Instantiate a registry problem at a concrete fractional order."""
    if example not in EXAMPLES:
        raise ValueError(f"unknown example {example!r}, expected one of {EXAMPLES}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    ml = _relaxation_amplitude(alpha)
    if example == "table1":
        return ProblemSpec(
            label="table1", final_time=FINAL_TIME,
            u0=np.sin, u0_grad=np.cos, u0_mode=1.0,
            source=lambda x, t: 0.0,
            exact=lambda x, t: ml(t) * np.sin(x),
            exact_mode=ml,
        )
    if example == "ex1":
        return ProblemSpec(
            label="ex1", final_time=FINAL_TIME,
            u0=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            u0_grad=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            u0_mode=0.0,
            source=lambda x, t: -np.sin(x),
            exact=lambda x, t: (ml(t) - 1.0) * np.sin(x),
            exact_mode=lambda t: ml(t) - 1.0,
        )
    if example == "ex2":
        return ProblemSpec(
            label="ex2", final_time=FINAL_TIME,
            u0=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            u0_grad=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            u0_mode=0.0,
            source=lambda x, t: -t * np.sin(x),
        )
    coeff = 6.0 / math.gamma(4.0 - alpha)
    return ProblemSpec(
        label="ex3", final_time=FINAL_TIME,
        u0=np.sin, u0_grad=np.cos, u0_mode=1.0,
        source=lambda x, t: (coeff * t ** (3.0 - alpha) + t ** 3) * np.sin(x),
        exact=lambda x, t: (ml(t) + t ** 3) * np.sin(x),
        exact_mode=lambda t: ml(t) + t ** 3,
    )


def has_exact_solution(example: str) -> bool:
    if example not in EXAMPLES:
        raise ValueError(f"unknown example {example!r}, expected one of {EXAMPLES}")
    return example != "ex2"


def _is_power_of_two(n: int) -> bool:
    return isinstance(n, int) and n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: an example, alpha values, and a tau ladder for one scheme."""

    example: str
    alphas: tuple
    n_steps: tuple
    scheme_family: str
    generator_kind: str
    space: str = "spectral"
    h: Optional[float] = None  # fem mesh width; ignored in spectral mode
    eval_mode: str = "fixed"   # "fixed" or "max"
    eval_time: float = 0.5
    n_ref: Optional[int] = None
    history: str = "naive"

    def __post_init__(self):
        if self.example not in EXAMPLES:
            raise ValueError(f"unknown example {self.example!r}, expected one of {EXAMPLES}")
        if self.scheme_family not in _FAMILY_FACTORIES:
            raise ValueError(f"unknown scheme {self.scheme_family!r}, expected acn, macn, or bdf2")
        if self.generator_kind not in GENERATOR_KINDS:
            raise ValueError(f"unknown generator {self.generator_kind!r}, expected one of {GENERATOR_KINDS}")
        if self.space not in ("spectral", "fem"):
            raise ValueError(f"space must be 'spectral' or 'fem', got {self.space!r}")
        if self.eval_mode not in ("fixed", "max"):
            raise ValueError(f"eval_mode must be 'fixed' or 'max', got {self.eval_mode!r}")
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        object.__setattr__(self, "n_steps", tuple(int(n) for n in self.n_steps))
        if not self.alphas:
            raise ValueError("alphas must be nonempty")
        for a in self.alphas:
            if not 0.0 < a < 1.0:
                raise ValueError(f"alpha must lie in (0, 1), got {a}")
        if not self.n_steps:
            raise ValueError("n_steps must be nonempty")
        for n in self.n_steps:
            if not _is_power_of_two(n):
                raise ValueError(f"step counts must be powers of two, got {n}")
        for prev, nxt in zip(self.n_steps, self.n_steps[1:]):
            if nxt != 2 * prev:
                raise ValueError(
                    f"step counts must double (tau halvings) for order columns, got {prev} -> {nxt}"
                )
        if self.eval_mode == "fixed":
            if not 0.0 < self.eval_time <= FINAL_TIME:
                raise ValueError(f"eval time must lie in (0, {FINAL_TIME}], got {self.eval_time}")
            for n in self.n_steps:
                steps = self.eval_time / FINAL_TIME * n
                if abs(steps - round(steps)) > 1e-9 or round(steps) < 1:
                    raise ValueError(
                        f"eval time {self.eval_time} is not a positive multiple of tau = {FINAL_TIME}/{n}"
                    )
        if has_exact_solution(self.example):
            if self.n_ref is not None:
                raise ValueError(f"{self.example} has an exact solution; n_ref does not apply")
        else:
            n_ref = DEFAULT_N_REF if self.n_ref is None else self.n_ref
            if not _is_power_of_two(n_ref):
                raise ValueError(f"n_ref must be a power of two, got {n_ref}")
            if n_ref < 4 * max(self.n_steps):
                raise ValueError(
                    f"n_ref = {n_ref} too coarse; need at least 4x the largest step count "
                    f"({4 * max(self.n_steps)})"
                )
            object.__setattr__(self, "n_ref", n_ref)
        if self.history not in ("naive", "fft"):
            raise ValueError(f"history must be 'naive' or 'fft', got {self.history!r}")

    @property
    def taus(self) -> tuple:
        return tuple(FINAL_TIME / n for n in self.n_steps)

    def eval_label(self) -> str:
        return "max" if self.eval_mode == "max" else f"fixed:{self.eval_time:g}"


@dataclass(frozen=True)
class ReportRow:
    alpha: float
    tau: float
    error: float
    order: Optional[float]  # None on the first row of each alpha block


@dataclass(frozen=True)
class ConvergenceReport:
    rows: tuple
    metadata: dict


def theoretical_order(example: str, scheme_family: str, eval_mode: str, alpha: float):
    """Expected asymptotic rate for the table combinations; None when untabulated."""
    if scheme_family == "acn":
        if example in ("table1", "ex1") and eval_mode == "fixed":
            return alpha
        if example == "ex2":
            return 2.0 if eval_mode == "fixed" else 1.0 + alpha
    if scheme_family == "macn" and example == "ex3" and eval_mode == "fixed":
        return 2.0
    return None


def _build_discretization(config: ExperimentConfig):
    if config.space == "spectral":
        return assemble_spectral()
    return assemble_fem(DEFAULT_FEM_H if config.h is None else config.h)


def _build_scheme(config: ExperimentConfig, alpha: float) -> SchemeSpec:
    return _FAMILY_FACTORIES[config.scheme_family](Generator(config.generator_kind, alpha))


def reference_solution(prob: ProblemSpec, disc, scheme: SchemeSpec, n_ref: int) -> Trajectory:
    """Fine-step run of the same scheme, used as stand-in exact solution."""
    if not _is_power_of_two(n_ref):
        raise ValueError(f"n_ref must be a power of two, got {n_ref}")
    return run(scheme, disc, prob, n_ref)


def error_against_reference(disc, traj: Trajectory, ref: Trajectory, eval_mode: str, eval_time: float = 0.5) -> float:
    """L2 error of traj with the reference trajectory subsampled at shared times."""
    if ref.n_steps % traj.n_steps != 0:
        raise ValueError(
            f"reference grid ({ref.n_steps} steps) does not nest the compared grid ({traj.n_steps})"
        )
    stride = ref.n_steps // traj.n_steps
    if eval_mode == "fixed":
        k = _fixed_step_index(eval_time, traj)
        return l2_norm(disc, traj.states[k] - ref.states[k * stride])
    shared = ref.states[stride::stride][: traj.n_steps]
    return max(
        l2_norm(disc, traj.states[k] - shared[k - 1]) for k in range(1, traj.n_steps + 1)
    )


def _fixed_step_index(eval_time: float, traj: Trajectory) -> int:
    steps = eval_time / traj.tau
    k = round(steps)
    if abs(steps - k) > 1e-9 or not 1 <= k <= traj.n_steps:
        raise ValueError(f"eval time {eval_time} does not land on the step grid (tau = {traj.tau})")
    return k


def _exact_error(disc, traj: Trajectory, prob: ProblemSpec, eval_mode: str, eval_time: float) -> float:
    if eval_mode == "fixed":
        return error_norm(disc, traj, prob, _fixed_step_index(eval_time, traj))
    return max(error_norm(disc, traj, prob, k) for k in range(1, traj.n_steps + 1))


def measure(config: ExperimentConfig) -> ConvergenceReport:
    """Run the sweep and assemble errors and observed orders."""
    disc = _build_discretization(config)
    rows = []
    flags = []
    for alpha in config.alphas:
        prob = make_problem(config.example, alpha)
        scheme = _build_scheme(config, alpha)
        ref = None
        if not has_exact_solution(config.example):
            ref = reference_solution(prob, disc, scheme, config.n_ref)
        errors = []
        for n in config.n_steps:
            traj = run(scheme, disc, prob, n, history=config.history)
            if ref is None:
                err = _exact_error(disc, traj, prob, config.eval_mode, config.eval_time)
            else:
                err = error_against_reference(disc, traj, ref, config.eval_mode, config.eval_time)
            errors.append(err)
        for i, (n, err) in enumerate(zip(config.n_steps, errors)):
            order = math.log2(errors[i - 1] / err) if i > 0 else None
            rows.append(ReportRow(alpha=alpha, tau=FINAL_TIME / n, error=err, order=order))
        if any(b >= a for a, b in zip(errors, errors[1:])):
            flags.append(f"alpha={alpha:g}: error sequence is not strictly decreasing")
    reference_note = (
        "exact solution"
        if has_exact_solution(config.example)
        else f"same-scheme reference run, {config.n_ref} steps"
    )
    metadata = {
        "example": config.example,
        "scheme": config.scheme_family,
        "generator": config.generator_kind,
        "space": config.space,
        "eval": config.eval_label(),
        "reference": reference_note,
        "flags": tuple(flags),
    }
    return ConvergenceReport(rows=tuple(rows), metadata=metadata)

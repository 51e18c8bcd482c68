"""Time stepping for the subdiffusion equation D_t^alpha u - Lap u = f.

All schemes advance the shifted unknown W^n = U^n - U^0, which starts at
zero and absorbs the initial datum into a constant data vector:

  * acn   : neighbor-averaged weights, trapezoidal treatment of the
            elliptic part and of g = f - f(0); half-weight solves;
  * macn  : acn plus corrections a1, a2 times the data vector applied at
            the first and second steps, with 1/2 + a1 - a2 = 0;
  * bdf2  : plain second-order weights on the base symbol, full-weight
            elliptic term, no averaging and no corrections.

The convolution history is accumulated either naively (vectorized dot
per step) or through a relaxed blocked FFT schedule with identical
results to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .cq_weights import Generator, WeightSequence, averaged_weights, base_weights, symbol
from .spatial import (
    Discretization,
    SpectralDiscretization,
    load_vector,
    l2_norm,
    mass_apply,
    ritz_projection,
    solve_shifted,
    stiffness_apply,
)

SCHEME_FAMILIES = ("acn", "macn", "bdf2")

_CORRECTION_CONSTRAINT_TOL = 1e-12
_FFT_BASE_BLOCK = 16


@dataclass(frozen=True)
class SchemeSpec:
    """A scheme family bound to a generating function and correction pair."""

    family: str
    generator: Generator
    a1: float = 0.0
    a2: float = 0.0

    def __post_init__(self):
        if self.family not in SCHEME_FAMILIES:
            raise ValueError(f"unknown scheme family {self.family!r}, expected one of {SCHEME_FAMILIES}")
        if self.generator.alpha >= 1.0:
            raise ValueError("time stepping needs alpha strictly inside (0, 1)")
        if self.family == "macn":
            defect = 0.5 + self.a1 - self.a2
            if abs(defect) > _CORRECTION_CONSTRAINT_TOL:
                raise ValueError(
                    f"corrections must satisfy 1/2 + a1 - a2 = 0, got defect {defect:.3e}"
                )
        elif self.a1 != 0.0 or self.a2 != 0.0:
            raise ValueError(f"corrections only apply to the macn family, not {self.family!r}")


def acn(gen: Generator) -> SchemeSpec:
    return SchemeSpec("acn", gen)


def macn(gen: Generator, a1: float = -0.25, a2: float = 0.25) -> SchemeSpec:
    return SchemeSpec("macn", gen, a1, a2)


def bdf2_plain(gen: Generator) -> SchemeSpec:
    return SchemeSpec("bdf2", gen)


@dataclass(frozen=True)
class ProblemSpec:
    """Problem data on (0, pi) with homogeneous Dirichlet conditions.

    u0 is carried three ways so every discretization can consume it:
    pointwise values, the gradient (Ritz projection), and the sin(x)
    coefficient (spectral surrogate). exact/exact_mode are optional.
    """

    label: str
    final_time: float
    u0: Callable
    u0_grad: Callable
    u0_mode: float
    source: Callable
    exact: Optional[Callable] = None
    exact_mode: Optional[Callable] = None

    def __post_init__(self):
        if not (math.isfinite(self.final_time) and self.final_time > 0.0):
            raise ValueError(f"final time must be positive, got {self.final_time}")
        for name in ("u0", "u0_grad", "source"):
            if not callable(getattr(self, name)):
                raise ValueError(f"{name} must be callable")


@dataclass(frozen=True)
class Trajectory:
    scheme: SchemeSpec
    disc: Discretization
    tau: float
    states: np.ndarray  # (n_steps + 1, disc.size), states[n] = U^n

    def __post_init__(self):
        self.states.setflags(write=False)

    @property
    def n_steps(self) -> int:
        return self.states.shape[0] - 1

    @property
    def times(self) -> np.ndarray:
        return self.tau * np.arange(self.states.shape[0])

    def state(self, n: int) -> np.ndarray:
        return self.states[n]


def initial_state(disc: Discretization, prob: ProblemSpec) -> np.ndarray:
    """Discrete initial datum: Ritz projection (FEM) or mode coefficient."""
    if isinstance(disc, SpectralDiscretization):
        return np.array([float(prob.u0_mode)])
    return ritz_projection(disc, prob.u0_grad)


def run(
    scheme: SchemeSpec,
    disc: Discretization,
    prob: ProblemSpec,
    n_steps: int,
    history: str = "naive",
) -> Trajectory:
    """March the scheme to the final time in n_steps uniform steps."""
    if not isinstance(n_steps, int) or n_steps < 1:
        raise ValueError(f"n_steps must be a positive integer, got {n_steps}")
    if history not in ("naive", "fft"):
        raise ValueError(f"history must be 'naive' or 'fft', got {history!r}")
    alpha = scheme.generator.alpha
    tau = prob.final_time / n_steps
    averaged = scheme.family in ("acn", "macn")

    base = base_weights(scheme.generator, n_steps)
    w = averaged_weights(base).values if averaged else base.values
    tau_pow = tau ** (-alpha)
    sigma = tau_pow * w[0]
    stiffness_weight = 0.5 if averaged else 1.0

    v = initial_state(disc, prob)
    Av = stiffness_apply(disc, v)
    loads = np.empty((n_steps + 1, disc.size))
    for k in range(n_steps + 1):
        loads[k] = load_vector(disc, prob.source, k * tau)
    data = loads[0] - Av

    m = disc.size
    W = np.zeros((n_steps + 1, m))
    MW = np.zeros((n_steps + 1, m))
    convolver = _BlockedHistory(w, n_steps, m) if history == "fft" else None

    for n in range(1, n_steps + 1):
        if convolver is not None:
            hist = convolver.query(n)
        elif n > 1:
            hist = w[1:n] @ MW[n - 1 : 0 : -1]
        else:
            hist = np.zeros(m)
        if averaged:
            g_mid = 0.5 * ((loads[n] - loads[0]) + (loads[n - 1] - loads[0]))
            rhs = g_mid + data - 0.5 * stiffness_apply(disc, W[n - 1]) - tau_pow * hist
            if scheme.family == "macn":
                if n == 1:
                    rhs = rhs + scheme.a1 * data
                elif n == 2:
                    rhs = rhs + scheme.a2 * data
        else:
            rhs = loads[n] - Av - tau_pow * hist
        W[n] = solve_shifted(disc, sigma, rhs, stiffness_weight=stiffness_weight)
        MW[n] = mass_apply(disc, W[n])
        if convolver is not None:
            convolver.push(MW[n])

    states = W + v
    if not np.all(np.isfinite(states)):
        raise ArithmeticError("time stepping produced non-finite values")
    return Trajectory(scheme=scheme, disc=disc, tau=tau, states=states)


class _BlockedHistory:
    """Relaxed blocked FFT accumulation of sum_{d=1}^{n} w_d Y^{n-d}.

    Distances d < base are summed directly from the most recent states;
    longer distances live on dyadic levels [L, 2L). A level-L block of L
    consecutive states is convolved with its weight segment by FFT the
    moment the block completes, which is always at or before the first
    step that needs any of its contributions.
    """

    def __init__(self, weights: np.ndarray, n_steps: int, width: int, base: int = _FFT_BASE_BLOCK):
        self.w = weights
        self.n_steps = n_steps
        self.base = base
        self.Y = np.zeros((n_steps + 1, width))
        self.acc = np.zeros((n_steps + 1, width))
        self.stored = 1  # Y^0 = 0 is implicit

    def push(self, y: np.ndarray):
        self.Y[self.stored] = y
        self.stored += 1

    def query(self, n: int) -> np.ndarray:
        if n != self.stored:
            raise ValueError(f"history for step {n} needs states 0..{n - 1}, have {self.stored}")
        L = self.base
        while L <= n:
            if n % L == 0:
                self._flush_block(n - L, L)
            L *= 2
        out = self.acc[n].copy()
        dmax = min(self.base - 1, n)
        if dmax >= 1:
            recent = self.Y[n - dmax : n][::-1]  # states k = n-1 down to n-dmax
            out += self.w[1 : dmax + 1] @ recent
        return out

    def _flush_block(self, lo: int, L: int):
        seg = self.w[L : min(2 * L, self.n_steps + 1)]
        if seg.size == 0:
            return
        block = self.Y[lo : lo + L]
        out_len = L + seg.size - 1
        nfft = 1 << (out_len - 1).bit_length()
        fb = np.fft.rfft(block, n=nfft, axis=0)
        fs = np.fft.rfft(seg, n=nfft)
        conv = np.fft.irfft(fb * fs[:, None], n=nfft, axis=0)[:out_len]
        jlo = lo + L
        jhi = min(jlo + out_len, self.n_steps + 1)
        if jhi > jlo:
            self.acc[jlo:jhi] += conv[: jhi - jlo]


def fast_history_sum(ws: WeightSequence, traj: Trajectory, n: int) -> np.ndarray:
    """FFT evaluation of the step-n history sum_{k=0}^{n-1} w_{n-k} M W^k.

    W^k = states[k] - states[0] are the trajectory's shifted unknowns.
    """
    if not 1 <= n <= traj.n_steps:
        raise ValueError(f"n must lie in [1, {traj.n_steps}], got {n}")
    if len(ws) < n + 1:
        raise ValueError(f"need weights up to index {n}, have {len(ws)}")
    Wstates = traj.states[:n] - traj.states[0]
    Y = np.empty_like(Wstates)
    for k in range(n):
        Y[k] = mass_apply(traj.disc, Wstates[k])
    nfft = 1 << (2 * n).bit_length()
    fy = np.fft.rfft(Y, n=nfft, axis=0)
    fw = np.fft.rfft(ws.values[: n + 1], n=nfft)
    conv = np.fft.irfft(fy * fw[:, None], n=nfft, axis=0)
    return conv[n]


def residue_term(scheme: SchemeSpec, disc: Discretization, prob: ProblemSpec, tau: float, n: int) -> np.ndarray:
    """Leading slow term (-1)^n (tau^-alpha w(-1) M + A)^-1 (F^0 - A v).

    Defined for the uncorrected averaged scheme, whose symbol vanishes at
    -1; subtracting this alternating sequence from the error restores the
    second-order rate. Vanishes identically in a steady state.
    """
    if scheme.family != "acn":
        raise ValueError(f"the residue term characterizes the acn family, got {scheme.family!r}")
    if tau <= 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    if n < 0:
        raise ValueError(f"step index must be nonnegative, got {n}")
    alpha = scheme.generator.alpha
    v = initial_state(disc, prob)
    data = load_vector(disc, prob.source, 0.0) - stiffness_apply(disc, v)
    shift = tau ** (-alpha) * symbol(scheme.generator, -1.0).real
    r = solve_shifted(disc, shift, data, stiffness_weight=1.0)
    return r if n % 2 == 0 else -r


def error_norm(disc: Discretization, traj: Trajectory, prob: ProblemSpec, n: int) -> float:
    """L2 distance between state n and the exact solution at t_n."""
    t = n * traj.tau
    if isinstance(disc, SpectralDiscretization):
        if prob.exact_mode is None:
            raise ValueError(f"problem {prob.label!r} has no mode-coefficient exact solution")
        return l2_norm(disc, traj.states[n] - np.array([prob.exact_mode(t)]))
    if prob.exact is None:
        raise ValueError(f"problem {prob.label!r} has no exact solution")
    return l2_norm(disc, traj.states[n] - np.asarray(prob.exact(disc.nodes, t), dtype=float))

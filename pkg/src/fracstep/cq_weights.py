"""Convolution quadrature weights for fractional time derivatives.

Two second-order generating functions are supported:

  fbdf2   (3/2 - 2*z + z^2/2)^alpha
  gng2    (1 - z)^alpha * (1 + (alpha/2) * (1 - z))

Base weights are their Taylor coefficients; averaged weights blend each
pair of neighbors, which multiplies the symbol by (1 + z)/2 and is what a
Crank-Nicolson-style half-step scheme consumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GENERATOR_KINDS = ("fbdf2", "gng2")

# FBDF2 factors through (1 - z)^alpha * (1 - z/3)^alpha; the second factor's
# coefficients fall below this magnitude by index ~39 and are dropped there
_FACTOR_TRUNC = 1e-18


@dataclass(frozen=True)
class Generator:
    """A generating function choice together with the fractional order."""

    kind: str
    alpha: float

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}, expected one of {GENERATOR_KINDS}")
        a = float(self.alpha)
        if not 0.0 < a <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        object.__setattr__(self, "alpha", a)


@dataclass(frozen=True)
class WeightSequence:
    """Immutable run of quadrature weights w_0 .. w_n."""

    values: np.ndarray
    kind: str  # "base" or "averaged"
    generator: Generator

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.kind not in ("base", "averaged"):
            raise ValueError(f"weight kind must be 'base' or 'averaged', got {self.kind!r}")

    def __len__(self) -> int:
        return self.values.size


def _binomial_series(alpha: float, n: int) -> np.ndarray:
    """Coefficients of (1 - x)^alpha up to degree n, by the stable ratio recurrence."""
    b = np.empty(n + 1)
    b[0] = 1.0
    if n:
        k = np.arange(1, n + 1, dtype=float)
        b[1:] = np.cumprod((k - 1.0 - alpha) / k)
    return b


def base_weights(gen: Generator, n_terms: int) -> WeightSequence:
    """Taylor coefficients w_0 .. w_{n_terms} of the generating function."""
    if n_terms < 0:
        raise ValueError(f"n_terms must be nonnegative, got {n_terms}")
    a = gen.alpha
    b = _binomial_series(a, n_terms)
    if gen.kind == "gng2":
        w = (1.0 + 0.5 * a) * b
        w[1:] -= (0.5 * a) * b[:-1]
    else:
        # second factor (1 - z/3)^alpha, truncated once negligible
        kc = min(n_terms, 44)
        c = np.empty(kc + 1)
        c[0] = 1.0
        if kc:
            k = np.arange(1, kc + 1, dtype=float)
            c[1:] = np.cumprod((k - 1.0 - a) / (3.0 * k))
        below = np.nonzero(np.abs(c) < _FACTOR_TRUNC)[0]
        if below.size:
            c = c[: below[0]]
        scale = 1.5 ** a
        bl = b.tolist()
        cl = c.tolist()
        w = np.empty(n_terms + 1)
        for m in range(n_terms + 1):
            jhi = min(m, len(cl) - 1)
            # fsum keeps the short convolutions exactly rounded
            w[m] = scale * math.fsum([bl[m - j] * cl[j] for j in range(jhi + 1)])
    return WeightSequence(w, "base", gen)


def averaged_weights(ws: WeightSequence) -> WeightSequence:
    """Neighbor averages (w_k + w_{k-1}) / 2 with w_{-1} = 0."""
    if ws.kind != "base":
        raise ValueError("averaged_weights expects base weights")
    w = ws.values
    out = np.empty_like(w)
    out[0] = w[0] / 2.0
    out[1:] = (w[1:] + w[:-1]) / 2.0
    return WeightSequence(out, "averaged", ws.generator)


def symbol(gen: Generator, zeta: complex) -> complex:
    """Generating function evaluated at a point of the closed unit disk."""
    z = complex(zeta)
    if abs(z) > 1.0 + 1e-12:
        raise ValueError(f"symbol is defined on the closed unit disk, got |zeta| = {abs(z)}")
    a = gen.alpha
    one_minus = 1.0 - z
    if gen.kind == "fbdf2":
        return (one_minus * (3.0 - z) / 2.0) ** a
    return one_minus ** a * (1.0 + 0.5 * a * one_minus)


def consistency_residual(gen: Generator, tau: float) -> float:
    """|tau^-alpha * symbol(e^-tau) - 1|, the second-order consistency defect.

    Evaluated through expm1 so the 1 - e^-tau difference keeps full
    relative accuracy down to very small steps.
    """
    if not 0.0 < tau <= 0.5:
        raise ValueError(f"tau must lie in (0, 0.5], got {tau}")
    a = gen.alpha
    one_minus = -math.expm1(-tau)  # 1 - e^-tau without cancellation
    if gen.kind == "fbdf2":
        val = (one_minus * (2.0 + one_minus) / 2.0) ** a
    else:
        val = one_minus ** a * (1.0 + 0.5 * a * one_minus)
    return abs(val * tau ** (-a) - 1.0)


def apply_discrete_derivative(ws: WeightSequence, tau: float, samples) -> np.ndarray:
    """Discrete fractional derivative tau^-alpha * sum_k w_{n-k} s_k for each n."""
    if tau <= 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    s = np.asarray(samples, dtype=float)
    if s.ndim != 1 or s.size == 0:
        raise ValueError("samples must be a nonempty one-dimensional array")
    if s.size > len(ws):
        raise ValueError(f"{s.size} samples need at least that many weights, have {len(ws)}")
    conv = np.convolve(s, ws.values)[: s.size]
    return tau ** (-ws.generator.alpha) * conv

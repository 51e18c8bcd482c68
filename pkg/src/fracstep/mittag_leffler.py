"""One-parameter Mittag-Leffler function E_alpha(z) on the real line.

Plain double-precision power series with exact (compensated) summation.
Every returned value is accurate to ABS_TOL; arguments whose series would
lose more than that to roundoff are refused rather than silently degraded.
"""

from __future__ import annotations

import math

Z_MAX_DEFAULT = 10.0

ABS_TOL = 1e-13

# series controls
_TERM_CUTOFF = 1e-16  # |term| below this fraction of the partial sum counts as negligible
_CUTOFF_RUN = 3       # consecutive negligible terms required before stopping
_MAX_TERMS = 2000
_EPS = math.ulp(1.0)  # 2^-52
# direct Gamma(x) stays in range below this; larger arguments go through lgamma
_GAMMA_DIRECT_MAX = 170.0


def mittag_leffler(alpha: float, z: float, z_max: float = Z_MAX_DEFAULT) -> float:
    """Evaluate E_alpha(z) = sum_j z^j / Gamma(alpha*j + 1).

    alpha must lie in (0, 1] and |z| must not exceed z_max. Raises
    ValueError outside that range, and also when the alternating series
    cancels so heavily that the result could not honor ABS_TOL; callers
    never receive a value worse than ABS_TOL in absolute terms.
    """
    alpha = float(alpha)
    z = float(z)
    z_max = float(z_max)
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if not math.isfinite(z):
        raise ValueError(f"z must be finite, got {z}")
    if not (math.isfinite(z_max) and z_max > 0.0):
        raise ValueError(f"z_max must be a positive finite number, got {z_max}")
    if abs(z) > z_max:
        raise ValueError(
            f"z={z} outside validated range |z| <= {z_max}; "
            "raise z_max explicitly if the wider domain is acceptable"
        )

    # running Kahan sum drives the termination test; the returned value is the
    # exactly rounded sum of the computed terms (fsum), so summation adds no error
    terms = [1.0]
    s, comp = 1.0, 0.0
    abs_sum = 1.0
    term = 1.0
    negligible_run = 0
    for j in range(_MAX_TERMS):
        term *= z * _gamma_ratio(alpha, j)
        terms.append(term)
        mag = abs(term)
        abs_sum += mag

        # a posteriori roundoff bound: the computed terms carry O(eps) relative
        # error each, so the best achievable absolute accuracy is ~eps * sum|term|
        if 2.0 * _EPS * abs_sum > ABS_TOL:
            raise ValueError(
                f"E_{alpha}({z}) cancels beyond the advertised {ABS_TOL} accuracy "
                "in double precision; argument refused"
            )

        # kahan update
        y = term - comp
        t = s + y
        comp = (t - s) - y
        s = t

        if mag < _TERM_CUTOFF * abs(s):
            negligible_run += 1
            if negligible_run >= _CUTOFF_RUN:
                return math.fsum(terms)
        else:
            negligible_run = 0

    raise ValueError(
        f"E_{alpha}({z}) series did not settle within {_MAX_TERMS} terms; argument refused"
    )


def _gamma_ratio(alpha: float, j: int) -> float:
    """Gamma(alpha*j + 1) / Gamma(alpha*(j+1) + 1), overflow-safe."""
    a = alpha * j + 1.0
    b = a + alpha
    if b < _GAMMA_DIRECT_MAX:
        return math.gamma(a) / math.gamma(b)
    # log-space ratio: only reachable while scanning arguments that the
    # cancellation guard is about to refuse, so reduced accuracy is harmless
    return math.exp(math.lgamma(a) - math.lgamma(b))

"""
Single-Ratio Minimization
=========================
Two ways to minimize N(x)/D(x) over an interval:

    Dinkelbach      mu <- N(x)/D(x),  x <- argmin N - mu D,  until |F(mu)| <= tol
    Fraction form   x <- argmin t N^2 + 1/(4 t D^2),  t <- 1/(2 N D)

Both start from the best point of a uniform scan of the interval. The
fraction form converges linearly, so by default every two plain t-updates
are followed by an Aitken extrapolation of log t, kept only if it lowers the
ratio.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from sieeopt.errors import InvalidParameterError
from sieeopt.controller.transform import fraction_surrogate, update_t

logger = logging.getLogger(__name__)

ScalarFn = Callable[[float], float]

N_SCAN = 65
XATOL = 1e-10
# Largest accepted Aitken jump, in multiples of the last plain log-t step.
MAX_EXTRAPOLATION = 10.0


@dataclass
class ScalarTrace:
    method: str
    xs: list[float] = field(default_factory=list)
    ratios: list[float] = field(default_factory=list)

    def append(self, x: float, ratio: float) -> None:
        self.xs.append(x)
        self.ratios.append(ratio)

    def rows(self) -> list[dict[str, float | int | str]]:
        return [
            {"iter": k, "method": self.method, "x": x, "ratio": r}
            for k, (x, r) in enumerate(zip(self.xs, self.ratios))
        ]


@dataclass
class ScalarResult:
    x: float
    value: float
    iterations: int
    converged: bool
    trace: ScalarTrace


def _check_domain(domain: tuple[float, float]) -> tuple[float, float]:
    lo, hi = float(domain[0]), float(domain[1])
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise InvalidParameterError(f"Domain must be a finite interval with lo < hi, got {domain}")
    return lo, hi


def _denominator(denominator: ScalarFn, x: float) -> float:
    d = float(denominator(x))
    if not d > 0.0:
        raise InvalidParameterError(f"Denominator is not positive at x={x}: {d}")
    return d


def _scan_start(numerator: ScalarFn, denominator: ScalarFn, lo: float, hi: float) -> float:
    xs = np.linspace(lo, hi, N_SCAN)
    ratios = [float(numerator(x)) / _denominator(denominator, x) for x in xs]
    return float(xs[int(np.argmin(ratios))])


def _argmin(fn: ScalarFn, lo: float, hi: float) -> float:
    res = minimize_scalar(fn, bounds=(lo, hi), method="bounded", options={"xatol": XATOL})
    return float(res.x)


def dinkelbach_min_scalar(
    numerator: ScalarFn,
    denominator: ScalarFn,
    domain: tuple[float, float],
    tol: float = 1e-9,
    max_iter: int = 50,
) -> ScalarResult:
    """
    Dinkelbach's parametric method.

    Args:
        numerator: N(x).
        denominator: D(x), positive on the domain.
        domain: (lo, hi).
        tol: Stop when |min_x N - mu D| <= tol.
        max_iter: Cap on parametric subproblems.

    Raises:
        InvalidParameterError: Bad domain or a nonpositive denominator.
    """
    lo, hi = _check_domain(domain)
    x = _scan_start(numerator, denominator, lo, hi)
    mu = float(numerator(x)) / _denominator(denominator, x)
    trace = ScalarTrace("dinkelbach")
    trace.append(x, mu)

    for k in range(1, max_iter + 1):
        level = mu
        x = _argmin(lambda z: float(numerator(z)) - level * float(denominator(z)), lo, hi)
        d = _denominator(denominator, x)
        n = float(numerator(x))
        gap = n - level * d
        mu = n / d
        trace.append(x, mu)
        if abs(gap) <= tol:
            return ScalarResult(x=x, value=mu, iterations=k, converged=True, trace=trace)

    logger.warning(f"Dinkelbach stopped at max_iter={max_iter}")
    return ScalarResult(x=x, value=mu, iterations=max_iter, converged=False, trace=trace)


def transform_min_scalar(
    numerator: ScalarFn,
    denominator: ScalarFn,
    domain: tuple[float, float],
    tol: float = 1e-9,
    max_iter: int = 100,
    accelerate: bool = True,
) -> ScalarResult:
    """
    Fraction-transform alternation for one ratio.

    Iterations count x-solves, including extrapolated ones that were rejected.
    The recorded ratios are non-increasing.
    With ``accelerate=False`` the trace is labelled "transform-plain".

    Raises:
        InvalidParameterError: Bad domain, or a nonpositive numerator or
            denominator at an iterate.
        InvalidTransformOperandError: Nonpositive numerator or denominator
            met inside the x-solve.
    """
    lo, hi = _check_domain(domain)

    def ratio_at(z: float) -> tuple[float, float, float]:
        d = _denominator(denominator, z)
        n = float(numerator(z))
        if not n > 0.0:
            raise InvalidParameterError(f"Numerator is not positive at x={z}: {n}")
        return n, d, n / d

    x = _scan_start(numerator, denominator, lo, hi)
    n, d, ratio = ratio_at(x)
    trace = ScalarTrace("transform" if accelerate else "transform-plain")
    trace.append(x, ratio)

    log_t = math.log(float(update_t(d, n)[0]))
    plain_history = [log_t]
    extrapolated = False
    fallback_log_t = log_t

    for k in range(1, max_iter + 1):
        t = math.exp(log_t)
        x_new = _argmin(lambda z: float(fraction_surrogate(denominator(z), numerator(z), t)[0]), lo, hi)
        n, d, ratio_new = ratio_at(x_new)

        if extrapolated and ratio_new > ratio:
            logger.debug(f"Extrapolated t rejected at iteration {k}")
            extrapolated = False
            log_t = fallback_log_t
            plain_history = [log_t]
            continue

        change = abs(ratio - ratio_new)
        x, ratio = x_new, ratio_new
        trace.append(x, ratio)
        if change < tol:
            return ScalarResult(x=x, value=ratio, iterations=k, converged=True, trace=trace)

        log_t = math.log(float(update_t(d, n)[0]))
        extrapolated = False
        plain_history.append(log_t)
        if accelerate and len(plain_history) >= 3:
            s0, s1, s2 = plain_history[-3:]
            step = s2 - s1
            curvature = s2 - 2.0 * s1 + s0
            if curvature != 0.0 and math.isfinite(curvature):
                jump = -step**2 / curvature
                if math.isfinite(jump) and abs(jump) <= MAX_EXTRAPOLATION * abs(step) and abs(jump) > 0.0:
                    fallback_log_t = s2
                    log_t = s2 + jump
                    extrapolated = True
            plain_history = [log_t]

    logger.warning(f"Fraction-transform method stopped at max_iter={max_iter}")
    return ScalarResult(x=x, value=ratio, iterations=max_iter, converged=False, trace=trace)

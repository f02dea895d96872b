"""
Rate Functions

Time-dependent decay rates gamma(t) together with their integrals
Gamma(t) = int_0^t gamma(u) du. Eigenvalue paths are exponentials of these
integrals, so exact antiderivatives are used whenever one is known and
adaptive quadrature otherwise.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np
from scipy.integrate import quad

from src.exceptions import RateDomainError

logger = logging.getLogger(__name__)

QUAD_TOL = 1e-10

ArrayLike = Union[float, np.ndarray]


def _log_cosh(x: np.ndarray) -> np.ndarray:
    """ln cosh x without overflow"""
    return np.logaddexp(x, -x) - np.log(2.0)


def _closed_forms(amplitude: float, frequency: float, offset: float):
    """(value, antiderivative) pairs for the supported tags"""
    a, w, c = amplitude, frequency, offset

    if w == 0.0:
        return {
            "sin": (lambda t: c + 0.0 * t, lambda t: c * t),
            "cos": (lambda t: a + c + 0.0 * t, lambda t: (a + c) * t),
            "tanh": (lambda t: c + 0.0 * t, lambda t: c * t),
            "exp": (lambda t: a + c + 0.0 * t, lambda t: (a + c) * t),
        }

    return {
        "sin": (
            lambda t: a * np.sin(w * t) + c,
            lambda t: a * (1.0 - np.cos(w * t)) / w + c * t,
        ),
        "cos": (
            lambda t: a * np.cos(w * t) + c,
            lambda t: a * np.sin(w * t) / w + c * t,
        ),
        "tanh": (
            lambda t: a * np.tanh(w * t) + c,
            lambda t: a * _log_cosh(w * t) / w + c * t,
        ),
        "exp": (
            lambda t: a * np.exp(-w * t) + c,
            lambda t: a * (1.0 - np.exp(-w * t)) / w + c * t,
        ),
    }


CLOSED_FORM_TAGS = ("sin", "cos", "tanh", "exp")


@dataclass(frozen=True)
class RateFunction:
    """
    A rate gamma(t) on [0, t_max] (t_max = None means unbounded).

    Attributes:
        kind: 'constant', 'closed_form', 'tabulated' or 'callable'
        label: Human-readable description used in reports
    """
    kind: str
    label: str
    fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    antiderivative: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)
    t_max: Optional[float] = None

    def _check_domain(self, t: np.ndarray) -> None:
        if np.any(t < 0.0) or (self.t_max is not None and np.any(t > self.t_max * (1 + 1e-12))):
            bad = t[(t < 0.0) | ((t > self.t_max) if self.t_max is not None else False)]
            raise RateDomainError(
                f"rate '{self.label}' evaluated at t = {float(np.ravel(bad)[0]):.6g}, "
                f"outside its domain [0, {self.t_max}]"
            )

    def __call__(self, t: ArrayLike) -> ArrayLike:
        arr = np.asarray(t, dtype=float)
        self._check_domain(arr)
        value = self.fn(arr)
        return float(value) if np.ndim(value) == 0 else np.asarray(value)

    def integral(self, t: ArrayLike) -> ArrayLike:
        """Gamma(t) = int_0^t gamma(u) du"""
        arr = np.asarray(t, dtype=float)
        self._check_domain(arr)
        if self.antiderivative is not None:
            value = self.antiderivative(arr)
            return float(value) if np.ndim(value) == 0 else np.asarray(value)

        def single(upper: float) -> float:
            if upper == 0.0:
                return 0.0
            result, error = quad(
                lambda u: float(self.fn(np.asarray(u))),
                0.0, upper, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200,
            )
            if error > 1e3 * QUAD_TOL * max(1.0, abs(result)):
                logger.warning("Quadrature of rate '%s' up to t=%.4g has error estimate %.2e",
                               self.label, upper, error)
            return result

        if arr.ndim == 0:
            return single(float(arr))
        return np.array([single(float(u)) for u in arr.ravel()]).reshape(arr.shape)

    def scaled(self, factor: float) -> "RateFunction":
        """factor * gamma(t), keeping the exact antiderivative"""
        anti = None
        if self.antiderivative is not None:
            base = self.antiderivative
            anti = lambda t: factor * base(t)
        base_fn = self.fn
        return RateFunction(
            kind=self.kind,
            label=f"{factor:g}*({self.label})",
            fn=lambda t: factor * base_fn(t),
            antiderivative=anti,
            t_max=self.t_max,
        )


def constant(value: float) -> RateFunction:
    value = float(value)
    return RateFunction(
        kind="constant",
        label=f"{value:g}",
        fn=lambda t: value + 0.0 * t,
        antiderivative=lambda t: value * t,
    )


def closed_form(tag: str, amplitude: float, frequency: float, offset: float = 0.0) -> RateFunction:
    """
    Closed-form rate with exact antiderivative.

    Args:
        tag: One of 'sin', 'cos', 'tanh' (a*f(w t) + c) or 'exp' (a*exp(-w t) + c)
        amplitude: a
        frequency: w
        offset: c
    """
    if tag not in CLOSED_FORM_TAGS:
        raise ValueError(f"unknown closed-form tag '{tag}', expected one of {CLOSED_FORM_TAGS}")
    fn, anti = _closed_forms(float(amplitude), float(frequency), float(offset))[tag]
    return RateFunction(
        kind="closed_form",
        label=f"{amplitude:g}*{tag}({frequency:g}t)+{offset:g}",
        fn=fn,
        antiderivative=anti,
    )


def tabulated(times: np.ndarray, values: np.ndarray, label: str = "tabulated") -> RateFunction:
    """
    Piecewise-linear rate through (times, values); the integral is the exact
    trapezoid area of the interpolant.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.ndim != 1 or times.shape != values.shape or times.size < 2:
        raise RateDomainError("tabulated rate needs two equally long columns with at least 2 rows")
    if np.any(np.diff(times) <= 0.0):
        raise RateDomainError("tabulated rate times must be strictly increasing")
    if times[0] != 0.0:
        raise RateDomainError(f"tabulated rate must start at t = 0, got {times[0]:.6g}")

    cumulative = np.concatenate([[0.0], np.cumsum(np.diff(times) * 0.5 * (values[1:] + values[:-1]))])

    def fn(t):
        return np.interp(t, times, values)

    def anti(t):
        idx = np.clip(np.searchsorted(times, t, side="right") - 1, 0, times.size - 2)
        return cumulative[idx] + 0.5 * (t - times[idx]) * (values[idx] + fn(t))

    return RateFunction(kind="tabulated", label=label, fn=fn, antiderivative=anti, t_max=float(times[-1]))


def from_csv(path: Union[str, Path]) -> RateFunction:
    """Load a two-column (t, gamma) CSV; a single header line is allowed"""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            first = f.readline()
        skip = 0 if _is_numeric_row(first) else 1
        data = np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2)
    except (OSError, ValueError) as e:
        raise RateDomainError(f"cannot read rate table '{path}': {e}") from e
    if data.shape[1] != 2:
        raise RateDomainError(f"rate table '{path}' must have exactly two columns, got {data.shape[1]}")
    return tabulated(data[:, 0], data[:, 1], label=path.name)


def _is_numeric_row(line: str) -> bool:
    try:
        [float(x) for x in line.strip().split(",")]
        return True
    except ValueError:
        return False


def from_callable(
    fn: Callable[[float], float],
    label: str,
    antiderivative: Optional[Callable[[float], float]] = None,
    t_max: Optional[float] = None,
) -> RateFunction:
    """Wrap a scalar callable; evaluation is vectorized elementwise"""
    vec_fn = np.vectorize(lambda u: float(fn(float(u))), otypes=[float])
    vec_anti = None
    if antiderivative is not None:
        vec_anti = np.vectorize(lambda u: float(antiderivative(float(u))), otypes=[float])
    return RateFunction(kind="callable", label=label, fn=vec_fn, antiderivative=vec_anti, t_max=t_max)


def as_rate(value: Union[float, RateFunction]) -> RateFunction:
    """Promote plain numbers to constant rates"""
    if isinstance(value, RateFunction):
        return value
    return constant(float(value))

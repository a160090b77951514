"""Parametric lifetime distributions with closed-form reliability functions.

Every family exposes the six functions used throughout the package: survival
``sf``, distribution ``cdf``, density ``pdf``, hazard rate ``hazard``,
reversed hazard rate ``rev_hazard``, and the cumulative (reversed) hazards
``cum_hazard`` / ``cum_rev_hazard``.  All are exact closed forms; there is no
generic numeric inversion anywhere.  Where a log argument underflows to zero
the affected function returns ``inf`` instead of raising, so grid sweeps can
skip and count flagged points.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from ._num import as_float_array, match_input

__all__ = [
    "LifetimeDistribution",
    "Exponential",
    "LinearFailureRate",
    "Weibull",
    "distribution_from_dict",
]


def _check_nonneg(x) -> np.ndarray:
    xa = as_float_array(x)
    if np.any(xa < 0.0):
        raise ValueError("lifetime argument must be nonnegative")
    return xa


def _positive(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be a positive finite real, got {value!r}")
    return value


class LifetimeDistribution(ABC):
    """Nonnegative lifetime law; values are immutable and all methods pure."""

    @abstractmethod
    def cum_hazard(self, x):
        """Cumulative hazard -ln sf(x), exact closed form."""

    @abstractmethod
    def hazard(self, x):
        """Hazard rate pdf/sf."""

    @abstractmethod
    def isf(self, v):
        """Inverse survival function: x such that sf(x) = v."""

    @abstractmethod
    def to_dict(self) -> dict:
        """JSON-ready parameter fragment."""

    def sf(self, x):
        xa = _check_nonneg(x)
        return match_input(x, np.exp(-self._chz(xa)))

    def cdf(self, x):
        xa = _check_nonneg(x)
        return match_input(x, -np.expm1(-self._chz(xa)))

    def pdf(self, x):
        xa = _check_nonneg(x)
        with np.errstate(invalid="ignore"):
            out = self._hz(xa) * np.exp(-self._chz(xa))
        return match_input(x, out)

    def rev_hazard(self, x):
        xa = _check_nonneg(x)
        delta = self._chz(xa)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self._hz(xa) * np.exp(-delta) / (-np.expm1(-delta))
        return match_input(x, out)

    def cum_rev_hazard(self, x):
        # -ln F(x); the expm1 form is exact for small cumulative hazard and
        # the log1p form for large, so branch at F = 1/2.  +inf at x = 0,
        # exact 0 deep in the right tail once exp underflows.
        xa = _check_nonneg(x)
        delta = self._chz(xa)
        with np.errstate(divide="ignore"):
            small = -np.log(-np.expm1(-delta))
            large = -np.log1p(-np.exp(-delta))
            out = np.where(delta <= math.log(2.0), small, large)
        return match_input(x, out)

    def quantile(self, u):
        ua = as_float_array(u)
        if np.any((ua < 0.0) | (ua > 1.0)):
            raise ValueError("quantile level must lie in [0, 1]")
        return match_input(u, as_float_array(self.isf(1.0 - ua)))

    # array-in/array-out cores used internally to avoid double validation
    def _chz(self, xa: np.ndarray) -> np.ndarray:
        return as_float_array(self.cum_hazard(xa))

    def _hz(self, xa: np.ndarray) -> np.ndarray:
        return as_float_array(self.hazard(xa))


@dataclass(frozen=True)
class Exponential(LifetimeDistribution):
    """Constant-hazard lifetime, sf(x) = exp(-rate*x)."""

    rate: float

    def __post_init__(self):
        _positive(self.rate, "rate")

    def cum_hazard(self, x):
        xa = _check_nonneg(x)
        return match_input(x, self.rate * xa)

    def hazard(self, x):
        xa = _check_nonneg(x)
        return match_input(x, np.full_like(xa, self.rate))

    def isf(self, v):
        va = as_float_array(v)
        with np.errstate(divide="ignore"):
            out = -np.log(va) / self.rate
        return match_input(v, out)

    def to_dict(self) -> dict:
        return {"family": "exp", "rate": self.rate}


@dataclass(frozen=True)
class LinearFailureRate(LifetimeDistribution):
    """sf(x) = exp(-alpha*(x + beta*x^2)); hazard alpha*(1 + 2*beta*x).

    beta = 0 degenerates exactly to Exponential(alpha).
    """

    alpha: float
    beta: float = 0.0

    def __post_init__(self):
        _positive(self.alpha, "alpha")
        if not math.isfinite(self.beta) or self.beta < 0.0:
            raise ValueError(f"beta must be a nonnegative finite real, got {self.beta!r}")

    def cum_hazard(self, x):
        xa = _check_nonneg(x)
        return match_input(x, self.alpha * (xa + self.beta * xa * xa))

    def hazard(self, x):
        xa = _check_nonneg(x)
        return match_input(x, self.alpha * (1.0 + 2.0 * self.beta * xa))

    def isf(self, v):
        # positive root of beta*x^2 + x - t/alpha = 0, written so the
        # beta -> 0 limit needs no branch and small t loses no precision
        va = as_float_array(v)
        with np.errstate(divide="ignore"):
            t = -np.log(va)
        out = 2.0 * t / (self.alpha * (1.0 + np.sqrt(1.0 + 4.0 * self.beta * t / self.alpha)))
        return match_input(v, out)

    def to_dict(self) -> dict:
        return {"family": "lfr", "alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class Weibull(LifetimeDistribution):
    """sf(x) = exp(-(x/scale)^shape)."""

    shape: float
    scale: float = 1.0

    def __post_init__(self):
        _positive(self.shape, "shape")
        _positive(self.scale, "scale")

    def cum_hazard(self, x):
        xa = _check_nonneg(x)
        return match_input(x, (xa / self.scale) ** self.shape)

    def hazard(self, x):
        xa = _check_nonneg(x)
        with np.errstate(divide="ignore"):
            out = (self.shape / self.scale) * (xa / self.scale) ** (self.shape - 1.0)
        return match_input(x, out)

    def isf(self, v):
        va = as_float_array(v)
        with np.errstate(divide="ignore"):
            t = -np.log(va)
        return match_input(v, self.scale * t ** (1.0 / self.shape))

    def to_dict(self) -> dict:
        return {"family": "weibull", "shape": self.shape, "scale": self.scale}


_FAMILY_KEYS = {
    "exp": {"rate"},
    "lfr": {"alpha", "beta"},
    "weibull": {"shape", "scale"},
}


def distribution_from_dict(fragment: dict) -> LifetimeDistribution:
    """Build a distribution from a JSON fragment, rejecting unknown fields."""
    if not isinstance(fragment, dict) or "family" not in fragment:
        raise ValueError("distribution fragment must be an object with a 'family' field")
    family = fragment["family"]
    if family not in _FAMILY_KEYS:
        raise ValueError(f"unknown distribution family {family!r}")
    params = {k: v for k, v in fragment.items() if k != "family"}
    unknown = set(params) - _FAMILY_KEYS[family]
    if unknown:
        raise ValueError(f"unknown fields for family {family!r}: {sorted(unknown)}")
    if family == "exp":
        return Exponential(rate=float(params["rate"]))
    if family == "lfr":
        return LinearFailureRate(alpha=float(params["alpha"]), beta=float(params.get("beta", 0.0)))
    return Weibull(shape=float(params["shape"]), scale=float(params.get("scale", 1.0)))

"""Exchangeable survival copulas coupling component lifetimes.

Four families: Independence, the trivariate Farlie-Gumbel-Morgenstern (FGM)
perturbation of independence, Gumbel-Hougaard, and Clayton-Oakes.  All are
exchangeable, so evaluating at a point with ``j`` coordinates equal to ``p``
and the rest equal to 1 depends only on ``(p, j)``; that reduction
(``exch``) is what the distortion engine consumes.  Evaluations switch to
log-space wherever the direct form would overflow or underflow.

Clayton-Oakes uses the standard exchangeable Archimedean form
``(sum p_i^-theta - (n-1))^(-1/theta)``; it is an extension family here, kept
alongside the three others for breadth of the simulation oracle.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from ._num import as_float_array, match_input

__all__ = [
    "Copula",
    "Independence",
    "FGM",
    "GumbelHougaard",
    "ClaytonOakes",
    "copula_from_dict",
]

# above this value of -theta*ln(p), p^-theta has overflowed and the Clayton
# forms are replaced by their exact limits
_CLAYTON_LOG_CUTOFF = 500.0


class Copula(ABC):
    """Exchangeable survival copula of fixed dimension."""

    dim: int

    @abstractmethod
    def eval(self, p):
        """K(p_1, ..., p_n) for a length-n vector (or batch of vectors)."""

    @abstractmethod
    def exch(self, p, j: int):
        """K with j coordinates at p and n-j at 1; j = 0 gives 1."""

    @abstractmethod
    def exch_deriv(self, p, j: int):
        """d/dp of ``exch(p, j)`` in closed form."""

    @abstractmethod
    def exch_compl(self, p, j: int):
        """1 - exch(p, j), computed without cancellation near p = 1."""

    @abstractmethod
    def to_dict(self) -> dict:
        ...

    def _check_point(self, p) -> np.ndarray:
        pa = as_float_array(p)
        if pa.shape[-1:] != (self.dim,):
            raise ValueError(f"expected point(s) of dimension {self.dim}, got shape {pa.shape}")
        if np.any((pa < 0.0) | (pa > 1.0)):
            raise ValueError("copula arguments must lie in [0, 1]")
        return pa

    def _check_exch(self, p, j: int) -> np.ndarray:
        if not isinstance(j, (int, np.integer)) or j < 0 or j > self.dim:
            raise ValueError(f"j must be an integer in [0, {self.dim}], got {j!r}")
        pa = as_float_array(p)
        if np.any((pa < 0.0) | (pa > 1.0)):
            raise ValueError("copula arguments must lie in [0, 1]")
        return pa


@dataclass(frozen=True)
class Independence(Copula):
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be at least 1")

    def eval(self, p):
        pa = self._check_point(p)
        return match_input(pa[..., 0] if pa.ndim > 1 else pa[0], np.prod(pa, axis=-1))

    def exch(self, p, j):
        pa = self._check_exch(p, j)
        if j == 0:
            return match_input(p, np.ones_like(pa))
        return match_input(p, pa**j)

    def exch_deriv(self, p, j):
        pa = self._check_exch(p, j)
        if j == 0:
            return match_input(p, np.zeros_like(pa))
        return match_input(p, j * pa ** (j - 1))

    def exch_compl(self, p, j):
        pa = self._check_exch(p, j)
        if j == 0:
            return match_input(p, np.zeros_like(pa))
        with np.errstate(divide="ignore"):
            out = np.where(pa > 0.0, -np.expm1(j * np.log(np.maximum(pa, 1e-300))), 1.0)
        return match_input(p, out)

    def to_dict(self):
        return {"copula": "independence"}


@dataclass(frozen=True)
class FGM(Copula):
    """Trivariate FGM: K(p1,p2,p3) = p1 p2 p3 (1 + theta (1-p1)(1-p2)(1-p3)).

    Only the three-dimensional member is defined; higher-order FGM variants
    take many inequivalent forms and are out of scope.
    """

    theta: float
    dim: int = 3

    def __post_init__(self):
        if not math.isfinite(self.theta) or abs(self.theta) > 1.0:
            raise ValueError(f"FGM theta must lie in [-1, 1], got {self.theta!r}")
        if self.dim != 3:
            raise ValueError("FGM copula is defined for dimension 3 only")

    def eval(self, p):
        pa = self._check_point(p)
        prod = np.prod(pa, axis=-1)
        pert = np.prod(1.0 - pa, axis=-1)
        out = prod * (1.0 + self.theta * pert)
        return match_input(pa[..., 0] if pa.ndim > 1 else pa[0], out)

    def exch(self, p, j):
        pa = self._check_exch(p, j)
        if j == 0:
            return match_input(p, np.ones_like(pa))
        if j < 3:
            return match_input(p, pa**j)
        return match_input(p, pa**3 * (1.0 + self.theta * (1.0 - pa) ** 3))

    def exch_deriv(self, p, j):
        pa = self._check_exch(p, j)
        if j == 0:
            return match_input(p, np.zeros_like(pa))
        if j < 3:
            return match_input(p, j * pa ** (j - 1))
        out = 3.0 * pa**2 + 3.0 * self.theta * pa**2 * (1.0 - pa) ** 2 * (1.0 - 2.0 * pa)
        return match_input(p, out)

    def exch_compl(self, p, j):
        pa = self._check_exch(p, j)
        if j == 0:
            return match_input(p, np.zeros_like(pa))
        q = 1.0 - pa
        if j == 1:
            return match_input(p, q)
        if j == 2:
            return match_input(p, q * (1.0 + pa))
        out = q * (1.0 + pa + pa**2) - self.theta * pa**3 * q**3
        return match_input(p, out)

    def to_dict(self):
        return {"copula": "fgm", "theta": self.theta}


@dataclass(frozen=True)
class GumbelHougaard(Copula):
    """Archimedean family exp{-(sum (-ln p_i)^theta)^(1/theta)}, theta >= 1."""

    theta: float
    dim: int

    def __post_init__(self):
        if not math.isfinite(self.theta) or self.theta < 1.0:
            raise ValueError(f"Gumbel-Hougaard theta must be >= 1, got {self.theta!r}")
        if self.dim < 1:
            raise ValueError("dimension must be at least 1")

    def _exponent(self, j: int) -> float:
        return j ** (1.0 / self.theta)

    def eval(self, p):
        pa = self._check_point(p)
        scalar = pa.ndim == 1
        pts = np.atleast_2d(pa)
        out = np.zeros(pts.shape[0])
        alive = np.all(pts > 0.0, axis=-1)
        if np.any(alive):
            with np.errstate(divide="ignore"):
                t = -np.log(pts[alive])
            tmax = np.max(t, axis=-1)
            # max-normalised power sum keeps t**theta from overflowing
            pos = tmax > 0.0
            s = np.zeros_like(tmax)
            if np.any(pos):
                ratio = t[pos] / tmax[pos, None]
                s[pos] = tmax[pos] * np.sum(ratio**self.theta, axis=-1) ** (1.0 / self.theta)
            out[alive] = np.exp(-s)
        return match_input(pa[..., 0] if not scalar else pa[0], out[0] if scalar else out)

    def exch(self, p, j):
        pa = self._check_exch(p, j)
        if j == 0:
            return match_input(p, np.ones_like(pa))
        return match_input(p, pa ** self._exponent(j))

    def exch_deriv(self, p, j):
        pa = self._check_exch(p, j)
        if j == 0:
            return match_input(p, np.zeros_like(pa))
        a = self._exponent(j)
        with np.errstate(divide="ignore"):
            out = a * pa ** (a - 1.0)
        return match_input(p, out)

    def exch_compl(self, p, j):
        pa = self._check_exch(p, j)
        if j == 0:
            return match_input(p, np.zeros_like(pa))
        a = self._exponent(j)
        with np.errstate(divide="ignore"):
            out = np.where(pa > 0.0, -np.expm1(a * np.log(np.maximum(pa, 1e-300))), 1.0)
        return match_input(p, out)

    def to_dict(self):
        return {"copula": "gumbel", "theta": self.theta}


@dataclass(frozen=True)
class ClaytonOakes(Copula):
    """Archimedean family (sum p_i^-theta - (n-1))^(-1/theta), theta > 0."""

    theta: float
    dim: int

    def __post_init__(self):
        if not math.isfinite(self.theta) or self.theta <= 0.0:
            raise ValueError(f"Clayton-Oakes theta must be > 0, got {self.theta!r}")
        if self.dim < 1:
            raise ValueError("dimension must be at least 1")

    def eval(self, p):
        pa = self._check_point(p)
        scalar = pa.ndim == 1
        pts = np.atleast_2d(pa)
        out = np.zeros(pts.shape[0])
        alive = np.all(pts > 0.0, axis=-1)
        if np.any(alive):
            with np.errstate(divide="ignore"):
                w = -self.theta * np.log(pts[alive])  # = ln p^-theta >= 0
            wmax = np.max(w, axis=-1)
            n = pts.shape[-1]
            # ln(sum e^w - (n-1)) computed relative to the max exponent
            inner = np.sum(np.exp(w - wmax[:, None]), axis=-1) - (n - 1) * np.exp(-wmax)
            log_s = wmax + np.log(inner)
            out[alive] = np.exp(-log_s / self.theta)
        return match_input(pa[..., 0] if not scalar else pa[0], out[0] if scalar else out)

    def exch(self, p, j):
        pa = self._check_exch(p, j)
        if j == 0:
            return match_input(p, np.ones_like(pa))
        out = np.zeros_like(pa)
        pos = pa > 0.0
        with np.errstate(divide="ignore"):
            w = np.where(pos, -self.theta * np.log(np.maximum(pa, 1e-300)), np.inf)
        direct = w < _CLAYTON_LOG_CUTOFF
        wd = np.minimum(w, _CLAYTON_LOG_CUTOFF)
        k_direct = np.exp(-np.log1p(j * np.expm1(wd)) / self.theta)
        k_limit = pa * j ** (-1.0 / self.theta)
        out[pos] = np.where(direct, k_direct, k_limit)[pos]
        return match_input(p, out)

    def exch_deriv(self, p, j):
        pa = self._check_exch(p, j)
        if j == 0:
            return match_input(p, np.zeros_like(pa))
        out = np.full_like(pa, j ** (-1.0 / self.theta))  # p -> 0 limit
        pos = pa > 0.0
        with np.errstate(divide="ignore"):
            logp = np.log(np.maximum(pa, 1e-300))
        w = -self.theta * logp
        direct = pos & (w < _CLAYTON_LOG_CUTOFF)
        wd = np.minimum(w, _CLAYTON_LOG_CUTOFF)
        log_kp = math.log(j) - (self.theta + 1.0) * logp - ((self.theta + 1.0) / self.theta) * np.log1p(
            j * np.expm1(wd)
        )
        out = np.where(direct, np.exp(log_kp), out)
        return match_input(p, out)

    def exch_compl(self, p, j):
        pa = self._check_exch(p, j)
        if j == 0:
            return match_input(p, np.zeros_like(pa))
        out = np.ones_like(pa)
        pos = pa > 0.0
        with np.errstate(divide="ignore"):
            w = np.where(pos, -self.theta * np.log(np.maximum(pa, 1e-300)), np.inf)
        direct = w < _CLAYTON_LOG_CUTOFF
        wd = np.minimum(w, _CLAYTON_LOG_CUTOFF)
        c_direct = -np.expm1(-np.log1p(j * np.expm1(wd)) / self.theta)
        c_limit = 1.0 - pa * j ** (-1.0 / self.theta)
        out[pos] = np.where(direct, c_direct, c_limit)[pos]
        return match_input(p, out)

    def to_dict(self):
        return {"copula": "clayton", "theta": self.theta}


_COPULA_KEYS = {
    "independence": set(),
    "fgm": {"theta"},
    "gumbel": {"theta"},
    "clayton": {"theta"},
}


def copula_from_dict(fragment: dict, dim: int) -> Copula:
    """Build a copula from a JSON fragment; dimension comes from the structure."""
    if not isinstance(fragment, dict) or "copula" not in fragment:
        raise ValueError("copula fragment must be an object with a 'copula' field")
    name = fragment["copula"]
    if name not in _COPULA_KEYS:
        raise ValueError(f"unknown copula family {name!r}")
    params = {k: v for k, v in fragment.items() if k != "copula"}
    unknown = set(params) - _COPULA_KEYS[name]
    if unknown:
        raise ValueError(f"unknown fields for copula {name!r}: {sorted(unknown)}")
    if name == "independence":
        return Independence(dim=dim)
    theta = float(params["theta"])
    if name == "fgm":
        if dim != 3:
            raise ValueError("FGM copula requires dimension 3")
        return FGM(theta=theta)
    if name == "gumbel":
        return GumbelHougaard(theta=theta, dim=dim)
    return ClaytonOakes(theta=theta, dim=dim)

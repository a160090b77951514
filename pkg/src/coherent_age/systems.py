"""Coherent structures and their dual distortion functions.

A coherent structure is given by its component count and minimal path sets.
Combined with an exchangeable survival copula it induces the dual distortion
h: [0,1] -> [0,1] mapping common component reliability p to system
reliability, with h(0) = 0, h(1) = 1 and h nondecreasing.  The distortion is
assembled by inclusion-exclusion over unions of path-set subfamilies, which
for an exchangeable copula reduces h to a signed combination of the
functions K_j(p) = K(p, ..., p, 1, ..., 1) with j coordinates at p.

On top of h the module provides its derivative h', the elasticity
functionals

    H(p) = p h'(p) / h(p)        R(p) = (1-p) h'(p) / (1 - h(p))

and their derivatives by second-level central differences.  k-out-of-n
distortions under independent components get a dedicated representation via
binomial tail sums: the expanded signed-coefficient polynomial cancels
catastrophically in 1-h and h' near p = 1, while the tail sums are stable
everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from ._num import as_float_array, match_input
from .copulas import Copula, Independence
from .distributions import LifetimeDistribution

__all__ = [
    "Structure",
    "Distortion",
    "CoefficientDistortion",
    "KofNDistortion",
    "build_distortion",
    "kofn_distortion",
    "k_of_n_paths",
    "SystemModel",
]

# endpoint clamp for the elasticity functionals, defined on the open interval
EPS_CLAMP = 1e-9
# central-difference steps: first level for h', second level for H'/R'
FD_STEP_H = 1e-6
FD_STEP_ELASTICITY = 1e-5
# inclusion-exclusion over path subfamilies is exact but 2^r; refuse beyond
MAX_PATH_SETS = 20


@dataclass(frozen=True)
class Structure:
    """Coherent structure: component count n and minimal path sets.

    Path sets must be mutually non-nested (minimality) and jointly cover all
    components (every component relevant).
    """

    n: int
    paths: tuple[frozenset[int], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("component count must be at least 1")
        if not self.paths:
            raise ValueError("structure needs at least one path set")
        seen = set()
        for path in self.paths:
            if not path:
                raise ValueError("path sets must be nonempty")
            if not path <= set(range(1, self.n + 1)):
                raise ValueError(f"path {sorted(path)} uses components outside 1..{self.n}")
            if path in seen:
                raise ValueError(f"duplicate path set {sorted(path)}")
            seen.add(path)
        for a in self.paths:
            for b in self.paths:
                if a != b and a <= b:
                    raise ValueError(
                        f"path {sorted(a)} is contained in {sorted(b)}; path sets must be minimal"
                    )
        covered = set().union(*self.paths)
        if covered != set(range(1, self.n + 1)):
            missing = sorted(set(range(1, self.n + 1)) - covered)
            raise ValueError(f"components {missing} appear in no path set (not coherent)")

    @classmethod
    def from_paths(cls, n: int, paths) -> "Structure":
        norm = tuple(sorted((frozenset(int(i) for i in p) for p in paths), key=lambda s: (len(s), sorted(s))))
        return cls(n=n, paths=norm)

    @classmethod
    def series(cls, n: int) -> "Structure":
        return cls.from_paths(n, [range(1, n + 1)])

    @classmethod
    def parallel(cls, n: int) -> "Structure":
        return cls.from_paths(n, [[i] for i in range(1, n + 1)])

    def to_dict(self) -> dict:
        return {"n": self.n, "paths": [sorted(p) for p in self.paths]}


def k_of_n_paths(k: int, n: int) -> Structure:
    """Structure whose minimal path sets are all k-subsets of {1..n}."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    return Structure.from_paths(n, combinations(range(1, n + 1), k))


class Distortion:
    """Dual distortion with evaluation, derivative and elasticity functionals."""

    def h(self, p):
        raise NotImplementedError

    def one_minus_h(self, p):
        raise NotImplementedError

    def h_prime(self, p, *, finite_diff: bool = False):
        """Derivative of h; closed form by default, central difference on request."""
        if not finite_diff:
            return self._h_prime_closed(p)
        pa = self._check_open(p)
        lo = np.maximum(pa - FD_STEP_H, 0.0)
        hi = np.minimum(pa + FD_STEP_H, 1.0)
        out = (as_float_array(self.h(hi)) - as_float_array(self.h(lo))) / (hi - lo)
        return match_input(p, out)

    def _h_prime_closed(self, p):
        raise NotImplementedError

    def H(self, p):
        """Hazard-transfer elasticity p h'(p)/h(p), clamped to the open interval.

        Degenerate points are flagged: inf when h underflows with a nonzero
        numerator, nan when numerator and denominator both underflow.
        """
        pa = np.clip(as_float_array(p), EPS_CLAMP, 1.0 - EPS_CLAMP)
        hv = as_float_array(self.h(pa))
        num = pa * as_float_array(self.h_prime(pa))
        return match_input(p, _flagged_ratio(num, hv))

    def R(self, p):
        """Reversed-hazard elasticity (1-p) h'(p)/(1-h(p)) with the same flag policy."""
        pa = np.clip(as_float_array(p), EPS_CLAMP, 1.0 - EPS_CLAMP)
        omh = as_float_array(self.one_minus_h(pa))
        num = (1.0 - pa) * as_float_array(self.h_prime(pa))
        return match_input(p, _flagged_ratio(num, omh))

    def H_prime(self, p, step: float = FD_STEP_ELASTICITY):
        """Central difference of H; imposes a ~1e-8 accuracy floor on
        monotonicity checks built from it."""
        return self._elasticity_prime(self.H, p, step)

    def R_prime(self, p, step: float = FD_STEP_ELASTICITY):
        return self._elasticity_prime(self.R, p, step)

    def _elasticity_prime(self, func, p, step):
        pa = self._check_open(p)
        lo = np.maximum(pa - step, EPS_CLAMP)
        hi = np.minimum(pa + step, 1.0 - EPS_CLAMP)
        out = (as_float_array(func(hi)) - as_float_array(func(lo))) / (hi - lo)
        return match_input(p, out)

    @staticmethod
    def _check_unit(p) -> np.ndarray:
        pa = as_float_array(p)
        if np.any((pa < 0.0) | (pa > 1.0)):
            raise ValueError("distortion argument must lie in [0, 1]")
        return pa

    @staticmethod
    def _check_open(p) -> np.ndarray:
        pa = as_float_array(p)
        if np.any((pa <= 0.0) | (pa >= 1.0)):
            raise ValueError("derivative argument must lie in the open interval (0, 1)")
        return pa


def _flagged_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / den
    bad = den == 0.0
    if np.any(bad):
        out = np.where(bad & (num == 0.0), np.nan, out)
        out = np.where(bad & (num != 0.0), np.inf, out)
    return out


@dataclass(frozen=True)
class CoefficientDistortion(Distortion):
    """h(p) = sum_j c_j K_j(p) with signed integer coefficients over one copula.

    The representation works uniformly for polynomial and non-polynomial
    copula families.  Coefficients must sum to 1 (h(1) = 1) and carry j >= 1
    only (h(0) = 0).
    """

    copula: Copula
    coeffs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("distortion needs at least one coefficient")
        total = 0
        for j, c in self.coeffs:
            if j < 1 or j > self.copula.dim:
                raise ValueError(f"coefficient index {j} outside 1..{self.copula.dim}")
            if c == 0:
                raise ValueError("zero coefficients must be dropped")
            total += c
        if total != 1:
            raise ValueError(f"coefficients must sum to 1, got {total}")

    def h(self, p):
        pa = self._check_unit(p)
        out = np.zeros_like(pa)
        for j, c in self.coeffs:
            out += c * as_float_array(self.copula.exch(pa, j))
        return match_input(p, out)

    def one_minus_h(self, p):
        # coefficients sum to 1, so 1-h = sum c_j (1 - K_j); each complement
        # is computed in its stable per-family form
        pa = self._check_unit(p)
        out = np.zeros_like(pa)
        for j, c in self.coeffs:
            out += c * as_float_array(self.copula.exch_compl(pa, j))
        return match_input(p, out)

    def _h_prime_closed(self, p):
        pa = self._check_open(p)
        out = np.zeros_like(pa)
        for j, c in self.coeffs:
            out += c * as_float_array(self.copula.exch_deriv(pa, j))
        return match_input(p, out)


@dataclass(frozen=True)
class KofNDistortion(Distortion):
    """k-out-of-n distortion under independence, via binomial tail sums.

    h(p) = sum_{j=k}^{n} C(n,j) p^j (1-p)^{n-j}.  Both tails are sums of
    positive terms and h'(p) = k C(n,k) p^{k-1} (1-p)^{n-k} is a single
    product, so h, 1-h and h' stay fully accurate across (0, 1).
    """

    k: int
    n: int

    def __post_init__(self):
        if not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")

    def h(self, p):
        pa = self._check_unit(p)
        q = 1.0 - pa
        out = np.zeros_like(pa)
        for j in range(self.k, self.n + 1):
            out += comb(self.n, j) * pa**j * q ** (self.n - j)
        return match_input(p, out)

    def one_minus_h(self, p):
        pa = self._check_unit(p)
        q = 1.0 - pa
        out = np.zeros_like(pa)
        for j in range(0, self.k):
            out += comb(self.n, j) * pa**j * q ** (self.n - j)
        return match_input(p, out)

    def _h_prime_closed(self, p):
        pa = self._check_open(p)
        out = self.k * comb(self.n, self.k) * pa ** (self.k - 1) * (1.0 - pa) ** (self.n - self.k)
        return match_input(p, out)


def build_distortion(structure: Structure, copula: Copula) -> CoefficientDistortion:
    """Assemble the dual distortion of a structure under a survival copula.

    Inclusion-exclusion over nonempty subfamilies of minimal path sets: a
    subfamily S contributes (-1)^(|S|+1) to the coefficient of
    j = |union of S|.  Exact for up to MAX_PATH_SETS path sets.
    """
    if copula.dim != structure.n:
        raise ValueError(
            f"copula dimension {copula.dim} does not match component count {structure.n}"
        )
    r = len(structure.paths)
    if r > MAX_PATH_SETS:
        raise ValueError(f"structure has {r} minimal path sets; refusing more than {MAX_PATH_SETS}")

    masks = []
    for path in structure.paths:
        m = 0
        for i in path:
            m |= 1 << (i - 1)
        masks.append(m)

    unions = [0] * (1 << r)
    coeffs: dict[int, int] = {}
    for s in range(1, 1 << r):
        low = (s & -s).bit_length() - 1
        unions[s] = unions[s & (s - 1)] | masks[low]
        size = unions[s].bit_count()
        sign = 1 if (s.bit_count() & 1) else -1
        coeffs[size] = coeffs.get(size, 0) + sign

    pairs = tuple(sorted((j, c) for j, c in coeffs.items() if c != 0))
    return CoefficientDistortion(copula=copula, coeffs=pairs)


def kofn_distortion(k: int, n: int) -> KofNDistortion:
    """Distortion of the k-out-of-n system with independent components."""
    return KofNDistortion(k=k, n=n)


def structure_copula_from_dict(fragment: dict) -> tuple[Structure, Copula]:
    """Parse the fused fragment {"n": ..., "paths": [...], "copula": {...}}."""
    from .copulas import copula_from_dict

    if not isinstance(fragment, dict):
        raise ValueError("system fragment must be an object")
    unknown = set(fragment) - {"n", "paths", "copula"}
    if unknown:
        raise ValueError(f"unknown fields in system fragment: {sorted(unknown)}")
    missing = {"n", "paths", "copula"} - set(fragment)
    if missing:
        raise ValueError(f"missing fields in system fragment: {sorted(missing)}")
    structure = Structure.from_paths(int(fragment["n"]), fragment["paths"])
    return structure, copula_from_dict(fragment["copula"], structure.n)


@dataclass
class SystemModel:
    """A coherent system: structure + survival copula + common component margin."""

    structure: Structure
    copula: Copula
    margin: LifetimeDistribution
    distortion: Distortion | None = None

    def __post_init__(self):
        if self.distortion is None:
            self.distortion = build_distortion(self.structure, self.copula)

    @classmethod
    def k_of_n(cls, k: int, n: int, margin: LifetimeDistribution) -> "SystemModel":
        """k-out-of-n system with independent components, using the stable
        binomial-tail distortion."""
        return cls(k_of_n_paths(k, n), Independence(n), margin, distortion=kofn_distortion(k, n))

    def survival(self, x):
        return match_input(x, as_float_array(self.distortion.h(self.margin.sf(x))))

    def cum_hazard(self, x):
        # -ln h(sf(x)): log of h directly where h is small, log1p of the
        # stable complement where h is near 1, accurate in both regimes
        p = as_float_array(self.margin.sf(x))
        hv = as_float_array(self.distortion.h(p))
        omh = as_float_array(self.distortion.one_minus_h(p))
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(hv <= 0.5, -np.log(np.maximum(hv, 0.0)), -np.log1p(-np.minimum(omh, 1.0)))
        return match_input(x, out)

    def cum_rev_hazard(self, x):
        # -ln(1 - h(sf(x))) with the mirrored branch choice
        p = as_float_array(self.margin.sf(x))
        hv = as_float_array(self.distortion.h(p))
        omh = as_float_array(self.distortion.one_minus_h(p))
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(omh <= 0.5, -np.log(np.maximum(omh, 0.0)), -np.log1p(-np.minimum(hv, 1.0)))
        return match_input(x, out)

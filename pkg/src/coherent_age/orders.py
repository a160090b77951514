"""Numerical checkers for stochastic orders and relative-ageing relations.

A verdict here is a numerical certificate on a grid at a stated tolerance,
not a symbolic proof: "yes" means no violation beyond the tolerance at any
grid point.  Ratio checks follow the convention a/0 = inf by skipping grid
points whose denominator is below 1e-12 (or not finite); the skip count is
reported and more than 5% skipped makes the verdict inconclusive.

Supported relations between margins X and Y:

    st      usual stochastic order           sf_X <= sf_Y pointwise
    hr      hazard rate order                sf_Y/sf_X increasing
    rh      reversed hazard rate order       cdf_Y/cdf_X increasing
    c       ageing faster, hazard            r_X/r_Y increasing
    b       ageing faster, reversed hazard   rr_X/rr_Y decreasing
    c_star  ageing faster, cumulative hazard          Delta_X/Delta_Y increasing
    b_star  ageing faster, cumulative reversed hazard Dtilde_X/Dtilde_Y decreasing
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from ._num import as_float_array
from .distributions import LifetimeDistribution
from .systems import SystemModel

__all__ = [
    "Grid",
    "OrderVerdict",
    "IdentityReport",
    "RELATIONS",
    "check_monotone",
    "check_sign",
    "check_order",
    "system_order_direct",
    "integral_identity_check",
    "sign_change_count",
]

RELATIONS = ("st", "hr", "rh", "c", "b", "c_star", "b_star")

RATIO_FLOOR = 1e-12
MAX_SKIP_FRACTION = 0.05


@dataclass(frozen=True)
class Grid:
    """Strictly increasing evaluation grid of positive reals."""

    points: np.ndarray
    policy: str = "custom"

    def __post_init__(self):
        pts = as_float_array(self.points)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("grid needs at least two points")
        if np.any(pts <= 0.0):
            raise ValueError("grid points must be positive")
        if np.any(np.diff(pts) <= 0.0):
            raise ValueError("grid points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.size

    @classmethod
    def log_spaced(cls, lo: float, hi: float, size: int = 2001) -> "Grid":
        return cls(np.geomspace(lo, hi, size), policy="log")

    @classmethod
    def linear(cls, lo: float, hi: float, size: int = 2001) -> "Grid":
        return cls(np.linspace(lo, hi, size), policy="linear")

    @classmethod
    def probability(cls, eps: float = 1e-3, size: int = 2001) -> "Grid":
        """Linear grid on [eps, 1-eps] for functionals of reliability p."""
        return cls(np.linspace(eps, 1.0 - eps, size), policy="linear")

    @classmethod
    def margin_bracketed(
        cls,
        dist_x: LifetimeDistribution,
        dist_y: LifetimeDistribution,
        size: int = 2001,
        q_lo: float = 0.001,
        q_hi: float = 0.999,
        policy: str = "log",
    ) -> "Grid":
        """Log-spaced grid spanning the [q_lo, q_hi] quantiles of the equal
        mixture of the two margins, avoiding both indeterminate tails."""

        def mix_cdf(x: float) -> float:
            return 0.5 * (float(dist_x.cdf(x)) + float(dist_y.cdf(x)))

        lo_bracket = min(dist_x.quantile(q_lo), dist_y.quantile(q_lo))
        hi_bracket = max(dist_x.quantile(q_hi), dist_y.quantile(q_hi))
        lo = _quantile_bisect(mix_cdf, q_lo, lo_bracket, hi_bracket)
        hi = _quantile_bisect(mix_cdf, q_hi, lo_bracket, hi_bracket)
        if policy == "log":
            return cls.log_spaced(lo, hi, size)
        return cls.linear(lo, hi, size)

    @classmethod
    def system_bracketed(
        cls,
        sys1,
        sys2,
        size: int = 2001,
        q_lo: float = 0.001,
        q_hi: float = 0.999,
        policy: str = "log",
    ) -> "Grid":
        """Grid spanning the [q_lo, q_hi] quantiles of the equal mixture of
        the two SYSTEM lifetimes.  System lifetimes can live far from their
        component margins (a parallel system dies long after its first
        component), and ratios of system cumulative hazards are indeterminate
        outside this range."""

        def mix_cdf(x: float) -> float:
            return 1.0 - 0.5 * (float(sys1.survival(x)) + float(sys2.survival(x)))

        lo = min(sys1.margin.quantile(q_lo), sys2.margin.quantile(q_lo))
        for _ in range(200):
            if mix_cdf(lo) <= q_lo or lo < 1e-280:
                break
            lo *= 0.5
        hi = max(sys1.margin.quantile(q_hi), sys2.margin.quantile(q_hi))
        for _ in range(200):
            if mix_cdf(hi) >= q_hi or hi > 1e280:
                break
            hi *= 2.0
        lo_q = _quantile_bisect(mix_cdf, q_lo, lo, hi)
        hi_q = _quantile_bisect(mix_cdf, q_hi, lo, hi)
        if policy == "log":
            return cls.log_spaced(lo_q, hi_q, size)
        return cls.linear(lo_q, hi_q, size)


def _quantile_bisect(cdf, target: float, lo: float, hi: float, iters: int = 80) -> float:
    if hi <= lo:
        return lo
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if cdf(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class OrderVerdict:
    """Outcome of a grid check with the worst witness point."""

    relation: str
    holds: str  # "yes" | "no" | "inconclusive"
    witness_x: float | None
    violation: float
    tolerance: float
    skipped: int = 0
    checked: int = 0
    note: str = ""

    def as_row(self) -> list:
        return [self.relation, self.holds, self.witness_x, self.violation, self.skipped]


def _verdict_from_values(
    xs: np.ndarray,
    values: np.ndarray,
    direction: str,
    tol: float,
    relation: str,
    pre_skipped: int = 0,
) -> OrderVerdict:
    if direction not in ("incr", "decr"):
        raise ValueError(f"direction must be 'incr' or 'decr', got {direction!r}")
    finite = np.isfinite(values)
    skipped = pre_skipped + int(np.sum(~finite))
    xs_kept = xs[finite]
    kept = values[finite]
    total = xs.size + pre_skipped
    if kept.size == 0:
        raise ValueError("empty grid after skipping flagged points")
    if kept.size < 2 or skipped > MAX_SKIP_FRACTION * total:
        return OrderVerdict(
            relation, "inconclusive", None, np.nan, tol, skipped, kept.size,
            note="too many points skipped",
        )
    # violation = worst reversal between ANY earlier/later pair (drawdown),
    # not just adjacent points; a slow cumulative reversal must not certify
    if direction == "incr":
        viol = np.maximum.accumulate(kept)[1:] - kept[1:]
    else:
        viol = kept[1:] - np.minimum.accumulate(kept)[1:]
    idx = int(np.argmax(viol))
    worst = float(viol[idx])
    holds = "yes" if worst <= tol else "no"
    return OrderVerdict(relation, holds, float(xs_kept[idx + 1]), worst, tol, skipped, kept.size)


def check_monotone(
    f: Callable[[np.ndarray], np.ndarray],
    grid: Grid,
    direction: str = "incr",
    tol: float = 1e-9,
    relation: str = "monotone",
) -> OrderVerdict:
    """Certify that f is monotone in the given direction on the grid.

    Non-finite evaluations are skipped and counted; the violation reported is
    the worst reversal between any earlier and later kept point.
    """
    values = as_float_array(f(grid.points))
    if values.shape != grid.points.shape:
        raise ValueError("function must evaluate the whole grid at once")
    return _verdict_from_values(grid.points, values, direction, tol, relation)


def check_sign(
    f: Callable[[np.ndarray], np.ndarray],
    grid: Grid,
    sign: str = "nonpositive",
    tol: float = 1e-9,
    relation: str = "sign",
) -> OrderVerdict:
    """Certify f <= 0 (or >= 0) on the grid within tol."""
    if sign not in ("nonpositive", "nonnegative"):
        raise ValueError(f"sign must be 'nonpositive' or 'nonnegative', got {sign!r}")
    values = as_float_array(f(grid.points))
    finite = np.isfinite(values)
    skipped = int(np.sum(~finite))
    kept = values[finite]
    xs = grid.points[finite]
    if kept.size == 0:
        raise ValueError("empty grid after skipping flagged points")
    if skipped > MAX_SKIP_FRACTION * grid.points.size:
        return OrderVerdict(relation, "inconclusive", None, np.nan, tol, skipped, kept.size,
                            note="too many points skipped")
    viol = kept if sign == "nonpositive" else -kept
    idx = int(np.argmax(viol))
    worst = float(viol[idx])
    holds = "yes" if worst <= tol else "no"
    return OrderVerdict(relation, holds, float(xs[idx]), worst, tol, skipped, kept.size)


def _ratio_verdict(xs, num, den, direction, tol, relation) -> OrderVerdict:
    num = as_float_array(num)
    den = as_float_array(den)
    keep = np.isfinite(num) & np.isfinite(den) & (np.abs(den) >= RATIO_FLOOR)
    pre_skipped = int(np.sum(~keep))
    if not np.any(keep):
        raise ValueError("empty grid after skipping flagged points")
    ratio = num[keep] / den[keep]
    return _verdict_from_values(xs[keep], ratio, direction, tol, relation, pre_skipped=pre_skipped)


def check_order(
    dist_x: LifetimeDistribution,
    dist_y: LifetimeDistribution,
    relation: str,
    grid: Grid | None = None,
    tol: float = 1e-9,
) -> OrderVerdict:
    """Grid-certify a stochastic order or ageing-faster relation X vs Y."""
    if relation not in RELATIONS:
        raise ValueError(f"unknown relation {relation!r}; expected one of {RELATIONS}")
    if grid is None:
        grid = Grid.margin_bracketed(dist_x, dist_y)
    x = grid.points

    if relation == "st":
        diff = as_float_array(dist_x.sf(x)) - as_float_array(dist_y.sf(x))
        idx = int(np.argmax(diff))
        worst = float(diff[idx])
        holds = "yes" if worst <= tol else "no"
        return OrderVerdict(relation, holds, float(x[idx]), worst, tol, 0, x.size)

    table = {
        "hr": (dist_y.sf, dist_x.sf, "incr"),
        "rh": (dist_y.cdf, dist_x.cdf, "incr"),
        "c": (dist_x.hazard, dist_y.hazard, "incr"),
        "b": (dist_x.rev_hazard, dist_y.rev_hazard, "decr"),
        "c_star": (dist_x.cum_hazard, dist_y.cum_hazard, "incr"),
        "b_star": (dist_x.cum_rev_hazard, dist_y.cum_rev_hazard, "decr"),
    }
    num_fn, den_fn, direction = table[relation]
    num = np.asarray(num_fn(x), dtype=float)
    den = np.asarray(den_fn(x), dtype=float)
    # the relations are defined on intervals whose boundary values are known:
    # every ratio is anchored at x = 0, and the cdf ratio also at the right
    # tail where both cdfs reach 1.  Indeterminate anchors (0/0, inf/inf)
    # fall to the ordinary skip rule; determinate ones catch reversals that
    # happen before the first (or after the last) interior grid point.
    xs = np.concatenate(([0.0], x))
    num = np.concatenate(([float(num_fn(0.0))], num))
    den = np.concatenate(([float(den_fn(0.0))], den))
    if relation == "rh":
        xs = np.concatenate((xs, [np.inf]))
        num = np.concatenate((num, [1.0]))
        den = np.concatenate((den, [1.0]))
    return _ratio_verdict(xs, num, den, direction, tol, relation)


def system_order_direct(
    sys1: SystemModel,
    sys2: SystemModel,
    relation: str,
    grid: Grid | None = None,
    tol: float = 1e-9,
) -> OrderVerdict:
    """Ground-truth grid check of an ageing-faster conclusion between systems.

    For c_star the ratio of system cumulative hazards -ln h(sf(x)) must be
    increasing; for b_star the ratio of system cumulative reversed hazards
    must be decreasing.
    """
    if relation not in ("c_star", "b_star"):
        raise ValueError("direct system comparison supports only 'c_star' and 'b_star'")
    if grid is None:
        grid = Grid.system_bracketed(sys1, sys2)
    x = grid.points
    if relation == "c_star":
        num, den, direction = sys1.cum_hazard(x), sys2.cum_hazard(x), "incr"
    else:
        num, den, direction = sys1.cum_rev_hazard(x), sys2.cum_rev_hazard(x), "decr"
    return _ratio_verdict(x, num, den, direction, tol, f"system:{relation}")


@dataclass(frozen=True)
class IdentityReport:
    """Worst quadrature-vs-direct discrepancy of the two cumulative-hazard identities."""

    max_abs_cum_hazard: float
    max_abs_cum_rev_hazard: float
    worst_x_cum_hazard: float
    worst_x_cum_rev_hazard: float
    n_points: int
    quad_tol: float

    @property
    def max_abs(self) -> float:
        return max(self.max_abs_cum_hazard, self.max_abs_cum_rev_hazard)


def integral_identity_check(
    sys: SystemModel,
    grid: Grid | None = None,
    quad_tol: float = 1e-9,
) -> IdentityReport:
    """Cross-validate the system cumulative hazards against their integral forms.

    At every grid x, adaptive quadrature of the elasticity functionals must
    reproduce the directly evaluated system cumulative hazards:

        -ln h(sf(x))     = integral_0^{Delta(x)}  H(e^-v) dv
        -ln(1 - h(sf(x))) = integral_0^{Dtilde(x)} R(1-e^-v) dv
    """
    if grid is None:
        grid = Grid.margin_bracketed(sys.margin, sys.margin, size=200)
    dist = sys.distortion

    def h_integrand(v: float) -> float:
        return float(dist.H(np.exp(-v)))

    def r_integrand(v: float) -> float:
        return float(dist.R(-np.expm1(-v)))

    worst_c = worst_b = 0.0
    worst_xc = worst_xb = float(grid.points[0])
    for x in grid.points:
        upper_c = float(sys.margin.cum_hazard(x))
        lhs_c = float(sys.cum_hazard(x))
        rhs_c = _quad_or_raise(h_integrand, upper_c, quad_tol)
        if abs(lhs_c - rhs_c) > worst_c:
            worst_c, worst_xc = abs(lhs_c - rhs_c), float(x)

        upper_b = float(sys.margin.cum_rev_hazard(x))
        lhs_b = float(sys.cum_rev_hazard(x))
        rhs_b = _quad_or_raise(r_integrand, upper_b, quad_tol)
        if abs(lhs_b - rhs_b) > worst_b:
            worst_b, worst_xb = abs(lhs_b - rhs_b), float(x)

    return IdentityReport(worst_c, worst_b, worst_xc, worst_xb, len(grid), quad_tol)


def _quad_or_raise(fn, upper: float, quad_tol: float) -> float:
    if not np.isfinite(upper):
        raise ValueError("integration limit is not finite; shrink the grid range")
    res = quad(fn, 0.0, upper, epsabs=quad_tol, epsrel=quad_tol, limit=200, full_output=1)
    if len(res) > 3:
        raise RuntimeError(f"quadrature did not converge: {res[3]}")
    return float(res[0])


def sign_change_count(
    f: Callable[[np.ndarray], np.ndarray],
    grid: Grid,
    tol: float = 0.0,
) -> tuple[int, str]:
    """Count strict sign alternations of f on the grid, ignoring |f| <= tol.

    Returns the alternation count and the collapsed pattern, e.g. (1, "-+").
    """
    values = as_float_array(f(grid.points))
    values = values[np.isfinite(values)]
    signs = np.sign(values[np.abs(values) > tol])
    pattern = []
    for s in signs:
        ch = "+" if s > 0 else "-"
        if not pattern or pattern[-1] != ch:
            pattern.append(ch)
    return max(0, len(pattern) - 1), "".join(pattern)

"""Certification pipelines assembling the sufficient conditions for the two
relative-ageing conclusions between coherent systems.

For the cumulative-hazard conclusion (relation ``c_star``) the conditions on
the distortion elasticities H_i(p) = p h_i'(p)/h_i(p) are:

    (i)   H1/H2 decreasing on (0, 1)
    (ii)  (1-p) H1'/H1 negative and decreasing
    (iii) (1-p) H2'/H2 negative and decreasing
    (iv)  X ageing faster than Y in cumulative hazard, and Y <=_st X

and certification requires {(i), (ii), (iv)} or {(i), (iii), (iv)}.  The
cumulative-reversed-hazard conclusion (``b_star``) mirrors this with
R_i(p) = (1-p) h_i'(p)/(1-h_i(p)), ratio R1/R2 increasing, p R_i'/R_i
positive and decreasing, and (iv) replaced by the b_star/st pair in the
opposite stochastic direction.

These conditions are sufficient, not necessary: a failed route never claims
the negation, and reports say "not-certified-by-this-route".  Every report
carries the direct grid check of the conclusion for a soundness audit --
certified with a failing direct check is a build-breaking inconsistency.

Sign conditions that are identically zero (e.g. any power distortion makes
(1-p)H'/H vanish) pass within a small slack and are flagged "boundary".

A stronger certification route exists in the literature with condition (iv)
replaced by the plain (non-cumulative) ageing-faster order plus an rh/hr
order; its hypotheses are strictly stronger and it is not implemented here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .orders import Grid, OrderVerdict, check_monotone, check_order, check_sign, system_order_direct
from .systems import SystemModel

__all__ = [
    "VerifyConfig",
    "ConditionEntry",
    "ConditionReport",
    "verify_cstar",
    "verify_bstar",
    "corollary_index_check",
]

EXIT_CERTIFIED = 0
EXIT_NOT_CERTIFIED = 2
EXIT_INCONCLUSIVE = 3


@dataclass(frozen=True)
class VerifyConfig:
    """Tolerances and grids for one certification run.

    tol applies to closed-form checks; tol_fd to checks contaminated by the
    second-level finite differences behind H'/R'; sign_slack classifies
    identically-zero sign conditions as boundary passes.
    """

    eps_endpoint: float = 1e-3
    p_grid_size: int = 2001
    tol: float = 1e-9
    tol_fd: float = 1e-6
    sign_slack: float = 1e-8
    fd_step: float = 1e-5
    x_grid: Grid | None = None
    x_grid_size: int = 2001

    def p_grid(self) -> Grid:
        return Grid.probability(self.eps_endpoint, self.p_grid_size)


@dataclass(frozen=True)
class ConditionEntry:
    name: str
    status: str  # "pass" | "fail" | "inconclusive"
    witness: float | None
    violation: float
    boundary: bool = False
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "witness": self.witness,
            "violation": self.violation,
            "boundary": self.boundary,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class ConditionReport:
    relation: str
    conditions: tuple[ConditionEntry, ...]
    conclusion: str  # "certified" | "not-certified-by-this-route" | "inconclusive"
    direct: OrderVerdict

    @property
    def certified(self) -> bool:
        return self.conclusion == "certified"

    @property
    def exit_code(self) -> int:
        if self.conclusion == "certified":
            return EXIT_CERTIFIED
        if self.conclusion == "inconclusive":
            return EXIT_INCONCLUSIVE
        return EXIT_NOT_CERTIFIED

    def condition(self, name: str) -> ConditionEntry:
        for entry in self.conditions:
            if entry.name == name:
                return entry
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "relation": self.relation,
            "conclusion": self.conclusion,
            "conditions": [c.to_dict() for c in self.conditions],
            "direct_check": {
                "relation": self.direct.relation,
                "holds": self.direct.holds,
                "witness_x": self.direct.witness_x,
                "violation": self.direct.violation,
                "tolerance": self.direct.tolerance,
                "skipped": self.direct.skipped,
            },
        }


def _combine(name: str, parts: list[OrderVerdict], boundary: bool = False, detail: str = "") -> ConditionEntry:
    if any(v.holds == "no" for v in parts):
        worst = max((v for v in parts if v.holds == "no"), key=lambda v: v.violation)
        return ConditionEntry(name, "fail", worst.witness_x, worst.violation, boundary, detail)
    if any(v.holds == "inconclusive" for v in parts):
        return ConditionEntry(name, "inconclusive", None, np.nan, boundary,
                              detail or "; ".join(v.note for v in parts if v.note))
    worst = max(parts, key=lambda v: v.violation)
    return ConditionEntry(name, "pass", worst.witness_x, worst.violation, boundary, detail)


def _ratio_condition(name, d1, d2, func_name, direction, grid, tol) -> ConditionEntry:
    f1 = getattr(d1, func_name)
    f2 = getattr(d2, func_name)

    def ratio(p):
        num = np.asarray(f1(p), dtype=float)
        den = np.asarray(f2(p), dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = num / den
        return np.where(np.abs(den) < 1e-12, np.nan, out)

    verdict = check_monotone(ratio, grid, direction=direction, tol=tol, relation=name)
    return _combine(name, [verdict])


def _elasticity_sign_condition(name, dist, kind, grid, sign_slack, tol_fd, fd_step) -> ConditionEntry:
    """Condition of the form '(1-p)H'/H negative and decreasing' (kind='H')
    or 'p R'/R positive and decreasing' (kind='R')."""

    if kind == "H":
        def g(p):
            return (1.0 - p) * np.asarray(dist.H_prime(p, fd_step), dtype=float) / np.asarray(
                dist.H(p), dtype=float
            )
        sign = "nonpositive"
    else:
        def g(p):
            return p * np.asarray(dist.R_prime(p, fd_step), dtype=float) / np.asarray(
                dist.R(p), dtype=float
            )
        sign = "nonnegative"

    sign_verdict = check_sign(g, grid, sign=sign, tol=sign_slack, relation=f"{name}:sign")
    mono_verdict = check_monotone(g, grid, direction="decr", tol=tol_fd, relation=f"{name}:decreasing")

    values = np.asarray(g(grid.points), dtype=float)
    finite = values[np.isfinite(values)]
    # boundary: the sign condition holds only by slack (identically-zero case)
    if sign == "nonpositive":
        boundary = bool(finite.size and np.max(finite) > -sign_slack)
    else:
        boundary = bool(finite.size and np.min(finite) < sign_slack)
    detail = "holds in the zero-within-slack boundary sense" if boundary else ""
    return _combine(name, [sign_verdict, mono_verdict], boundary=boundary, detail=detail)


def _margin_condition(name, sysa, sysb, ageing_rel, st_pair, grid, tol) -> ConditionEntry:
    ageing = check_order(sysa.margin, sysb.margin, ageing_rel, grid=grid, tol=tol)
    st = check_order(st_pair[0].margin, st_pair[1].margin, "st", grid=grid, tol=tol)
    return _combine(name, [ageing, st])


def _conclude(cond: dict[str, ConditionEntry]) -> str:
    routes = [("i", "ii", "iv"), ("i", "iii", "iv")]
    for route in routes:
        if all(cond[c].status == "pass" for c in route):
            return "certified"
    if all(any(cond[c].status == "fail" for c in route) for route in routes):
        return "not-certified-by-this-route"
    return "inconclusive"


def _verify(sys1: SystemModel, sys2: SystemModel, relation: str, cfg: VerifyConfig) -> ConditionReport:
    pgrid = cfg.p_grid()
    xgrid = cfg.x_grid or Grid.margin_bracketed(sys1.margin, sys2.margin, size=cfg.x_grid_size)
    d1, d2 = sys1.distortion, sys2.distortion

    if relation == "c_star":
        entries = {
            "i": _ratio_condition("i", d1, d2, "H", "decr", pgrid, cfg.tol),
            "ii": _elasticity_sign_condition("ii", d1, "H", pgrid, cfg.sign_slack, cfg.tol_fd, cfg.fd_step),
            "iii": _elasticity_sign_condition("iii", d2, "H", pgrid, cfg.sign_slack, cfg.tol_fd, cfg.fd_step),
            "iv": _margin_condition("iv", sys1, sys2, "c_star", (sys2, sys1), xgrid, cfg.tol),
        }
    else:
        entries = {
            "i": _ratio_condition("i", d1, d2, "R", "incr", pgrid, cfg.tol),
            "ii": _elasticity_sign_condition("ii", d1, "R", pgrid, cfg.sign_slack, cfg.tol_fd, cfg.fd_step),
            "iii": _elasticity_sign_condition("iii", d2, "R", pgrid, cfg.sign_slack, cfg.tol_fd, cfg.fd_step),
            "iv": _margin_condition("iv", sys1, sys2, "b_star", (sys1, sys2), xgrid, cfg.tol),
        }

    # the direct check brackets by system-lifetime quantiles on its own;
    # xgrid covers the margin-order conditions only
    direct = system_order_direct(sys1, sys2, relation, grid=None, tol=cfg.tol)
    conclusion = _conclude(entries)
    order = ("i", "ii", "iii", "iv")
    return ConditionReport(relation, tuple(entries[k] for k in order), conclusion, direct)


def verify_cstar(sys1: SystemModel, sys2: SystemModel, cfg: VerifyConfig | None = None) -> ConditionReport:
    """Certify that system 1 ages faster than system 2 in cumulative hazard."""
    return _verify(sys1, sys2, "c_star", cfg or VerifyConfig())


def verify_bstar(sys1: SystemModel, sys2: SystemModel, cfg: VerifyConfig | None = None) -> ConditionReport:
    """Certify that system 1 ages faster than system 2 in cumulative reversed hazard."""
    return _verify(sys1, sys2, "b_star", cfg or VerifyConfig())


def corollary_index_check(k: int, n: int, l: int, m: int, relation: str) -> bool:
    """Index predicate under which the k-out-of-n conclusions hold.

    c_star: k-out-of-n ages faster than l-out-of-m when k <= l and
    m - l <= n - k.  b_star: when l <= k and n - k <= m - l.
    """
    if not (1 <= k <= n and 1 <= l <= m):
        raise ValueError(f"need 1 <= k <= n and 1 <= l <= m, got k={k}, n={n}, l={l}, m={m}")
    if relation == "c_star":
        return k <= l and m - l <= n - k
    if relation == "b_star":
        return l <= k and n - k <= m - l
    raise ValueError(f"relation must be 'c_star' or 'b_star', got {relation!r}")

"""Command-line front end for reproducible certification runs.

One JSON spec file drives each run; flags exist only for overrides
(--grid-size, --tol, --seed, --eps-endpoint).  Numeric output is written with
17 significant digits so golden-file diffs are meaningful, and every CSV/JSON
artifact records the sha256 of the input spec.

Subcommands and exit codes:

    distortion   table of p, h, h_prime, H, R          0 ok / 3 numeric flags
    check-order  margin order verdict CSV              0 holds / 2 fails / 3 inconclusive
    verify       condition-by-condition report (JSON)  0 certified / 2 not / 3 inconclusive
    simulate     empirical vs analytic survival CSV    0 ok / 3 oracle deviation > 4
    corollary    k-out-of-n index predicate            0 true / 2 false

Exit code 1 is reserved for usage and spec-schema errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass

import numpy as np

from .copulas import Copula, copula_from_dict
from .distributions import LifetimeDistribution, distribution_from_dict
from .montecarlo import SimConfig, simulate_system
from .orders import Grid, OrderVerdict, check_order
from .systems import Structure, SystemModel
from .verifier import VerifyConfig, corollary_index_check, verify_bstar, verify_cstar

__all__ = ["main", "SpecError", "load_spec", "parse_table", "format_float"]

ORDER_RELATIONS = ("st", "hr", "rh", "c", "b", "c_star", "b_star")
VERIFY_RELATIONS = ("c_star", "b_star")


class SpecError(ValueError):
    """Raised for any schema violation in a run spec; maps to exit code 1."""


def format_float(v: float) -> str:
    return f"{float(v):.17g}"


def spec_hash(raw: dict) -> str:
    canonical = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# schema validation

def _require(d: dict, required: set[str], optional: set[str], where: str) -> None:
    if not isinstance(d, dict):
        raise SpecError(f"{where} must be a JSON object")
    unknown = set(d) - required - optional
    if unknown:
        raise SpecError(f"unknown fields in {where}: {sorted(unknown)}")
    missing = required - set(d)
    if missing:
        raise SpecError(f"missing fields in {where}: {sorted(missing)}")


def _load_structure(d: dict, where: str) -> Structure:
    _require(d, {"n", "paths"}, set(), where)
    try:
        return Structure.from_paths(int(d["n"]), d["paths"])
    except (ValueError, TypeError) as exc:
        raise SpecError(f"invalid structure in {where}: {exc}") from exc


def _load_margin(d: dict, where: str) -> LifetimeDistribution:
    try:
        return distribution_from_dict(d)
    except (ValueError, TypeError) as exc:
        raise SpecError(f"invalid margin in {where}: {exc}") from exc


def _load_copula(d: dict, dim: int, where: str) -> Copula:
    try:
        return copula_from_dict(d, dim)
    except (ValueError, TypeError) as exc:
        raise SpecError(f"invalid copula in {where}: {exc}") from exc


@dataclass
class SystemBlock:
    margin: LifetimeDistribution
    structure: Structure | None = None
    copula: Copula | None = None

    def model(self, where: str) -> SystemModel:
        if self.structure is None or self.copula is None:
            raise SpecError(f"{where} needs both 'structure' and 'copula' for this command")
        return SystemModel(self.structure, self.copula, self.margin)


def _load_system(d: dict, where: str) -> SystemBlock:
    _require(d, {"margin"}, {"structure", "copula"}, where)
    margin = _load_margin(d["margin"], where)
    structure = _load_structure(d["structure"], where) if "structure" in d else None
    copula = None
    if "copula" in d:
        if structure is None:
            raise SpecError(f"{where}: 'copula' requires 'structure' for its dimension")
        copula = _load_copula(d["copula"], structure.n, where)
    elif structure is not None:
        raise SpecError(f"{where}: 'structure' requires 'copula'")
    return SystemBlock(margin=margin, structure=structure, copula=copula)


_TOL_KEYS = {"tol", "tol_fd", "sign_slack", "eps_endpoint"}
_GRID_KEYS = {"policy", "size"}
_SIM_KEYS = {"sample_count", "seed", "stream_count"}
_OUTPUT_KEYS = {"csv", "json"}


@dataclass
class RunSpec:
    """Validated run spec plus the raw dict it came from."""

    raw: dict
    command: str
    system1: SystemBlock | None = None
    system2: SystemBlock | None = None
    relation: str | None = None
    grid_policy: str = "log"
    grid_size: int = 2001
    tol: float = 1e-9
    tol_fd: float = 1e-6
    sign_slack: float = 1e-8
    eps_endpoint: float = 1e-3
    sim: SimConfig | None = None
    out_csv: str | None = None
    out_json: str | None = None
    indices: tuple[int, int, int, int] | None = None

    @property
    def sha256(self) -> str:
        return spec_hash(self.raw)


def load_spec(raw: dict, command: str) -> RunSpec:
    """Validate a raw spec dict for one subcommand; unknown fields are rejected."""
    schemas = {
        "distortion": ({"system1"}, {"grid", "tolerances", "output"}),
        "check-order": ({"system1", "system2", "relation"}, {"grid", "tolerances", "output"}),
        "verify": ({"system1", "system2", "relation"}, {"grid", "tolerances", "output"}),
        "simulate": ({"system1"}, {"grid", "simulation", "output"}),
        "corollary": ({"k", "n", "l", "m", "relation"}, set()),
    }
    if command not in schemas:
        raise SpecError(f"unknown command {command!r}")
    required, optional = schemas[command]
    _require(raw, required, optional, "spec")
    spec = RunSpec(raw=raw, command=command)

    if command == "corollary":
        try:
            spec.indices = tuple(int(raw[k]) for k in ("k", "n", "l", "m"))
        except (TypeError, ValueError) as exc:
            raise SpecError(f"corollary indices must be integers: {exc}") from exc
        spec.relation = raw["relation"]
        if spec.relation not in VERIFY_RELATIONS:
            raise SpecError(f"relation must be one of {VERIFY_RELATIONS}, got {spec.relation!r}")
        return spec

    spec.system1 = _load_system(raw["system1"], "system1")
    if "system2" in raw:
        spec.system2 = _load_system(raw["system2"], "system2")

    if "relation" in raw:
        allowed = VERIFY_RELATIONS if command == "verify" else ORDER_RELATIONS
        spec.relation = raw["relation"]
        if spec.relation not in allowed:
            raise SpecError(f"relation must be one of {allowed}, got {spec.relation!r}")

    if "grid" in raw:
        _require(raw["grid"], set(), _GRID_KEYS, "grid")
        spec.grid_policy = raw["grid"].get("policy", spec.grid_policy)
        if spec.grid_policy not in ("log", "linear"):
            raise SpecError(f"grid policy must be 'log' or 'linear', got {spec.grid_policy!r}")
        spec.grid_size = int(raw["grid"].get("size", spec.grid_size))
        if spec.grid_size < 2:
            raise SpecError("grid size must be at least 2")

    if "tolerances" in raw:
        _require(raw["tolerances"], set(), _TOL_KEYS, "tolerances")
        for key in _TOL_KEYS:
            if key in raw["tolerances"]:
                setattr(spec, key, float(raw["tolerances"][key]))

    if "simulation" in raw:
        _require(raw["simulation"], set(), _SIM_KEYS, "simulation")
        block = raw["simulation"]
        try:
            spec.sim = SimConfig(
                sample_count=int(block.get("sample_count", 100_000)),
                seed=int(block.get("seed", 0)),
                stream_count=int(block.get("stream_count", 4)),
            )
        except ValueError as exc:
            raise SpecError(f"invalid simulation block: {exc}") from exc
    elif command == "simulate":
        spec.sim = SimConfig()

    if "output" in raw:
        _require(raw["output"], set(), _OUTPUT_KEYS, "output")
        spec.out_csv = raw["output"].get("csv")
        spec.out_json = raw["output"].get("json")
    return spec


# ---------------------------------------------------------------------------
# emitters and parsers

def emit_table(meta: dict, header: list[str], rows: list[list[float]]) -> str:
    lines = [f"# {k}={v}" for k, v in meta.items()]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(format_float(v) if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def parse_table(text: str) -> tuple[dict, list[str], list[list[str]]]:
    """Parse CSV emitted by this tool back into (meta, header, rows)."""
    meta: dict = {}
    header: list[str] = []
    rows: list[list[str]] = []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            meta[key] = value
            continue
        if not header:
            header = line.split(",")
            continue
        rows.append(line.split(","))
    if not header:
        raise ValueError("no header line found")
    return meta, header, rows


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _verdict_csv(meta: dict, verdict: OrderVerdict) -> str:
    header = ["relation", "holds", "witness_x", "violation", "skipped_points"]
    witness = verdict.witness_x if verdict.witness_x is not None else float("nan")
    row = [verdict.relation, verdict.holds, float(witness), float(verdict.violation), verdict.skipped]
    return emit_table(meta, header, [row])


# ---------------------------------------------------------------------------
# commands

def _cmd_distortion(spec: RunSpec) -> int:
    model = spec.system1.model("system1")
    grid = Grid.probability(spec.eps_endpoint, spec.grid_size)
    p = grid.points
    dist = model.distortion
    h = np.asarray(dist.h(p), dtype=float)
    hp = np.asarray(dist.h_prime(p), dtype=float)
    big_h = np.asarray(dist.H(p), dtype=float)
    big_r = np.asarray(dist.R(p), dtype=float)
    rows = [[float(a), float(b), float(c), float(d), float(e)] for a, b, c, d, e in zip(p, h, hp, big_h, big_r)]
    text = emit_table({"spec_sha256": spec.sha256}, ["p", "h", "h_prime", "H", "R"], rows)
    _write(text, spec.out_csv)
    numeric_flags = not (np.all(np.isfinite(h)) and np.all(np.isfinite(hp))
                         and np.all(np.isfinite(big_h)) and np.all(np.isfinite(big_r)))
    return 3 if numeric_flags else 0


def _x_grid(spec: RunSpec) -> Grid:
    return Grid.margin_bracketed(
        spec.system1.margin, spec.system2.margin, size=spec.grid_size, policy=spec.grid_policy
    )


def _cmd_check_order(spec: RunSpec) -> int:
    verdict = check_order(
        spec.system1.margin, spec.system2.margin, spec.relation, grid=_x_grid(spec), tol=spec.tol
    )
    text = _verdict_csv({"spec_sha256": spec.sha256}, verdict)
    _write(text, spec.out_csv)
    return {"yes": 0, "no": 2, "inconclusive": 3}[verdict.holds]


def _cmd_verify(spec: RunSpec) -> int:
    sys1 = spec.system1.model("system1")
    sys2 = spec.system2.model("system2")
    cfg = VerifyConfig(
        eps_endpoint=spec.eps_endpoint,
        p_grid_size=spec.grid_size,
        tol=spec.tol,
        tol_fd=spec.tol_fd,
        sign_slack=spec.sign_slack,
        x_grid=_x_grid(spec),
    )
    verify = verify_cstar if spec.relation == "c_star" else verify_bstar
    report = verify(sys1, sys2, cfg)
    payload = {"spec_sha256": spec.sha256, **report.to_dict(), "exit_code": report.exit_code}
    _write(json.dumps(payload, sort_keys=True, indent=2) + "\n", spec.out_json)
    return report.exit_code


def _cmd_simulate(spec: RunSpec) -> int:
    block = spec.system1
    model = block.model("system1")
    result = simulate_system(model.structure, model.copula, model.margin, spec.sim)
    meta = {
        "spec_sha256": spec.sha256,
        "seed": spec.sim.seed,
        "sample_count": spec.sim.sample_count,
        "stream_count": spec.sim.stream_count,
    }
    rows = [
        [float(a), float(b), float(c), float(d)]
        for a, b, c, d in zip(result.x, result.empirical_sf, result.analytic_sf, result.std_err)
    ]
    text = emit_table(meta, ["x", "empirical_sf", "analytic_sf", "std_err"], rows)
    _write(text, spec.out_csv)
    return 3 if result.max_standardized_deviation > 4.0 else 0


def _cmd_corollary(spec: RunSpec) -> int:
    k, n, l, m = spec.indices
    try:
        holds = corollary_index_check(k, n, l, m, spec.relation)
    except ValueError as exc:
        raise SpecError(str(exc)) from exc
    payload = {
        "spec_sha256": spec.sha256,
        "k": k, "n": n, "l": l, "m": m,
        "relation": spec.relation,
        "holds": holds,
    }
    sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return 0 if holds else 2


_COMMANDS = {
    "distortion": _cmd_distortion,
    "check-order": _cmd_check_order,
    "verify": _cmd_verify,
    "simulate": _cmd_simulate,
    "corollary": _cmd_corollary,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coherent-age",
        description="Grid-certified relative-ageing comparisons of coherent systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("spec", help="path to the JSON run spec")
        p.add_argument("--grid-size", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--eps-endpoint", type=float, default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        with open(args.spec, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read spec: {exc}", file=sys.stderr)
        return 1
    try:
        spec = load_spec(raw, args.command)
        if args.grid_size is not None:
            spec.grid_size = args.grid_size
        if args.tol is not None:
            spec.tol = args.tol
        if args.eps_endpoint is not None:
            spec.eps_endpoint = args.eps_endpoint
        if args.seed is not None and spec.sim is not None:
            spec.sim = SimConfig(
                sample_count=spec.sim.sample_count, seed=args.seed, stream_count=spec.sim.stream_count
            )
        return _COMMANDS[args.command](spec)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        # downstream consumer (e.g. head) closed the pipe
        return 0


if __name__ == "__main__":
    raise SystemExit(main())

import json

import numpy as np
import pytest

from coherent_age.cli import SpecError, load_spec, main, parse_table

FGM_SYSTEM = {
    "structure": {"n": 3, "paths": [[1, 2], [1, 3]]},
    "copula": {"copula": "fgm", "theta": 1.0},
    "margin": {"family": "lfr", "alpha": 1.0, "beta": 1.0},
}
SERIES3_SYSTEM = {
    "structure": {"n": 3, "paths": [[1, 2, 3]]},
    "copula": {"copula": "independence"},
    "margin": {"family": "lfr", "alpha": 2.0, "beta": 1.0},
}
VERIFY_SPEC = {"system1": FGM_SYSTEM, "system2": SERIES3_SYSTEM, "relation": "c_star"}


def write_spec(tmp_path, payload, name="spec.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def run(tmp_path, command, payload, *extra):
    return main([command, write_spec(tmp_path, payload), *extra])


class TestDistortion:
    def test_fgm_polynomial_reproduced(self, tmp_path):
        out = tmp_path / "table.csv"
        payload = {"system1": FGM_SYSTEM, "output": {"csv": str(out)}}
        assert run(tmp_path, "distortion", payload) == 0
        meta, header, rows = parse_table(out.read_text())
        assert header == ["p", "h", "h_prime", "H", "R"]
        assert "spec_sha256" in meta
        p = np.array([float(r[0]) for r in rows])
        h = np.array([float(r[1]) for r in rows])
        target = 2 * p**2 - p**3 - p**3 * (1 - p) ** 3
        np.testing.assert_allclose(h, target, atol=1e-12)

    def test_series_cube(self, tmp_path, capsys):
        payload = {"system1": SERIES3_SYSTEM, "grid": {"size": 11}}
        assert run(tmp_path, "distortion", payload) == 0
        meta, header, rows = parse_table(capsys.readouterr().out)
        p = np.array([float(r[0]) for r in rows])
        h = np.array([float(r[1]) for r in rows])
        np.testing.assert_allclose(h, p**3, atol=1e-14)

    def test_one_of_two_parallel(self, tmp_path, capsys):
        payload = {
            "system1": {
                "structure": {"n": 2, "paths": [[1], [2]]},
                "copula": {"copula": "independence"},
                "margin": {"family": "exp", "rate": 1.0},
            },
            "grid": {"size": 21},
        }
        assert run(tmp_path, "distortion", payload) == 0
        _, _, rows = parse_table(capsys.readouterr().out)
        p = np.array([float(r[0]) for r in rows])
        h = np.array([float(r[1]) for r in rows])
        np.testing.assert_allclose(h, 2 * p - p**2, atol=1e-14)

    def test_grid_size_flag_overrides(self, tmp_path, capsys):
        payload = {"system1": SERIES3_SYSTEM, "grid": {"size": 11}}
        assert run(tmp_path, "distortion", payload, "--grid-size", "31") == 0
        _, _, rows = parse_table(capsys.readouterr().out)
        assert len(rows) == 31

    def test_numeric_flags_exit_three(self, tmp_path, capsys):
        # a 300-component series makes h underflow across most of the grid,
        # flagging the elasticity columns
        payload = {
            "system1": {
                "structure": {"n": 300, "paths": [list(range(1, 301))]},
                "copula": {"copula": "gumbel", "theta": 1.0},
                "margin": {"family": "exp", "rate": 1.0},
            },
            "grid": {"size": 11},
        }
        assert run(tmp_path, "distortion", payload) == 3
        capsys.readouterr()


class TestVerify:
    def test_worked_setup_exits_zero(self, tmp_path, capsys):
        assert run(tmp_path, "verify", VERIFY_SPEC) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["conclusion"] == "certified"
        assert payload["direct_check"]["holds"] == "yes"
        assert payload["exit_code"] == 0

    def test_swapped_margins_exit_two(self, tmp_path, capsys):
        swapped = {
            "system1": {**FGM_SYSTEM, "margin": {"family": "lfr", "alpha": 2.0, "beta": 1.0}},
            "system2": {**SERIES3_SYSTEM, "margin": {"family": "lfr", "alpha": 1.0, "beta": 1.0}},
            "relation": "c_star",
        }
        assert run(tmp_path, "verify", swapped) == 2
        payload = json.loads(capsys.readouterr().out)
        assert payload["conclusion"] == "not-certified-by-this-route"

    def test_gumbel_setup_exits_zero(self, tmp_path):
        payload = {
            "system1": {
                "structure": {"n": 4, "paths": [[1, 2, 3, 4]]},
                "copula": {"copula": "gumbel", "theta": 2.0},
                "margin": {"family": "exp", "rate": 3.0},
            },
            "system2": {
                "structure": {"n": 2, "paths": [[1, 2]]},
                "copula": {"copula": "gumbel", "theta": 2.0},
                "margin": {"family": "exp", "rate": 2.0},
            },
            "relation": "b_star",
        }
        assert run(tmp_path, "verify", payload) == 0

    def test_json_output_deterministic(self, tmp_path, capsys):
        outputs = []
        for _ in range(2):
            assert run(tmp_path, "verify", VERIFY_SPEC) == 0
            outputs.append(capsys.readouterr().out)
        assert outputs[0] == outputs[1]


class TestCheckOrder:
    def test_margin_order_csv(self, tmp_path, capsys):
        payload = {
            "system1": {"margin": {"family": "exp", "rate": 3.0}},
            "system2": {"margin": {"family": "exp", "rate": 2.0}},
            "relation": "b_star",
        }
        assert run(tmp_path, "check-order", payload) == 0
        meta, header, rows = parse_table(capsys.readouterr().out)
        assert header == ["relation", "holds", "witness_x", "violation", "skipped_points"]
        assert rows[0][0] == "b_star"
        assert rows[0][1] == "yes"

    def test_failing_order_exits_two(self, tmp_path):
        payload = {
            "system1": {"margin": {"family": "exp", "rate": 2.0}},
            "system2": {"margin": {"family": "exp", "rate": 3.0}},
            "relation": "st",
        }
        assert run(tmp_path, "check-order", payload) == 2


class TestSimulate:
    def test_csv_and_reproducibility(self, tmp_path):
        out = tmp_path / "sim.csv"
        payload = {
            "system1": SERIES3_SYSTEM,
            "simulation": {"sample_count": 20000, "seed": 42, "stream_count": 4},
            "output": {"csv": str(out)},
        }
        assert run(tmp_path, "simulate", payload) == 0
        first = out.read_bytes()
        assert run(tmp_path, "simulate", payload, "--grid-size", "2001") == 0
        assert out.read_bytes() == first
        meta, header, rows = parse_table(first.decode())
        assert meta["seed"] == "42"
        assert header == ["x", "empirical_sf", "analytic_sf", "std_err"]
        assert len(rows) == 20

    def test_seed_override_flag(self, tmp_path, capsys):
        payload = {
            "system1": SERIES3_SYSTEM,
            "simulation": {"sample_count": 5000, "seed": 1, "stream_count": 2},
        }
        assert run(tmp_path, "simulate", payload, "--seed", "77") == 0
        meta, _, _ = parse_table(capsys.readouterr().out)
        assert meta["seed"] == "77"


class TestCorollary:
    def test_true_quadruple(self, tmp_path, capsys):
        payload = {"k": 1, "n": 3, "l": 2, "m": 3, "relation": "c_star"}
        assert run(tmp_path, "corollary", payload) == 0
        assert json.loads(capsys.readouterr().out)["holds"] is True

    def test_false_quadruple(self, tmp_path):
        payload = {"k": 2, "n": 3, "l": 1, "m": 3, "relation": "c_star"}
        assert run(tmp_path, "corollary", payload) == 2


class TestSchemaValidation:
    def test_unknown_top_level_field(self, tmp_path):
        assert run(tmp_path, "verify", {**VERIFY_SPEC, "bogus": 1}) == 1

    def test_unknown_nested_field(self, tmp_path):
        bad = {
            "system1": {**FGM_SYSTEM, "extra": True},
            "system2": SERIES3_SYSTEM,
            "relation": "c_star",
        }
        assert run(tmp_path, "verify", bad) == 1

    def test_bad_relation(self, tmp_path):
        assert run(tmp_path, "verify", {**VERIFY_SPEC, "relation": "st"}) == 1

    def test_missing_field(self, tmp_path):
        assert run(tmp_path, "verify", {"system1": FGM_SYSTEM, "relation": "c_star"}) == 1

    def test_copula_without_structure(self, tmp_path):
        bad = {
            "system1": {"margin": {"family": "exp", "rate": 1.0}, "copula": {"copula": "independence"}},
            "system2": SERIES3_SYSTEM,
            "relation": "c_star",
        }
        assert run(tmp_path, "verify", bad) == 1

    def test_unreadable_spec(self, capsys):
        assert main(["verify", "/nonexistent/spec.json"]) == 1
        assert "cannot read spec" in capsys.readouterr().err

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert main(["verify", str(path)]) == 1

    def test_load_spec_rejects_unknown_command(self):
        with pytest.raises(SpecError):
            load_spec({}, "unknown")

    def test_spec_hash_stable_under_key_order(self, tmp_path, capsys):
        a = {"system1": FGM_SYSTEM, "system2": SERIES3_SYSTEM, "relation": "c_star"}
        b = {"relation": "c_star", "system2": SERIES3_SYSTEM, "system1": FGM_SYSTEM}
        hashes = []
        for payload in (a, b):
            assert run(tmp_path, "verify", payload) == 0
            hashes.append(json.loads(capsys.readouterr().out)["spec_sha256"])
        assert hashes[0] == hashes[1]


class TestRoundTrip:
    def test_distortion_csv_full_precision(self, tmp_path):
        out = tmp_path / "t.csv"
        payload = {"system1": FGM_SYSTEM, "grid": {"size": 51}, "output": {"csv": str(out)}}
        assert run(tmp_path, "distortion", payload) == 0
        meta, header, rows = parse_table(out.read_text())
        from coherent_age.cli import spec_hash

        assert meta["spec_sha256"] == spec_hash(payload)
        # 17 significant digits survive a float round trip exactly
        from coherent_age.systems import Structure, build_distortion
        from coherent_age.copulas import FGM as FGMCopula

        d = build_distortion(Structure.from_paths(3, [[1, 2], [1, 3]]), FGMCopula(1.0))
        for row in rows[::10]:
            p = float(row[0])
            assert float(row[1]) == float(d.h(p))

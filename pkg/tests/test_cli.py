"""End-to-end checks of the command-line front end."""

import subprocess
import sys

import pytest

from gridhfk.cli import (
    RunConfig,
    emit_report,
    main,
    parse_braid_word,
    parse_machine,
    run,
)
from gridhfk.gridkit import format_grid_text, parse_braid
from gridhfk.simplifier import minimize

from conftest import BRAIDS


class TestWordParsing:
    def test_spaces(self):
        assert parse_braid_word("1 1 1") == (1, 1, 1)

    def test_commas_and_negatives(self):
        assert parse_braid_word("1,-2, 1 -2") == (1, -2, 1, -2)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            parse_braid_word("   ")

    def test_non_integer_rejected(self):
        with pytest.raises(ValueError):
            parse_braid_word("1 x 2")


class TestConfigValidation:
    def test_requires_exactly_one_input(self):
        with pytest.raises(ValueError):
            RunConfig().validate()
        with pytest.raises(ValueError):
            RunConfig(braid=(1,), grid_path="f").validate()

    @pytest.mark.parametrize(
        "field,value",
        [
            ("coeff", "q"),
            ("mode", "signature"),
            ("strategy", "magic"),
            ("skip", "always"),
            ("fmt", "json"),
        ],
    )
    def test_rejects_unknown_choice(self, field, value):
        cfg = RunConfig(braid=(1,), **{field: value})
        with pytest.raises(ValueError):
            cfg.validate()

    def test_rejects_negative_budget(self):
        with pytest.raises(ValueError):
            RunConfig(braid=(1,), simplify_budget=-1).validate()

    def test_torsion_mode_needs_integers(self):
        with pytest.raises(ValueError):
            RunConfig(braid=(1,), mode="torsion", coeff="z2").validate()


class TestUnknotExample:
    def test_single_free_generator(self):
        result = run(RunConfig(braid=(1,)))
        assert result.table.groups == {(0, 0): (1, ())}
        assert result.genus == 0
        assert result.fibered is True
        assert result.torsion_free is True

    def test_text_report_row(self):
        result = run(RunConfig(braid=(1,)))
        out = emit_report(result)
        assert "(0, 0): Z" in out
        assert "total rank: 1" in out
        assert "genus: 0" in out


class TestDerivedInvariantModes:
    def test_genus_mode_matches_full_run(self):
        fast = run(RunConfig(braid=(1, 1, 1), mode="genus"))
        full = run(RunConfig(braid=(1, 1, 1)))
        assert fast.genus == full.genus == 1
        assert fast.pipeline == "ovals-top-slice"
        assert fast.table is None

    def test_fibered_mode(self):
        result = run(RunConfig(braid=(1, 1, 1), mode="fibered"))
        assert result.fibered is True
        assert "fibered: yes" in emit_report(result)

    def test_torsion_mode(self):
        result = run(RunConfig(braid=(1, 1, 1), mode="torsion"))
        assert result.torsion_free is True
        assert "torsion-free: yes" in emit_report(result)


class TestMachineFormat:
    def test_trefoil_has_three_bare_records(self):
        result = run(RunConfig(braid=(1, 1, 1), fmt="machine"))
        out = emit_report(result)
        records = [
            line
            for line in out.splitlines()
            if line and not line.startswith("#")
        ]
        assert len(records) == 3
        # no torsion anywhere, so every record is exactly "a m rank"
        assert all(len(line.split()) == 3 for line in records)

    def test_header_names_run_parameters(self):
        result = run(RunConfig(braid=(1, 1, 1), fmt="machine"))
        out = emit_report(result)
        assert "# input: braid 1 1 1" in out
        assert "# n: 5" in out
        assert "# pipeline: ovals-fast" in out
        assert "# ring: Z" in out

    @pytest.mark.parametrize("coeff", ["z", "z2"])
    def test_round_trip(self, coeff):
        for braid in [(1,), (1, 1, 1), (1, -2, 1, -2)]:
            result = run(RunConfig(braid=braid, coeff=coeff, fmt="machine"))
            assert parse_machine(emit_report(result)) == result.table

    def test_parser_rejects_missing_ring(self):
        with pytest.raises(ValueError):
            parse_machine("0 0 1\n")

    def test_parser_rejects_duplicate_grading(self):
        with pytest.raises(ValueError):
            parse_machine("# ring: Z\n0 0 1\n0 0 2\n")

    def test_parser_rejects_malformed_record(self):
        with pytest.raises(ValueError):
            parse_machine("# ring: Z\n0 0\n")

    def test_parser_rejects_non_table_modes(self):
        result = run(RunConfig(braid=(1, 1, 1), mode="genus", fmt="machine"))
        with pytest.raises(ValueError):
            parse_machine(emit_report(result))


class TestCrosscheckPolicy:
    def test_default_on_for_small_grids(self):
        result = run(RunConfig(braid=(1, 1, 1)))
        assert any("crosscheck" in c for c in result.checks)

    def test_explicit_off(self):
        result = run(RunConfig(braid=(1, 1, 1), crosscheck=False))
        assert not any("crosscheck" in c for c in result.checks)

    def test_default_off_above_size_limit(self):
        result = run(RunConfig(braid=BRAIDS["8_20"], mode="genus"))
        assert result.grid.n == 8
        assert not any("crosscheck" in c for c in result.checks)

    def test_explicit_on_above_size_limit(self):
        result = run(
            RunConfig(braid=BRAIDS["8_20"], mode="genus", crosscheck=True)
        )
        assert result.genus == 2
        assert any("crosscheck" in c for c in result.checks)


class TestStrategiesAgree:
    def test_trefoil_same_table_every_way(self):
        tables = []
        for strategy in ("fast", "faithful", "paths"):
            for skip in ("none", "auto"):
                result = run(
                    RunConfig(
                        braid=(1, 1, 1), strategy=strategy, skip=skip
                    )
                )
                tables.append(result.table)
        assert all(t == tables[0] for t in tables)


class TestGridFileInput:
    def test_grid_file_matches_braid(self, tmp_path):
        g = minimize(parse_braid([1, 1, 1]))
        path = tmp_path / "trefoil.grid"
        path.write_text("# comment line\n" + format_grid_text(g))
        from_file = run(RunConfig(grid_path=str(path)))
        from_braid = run(RunConfig(braid=(1, 1, 1)))
        assert from_file.table == from_braid.table

    def test_multi_component_grid_rejected(self, tmp_path, capsys):
        path = tmp_path / "link.grid"
        path.write_text("4\nX: 1 0 3 2\nO: 0 1 2 3\n")
        code = main(["--grid", str(path)])
        assert code == 1
        assert "closed curves" in capsys.readouterr().err


class TestMainExitCodes:
    def test_success(self, capsys):
        assert main(["--braid", "1"]) == 0
        out = capsys.readouterr().out
        assert "(0, 0): Z" in out

    def test_multi_component_closure(self, capsys):
        assert main(["--braid", "2"]) == 1
        assert "components" in capsys.readouterr().err

    def test_bad_mode_combination(self, capsys):
        code = main(["--braid", "1", "--mode", "torsion", "--coeff", "z2"])
        assert code == 1
        assert "integer coefficients" in capsys.readouterr().err

    def test_missing_grid_file(self, capsys):
        assert main(["--grid", "/no/such/file"]) == 1
        assert "error:" in capsys.readouterr().err

    def test_missing_input_is_a_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_unknown_flag_is_a_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["--braid", "1", "--frobnicate"])
        assert exc.value.code == 2

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "gridhfk.cli", "--braid", "1"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "(0, 0): Z" in proc.stdout

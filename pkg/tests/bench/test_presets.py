"""Tests for sesop_mg.bench.presets."""

from __future__ import annotations

import pytest

from sesop_mg.bench.presets import load_preset, parse_suite, preset_names, scaled_grid
from sesop_mg.config import SolverKind
from sesop_mg.exceptions import ConfigError

EXPECTED = {"table1", "table2", "fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"}


def test_all_suites_shipped():
    assert set(preset_names()) == EXPECTED


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_every_suite_parses(name):
    suite = load_preset(name)
    assert suite.name == name
    assert suite.entries
    assert suite.description


def test_table1_references():
    suite = load_preset("table1")
    refs = {e.label: e.reference for e in suite.entries}
    assert refs["sesop-tg-1-eps1-phi0"] == pytest.approx(0.333)
    assert refs["tg-eps1e-3-phi-pi4"] == pytest.approx(0.738)
    tg = next(e for e in suite.entries if e.label == "tg-eps1-phi0")
    assert tg.config.solver.kind is SolverKind.CLASSICAL_TG
    assert tg.config.solver.v1 == 1


def test_rratio_suite_fields():
    suite = load_preset("fig3")
    assert suite.kind == "rratio"
    assert suite.target == 256
    assert suite.nums[-1] == 256


def test_overrides_reach_every_entry(tmp_path):
    suite = load_preset("fig2", scale=0.25, seed=9, out=tmp_path)
    for entry in suite.entries:
        assert entry.config.seed == 9
        assert entry.config.output == str(tmp_path / "fig2")
        assert (entry.config.grid.fine_n, entry.config.grid.coarsest_n) == (15, 7)


def test_unknown_preset():
    with pytest.raises(ConfigError, match="no such preset"):
        load_preset("table9")


class TestScaledGrid:
    def test_identity(self):
        assert scaled_grid(255, 7, 1.0) == (255, 7)

    def test_two_level_stays_two_level(self):
        assert scaled_grid(63, 31, 0.5) == (31, 15)
        assert scaled_grid(63, 31, 2.0) == (127, 63)

    def test_multilevel_keeps_coarsest(self):
        assert scaled_grid(255, 7, 0.25) == (63, 7)

    def test_floor(self):
        assert scaled_grid(63, 31, 1e-3) == (7, 3)

    def test_nonpositive_scale(self):
        with pytest.raises(ValueError, match="positive"):
            scaled_grid(63, 31, 0.0)


class TestParseSuite:
    def test_errors_are_collected(self):
        data = {
            "name": "bad",
            "kind": "runs",
            "colour": "red",
            "runs": [{"label": "a", "config": {"solver": {"kind": "nope"}}}],
        }
        with pytest.raises(ConfigError) as excinfo:
            parse_suite(data)
        errors = excinfo.value.errors
        assert "colour: unknown key" in errors
        assert any(e.startswith("a: solver.kind") for e in errors)

    def test_empty_suite(self):
        with pytest.raises(ConfigError, match="no runs"):
            parse_suite({"name": "empty", "kind": "runs", "runs": []})

    def test_rratio_needs_target_and_nums(self):
        with pytest.raises(ConfigError) as excinfo:
            parse_suite({"name": "r", "kind": "rratio", "variants": [{"label": "v", "config": {}}]})
        assert any(e.startswith("target:") for e in excinfo.value.errors)
        assert any(e.startswith("nums:") for e in excinfo.value.errors)

    def test_unknown_kind(self):
        with pytest.raises(ConfigError, match="kind: must be one of"):
            parse_suite({"kind": "sweep"})

    def test_label_becomes_name(self):
        suite = parse_suite({"name": "s", "runs": [{"label": "first", "config": {}}]})
        assert suite.entries[0].config.name == "first"


@pytest.mark.parametrize("name", ["fig5", "fig6", "fig7"])
def test_descriptions_with_colons(name):
    description = load_preset(name).description
    assert ": SD, Nesterov" in description

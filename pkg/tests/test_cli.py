import json
import math

import numpy as np
import pytest

from pacsquares.cli import run
from pacsquares.formats import (
    ConfigError,
    config_svg,
    dumps_config,
    dumps_report,
    load_config,
    loads_config,
)
from pacsquares.geometry import configuration

DATA = __import__("pathlib").Path(__file__).parent / "data"


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(path)


UNIT = {"oriented": True, "label": "unit", "squares": [{"cx": 0, "cy": 0, "theta": 0}]}


class TestConfigFiles:
    def test_roundtrip(self):
        c = configuration([(0.1, 0.2, 0.3), (1 / 3, 2.5, 0.0)], label="x")
        assert loads_config(dumps_config(c)) == c

    def test_line_diagnostic(self):
        with pytest.raises(ConfigError, match="line 3"):
            loads_config('{"squares": [\n {"cx": 0,\n }]}')

    @pytest.mark.parametrize("doc,field", [
        ({"squares": [{"cx": 0}]}, r"squares\[0\]: missing field 'cy'"),
        ({"squares": [{"cx": 0, "cy": "a"}]}, r"squares\[0\].cy"),
        ({"squares": []}, "nonempty"),
        ({"squares": [{"cx": 0, "cy": 0, "theta": 0.2}], "oriented": True}, "axis-aligned|theta"),
        ({"squares": [{"cx": 0, "cy": 0, "phi": 1}]}, "unknown"),
        ([1, 2], "top level"),
    ])
    def test_field_diagnostics(self, doc, field):
        with pytest.raises(ConfigError, match=field):
            loads_config(json.dumps(doc))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "nope.json")


class TestReports:
    def test_twelve_digits(self):
        text = dumps_report({"v": math.pi, "n": 3, "ok": True})
        assert '"v": 3.14159265359' in text

    def test_svg(self):
        c = configuration([(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2), (0, 1)], label="ring")
        svg = config_svg(c)
        assert "<!-- perimeter=16 area=8 ratio=2 -->" in svg
        assert svg.count("<path") == 1 and svg.count(" Z") == 2
        assert 'fill-rule="evenodd"' in svg
        assert 'width="500.000"' in svg


class TestRun:
    def test_compute(self, tmp_path, capsys):
        cfg = write(tmp_path, "unit.json", UNIT)
        out = tmp_path / "r.json"
        assert run(["compute", "--in", cfg, "--out", str(out)]) == 0
        text = capsys.readouterr().out
        assert "p = 4" in text and "a = 1" in text and "ratio = 4" in text
        assert json.loads(out.read_text())["ratio"] == 4.0

    def test_bad_input_exit_1(self, tmp_path, capsys):
        cfg = write(tmp_path, "bad.json", '{"squares": [ {"cx": 1,, }]}')
        assert run(["compute", "--in", cfg]) == 1
        assert "line 1" in capsys.readouterr().err

    def test_usage_exit_1(self):
        assert run(["frobnicate"]) == 1
        assert run(["search", "--n", "1"]) == 1
        assert run(["compute"]) == 1

    def test_help_exit_0(self, capsys):
        assert run(["--help"]) == 0

    def test_verify_oriented_fixture(self, tmp_path, capsys):
        out = tmp_path / "v.json"
        assert run(["verify-oriented", "--in", str(DATA / "random20.json"), "--out", str(out)]) == 0
        rep = json.loads(out.read_text())
        assert rep["certificate"] == "pass" and rep["strip_certificate"]["pass"]

    def test_verify_oriented_rejects_rotated(self, tmp_path):
        cfg = write(tmp_path, "r.json", {"squares": [{"cx": 0, "cy": 0, "theta": 0.4}]})
        assert run(["verify-oriented", "--in", cfg]) == 1

    def test_bound(self, tmp_path, capsys):
        out = tmp_path / "b.csv"
        assert run(["bound", "--out", str(out)]) == 0
        text = capsys.readouterr().out
        assert text.splitlines()[0] == "x,closed,numeric,abs_diff,exact"
        assert "5.550656 <= 5.6" in text
        assert out.read_text().startswith("x,closed")

    def test_examples(self, capsys):
        assert run(["examples"]) == 0
        assert "corner triangle" in capsys.readouterr().out

    def test_oracle(self, tmp_path, capsys):
        cfg = write(tmp_path, "star.json", {"squares": [{"cx": 0, "cy": 0, "theta": 0},
                                                        {"cx": 0, "cy": 0, "theta": math.pi / 4}]})
        assert run(["oracle", "--in", cfg, "--samples", "200000", "--seed", "3"]) == 0

    def test_render(self, tmp_path):
        cfg = write(tmp_path, "unit.json", UNIT)
        svg = tmp_path / "u.svg"
        assert run(["render", "--in", cfg, "--svg", str(svg)]) == 0
        assert "ratio=4" in svg.read_text()

    def test_search_deterministic_bytes(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("PACSQUARES_SEED", "7")
        outs = []
        for k in range(2):
            out = tmp_path / f"s{k}.json"
            argv = ["search", "--n", "3", "--max-evals", "400", "--restarts", "2",
                    "--out", str(out), "--svg", str(tmp_path / f"s{k}.svg"),
                    "--manifest", str(tmp_path / f"m{k}.json")]
            assert run(argv) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
        rep = json.loads(outs[0])
        assert rep["seed"] == 7 and rep["evals"] == 400
        manifest = json.loads((tmp_path / "m0.json").read_text())
        assert set(manifest["outputs"]) == {str(tmp_path / "s0.json"), str(tmp_path / "s0.svg"),
                                            str(tmp_path / "m0.json")}

    def test_bad_seed_env(self, monkeypatch):
        monkeypatch.setenv("PACSQUARES_SEED", "abc")
        assert run(["search", "--max-evals", "10"]) == 1

    def test_compute_exit_2_on_violation(self, tmp_path, monkeypatch):
        # a failed bound check maps to exit 2
        import pacsquares.cli as cli
        monkeypatch.setattr(cli, "gyenes_bound", lambda: 3.0)
        cfg = write(tmp_path, "unit.json", UNIT)
        assert run(["compute", "--in", cfg]) == 2

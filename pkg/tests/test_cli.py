import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from loewner_virasoro.cli import COMMANDS, SCHEMAS, ConfigError, run, validate
from loewner_virasoro.export import canonical_hash, csv_text, dumps

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return p


def artifacts(d):
    return sorted(p.name for p in Path(d).iterdir())


def test_witt_check_matrix_all_zero(tmp_path, capsys):
    assert run(["witt-check", "--n", "12", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "max_residual=0" in out
    (art,) = list(tmp_path.glob("witt-check-*.json"))
    data = json.loads(art.read_text())
    cells = [x for row in data["result"]["matrix"] for x in row if x is not None]
    assert len(cells) == 30 and all(x == 0 for x in cells)


def test_byte_identical_artifacts(tmp_path):
    cfg = write(tmp_path, "c.json", {"kappa": 2, "T": 0.05, "n_paths": 50, "seed": 3, "record_every": 10})
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["sle-sim", "--config", str(cfg), "--out", str(a), "--quiet"]) == 0
    assert run(["sle-sim", "--config", str(cfg), "--out", str(b), "--quiet", "--threads", "3"]) == 0
    assert artifacts(a) == artifacts(b)
    for name in artifacts(a):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_evolve_writes_json_and_csv(tmp_path):
    cfg = write(tmp_path, "c.json", {"driver": {"kind": "constant", "p": [1, 0.5]}, "n": 4,
                                      "dt": 0.01, "t_end": 1.0, "record_every": 10})
    assert run(["evolve", "--config", str(cfg), "--out", str(tmp_path / "o"), "--quiet"]) == 0
    names = artifacts(tmp_path / "o")
    assert [n.rsplit(".", 1)[1] for n in names] == ["csv", "json"]
    csv = (tmp_path / "o" / names[0]).read_bytes()
    assert b"\r" not in csv and csv.startswith(b"t,re_c1,im_c1")
    assert len(csv.decode().strip().splitlines()) == 12


def test_seed_override_changes_hash(tmp_path):
    cfg = write(tmp_path, "c.json", {"kappa": 2, "T": 0.01, "n_paths": 5})
    run(["sle-sim", "--config", str(cfg), "--out", str(tmp_path / "o"), "--quiet"])
    run(["sle-sim", "--config", str(cfg), "--out", str(tmp_path / "o"), "--quiet", "--seed", "9"])
    assert len(list((tmp_path / "o").glob("*.json"))) == 2


def _stderr_json(capsys):
    return json.loads(capsys.readouterr().err.strip())


def test_empty_config_field_diagnostics(tmp_path, capsys):
    cfg = write(tmp_path, "e.json", "")
    assert run(["sle-martingale", "--config", str(cfg), "--out", str(tmp_path)]) == 1
    err = _stderr_json(capsys)
    assert err["error"] == "validation"
    assert {f["field"] for f in err["fields"]} == {"kappa", "observable"}


@pytest.mark.parametrize("command", ["evolve", "conserve"])
def test_driver_required(tmp_path, capsys, command):
    cfg = write(tmp_path, "e.json", {})
    assert run([command, "--config", str(cfg), "--out", str(tmp_path)]) == 1
    assert [f["field"] for f in _stderr_json(capsys)["fields"]] == ["driver"]


def test_extra_field_rejected(tmp_path, capsys):
    cfg = write(tmp_path, "x.json", {"n": 4, "typo": 1})
    assert run(["witt-check", "--config", str(cfg), "--out", str(tmp_path)]) == 1
    err = _stderr_json(capsys)
    assert err["fields"][0]["field"] == "typo"


def test_type_errors_listed_field_by_field(tmp_path, capsys):
    cfg = write(tmp_path, "x.json", {"driver": {"kind": "constant", "p": [1]}, "n": -1, "dt": "fast"})
    assert run(["evolve", "--config", str(cfg), "--out", str(tmp_path)]) == 1
    assert {f["field"] for f in _stderr_json(capsys)["fields"]} == {"n", "dt"}


def test_inadmissible_driver_is_validation_error(tmp_path, capsys):
    cfg = write(tmp_path, "x.json", {"driver": {"kind": "constant", "p": [1, 3]}, "n": 2, "t_end": 0.1})
    assert run(["evolve", "--config", str(cfg), "--out", str(tmp_path)]) == 1
    assert "Re p" in _stderr_json(capsys)["message"]


def test_invalid_json(tmp_path, capsys):
    cfg = write(tmp_path, "x.json", "{not json")
    assert run(["witt-check", "--config", str(cfg), "--out", str(tmp_path)]) == 1


def test_missing_config_is_io_error(tmp_path, capsys):
    assert run(["witt-check", "--config", str(tmp_path / "none.json")]) == 3
    assert _stderr_json(capsys)["error"] == "io"


def test_unwritable_output_is_io_error(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert run(["witt-check", "--n", "3", "--out", str(blocker / "sub")]) == 3


def test_blowup_exit_code(tmp_path, capsys):
    cfg = write(tmp_path, "h.json", {"system": "hamiltonian", "variant": "printed", "t_end": 2.0,
                                      "random_c0": True, "seed": 1})
    assert run(["geodesic", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert _stderr_json(capsys)["error"] == "blow-up"


def test_override_not_in_schema(tmp_path, capsys):
    assert run(["witt-check", "--dt", "0.1", "--out", str(tmp_path)]) == 1


def test_every_schema_has_defaults_or_required():
    for command in COMMANDS:
        for name, field in SCHEMAS[command].items():
            assert field.required or field.default is not None or name in {
                "c0", "psibar", "psibar0", "u0", "limit_T", "limit_dt", "compare_dt", "kappa",
                "charge_table", "deterministic_check", "capacity_t"}


def test_validate_cross_checks():
    with pytest.raises(ConfigError):
        validate("build-lneg", {"n": 5, "depth": 5})
    with pytest.raises(ConfigError):
        validate("sle-martingale", {"kappa": 2, "observable": [[-1, 1]], "z0": [0, -1]})
    with pytest.raises(ConfigError):
        validate("evolve", {"driver": {"kind": "constant", "p": [1]}, "n": 3, "c0": [0, 0]})
    assert validate("conserve", {"driver": {"kind": "constant", "p": [1]}, "dt": 0.01})["compare_dt"] == 0.02


def test_hash_independent_of_key_order():
    assert canonical_hash({"a": 1, "b": [1.0, 2]}) == canonical_hash({"b": [1.0, 2], "a": 1})


def test_float_serialization_round_trips():
    x = 0.1 + 0.2
    assert float(json.loads(dumps({"x": x}))["x"]) == x
    assert dumps(math.nan).strip() == "NaN"
    assert csv_text(["a"], [[1 / 3]]) == "a\n0.33333333333333331\n"


@pytest.mark.parametrize("config", sorted(p.name for p in CONFIGS.glob("*.json")))
def test_shipped_configs_validate(config):
    command = {
        "c01": "witt-check", "c02": "duality-check", "c05": "conserve", "c06": "evolve", "c07": "build-lneg",
        "c08": "geodesic", "c09": "geodesic-const", "c10": "sle-sim", "c11": "sle-sim", "c12": "sle-martingale",
    }[config[:3]]
    validate(command, json.loads((CONFIGS / config).read_text()))


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "loewner_virasoro.cli", "witt-check", "--n", "4",
                        "--out", str(tmp_path), "--quiet"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == ""

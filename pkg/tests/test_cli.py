"""Tests for the command-line client: rendering, precedence, determinism."""

import json

import pytest

from nbbdlab import cli
from nbbdlab.zeros import load_bundled_table, write_zero_table


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    # ambient NBBDLAB_* variables would leak into precedence resolution
    import os
    for key in [k for k in os.environ if k.startswith("NBBDLAB_")]:
        monkeypatch.delenv(key)


def _run(capsys, argv) -> tuple[int, str, str]:
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_constants_csv_shape(capsys):
    code, out, err = _run(capsys, ["constants", "--empty-table"])
    assert code == 0 and err == ""
    lines = out.splitlines()
    # subcommand first, then the sorted parameter echo, then sorted
    # scalar outputs, then the header row and data
    assert lines[:4] == ["# subcommand=constants",
                         "# empty_table=true",
                         '# zeros="bundled"',
                         "# table_sums_skipped=true"]
    assert lines[4] == "quantity,value"
    assert lines[5].startswith("euler_gamma,0.5772156649015")


def test_json_rendering_is_canonical(capsys):
    code, out, _ = _run(capsys, ["gram", "--n-max", "3", "--format", "json"])
    assert code == 0
    payload = json.loads(out)
    assert payload["subcommand"] == "gram"
    # canonical form: re-serializing parsed output reproduces the bytes
    assert out == json.dumps(payload, sort_keys=True,
                             separators=(",", ":")) + "\n"


def test_rerun_is_byte_identical(capsys, tmp_path):
    argv = ["gram", "--n-max", "4", "--out", str(tmp_path / "a.csv")]
    assert cli.main(argv) == 0
    argv2 = ["gram", "--n-max", "4", "--out", str(tmp_path / "b.csv")]
    assert cli.main(argv2) == 0
    assert (tmp_path / "a.csv").read_bytes() == \
        (tmp_path / "b.csv").read_bytes()


def test_precedence_flags_env_config(capsys, tmp_path, monkeypatch):
    config = tmp_path / "nbbdlab.conf"
    config.write_text("# comment\nn-max = 3\nformat = json\n")

    # config alone supplies n_max and the format
    code, out, _ = _run(capsys, ["gram", "--config", str(config)])
    assert code == 0
    assert json.loads(out)["parameters"]["n_max"] == 3

    # environment overrides config
    monkeypatch.setenv("NBBDLAB_N_MAX", "5")
    code, out, _ = _run(capsys, ["gram", "--config", str(config)])
    assert json.loads(out)["parameters"]["n_max"] == 5

    # flags override environment
    code, out, _ = _run(capsys, ["gram", "--config", str(config),
                                 "--n-max", "2"])
    assert json.loads(out)["parameters"]["n_max"] == 2

    # the config path itself may come from the environment
    monkeypatch.delenv("NBBDLAB_N_MAX")
    monkeypatch.setenv("NBBDLAB_CONFIG", str(config))
    code, out, _ = _run(capsys, ["gram"])
    assert json.loads(out)["parameters"]["n_max"] == 3


def test_cache_hit_reproduces_bytes(capsys, tmp_path):
    cache = tmp_path / "cache"
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert cli.main(["gram", "--n-max", "4", "--cache-dir", str(cache),
                     "--out", str(a)]) == 0
    assert len(list(cache.glob("*.json"))) == 1
    assert cli.main(["gram", "--n-max", "4", "--cache-dir", str(cache),
                     "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_domain_error_exits_one(capsys):
    code, out, err = _run(capsys, ["criterion", "--n-values", "5",
                                   "--target", "model"])
    assert code == 1 and out == ""
    assert json.loads(err)["error"] == "ValueError"


def test_missing_required_exits_two(capsys):
    code, out, err = _run(capsys, ["criterion"])
    assert code == 2 and "--n-values" in err


def test_bad_config_line_exits_two(capsys, tmp_path):
    config = tmp_path / "bad.conf"
    config.write_text("tol 1e-9\n")
    code, _, err = _run(capsys, ["gram", "--n-max", "2",
                                 "--config", str(config)])
    assert code == 2 and "key=value" in err


def test_bad_choice_exits_two(capsys):
    code, _, err = _run(capsys, ["residues", "--n", "100", "--s", "1+1j",
                                 "--mode", "triplet"])
    assert code == 2 and "pair" in err


def test_criterion_csv_columns(capsys):
    code, out, _ = _run(capsys, ["criterion", "--n-values", "2,4"])
    assert code == 0
    data = [ln for ln in out.splitlines() if not ln.startswith("#")]
    assert data[0] == "N,value,value_log_n,tail_bound"
    assert len(data) == 3
    assert data[1].split(",")[0] == "2"


def test_lemma23_error_decreases_in_height(capsys):
    # the decomposition sharpens as the truncation height grows
    code, out, _ = _run(capsys, ["lemma23", "--n", "100", "--s-list",
                                 "0.45+3j", "--t-list", "500,2000",
                                 "--format", "json"])
    assert code == 0
    rows = json.loads(out)["outputs"]["rows"]
    assert rows[1]["abs_error"] < rows[0]["abs_error"]


def test_fit_defaults_to_json(capsys):
    grid = "100,126,159,200,251,316,398,501"
    code, out, _ = _run(capsys, ["fit", "--n-grid", grid, "--mode", "pair"])
    assert code == 0
    payload = json.loads(out)
    assert payload["outputs"]["fixed_frequency"]["frequency"] == 20.0
    assert "free_frequency" in payload["outputs"]


def test_zeros_ingest_rewrite(capsys, tmp_path):
    src = tmp_path / "head.txt"
    write_zero_table(src, load_bundled_table().gammas()[:25])
    rewritten = tmp_path / "canon.txt"
    code, out, _ = _run(capsys, ["zeros-ingest", "--zeros", str(src),
                                 "--rewrite", str(rewritten)])
    assert code == 0
    assert rewritten.is_file()
    assert "count,25.0" in out


def test_empty_table_env_boolean(capsys, monkeypatch):
    monkeypatch.setenv("NBBDLAB_EMPTY_TABLE", "yes")
    code, out, _ = _run(capsys, ["constants"])
    assert code == 0
    assert "zero_sum_value" not in out
    monkeypatch.setenv("NBBDLAB_EMPTY_TABLE", "maybe")
    code, _, err = _run(capsys, ["constants"])
    assert code == 2 and "boolean" in err

"""Tests for the deterministic results cache primitives."""

import json

import pytest

from nbbdlab.cache import (ResultsCache, RunRecord, canonical_json,
                           content_hash, run_key)


def _record(**overrides) -> RunRecord:
    base = dict(subcommand="gram",
                parameters={"n_max": 4, "tol": 1.0e-10},
                outputs={"columns": ["N"], "rows": [{"N": 1}]},
                wall_time_s=0.25, version="0.1.0", input_hash="")
    base.update(overrides)
    return RunRecord(**base)


def test_canonical_json_is_order_independent():
    # [TRIVIAL] equal dicts must give equal bytes regardless of insertion
    # order, else cache keys would depend on construction history
    a = canonical_json({"b": 1, "a": [1, 2], "c": {"y": 0, "x": None}})
    b = canonical_json({"c": {"x": None, "y": 0}, "a": [1, 2], "b": 1})
    assert a == b
    assert " " not in a


def test_canonical_json_rejects_nan():
    # the payload contract encodes undefined diagnostics as None; NaN
    # would serialize to non-standard JSON and break round trips
    with pytest.raises(ValueError):
        canonical_json({"x": float("nan")})
    with pytest.raises(ValueError):
        canonical_json({"x": float("inf")})


def test_content_hash_framing(tmp_path):
    # per-file length framing: ("ab","c") and ("a","bc") concatenate
    # identically but must hash differently
    files = {}
    for name, text in (("f1", "ab"), ("f2", "c"), ("f3", "a"), ("f4", "bc")):
        p = tmp_path / name
        p.write_text(text)
        files[name] = p
    assert content_hash([files["f1"], files["f2"]]) != \
        content_hash([files["f3"], files["f4"]])
    assert content_hash([files["f1"], files["f2"]]) != \
        content_hash([files["f2"], files["f1"]])
    assert content_hash([files["f1"]]) == content_hash([files["f1"]])
    assert content_hash([]) == ""
    assert content_hash(None) == ""
    assert content_hash([None]) == ""


def test_run_key_sensitivity():
    base = run_key("gram", {"n_max": 4}, "0.1.0", "")
    assert run_key("gram", {"n_max": 4}, "0.1.0", "") == base
    assert run_key("gram", {"n_max": 5}, "0.1.0", "") != base
    assert run_key("gram", {"n_max": 4}, "0.2.0", "") != base
    assert run_key("gram", {"n_max": 4}, "0.1.0", "abc") != base
    assert run_key("criterion", {"n_max": 4}, "0.1.0", "") != base


def test_record_key_and_output_hash():
    rec = _record()
    assert rec.key == run_key(rec.subcommand, rec.parameters, rec.version,
                              rec.input_hash)
    # wall time must stay out of both hashes
    assert _record(wall_time_s=9.0).key == rec.key
    assert _record(wall_time_s=9.0).output_hash == rec.output_hash
    assert _record(outputs={"columns": [], "rows": []}).output_hash \
        != rec.output_hash


def test_cache_disabled_when_root_none(tmp_path):
    cache = ResultsCache(None)
    cache.put(_record())
    assert cache.get(_record().key) is None


def test_cache_roundtrip(tmp_path):
    cache = ResultsCache(tmp_path / "cache")
    rec = _record()
    cache.put(rec)
    stored = cache.get(rec.key)
    assert stored["parameters"] == rec.parameters
    assert stored["outputs"] == rec.outputs
    assert stored["output_hash"] == rec.output_hash
    assert cache.get("0" * 64) is None
    # entries are valid canonical JSON on disk
    path = next((tmp_path / "cache").glob("*.json"))
    on_disk = path.read_text(encoding="utf-8")
    assert on_disk == canonical_json(json.loads(on_disk))


def test_cache_put_under_explicit_key(tmp_path):
    # drivers normalize parameters, so the lookup key (raw) can differ
    # from the record's own key (echoed); put must honor the explicit one
    cache = ResultsCache(tmp_path)
    rec = _record(parameters={"n_max": 4, "tol": 1.0e-10, "extra": "echoed"})
    lookup = run_key("gram", {"n_max": 4}, "0.1.0", "")
    cache.put(rec, key=lookup)
    assert cache.get(lookup)["parameters"] == rec.parameters
    assert cache.get(rec.key) is None

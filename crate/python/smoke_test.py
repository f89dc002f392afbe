# Copyright 2026 the Kolmoverify Authors
# SPDX-License-Identifier: Apache-2.0
"""Smoke test for the Python bindings. Run with pytest or directly."""

import math

import kolmoverify_py as kv


def test_complexity():
    assert kv.ukt("0110", 12) == math.inf
    k = kv.ukt("01", 12)
    assert 0 < k < math.inf
    assert kv.qukt("000", 16) > 0
    d = kv.universal_distribution(12, 2)
    assert abs(sum(d.values()) - 1.0) < 1e-12
    assert abs(-math.log2(d["01"]) - k) < 1e-9


def test_corpus_and_sampling():
    labels = kv.corpus_labels()
    assert "uniform4" in labels
    d = kv.distribution("uniform4")
    assert len(d) == 16
    assert kv.sample("uniform4", 50, seed=3) == kv.sample("uniform4", 50, seed=3)
    try:
        kv.distribution("no-such-label")
    except KeyError:
        pass
    else:
        raise AssertionError("unknown label should raise KeyError")


def test_verify():
    cfg = kv.ver_config(4, 1.0, 0.25)
    assert cfg["s"] == 2155
    honest = kv.verify(kv.sample("uniform4", cfg["s"], seed=1), "uniform4")
    assert honest["accepted"] is True
    fake = kv.verify(kv.sample("uniform4-prg1", cfg["s"], seed=1), "uniform4")
    assert fake["accepted"] is False
    try:
        kv.verify(kv.sample("uniform4", 10, seed=1), "uniform4")
    except ValueError as e:
        assert "arity" in str(e)
    else:
        raise AssertionError("short tuple should raise")


def test_experiment():
    assert "embedding" in kv.experiment_ids()
    r = kv.run_experiment("marginal", {"random_joints": 2}, seed=4)
    assert r["pass"] is True
    assert r["parameters"]["random_joints"] == 2
    assert kv.golden_check()["drift"] == []


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            fn()
            print("ok", name)

import json
import math

import numpy as np
import pytest

import ppress


def smooth(n=2000, f=4, seed=0):
    rng = np.random.default_rng(seed)
    t = np.arange(n)[:, None]
    return np.sin(t / (30.0 + 10 * np.arange(f))) * 10.0 ** np.arange(f) + 1e-3 * rng.standard_normal((n, f))


def test_rel_round_trip_respects_bound():
    x = smooth()
    blob = ppress.compress(x, "EBLC_PRED", "REL", 1e-4, names=["a", "b", "c", "d"])
    y, names = ppress.decompress(blob)
    assert names == ["a", "b", "c", "d"]
    assert y.shape == x.shape and y.dtype == np.float64
    ranges = x.max(axis=0) - x.min(axis=0)
    assert np.all(np.abs(x - y) <= 1e-4 * ranges)
    info = ppress.container_info(blob)
    assert info["method"] == "EBLC_PRED" and info["n_obs"] == 2000
    assert info["ratio"] > 1


def test_lossless_is_bit_exact_and_keeps_f32():
    x = smooth().astype(np.float32)
    y, _ = ppress.decompress(ppress.compress(x, "LOSSLESS"))
    assert y.dtype == np.float32
    assert x.tobytes() == y.tobytes()


def test_error_report_matches_numpy():
    x = smooth()
    y, _ = ppress.decompress(ppress.compress(x, "EBLC_PRED", "ABS", 1e-3))
    e = ppress.error_report(x, y)
    mse = float(np.mean((x - y) ** 2))
    assert e["max_abs_err"] == pytest.approx(np.max(np.abs(x - y)))
    assert e["mse"] == pytest.approx(mse, rel=1e-9)
    assert e["max_abs_err"] <= 1e-3


def test_column_stats():
    s = ppress.column_stats(np.array([[1.0, 2.0], [3.0, 2.0]]))
    assert s[0]["range"] == 2.0 and s[1]["zero_range"]


def test_pareto_front_against_brute_force():
    rng = np.random.default_rng(3)
    cr = rng.integers(1, 20, 300).astype(float)
    q = rng.integers(0, 20, 300).astype(float)
    idx = ppress.pareto_front(cr.tolist(), q.tolist())
    expect = set()
    for i in range(len(cr)):
        dominated = any(cr[j] >= cr[i] and q[j] >= q[i] and (cr[j] > cr[i] or q[j] > q[i]) for j in range(len(cr)))
        if not dominated:
            expect.add((cr[i], q[i]))
    assert {(cr[i], q[i]) for i in idx} == expect
    assert ppress.hypervolume([2.0], [1.0], 0.0, 0.0) == pytest.approx(2.0)


def test_transfer_model():
    thr = ppress.core_threshold(10.67, 0.21 * ppress.GB, 1 * ppress.GB)
    assert ppress.speedup(10.67, thr, 0.21 * ppress.GB, 1 * ppress.GB) == pytest.approx(1.0)
    assert ppress.min_cores(10.67, 0.21 * ppress.GB, 1 * ppress.GB) == math.floor(thr) + 1
    tu, tc = ppress.transfer_times(4e9, 1e9, 0.21e9, 6, 10.67)
    assert tu == pytest.approx(4.0)
    assert tc == pytest.approx(4e9 / (6 * 0.21e9) + 4e9 / (10.67e9))


def test_errors_map_to_exceptions(tmp_path):
    with pytest.raises(ppress.ConfigError):
        ppress.compress(smooth(), "EBLC_PRED", "REL", -1.0)
    blob = bytearray(ppress.compress(smooth(), "LOSSLESS"))
    blob[0] ^= 0xFF
    with pytest.raises(ppress.FormatError):
        ppress.decompress(bytes(blob))
    assert issubclass(ppress.FormatError, ppress.Error)
    with pytest.raises(ppress.InfeasibleError):
        ppress.min_cores(1.0, 1e9, 1e9)


def test_load_records(tmp_path):
    path = tmp_path / "none.jsonl"
    path.write_text("")
    assert ppress.load_records(str(path)) == []
    path.write_text("{not json}\n")
    with pytest.raises(ppress.DataError):
        ppress.load_records(str(path))

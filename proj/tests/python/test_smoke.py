"""Smoke tests for the Python bindings: each exposed surface gets a short
workout against a plain-Python mirror, and the typed exceptions map through."""

import bisect
import random

import pytest

import fingerdict as fd


def test_tail_dict_against_list_mirror():
    d = fd.TailFingerDict()
    rng = random.Random(7)
    keys = []
    k = 0
    for _ in range(5000):
        k += 1 + rng.randrange(1 << 16)
        assert d.insert_tail(k) == len(keys) + 1
        keys.append(k)
    assert len(d) == 5000
    assert d.validate()

    for _ in range(2000):
        f = 1 + rng.randrange(len(keys))
        s = rng.choice(keys) + rng.randrange(4)
        want = bisect.bisect_right(keys, s)  # 0 when below the minimum
        assert d.search_star(f, s) == want

    for _ in range(100):
        d.delete_tail()
        keys.pop()
    assert len(d) == 4900
    assert d.at(4900) == keys[-1]
    assert d.counted_cells() <= 8 * len(d)
    assert d.probe_count() > 0
    assert d.work_count() > 0

    with pytest.raises(fd.KeyNotGreaterThanMax):
        d.insert_tail(keys[-1])


def test_randomized_dict_handles_and_search():
    d = fd.RandomizedFingerDict(seed=42)
    h10 = d.insert_first(10)
    h30 = d.insert_at(h10, 30)
    h20 = d.insert_at(h10, 20)
    assert [d.key_of(h) for h in (h10, h20, h30)] == [10, 20, 30]
    assert len(d) == 3

    assert d.pred_search(h10, 25) == h20
    assert d.pred_search(h30, 5) == 0
    assert d.finger_search(h10, 30) == h30
    with pytest.raises(fd.KeyAbsent):
        d.finger_search(h10, 25)
    with pytest.raises(fd.DuplicateKey):
        d.insert_at(h10, 20)
    with pytest.raises(fd.KeyOutOfFingerRange):
        d.insert_at(h10, 99)

    d.delete_at(h20)
    assert not d.alive(h20)
    with pytest.raises(fd.StaleFinger):
        d.key_of(h20)

    # Handles stay valid through growth and its bucket maintenance.
    rng = random.Random(1)
    keys = sorted(rng.sample(range(100, 10**9), 4000))
    handles = {10: h10, 30: h30}
    ordered = [10, 30]
    for k in keys:
        i = bisect.bisect_left(ordered, k)
        pred = ordered[i - 1]
        handles[k] = d.insert_at(handles[pred], k)
        ordered.insert(i, k)
    assert len(d) == 2 + len(keys)
    assert d.validate()
    assert d.key_of(h10) == 10
    probe = rng.choice(keys)
    assert d.key_of(handles[probe]) == probe
    assert d.bucket_target() >= 8
    assert sum(d.bucket_sizes()) == len(d)


def test_oracle_dict_round_trip():
    d = fd.OracleDict.bulk_load([2, 4, 6, 8])
    pos, dist = d.finger_search(1, 7)
    assert (pos, dist) == (3, 2)
    assert d.insert(5) == 3
    assert d.keys() == [2, 4, 5, 6, 8]
    d.erase(5)
    with pytest.raises(fd.KeyAbsent):
        d.erase(5)
    with pytest.raises(fd.NotSorted):
        fd.OracleDict.bulk_load([3, 1])


def test_pebble_run_concentrate_is_pinned():
    worst, maxima = fd.pebble_run(n=256, c=4, rounds=500, adversary="concentrate", seed=3)
    assert worst == 4
    assert len(maxima) == 500
    assert max(maxima) == 4
    with pytest.raises(fd.InvalidSpec):
        fd.pebble_run(n=4, c=1, rounds=1, adversary="nobody")


def test_bench_pipeline_and_determinism():
    rows = fd.bench_rows("randomized", n=2048, ops=800, mix=(0.3, 0.2, 0.5),
                         dist="geometric:0.2", seed=5)
    assert 250 < len(rows) < 600
    for structure, n, d, probes, wall, kind in rows:
        assert structure == "randomized"
        assert n > 0 and probes > 0 and kind == "search"

    csv_a = fd.bench_csv("nested-bdt", n=1024, ops=300, mix=(0.4, 0.3, 0.3),
                         dist="fixed:16", seed=9)
    csv_b = fd.bench_csv("nested-bdt", n=1024, ops=300, mix=(0.4, 0.3, 0.3),
                         dist="fixed:16", seed=9)
    lines = csv_a.splitlines()
    assert lines[0] == "structure,n,d,probes,wall_nanos,op_kind"

    def mask(text):
        return [",".join(f for i, f in enumerate(l.split(",")) if i != 4)
                for l in text.splitlines()]

    assert mask(csv_a) == mask(csv_b)

    with pytest.raises(fd.InvalidSpec):
        fd.bench_csv("oracle", n=16, ops=1, mix=(0.5, 0.6, 0.2))
    with pytest.raises(fd.InvalidSpec):
        fd.bench_csv("btree", n=16, ops=1, mix=(0, 0, 1))


def test_replay_ops_lockstep():
    rows = fd.replay_ops("randomized", "A 10\nA 20\nI 10 15\nS 15 17\nD 15\nS 10 16\n")
    assert len(rows) == 2
    with pytest.raises(fd.InvalidSpec):
        fd.replay_ops("nested-bdt", "A 10\nI 10 15\n")
    with pytest.raises(fd.InvalidSpec):
        fd.replay_ops("oracle", "Q 1\n")

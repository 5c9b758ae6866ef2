"""Unit tests for the random family sampler and the containment sweep."""

import json
import math

import numpy as np
import pytest

from randposet.posets import (
    CapacityError,
    PosetError,
    antichain_poset,
    antichains,
    boolean_lattice,
    chain,
    layered,
    vee,
)
from randposet.simulate import (
    Sample,
    contains_pattern,
    copy_weighting,
    find_pattern,
    sample_pnp,
    sweep,
)


def hand_sample(words, n=8):
    return Sample(n=n, c=0.0, words=np.array(sorted(words), dtype=np.uint64))


def is_weak_image(pattern, image):
    """The found words honour every pattern relation as strict containment."""
    for i in range(pattern.n):
        for j in range(pattern.n):
            if pattern.lt(i, j):
                a, b = image[i], image[j]
                if a == b or a & ~b:
                    return False
    return True


# -- sampling -----------------------------------------------------------------


def test_sample_reproducible_by_seed():
    a = sample_pnp(12, 0.3, seed=5)
    b = sample_pnp(12, 0.3, seed=5)
    assert np.array_equal(a.words, b.words)
    assert a.n == 12 and a.c == 0.3


def test_sample_words_are_distinct_sorted_and_in_range():
    s = sample_pnp(10, 0.2, seed=1)
    assert s.words.dtype == np.uint64
    assert np.all(np.diff(s.words.astype(np.int64)) > 0)
    assert int(s.words.max()) < 1 << 10


def test_sample_at_zero_exponent_keeps_everything():
    s = sample_pnp(4, 0.0, seed=0)
    assert np.array_equal(s.words, np.arange(16, dtype=np.uint64))


def test_sample_guards():
    with pytest.raises(PosetError):
        sample_pnp(63, 0.5)
    with pytest.raises(CapacityError):
        sample_pnp(30, 0.0, budget=10 ** 6)


def test_sample_inclusion_probability():
    n, c, runs = 6, 0.2, 3000
    probe = 5
    p = math.exp(-c * n)
    rng = np.random.default_rng(123)
    hits = 0
    for _ in range(runs):
        s = sample_pnp(n, c, rng=rng)
        if probe in s.words:
            hits += 1
    sigma = math.sqrt(p * (1 - p) / runs)
    assert abs(hits / runs - p) < 4 * sigma


# -- pattern search -----------------------------------------------------------


def test_find_chain_fast_path():
    s = hand_sample([0b1, 0b11, 0b111])
    image = find_pattern(s, chain(3))
    assert image == (1, 3, 7)
    assert find_pattern(s, chain(4)) is None
    assert find_pattern(hand_sample([0b1, 0b10, 0b100]), chain(2)) is None


def test_find_chain_among_decoys():
    s = hand_sample([0b1, 0b110, 0b111, 0b1111])
    image = find_pattern(s, chain(3))
    assert image is not None and is_weak_image(chain(3), image)
    assert find_pattern(s, chain(4)) is None


def test_find_bottom_star_fast_path():
    s = hand_sample([0b001, 0b011, 0b101])
    image = find_pattern(s, layered([1, 2]))
    assert image is not None
    assert image[0] == 1
    assert is_weak_image(layered([1, 2]), image)
    assert find_pattern(hand_sample([0b001, 0b011]), layered([1, 2])) is None


def test_find_top_star_fast_path():
    s = hand_sample([0b011, 0b101, 0b111])
    image = find_pattern(s, layered([2, 1]))
    assert image is not None
    assert image[2] == 7
    assert is_weak_image(layered([2, 1]), image)


def test_find_general_pattern():
    s = hand_sample([0b001, 0b011, 0b101, 0b111])
    image = find_pattern(s, boolean_lattice(2))
    assert image is not None
    assert is_weak_image(boolean_lattice(2), image)
    assert contains_pattern(s, boolean_lattice(2))
    assert not contains_pattern(hand_sample([1, 2, 4, 8]), boolean_lattice(2))


def test_find_induced_pattern():
    assert find_pattern(hand_sample([0b01, 0b11]), antichain_poset(2), induced=True) is None
    got = find_pattern(hand_sample([0b01, 0b10]), antichain_poset(2), induced=True)
    assert got is not None


def test_find_pattern_capacity_guard():
    s = hand_sample([1, 3, 5, 7, 9])
    with pytest.raises(CapacityError):
        find_pattern(s, boolean_lattice(2), cap=3)


def test_find_pattern_small_sample_shortcut():
    assert find_pattern(hand_sample([1]), chain(2)) is None


# -- copy weightings -------------------------------------------------------------


def test_copy_weighting_of_collapsed_chain():
    family = antichains(chain(2))
    w = copy_weighting(chain(2), 2, (0, 3))
    assert w[family.position(1 << 1)] == pytest.approx(1.0)
    assert sum(w) == pytest.approx(1.0)


def test_copy_weighting_of_vee_copy():
    w = copy_weighting(vee(), 3, (0b001, 0b011, 0b101))
    assert sum(w) == pytest.approx(1.0)
    assert all(x >= 0 for x in w)


# -- sweeps -----------------------------------------------------------------------


def test_sweep_extreme_cells():
    report = sweep(chain(2), 10, [2.0, 0.1], trials=5, seed=0)
    assert [row["c"] for row in report.rows] == [0.1, 2.0]
    assert report.rows[0]["successes"] == 5
    assert report.rows[0]["p_hat"] == 1.0
    assert report.rows[1]["successes"] == 0
    assert len(report.cell_seconds) == 2


def test_sweep_deterministic_output():
    a = sweep(vee(), 9, [0.3, 0.5], trials=4, seed=7, pattern_name="V")
    b = sweep(vee(), 9, [0.3, 0.5], trials=4, seed=7, pattern_name="V")
    assert a.to_csv() == b.to_csv()
    assert a.to_json_dict() == b.to_json_dict()


def test_sweep_csv_shape():
    report = sweep(chain(2), 8, [0.2], trials=3, seed=1)
    lines = report.to_csv().strip().splitlines()
    assert lines[0] == "c,trials,successes,p_hat"
    assert len(lines) == 2
    c, trials, succ, p_hat = lines[1].split(",")
    assert float(c) == 0.2 and int(trials) == 3
    assert 0.0 <= float(p_hat) <= 1.0
    assert "cell_seconds" not in report.to_csv()
    assert "cell_seconds" not in json.dumps(report.to_json_dict())


def test_sweep_records_weightings():
    report = sweep(chain(2), 10, [0.1], trials=3, seed=2, record_weights=True)
    records = json.loads(report.weights_json())
    assert len(records) == 3
    for rec in records:
        assert set(rec) == {"c", "trial", "image", "weighting"}
        assert sum(rec["weighting"]) == pytest.approx(1.0)
        assert is_weak_image(chain(2), rec["image"])


def test_sweep_default_name_and_json_keys():
    report = sweep(chain(2), 8, [0.3], trials=2, seed=0)
    assert report.pattern_name
    assert set(report.to_json_dict()) == {"pattern", "n", "rows"}

"""Unit tests for the max-min exponent optimizer and its closed forms."""

import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from randposet.posets import (
    Poset,
    PosetError,
    antichains,
    boolean_lattice,
    chain,
    diamond,
    disjoint_union,
    double_diamond,
    layered,
    vee,
    wedge,
)
from randposet.threshold import (
    ExponentTable,
    antichain_symmetry_group,
    balanced_solve,
    binary_entropy,
    blowup_bounds,
    bounded_upper_bound,
    c_star,
    chain_threshold,
    classify,
    entropy,
    lift_bound,
    star_threshold,
    trivial_upper_bound,
    two_point_weighting,
    universality_band,
    wide_diamond_threshold,
)


def random_simplex(rng, m):
    a = np.array([rng.random() for _ in range(m)])
    return a / a.sum()


def random_poset(rng, n, density=0.35):
    relations = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                relations.append((i, j))
    return Poset(n, relations)


# -- entropy helpers -----------------------------------------------------------


def test_entropy_basics():
    assert entropy([0.5, 0.5]) == pytest.approx(math.log(2))
    assert entropy([1.0, 0.0]) == pytest.approx(0.0)
    assert binary_entropy(0.5) == pytest.approx(math.log(2))
    assert binary_entropy(0.0) == pytest.approx(0.0)


# -- closed forms ---------------------------------------------------------------


def test_star_threshold_frozen_values():
    x, c = star_threshold()
    assert x == pytest.approx(0.22709219521934826, abs=1e-12)
    assert c == pytest.approx(0.5357388657164854, abs=1e-12)
    assert abs((1 - x) * math.log(2) - binary_entropy(x)) < 1e-12
    assert c == pytest.approx(binary_entropy(x), abs=1e-15)


def test_wide_diamond_threshold_frozen_values():
    x, c = wide_diamond_threshold()
    assert x == pytest.approx(0.17705303871759684, abs=1e-12)
    assert c == pytest.approx(0.44769955136659917, abs=1e-12)
    assert abs(2 * (1 - 3 * x) * math.log(2) - binary_entropy(2 * x)) < 1e-12


def test_chain_threshold_formula():
    assert chain_threshold(1) == pytest.approx(math.log(2))
    assert chain_threshold(2) == pytest.approx(math.log(3) / 2)
    with pytest.raises(PosetError):
        chain_threshold(0)


def test_blowup_bounds_formula():
    lo, hi = blowup_bounds(1, 3)
    assert lo == pytest.approx(math.log(2)) and hi == pytest.approx(math.log(2))
    lo, hi = blowup_bounds(3, 2)
    assert lo == pytest.approx(math.log(2) / 3)
    assert hi == pytest.approx(lo + math.log(3 - 2 * 0.25) / 6)
    assert lo <= hi


def test_trivial_upper_bound_square():
    assert trivial_upper_bound(boolean_lattice(2)) == pytest.approx(math.log(6) / 4)


def test_universality_band_shape():
    lo, hi = universality_band(8)
    assert lo == pytest.approx(math.log(2) / 3)
    t = math.ceil(math.log(8))
    assert hi == pytest.approx(lo + math.log(3 - 2 * 2.0 ** (-t)) / (3 * t))
    lo2, hi2 = universality_band(10 ** 6)
    assert hi2 - lo2 < hi - lo
    with pytest.raises(PosetError):
        universality_band(1)


def test_lift_bound_tight_cases():
    star = star_threshold()[1]
    assert lift_bound(math.log(2), kind="bottom") == pytest.approx(star, abs=1e-12)
    wide = wide_diamond_threshold()[1]
    assert lift_bound(math.log(2), kind="bottom-top") == pytest.approx(wide, abs=1e-12)
    with pytest.raises(PosetError):
        lift_bound(math.log(2), kind="sideways")
    with pytest.raises(PosetError):
        lift_bound(2.0)


def test_lift_bound_accepts_posets():
    direct = lift_bound(c_star(chain(2)).value)
    via_poset = lift_bound(chain(2))
    assert direct == pytest.approx(via_poset, abs=1e-9)


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 9), st.integers(min_value=1, max_value=4))
def test_lift_bound_is_a_lower_bound(seed, n):
    rng = random.Random(seed)
    base = random_poset(rng, n)
    lifted = Poset(n + 1, [(i, j) for i in range(n) for j in range(n) if base.lt(i, j)]
                   + [(n, i) for i in range(n)])
    bound = lift_bound(c_star(base).value, kind="bottom")
    assert bound <= c_star(lifted).value + 1e-6


# -- the optimizer --------------------------------------------------------------


def test_cstar_chains_match_closed_form():
    for t in (1, 2, 3, 4):
        rep = c_star(chain(t))
        assert rep.value == pytest.approx(chain_threshold(t), abs=1e-7)
        assert rep.converged


def test_cstar_antichain_pair():
    assert c_star(layered([2])).value == pytest.approx(math.log(2), abs=1e-9)


def test_cstar_report_is_certified():
    rep = c_star(boolean_lattice(2))
    assert rep.lower_bound <= rep.value <= rep.upper_bound
    assert rep.upper_bound - rep.lower_bound <= 2e-6
    cert = np.asarray(rep.certificate)
    assert cert.min() >= 0
    assert cert.sum() == pytest.approx(1.0)
    table = ExponentTable.build(boolean_lattice(2))
    assert table.objective(cert) == pytest.approx(rep.lower_bound, abs=1e-12)
    active = rep.active_subposets
    assert len(active) == len(set(active))
    key = lambda q: tuple(i for i in range(16) if q >> i & 1)
    assert active == sorted(active, key=key)
    vals = table.values(cert)
    for q in active:
        assert vals[q - 1] <= vals.min() + 1e-3
    keys = set(rep.to_json_dict())
    assert keys == {"poset", "m", "value", "lower", "upper", "certificate",
                    "active", "class", "iterations", "tolerance"}


def test_cstar_star_matches_root_finder():
    assert c_star(vee()).value == pytest.approx(star_threshold()[1], abs=1e-7)
    assert c_star(wedge()).value == pytest.approx(star_threshold()[1], abs=1e-7)


def test_cstar_diamond_matches_root_finder():
    assert c_star(boolean_lattice(2)).value == pytest.approx(
        wide_diamond_threshold()[1], abs=1e-7
    )


def test_cstar_disconnected_takes_component_minimum():
    rep = c_star(disjoint_union(chain(3), chain(2)))
    assert rep.value == pytest.approx(c_star(chain(3)).value, abs=1e-9)
    rep = c_star(disjoint_union(vee(), chain(1)))
    assert rep.value == pytest.approx(c_star(vee()).value, abs=1e-9)


def test_cstar_below_generic_upper_bounds():
    for p in (boolean_lattice(2), double_diamond(), vee(), chain(3)):
        rep = c_star(p)
        assert rep.value <= trivial_upper_bound(p) + 1e-9
        if p.is_bounded() and p.n >= 2:
            assert rep.value <= bounded_upper_bound(p) + 1e-6


def test_disk_cache_roundtrip(tmp_path, monkeypatch):
    import randposet.threshold as threshold

    monkeypatch.setenv("RANDPOSET_CACHE_DIR", str(tmp_path))
    p = double_diamond()
    first = ExponentTable.build(p)
    cached = list(tmp_path.iterdir())
    assert cached

    def boom(*args, **kwargs):
        raise AssertionError("cache miss: shadow maps were rebuilt")

    monkeypatch.setattr(threshold, "ShadowMap", boom)
    second = ExponentTable.build(p)
    assert len(second.sigma_list) == len(first.sigma_list)
    for got, want in zip(second.sigma_list, first.sigma_list):
        assert np.array_equal(got, want)
    assert list(second.q_masks) == list(first.q_masks)


def test_objective_concavity():
    rng = random.Random(3)
    for p in (boolean_lattice(2), vee(), double_diamond()):
        table = ExponentTable.build(p)
        m = len(antichains(p))
        for _ in range(60):
            a = random_simplex(rng, m)
            b = random_simplex(rng, m)
            lam = rng.random()
            mix = lam * a + (1 - lam) * b
            assert table.objective(mix) >= (
                lam * table.objective(a) + (1 - lam) * table.objective(b) - 1e-9
            )


def test_objective_symmetry_invariance():
    rng = random.Random(11)
    for p in (boolean_lattice(2), double_diamond(), vee()):
        fam = antichains(p)
        table = ExponentTable.build(p, fam)
        group = antichain_symmetry_group(p, fam)
        assert len(group) >= 2
        for _ in range(50):
            a = random_simplex(rng, len(fam))
            g0 = table.objective(a)
            for perm in group:
                assert abs(table.objective(a[perm]) - g0) <= 1e-12


# -- balance equation ------------------------------------------------------------


def test_balanced_solve_diamond():
    sol = balanced_solve(boolean_lattice(2))
    assert sol.x_star == pytest.approx(0.1770530387, abs=1e-9)
    assert sol.c_value == pytest.approx(0.4476995514, abs=1e-9)
    w = sol.weighting
    assert w.sum() == pytest.approx(1.0)
    chain_side = entropy([sol.x_star, sol.x_star, 1 - 2 * sol.x_star]) / 2
    assert chain_side == pytest.approx(sol.c_value, abs=1e-12)


def test_balanced_solve_double_diamond():
    sol = balanced_solve(double_diamond())
    assert sol.x_star == pytest.approx(0.1329159960, abs=1e-9)
    assert sol.c_value == pytest.approx(0.3816648636, abs=1e-9)
    assert 1.0 / len(antichains(double_diamond())) <= sol.x_star <= 0.5


def test_balanced_solve_degenerate_chain():
    with pytest.raises(PosetError):
        balanced_solve(chain(2))


def test_balanced_solve_rejects_unbounded():
    with pytest.raises(PosetError):
        balanced_solve(vee())


def test_two_point_weighting_layout():
    fam = antichains(boolean_lattice(2))
    w = two_point_weighting(fam, 0.2)
    assert w[fam.position(0)] == pytest.approx(0.2)
    assert w[fam.position(1 << 0)] == pytest.approx(0.2)
    assert w.sum() == pytest.approx(1.0)
    assert np.count_nonzero(np.isclose(w, 0.15)) == 4


# -- classification ---------------------------------------------------------------


def test_classify_uniform_rows():
    for p in (chain(2), chain(3), layered([2, 2]), layered([2, 1, 2])):
        got = classify(p)
        assert got.label == "UniformlyBalanced"
        assert not got.violations
        m = len(antichains(p))
        assert got.details["uniform_value"] == pytest.approx(math.log(m) / p.n)


def test_classify_balanced_rows():
    for p, x in ((boolean_lattice(2), 0.1770530387), (double_diamond(), 0.1329159960)):
        got = classify(p)
        assert got.label == "Balanced"
        assert got.details["balanced_x"] == pytest.approx(x, abs=1e-9)


def test_classify_general_rows():
    got = classify(vee())
    assert got.label == "General"
    assert got.violations
    for mask, value, target in got.violations:
        assert value < target


def test_classify_large_boolean_lattice_is_not_uniform():
    got = classify(boolean_lattice(3))
    assert got.label == "Balanced"
    assert got.details["uniform_min"] < got.details["uniform_value"] - 1e-9
    assert got.details["balanced_value"] == pytest.approx(0.3635641159, abs=1e-9)


def test_certificate_matches_balanced_weighting():
    for p in (boolean_lattice(2), double_diamond()):
        rep = c_star(p)
        sol = balanced_solve(p)
        assert np.max(np.abs(np.asarray(rep.certificate) - sol.weighting)) <= 1e-4


import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pushpull import _metric_kernels as K
from pushpull.graph import RawEdges, build_graph
from pushpull.metrics import (
    PROFILE_FIELDS, GraphProfile, HardwareConfig, Level, Thresholds, classify_imbalance,
    classify_reuse, classify_volume, imbalance, kmeans2, neighbor_locality, profile, reuse,
    volume_kb, warp_max_degrees,
)
from pushpull.synth import clique_ring, random_graph, ring_lattice, star


L, M, H = Level.LOW, Level.MEDIUM, Level.HIGH


def counts_graph(n, e):
    # only |V| and |E| matter for volume
    return type("G", (), {"num_vertices": n, "num_edges": e})()


class TestVolume:
    @pytest.mark.parametrize("n,e,kb", [(410236, 6713648, 1855.178), (52652, 178076, 60.078)])
    def test_rows(self, n, e, kb):
        assert volume_kb(counts_graph(n, e)) == pytest.approx(kb, abs=0.01)

    def test_empty(self):
        assert volume_kb(counts_graph(0, 0)) == 0.0

    @pytest.mark.parametrize("kb,level", [(47.869, L), (60.078, M), (287.272, H), (48.0, M), (273.0, M)])
    def test_classes(self, kb, level):
        assert classify_volume(kb) is level

    def test_scaling(self):
        base = volume_kb(counts_graph(1000, 5000))
        assert volume_kb(counts_graph(2000, 10000)) == pytest.approx(2 * base)
        assert volume_kb(counts_graph(1000, 5000), HardwareConfig(num_sms=30)) == pytest.approx(base / 2)


class TestLocality:
    def test_path_small_blocks(self, path4):
        hw = HardwareConfig(warp_size=2, tb_size=2)
        assert neighbor_locality(path4, hw) == (1.0, 0.5)

    def test_empty(self):
        with pytest.raises(ValueError):
            neighbor_locality(build_graph(RawEdges.from_pairs([], 0)))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 600), st.integers(0, 3000), st.integers(0, 2**31))
    def test_sum_is_avg_degree(self, n, m, seed):
        g = random_graph(n, m, np.random.default_rng(seed))
        an_l, an_r = neighbor_locality(g)
        assert an_l + an_r == pytest.approx(g.num_edges / g.num_vertices, rel=1e-9, abs=1e-12)


class TestReuse:
    @pytest.mark.parametrize("an_l,an_r,avg,expected,tol", [
        (1.215, 2.167, 3.382, 0.359, 0.001),
        (2.616, 13.749, 16.265, 0.158, 0.003),
        (1.0, 0.5, 1.5, 0.6667, 1e-4),
    ])
    def test_formula(self, an_l, an_r, avg, expected, tol):
        assert reuse(an_l, an_r, avg) == pytest.approx(expected, abs=tol)

    def test_no_edges(self):
        assert reuse(0.0, 0.0, 0.0) == 0.0

    @given(st.floats(0.1, 100))
    def test_endpoints(self, d):
        assert reuse(d, 0.0, d) == 1.0
        assert reuse(0.0, d, d) == 0.0

    @given(st.floats(0.1, 100), st.floats(0, 1), st.floats(0, 1))
    def test_monotone_in_an_l(self, d, a, b):
        lo, hi = sorted((a * d, b * d))
        assert reuse(lo, d - lo, d) <= reuse(hi, d - hi, d)

    @pytest.mark.parametrize("r,level", [(0.053, L), (0.359, M), (0.445, H), (0.005, L)])
    def test_classes(self, r, level):
        assert classify_reuse(r) is level


def brute_kmeans(values):
    """Best 2-partition of sorted values by within-cluster sum of squares."""
    x = np.sort(np.asarray(values, dtype=float))
    best, cents = None, None
    for cut in range(1, len(x)):
        a, b = x[:cut], x[cut:]
        cost = ((a - a.mean()) ** 2).sum() + ((b - b.mean()) ** 2).sum()
        if best is None or cost < best - 1e-12:
            best, cents = cost, (a.mean(), b.mean())
    return cents if cents is not None else (x[0], x[0])


def lloyd_fixed_point(values, c):
    x = np.asarray(values, dtype=float)
    lo, hi = c
    low = np.abs(x - lo) <= np.abs(x - hi)
    new_lo = x[low].mean() if low.any() else lo
    new_hi = x[~low].mean() if (~low).any() else hi
    return np.isclose(new_lo, lo) and np.isclose(new_hi, hi)


class TestKmeans:
    @pytest.mark.parametrize("values,expected", [
        ([1, 50], (1, 50)), ([3, 3, 3], (3, 3)), ([1, 2, 10, 11], (1.5, 10.5)), ([7], (7, 7)),
    ])
    def test_examples(self, values, expected):
        assert kmeans2(values) == pytest.approx(expected)

    def test_empty(self):
        with pytest.raises(ValueError):
            kmeans2([])

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.integers(0, 60), min_size=1, max_size=12))
    def test_matches_brute_force_or_fixed_point(self, values):
        c = kmeans2(values)
        if len(set(values)) > 1:
            want = brute_kmeans(values)
            assert np.allclose(sorted(c), sorted(want)) or lloyd_fixed_point(values, c)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.integers(0, 500), min_size=1, max_size=64))
    def test_loop_matches_numpy(self, values):
        x = np.asarray(values, dtype=float)
        a = K.kmeans2_loop(x, 100)
        b = K.kmeans2_numpy(x, 100)
        assert np.allclose(a, b)


class TestImbalance:
    def degrees16(self):
        d = np.ones(16, dtype=np.int64)
        d[5] = 50
        return d

    def test_warp_maxima_example(self):
        wm = K.warp_maxima_loop(self.degrees16(), 4)
        assert wm.tolist() == [1, 50, 1, 1]
        assert K.warp_maxima_numpy(self.degrees16(), 4).tolist() == [1, 50, 1, 1]

    def test_partial_warp(self):
        deg = np.array([2, 2, 2, 2, 9], dtype=np.int64)
        assert K.warp_maxima_loop(deg, 4).tolist() == [2, 9]

    def test_warp_max_degrees_grouping(self):
        g = star(9)  # degrees [9, 1 x 9]
        hw = HardwareConfig(warp_size=4, tb_size=8)
        assert warp_max_degrees(g, hw) == [[9, 1], [1]]

    def test_marks(self):
        for fn in (K.imbalance_marks_loop, K.imbalance_marks_numpy):
            marked, blocks = fn(self.degrees16(), 4, 8, 10.0, 100)
            assert (marked, blocks) == (1, 2)

    def test_zero_degree(self):
        g = build_graph(RawEdges.from_pairs([], 40))
        assert all(m == 0 for blk in warp_max_degrees(g) for m in blk)
        assert imbalance(g) == 0.0

    def test_uniform(self):
        assert imbalance(ring_lattice(2048, 3)) == 0.0

    def test_star_hub_block(self):
        # only the hub's block mixes a huge and a tiny warp maximum
        g = star(1023)
        assert imbalance(g) == pytest.approx(1 / 4)

    @pytest.mark.parametrize("i,level", [(0.083, M), (0.617, H), (0.0, L)])
    def test_classes(self, i, level):
        assert classify_imbalance(i) is level

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 400), st.integers(0, 2000), st.integers(0, 2**31))
    def test_range(self, n, m, seed):
        assert 0.0 <= imbalance(random_graph(n, m, np.random.default_rng(seed))) <= 1.0

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.integers(0, 80), min_size=32, max_size=300), st.randoms(use_true_random=False))
    def test_within_warp_permutation(self, degrees, rnd):
        deg = np.asarray(degrees, dtype=np.int64)
        perm = deg.copy()
        for lo in range(0, len(perm), 32):
            chunk = list(perm[lo:lo + 32])
            rnd.shuffle(chunk)
            perm[lo:lo + 32] = chunk
        assert K.imbalance_marks_loop(deg, 32, 256, 10.0, 100) == K.imbalance_marks_loop(perm, 32, 256, 10.0, 100)


class TestProfile:
    def test_path(self, path4):
        p = profile(path4)
        assert p.volume_kb == pytest.approx(0.0026, abs=1e-4)
        assert p.volume_class is L
        assert list(p.to_dict()) == list(PROFILE_FIELDS)

    def test_csv(self, path4):
        text = profile(path4).to_csv()
        assert text.splitlines()[0] == ",".join(PROFILE_FIELDS)

    @pytest.mark.parametrize("g", [clique_ring(64, 32), star(4095), ring_lattice(4096, 2)], ids=str)
    def test_classes_consistent(self, g):
        p = profile(g)
        assert p.volume_class is classify_volume(p.volume_kb)
        assert p.reuse_class is classify_reuse(p.reuse)
        assert p.imbalance_class is classify_imbalance(p.imbalance)

    def test_clustered_ring(self):
        assert profile(clique_ring(64, 32)).classes == (L, H, L)

    def test_from_values(self):
        from pushpull.graph import DegreeStats
        p = GraphProfile.from_values(47.869, 4.697, 3.209, 0.617, DegreeStats(10, 7.906, 1.0))
        assert p.classes == (L, H, H)


@given(st.floats(0, 1e4), st.floats(0, 1e4))
def test_classifiers_monotone(a, b):
    lo, hi = sorted((a, b))
    assert classify_volume(lo) <= classify_volume(hi)
    assert classify_reuse(lo / 1e4) <= classify_reuse(hi / 1e4)
    assert classify_imbalance(lo / 1e4) <= classify_imbalance(hi / 1e4)


def test_config_validation():
    with pytest.raises(ValueError):
        HardwareConfig(tb_size=100)
    with pytest.raises(ValueError):
        HardwareConfig(num_sms=0)
    with pytest.raises(ValueError):
        Thresholds(reuse_low=0.5, reuse_high=0.4)
    with pytest.raises(ValueError):
        Thresholds(imb_low=0.3)


def test_level_parse():
    assert Level.parse("M") is M and Level.parse("high") is H
    with pytest.raises(ValueError):
        Level.parse("huge")

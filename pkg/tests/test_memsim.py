import json
import os
import subprocess
import sys
import textwrap

import numpy as np
import pytest

from pushpull.advisor import parse_config
from pushpull.kernels import AlgoParams, KernelSpecError, reference_result
from pushpull.memsim import (
    BREAKDOWN_HEADER, COUNTERS, SimConfigError, SimParams, breakdown_csv, default_config_set,
    litmus, simulate, sweep,
)
from pushpull.synth import clique_ring, random_graph, ring_lattice, star

from .conftest import graph_from

STATIC = ("TG0", "SG0", "SG1", "SGR", "SD0", "SD1", "SDR")
DYNAMIC = ("DG1", "DGR", "DD1", "DDR")


@pytest.fixture(scope="module")
def medium():
    return random_graph(700, 2500, np.random.default_rng(11))


class TestParams:
    def test_defaults(self):
        p = SimParams()
        assert (p.latency_l1_hit, p.latency_l2_hit, p.latency_remote_l1, p.latency_memory) == (1, 45, 59, 229)
        assert (p.l1_mshrs, p.store_buffer_entries, p.num_sms) == (128, 128, 15)
        assert p.to_dict()["l1_ways"] == 8

    @pytest.mark.parametrize("field", ["l1_mshrs", "store_buffer_entries", "l2_banks", "latency_l1_hit"])
    def test_zero_resource(self, field):
        with pytest.raises(SimConfigError):
            SimParams(**{field: 0})

    def test_latency_order(self):
        with pytest.raises(SimConfigError):
            SimParams(latency_l2_hit=300)

    def test_line_divisible(self):
        with pytest.raises(SimConfigError):
            SimParams(cache_line_bytes=66)


class TestFunctional:
    @pytest.mark.parametrize("code", STATIC)
    def test_sssp_triangle(self, tri, code):
        r = simulate(tri, "SSSP", code)
        assert r.functional_result.tolist() == [0.0, 3.0, 2.0]
        assert r.conserved()

    @pytest.mark.parametrize("code", ["SG1", "SGR"])
    def test_pr_path(self, path4, code):
        r = simulate(path4, "PR", code)
        assert np.allclose(r.functional_result, reference_result(path4, "PR"), rtol=0, atol=1e-9)
        assert r.conserved()

    @pytest.mark.parametrize("code", DYNAMIC)
    def test_cc_pairs(self, two_pairs, code):
        assert simulate(two_pairs, "CC", code).functional_result.tolist() == [0, 0, 2, 2]

    @pytest.mark.parametrize("algo,codes", [("PR", STATIC), ("SSSP", STATIC), ("CC", DYNAMIC)])
    def test_all_configs_agree(self, medium, algo, codes):
        ref = reference_result(medium, algo)
        for c in codes:
            r = simulate(medium, algo, c)
            if algo == "PR":
                assert np.allclose(r.functional_result, ref, rtol=0, atol=1e-9), c
            else:
                assert np.array_equal(r.functional_result, ref), c
            assert r.conserved(), c
            assert r.stale_reads == 0, c

    def test_source_param(self, medium):
        ap = AlgoParams(source=17)
        r = simulate(medium, "SSSP", "SD1", algo_params=ap)
        assert np.array_equal(r.functional_result, reference_result(medium, "SSSP", ap))

    def test_empty(self):
        g = graph_from([], 0)
        r = simulate(g, "PR", "SGR")
        assert r.total_cycles == 0 and r.functional_result.size == 0 and r.conserved()

    def test_errors(self, tri):
        with pytest.raises(KernelSpecError):
            simulate(tri, "CC", "TG0")
        with pytest.raises(KernelSpecError):
            simulate(tri, "PR", "DD1")
        with pytest.raises(KernelSpecError):
            simulate(tri, "MIS", "TG0")
        with pytest.raises(ValueError):
            simulate(tri, "SSSP", "TG0", algo_params=AlgoParams(source=9))


class TestTiming:
    def test_deterministic(self, medium):
        a = simulate(medium, "PR", "SDR")
        b = simulate(medium, "PR", "SDR")
        assert a.identical(b)

    def test_launches(self, path4):
        push = simulate(path4, "PR", "SG1")
        pull = simulate(path4, "PR", "TG0")
        assert push.iterations == pull.iterations
        assert push.kernel_launches == 2 * push.iterations
        assert pull.kernel_launches == pull.iterations
        assert sum(push.launch_cycles) == push.total_cycles

    @pytest.mark.parametrize("code", STATIC + DYNAMIC)
    def test_protocol_counters(self, medium, code):
        algo = "CC" if code[0] == "D" else "PR"
        r = simulate(medium, algo, code)
        if code[1] == "G":
            assert r.atomics_at_l1 == 0 and r.ownership_registrations == 0 and r.remote_l1_transfers == 0
        elif code[0] in "SD":
            assert r.ownership_registrations > 0
        if code[0] == "T":
            assert r.atomics_at_l1 == 0 and r.atomics_at_l2 == 0
        else:
            assert r.atomics_at_l1 + r.atomics_at_l2 > 0
        assert all(v >= 0 for v in r.counters.values())

    def test_drf0_invalidates_per_atomic(self, medium):
        d0 = simulate(medium, "PR", "SG0")
        d1 = simulate(medium, "PR", "SG1")
        assert d0.lines_self_invalidated > d1.lines_self_invalidated

    def test_star_relaxed_atomics(self):
        g = star(1023)
        ap = AlgoParams(max_iters=3)
        rlx = simulate(g, "PR", "SGR", algo_params=ap)
        d1 = simulate(g, "PR", "SG1", algo_params=ap)
        assert rlx.total_cycles < d1.total_cycles
        assert rlx.sync < d1.sync


class TestLitmus:
    @pytest.mark.parametrize("code", ["SG0", "SG1", "SGR", "SD0", "SD1", "SDR", "TG0", "DD1"])
    def test_visibility(self, code):
        res = litmus(code)
        assert res.stale_reads == 0 and res.values_ok

    @pytest.mark.parametrize("code", ["SG1", "TG0"])
    def test_negative_control(self, code):
        # values stay exact (functional semantics are timing-free); the version checker flags the hazard
        res = litmus(code, SimParams(acquire_invalidate=False))
        assert res.stale_reads > 0 and res.values_ok


# synthetic push-atomic-bound suite on which relaxation must never hurt
SUITE = [
    star(1023), star(2047), star(4095),
    clique_ring(64, 32), clique_ring(128, 16), clique_ring(512, 8),
    ring_lattice(2048, 2), ring_lattice(2048, 4), ring_lattice(4096, 2), ring_lattice(4096, 4),
]


@pytest.mark.slow
@pytest.mark.parametrize("g", SUITE, ids=lambda g: g.name)
@pytest.mark.parametrize("coh", ["G", "D"])
def test_relaxation_monotone(g, coh):
    c0, c1, cr = (simulate(g, "PR", f"S{coh}{m}").total_cycles for m in "01R")
    assert cr <= c1 <= c0


class TestSweep:
    def test_default_sets(self):
        assert [c.code() for c in default_config_set("PR")] == ["TG0", "SG1", "SGR", "SD1", "SDR"]
        assert [c.code() for c in default_config_set("cc")] == ["DG1", "DGR", "DD1", "DDR"]
        assert len(default_config_set("MIS")) == 5
        with pytest.raises(KeyError):
            default_config_set("NOPE")

    def test_sorted(self, medium):
        reps = sweep(medium, "PR")
        keys = [(r.total_cycles, r.config) for r in reps]
        assert keys == sorted(keys) and len(reps) == 5

    def test_singleton(self, medium):
        (only,) = sweep(medium, "SSSP", [parse_config("SD1")])
        assert only.identical(simulate(medium, "SSSP", "SD1"))

    def test_parallel_same_order(self, medium):
        a = sweep(medium, "CC", workers=1)
        b = sweep(medium, "CC", workers=3)
        assert [r.to_dict() for r in a] == [r.to_dict() for r in b]

    def test_incompatible(self, medium):
        with pytest.raises(KernelSpecError):
            sweep(medium, "CC", ["TG0"])


class TestReport:
    def test_json_fields(self, tri):
        d = json.loads(simulate(tri, "SSSP", "SGR").to_json())
        for k in ("config", "algorithm", "total_cycles", "kernel_launches", "functional_result") + COUNTERS:
            assert k in d
        assert d["functional_result"] == [0.0, 3.0, 2.0]
        assert len(d["per_sm"]) == 15

    def test_csv(self, tri):
        text = breakdown_csv([simulate(tri, "SSSP", c) for c in ("SG1", "TG0")])
        lines = text.splitlines()
        assert lines[0] == ",".join(BREAKDOWN_HEADER) == "config,total_cycles,busy,comp,data,sync,idle"
        assert len(lines) == 3

    def test_attribute_access(self, tri):
        r = simulate(tri, "SSSP", "SD1")
        assert r.busy == r.breakdown["busy"]
        with pytest.raises(AttributeError):
            r.nonexistent


FALLBACK_SCRIPT = textwrap.dedent("""
    import json
    import numpy as np
    from pushpull import _jit
    from pushpull.memsim import simulate
    from pushpull.metrics import profile
    from pushpull.synth import random_graph
    g = random_graph(300, 900, np.random.default_rng(1))
    out = {"numba": _jit.USE_NUMBA, "profile": profile(g).to_dict()}
    for algo, code in (("PR", "SGR"), ("PR", "TG0"), ("SSSP", "SD1"), ("CC", "DDR")):
        out[algo + code] = simulate(g, algo, code).to_dict()
    print(json.dumps(out))
""")


def run_script(disable: bool) -> dict:
    env = dict(os.environ)
    env.pop("PUSHPULL_DISABLE_NUMBA", None)
    if disable:
        env["PUSHPULL_DISABLE_NUMBA"] = "1"
    out = subprocess.run([sys.executable, "-c", FALLBACK_SCRIPT], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def test_fallback_matches_compiled():
    fast, slow = run_script(False), run_script(True)
    assert fast.pop("numba") is True and slow.pop("numba") is False
    assert fast == slow

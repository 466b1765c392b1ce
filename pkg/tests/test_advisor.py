import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pushpull.advisor import (
    ALL_CONFIGS, AlgoProps, Coherence, ConfigCodeError, Consistency, DesignSpace, Direction,
    InvalidPropsError, Side, SystemConfig, Traversal, algo_properties, explain_full,
    load_registry, parse_config, predict, predict_full, predict_partial, predict_table,
)
from pushpull.graph import DegreeStats
from pushpull.metrics import GraphProfile, Level

from .reference_data import ALGOS, DESIGNS, graph_profile, profiles

SIDES = (Side.SOURCE, Side.TARGET, Side.SYMMETRIC)
STATIC_PROPS = [AlgoProps(Traversal.STATIC, c, i) for c in SIDES for i in SIDES]
DYNAMIC = AlgoProps(Traversal.DYNAMIC, Side.NOT_APPLICABLE, Side.NOT_APPLICABLE)

# raw values sitting inside each class band, used to synthesize profiles
VOL = {Level.LOW: 10.0, Level.MEDIUM: 100.0, Level.HIGH: 1000.0}
REUSE_AN_L = {Level.LOW: 0.05, Level.MEDIUM: 0.3, Level.HIGH: 0.8}
IMB = {Level.LOW: 0.0, Level.MEDIUM: 0.1, Level.HIGH: 0.5}


def synth_profile(v, r, i, scale=1.0) -> GraphProfile:
    an_l = REUSE_AN_L[r] * scale
    return GraphProfile.from_values(VOL[v], an_l, scale - an_l, IMB[i], DegreeStats(1, scale, 0.0))


LEVEL_COMBOS = list(itertools.product(Level, Level, Level))


def valid(cfg: SystemConfig, space: DesignSpace = DesignSpace()) -> bool:
    if cfg.direction is Direction.PULL:
        return (cfg.coherence, cfg.consistency) == (Coherence.GPU, Consistency.DRF0)
    if cfg.direction is Direction.DYNAMIC:
        return (cfg.coherence, cfg.consistency) == (Coherence.DENOVO, Consistency.DRF1)
    allowed = {Consistency.DRF1, Consistency.DRFRLX} if space.allow_drfrlx else {Consistency.DRF1}
    return cfg.consistency in allowed


class TestRegistry:
    def test_ids(self):
        assert tuple(load_registry()) == ALGOS

    @pytest.mark.parametrize("algo,props", [
        ("SSSP", (Traversal.STATIC, Side.SOURCE, Side.SOURCE)),
        ("CC", (Traversal.DYNAMIC, Side.NOT_APPLICABLE, Side.NOT_APPLICABLE)),
        ("CLR", (Traversal.STATIC, Side.SYMMETRIC, Side.TARGET)),
        ("mis", (Traversal.STATIC, Side.SYMMETRIC, Side.SYMMETRIC)),
    ])
    def test_lookup(self, algo, props):
        p = algo_properties(algo)
        assert (p.traversal, p.control, p.information) == props

    def test_unknown(self):
        with pytest.raises(KeyError, match="PR,SSSP,MIS,CLR,BC,CC"):
            algo_properties("NOPE")

    def test_custom_file(self, tmp_path):
        f = tmp_path / "algos.json"
        f.write_text('[{"id": "TRI", "traversal": "Static", "control": "Target", "information": "Symmetric"}]')
        assert load_registry(f)["TRI"].control is Side.TARGET

    def test_invalid_props(self):
        with pytest.raises(InvalidPropsError):
            AlgoProps(Traversal.DYNAMIC, Side.SOURCE, Side.NOT_APPLICABLE)
        with pytest.raises(InvalidPropsError):
            predict_full(AlgoProps(Traversal.STATIC, Side.NOT_APPLICABLE, Side.SOURCE), synth_profile(*LEVEL_COMBOS[0]))


class TestCodes:
    @pytest.mark.parametrize("cfg,code", [
        (SystemConfig(Direction.PUSH, Coherence.GPU, Consistency.DRFRLX), "SGR"),
        (SystemConfig(Direction.PULL, Coherence.GPU, Consistency.DRF0), "TG0"),
        (SystemConfig(Direction.DYNAMIC, Coherence.DENOVO, Consistency.DRF1), "DD1"),
    ])
    def test_roundtrip(self, cfg, code):
        assert cfg.code() == code
        assert parse_config(code) == cfg
        assert parse_config(code.lower()) == cfg

    @pytest.mark.parametrize("code", ["", "SG", "SGRX", "XG1", "SX1", "SG2"])
    def test_bad(self, code):
        with pytest.raises(ConfigCodeError):
            parse_config(code)

    def test_all_configs(self):
        assert len(ALL_CONFIGS) == 18  # 3 directions x 2 protocols x 3 models
        assert len({c.code() for c in ALL_CONFIGS}) == 18


class TestGolden:
    def test_table(self):
        got = predict_table(profiles(), ALGOS)
        assert {g: tuple(row[a] for a in ALGOS) for g, row in got.items()} == DESIGNS

    @pytest.mark.parametrize("algo,graph,code", [("PR", "AMZ", "SGR"), ("MIS", "OLS", "TG0"), ("SSSP", "RAJ", "SDR")])
    def test_examples(self, algo, graph, code):
        assert predict_full(algo_properties(algo), graph_profile(graph)).code() == code

    @pytest.mark.parametrize("algo,graph,code", [("MIS", "RAJ", "TG0"), ("SSSP", "RAJ", "SD1"), ("PR", "AMZ", "SG1")])
    def test_partial(self, algo, graph, code):
        cfg = predict_partial(algo_properties(algo), graph_profile(graph), DesignSpace(allow_drfrlx=False))
        assert cfg.code() == code

    def test_single_cell(self):
        t = predict_table({"RAJ": graph_profile("RAJ")}, ["BC"])
        assert t == {"RAJ": {"BC": "SDR"}}

    def test_predict_record(self):
        rec = predict("mis", graph_profile("OLS"), graph="OLS")
        assert rec["code"] == "TG0" and rec["algorithm"] == "MIS" and rec["graph"] == "OLS"
        assert rec["rationale"] and rec["rationale"][0].startswith("pull")


@pytest.mark.parametrize("levels", LEVEL_COMBOS, ids=lambda lv: "".join(x.short for x in lv))
def test_exhaustive(levels):
    prof = synth_profile(*levels)
    assert prof.classes == levels
    for props in STATIC_PROPS + [DYNAMIC]:
        full = predict_full(props, prof)
        assert predict_partial(props, prof, DesignSpace(True)) == full
        assert valid(full)
        part = predict_partial(props, prof, DesignSpace(False))
        assert valid(part, DesignSpace(False))
        if props.control is Side.SOURCE:
            assert full.direction is Direction.PUSH and part.direction is Direction.PUSH
        if part.direction is Direction.PUSH:
            assert full.direction is Direction.PUSH
        if full.direction is Direction.PUSH and part.direction is Direction.PUSH:
            assert full.coherence is part.coherence


@pytest.mark.parametrize("props", STATIC_PROPS, ids=lambda p: f"{p.control.value}-{p.information.value}")
@pytest.mark.parametrize("v,r", list(itertools.product(Level, Level)))
def test_imbalance_never_demotes_relaxed(props, v, r):
    med = predict_full(props, synth_profile(v, r, Level.MEDIUM))
    high = predict_full(props, synth_profile(v, r, Level.HIGH))
    if med.direction is Direction.PUSH and med.consistency is Consistency.DRFRLX:
        assert high.consistency is Consistency.DRFRLX


@pytest.mark.parametrize("props", STATIC_PROPS, ids=lambda p: f"{p.control.value}-{p.information.value}")
@pytest.mark.parametrize("v,i", [(v, i) for v in (Level.LOW, Level.MEDIUM) for i in Level])
def test_reuse_never_demotes_denovo(props, v, i):
    cohs = [predict_full(props, synth_profile(v, r, i)) for r in Level]
    for lo, hi in zip(cohs, cohs[1:]):
        if lo.direction is Direction.PUSH and hi.direction is Direction.PUSH and lo.coherence is Coherence.DENOVO:
            assert hi.coherence is Coherence.DENOVO


@given(st.sampled_from(LEVEL_COMBOS), st.sampled_from(STATIC_PROPS), st.floats(0.5, 40))
def test_raw_scale_invariance(levels, props, scale):
    assert predict_full(props, synth_profile(*levels, scale=scale)) == predict_full(props, synth_profile(*levels))


def test_rationale_names_rules():
    cfg, why = explain_full(algo_properties("PR"), graph_profile("AMZ"))
    assert cfg.code() == "SGR"
    assert why == ["push: information hoisted at source", "coherence GPU: medium reuse", "consistency DRFrlx: high volume"]

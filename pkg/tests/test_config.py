import pytest

from pushpull.config import ConfigFileError, load_hardware, load_sim_params, load_thresholds


def test_defaults():
    assert load_hardware().num_sms == 15
    assert load_thresholds().reuse_high == 0.40
    assert load_sim_params().latency_memory == 229


def test_overrides(tmp_path):
    f = tmp_path / "hw.txt"
    f.write_text("# machine\nnum_sms = 30\ntb_size = 128  ; smaller blocks\nreuse_high = 0.5\n")
    assert load_hardware(f).num_sms == 30
    assert load_hardware(f).tb_size == 128
    assert load_thresholds(f).reuse_high == 0.5


def test_sim_params_layering(tmp_path):
    hw = tmp_path / "hw.txt"
    hw.write_text("num_sms = 4\nlatency_l2_hit = 40\n")
    sim = tmp_path / "sim.txt"
    sim.write_text("latency_l2_hit = 50\nacquire_invalidate = false\n")
    p = load_sim_params(sim, hw)
    assert (p.num_sms, p.latency_l2_hit, p.acquire_invalidate) == (4, 50, False)


@pytest.mark.parametrize("text,match", [
    ("num_smz = 3\n", "unknown keys"),
    ("num_sms = lots\n", "invalid value"),
    ("num_sms = 0\n", "positive"),
    ("acquire_invalidate = maybe\n", "invalid value"),
])
def test_errors(tmp_path, text, match):
    f = tmp_path / "bad.txt"
    f.write_text(text)
    with pytest.raises(ConfigFileError, match=match):
        load_sim_params(f)


def test_missing(tmp_path):
    with pytest.raises(ConfigFileError, match="cannot open"):
        load_hardware(tmp_path / "nope.txt")

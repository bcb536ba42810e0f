"""Command line interface and config file handling."""

import dataclasses
import json

import pytest

from qsdc.cli import EXIT_IO, EXIT_OK, EXIT_SECURITY, main
from qsdc.config_io import load_config, parse_config, render_config, save_config
from qsdc.protocol import CodeParams, ProtocolConfig, nominal_config
from qsdc.states import ChannelParams

FAST_INI = """\
[code]
l = 256
k_u = 128
k_r = 32
n_spread = 8
seed = 99

[protocol]
block_pulses = 2048
e_margin = 0.12

[check_channel]
loss_db = 5.0
flip_prob = 0.0

[data_channel]
loss_db = 5.0
flip_prob = 0.006
"""


def _parse_kv(output: str) -> dict:
    out = {}
    for line in output.strip().split("\n"):
        key, _, value = line.partition(" ")
        out[key] = value
    return out


def test_capacity_outputs_rates(capsys):
    rc = main(["capacity", "--q-bob", "0.003"])
    assert rc == EXIT_OK
    kv = _parse_kv(capsys.readouterr().out)
    assert float(kv["c_s"]) == pytest.approx(1.9286356483e-3, rel=1e-6)
    assert float(kv["i_ae"]) == pytest.approx(9.1261911064e-4, rel=1e-6)
    assert kv["secure"] == "yes"


def test_capacity_accepts_loss_db(capsys):
    rc = main(["capacity", "--loss-db", "25.1"])
    assert rc == EXIT_OK
    kv = _parse_kv(capsys.readouterr().out)
    assert float(kv["q_bob"]) == pytest.approx(10**-2.51, rel=1e-6)


def test_capacity_insecure_point(capsys):
    rc = main(["capacity", "--q-bob", "0.003", "--e-x", "0.2", "--e-z", "0.2"])
    assert rc == EXIT_OK
    kv = _parse_kv(capsys.readouterr().out)
    assert kv["secure"] == "no"
    assert float(kv["c_s"]) < 0


def test_sweep_stdout(capsys):
    rc = main(["sweep", "--loss-start", "5", "--loss-stop", "10", "--loss-step", "1"])
    assert rc == EXIT_OK
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == "loss_db,q_bob,i_ab,i_ae,c_s"
    assert len(lines) == 7


def test_sweep_to_file(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    rc = main(["sweep", "--loss-start", "5", "--loss-stop", "6", "--loss-step", "1",
               "--output", str(out)])
    assert rc == EXIT_OK
    assert out.read_text().startswith("loss_db,")


def test_stability_csv(tmp_path, capsys):
    cfg = tmp_path / "fast.ini"
    cfg.write_text(FAST_INI)
    out = tmp_path / "rows.csv"
    rc = main(["stability", "--config", str(cfg), "--blocks", "3", "--seed", "2",
               "--output", str(out)])
    assert rc == EXIT_OK
    lines = out.read_text().strip().split("\n")
    assert lines[0].startswith("block,attempt,e_x,e_z,e,")
    assert len(lines) >= 4
    err = capsys.readouterr().err
    assert "mean_e" in err


def test_send_roundtrip(tmp_path, capsys):
    cfg = tmp_path / "fast.ini"
    cfg.write_text(FAST_INI)
    src = tmp_path / "in.bin"
    src.write_bytes(b"cli payload" * 5)
    dst = tmp_path / "out.bin"
    rc = main(["send", "--config", str(cfg), "--input", str(src), "--output", str(dst),
               "--seed", "4"])
    assert rc == EXIT_OK
    assert dst.read_bytes() == src.read_bytes()
    report = json.loads(capsys.readouterr().out)
    assert report["byte_identical"]


def test_send_attack_exit_code(tmp_path, capsys):
    cfg = tmp_path / "fast.ini"
    cfg.write_text(FAST_INI)
    src = tmp_path / "in.bin"
    src.write_bytes(b"abc")
    dst = tmp_path / "out.bin"
    rc = main(["send", "--config", str(cfg), "--input", str(src), "--output", str(dst),
               "--attack", "intercept-resend", "--attack-fraction", "1.0"])
    assert rc == EXIT_SECURITY
    report = json.loads(capsys.readouterr().out)
    assert report["security_abort"]


def test_send_missing_input_is_io_error(tmp_path, capsys):
    rc = main(["send", "--input", str(tmp_path / "nope.bin"),
               "--output", str(tmp_path / "o.bin")])
    assert rc == EXIT_IO
    assert "error:" in capsys.readouterr().err


def test_send_report_file(tmp_path, capsys):
    cfg = tmp_path / "fast.ini"
    cfg.write_text(FAST_INI)
    src = tmp_path / "in.bin"
    src.write_bytes(b"x")
    rep = tmp_path / "report.json"
    rc = main(["send", "--config", str(cfg), "--input", str(src),
               "--output", str(tmp_path / "o.bin"), "--report", str(rep)])
    assert rc == EXIT_OK
    assert json.loads(rep.read_text())["byte_identical"]


def test_config_roundtrip(tmp_path):
    config = ProtocolConfig(
        code=CodeParams(l=512, k_u=256, k_r=64, n_spread=16, seed=8),
        block_pulses=16 * 512,
        check_fraction=0.2,
        confidence_delta=1e-6,
        check_channel=ChannelParams(7.0, 0.001),
    )
    path = tmp_path / "cfg.ini"
    save_config(config, path)
    assert load_config(path) == config


def test_config_defaults_for_missing_sections():
    assert parse_config("") == nominal_config()
    partial = parse_config("[data_channel]\nloss_db = 12\nflip_prob = 0.01\n")
    assert partial.data_channel == ChannelParams(12.0, 0.01)
    assert partial.code == nominal_config().code


def test_config_unknown_key_rejected():
    with pytest.raises(ValueError):
        parse_config("[protocol]\nblok_pulses = 10\n")
    with pytest.raises(ValueError):
        parse_config("[codes]\nl = 10\n")


def test_config_confidence_delta_none_roundtrip():
    cfg = nominal_config()
    assert cfg.confidence_delta is None
    assert parse_config(render_config(cfg)) == cfg


def test_bad_config_is_io_error(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[protocol]\nnot_a_key = 3\n")
    rc = main(["stability", "--config", str(cfg), "--blocks", "1"])
    assert rc == EXIT_IO

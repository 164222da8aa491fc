"""Command-line interface tests (in-process through main())."""
import csv
import json

import numpy as np
import pytest

from satnoma.chanmodel import db_to_linear
from satnoma.cli import main, parse_overrides, UsageError
from satnoma.regions import LinkPair, region_two_user


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def test_feeder_table_and_files(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["feeder", "--k", "2", "--b", "1.0",
                 "--out-dir", str(out)]) == 0
    text = capsys.readouterr().out
    assert "single_layer" in text and "broadcast_multicast" in text
    header, rows = read_csv(out / "feeder.csv")
    assert header == ["scheme", "k", "b_hz", "total_hz"]
    got = {r[0]: float(r[3]) for r in rows}
    assert got == {"single_layer": 2.0, "ldm": 4.0, "broadcast_multicast": 6.0}
    assert (out / "manifest.csv").exists()


def test_feeder_needs_both_numbers(tmp_path, capsys):
    assert main(["feeder", "--k", "2", "--out-dir", str(tmp_path)]) == 2
    assert "usage error" in capsys.readouterr().err


def test_unknown_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_parse_overrides():
    got = parse_overrides(["k=7", "decoder=snd", 'schemes=["four_color"]'])
    assert got == {"k": 7, "decoder": "snd", "schemes": ["four_color"]}
    with pytest.raises(UsageError):
        parse_overrides(["justakey"])


def region_toml(tmp_path, s1=10.0, modes=("ian", "sd")):
    cfg = tmp_path / "region.toml"
    cfg.write_text(
        "[region]\n"
        f"s1_db = {s1}\n"
        "s2_db = 10.0\n"
        "i1_db = 0.0\n"
        "i2_db = 0.0\n"
        f"modes = {json.dumps(list(modes))}\n")
    return cfg


def test_region_boundaries_round_trip(tmp_path):
    out = tmp_path / "o"
    cfg = region_toml(tmp_path)
    assert main(["region", "--config", str(cfg), "--out-dir", str(out)]) == 0
    link = LinkPair(s1=10.0, s2=10.0, i1=1.0, i2=1.0)
    for mode in ("ian", "sd"):
        _, rows = read_csv(out / f"region_{mode}.csv")
        got = np.array([[float(a), float(b)] for a, b in rows])
        want = region_two_user(link, mode).boundary
        # repr() emission: parsing the CSV reproduces the floats exactly
        np.testing.assert_array_equal(got, want)


def test_region_set_overrides_win(tmp_path):
    out = tmp_path / "o"
    cfg = region_toml(tmp_path, s1=10.0, modes=("ian",))
    assert main(["region", "--config", str(cfg), "--set", "s1_db=20.0",
                 "--out-dir", str(out)]) == 0
    _, rows = read_csv(out / "region_ian.csv")
    top_r1 = max(float(r[0]) for r in rows)
    want = region_two_user(LinkPair(db_to_linear(20.0), 10.0, 1.0, 1.0), "ian")
    assert top_r1 == pytest.approx(want.boundary[:, 0].max(), rel=1e-12)


def test_region_noma_bc_needs_its_parameters(tmp_path, capsys):
    cfg = tmp_path / "r.toml"
    cfg.write_text('[region]\nmodes = ["noma_bc"]\n')
    assert main(["region", "--config", str(cfg),
                 "--out-dir", str(tmp_path / "o")]) == 2
    assert "noma" in capsys.readouterr().err


def test_bad_config_paths_are_usage_errors(tmp_path, capsys):
    assert main(["region", "--config", str(tmp_path / "missing.toml"),
                 "--out-dir", str(tmp_path / "o")]) == 2
    bad = tmp_path / "bad.toml"
    bad.write_text("not == toml [ at all\n")
    assert main(["region", "--config", str(bad),
                 "--out-dir", str(tmp_path / "o")]) == 2
    capsys.readouterr()


def test_unknown_sim_key_rejected(tmp_path, capsys):
    cfg = tmp_path / "sim.toml"
    cfg.write_text("[sim]\nk = 7\nwarp_factor = 9\n")
    assert main(["simulate", "--config", str(cfg),
                 "--out-dir", str(tmp_path / "o")]) == 2
    assert "warp_factor" in capsys.readouterr().err


SIM_TOML = """\
[sim]
k = 7
n = 7
drops = 2
users_per_beam = 2
schemes = ["four_color", "single_layer_precoding", "multilayer_noma"]
"""


def test_simulate_writes_summary_and_drops(tmp_path, capsys):
    cfg = tmp_path / "sim.toml"
    cfg.write_text(SIM_TOML)
    out = tmp_path / "o"
    assert main(["simulate", "--config", str(cfg), "--out-dir", str(out)]) == 0
    header, rows = read_csv(out / "summary.csv")
    assert header[:2] == ["scheme", "scheduler"]
    assert [r[0] for r in rows] == ["four_color", "single_layer_precoding",
                                    "multilayer_noma"]
    _, drops = read_csv(out / "drops.csv")
    assert len(drops) == 3 * 2
    assert "multilayer_noma" in capsys.readouterr().out


def test_simulate_output_is_run_invariant(tmp_path):
    cfg = tmp_path / "sim.toml"
    cfg.write_text(SIM_TOML)
    outs = [tmp_path / f"o{i}" for i in range(3)]
    assert main(["simulate", "--config", str(cfg), "--out-dir", str(outs[0])]) == 0
    assert main(["simulate", "--config", str(cfg), "--out-dir", str(outs[1])]) == 0
    assert main(["simulate", "--config", str(cfg), "--out-dir", str(outs[2]),
                 "--workers", "3"]) == 0
    for name in ("summary.csv", "drops.csv", "manifest.csv"):
        blobs = [(o / name).read_bytes() for o in outs]
        assert blobs[0] == blobs[1] == blobs[2]


def test_simulate_csv_preserves_full_precision(tmp_path):
    from satnoma.syssim import SimConfig, compare_schemes
    cfg = tmp_path / "sim.toml"
    cfg.write_text(SIM_TOML)
    out = tmp_path / "o"
    assert main(["simulate", "--config", str(cfg), "--out-dir", str(out)]) == 0
    _, rows = read_csv(out / "summary.csv")
    comp = compare_schemes(SimConfig(k=7, n=7, drops=2, users_per_beam=2))
    for row, want in zip(rows, comp.rows):
        assert float(row[4]) == want.mean_sum_rate
        assert float(row[8]) == want.gain_vs_four_color


def test_simulate_seed_flag(tmp_path):
    cfg = tmp_path / "sim.toml"
    cfg.write_text(SIM_TOML)
    a, b, c = (tmp_path / n for n in "abc")
    assert main(["simulate", "--config", str(cfg), "--seed", "5",
                 "--out-dir", str(a)]) == 0
    assert main(["simulate", "--config", str(cfg), "--seed", "5",
                 "--out-dir", str(b)]) == 0
    assert main(["simulate", "--config", str(cfg), "--seed", "6",
                 "--out-dir", str(c)]) == 0
    assert (a / "summary.csv").read_bytes() == (b / "summary.csv").read_bytes()
    assert (a / "summary.csv").read_bytes() != (c / "summary.csv").read_bytes()


def test_json_config_accepted(tmp_path):
    cfg = tmp_path / "sim.json"
    cfg.write_text(json.dumps({"sim": {"k": 7, "n": 7, "drops": 1,
                                       "schemes": ["four_color"]}}))
    out = tmp_path / "o"
    assert main(["simulate", "--config", str(cfg), "--out-dir", str(out)]) == 0
    _, rows = read_csv(out / "summary.csv")
    assert len(rows) == 1


def test_out_dir_env_fallback(tmp_path, monkeypatch):
    target = tmp_path / "from_env"
    monkeypatch.setenv("SATNOMA_OUT_DIR", str(target))
    assert main(["feeder", "--k", "3", "--b", "2.0"]) == 0
    assert (target / "feeder.csv").exists()


def test_precode_tables(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["precode", "--set", "k=7", "--set", "n=7",
                 "--out-dir", str(out)]) == 0
    assert "peak feed load" in capsys.readouterr().out
    header, rows = read_csv(out / "precoder.csv")
    assert header == ["stream", "feed", "w_re", "w_im"]
    assert len(rows) == 7 * 7
    _, sinr_rows = read_csv(out / "sinr.csv")
    assert len(sinr_rows) == 7
    assert all(float(r[3]) < -40.0 for r in sinr_rows)  # interference crushed
    assert (out / "plot.gp").exists()


def test_pairing_compares_against_oracle(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["pairing", "--set", "k=7", "--set", "n=7",
                 "--set", "users_per_beam=4",
                 "--set", 'strategies=["min_gain_diff", "max_gain_diff"]',
                 "--out-dir", str(out)]) == 0
    assert "pairing oracle" in capsys.readouterr().out
    _, rows = read_csv(out / "pairing_comparison.csv")
    rates = {r[0]: float(r[1]) for r in rows}
    gaps = {r[0]: float(r[2]) for r in rows}
    assert set(rates) == {"min_gain_diff", "max_gain_diff", "brute_force"}
    assert gaps["brute_force"] == 0.0
    for s in ("min_gain_diff", "max_gain_diff"):
        assert rates["brute_force"] >= rates[s] - 1e-9
        assert gaps[s] >= -1e-12
    _, sched_rows = read_csv(out / "schedule_min_gain_diff.csv")
    assert len(sched_rows) == 7 * 2   # 7 beams, 2 slots of pairs

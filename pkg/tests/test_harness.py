import math

import pytest

from ldmcast import cli, harness
from ldmcast.config import ConfigError, SweepSpec, SystemConfig, parse_config, serialize_config
from ldmcast.harness import (AGGREGATE_FIELDS, PER_SEED_FIELDS, ResultTable, aggregate_rows, emit_csv,
                             read_csv, run_experiment)

MINIMAL = "[system]\nk = 6\nk_prime = 3\nn_tx = 16\n"

SMALL = """
[system]
k = 4
k_prime = 2
n_tx = 8
n_seeds = 2

[sweep]
n_tx = 8, 12
schemes = BEAMWAVE-KING, RANDOM, XHAUS, TDM-0.5
"""


def test_minimal_config_defaults():
    cfg, sweep = parse_config(MINIMAL)
    assert sweep is None
    assert (cfg.gamma_min, cfg.sigma2_dbm, cfg.p_rx_dbm, cfg.omega) == (4.0, 10.0, 0.0, 0.5)
    assert (cfg.n_conv, cfg.epsilon, cfg.paths, cfg.n_seeds) == (20, 0.001, 3, 100)
    assert cfg.p_tx_dbm == 35.0
    assert abs(cfg.aod_range[1] - math.pi / 3) < 1e-15


def test_units():
    cfg = SystemConfig(k=2, k_prime=1, n_tx=4)
    assert abs(cfg.sigma2_mw - 10.0) < 1e-12 and cfg.p_rx_mw == 1.0
    assert abs(cfg.p_tx_mw - 10 ** 3.5) < 1e-9


@pytest.mark.parametrize("text,field", [
    ("[system]\nk = 6\nk_prime = 7\nn_tx = 16\n", "k_prime"),
    ("[system]\nk = 6\nn_tx = 16\n", "k_prime"),
    ("[system]\nk = 6\nk_prime = 3\nn_tx = 16\ngamma_min = -1\n", "gamma_min"),
    ("[system]\nk = 6\nk_prime = 3\nn_tx = 16\nomega = 2\n", "omega"),
    ("[system]\nk = 6\nk_prime = 3\nn_tx = 16\nbogus = 1\n", "bogus"),
    ("[system]\nk = 6\nk_prime = 5\nn_tx = 4\n", "k_prime"),
    ("[system]\nk = six\nk_prime = 3\nn_tx = 16\n", "k"),
])
def test_validation_names_field(text, field):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.field == field


def test_missing_section_and_garbage():
    with pytest.raises(ConfigError):
        parse_config("k = 6\n")
    with pytest.raises(ConfigError):
        parse_config("[system\nk=1")


def test_round_trip():
    cfg, sweep = parse_config(SMALL + "k_prime_ratio = 0.5\n")
    cfg = cfg.with_(aoa_range=(-1.25, 2.5), p_tx_dbm=45.0)
    again, sweep2 = parse_config(serialize_config(cfg, sweep))
    assert again == cfg and sweep2 == sweep


def test_angle_expressions():
    cfg, _ = parse_config(MINIMAL + "aod_range = -pi/4, pi/4\naoa_range = -2*pi, pi\n")
    assert cfg.aod_range == (-math.pi / 4, math.pi / 4)
    assert cfg.aoa_range == (-2 * math.pi, math.pi)


def test_sweep_cells():
    base = SystemConfig(k=6, k_prime=3, n_tx=16)
    fig2 = SweepSpec((("n_tx", (16, 24, 36)), ("k_prime", (3, 4, 5))), ("BEAMWAVE-KING",))
    cells = list(fig2.cells(base))
    assert len(cells) == 9 and cells[0][0] == "n_tx=16;k_prime=3"
    assert {c.n_tx for _, c in cells} == {16, 24, 36}
    fig4 = SweepSpec((("k", (8, 12, 16)),), ("RANDOM",), k_prime_ratio=0.25)
    assert [c.k_prime for _, c in fig4.cells(base.with_(n_tx=32))] == [2, 3, 4]
    with pytest.raises(ConfigError):
        SweepSpec((("n_tx", ()),), ("RANDOM",))
    with pytest.raises(ConfigError):
        SweepSpec((("n_tx", (8,)),), ())


def test_fig2_grid_counts():
    base = SystemConfig(k=6, k_prime=3, n_tx=16, n_seeds=1)
    schemes = ("BEAMWAVE-CORR", "BEAMWAVE-PAWN", "BEAMWAVE-ROOK", "BEAMWAVE-KING", "RANDOM", "XHAUS")
    units = harness.experiment_units(base, SweepSpec((("n_tx", (16, 24, 36)),), schemes))
    assert len(units) == 3 and len(units[0][3]) == 6
    units = harness.experiment_units(base, SweepSpec((("n_tx", (16, 24, 36)), ("k_prime", (3, 4, 5))), schemes))
    assert len({u[0] for u in units}) == 9


@pytest.fixture(scope="module")
def small_table():
    cfg, sweep = parse_config(SMALL)
    return run_experiment(cfg, sweep, timing=False)


def test_table_shape_and_fairness(small_table):
    rows = small_table.rows
    assert len(rows) == 2 * 2 * 4
    for row in rows:
        assert row["fingerprint"] == small_table.fingerprints[(row["scenario_id"], row["seed"])]
    assert len(set(small_table.fingerprints.values())) == 4
    agg = small_table.aggregate()
    assert len(agg) == 2 * 4


def test_aggregates_recompute(small_table):
    for agg in small_table.aggregate():
        members = [r for r in small_table.rows
                   if (r["scenario_id"], r["scheme"], r["metric"]) == (agg["scenario_id"], agg["scheme"], agg["metric"])]
        ok = [r for r in members if r["feasible"]]
        mean = sum(r["min_unicast_sinr"] for r in ok) / len(ok)
        assert abs(agg["mean_min_unicast_sinr"] - mean) <= 1e-12 * abs(mean)
        assert agg["feasibility_rate"] == len(ok) / len(members)


def test_csv_output(small_table, tmp_path):
    per_seed, aggregate = emit_csv(small_table, tmp_path / "out")
    with open(per_seed) as fh:
        assert fh.readline().strip() == ",".join(PER_SEED_FIELDS)
    back = read_csv(per_seed)
    assert len(back) == len(small_table.rows)
    for a, b in zip(back, small_table.rows):
        for key in ("min_unicast_sinr", "unicast_se", "min_multicast_sinr"):
            assert abs(a[key] - b[key]) <= 1e-9 * abs(b[key])
        assert a["feasible"] == b["feasible"] and a["scheme"] == b["scheme"]
    agg = read_csv(aggregate)
    assert set(agg[0]) == set(AGGREGATE_FIELDS)


def test_float_precision(tmp_path):
    row = dict(zip(PER_SEED_FIELDS, ["c", 0, "RANDOM", "", 2, 1, 4, 1, 4, 1 / 3, 2 / 3, math.pi, True, 3, 0.1]))
    per_seed, _ = emit_csv([row], tmp_path)
    text = open(per_seed).read().splitlines()[1]
    assert "0.3333333333333333" in text
    assert read_csv(per_seed)[0]["min_multicast_sinr"] == math.pi


def test_empty_table_header_only(tmp_path):
    per_seed, aggregate = emit_csv(ResultTable(), tmp_path)
    assert open(per_seed).read() == ",".join(PER_SEED_FIELDS) + "\n"
    assert open(aggregate).read() == ",".join(AGGREGATE_FIELDS) + "\n"


def test_unwritable_destination(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError):
        emit_csv(ResultTable(), blocker / "sub")


def test_infeasible_rows_recorded_not_raised():
    cfg = SystemConfig(k=3, k_prime=1, n_tx=4, n_seeds=2, gamma_min=1e9)
    table = run_experiment(cfg, SweepSpec((), ("BEAMWAVE-KING", "TDM-0.5")))
    assert len(table.rows) == 4 and not any(r["feasible"] for r in table.rows)
    agg = aggregate_rows(table.rows)
    assert all(a["feasibility_rate"] == 0 and math.isnan(a["mean_min_unicast_sinr"]) for a in agg)


def test_worker_count_does_not_change_bytes(tmp_path):
    cfg, sweep = parse_config(SMALL)
    one = run_experiment(cfg, sweep, workers=1, timing=False)
    many = run_experiment(cfg, sweep, workers=8, timing=False)
    a = emit_csv(one, tmp_path / "a")
    b = emit_csv(many, tmp_path / "b")
    for pa, pb in zip(a, b):
        assert open(pa, "rb").read() == open(pb, "rb").read()


def test_env_overrides_master_seed():
    cfg = SystemConfig(k=2, k_prime=1, n_tx=4)
    assert harness.master_seed_from_env(cfg, {"LDMCAST_MASTER_SEED": "17"}).master_seed == 17
    assert harness.master_seed_from_env(cfg, {}).master_seed == 0
    with pytest.raises(ConfigError):
        harness.master_seed_from_env(cfg, {"LDMCAST_MASTER_SEED": "x"})


def test_cli_run_and_exit_codes(tmp_path, monkeypatch, capsys):
    conf = tmp_path / "c.ini"
    conf.write_text(SMALL)
    assert cli.main(["run", "--config", str(conf), "--out", str(tmp_path / "o"), "--no-timing", "--seeds", "1"]) == 0
    rows = read_csv(tmp_path / "o" / "per_seed.csv")
    assert len(rows) == 8 and all(r["runtime_ms"] == 0 for r in rows)

    monkeypatch.setenv("LDMCAST_MASTER_SEED", "5")
    assert cli.main(["run", "--config", str(conf), "--out", str(tmp_path / "p"), "--no-timing", "--seeds", "1"]) == 0
    assert read_csv(tmp_path / "p" / "per_seed.csv") != rows

    bad = tmp_path / "bad.ini"
    bad.write_text("[system]\nk = 2\nk_prime = 3\nn_tx = 4\n")
    assert cli.main(["run", "--config", str(bad), "--out", str(tmp_path / "q")]) == cli.EXIT_USAGE
    assert cli.main(["run", "--config", str(tmp_path / "missing.ini"), "--out", str(tmp_path / "q")]) == cli.EXIT_IO
    capsys.readouterr()


def test_cli_channels_metrics_schedule(tmp_path, capsys):
    conf = tmp_path / "c.ini"
    conf.write_text("[system]\nk = 5\nk_prime = 2\nn_tx = 8\n")
    dump = tmp_path / "ch.json"
    theta = tmp_path / "theta.csv"
    assert cli.main(["channels", "--config", str(conf), "--seed", "3", "--out", str(dump)]) == 0
    assert cli.main(["metrics", "--channels", str(dump), "--kind", "king", "--out", str(theta)]) == 0
    assert cli.main(["schedule", "--theta", str(theta), "--k-prime", "2"]) == 0
    out = capsys.readouterr().out
    assert '"selected": [' in out
    assert cli.main(["schedule", "--theta", str(theta), "--k-prime", "9"]) == cli.EXIT_USAGE
    assert cli.main(["metrics", "--channels", str(tmp_path / "none.json"), "--kind", "CORR"]) == cli.EXIT_IO

import math
import os

import numpy as np
import pytest

from zeptosense import cli
from zeptosense import experiments as ex
from zeptosense.errors import ConfigError

SMALL = """
[system]
dim_cavity = 8
dim_mechanics = 20
[sweep]
periods = 1
samples = 50
"""


def test_defaults_parse():
    cfg = ex.load_config()
    assert cfg.system.chi == 0.3 and cfg.system.S == 0.68
    assert cfg.trap.gap_m == 2.5e-4
    assert cfg.collision.steps_per_period == 49
    assert len(cfg.digest()) == 64


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="unknown key"):
        ex.parse_config("[system]\nchi_over_omge = 0.3\n")
    with pytest.raises(ConfigError, match="unknown section"):
        ex.parse_config("[sytem]\n")


def test_bad_values_rejected():
    with pytest.raises(ConfigError):
        ex.parse_config("[trap]\ncells = eight\n")
    with pytest.raises(ConfigError):
        ex.parse_config("[trap]\nchi_gr_z = 1e-4\n")
    with pytest.raises(ConfigError):
        ex.parse_config("[sweep]\nsamples = 1\n")
    with pytest.raises(ConfigError):
        ex.parse_config("[system]\ndwdd_rad_s_m = fast\n")
    with pytest.raises(ConfigError):
        ex.load_config("/nonexistent/cfg.ini")


def test_digest_tracks_values():
    a = ex.parse_config("")
    b = ex.parse_config("[sweep]\nsamples = 301\n")
    assert a.digest() != b.digest()
    assert a.digest() == ex.parse_config("[sweep]\nsamples = 300\n").digest()


def test_every_schema_key_has_units_or_is_dimensionless():
    for sec, keys in ex.schema().items():
        for k in keys:
            assert k.islower()


@pytest.mark.parametrize("fig", sorted(ex.FIGURES))
def test_pinned_configs_load(fig):
    cfg = ex.pinned_config(fig)
    assert cfg.source == f"fig{fig}.ini"


def test_unknown_figure():
    with pytest.raises(ConfigError):
        ex.pinned_config("6")


def test_csv_header_and_roundtrip(tmp_path):
    cfg = ex.parse_config(SMALL)
    tables, paths = ex.run("evolve", cfg, str(tmp_path))
    with open(paths[0]) as fh:
        first, second = fh.readline(), fh.readline()
    assert f"config_sha256={cfg.digest()}" in first
    assert second.startswith("# units: t_omega=rad")
    back = ex.read_table(paths[0])
    assert np.array_equal(back.column("qfi_omega"), tables[0].column("qfi_omega"))


def test_evolve_zero_alpha_gives_zero_qfi():
    cfg = ex.parse_config(SMALL.replace("[sweep]", "alpha_re = 0\n[sweep]"))
    tab = ex.cmd_evolve(cfg)[0]
    assert np.all(tab.column("qfi_omega") == 0)


def test_threads_do_not_change_output(tmp_path):
    cfg = ex.parse_config(SMALL)
    _, p1 = ex.run("cfi", cfg, str(tmp_path / "a"), threads=1)
    _, p4 = ex.run("cfi", cfg, str(tmp_path / "b"), threads=4)
    assert open(p1[0]).read() == open(p4[0]).read()


def test_decohere_lossless_row_equals_evolve():
    # mechanics must be resolved well enough that truncation does not show in
    # the derivative; 49 collisions per period land on the evolve grid
    text = """
[system]
dim_cavity = 5
dim_mechanics = 40
rel_step = 1e-5
[sweep]
periods = 1
samples = 50
gammas_over_omega = 0
"""
    cfg = ex.parse_config(text)
    dec = ex.cmd_decohere(cfg)[0]
    evo = ex.cmd_evolve(cfg)[0]
    assert np.allclose(dec.column("t_omega"), evo.column("t_omega"), atol=1e-12)
    F_dec, F_evo = dec.column("qfi_omega"), evo.column("qfi_omega")
    assert np.abs(F_dec - F_evo).max() < 1e-10 * np.abs(F_evo).max()


def test_scaling_command():
    tabs = ex.cmd_scaling(ex.load_config())
    fits = {r[0]: r[3] for r in tabs[1].rows}
    assert abs(fits["exponent_shot_noise"] - 1) < 0.05
    assert abs(fits["exponent_kerr"] - 3) < 0.05
    checks = ex.check_figure("2", tabs, ex.load_config())
    assert all(c.passed for c in checks)


def test_trap_single_point_equals_sweep_row():
    text = """
[trap]
cells = 4
grid_nx = 3
grid_ny = 3
grid_nz = 3
[sweep]
d_start_m = 2.0e-4
d_stop_m = 3.0e-4
d_num = 3
"""
    sweep = ex.cmd_trap(ex.parse_config(text), threads=3)[0]
    single = ex.cmd_trap(ex.parse_config(text.replace("d_start_m = 2.0e-4", "d_start_m = 2.5e-4")
                                         .replace("d_stop_m = 3.0e-4", "d_stop_m = 2.5e-4")
                                         .replace("d_num = 3", "d_num = 1")))[0]
    assert sweep.rows[1] == single.rows[0]


def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[system]\nnope = 1\n")
    assert cli.main(["evolve", "--config", str(bad), "--out", str(tmp_path)]) == 2
    leaky = tmp_path / "leaky.ini"
    leaky.write_text(SMALL.replace("[sweep]", "alpha_re = 2.0\n[collision]\ngamma_over_omega = 0.5\n"
                                   "ancilla_dim = 2\n[sweep]\ngammas_over_omega = 0.5"))
    assert cli.main(["decohere", "--config", str(leaky), "--out", str(tmp_path)]) == 3
    good = tmp_path / "good.ini"
    good.write_text(SMALL)
    assert cli.main(["cfi", "--config", str(good), "--out", str(tmp_path / "o")]) == 0
    assert os.path.exists(tmp_path / "o" / "cfi.csv")
    assert cli.main(["reproduce", "9", "--out", str(tmp_path)]) == 2


def test_cli_reproduce_exit_codes(tmp_path, monkeypatch):
    assert cli.main(["reproduce", "2", "--out", str(tmp_path / "ok")]) == 0
    monkeypatch.setattr(ex, "check_figure",
                        lambda *a: [ex.Check("forced", False, "always fails")])
    assert cli.main(["reproduce", "2", "--out", str(tmp_path / "bad")]) == 4


def test_plots_written(tmp_path):
    pytest.importorskip("matplotlib")
    _, paths = ex.run("scaling", ex.load_config(), str(tmp_path), emit_plots=True)
    assert any(p.endswith(".svg") for p in paths)

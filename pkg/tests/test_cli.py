import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photon_condensate import cli
from photon_condensate.io import read_csv, read_key_values

SCHEMAS = {
    "bec_x_": ["n_total", "n_ground", "mu"],
    "laser_beta_": ["rho", "P"],
    "compare_beta_": ["control", "P_laser", "n_ground_bec", "deviation"],
    "summary": ["beta", "x_matched", "p0_error", "max_deviation"],
    "cavity": ["name", "value", "unit"],
    "observables": cli.OBSERVABLE_COLUMNS,
    "field_": ["x", "y", "re_psi", "im_psi"],
    "ks_points": ["energy_eV", "log_ratio", "fit_line"],
}


def run(out, *args):
    return cli.main(list(args) + ["--out", str(out)])


def files(path):
    return {p: (path / p).read_bytes() for p in sorted(os.listdir(path))}


def check_schema(path):
    """Every CSV in ``path`` has its documented header and well-formed rows."""
    for name in os.listdir(path):
        if not name.endswith(".csv"):
            continue
        expected = next(v for k, v in SCHEMAS.items() if name.startswith(k))
        header, rows = read_csv(path / name)
        assert header == expected, name
        for row in rows:
            assert len(row) == len(header)
            if name != "cavity.csv":
                [float(c) for c in row]


def manifest(path):
    return read_key_values(path / cli.MANIFEST)


def test_bec_curve_inventory(tmp_path):
    assert run(tmp_path, "bec-curve", "--n_points", "60") == 0
    assert sorted(os.listdir(tmp_path)) == [
        "bec_curves.svg", "bec_x_0.05.csv", "bec_x_0.2.csv", "bec_x_1.csv", "bec_x_5.csv",
        "manifest.txt"]
    check_schema(tmp_path)
    header, rows = read_csv(tmp_path / "bec_x_5.csv")
    data = np.array(rows, dtype=float)
    assert np.all(data[:, 1] / data[:, 0] > 0.98)
    m = manifest(tmp_path)
    assert m["command"] == "bec-curve" and m["result.status"] == "ok"


def test_laser_curve(tmp_path):
    assert run(tmp_path, "laser-curve", "--n_points", "300") == 0
    check_schema(tmp_path)
    _, rows = read_csv(tmp_path / "laser_beta_1.csv")
    data = np.array(rows, dtype=float)
    assert np.max(np.abs(data[:, 1] / data[:, 0] - 1)) < 1e-9
    for name in os.listdir(tmp_path):
        if name.endswith(".csv"):
            col = np.array(read_csv(tmp_path / name)[1], dtype=float)
            assert np.all(np.diff(col, axis=0) > 0)
    m = manifest(tmp_path)
    betas = [float(v) for v in m["beta"].split(",")]
    knees = [float(v) for v in m["result.threshold_curvature"].split(",")]
    unity = [float(v) for v in m["result.threshold_unity"].split(",")]
    k = betas.index(1e-5)
    assert 0.5 / 1e-5 <= knees[k] <= 2 / 1e-5
    assert math.isnan(knees[betas.index(1.0)])
    assert len(unity) == len(betas)


def test_compare(tmp_path):
    assert run(tmp_path, "compare", "--n_points", "80") == 0
    check_schema(tmp_path)
    m = manifest(tmp_path)
    betas = [float(v) for v in m["beta"].split(",")]
    xs = [float(v) for v in m["result.x_matched"].split(",")]
    for b, x in zip(betas, xs):
        expected = math.inf if b == 1 else -math.log(1 - math.sqrt(b))
        assert x == pytest.approx(expected, rel=1e-14)
    _, rows = read_csv(tmp_path / "summary.csv")
    data = np.array(rows, dtype=float)
    assert np.all(data[:, 2] <= 1e-8)
    assert np.all(np.diff(data[:, 0]) > 0)
    assert np.all(np.diff(data[:, 3]) <= 0)


def test_cavity(tmp_path):
    assert run(tmp_path, "cavity") == 0
    check_schema(tmp_path)
    table = {r[0]: r[1] for r in read_csv(tmp_path / "cavity.csv")[1]}
    assert 30e9 <= float(table["nu_Hz"]) <= 50e9
    assert run(tmp_path / "b", "cavity", "--L0_um", "1.6111111111111113",
               "--n", "1.44") == 0
    other = {r[0]: r[1] for r in read_csv(tmp_path / "b" / "cavity.csv")[1]}
    assert float(other["nu_Hz"]) == pytest.approx(float(table["nu_Hz"]), rel=1e-12)


def test_cavity_rejects_both_lengths(tmp_path, capsys):
    assert run(tmp_path, "cavity", "--L0_um", "2", "--lambda0_nm", "580") == 1
    assert "only one" in capsys.readouterr().err


def test_gpe_smoke(tmp_path):
    assert run(tmp_path, "gpe", "--nx", "32", "--box", "12", "--steps", "200",
               "--snapshot_every", "100", "--sample_every", "20") == 0
    check_schema(tmp_path)
    names = os.listdir(tmp_path)
    assert {"field_0000000.csv", "field_0000100.csv", "field_0000200.csv",
            "density_0000200.pgm", "observables.svg"} <= set(names)
    assert float(manifest(tmp_path)["result.norm_drift"]) < 1e-10
    _, rows = read_csv(tmp_path / "observables.csv")
    assert len(rows) == 11


def test_gpe_ground_init(tmp_path):
    assert run(tmp_path, "gpe", "--nx", "32", "--box", "12", "--steps", "50",
               "--init", "ground", "--g", "5", "--format", "csv") == 0
    data = np.array(read_csv(tmp_path / "observables.csv")[1], dtype=float)
    assert np.max(np.abs(data[:, 5] / data[0, 5] - 1)) < 1e-8
    assert not any(n.endswith(".svg") for n in os.listdir(tmp_path))


def test_ks_fit(tmp_path):
    assert run(tmp_path, "ks-fit") == 0
    check_schema(tmp_path)
    report = read_key_values(tmp_path / "ks_report.txt")
    assert float(report["temperature_K"]) == pytest.approx(300.0, rel=1e-3)


def test_ks_fit_bad_input(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("wavelength_nm,absorption,fluorescence\n500,1,1\n501,x,1\n")
    assert run(tmp_path / "o", "ks-fit", "--input", str(bad)) == 1
    assert "line 3" in capsys.readouterr().err


def test_unknown_key_is_hard_failure(tmp_path, capsys):
    assert run(tmp_path, "bec-curve", "--bogus", "1") == 1
    assert "unknown key 'bogus'" in capsys.readouterr().err
    assert not (tmp_path / cli.MANIFEST).exists()
    assert run(tmp_path, "bec-curve", "--n_points", "many") == 1
    assert run(tmp_path, "bec-curve", "--x") == 1
    assert run(tmp_path, "laser-curve", "--beta", "2") == 1


def test_partial_failure(tmp_path):
    # populations this large are out of reach for mu >= -1e-14 at x = 5
    assert run(tmp_path, "bec-curve", "--x", "5", "--n_min", "1", "--n_max", "1e16",
               "--n_points", "9") == 2
    m = manifest(tmp_path)
    assert m["result.status"] == "partial" and int(m["result.failed_points"]) >= 1
    data = np.array(read_csv(tmp_path / "bec_x_5.csv")[1], dtype=float)
    assert np.isnan(data[-1, 1]) and np.isfinite(data[0, 1])
    assert "# failed: x=5" in (tmp_path / cli.MANIFEST).read_text()


def test_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep\nbeta = 0.5, 1\nn_points = 20\nformat = csv\n")
    out = tmp_path / "out"
    assert cli.main(["laser-curve", "--config", str(cfg), "--n_points", "30",
                     "--out", str(out)]) == 0
    m = manifest(out)
    assert m["n_points"] == "30" and m["beta"] == "0.5,1.0"
    assert sorted(os.listdir(out)) == ["laser_beta_0.5.csv", "laser_beta_1.csv",
                                       "manifest.txt"]
    cfg.write_text("command = compare\n")
    assert cli.main(["laser-curve", "--config", str(cfg), "--out", str(out)]) == 1


def test_manifest_reruns_exactly(tmp_path):
    first = tmp_path / "a"
    assert run(first, "compare", "--beta", "0.2,0.7", "--n_points", "40") == 0
    second = tmp_path / "b"
    assert cli.main(["compare", "--config", str(first / cli.MANIFEST),
                     "--out", str(second)]) == 0
    assert files(first) == files(second)


def test_determinism_across_jobs(tmp_path):
    args = ["bec-curve", "--x", "0.1,0.3,2", "--n_points", "40"]
    assert run(tmp_path / "serial", *args) == 0
    assert run(tmp_path / "pool", *args, "--jobs", "3") == 0
    assert files(tmp_path / "serial") == files(tmp_path / "pool")


def test_env_default_output(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.ENV_OUT, str(tmp_path / "env"))
    assert cli.main(["cavity"]) == 0
    assert (tmp_path / "env" / "cavity.csv").exists()


def test_console_script(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "photon_condensate.cli", "cavity",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "ok" in proc.stdout


@settings(max_examples=15)
@given(st.sampled_from(["bec-curve", "laser-curve", "compare"]),
       st.integers(3, 25), st.floats(-2, 0), st.floats(0.5, 3))
def test_emitted_csvs_parse(tmp_path_factory, command, n_points, lo, span):
    out = tmp_path_factory.mktemp("sweep")
    keys = {"bec-curve": ("n_min", "n_max"), "laser-curve": ("rho_min", "rho_max"),
            "compare": ("control_min", "control_max")}[command]
    code = run(out, command, "--n_points", str(n_points), f"--{keys[0]}", f"{10 ** lo!r}",
               f"--{keys[1]}", f"{10 ** (lo + span)!r}", "--format", "csv")
    assert code == 0
    check_schema(out)
    rerun = tmp_path_factory.mktemp("again")
    assert cli.main([command, "--config", str(out / cli.MANIFEST), "--out", str(rerun)]) == 0
    assert files(out) == files(rerun)

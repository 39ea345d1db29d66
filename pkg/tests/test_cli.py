import csv

import pytest

from ddeit.cli import main


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_yaml(tmp_path, text):
    path = tmp_path / "cfg.yaml"
    path.write_text(text)
    return str(path)


def test_empty_range_is_config_error(tmp_path):
    cfg = write_yaml(tmp_path, "delta_p_min: 5\ndelta_p_max: 1\n")
    assert run(tmp_path, "spectrum", "--config", cfg) == 2


def test_unknown_key_is_config_error(tmp_path):
    cfg = write_yaml(tmp_path, "bogus: 1\n")
    assert run(tmp_path, "spectrum", "--config", cfg) == 2


def test_unknown_preset(tmp_path):
    assert run(tmp_path, "preset", "fig99") == 2


def test_preset_list(capsys):
    assert main(["preset", "--list"]) == 0
    listed = capsys.readouterr().out
    assert "fig2\tspectrum" in listed and "fig12a\tpopulations" in listed


def test_fig2_files_and_header(tmp_path):
    assert run(tmp_path, "preset", "fig2") == 0
    path = tmp_path / "fig2_spectrum_stationary.csv"
    with open(path) as fh:
        assert fh.readline().strip() == "delta_p_MHz,im_chi,re_chi,source,error"
    data = rows(path)
    assert len(data) == 2001
    assert {r["source"] for r in data} == {"stationary"}
    assert (tmp_path / "fig2_spectrum_stationary-numeric.csv").exists()


def test_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["spectrum", "--preset", "fig2", "--out", str(a)]) == 0
    assert main(["spectrum", "--preset", "fig2", "--out", str(b), "--threads", "3"]) == 0
    for f in a.iterdir():
        assert f.read_bytes() == (b / f.name).read_bytes()


def test_temperature_flag_narrows_fig3(tmp_path, capsys):
    assert run(tmp_path, "preset", "fig3", "--temperature", "100") == 0
    written = capsys.readouterr().out.split()
    assert len(written) == 2
    assert all("WL348" in w for w in written)


def test_pumped_populations_flat(tmp_path):
    assert run(tmp_path, "preset", "fig12a") == 0
    data = rows(tmp_path / "fig12a_populations_steady.csv")
    r11 = [float(r["rho11"]) for r in data]
    r33 = [float(r["rho33"]) for r in data]
    assert max(r11) - min(r11) < 0.01 and max(r33) - min(r33) < 0.01


def test_boundaries_output(tmp_path):
    assert run(tmp_path, "boundaries", "--preset", "fig7") == 0
    data = {r["quantity"]: r for r in rows(tmp_path / "fig7_boundaries.csv")}
    assert float(data["omega_s_low"]["closed_form"]) == pytest.approx(4.8544, abs=1e-4)
    assert float(data["omega_s_high"]["closed_form"]) == pytest.approx(6.3553, abs=1e-4)


def test_pole_gives_partial_exit(tmp_path):
    cfg = write_yaml(tmp_path, "gamma_41: 0\ngamma_42: 0\ngamma_43: 1.0e-300\ngamma_phi2: 0\n"
                               "omega_c: 18\ndelta_p_min: -1\ndelta_p_max: 1\ndelta_p_points: 3\n")
    assert run(tmp_path, "spectrum", "--config", cfg) == 4
    data = rows(tmp_path / "spectrum_stationary.csv")
    assert data[1]["im_chi"] == "nan" and data[1]["error"]
    assert data[0]["error"] == "" and data[2]["error"] == ""


def test_missing_doppler_width_is_compute_error(tmp_path):
    cfg = write_yaml(tmp_path, "omega_c: 18\nsources: [doppler-numeric]\n")
    assert run(tmp_path, "spectrum", "--config", cfg) == 3


def test_flags_override_file(tmp_path):
    cfg = write_yaml(tmp_path, "omega_c: 18\nomega_s: 5.4\ndelta_s: 9\nsources: [doppler-numeric]\n"
                               "W_L: [10.0]\ndelta_p_points: 5\n")
    assert run(tmp_path, "spectrum", "--config", cfg, "--wl", "50") == 0
    assert (tmp_path / "spectrum_doppler-numeric_WL50.csv").exists()


def test_svg_output(tmp_path):
    pytest.importorskip("matplotlib")
    cfg = write_yaml(tmp_path, "omega_c: 18\ndelta_p_points: 21\n")
    assert run(tmp_path, "spectrum", "--config", cfg, "--svg") == 0
    svg = (tmp_path / "spectrum.svg").read_text()
    assert svg.lstrip().startswith("<?xml") and "<svg" in svg

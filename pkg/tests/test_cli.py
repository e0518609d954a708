import math

import pytest

from effgrow.cli import main


def test_solve_prints_triplet_row(capsys):
    code = main(["solve", "--case", "A", "--traits", "0.5,2.5",
                 "--kernel", "bimodal:0.3,0.5", "--beta", "1"])
    assert code == 0
    out = capsys.readouterr().out.splitlines()
    header = out[0].split(",")
    row = out[1].split(",")
    assert header[:5] == ["M", "beta", "case", "lambda", "v_eff"]
    values = dict(zip(header, row))
    assert float(values["lambda"]) == pytest.approx(0.1 + math.sqrt(0.76), rel=1e-12)
    assert values["case"] == "A"
    assert float(values["N_1"]) + float(values["N_2"]) == pytest.approx(1.0, abs=1e-10)


def test_solve_case_b_is_rate_free(capsys):
    code = main(["solve", "--case", "B", "--traits", "0.5,2.5",
                 "--kernel", "uniform"])
    assert code == 0
    row = capsys.readouterr().out.splitlines()[1].split(",")
    assert float(row[3]) == pytest.approx(math.sqrt(1.25), rel=1e-12)
    assert float(row[4]) == pytest.approx(math.sqrt(1.25), rel=1e-12)


def test_config_error_exit_code(capsys):
    assert main(["solve", "--case", "A", "--traits", "2.5,0.5",
                 "--kernel", "uniform"]) == 2
    assert main(["solve", "--case", "A", "--traits", "0.5,2.5",
                 "--kernel", "bimodal:0,0.5"]) == 2
    assert main(["fig3", "--out", "/tmp/x", "--config", "/no/such/file.ini"]) == 2
    assert main(["fig3", "--out", "/tmp/x", "--dx", "0.1"]) == 2


def test_experiment_run_and_manifest(tmp_path, capsys):
    code = main(["fig5_surfaces", "--out", str(tmp_path), "--seed", "3"])
    assert code == 0
    assert (tmp_path / "fig5_surfaces" / "manifest.json").exists()
    assert (tmp_path / "fig5_surfaces" / "fig5_surfaces.csv").exists()


def test_config_file_flow(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[fig5_surfaces]\nk_step = 0.2\n")
    code = main(["fig5_surfaces", "--out", str(tmp_path), "--config", str(cfg)])
    assert code == 0
    text = (tmp_path / "fig5_surfaces" / "fig5_surfaces.csv").read_text()
    assert len(text.splitlines()) == 1 + 4 * 4  # header + 4x4 grid

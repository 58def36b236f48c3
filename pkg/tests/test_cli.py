import numpy as np

from handwave.cli import main
from handwave.pipeline import load_background_model

from tests.helpers import FOX_SCRIPT_PATH, KEYBOARD_XML_PATH


def write_config(tmp_path, extra=""):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        f"source=script:{FOX_SCRIPT_PATH}\n"
        f"interface={KEYBOARD_XML_PATH}\n"
        "backend=ic\n" + extra
    )
    return str(cfg)


def test_run_headless_fox(tmp_path, capsys):
    log = tmp_path / "orders.log"
    cfg = write_config(tmp_path, f"recorder.path={log}\n")
    code = main(["run", "--config", cfg, "--headless"])
    out = capsys.readouterr().out
    assert code == 0
    assert "text buffer: 'fox'" in out
    lines = log.read_text().splitlines()
    assert [tuple(map(int, l.split("\t")[2:5])) for l in lines] == [
        (1, 102, 0), (1, 111, 0), (1, 120, 0)]


def test_run_missing_config_is_error(tmp_path, capsys):
    code = main(["run", "--config", str(tmp_path / "nope.cfg"), "--headless"])
    assert code == 2
    assert "run:" in capsys.readouterr().err


def test_run_rejects_bad_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("not.a.key=1\n")
    code = main(["run", "--config", str(cfg), "--headless"])
    assert code == 2
    assert "unknown key" in capsys.readouterr().err


def test_calibrate_writes_model(tmp_path, capsys):
    cfg = write_config(tmp_path)
    out_path = tmp_path / "bg.model"
    code = main(["calibrate", "--config", cfg, "--frames", "8",
                 "--out", str(out_path)])
    assert code == 0
    model = load_background_model(out_path)
    assert model.sample_count == 8
    assert model.dims == (640, 480)
    assert np.all(model.std >= 2.0)


def test_bench_prints_table(tmp_path, capsys):
    cfg = write_config(tmp_path)
    code = main(["bench", "--config", cfg, "--frames", "12"])
    out = capsys.readouterr().out
    assert code == 0
    assert "sequential:" in out and "parallel:" in out
    assert "fizi" in out
    assert "masks identical: True" in out


def test_dsi_backend_defaults_to_nonlinear_mapping(tmp_path):
    import handwave.cli as cli

    cfg_path = write_config(tmp_path)
    args = cli._build_parser().parse_args(
        ["run", "--config", cfg_path, "--backend", "dsi", "--headless"])
    config, _ = cli._configure(args)
    assert config.backend == "dsi"
    assert config.mapping_mode == "nonlinear"

    # an explicit config key wins over the dsi convenience default
    cfg_path2 = write_config(tmp_path, "mapping.mode=absolute\nbackend=dsi\n")
    args2 = cli._build_parser().parse_args(
        ["run", "--config", cfg_path2, "--headless"])
    config2, _ = cli._configure(args2)
    assert config2.mapping_mode == "absolute"

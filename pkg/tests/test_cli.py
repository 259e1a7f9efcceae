"""End-to-end tests of the command-line runner"""

from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from config.presets import HORIZON_ENSEMBLES, pipeline_preset
from fire_forecaster import _parse_grids, _parse_lags, build_parser, run
from models.errors import ConfigurationError
from processors.ensemble import fit_pipeline, forecast_overlay
from processors.series_loader import load_csv
from utils.artifacts import ArtifactWriter

GOLDEN = Path(__file__).parent / "golden"


def _run(*argv):
    return run(build_parser().parse_args(list(argv)))


class FailingWriter(ArtifactWriter):
    """Fails after writing the second horizon's forecast"""

    def write_frame(self, frame, name, index=False):
        target = super().write_frame(frame, name, index)
        if name == "forecast_h2.csv":
            raise OSError("disk full")
        return target


def test_summarize_writes_split_statistics(tmp_path, fixture_path):
    status = _run("summarize", "--data", str(fixture_path), "--output-dir", str(tmp_path))
    assert status == 0
    frame = pd.read_csv(tmp_path / "summary.csv").set_index("set")
    assert list(frame.index) == ["all", "train", "test"]
    assert frame.loc["all", "count"] == 245
    assert frame.loc["all", "mean"] == pytest.approx(9427.2694, abs=1e-3)
    assert frame.loc["test", "max"] == 36569


def test_synth_is_reproducible(tmp_path):
    outputs = []
    for name in ("first", "second"):
        directory = tmp_path / name
        assert _run("synth", "--n", "60", "--seed", "7", "--noise-std", "0.5",
                    "--output-dir", str(directory)) == 0
        outputs.append((directory / "synthetic.csv").read_bytes())
    assert outputs[0] == outputs[1]
    assert outputs[0].decode("utf-8").splitlines()[0] == "date,fire_spots"


def test_missing_data_file_reports_one_error_line(tmp_path, capsys):
    output = tmp_path / "out"
    status = _run("summarize", "--data", str(tmp_path / "absent.csv"), "--output-dir", str(output))
    assert status == 1
    lines = capsys.readouterr().err.strip().splitlines()
    assert lines[-1].startswith("error stage=load")
    assert not output.exists()


def test_invalid_override_is_a_configuration_error(tmp_path, capsys):
    status = _run("summarize", "--split-ratio", "1.5", "--output-dir", str(tmp_path / "out"))
    assert status == 1
    assert "type=ConfigurationError" in capsys.readouterr().err


def test_failed_run_removes_partial_outputs(tmp_path, fixture_path, capsys):
    output = tmp_path / "out"
    args = build_parser().parse_args(
        ["forecast", "--preset", "svr", "--no-plot", "--data", str(fixture_path), "--output-dir", str(output)]
    )
    assert run(args, writer_factory=FailingWriter) == 1
    assert "type=OSError" in capsys.readouterr().err
    assert not output.exists()


def test_decompose_writes_components_and_figure(tmp_path, fixture_path):
    assert _run("decompose", "--data", str(fixture_path), "--output-dir", str(tmp_path)) == 0
    frame = pd.read_csv(tmp_path / "decomposition.csv")
    assert list(frame.columns) == ["month", "observed", "seasonal", "trend", "remainder"]
    assert len(frame) == 255
    assert (tmp_path / "decomposition.svg").read_text(encoding="utf-8").lstrip().startswith("<?xml")


def test_fit_reports_pca_per_component(tmp_path, fixture_path, capsys):
    status = _run("fit", "--explain-variance", "--data", str(fixture_path), "--output-dir", str(tmp_path))
    assert status == 0
    summary = pd.read_csv(tmp_path / "fit_summary.csv")
    assert list(summary["component"]) == ["seasonal", "trend", "remainder"]
    assert list(summary["learner"].str.split("(").str[0]) == ["SVR", "MARS", "GLMBOOST"]
    variance = pd.read_csv(tmp_path / "pca_variance.csv")
    assert variance.groupby("component")["kept"].sum().to_dict() == dict(
        zip(summary["component"], summary["pca_components"])
    )
    assert "PCA" in capsys.readouterr().out


def test_forecast_files_feed_the_dm_test(tmp_path, fixture_path):
    for preset in ("svr", "k-nn"):
        status = _run("forecast", "--preset", preset, "--no-plot", "--data", str(fixture_path),
                      "--output-dir", str(tmp_path / preset))
        assert status == 0
    frame = pd.read_csv(tmp_path / "svr" / "forecast_h1.csv")
    assert list(frame.columns) == ["month", "observed", "forecast", "level", "split"]
    assert (frame["split"] == "test").sum() == 74

    status = _run("dm-test", str(tmp_path / "svr" / "forecast_h1.csv"), str(tmp_path / "k-nn" / "forecast_h1.csv"),
                  "--output-dir", str(tmp_path / "dm"))
    assert status == 0
    result = pd.read_csv(tmp_path / "dm" / "dm_test.csv")
    assert result.loc[0, "n"] == 74
    assert 0 <= result.loc[0, "p_value"] <= 1


@pytest.mark.slow
def test_evaluate_header_is_stable(tmp_path, fixture_path):
    assert _run("evaluate", "--horizon", "1", "--data", str(fixture_path), "--output-dir", str(tmp_path)) == 0
    header = (tmp_path / "evaluate_h1.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header == (GOLDEN / "evaluate_columns.csv").read_text(encoding="utf-8").strip()
    assert len(pd.read_csv(tmp_path / "evaluate_h1.csv")) == 7


def test_argument_helpers():
    assert _parse_lags("1-4") == [1, 2, 3, 4]
    assert _parse_lags("2,5") == [2, 5]
    assert _parse_grids(["knn.k=3,5", "SVR.cost=0.5"]) == {"KNN": {"k": [3, 5]}, "SVR": {"cost": [0.5]}}
    with pytest.raises(ConfigurationError):
        _parse_grids(["KNN=3"])


def test_default_forecast_uses_each_horizons_ensemble(tmp_path, fixture_path):
    assert _run("forecast", "--no-plot", "--data", str(fixture_path), "--output-dir", str(tmp_path)) == 0
    series = load_csv(fixture_path)
    for horizon, (name, _) in HORIZON_ENSEMBLES.items():
        pipeline = fit_pipeline(pipeline_preset(name), series)
        expected = forecast_overlay(pipeline, (horizon,))[horizon]
        frame = pd.read_csv(tmp_path / f"forecast_h{horizon}.csv")
        np.testing.assert_allclose(frame["forecast"], expected.recomposed, rtol=1e-12)


def test_paper_faithful_selection_flag():
    args = build_parser().parse_args(["gridsearch", "--paper-faithful-selection", "test"])
    assert args.selection == "test"
    assert build_parser().parse_args(["gridsearch", "--selection", "validation"]).selection == "validation"
    with pytest.raises(SystemExit):
        build_parser().parse_args(["gridsearch", "--paper-faithful-selection", "holdout"])

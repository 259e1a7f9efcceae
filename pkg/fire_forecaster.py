#!/usr/bin/env python3
"""
Fire Forecaster - STL decomposition-ensemble forecasting of monthly fire spots
Decompose, train a learner per component, forecast one and two months ahead,
recompose by summation and compare models with RRMSE, R² and Diebold-Mariano
"""

import argparse
import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from config.presets import PUBLISHED_PCA_COMPONENTS, PUBLISHED_SPLIT_STATS, ensemble_assignment, expand_grid
from config.settings import RunConfig, load_run_config, log_dir, log_level
from models.data_models import TimeSeries
from models.errors import ConfigurationError, MisalignedResultsError, error_line
from models.learner_specs import COMPONENTS, LearnerKind
from processors.comparison import lag_sweep, run_comparison
from processors.dataset_builder import split_statistics
from processors.decomposer import stl_decompose
from processors.ensemble import fit_pipeline, forecast_overlay
from processors.evaluator import dm_test, rrmse
from processors.grid_search import entries_to_frame, grid_search
from processors.plotter import plot_decomposition, plot_forecasts
from processors.preview import PreviewGenerator
from processors.series_loader import load_csv, write_csv
from utils.artifacts import ArtifactWriter
from utils.synthetic import gen_synthetic

SUBCOMMANDS = ("summarize", "decompose", "fit", "forecast", "gridsearch", "evaluate", "dm-test",
               "synth", "lag-sweep")


class FireForecaster:
    """Runs one subcommand against a RunConfig and records its artifacts"""

    def __init__(self, config: RunConfig, writer: ArtifactWriter):
        self.config = config
        self.writer = writer
        self.preview = PreviewGenerator()
        self.logger = logging.getLogger(__name__)

    def load_series(self) -> TimeSeries:
        path = self.config.resolved_data_path()
        print(f"📂 Данные: {path}")
        return load_csv(path)

    def summarize(self) -> List[Path]:
        series = self.load_series()
        stats = split_statistics(series, self.config.lag, self.config.split_ratio)
        frame = pd.DataFrame.from_records([
            {"set": name, "count": row.count, "max": row.max, "min": row.min,
             "mean": row.mean, "median": row.median, "std": row.std}
            for name, row in stats.items()
        ])
        print(self.preview.summary_preview(stats, PUBLISHED_SPLIT_STATS))
        return [self.writer.write_frame(frame, "summary.csv")]

    def decompose(self, plot: bool = True) -> List[Path]:
        series = self.load_series()
        variant = self.config.pipeline_variant()
        parts = stl_decompose(series, variant.stl_config(series.period))
        paths = [self.writer.write_frame(parts.to_frame().reset_index(), "decomposition.csv")]
        if plot:
            paths.append(plot_decomposition(parts, self.writer.path("decomposition.svg")))
        print(f"✅ STL: {len(series)} наблюдений, период {series.period}")
        return paths

    def fit(self, explain_variance: bool = False) -> List[Path]:
        series = self.load_series()
        pipeline = fit_pipeline(self.config.pipeline_variant(), series, self.config.split_ratio)
        summary = pipeline.summary()
        variance = pipeline.variance_table() if explain_variance else None
        print(self.preview.fit_preview(pipeline.variant.name, summary, variance))
        mode = "decomposed" if pipeline.variant.is_decomposed else "nondecomposed"
        print(f"📖 Опубликованное число компонент PCA ({mode}): {PUBLISHED_PCA_COMPONENTS[mode]}")
        paths = [self.writer.write_frame(summary, "fit_summary.csv")]
        if variance is not None:
            paths.append(self.writer.write_frame(variance, "pca_variance.csv"))
        return paths

    def forecast(self, plot: bool = True) -> List[Path]:
        series = self.load_series()
        if self.config.follows_horizon:
            pipelines = {
                horizon: fit_pipeline(self.config.pipeline_variant(horizon), series, self.config.split_ratio)
                for horizon in (1, 2)
            }
        else:
            shared = fit_pipeline(self.config.pipeline_variant(), series, self.config.split_ratio)
            pipelines = {1: shared, 2: shared}
        results = {
            horizon: forecast_overlay(pipeline, (horizon,))[horizon]
            for horizon, pipeline in pipelines.items()
        }
        paths = []
        for horizon, result in results.items():
            frame = result.to_frame().reset_index()
            paths.append(self.writer.write_frame(frame, f"forecast_h{horizon}.csv"))
            test = result.timestamps >= pipelines[horizon].test_start
            if np.any(test):
                score = rrmse(result.observed[test], result.recomposed[test])
                print(f"📊 {result.name}, h={horizon}: RRMSE на тесте {score:.4g}")
        if plot:
            paths.append(plot_forecasts(series, results, self.writer.path("forecast.svg")))
        return paths

    def gridsearch(self, kinds: Dict[str, Sequence[str]], grids: Dict[str, Dict[str, list]]) -> List[Path]:
        series = self.load_series()
        horizon = self.config.horizon
        candidates = {
            component: [
                spec
                for kind in kinds[component]
                for spec in expand_grid(kind, component, grids.get(kind))
            ]
            for component in COMPONENTS
        }
        entries = grid_search(
            candidates,
            series,
            horizon=horizon,
            selection=self.config.selection,
            template=self.config.pipeline_variant(),
            split_ratio=self.config.split_ratio,
            slice_config=self.config.slice_config(horizon),
            jobs=self.config.jobs,
        )
        frame = entries_to_frame(entries)
        print(self.preview.grid_preview(frame))
        return [self.writer.write_frame(frame, f"gridsearch_h{horizon}.csv")]

    def evaluate(self, assignment_kinds: Optional[Sequence[str]] = None) -> List[Path]:
        series = self.load_series()
        horizon = self.config.horizon
        assignment = ensemble_assignment(assignment_kinds, horizon) if assignment_kinds else None
        report = run_comparison(
            series,
            horizon,
            split_ratio=self.config.split_ratio,
            harvey_correction=self.config.harvey_correction,
            assignment=assignment,
            **self.config.variant_fields(),
        )
        print(self.preview.report_preview(report))
        return [self.writer.write_frame(report.to_frame(), f"evaluate_h{horizon}.csv")]

    def dm_test(self, forecast_a: Path, forecast_b: Path, all_months: bool = False) -> List[Path]:
        frames = [pd.read_csv(path) for path in (forecast_a, forecast_b)]
        for path, frame in zip((forecast_a, forecast_b), frames):
            missing = {"month", "observed", "forecast"} - set(frame.columns)
            if missing:
                raise ConfigurationError(f"{path}: missing column(s) {sorted(missing)}")
        if not all_months:
            frames = [frame[frame["split"] == "test"] if "split" in frame else frame for frame in frames]
        first, second = frames
        if (list(first["month"]) != list(second["month"])
                or not np.array_equal(first["observed"].to_numpy(), second["observed"].to_numpy())):
            raise MisalignedResultsError("forecast files cover different months or observations")

        result = dm_test(
            (first["observed"] - first["forecast"]).to_numpy(),
            (second["observed"] - second["forecast"]).to_numpy(),
            horizon=self.config.horizon,
            harvey_correction=self.config.harvey_correction,
        )
        record = {
            "model_a": Path(forecast_a).name,
            "model_b": Path(forecast_b).name,
            "horizon": result.horizon,
            "n": len(first),
            "statistic": result.statistic,
            "p_value": result.p_value,
            "harvey_correction": result.harvey_correction,
        }
        print(self.preview.dm_preview(record))
        return [self.writer.write_frame(pd.DataFrame([record]), "dm_test.csv")]

    def synth(self, n: int, period: int, trend_slope: float, seasonal_amplitude: float,
              noise_std: float, start: str) -> List[Path]:
        series = gen_synthetic(
            n,
            period=period,
            trend_slope=trend_slope,
            seasonal_amplitude=seasonal_amplitude,
            noise_std=noise_std,
            seed=self.config.seed,
            start=start,
        )
        print(f"✅ Синтетический ряд: {n} наблюдений, seed {self.config.seed}")
        return [write_csv(series, self.writer.path("synthetic.csv"))]

    def lag_sweep(self, lags: Sequence[int]) -> List[Path]:
        series = self.load_series()
        horizon = self.config.horizon
        frame = lag_sweep(
            self.config.pipeline_variant(),
            series,
            lags=lags,
            split_ratio=self.config.split_ratio,
            horizon=horizon,
            selection=self.config.selection,
            slice_config=self.config.slice_config(horizon),
        )
        print(self.preview.lag_preview(frame))
        return [self.writer.write_frame(frame, "lag_sweep.csv")]


def setup_logging(level: str = "INFO") -> logging.Logger:
    """Setup logging to file (DEBUG) and console (stderr, given level)"""
    directory = log_dir(Path(__file__).parent / "logs")
    directory.mkdir(parents=True, exist_ok=True)

    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    log_file = directory / f"fire_forecaster_{timestamp}.log"

    file_handler = logging.FileHandler(log_file, encoding="utf-8")
    file_handler.setLevel(logging.DEBUG)
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(getattr(logging, level, logging.INFO))

    logging.basicConfig(
        level=logging.DEBUG,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        handlers=[file_handler, console_handler],
        force=True,
    )
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
    logging.info(f"Лог-файл: {log_file}")
    return logging.getLogger(__name__)


def _kind_list(text: str) -> List[str]:
    kinds = []
    for item in text.split(","):
        item = item.strip().upper().replace("-", "")
        if item:
            kinds.append(LearnerKind(item).value)
    return kinds


def _number(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)


def _parse_grids(items: Optional[Sequence[str]]) -> Dict[str, Dict[str, list]]:
    """KIND.PARAM=v1,v2 -> {KIND: {param: [v1, v2]}}"""
    grids: Dict[str, Dict[str, list]] = {}
    for item in items or ():
        target, _, values = item.partition("=")
        kind, _, param = target.partition(".")
        if not (kind and param and values):
            raise ConfigurationError(f"grid '{item}' must look like KIND.PARAM=v1,v2")
        kind = LearnerKind(kind.strip().upper().replace("-", "")).value
        grids.setdefault(kind, {})[param.strip().lower()] = [_number(v.strip()) for v in values.split(",")]
    return grids


def _parse_lags(text: str) -> List[int]:
    """'1-10' or '1,3,5'"""
    if "-" in text:
        low, high = (int(part) for part in text.split("-", 1))
        return list(range(low, high + 1))
    return [int(part) for part in text.split(",") if part.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Файл конфигурации KEY=value")
    common.add_argument("--data", dest="data_path", help="CSV с колонками date,fire_spots")
    common.add_argument("--lag", type=int, help="Число лагов (по умолчанию 10)")
    common.add_argument("--split-ratio", type=float, help="Доля обучающих строк (по умолчанию 0.70)")
    common.add_argument("--pca-threshold", type=float, help="Доля дисперсии для PCA (по умолчанию 0.95)")
    common.add_argument("--horizon", type=int, choices=(1, 2), help="Горизонт прогноза")
    common.add_argument("--preset", help="Именованный пайплайн, например stl-ensemble-1 или svr")
    common.add_argument("--output-dir", help="Каталог результатов")
    common.add_argument("--seed", type=int, help="Seed для синтетики")
    common.add_argument("--jobs", type=int, help="Число процессов grid search (-1: все ядра)")
    common.add_argument("--selection", "--paper-faithful-selection", dest="selection",
                        choices=("validation", "test"), help="Режим отбора моделей")
    common.add_argument("--slice-initial-window", type=int, help="Начальное окно временных срезов")
    common.add_argument("--slice-step", type=int, help="Шаг временных срезов")
    common.add_argument("--fixed-window", dest="slice_growing", action="store_false", default=None,
                        help="Окно фиксированной ширины вместо растущего")
    common.add_argument("--seasonal-span", type=int, help="Нечётное окно сезонного loess (по умолчанию periodic)")
    common.add_argument("--drop-remainder", action="store_true", default=None,
                        help="Не добавлять прогноз остатка при восстановлении")
    common.add_argument("--train-only-decomposition", action="store_true", default=None,
                        help="STL только по наблюдениям до каждой точки прогноза")
    common.add_argument("--harvey-correction", action="store_true", default=None,
                        help="Поправка Харви-Лейборна-Ньюболда для теста DM")

    parser = argparse.ArgumentParser(
        description="Fire Forecaster - прогноз очагов пожаров ансамблем по компонентам STL",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""Примеры использования:
  python fire_forecaster.py summarize
  python fire_forecaster.py forecast --preset stl-ensemble-1
  python fire_forecaster.py gridsearch --horizon 2 --jobs 4
  python fire_forecaster.py evaluate --horizon 1 --harvey-correction
  python fire_forecaster.py synth --n 255 --seed 7
        """,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("summarize", parents=[common], help="Статистика all/train/test")

    decompose = commands.add_parser("decompose", parents=[common], help="STL-разложение")
    decompose.add_argument("--no-plot", action="store_true", help="Без SVG")

    fit = commands.add_parser("fit", parents=[common], help="Обучение пайплайна")
    fit.add_argument("--explain-variance", action="store_true", help="Таблица дисперсии PCA")

    forecast = commands.add_parser("forecast", parents=[common], help="Прогноз h=1 и h=2")
    forecast.add_argument("--no-plot", action="store_true", help="Без SVG")

    grid = commands.add_parser("gridsearch", parents=[common], help="Перебор назначений")
    all_kinds = ",".join(kind.value for kind in LearnerKind)
    for component in COMPONENTS:
        grid.add_argument(f"--{component}-kinds", default=all_kinds,
                          help=f"Модели для компоненты {component} через запятую")
    grid.add_argument("--grid", action="append", metavar="KIND.PARAM=v1,v2",
                      help="Сетка гиперпараметров (можно повторять)")

    evaluate = commands.add_parser("evaluate", parents=[common], help="Сравнение моделей и тест DM")
    evaluate.add_argument("--assignment", help="Модели ансамбля seasonal,trend,remainder")

    dm = commands.add_parser("dm-test", parents=[common], help="Тест DM для двух файлов прогноза")
    dm.add_argument("forecast_a")
    dm.add_argument("forecast_b")
    dm.add_argument("--all-months", action="store_true", help="Все месяцы, а не только тест")

    synth = commands.add_parser("synth", parents=[common], help="Синтетический ряд")
    synth.add_argument("--n", type=int, default=255)
    synth.add_argument("--period", type=int, default=12)
    synth.add_argument("--trend-slope", type=float, default=0.0)
    synth.add_argument("--seasonal-amplitude", type=float, default=1.0)
    synth.add_argument("--noise-std", type=float, default=0.0)
    synth.add_argument("--start", default="2000-01")

    sweep = commands.add_parser("lag-sweep", parents=[common], help="RRMSE по лагам")
    sweep.add_argument("--lags", default="1-10", help="Диапазон '1-10' или список '1,3,5'")
    return parser


OVERRIDE_KEYS = (
    "data_path", "lag", "split_ratio", "pca_threshold", "horizon", "preset", "output_dir", "seed",
    "jobs", "selection", "slice_initial_window", "slice_step", "slice_growing", "seasonal_span",
    "drop_remainder", "train_only_decomposition", "harvey_correction",
)


def run(args: argparse.Namespace, writer_factory=ArtifactWriter) -> int:
    """Executes one parsed command; returns the exit status"""
    logger = logging.getLogger(__name__)
    writer = None
    try:
        overrides = {key: getattr(args, key, None) for key in OVERRIDE_KEYS}
        config = load_run_config(args.config, overrides)
        writer = writer_factory(config.output_dir)
        forecaster = FireForecaster(config, writer)
        logger.info(f"=== {args.command} ===")

        if args.command == "summarize":
            paths = forecaster.summarize()
        elif args.command == "decompose":
            paths = forecaster.decompose(plot=not args.no_plot)
        elif args.command == "fit":
            paths = forecaster.fit(explain_variance=args.explain_variance)
        elif args.command == "forecast":
            paths = forecaster.forecast(plot=not args.no_plot)
        elif args.command == "gridsearch":
            kinds = {c: _kind_list(getattr(args, f"{c}_kinds")) for c in COMPONENTS}
            paths = forecaster.gridsearch(kinds, _parse_grids(args.grid))
        elif args.command == "evaluate":
            kinds = _kind_list(args.assignment) if args.assignment else None
            if kinds is not None and len(kinds) != 3:
                raise ConfigurationError("--assignment needs exactly three kinds")
            paths = forecaster.evaluate(kinds)
        elif args.command == "dm-test":
            paths = forecaster.dm_test(Path(args.forecast_a), Path(args.forecast_b), args.all_months)
        elif args.command == "synth":
            paths = forecaster.synth(args.n, args.period, args.trend_slope,
                                     args.seasonal_amplitude, args.noise_std, args.start)
        else:
            paths = forecaster.lag_sweep(_parse_lags(args.lags))
    except KeyboardInterrupt:
        print("\n❌ Прервано пользователем", file=sys.stderr)
        if writer is not None:
            writer.rollback()
        return 130
    except Exception as e:
        if writer is not None:
            writer.rollback()
        logger.debug(f"Ошибка выполнения {args.command}", exc_info=True)
        print(error_line(e, default_stage=args.command), file=sys.stderr)
        return 1

    print("✅ Готово:")
    print(PreviewGenerator().files_preview(paths))
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(log_level())
    return run(args)


if __name__ == "__main__":
    sys.exit(main())

"""
Preview Generator
Console tables for statistics, fitted pipelines, grid searches and reports
"""

import math
from typing import Dict, Mapping, Optional, Sequence

import pandas as pd

from models.data_models import EvaluationReport, SummaryStats


def significant(value, digits: int = 4) -> str:
    """Rounds to significant digits; missing values render as '-'"""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "-"
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    return f"{float(value):.{digits}g}"


class PreviewGenerator:
    """Formats run results for the terminal"""

    def _header(self, title: str) -> list:
        return ["\n" + "=" * 60, title, "=" * 60]

    def _table(self, frame: pd.DataFrame) -> str:
        rendered = frame.copy()
        for column in rendered.columns:
            if pd.api.types.is_float_dtype(rendered[column]):
                rendered[column] = rendered[column].map(significant)
        return rendered.to_string(index=False)

    def summary_preview(
        self,
        stats: Mapping[str, SummaryStats],
        reference: Optional[Mapping[str, Mapping[str, float]]] = None,
    ) -> str:
        lines = self._header("📊 СТАТИСТИКА РЯДА")
        records = []
        for name, row in stats.items():
            records.append({"set": name, "count": row.count, "max": row.max, "min": row.min,
                            "mean": row.mean, "median": row.median, "std": row.std})
        lines.append(self._table(pd.DataFrame.from_records(records)))
        if reference:
            lines.append("\n📖 Опубликованные значения:")
            frame = pd.DataFrame.from_records([{"set": k, **v} for k, v in reference.items()])
            lines.append(self._table(frame.astype({"mean": float, "std": float})))
        return "\n".join(lines)

    def fit_preview(self, name: str, summary: pd.DataFrame, variance: Optional[pd.DataFrame] = None) -> str:
        lines = self._header(f"🧩 ПАЙПЛАЙН {name}")
        lines.append(self._table(summary))
        if variance is not None and not variance.empty:
            lines.append("\n📈 Объяснённая дисперсия PCA:")
            lines.append(self._table(variance))
        return "\n".join(lines)

    def grid_preview(self, frame: pd.DataFrame, top: int = 10) -> str:
        lines = self._header(f"🔎 GRID SEARCH (лучшие {min(top, len(frame))} из {len(frame)})")
        lines.append(self._table(frame.head(top).drop(columns=["error"])))
        return "\n".join(lines)

    def report_preview(self, report: EvaluationReport) -> str:
        lines = self._header(f"📊 СРАВНЕНИЕ МОДЕЛЕЙ, h = {report.horizon}")
        lines.append(f"База для теста Диболда-Мариано: {report.baseline_name}")
        lines.append(self._table(report.to_frame()))
        failed = [score for score in report.rows if score.dm_error]
        for score in failed:
            lines.append(f"⚠️  DM {score.name}: {score.dm_error}")
        return "\n".join(lines)

    def dm_preview(self, result: Dict[str, object]) -> str:
        lines = self._header("⚖️  ТЕСТ ДИБОЛДА-МАРИАНО")
        for key, value in result.items():
            lines.append(f"   {key}: {significant(value) if isinstance(value, float) else value}")
        return "\n".join(lines)

    def lag_preview(self, frame: pd.DataFrame) -> str:
        lines = self._header("🔁 ПОДБОР ЛАГА")
        lines.append(self._table(frame))
        return "\n".join(lines)

    def files_preview(self, paths: Sequence) -> str:
        return "\n".join(f"   📄 {path}" for path in paths)

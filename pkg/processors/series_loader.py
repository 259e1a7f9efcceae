"""
Series Loader
Reads and writes monthly fire-spot CSV files
"""

import logging
import re
from pathlib import Path
from typing import Sequence, Tuple, Union

import numpy as np
import pandas as pd

from models.data_models import TimeSeries
from models.errors import SeriesFormatError

logger = logging.getLogger(__name__)

DEFAULT_SCHEMA: Tuple[str, str] = ("date", "fire_spots")
_MONTH_PATTERN = re.compile(r"^\d{4}-\d{2}$")


def load_csv(
    path: Union[str, Path],
    schema: Sequence[str] = DEFAULT_SCHEMA,
    period: int = 12,
) -> TimeSeries:
    """
    Loads a monthly series; rows may come in any order

    Args:
        path: CSV file with a YYYY-MM date column and a numeric count column
        schema: (date column, value column)
        period: samples per seasonal cycle

    Returns:
        Gap-free TimeSeries sorted by month

    Raises:
        SeriesFormatError: missing file, bad row (with line number),
            duplicate month or gap
    """
    path = Path(path)
    date_column, value_column = schema
    logger.info("=== Series Loader ===")
    logger.info(f"Чтение файла: {path}")

    if not path.is_file():
        raise SeriesFormatError(f"file not found: {path}")

    try:
        frame = pd.read_csv(
            path,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=False,
            encoding="utf-8",
        )
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise SeriesFormatError(f"cannot parse {path}: {e}") from e

    frame.columns = [str(column).strip() for column in frame.columns]
    missing = [column for column in (date_column, value_column) if column not in frame.columns]
    if missing:
        raise SeriesFormatError(f"missing column(s) {missing} in header", line=1)

    months, values, lines = [], [], []
    for offset, (raw_date, raw_value) in enumerate(zip(frame[date_column], frame[value_column])):
        line = offset + 2  # header is line 1
        # blank lines come back as NaN
        raw_date = raw_date.strip() if isinstance(raw_date, str) else ""
        raw_value = raw_value.strip() if isinstance(raw_value, str) else ""
        if not raw_date and not raw_value:
            continue
        if not _MONTH_PATTERN.match(raw_date):
            raise SeriesFormatError(f"unparseable month '{raw_date}' (expected YYYY-MM)", line=line)
        try:
            month = pd.Period(raw_date, freq="M")
            value = float(raw_value)
        except ValueError as e:
            raise SeriesFormatError(f"unparseable row '{raw_date},{raw_value}': {e}", line=line) from e
        if not np.isfinite(value):
            raise SeriesFormatError(f"non-finite count '{raw_value}'", line=line)
        months.append(month)
        values.append(value)
        lines.append(line)

    if not months:
        raise SeriesFormatError(f"no data rows in {path}")

    index = pd.PeriodIndex(months, freq="M")
    duplicated = index.duplicated()
    if duplicated.any():
        position = int(np.argmax(duplicated))
        raise SeriesFormatError(f"duplicate month {index[position]}", line=lines[position])

    ordered = pd.Series(values, index=index).sort_index()
    expected = pd.period_range(ordered.index[0], ordered.index[-1], freq="M")
    gaps = expected.difference(ordered.index)
    if len(gaps) > 0:
        raise SeriesFormatError(
            f"gap in months: missing {', '.join(str(month) for month in gaps[:5])}"
            + (" ..." if len(gaps) > 5 else "")
        )

    series = TimeSeries(ordered.index[0], ordered.to_numpy(), period, name=value_column)
    logger.info(
        f"Загружено наблюдений: {len(series)} ({series.months[0]} – {series.months[-1]})"
    )
    return series


def write_csv(
    series: TimeSeries,
    path: Union[str, Path],
    schema: Sequence[str] = DEFAULT_SCHEMA,
) -> Path:
    """Writes a series in the input format; integral counts are written as integers"""
    path = Path(path)
    date_column, value_column = schema
    values = series.values
    if np.all(values == np.round(values)) and np.all(np.abs(values) < 2**53):
        values = values.astype(np.int64)
    frame = pd.DataFrame({date_column: series.months.strftime("%Y-%m"), value_column: values})
    frame.to_csv(path, index=False, lineterminator="\n")
    logger.debug(f"Записан ряд: {path} ({len(series)} строк)")
    return path

"""
CSV reports: per-epoch progression, long-form metric tables and selections.

Metric rows are long-form (method, k, fold, metric, value) and always written
in canonical order, so files produced by parallel runs are byte-identical to
sequential ones.
"""

from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Sequence, Union

import numpy as np
import pandas as pd

from ..config.constants import (
    AUC_METRIC,
    AUC_ROW_FOLD,
    AUC_ROW_K,
    FLOAT_FORMAT,
    FOLD_METRICS,
    METRIC_COLUMNS,
    PROGRESSION_COLUMNS,
    SELECTION_COLUMNS,
)
from ..core.exceptions import ReportError
from ..core.logging_config import get_logger
from .bands_curve import BandsCurve, bands_auc

logger = get_logger(__name__)

PathLike = Union[str, Path]


def _ordinal(value) -> tuple:
    """Sort key placing integers numerically before summary labels."""
    text = str(value)
    return (0, int(text), '') if text.lstrip('-').isdigit() else (1, 0, text)


def _metric_order(name: str) -> tuple:
    if name in FOLD_METRICS:
        return (0, FOLD_METRICS.index(name), name)
    return (1, 0, name)


def _row_key(row: Mapping) -> tuple:
    return (str(row['method']), _ordinal(row['k']), _ordinal(row['fold']), _metric_order(str(row['metric'])))


def metric_frame(rows: Iterable[Mapping]) -> pd.DataFrame:
    ordered = sorted(rows, key=_row_key)
    frame = pd.DataFrame(ordered, columns=METRIC_COLUMNS)
    frame['value'] = frame['value'].astype(np.float64)
    return frame


def _write_frame(frame: pd.DataFrame, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', newline='', encoding='utf-8') as handle:
        frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    return path


def write_metric_csv(rows: Iterable[Mapping], path: PathLike) -> pd.DataFrame:
    frame = metric_frame(rows)
    _write_frame(frame, path)
    logger.info("metric_report_written", path=str(path), rows=len(frame))
    return frame


def read_metric_csv(path: PathLike) -> pd.DataFrame:
    """Parse a metric CSV, raising ReportError on anything unusable."""
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype={'method': str, 'k': str, 'fold': str, 'metric': str})
    except FileNotFoundError:
        raise ReportError(f"sweep CSV {path} does not exist")
    except pd.errors.EmptyDataError:
        raise ReportError(f"sweep CSV {path} is empty")
    except (pd.errors.ParserError, ValueError) as e:
        raise ReportError(f"malformed sweep CSV {path}: {e}")
    if list(frame.columns) != METRIC_COLUMNS:
        raise ReportError(f"sweep CSV {path} has columns {list(frame.columns)}, expected {METRIC_COLUMNS}")
    if frame.empty:
        raise ReportError(f"sweep CSV {path} has no rows")
    try:
        frame['value'] = frame['value'].astype(np.float64)
    except ValueError as e:
        raise ReportError(f"non-numeric value in sweep CSV {path}: {e}")
    if frame[METRIC_COLUMNS[:-1]].isna().any().any():
        raise ReportError(f"sweep CSV {path} has empty fields")
    return frame


def mean_curves(frame: pd.DataFrame, metric: str = 'oa') -> Dict[str, BandsCurve]:
    """Per-method curve of the fold-mean of ``metric`` against k."""
    rows = frame[(frame['metric'] == metric) & frame['k'].astype(str).str.isdigit()
                 & frame['fold'].astype(str).str.isdigit()]
    if rows.empty:
        raise ReportError(f"no per-fold '{metric}' rows to build curves from")
    curves = {}
    for method, group in rows.groupby('method', sort=True):
        means = group.groupby(group['k'].astype(int))['value'].mean().sort_index()
        curves[str(method)] = BandsCurve(tuple(int(k) for k in means.index), tuple(float(v) for v in means.values))
    return curves


def auc_rows(curves: Mapping[str, BandsCurve]) -> List[Dict]:
    """One summary row per method whose curve has at least two points."""
    rows = []
    for method, curve in sorted(curves.items()):
        if len(curve) < 2:
            logger.warning("auc_skipped", method=method, points=len(curve))
            continue
        rows.append({'method': method, 'k': AUC_ROW_K, 'fold': AUC_ROW_FOLD,
                     'metric': AUC_METRIC, 'value': bands_auc(curve)})
    return rows


def fold_summary(frame: pd.DataFrame) -> pd.DataFrame:
    """Mean and sample standard deviation across folds per (method, k, metric)."""
    per_fold = frame[frame['fold'].astype(str).str.isdigit()]
    grouped = per_fold.groupby(['method', 'k', 'metric'], sort=False)['value']
    return grouped.agg(mean='mean', std=lambda v: v.std(ddof=1) if len(v) > 1 else 0.0).reset_index()


def write_progression_csv(records: Sequence, path: PathLike) -> pd.DataFrame:
    """Per-epoch rows: epoch, loss, val_oa and the semicolon-joined selection."""
    frame = pd.DataFrame(
        [(r.epoch, r.loss, r.val_oa, r.selection.joined()) for r in records],
        columns=PROGRESSION_COLUMNS,
    )
    _write_frame(frame, path)
    logger.info("progression_written", path=str(path), epochs=len(frame))
    return frame


def write_selection_csv(rows: Iterable[Mapping], path: PathLike) -> pd.DataFrame:
    ordered = sorted(rows, key=lambda r: (str(r['method']), _ordinal(r['k']), _ordinal(r['fold'])))
    frame = pd.DataFrame(ordered, columns=SELECTION_COLUMNS)
    _write_frame(frame, path)
    return frame


def read_selection_csv(path: PathLike) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (OSError, pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        raise ReportError(f"cannot read selections CSV {path}: {e}")
    if list(frame.columns) != SELECTION_COLUMNS:
        raise ReportError(f"selections CSV {path} has columns {list(frame.columns)}")
    return frame

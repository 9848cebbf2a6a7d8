"""
Report loading and aggregation utilities
"""
import logging
import pandas as pd
from typing import Dict, List, Tuple
from pathlib import Path

from ..errors import SchemaError, ValidationError
from ..utils.artifacts import decode_report, load_artifact
from ..config import SCHEMAS
from ..convergence.lab import ConvergenceReport, deviation_trend_ok, seed_spread

logger = logging.getLogger(__name__)


class ReportLoader:
    """Finds and loads report artifacts under a runs directory"""

    @staticmethod
    def find_reports(runs_dir: Path) -> List[Path]:
        """Every report.json below runs_dir, in path order"""
        runs_dir = Path(runs_dir)
        if not runs_dir.is_dir():
            raise ValidationError(f"runs directory not found: {runs_dir}")
        return sorted(runs_dir.rglob("report.json"))

    @staticmethod
    def load_reports(paths: List[Path]) -> List[Tuple[Path, ConvergenceReport]]:
        """Decode reports; files with another schema are skipped with a warning"""
        reports = []
        for path in paths:
            try:
                reports.append((path, decode_report(load_artifact(path, SCHEMAS['report']))))
            except SchemaError as exc:
                logger.warning(f"skipping {path}: {exc}")
        return reports


class ReportAggregator:
    """Turns reports into the tables the report command writes"""

    @staticmethod
    def combine(reports: List[ConvergenceReport], labels: List[str]) -> pd.DataFrame:
        """One row per record, tagged with its run"""
        frames = []
        for report, label in zip(reports, labels):
            frame = report.to_frame()
            frame.insert(0, 'run', label)
            frame.insert(1, 'm', report.m)
            frames.append(frame)
        if not frames:
            return pd.DataFrame()
        return pd.concat(frames, ignore_index=True)

    @staticmethod
    def trend_table(combined: pd.DataFrame) -> pd.DataFrame:
        """Per run and eps: mean values and the spread of sup deviation across seeds"""
        if combined.empty:
            return pd.DataFrame(columns=['run', 'eps', 'sup_dev', 'dF_budget', 'seed_spread'])
        ok = combined[combined['status'] == 'ok']
        summary = ok.groupby(['run', 'eps'], sort=False).agg(
            sup_dev=('sup_dev', 'mean'),
            dF_budget=('dF_budget', 'mean'),
            seed_spread=('sup_dev', lambda v: seed_spread(v.tolist())),
        ).reset_index()
        return summary.sort_values(['run', 'eps'], ascending=[True, False]).reset_index(drop=True)

    @staticmethod
    def trend_flags(summary: pd.DataFrame) -> Dict[str, bool]:
        """deviation_trend_ok per run, along decreasing eps"""
        flags = {}
        for run, rows in summary.groupby('run', sort=False):
            ordered = rows.sort_values('eps', ascending=False)
            flags[run] = deviation_trend_ok(ordered['sup_dev'].tolist())
        return flags


def load_and_process_all_reports(runs_dir: Path) -> Dict[str, pd.DataFrame]:
    """
    Load every report under runs_dir and build the report tables

    Returns:
        {'combined': per-record rows, 'trend': per (run, eps) summary,
         'runs': per-run deviation trend flag}
    """
    runs_dir = Path(runs_dir)
    loaded = ReportLoader.load_reports(ReportLoader.find_reports(runs_dir))
    reports = [report for _, report in loaded]
    labels = [str(path.parent.relative_to(runs_dir)) for path, _ in loaded]
    print(f"✅ Loaded {len(reports)} report(s) from {runs_dir}")
    combined = ReportAggregator.combine(reports, labels)
    trend = ReportAggregator.trend_table(combined)
    flags = ReportAggregator.trend_flags(trend)
    return {
        'combined': combined,
        'trend': trend,
        'runs': pd.DataFrame({'run': list(flags), 'trend_ok': list(flags.values())}, columns=['run', 'trend_ok']),
    }

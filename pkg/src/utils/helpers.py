"""
Utility functions for file operations and data export
"""
import pandas as pd
import numpy as np
from pathlib import Path
from typing import Dict, Iterable

from ..convergence.lab import ConvergenceReport


def export_table(frame: pd.DataFrame, path: Path) -> Path:
    """
    Export a table to CSV

    Args:
        frame: table to write
        path: target file; parent directories are created
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, encoding="utf-8-sig", index=False)
    print(f"✅ Saved: {path}")
    return path


def export_report_tables(report: ConvergenceReport, output_dir: Path) -> Dict[str, Path]:
    """
    Export the per-record table and the plot data of a convergence report

    Args:
        report: suite result
        output_dir: directory to save files

    Returns:
        {'report': ..., 'plot': ...} file paths
    """
    output_dir = Path(output_dir)
    return {
        'report': export_table(report.to_frame(), output_dir / "report.csv"),
        'plot': export_table(report.plot_rows(), output_dir / "plot.csv"),
    }


def write_mesh(vertices: np.ndarray, faces: np.ndarray, path: Path) -> Path:
    """Plain-text mesh: 'v x y z' lines, then 1-based 'f a b c' lines"""
    path = Path(path)
    with open(path, 'w', encoding='utf-8') as f:
        for x, y, z in vertices:
            f.write(f"v {x:.9g} {y:.9g} {z:.9g}\n")
        for a, b, c in faces:
            f.write(f"f {a + 1} {b + 1} {c + 1}\n")
    print(f"✅ Saved: {path}")
    return path


def validate_input_files(files: Iterable) -> bool:
    """
    Validate that required input files exist

    Args:
        files: file paths to check

    Returns:
        True if all files exist, False otherwise
    """
    missing_files = [str(Path(f)) for f in files if not Path(f).exists()]

    if missing_files:
        print("❌ Missing required files:")
        for file in missing_files:
            print(f"   - {file}")
        return False

    return True

# ReportExporter.py
# JSON reports and CSV series, written through a temporary file and renamed
# into place.

import csv
import datetime
import io
import json
import math
import os
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence
import logging

import numpy as np

from .EulerFV import GradientHistory, SimulationResult
from .GasBasics import VERSION
from .RiemannODE import PhaseCurve, Trajectory

logger = logging.getLogger(__name__)

SIGNIFICANT = 17

TRAJECTORY_COLUMNS = ("t", "R1", "R2", "C")
RAY_TRAJECTORY_COLUMNS = ("t", "R1", "R2", "u1", "u2", "u3", "P1", "P2", "P3", "C")
P_TRAJECTORY_COLUMNS = ("t", "R1", "R2", "P1", "P2", "P3", "C")
PORTRAIT_COLUMNS = ("curve", "seed_R1", "seed_R2", "outcome", "loop", "R1", "R2")
SNAPSHOT_COLUMNS = ("x", "rho", "v", "p", "S")
HISTORY_COLUMNS = ("t", "dvdx_max", "dpdx_max", "x_argmax")


def format_float(x: float) -> str:
    return format(x, f".{SIGNIFICANT}g")


def _plain(obj: Any) -> Any:
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def _emit(obj: Any, indent: int, level: int, out: List[str]):
    obj = _plain(obj)
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or obj is True or obj is False:
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj) if math.isfinite(obj) else "null")
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, value) in enumerate(obj.items()):
            out.append(f"{pad}{json.dumps(str(key), ensure_ascii=False)}: ")
            _emit(value, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, value in enumerate(obj):
            out.append(pad)
            _emit(value, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} to JSON")


def dumps_report(obj: Any, indent: int = 2) -> str:
    """
    JSON text with floats at 17 significant digits and keys in insertion
    order. Non-finite floats become null.
    """
    out: List[str] = []
    _emit(obj, indent, 0, out)
    out.append("\n")
    return "".join(out)


def _cell(value: Any) -> str:
    value = _plain(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value) if math.isfinite(value) else ""
    return str(value)


def csv_text(rows: Iterable[Dict[str, Any]], columns: Sequence[str]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(name)) for name in columns])
    return buffer.getvalue()


class ReportExporter:
    """
    Writes reports and series below root_dir.

    Each file is first written to a temporary sibling and then moved over
    the target with os.replace, so readers never see half a file.
    """

    def __init__(self, root_dir: str = "."):
        self.root_dir: Path = Path(root_dir)
        self.written: List[Path] = []

    def path(self, filename: str) -> Path:
        path = Path(filename)
        return path if path.is_absolute() else self.root_dir / path

    def write_text(self, text: str, filename: str) -> Path:
        target = self.path(filename)
        target.parent.mkdir(parents=True, exist_ok=True)
        stamp = datetime.datetime.now().microsecond
        temp = target.with_name(f".{target.name}.{os.getpid()}.{stamp}.tmp")
        try:
            temp.write_text(text, encoding="utf-8")
            os.replace(temp, target)
        finally:
            if temp.exists():
                temp.unlink()
        self.written.append(target)
        logger.info(f"wrote {target}")
        return target

    def write_json(self, report: Dict[str, Any], filename: str) -> Path:
        return self.write_text(dumps_report(report), filename)

    def write_csv(self, rows: Iterable[Dict[str, Any]], columns: Sequence[str], filename: str) -> Path:
        return self.write_text(csv_text(rows, columns), filename)

    def write_trajectory(self, traj: Trajectory, filename: str) -> Path:
        if traj.kind == "ray":
            columns = RAY_TRAJECTORY_COLUMNS
        elif traj.kind == "P":
            columns = P_TRAJECTORY_COLUMNS
        else:
            columns = TRAJECTORY_COLUMNS
        return self.write_csv(traj.rows(), columns, filename)

    def write_portrait(self, curves: Sequence[PhaseCurve], filename: str) -> Path:
        """One polyline per seed; a failed seed gets a single row tagged error."""
        rows: List[Dict[str, Any]] = []
        for i, curve in enumerate(curves):
            head = {"curve": i, "seed_R1": curve.seed[0], "seed_R2": curve.seed[1], "loop": curve.loop}
            if curve.error is not None:
                rows.append(dict(head, outcome="error"))
                continue
            outcome = curve.outcome.value if curve.outcome is not None else ""
            for r1, r2 in curve.polyline():
                rows.append(dict(head, outcome=outcome, R1=r1, R2=r2))
        return self.write_csv(rows, PORTRAIT_COLUMNS, filename)

    def write_history(self, history: GradientHistory, filename: str) -> Path:
        return self.write_csv(history.rows(), HISTORY_COLUMNS, filename)

    def write_simulation(self, result: SimulationResult, prefix: str) -> List[Path]:
        """History as <prefix>_history.csv and every snapshot as <prefix>_t<k>.csv."""
        paths = [self.write_history(result.history, f"{prefix}_history.csv")]
        for k, snap in enumerate(result.snapshots):
            paths.append(self.write_csv(snap.rows(), SNAPSHOT_COLUMNS, f"{prefix}_t{k}.csv"))
        return paths


def report_header(command: str, scenario: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Leading block of every JSON report. No timestamps, so reports are reproducible."""
    header: Dict[str, Any] = {"tool": "gdblow", "version": VERSION, "command": command}
    if scenario is not None:
        header["scenario"] = scenario
    return header

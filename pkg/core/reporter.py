#!/usr/bin/env python3
"""
Report Writer
Turns spectra, stationary curves, sweeps and summaries into CSV / JSON files,
and bundles a result directory into a zip for download.
"""

import csv
import io
import json
import math
import zipfile
from pathlib import Path
from typing import Any, Iterable, List, Sequence, Tuple, Union

from core.analysis import VelocitySpectrum
from core.models import SweepRow
from core.stationary import GdtCurve
from utils.helpers import format_number, safe_log

SPECTRUM_HEADER = ["v_m_per_s", "density"]
CURVE_HEADER = ["E_neV", "T", "R", "tau_ns"]
SEMICLASSICAL_HEADER = ["a_m_per_s2", "dv_classical", "outcome"]
SWEEP_COLUMNS = ["d_peak_v_m_per_s", "dv_semiclassical_m_per_s", "a_tau_m_per_s", "outcome"]
ENERGY_SCAN_COLUMNS = ["T", "tau_ns", "dv_m_per_s"]

PathLike = Union[str, Path]


def _clean(value: Any) -> Any:
    """JSON-safe copy: NaN / inf become None, tuples become lists."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {str(key): _clean(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(item) for item in value]
    if hasattr(value, "item") and callable(value.item):
        return _clean(value.item())
    return value


def write_rows(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([cell if isinstance(cell, str) else format_number(cell) for cell in row])
    safe_log(f"Reporter: wrote {path}", "DEBUG")
    return str(path)


def write_json(path: PathLike, payload: Any) -> str:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_clean(payload), indent=2, allow_nan=False) + "\n", encoding="utf-8")
    safe_log(f"Reporter: wrote {path}", "DEBUG")
    return str(path)


def write_spectrum_csv(path: PathLike, values: VelocitySpectrum) -> str:
    return write_rows(path, SPECTRUM_HEADER, values.rows())


def write_curve_csv(path: PathLike, curve: GdtCurve) -> str:
    return write_rows(path, CURVE_HEADER, curve.rows())


def write_semiclassical_csv(path: PathLike, rows: List[Tuple[float, float, str]]) -> str:
    return write_rows(path, SEMICLASSICAL_HEADER, rows)


def sweep_header(vary: str, energy_scan: bool = False) -> List[str]:
    return [vary] + SWEEP_COLUMNS + (ENERGY_SCAN_COLUMNS if energy_scan else []) + ["error"]


def write_sweep_csv(path: PathLike, vary: str, rows: List[SweepRow], energy_scan: bool = False) -> str:
    def cells(row: SweepRow) -> List[Any]:
        line = [row.value, row.d_peak_v, row.dv_semiclassical, row.a_tau, row.outcome]
        if energy_scan:
            line += [row.transmission, row.tau_ns, row.dv]
        return line + [row.error]

    return write_rows(path, sweep_header(vary, energy_scan), (cells(row) for row in rows))


def bundle_zip(paths: Iterable[PathLike], root: PathLike) -> bytes:
    """Zip archive of the given files, stored relative to root."""
    root = Path(root)
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w", compression=zipfile.ZIP_DEFLATED) as archive:
        for path in sorted({Path(p) for p in paths}):
            try:
                name = path.relative_to(root)
            except ValueError:
                name = Path(path.name)
            archive.write(path, arcname=str(name))
    buffer.seek(0)
    return buffer.getvalue()

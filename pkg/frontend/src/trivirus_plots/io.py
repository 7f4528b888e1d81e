"""Reading and validating trajectory CSVs and simulation reports.

The CSV contract: first column ``t``, followed by ``x{k}_{i}`` for
viruses k = 1..m and nodes i = 1..n in virus-major order (1-based
labels). Anything else is rejected, loudly.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class MalformedCsv(Exception):
    """The CSV does not follow the trajectory file contract."""


class MalformedReport(Exception):
    """The report file is unreadable or lacks the expected structure."""


_LABEL = re.compile(r"^x(\d+)_(\d+)$")


@dataclass(frozen=True)
class TrajectoryData:
    """Parsed trajectory samples: times (S,) and values (S, m, n)."""

    times: np.ndarray
    values: np.ndarray

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @property
    def n(self) -> int:
        return self.values.shape[2]


def _parse_header(line: str) -> tuple[int, int]:
    names = [piece.strip() for piece in line.strip().split(",")]
    if not names or names[0] != "t":
        raise MalformedCsv(f"first column must be 't', got {names[:1]}")
    pairs = []
    for name in names[1:]:
        match = _LABEL.match(name)
        if match is None:
            raise MalformedCsv(f"column name {name!r} does not match x<virus>_<node>")
        pairs.append((int(match.group(1)), int(match.group(2))))
    if not pairs:
        raise MalformedCsv("no state columns found")
    m = max(k for k, _ in pairs)
    n = max(i for _, i in pairs)
    expected = [(k, i) for k in range(1, m + 1) for i in range(1, n + 1)]
    if pairs != expected:
        raise MalformedCsv(
            f"columns must enumerate x1_1..x{m}_{n} in virus-major order"
        )
    return m, n


def load_trajectory(csv_path) -> TrajectoryData:
    """Parse and validate a trajectory CSV.

    Raises:
        MalformedCsv: missing file, bad header, no samples, ragged rows,
            non-numeric cells, or non-increasing times.
    """
    path = Path(csv_path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise MalformedCsv(f"cannot read {path}: {exc}") from exc
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise MalformedCsv(f"{path} is empty")
    m, n = _parse_header(lines[0])
    width = 1 + m * n
    if len(lines) == 1:
        raise MalformedCsv(f"{path} has a header but no samples")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != width:
            raise MalformedCsv(f"{path}:{lineno}: expected {width} cells, got {len(cells)}")
        try:
            rows.append([float(cell) for cell in cells])
        except ValueError as exc:
            raise MalformedCsv(f"{path}:{lineno}: non-numeric cell ({exc})") from exc
    data = np.asarray(rows)
    times = data[:, 0]
    if np.any(np.diff(times) <= 0):
        raise MalformedCsv(f"{path}: sample times must be strictly increasing")
    values = data[:, 1:].reshape(len(rows), m, n)
    return TrajectoryData(times=times, values=values)


def load_report_levels(report_path) -> np.ndarray | None:
    """Target levels (m, n) from a simulation report, or None when absent.

    Raises:
        MalformedReport: unreadable file or invalid JSON.
    """
    path = Path(report_path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise MalformedReport(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedReport(f"{path} is not valid JSON: {exc}") from exc
    levels = doc.get("convergence", {}).get("target_levels")
    if levels is None:
        return None
    try:
        return np.asarray(levels, dtype=float)
    except (TypeError, ValueError) as exc:
        raise MalformedReport(f"{path}: target_levels is not a numeric array") from exc

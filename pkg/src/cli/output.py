"""CSV and JSON writers for experiment outputs."""

import csv
import json
import logging
import threading
from pathlib import Path
from typing import Any, Iterable, List, Sequence, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

_write_lock = threading.Lock()


def format_value(value: Any) -> str:
    """Full-precision text: repr for floats, '(a+bj)' for complex with nonzero imaginary part."""
    if isinstance(value, (complex, np.complexfloating)):
        value = complex(value)
        if value.imag == 0:
            return repr(value.real)
        return repr(value)
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def parse_value(text: str) -> Union[float, complex]:
    """Inverse of ``format_value`` for numeric cells."""
    if "j" in text:
        return complex(text)
    return float(text)


def write_rows_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    with _write_lock, path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    logger.info(f"Wrote {path}")
    return path


def matrix_rows(matrix: np.ndarray, labels: Sequence[str]) -> List[List[str]]:
    return [[label] + [format_value(v) for v in row] for label, row in zip(labels, matrix)]


def write_matrix_csv(path: Path, matrix: np.ndarray, labels: Sequence[str]) -> Path:
    """Square matrix with row and column labels."""
    return write_rows_csv(path, [""] + list(labels), matrix_rows(np.asarray(matrix), labels))


def read_matrix_csv(path: Path) -> Tuple[List[str], np.ndarray]:
    """Labels and entries of a file written by ``write_matrix_csv``."""
    with Path(path).open(newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    labels = rows[0][1:]
    values = [[parse_value(cell) for cell in row[1:]] for row in rows[1:]]
    dtype = complex if any(isinstance(v, complex) for row in values for v in row) else float
    return labels, np.array(values, dtype=dtype)


def _json_default(value: Any) -> Any:
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(np.real(value)), "im": float(np.imag(value))}
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def write_json(path: Path, data: Any) -> Path:
    path = Path(path)
    with _write_lock:
        path.write_text(json.dumps(data, indent=2, default=_json_default), encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path

"""JSON and CSV helpers.

Numbers are written with 17 significant digits so that identical inputs give
byte-identical output and every double survives a round trip.
"""
import csv
import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO, Union

import numpy as np

from symcentral.utils.errors import InvalidInput

logger = logging.getLogger(__name__)

DIGITS = 17


def format_number(value: float, digits: int = DIGITS) -> str:
    """Format a float with a fixed number of significant digits ('null' if not finite)."""
    value = float(value)
    if not math.isfinite(value):
        return 'null'
    if value == 0.0:
        return '0.0'
    text = f"{value:.{digits}g}"
    if 'e' not in text and '.' not in text and 'n' not in text:
        text += '.0'
    return text


def _encode(obj: Any, indent: int, level: int, digits: int) -> str:
    pad = ' ' * (indent * (level + 1))
    end = ' ' * (indent * level)
    if obj is None:
        return 'null'
    if isinstance(obj, (bool, np.bool_)):
        return 'true' if obj else 'false'
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_number(obj, digits)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return '{}'
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1, digits)}"
                 for k, v in obj.items()]
        return '{\n' + ',\n'.join(items) + '\n' + end + '}'
    if isinstance(obj, (list, tuple)):
        if not obj:
            return '[]'
        # Flat numeric rows stay on one line
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool)
               for v in obj):
            return '[' + ', '.join(_encode(v, indent, level + 1, digits) for v in obj) + ']'
        items = [pad + _encode(v, indent, level + 1, digits) for v in obj]
        return '[\n' + ',\n'.join(items) + '\n' + end + ']'
    raise TypeError(f"Cannot serialise object of type {type(obj).__name__}")


def dumps_json(obj: Any, indent: int = 2, digits: int = DIGITS) -> str:
    """Serialise to JSON text with fixed-precision numbers."""
    return _encode(obj, indent, 0, digits) + '\n'


def write_json(obj: Any, path: Union[str, Path], digits: int = DIGITS) -> Path:
    path = Path(path)
    path.write_text(dumps_json(obj, digits=digits))
    logger.debug(f"Wrote {path}")
    return path


def read_json(path: Union[str, Path]) -> Dict:
    """Read a JSON input file, mapping every failure onto InvalidInput."""
    path = Path(path)
    if not path.exists():
        raise InvalidInput(f"File not found: {path}")
    try:
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise InvalidInput(f"{path}: invalid JSON ({e})")


def _write_rows(f: TextIO, rows: List[Dict[str, Any]], fieldnames: Optional[Sequence[str]],
                digits: int) -> None:
    if fieldnames is None:
        fieldnames = list(rows[0].keys()) if rows else []
    writer = csv.DictWriter(f, fieldnames=list(fieldnames), lineterminator='\n')
    writer.writeheader()
    for row in rows:
        writer.writerow({
            k: (format_number(v, digits) if isinstance(v, (float, np.floating)) else v)
            for k, v in row.items()
        })


def dumps_csv(rows: Iterable[Dict[str, Any]], fieldnames: Optional[Sequence[str]] = None,
              digits: int = DIGITS) -> str:
    """CSV text of dict rows, formatting floats like the JSON writer."""
    buf = io.StringIO()
    _write_rows(buf, list(rows), fieldnames, digits)
    return buf.getvalue()


def write_csv(rows: Iterable[Dict[str, Any]], path: Union[str, Path],
              fieldnames: Optional[Sequence[str]] = None, digits: int = DIGITS) -> Path:
    """Write dict rows to CSV, formatting floats like the JSON writer."""
    rows = list(rows)
    path = Path(path)
    with open(path, 'w', newline='') as f:
        _write_rows(f, rows, fieldnames, digits)
    logger.info(f"Wrote {len(rows)} rows to {path}")
    return path


def parse_float_list(text: str) -> List[float]:
    """Parse '1.2,0.6,0.2' into floats."""
    try:
        return [float(t) for t in text.split(',') if t.strip()]
    except ValueError:
        raise InvalidInput(f"Expected comma-separated numbers, got {text!r}")


def parse_range(text: str) -> List[float]:
    """Parse 'start:stop:count' into an inclusive evenly spaced list."""
    parts = text.split(':')
    try:
        if len(parts) == 3:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1:
                raise ValueError
            return [float(v) for v in np.linspace(start, stop, count)]
        return parse_float_list(text)
    except ValueError:
        raise InvalidInput(f"Expected START:STOP:COUNT or a list, got {text!r}")

"""JSON and CSV report writing with embedded configuration."""

import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from ucover.config import canonical_json

logger = logging.getLogger(__name__)

CONFIG_PREFIX = "# config: "


def _plain(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json")
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value


def envelope(config: Any, results: Any) -> Dict[str, Any]:
    """Wrap results in the {config, version, results} envelope."""
    from ucover import __version__

    return {"config": _plain(config), "version": __version__, "results": _plain(results)}


def dumps_json(payload: Any) -> str:
    """Serialize a payload deterministically (sorted keys, shortest round-trip floats)."""
    return json.dumps(_plain(payload), sort_keys=True, indent=2, allow_nan=True) + "\n"


def write_json(path: Optional[str], payload: Any) -> None:
    """Write a JSON payload to a file, or to stdout when path is None."""
    text = dumps_json(payload)
    if path is None:
        sys.stdout.write(text)
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text)
    logger.info(f"Wrote JSON report to {path}")


def dumps_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], config: Any) -> str:
    """Render CSV text with a leading '# config:' comment line."""
    buffer = io.StringIO()
    buffer.write(CONFIG_PREFIX + canonical_json(_plain(config)) + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in _plain(list(row))])
    return buffer.getvalue()


def write_csv(
    path: Optional[str], header: Sequence[str], rows: Iterable[Sequence[Any]], config: Any
) -> None:
    """Write CSV to a file, or to stdout when path is None."""
    text = dumps_csv(header, rows, config)
    if path is None:
        sys.stdout.write(text)
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text)
    logger.info(f"Wrote CSV report to {path}")


def read_csv(text: str) -> Tuple[Dict[str, Any], List[str], List[List[str]]]:
    """Parse CSV text produced by dumps_csv.

    Returns:
        (config, header, rows) with cell values left as strings
    """
    lines = text.splitlines()
    if not lines or not lines[0].startswith(CONFIG_PREFIX):
        raise ValueError("missing '# config:' line")
    config = json.loads(lines[0][len(CONFIG_PREFIX) :])
    reader = csv.reader(lines[1:])
    header = next(reader)
    return config, header, [row for row in reader]

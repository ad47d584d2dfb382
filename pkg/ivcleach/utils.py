"""Utilities functions
"""
from pathlib import Path
from typing import Dict

import yaml

from ivcleach.errors import ReportError


def dump_yaml(data: Dict, output_fn: Path) -> Path:
    try:
        with output_fn.open("w", encoding="utf-8") as fn:
            yaml.dump(
                data, fn, default_flow_style=False, sort_keys=False, allow_unicode=True
            )
    except OSError as e:
        raise ReportError(f"cannot write: {e.strerror}", path=output_fn)
    return output_fn


def load_yaml(fn: Path) -> Dict:
    with fn.open(encoding="utf-8") as f:
        return yaml.safe_load(f)


def write_text(text: str, output_fn: Path) -> Path:
    try:
        with output_fn.open("w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    except OSError as e:
        raise ReportError(f"cannot write: {e.strerror}", path=output_fn)
    return output_fn

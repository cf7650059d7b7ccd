from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any

from ..errors import InvalidInput

STDIO = "-"


def dumps(payload: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def read_json(path: str | Path) -> Any:
    """Load JSON from ``path``; ``-`` reads stdin."""
    try:
        if str(path) == STDIO:
            return json.load(sys.stdin)
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise InvalidInput(f"input file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"malformed JSON in {path}", line=exc.lineno, column=exc.colno) from exc


def write_json(payload: Any, path: str | Path | None = None) -> None:
    """Write canonical JSON to ``path`` or stdout."""
    text = dumps(payload)
    if path is None or str(path) == STDIO:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")


__all__ = ["dumps", "read_json", "write_json"]

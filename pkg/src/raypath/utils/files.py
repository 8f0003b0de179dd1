"""Output file helpers: directories, atomic writes and JSON records."""

import os
import json
import tempfile
from pathlib import Path
from typing import Any, Union

PathLike = Union[str, Path]


def ensure_dir_exists(path: PathLike) -> Path:
    """Ensure a directory exists and return it.

    Args:
        path: Directory to create (parents included)

    Returns:
        Path: The directory path, user home expanded
    """
    directory = Path(path).expanduser()
    os.makedirs(directory, exist_ok=True)
    return directory


def atomic_write_text(path: PathLike, text: str) -> Path:
    """Write text through a temporary sibling file, then rename it into place.

    Readers never observe a partially written file, and re-running a command
    overwrites the previous output in one step.

    Args:
        path: Destination file
        text: Content to write (UTF-8, newlines untranslated)

    Returns:
        Path: The destination path
    """
    target = Path(path).expanduser()
    ensure_dir_exists(target.parent)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp_name, target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return target


def dumps_json(data: Any) -> str:
    """Serialize a record deterministically (sorted keys, trailing newline)."""
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def read_text(path: PathLike) -> str:
    """Read a UTF-8 text file."""
    return Path(path).expanduser().read_text(encoding="utf-8")

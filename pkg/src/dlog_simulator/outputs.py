"""
Output helpers
==============
Atomic file writes and the provenance header carried by every output file.
"""

import logging
import os
import tempfile
from pathlib import Path

import git

from dlog_simulator import __version__

logger = logging.getLogger(__name__)


def git_commit() -> str:
    """Short hash of the checkout the simulator runs from, or 'unknown'."""
    try:
        repo = git.Repo(search_parent_directories=True)
        return repo.head.object.hexsha[:8]
    except Exception:
        return "unknown"


def provenance_lines(flags: dict) -> list[str]:
    """Comment lines describing how an output was produced (no timestamps)."""
    rendered = " ".join(f"{key}={value}" for key, value in sorted(flags.items()))
    return [
        f"# dlog-simulator version={__version__} commit={git_commit()}",
        f"# flags {rendered}",
    ]


def atomic_write(path: str | Path, data: bytes | str) -> Path:
    """Write to a temporary file in the target directory, then rename over `path`."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = data.encode("utf-8") if isinstance(data, str) else data

    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(payload)
        os.replace(tmp_name, path)
    except Exception:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise

    logger.debug(f"📝 Wrote {len(payload)} bytes to {path}")
    return path

"""Which orthofit produced a result: package version plus source revision.

The revision comes from the first non-empty of ORTHOFIT_REVISION, GIT_COMMIT,
GITHUB_SHA, CI_COMMIT_SHA, else from ``git rev-parse HEAD`` in the checkout
that holds this file. Resolved once, on first use.
"""

from __future__ import annotations

import os
import subprocess
from functools import lru_cache
from pathlib import Path
from typing import Dict, Optional


REVISION_ENV_KEYS = ("ORTHOFIT_REVISION", "GIT_COMMIT", "GITHUB_SHA", "CI_COMMIT_SHA")

_SHORT = 7


def _find_git_root(start: Path, max_hops: int = 10) -> Optional[Path]:
    here = start.resolve()
    candidates = [here] if here.is_dir() else []
    candidates += list(here.parents)
    for p in candidates[: max_hops + 1]:
        if (p / ".git").exists():
            return p
    return None


def _git_head(root: Path) -> str:
    try:
        proc = subprocess.run(
            ["git", "rev-parse", "HEAD"],
            cwd=str(root),
            capture_output=True,
            text=True,
            timeout=5,
            check=True,
        )
    except (OSError, subprocess.SubprocessError):
        return ""
    return proc.stdout.strip()


@lru_cache(maxsize=1)
def get_revision_full() -> str:
    """Full revision string, or "" when none is known."""

    for key in REVISION_ENV_KEYS:
        val = os.environ.get(key, "").strip()
        if val:
            return val
    root = _find_git_root(Path(__file__))
    return _git_head(root) if root is not None else ""


def get_revision(short: bool = True) -> str:
    full = get_revision_full()
    if not full:
        return "unknown"
    return full[:_SHORT] if short else full


def get_version() -> str:
    from . import __version__

    return str(__version__ or "").strip() or "0.0.0"


def get_version_with_revision() -> str:
    """``<version>+g<short sha>``, or the bare version without a revision."""

    rev = get_revision(short=True)
    ver = get_version()
    return ver if rev == "unknown" else f"{ver}+g{rev}"


def build_record(build_tag: Optional[str] = None) -> Dict[str, str]:
    """Version fields stored in run manifests."""

    rec = {"version": get_version(), "revision": get_revision(short=False)}
    tag = str(build_tag or "").strip()
    if tag:
        rec["build_tag"] = tag
    return rec

# console.py
"""stderr console for progress logs and summary tables.

stdout is reserved for command output (points, CSV, values), so everything
here goes to stderr.
"""

from __future__ import annotations

import sys
from typing import Any, Iterable, Optional, Sequence

try:
    from rich import box
    from rich.console import Console
    from rich.markup import escape
    from rich.table import Table

    console: Optional[Console] = Console(stderr=True, highlight=False)
    HAVE_RICH = True
except Exception:
    console = None
    HAVE_RICH = False


def log(msg: str) -> None:
    if HAVE_RICH and console is not None:
        console.log(msg, markup=False)
    else:
        print(msg, file=sys.stderr)


def error(msg: str) -> None:
    if HAVE_RICH and console is not None:
        console.print(f"[bold red]error:[/] {escape(msg)}", highlight=False)
    else:
        print(f"error: {msg}", file=sys.stderr)


def _cell(v: Any) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def render_table(title: str, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """Print a summary table to stderr."""

    rows = [list(r) for r in rows]
    if HAVE_RICH and console is not None:
        t = Table(title=title, box=box.SIMPLE_HEAVY, expand=False)
        for i, c in enumerate(columns):
            t.add_column(c, justify="left" if i == 0 else "right", no_wrap=True)
        for r in rows:
            t.add_row(*(_cell(v) for v in r))
        console.print(t)
        return
    print(title, file=sys.stderr)
    print("  ".join(columns), file=sys.stderr)
    for r in rows:
        print("  ".join(_cell(v) for v in r), file=sys.stderr)

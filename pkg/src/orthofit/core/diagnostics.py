"""Run diagnostics: a bounded event log plus per-key health.

Bench sweeps keep going when a single row fails (rank deficiency, a bad
sample...). Those failures would be invisible in the CSV, so each row reports
here under ``row:<m>:<rtilde>`` and the CLI stores the snapshot in the run
manifest.
"""

from __future__ import annotations

import threading
import time
import traceback
from collections import deque
from dataclasses import dataclass
from typing import Any, Deque, Dict, List


@dataclass(frozen=True)
class DiagEvent:
    ts_unix: float
    level: str
    source: str
    message: str


def row_key(m: int, r_tilde: int) -> str:
    return f"row:{int(m)}:{int(r_tilde)}"


class Diagnostics:
    """Thread-safe event ring + per-key ok/error counters."""

    def __init__(self, *, max_events: int = 500, dedupe: bool = True) -> None:
        self._lock = threading.Lock()
        self._events: Deque[DiagEvent] = deque(maxlen=int(max_events) if max_events else 500)
        self._dedupe = bool(dedupe)
        self._health: Dict[str, Dict[str, Any]] = {}
        # source -> (last message, repeat count)
        self._last: Dict[str, List[Any]] = {}

    # ------------------------------------------------------------------
    # Event log
    # ------------------------------------------------------------------

    def log(self, message: str, *, level: str = "info", source: str = "orthofit") -> None:
        msg = str(message or "")
        lvl = str(level or "info")
        src = str(source or "orthofit")
        with self._lock:
            if self._dedupe:
                prev = self._last.get(src)
                if prev is not None and prev[0] == msg:
                    # Same message from the same source: count, don't append.
                    prev[1] += 1
                    return
                self._last[src] = [msg, 1]
            self._events.append(DiagEvent(ts_unix=time.time(), level=lvl, source=src, message=msg))

    def warn(self, message: str, *, source: str = "orthofit") -> None:
        self.log(message, level="warn", source=source)

    def events_snapshot(self) -> List[Dict[str, Any]]:
        with self._lock:
            out = []
            for e in list(self._events):
                d = {"ts_unix": float(e.ts_unix), "level": e.level, "source": e.source, "message": e.message}
                last = self._last.get(e.source)
                if last is not None and last[0] == e.message and last[1] > 1:
                    d["repeats"] = int(last[1])
                out.append(d)
            return out

    # ------------------------------------------------------------------
    # Per-key health
    # ------------------------------------------------------------------

    def mark_ok(self, key: str, **info: Any) -> None:
        k = str(key or "")
        if not k:
            return
        with self._lock:
            st = self._health.setdefault(k, {})
            st["ok_count"] = int(st.get("ok_count", 0)) + 1
            st["last_ok_unix"] = time.time()
            st.update(info)

    def mark_error(self, key: str, exc: BaseException, *, where: str = "") -> None:
        """Record a failure for ``key`` and add a condensed event."""

        k = str(key or "")
        if not k:
            return
        loc = f" ({where})" if where else ""
        msg = f"{type(exc).__name__}: {exc}{loc}".strip()
        try:
            tb = "".join(traceback.format_exception(type(exc), exc, exc.__traceback__))
        except Exception:
            tb = ""
        with self._lock:
            st = self._health.setdefault(k, {})
            st["error_count"] = int(st.get("error_count", 0)) + 1
            st["last_error_unix"] = time.time()
            st["last_error"] = msg
            if tb:
                st["last_error_trace"] = tb[-4000:]
        self.log(msg, level="error", source=k)

    def health_snapshot(self) -> Dict[str, Dict[str, Any]]:
        with self._lock:
            return {str(k): dict(v) for k, v in self._health.items()}

    def error_count(self) -> int:
        with self._lock:
            return sum(int(v.get("error_count", 0)) for v in self._health.values())

    def snapshot(self) -> Dict[str, Any]:
        return {
            "events": self.events_snapshot(),
            "health": self.health_snapshot(),
        }

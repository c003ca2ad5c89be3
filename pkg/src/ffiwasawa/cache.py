"""Append-only JSON Lines cache of per-field results.

Each line is one entry::

    {"key": "q:5;D:1,0,1,0,1", "lpoly": ["1", "0", "5"], "version": "0.1.0",
     "sylow": {"3": "3^1"}}

``sylow`` is optional.  Later lines for the same key merge over earlier
ones, lines written by another tool version are ignored, and corrupt
lines are skipped with a warning.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

from . import __version__
from .zeta import LPolynomial

log = logging.getLogger(__name__)


class Cache:
    def __init__(self, path: str | Path | None, version: str = __version__):
        self.path = Path(path) if path else None
        self.version = version
        self.entries: dict[str, dict] = {}
        self._pending: list[str] = []
        self.hits = 0
        self.misses = 0
        if self.path is not None and self.path.exists():
            self._load()

    def _load(self) -> None:
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    entry = json.loads(line)
                    key = entry["key"]
                    [int(c) for c in entry["lpoly"]]
                except (ValueError, KeyError, TypeError):
                    log.warning("skipping corrupt cache line %d in %s", lineno, self.path)
                    continue
                if entry.get("version") != self.version:
                    continue
                merged = self.entries.setdefault(key, {"lpoly": entry["lpoly"], "sylow": {}})
                merged["lpoly"] = entry["lpoly"]
                merged["sylow"].update(entry.get("sylow") or {})

    def __len__(self):
        return len(self.entries)

    def __contains__(self, key: str) -> bool:
        return key in self.entries

    def lpoly(self, key: str, q: int) -> LPolynomial | None:
        e = self.entries.get(key)
        if e is None:
            self.misses += 1
            return None
        self.hits += 1
        b = tuple(int(c) for c in e["lpoly"])
        return LPolynomial(b, (len(b) - 1) // 2, q)

    def sylow(self, key: str, p: int) -> str | None:
        e = self.entries.get(key)
        return None if e is None else e["sylow"].get(str(p))

    def put(self, key: str, L: LPolynomial, sylow: dict[int, str] | None = None) -> None:
        lp = [str(c) for c in L.coeffs]
        sy = {str(k): v for k, v in (sylow or {}).items()}
        old = self.entries.get(key)
        if old is not None and old["lpoly"] == lp and all(old["sylow"].get(k) == v for k, v in sy.items()):
            return
        merged = self.entries.setdefault(key, {"lpoly": lp, "sylow": {}})
        merged["sylow"].update(sy)
        entry = {"key": key, "lpoly": lp, "version": self.version}
        if sy:
            entry["sylow"] = dict(sorted(sy.items()))
        self._pending.append(json.dumps(entry, sort_keys=True))

    def flush(self) -> None:
        if self.path is None or not self._pending:
            self._pending.clear()
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write("\n".join(self._pending) + "\n")
        self._pending.clear()

"""Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field

LINES: dict[int, str] = {}


@dataclass
class Record:
    number: int
    title: str
    details: list[str] = field(default_factory=list)

    def note(self, text: str) -> None:
        self.details.append(text)


@contextmanager
def criterion(number: int, title: str):
    rec = Record(number, title)
    start = time.perf_counter()
    try:
        yield rec
    except BaseException as exc:
        rec.note(f"{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}")
        _emit(rec, False, time.perf_counter() - start)
        raise
    _emit(rec, True, time.perf_counter() - start)


def _emit(rec: Record, passed: bool, seconds: float) -> None:
    status = "PASS" if passed else "FAIL"
    detail = "; ".join(rec.details)
    line = f"[{status}] criterion {rec.number}: {rec.title} ({seconds:.2f} s)" + (f" -- {detail}" if detail else "")
    LINES[rec.number] = line
    print(line)

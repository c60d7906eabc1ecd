"""Shared PASS/FAIL log for the acceptance gate; printed in the terminal summary."""

from __future__ import annotations

RESULTS: list[str] = []


def record(label: str, ok: bool, detail: str) -> bool:
    line = f"{'PASS' if ok else 'FAIL'} {label}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok

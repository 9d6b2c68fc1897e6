"""Collects one result line per acceptance criterion for the end-of-run summary."""

LINES: dict[int, str] = {}


def record(number: int, ok: bool, text: str) -> str:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {text}"
    LINES[number] = line
    print(line)
    return line

"""Collects one status line per acceptance criterion for the terminal summary."""

LINES = []


def report(number, title, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] #{number} {title}" + (f": {detail}" if detail else "")
    LINES.append(line)
    print(line)
    return ok

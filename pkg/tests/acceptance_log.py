RESULTS: list[str] = []


def record(number: int, name: str, passed: bool, detail: str = "") -> None:
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {name}"
    if detail:
        line += f" ({detail})"
    RESULTS.append(line)
    print(line)

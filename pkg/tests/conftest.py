CRITERIA: dict[int, str] = {}


def record(n: int, ok: bool, text: str) -> None:
    CRITERIA[n] = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {text}"
    print(CRITERIA[n])


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[n])

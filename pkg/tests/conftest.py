VERDICTS: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance verdicts")
    for k in sorted(VERDICTS):
        terminalreporter.write_line(VERDICTS[k])

def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for (number, part) in sorted(RESULTS):
        status, title, detail = RESULTS[number, part]
        label = f"{number}{part}"
        terminalreporter.write_line(f"criterion {label:<3} {status:<4} {title}{' | ' + detail if detail else ''}")

import re

CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")


def pytest_terminal_summary(terminalreporter):
    results = {}
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            m = CRITERION.search(getattr(rep, "nodeid", ""))
            if m is None:
                continue
            n = int(m.group(1))
            ok = status == "passed" and results.get(n, True)
            results[n] = ok
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if results[n] else 'FAIL'}")

import os
import re
import sys

sys.path.insert(0, os.path.dirname(__file__))

_CRITERION = re.compile(r"test_criterion_(\d+)_")


def pytest_terminal_summary(terminalreporter):
    outcomes = {}
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            m = _CRITERION.search(rep.nodeid)
            if not m or rep.when not in ("call", "setup"):
                continue
            num = int(m.group(1))
            ok = rep.passed and outcomes.get(num, True)
            outcomes[num] = ok
    if outcomes:
        terminalreporter.section("acceptance criteria")
        for num in sorted(outcomes):
            terminalreporter.write_line(f"criterion {num}: {'PASS' if outcomes[num] else 'FAIL'}")

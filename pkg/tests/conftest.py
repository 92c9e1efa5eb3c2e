from collections import OrderedDict

# criterion number -> list of (ok, detail); filled by test_acceptance.py
ACCEPTANCE: "OrderedDict[int, list]" = OrderedDict()


def record(criterion: int, ok: bool, detail: str) -> bool:
    ACCEPTANCE.setdefault(criterion, []).append((bool(ok), detail))
    return bool(ok)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        rows = ACCEPTANCE[n]
        verdict = "PASS" if all(ok for ok, _ in rows) else "FAIL"
        tr.write_line(f"criterion {n:>2}: {verdict}  " + "; ".join(d for _, d in rows))

from hypothesis import strategies as st

from epsnets.rangespace import from_incidences


@st.composite
def range_spaces(draw, max_n=8, max_ranges=12, allow_empty=True):
    n = draw(st.integers(0 if allow_empty else 1, max_n))
    if n == 0:
        return from_incidences(0, [])
    ranges = draw(st.lists(st.sets(st.integers(0, n - 1), min_size=0 if allow_empty else 1),
                           max_size=max_ranges))
    return from_incidences(n, ranges)


# one summary line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[number]
        ok = all(passed for passed, _ in checks)
        detail = "; ".join(f"{'' if passed else 'FAILED '}{text}" for passed, text in checks)
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")

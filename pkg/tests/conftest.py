import math

import pytest

# (criterion, title, status, detail) lines printed after the run
ACCEPTANCE_REPORT: list[tuple[int, str, str, str]] = []


def brute_is_prime(n: int) -> bool:
    """Independent oracle: divide by every integer up to sqrt(n)."""
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def brute_sieve(limit: int) -> list[int]:
    flags = [True] * (limit + 1)
    flags[:2] = [False, False][: limit + 1]
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = [False] * len(flags[i * i :: i])
    return [i for i, f in enumerate(flags) if f]


@pytest.fixture
def oracle():
    return brute_is_prime


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, status, detail in sorted(ACCEPTANCE_REPORT):
        line = f"[{status}] {num}. {title}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)

"""One test per acceptance criterion; each prints a single pass/fail line.

Run ``pytest tests/test_acceptance.py`` to see the lines in the terminal
summary (they are also printed live with ``-s``).
"""
import pytest

from twistcon import demos

RESULTS: list[str] = []


@pytest.mark.parametrize("number", [n for n, _, _ in demos.CRITERIA], ids=lambda n: f"criterion_{n:02d}")
def test_criterion(number):
    r = demos.run_criterion(number)
    line = r.line()
    RESULTS.append(line)
    print(line)
    assert r.passed, f"{line}\n{r.details}"

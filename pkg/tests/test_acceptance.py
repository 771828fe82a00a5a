"""The eleven acceptance criteria, each at its stated size, tolerance and time limit.

Every criterion prints one PASS/FAIL line straight to the terminal, bypassing
capture; the same checks back ``alphaprod verify``.
"""

import pytest

from alphaprod.verify import CRITERIA, run_check


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA], ids=[f"criterion_{c[0]:02d}" for c in CRITERIA])
def test_criterion(number, capsys):
    result = run_check(number)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
    assert result.within_time, f"took {result.seconds:.1f}s, limit {result.limit}s"

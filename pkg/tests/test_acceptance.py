"""The twelve acceptance criteria; each prints one PASS/FAIL line."""

import pytest

from wbench import acceptance


@pytest.mark.parametrize("number", sorted(acceptance.CRITERIA))
def test_criterion(number, acceptance_log):
    check = acceptance.CRITERIA[number]()
    line = check.line()
    print(line)
    acceptance_log.append(line)
    assert check.ok, line

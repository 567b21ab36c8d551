"""One test per acceptance criterion; each prints a PASS/FAIL line."""
from __future__ import annotations

import pytest

from pcfvar import acceptance

from conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("number", [n for n, _, _ in acceptance.CRITERIA], ids=lambda n: f"criterion{n}")
def test_criterion(number):
    result = acceptance.run_criterion(number)
    print(result.line())
    ACCEPTANCE_LINES.append(result.line())
    assert result.ok, result.detail

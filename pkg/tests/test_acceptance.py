"""The nine cross-method acceptance criteria at their stated tolerances.

Each test prints one ``[PASS]``/``[FAIL]`` line with the measured numbers.
Run ``pytest tests/test_acceptance.py -s`` to keep the lines in the terminal;
they are also written to the captured output of ``pytest -v``.
"""

import pytest

from narrow_escape.validation import CRITERIA, ValidationOptions, run_one

OPTS = ValidationOptions()  # eps {0.2, 0.1, 0.05, 0.02}, N = 512, 1e5 paths at dt = 1e-3

# stated runtime budgets in seconds; determinism has none
BUDGET = {1: 30, 2: 5, 3: 30, 4: 10, 5: 5, 6: 180, 7: 60, 8: 60, 9: float("inf")}


@pytest.mark.slow
@pytest.mark.parametrize("number", [n for n, _, _ in CRITERIA], ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, capsys):
    result = run_one(number, OPTS)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.line()
    assert result.seconds < BUDGET[number], f"took {result.seconds:.1f}s, budget {BUDGET[number]}s"

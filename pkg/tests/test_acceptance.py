"""Acceptance gate: every criterion runs at its stated tolerance.

Each test prints the one-line pass/fail report for its criterion; the
same registry backs the CLI ``selftest`` subcommand.
"""

import pytest

from strata.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("index,name",
                         [(idx, name) for idx, name, _, _ in CRITERIA],
                         ids=["c%02d" % idx for idx, _, _, _ in CRITERIA])
def test_criterion(index, name, capsys):
    result = run_criterion(index)
    line = "%s criterion %d: %s (%s) [%.1fs]" % (
        "PASS" if result.passed else "FAIL", result.index, result.name,
        result.detail, result.runtime)
    with capsys.disabled():
        print("\n" + line)
    assert result.passed, line

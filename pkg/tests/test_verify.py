"""The shipped verify suites pass on a fresh checkout; fault injection fails."""

import pytest

from streamsubmod import verify
from streamsubmod.errors import InputError


@pytest.mark.parametrize("suite", sorted(verify.SUITES))
def test_suite_passes(suite):
    results = verify.run_suite(suite)
    assert results
    failed = [c for _, c in results if not c.ok]
    assert not failed, f"failed checks: {[(c.name, c.detail) for c in failed]}"


def test_fault_injection_fails_with_named_invariant():
    results = verify.run_suite(verify.FAULT_SUITE)
    failed = {c.name for _, c in results if not c.ok}
    assert "diminishing-returns" in failed
    assert "submodularity" in failed


def test_unknown_suite():
    with pytest.raises(InputError):
        verify.run_suite("bogus")

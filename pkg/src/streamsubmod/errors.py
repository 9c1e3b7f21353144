class InputError(ValueError):
    """Bad caller input: out-of-range ids, malformed configs, exceeded caps."""


class InvariantViolation(AssertionError):
    """A lemma-level runtime invariant failed during a strict-mode run."""

"""Exception and warning types shared across the package."""


class ContractViolation(ValueError):
    """A numerical invariant did not hold.

    ``invariant`` names the violated property so that callers (the CLI in
    particular) can report it in a machine-readable way.
    """

    def __init__(self, invariant, message):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class GuardBandError(ContractViolation):
    """Occupied modes sit too close to a truncated window edge."""

    def __init__(self, message):
        super().__init__("guard_band", message)


class PerturbativeRegimeWarning(UserWarning):
    """A first-order (low modulation index) formula was used outside m*A <= 0.3."""

"""Exception types shared across the package."""


class LoeError(Exception):
    pass


class GeometryError(LoeError, ValueError):
    """Inconsistent chain length, bipartition or matrix dimensions."""


class WindowError(LoeError, ValueError):
    pass


class ResonanceError(LoeError):
    """Spectrum violates the non-resonance assumption needed by a formula."""


class SizeGuardError(LoeError):
    pass


class DomainError(LoeError, ValueError):
    """Logarithm argument is not positive (unphysical variance inputs)."""

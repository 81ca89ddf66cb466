"""Exception types shared across the package."""


class MultiplaceError(Exception):
    """Base class for domain errors raised by this package."""


class NetlistFormatError(MultiplaceError):
    """A netlist file could not be parsed or failed validation."""


class StructureFormatError(MultiplaceError):
    """A structure file could not be parsed or failed validation."""


class StructureCorruptionError(MultiplaceError):
    """A size-vector query hit more than one stored placement.

    This means the pairwise-disjointness guarantee of the structure is
    broken; it is never resolved silently.
    """


class InfeasibleNetlistError(MultiplaceError):
    """Blocks cannot be placed inside the floorplan at minimum sizes."""


class PerturbationError(MultiplaceError):
    """A coordinate perturbation could not be made overlap-free."""

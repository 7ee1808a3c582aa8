"""Exception types shared across the package."""


class MassTransportError(Exception):
    """Base class for all errors raised by this package."""


class InvalidSpec(MassTransportError):
    """A process description is malformed or violates a constraint.

    ``where`` locates the offending field, either as a JSON path when the
    description came from a file or as a plain field name otherwise.
    """

    def __init__(self, message: str, where: str | None = None):
        self.where = where
        if where is not None:
            message = f"{where}: {message}"
        super().__init__(message)


class NoStationaryDistribution(MassTransportError):
    """The transition matrix has no unique strictly positive stationary law."""


class UnsupportedProcess(MassTransportError):
    """The requested operation needs a capability this process lacks."""


class ExplosionCap(MassTransportError):
    """Exact enumeration would exceed the configured atom budget."""

    def __init__(self, message: str, atoms: int | None = None, cap: int | None = None):
        self.atoms = atoms
        self.cap = cap
        super().__init__(message)

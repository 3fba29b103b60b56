"""Exception hierarchy shared by every layer of the package."""


class ParityScanError(Exception):
    """Base class for all errors raised by parityscan."""


class UsageError(ParityScanError, ValueError):
    """Bad arguments: empty ranges, reversed bounds, unknown checks."""


class DomainError(ParityScanError, ValueError):
    """A predicate was asked about an input outside its interval."""


class CapacityError(ParityScanError, OverflowError):
    """Inputs beyond LIMIT, or products that would leave the supported range."""

    def __init__(self, message, shard=None):
        super().__init__(message)
        self.shard = shard

    def __str__(self):
        base = super().__str__()
        if self.shard is not None:
            return f"{base} (shard {self.shard})"
        return base


class CheckpointError(ParityScanError):
    """Checkpoint file is corrupt, from another format version, or unreadable."""


class CheckpointMismatch(CheckpointError):
    """Checkpoint was written by a scan with a different configuration."""

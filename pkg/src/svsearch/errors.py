"""Shared error taxonomy.

UsageError   - caller violated an interface contract (bad arguments).
DomainError  - arguments are well formed but the requested value does not
               exist (inverse of zero, too many distinct strips, ...).
CapacityError- the request exceeds a documented desk-scale limit.
"""


class UsageError(ValueError):
    pass


class DomainError(ValueError):
    pass


class CapacityError(RuntimeError):
    pass

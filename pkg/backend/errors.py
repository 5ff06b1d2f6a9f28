"""
Error Types for the Dirichlet Composition Lab
Hard failures raised by backend modules; soft diagnostics travel as flags on results
"""

from typing import Any, Optional


class LabError(Exception):
    """Base class for every failure the lab reports"""

    label = 'error'


class DomainError(LabError, ValueError):
    """Argument outside the domain of a function"""

    label = 'domain error'


class PreconditionError(LabError, ValueError):
    """Operation called with arguments violating its precondition"""

    label = 'precondition violation'


class MalformedSpec(LabError, ValueError):
    """Symbol JSON, grid string or series payload could not be parsed"""

    label = 'malformed spec'


class ClassViolation(LabError):
    """Symbol outside the Gordon-Hedenmalm class"""

    label = 'class violation'

    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self.witness = witness


class RangeViolation(ClassViolation):
    """Disk polynomial leaves the half-plane; witness is (z, Phi(z))"""

    label = 'range violation'


class InsufficientPrimes(LabError, ValueError):
    """Character does not carry enough primes for the requested truncation"""

    label = 'insufficient primes'


class BoundaryRootHazard(LabError):
    """A preimage sits on (or too near) the edge of a search box"""

    label = 'boundary-root hazard'


class RootFinderFailure(LabError):
    """Polynomial or Newton root solve did not reach tolerance"""

    label = 'root-finder failure'


class NonConvergence(LabError):
    """Iterative numerical procedure stopped before convergence"""

    label = 'non-convergence'

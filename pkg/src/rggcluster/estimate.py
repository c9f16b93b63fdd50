"""Value / standard-error record shared by every Monte Carlo quantity."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Estimate:
    """Scalar Monte Carlo (or exact) result.

    ``std_error == 0.0`` marks a deterministic branch.  ``truncation_bound``
    is a deterministic bound on mass ignored by the estimator, 0 when the
    sampler covers the full space.
    """

    value: float
    std_error: float
    samples: int
    truncation_bound: float = 0.0

    def __post_init__(self):
        if self.std_error < 0.0:
            raise ValueError("std_error must be non-negative")
        if self.truncation_bound < 0.0:
            raise ValueError("truncation_bound must be non-negative")

    def band(self, width: float = 3.0) -> tuple[float, float]:
        """Symmetric (value - w*se, value + w*se) interval."""
        half = width * self.std_error
        return (self.value - half, self.value + half)

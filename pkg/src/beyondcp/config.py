"""Numerical tolerance settings shared by every decision procedure."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ToleranceConfig:
    """Thresholds used by rank decisions, residual checks, and positivity tests.

    rank_cut: relative singular-value cutoff for span/rank decisions.
    residual_tol: Hilbert-Schmidt residual for consistency and map-equality checks.
    psd_slack: how far below zero an eigenvalue may dip and still count as
        positive semidefinite.
    entropy_support_tol: eigenvalue cutoff when taking logarithms of states.
    """

    rank_cut: float = 1e-9
    residual_tol: float = 1e-9
    psd_slack: float = 1e-10
    entropy_support_tol: float = 1e-12

    def __post_init__(self) -> None:
        for name in ("rank_cut", "residual_tol", "psd_slack", "entropy_support_tol"):
            value = getattr(self, name)
            if not value >= 0:
                raise ValueError(f"{name} must be non-negative, got {value!r}")


DEFAULT_TOL = ToleranceConfig()

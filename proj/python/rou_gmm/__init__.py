"""Generalized-moment estimation for the reflected Ornstein-Uhlenbeck process."""

from ._rou_gmm import (
    ConvergenceError,
    DomainError,
    EstimationResult,
    ROUParams,
    SpectralBasis,
    StageError,
    UVSolution,
    estimate_all,
    from_uv,
    g1,
    g2,
    hermite,
    invariant_density,
    sigma_c,
    simulate_path,
    solve_uv,
    to_uv,
)

__all__ = [
    "ConvergenceError",
    "DomainError",
    "EstimationResult",
    "ROUParams",
    "SpectralBasis",
    "StageError",
    "UVSolution",
    "estimate_all",
    "from_uv",
    "g1",
    "g2",
    "hermite",
    "invariant_density",
    "sigma_c",
    "simulate_path",
    "solve_uv",
    "to_uv",
]

"""Python access to the AE-OT C++ core."""

from ._aeot import (
    CheckpointError,
    IterationStats,
    Mlp,
    PotentialTrainer,
    TrainingDiverged,
    energy_distance,
    generate,
    load_checkpoint,
    load_idx_images,
    mode_coverage,
    sample_toy,
    solve_ot,
    toy_centers,
)

__all__ = [
    "CheckpointError",
    "IterationStats",
    "Mlp",
    "PotentialTrainer",
    "TrainingDiverged",
    "energy_distance",
    "generate",
    "load_checkpoint",
    "load_idx_images",
    "mode_coverage",
    "sample_toy",
    "solve_ot",
    "toy_centers",
]

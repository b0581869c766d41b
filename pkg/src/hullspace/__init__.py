"""Interactive design-space exploration toolkit for ship hulls.

Core pieces: an offset-table geometry kernel, a deterministic 20-D
procedural hull generator, a thin-ship wave-resistance evaluator, a GP
surrogate, three exploration modes (random, semi-automated, automated),
session telemetry, an event-sourced session server, and scripted user
policies for headless runs.
"""

from .config import LATENT_DIM, Config, load_config
from .generator import DesignRecord, DesignSpaceBounds, generate, sample_constrained, uniform_sample
from .geometry import (
    OffsetTable,
    check_constraints,
    compute_moments,
    compute_principal_dimensions,
    parse_offsets,
    validate_geometry,
    write_offsets,
)
from .hydro import FlowConditions, evaluate_cw, wetted_surface
from .metrics import aggregate_history, cross_mode_report, sparseness_at_centre
from .surrogate import GPRModel, fit, train_surrogate_pipeline

__all__ = [
    "LATENT_DIM",
    "Config",
    "load_config",
    "DesignRecord",
    "DesignSpaceBounds",
    "generate",
    "sample_constrained",
    "uniform_sample",
    "OffsetTable",
    "check_constraints",
    "compute_moments",
    "compute_principal_dimensions",
    "parse_offsets",
    "validate_geometry",
    "write_offsets",
    "FlowConditions",
    "evaluate_cw",
    "wetted_surface",
    "aggregate_history",
    "cross_mode_report",
    "sparseness_at_centre",
    "GPRModel",
    "fit",
    "train_surrogate_pipeline",
]

__version__ = "0.1.0"

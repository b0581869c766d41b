"""Runtime configuration with documented defaults.

Every tunable the toolkit exposes lives here as a dataclass field, so a
single JSON file (see ``load_config``) can override any of them.  The
defaults are desk-scale: small enough for interactive use and the test
suite, with the study-scale values noted where they differ.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

LATENT_DIM = 20

# Root design-space box: every latent coordinate lives in [0, 1].
ROOT_LOWER = 0.0
ROOT_UPPER = 1.0


@dataclass
class GeneratorConfig:
    """Procedural hull family and sampling knobs."""

    n_stations: int = 60
    n_waterlines: int = 20
    # Affine calibration maps for the three scale dimensions, chosen so the
    # latent-box centre is feasible and acceptance stays well above the floor.
    length_range: tuple[float, float] = (222.0, 243.0)
    beam_range: tuple[float, float] = (30.8, 33.6)
    draft_range: tuple[float, float] = (10.35, 11.25)
    # Rejection sampling aborts if the feasible fraction of a probe batch
    # falls below this.
    rejection_floor: float = 0.01
    probe_batch: int = 256


@dataclass
class HydroConfig:
    """Wave-resistance evaluator selection and quadrature sizes."""

    evaluator: str = "thin-ship"  # "thin-ship" | "external-command"
    external_command: str | None = None
    froude_number: float = 0.28
    gravity: float = 9.81
    water_density: float = 1025.0
    # Wave-angle quadrature: nodes clustered toward the high-angle end,
    # truncated at theta_max (radians as a fraction of pi/2).
    n_theta: int = 80
    theta_max_frac: float = 0.97


@dataclass
class SurrogateConfig:
    """Gaussian-process regression settings."""

    train_samples: int = 2000  # study-scale figure is 10000
    holdout_fraction: float = 0.1
    # Hyperparameters are searched on at most this many points; the final
    # factorization always uses the full training set.
    hyper_subset: int = 400
    # Log-space multi-start points for (length_scale, signal_std, noise_std).
    hyper_starts: tuple[tuple[float, float, float], ...] = (
        (0.3, 1.0, 1e-3),
        (1.0, 1.0, 1e-2),
    )
    jitter_ladder: tuple[float, ...] = (1e-10, 1e-9, 1e-8, 1e-7, 1e-6)


@dataclass
class RemConfig:
    """Random-exploration session settings."""

    pool_size: int = 2000  # study-scale figure is 30000
    perplexity: float = 50.0
    tsne_iterations: int = 1000
    preferred_slots: int = 5


@dataclass
class SaemConfig:
    """Semi-automated mode: bounds shrinking around selections."""

    designs_per_interaction: int = 5
    shrink_factor: float = 0.85
    feasibility_retries: int = 20
    min_interactions: int = 16
    max_interactions: int = 25


@dataclass
class AemConfig:
    """Automated mode: population search over the preference objective."""

    population_size: int = 50
    steps_per_interaction: int = 20
    default_weights: tuple[float, float] = (0.7, 0.3)
    reinit_each_interaction: bool = False
    min_interactions: int = 16
    max_interactions: int = 25


@dataclass
class GeometryConfig:
    """Validity-check tolerances."""

    envelope_tolerance: float = 0.05  # metres of allowed fold-over


@dataclass
class Config:
    generator: GeneratorConfig = field(default_factory=GeneratorConfig)
    hydro: HydroConfig = field(default_factory=HydroConfig)
    surrogate: SurrogateConfig = field(default_factory=SurrogateConfig)
    rem: RemConfig = field(default_factory=RemConfig)
    saem: SaemConfig = field(default_factory=SaemConfig)
    aem: AemConfig = field(default_factory=AemConfig)
    geometry: GeometryConfig = field(default_factory=GeometryConfig)

    def to_dict(self) -> dict:
        return asdict(self)


def _apply(section, overrides: dict):
    for key, value in overrides.items():
        if not hasattr(section, key):
            raise KeyError(f"unknown config key: {key}")
        current = getattr(section, key)
        if isinstance(current, tuple):
            value = tuple(tuple(v) if isinstance(v, list) else v for v in value)
        setattr(section, key, value)


def load_config(path: str | Path | None = None) -> Config:
    """Build a Config, optionally overridden by a JSON file.

    The file holds one object per section (``generator``, ``hydro``, ...),
    each mapping field names to values; unknown keys raise.
    """
    cfg = Config()
    if path is None:
        return cfg
    data = json.loads(Path(path).read_text())
    for section_name, overrides in data.items():
        if not hasattr(cfg, section_name):
            raise KeyError(f"unknown config section: {section_name}")
        _apply(getattr(cfg, section_name), overrides)
    return cfg

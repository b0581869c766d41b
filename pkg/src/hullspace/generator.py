"""The 20-dimensional generative design space.

A deterministic procedural hull family maps a 20-vector in the unit box to
an offset table.  Three coordinates set the global scale (waterline
length, beam, draft, mapped affinely into neighborhoods of the constraint
bands); the rest shape the waterplane, the sections, and the bow/stern
profiles.  Stern parameters only influence the hull aft of midship, so
local edits stay local.

The family replaces a trained generative model behind the same latent
interface: any 20-D generator could be substituted without touching the
exploration machinery.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np

from .config import LATENT_DIM, GeneratorConfig
from .geometry import (
    ConstraintReport,
    OffsetTable,
    PrincipalDimensions,
    check_constraints,
    compute_principal_dimensions,
)


class LatentOutOfBoundsError(ValueError):
    pass


class InfeasibleSpaceError(RuntimeError):
    """Rejection sampling acceptance fell below the configured floor."""


@dataclass
class DesignSpaceBounds:
    """Per-dimension (lower, upper) box, always inside the unit root box."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        if self.lower.shape != (LATENT_DIM,) or self.upper.shape != (LATENT_DIM,):
            raise ValueError(f"bounds must have {LATENT_DIM} dimensions")
        if np.any(self.lower >= self.upper):
            raise ValueError("lower bound must be strictly below upper in every dimension")
        if np.any(self.lower < 0.0) or np.any(self.upper > 1.0):
            raise ValueError("bounds must lie inside the unit root box")

    @classmethod
    def root(cls) -> "DesignSpaceBounds":
        return cls(np.zeros(LATENT_DIM), np.ones(LATENT_DIM))

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, latent: np.ndarray) -> bool:
        return bool(np.all(latent >= self.lower) and np.all(latent <= self.upper))

    def contains_box(self, other: "DesignSpaceBounds") -> bool:
        return bool(np.all(other.lower >= self.lower) and np.all(other.upper <= self.upper))


@dataclass
class DesignRecord:
    """One explorable design: latent point plus everything derived from it."""

    id: str
    latent: np.ndarray
    geometry: OffsetTable
    dimensions: PrincipalDimensions
    constraints: ConstraintReport
    cw: float | None = None
    cw_source: str = "unevaluated"  # "surrogate" | "direct" | "unevaluated"

    def with_cw(self, cw: float, source: str) -> "DesignRecord":
        if source not in ("surrogate", "direct"):
            raise ValueError(f"bad cw source: {source}")
        return replace(self, cw=float(cw), cw_source=source)


# Roles of the 20 latent coordinates.  Dimensions 0-2 are scale; the rest
# are shape, mapped affinely into the ranges below.  The shape ranges are
# calibration constants: together with the scale maps in GeneratorConfig
# they were tuned so that the latent-box centre is feasible and uniform
# root-box sampling accepts well above the rejection floor.
DIM_ROLES = (
    "waterline length",      # 0
    "waterline beam",        # 1
    "draft",                 # 2
    "fore taper extent",     # 3
    "aft taper extent",      # 4
    "fore waterplane fullness",   # 5
    "aft waterplane fullness",    # 6
    "fore section U/V exponent",  # 7
    "aft section U/V exponent",   # 8
    "bow rake",              # 9
    "stern transom width",   # 10
    "stern overhang",        # 11
    "fore section depth twist",   # 12
    "aft section depth twist",    # 13
    "fore entrance sharpening",   # 14
    "aft run sharpening",    # 15
    "fore bilge fullness",   # 16
    "aft bilge fullness",    # 17
    "midbody section U/V exponent",  # 18
    "global fullness scale",  # 19
)

_SHAPE_RANGES = {
    3: (0.26, 0.40),    # fore taper extent (fraction of length)
    4: (0.26, 0.40),    # aft taper extent
    5: (0.8, 1.6),      # fore waterplane exponent
    6: (0.8, 1.6),      # aft waterplane exponent
    7: (0.12, 0.32),    # fore section exponent (low = U/full, high = V)
    8: (0.12, 0.32),    # aft section exponent
    9: (0.0, 0.6),      # bow rake (fraction of fore taper shifted at keel)
    10: (0.15, 0.55),   # transom half-width fraction of beam
    11: (0.0, 0.9),     # stern overhang (keel-level taper growth factor)
    12: (-0.4, 0.4),    # fore depth twist of the section exponent
    13: (-0.4, 0.4),    # aft depth twist
    14: (-0.3, 0.3),    # fore entrance sharpening of the waterplane
    15: (-0.3, 0.3),    # aft run sharpening
    16: (0.10, 0.45),   # fore bilge fullness blend
    17: (0.10, 0.45),   # aft bilge fullness blend
    18: (0.12, 0.32),   # midbody section exponent
    19: (0.85, 1.15),   # global fullness multiplier on section exponents
}


def _lerp(t, lo, hi):
    return lo + t * (hi - lo)


def _smoothstep(t):
    t = np.clip(t, 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def _check_root(latent: np.ndarray):
    latent = np.asarray(latent, dtype=float)
    if latent.shape != (LATENT_DIM,):
        raise LatentOutOfBoundsError(f"latent must have {LATENT_DIM} coordinates")
    bad = np.nonzero((latent < 0.0) | (latent > 1.0))[0]
    if bad.size:
        d = int(bad[0])
        raise LatentOutOfBoundsError(
            f"latent dimension {d} = {latent[d]:.6f} outside the unit root box"
        )
    return latent


def _family_breadths(t: np.ndarray, cfg: GeneratorConfig):
    """Hull family evaluated for a batch of latents, shape (b, 20).

    Returns (stations (b, nx), waterlines (b, nz), breadths (b, nx, nz)).
    All operations are elementwise broadcasts, so a batch row is
    bit-identical to the single-latent evaluation.
    """
    nx, nz = cfg.n_stations, cfg.n_waterlines
    b = t.shape[0]

    def col(d):
        return t[:, d][:, None, None]

    lwl = _lerp(col(0), *cfg.length_range)
    beam = _lerp(col(1), *cfg.beam_range)
    draft = _lerp(col(2), *cfg.draft_range)

    s = {d: _lerp(col(d), lo, hi) for d, (lo, hi) in _SHAPE_RANGES.items()}
    s_f, s_a = s[3], s[4]
    a_f, a_a = s[5], s[6]
    e_f, e_a, e_m = s[7] * s[19], s[8] * s[19], s[18] * s[19]
    rake, transom, overhang = s[9], s[10], s[11]
    d_f, d_a = s[12], s[13]
    m_f, m_a = s[14], s[15]
    b_f, b_a = s[16], s[17]

    # The stem tapers to exactly zero breadth at station 0, so the measured
    # waterline length spans stations 1..nx-1; stretch the grid so that
    # measurement equals the target.
    length = lwl * (nx - 1) / (nx - 2)
    base_x = np.linspace(0.0, 1.0, nx)
    base_z = np.linspace(0.0, 1.0, nz)
    stations = length[:, :, 0] * base_x[None, :]
    waterlines = draft[:, :, 0] * base_z[None, :]

    xi = base_x[None, :, None]      # (1, nx, 1) in [0, 1]
    zeta = base_z[None, None, :]    # (1, 1, nz) in [0, 1]

    # Waterplane profile eta(xi, zeta) in [0, 1].  Bow rake shifts the stem
    # aft at depth; stern overhang lengthens the aft taper at depth.  Both
    # keep the aft taper strictly abaft midship, preserving fore locality.
    r = rake * 0.5 * s_f * (1.0 - zeta)            # stem shift at depth
    u = np.clip((xi - r) / (s_f - r), 0.0, 1.0)
    fore = np.sin(0.5 * np.pi * u) ** (a_f * (1.0 + m_f * (1.0 - u)))

    s_a_eff = s_a + (0.5 - s_a) * overhang * (1.0 - zeta)   # always < 0.5
    v = np.clip((1.0 - xi) / s_a_eff, 0.0, 1.0)
    aft = transom + (1.0 - transom) * np.sin(0.5 * np.pi * v) ** (a_a * (1.0 + m_a * (1.0 - v)))

    eta = np.ones((b, nx, nz))
    in_fore = np.broadcast_to(xi < s_f, eta.shape)
    eta[in_fore] = np.broadcast_to(fore, eta.shape)[in_fore]
    in_aft = np.broadcast_to(1.0 - xi < s_a_eff, eta.shape)
    eta[in_aft] = np.broadcast_to(aft, eta.shape)[in_aft]

    # Section curve g(zeta) in [0, 1]: a blend of two power laws whose
    # exponent varies fore/mid/aft and twists with depth.  Everything is
    # non-decreasing in zeta, so sections never fold over.
    blend_fm = _smoothstep(xi / 0.5)
    blend_ma = _smoothstep((xi - 0.5) / 0.5)
    e_base = np.where(xi <= 0.5, e_f + (e_m - e_f) * blend_fm,
                      e_m + (e_a - e_m) * blend_ma)
    d_tw = np.where(xi <= 0.5, d_f, d_f + (d_a - d_f) * blend_ma)
    b_bl = np.where(xi <= 0.5, b_f, b_f + (b_a - b_f) * blend_ma)

    expo = e_base * (1.0 + d_tw * (zeta - 0.5))
    with np.errstate(divide="ignore"):
        log_zeta = np.log(np.where(zeta > 0.0, zeta, 1.0))
    g = (1.0 - b_bl) * np.exp(expo * log_zeta) + b_bl * np.exp(expo / 3.0 * log_zeta)
    g = np.broadcast_to(g, (b, nx, nz)).copy()
    g[:, :, 0] = 0.0  # keel line

    breadths = 0.5 * beam * eta * g
    return stations, waterlines, breadths


def generate(latent: np.ndarray, config: GeneratorConfig | None = None) -> OffsetTable:
    """Deterministic latent-to-hull map on a fixed offset grid.

    The same latent always produces a bit-identical table.
    """
    cfg = config or GeneratorConfig()
    t = _check_root(latent)
    stations, waterlines, breadths = _family_breadths(t[None, :], cfg)
    return OffsetTable(stations[0], waterlines[0], breadths[0])


def describe_design(record_id: str, latent: np.ndarray,
                    config: GeneratorConfig | None = None) -> DesignRecord:
    """Generate a hull and bundle it with its dimensions and constraints."""
    geometry = generate(latent, config)
    dims = compute_principal_dimensions(geometry)
    return DesignRecord(
        id=record_id,
        latent=np.asarray(latent, dtype=float),
        geometry=geometry,
        dimensions=dims,
        constraints=check_constraints(dims),
    )


def sample_constrained(n: int, seed: int,
                       config: GeneratorConfig | None = None) -> list[DesignRecord]:
    """Rejection-sample n designs from the root box that satisfy all constraints.

    Deterministic given the seed.  Raises InfeasibleSpaceError if the
    acceptance rate of the first probe batch falls below the configured
    floor, which points at a miscalibrated generator.
    """
    cfg = config or GeneratorConfig()
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = np.random.default_rng(seed)
    accepted: list[DesignRecord] = []
    probed = 0
    probe_hits = 0
    for batch_index in itertools.count():
        if len(accepted) >= n:
            break
        latents = rng.uniform(size=(cfg.probe_batch, LATENT_DIM))
        for latent in latents:
            record = describe_design(f"d{len(accepted):06d}", latent, cfg)
            if probed < cfg.probe_batch:
                probed += 1
                probe_hits += record.constraints.all_satisfied
            if record.constraints.all_satisfied:
                accepted.append(record)
                if len(accepted) >= n:
                    break
        if probed >= cfg.probe_batch and probe_hits / probed < cfg.rejection_floor:
            raise InfeasibleSpaceError(
                f"acceptance rate {probe_hits}/{probed} is below the floor "
                f"{cfg.rejection_floor:.2%}; recalibrate the generator scale maps"
            )
    return accepted


def constraint_values_batch(latents: np.ndarray,
                            config: GeneratorConfig | None = None) -> np.ndarray:
    """Principal-dimension constraint quantities for a batch of latents.

    Returns an (n, 4) array of displacement volume, waterline length,
    waterline beam, and draft, measured from batch-generated geometry the
    same way the single-design path measures them.  Used by optimizers
    that need many constraint evaluations per step.
    """
    cfg = config or GeneratorConfig()
    latents = np.atleast_2d(np.asarray(latents, dtype=float))
    stations, waterlines, breadths = _family_breadths(latents, cfg)
    n, nx = stations.shape

    volume = 2.0 * np.trapezoid(
        np.trapezoid(breadths, np.broadcast_to(waterlines[:, None, :], breadths.shape),
                     axis=2),
        stations, axis=1,
    )
    top = breadths[:, :, -1]
    has_breadth = top > 0.0
    any_breadth = has_breadth.any(axis=1)
    first = np.argmax(has_breadth, axis=1)
    last = nx - 1 - np.argmax(has_breadth[:, ::-1], axis=1)
    rows = np.arange(n)
    lwl = np.where(any_breadth, stations[rows, last] - stations[rows, first], 0.0)
    bwl = 2.0 * top.max(axis=1)
    draft = waterlines[:, -1] - waterlines[:, 0]
    return np.column_stack([np.where(any_breadth, volume, 0.0), lwl, bwl, draft])


_MAXIMIN_CANDIDATES = 8


def uniform_sample(bounds: DesignSpaceBounds, n: int, seed: int) -> list[np.ndarray]:
    """Space-filling sample: one point per stratum in every dimension.

    Each dimension is split into n equal strata; a random point is drawn in
    each stratum and the strata are permuted independently per dimension
    (Latin-hypercube style).  Several candidate hypercubes are drawn and
    the one with the largest minimum pairwise distance kept, which is what
    actually spreads points in 20 dimensions.  Deterministic given the seed.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    from scipy.spatial.distance import pdist

    rng = np.random.default_rng(seed)
    best = None
    best_sep = -1.0
    for _ in range(_MAXIMIN_CANDIDATES):
        points = np.empty((n, LATENT_DIM))
        for d in range(LATENT_DIM):
            strata = (rng.permutation(n) + rng.uniform(size=n)) / n
            points[:, d] = bounds.lower[d] + strata * (bounds.upper[d] - bounds.lower[d])
        separation = float(pdist(points).min()) if n > 1 else np.inf
        if separation > best_sep:
            best, best_sep = points, separation
    return list(best)

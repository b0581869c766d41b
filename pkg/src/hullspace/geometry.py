"""Offset-table hull representation and the geometry it implies.

A hull is stored as half-breadths y(x, z) on a station x waterline grid,
mirrored implicitly about the centerplane.  From that single table we get
volume and moments (composite trapezoidal quadrature), principal
dimensions, the design-constraint report, and a geometric validity check.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

MIN_STATIONS = 10
MIN_WATERLINES = 5

# Box constraints on the feasible hull: displacement volume (m^3),
# waterline length (m), waterline beam (m), draft (m).  All intervals are
# closed on both ends.
DISPLACEMENT_BOUNDS = (51120.5, 56501.6)
LENGTH_BOUNDS = (220.9, 244.2)
BEAM_BOUNDS = (30.6, 33.8)
DRAFT_BOUNDS = (10.3, 11.3)


class GridResolutionError(ValueError):
    """Offset grid is below the quadrature resolution floor."""


class DegenerateHullError(ValueError):
    """Hull has no breadth at the design waterline."""


@dataclass
class OffsetTable:
    """Half-breadth table: stations (m), waterlines (m, keel=0), y[x][z] (m).

    Shape checks happen at construction; the semantic invariants
    (monotone axes, non-negative breadths, no fold-over) are reported by
    :func:`validate_geometry` so that defective tables can still be
    represented and diagnosed.
    """

    stations: np.ndarray
    waterlines: np.ndarray
    half_breadths: np.ndarray

    def __post_init__(self):
        self.stations = np.asarray(self.stations, dtype=float)
        self.waterlines = np.asarray(self.waterlines, dtype=float)
        self.half_breadths = np.asarray(self.half_breadths, dtype=float)
        if self.stations.ndim != 1 or self.waterlines.ndim != 1:
            raise ValueError("stations and waterlines must be 1-D")
        if self.half_breadths.shape != (self.stations.size, self.waterlines.size):
            raise ValueError(
                f"half_breadths shape {self.half_breadths.shape} does not match "
                f"{self.stations.size} stations x {self.waterlines.size} waterlines"
            )

    @property
    def n_stations(self) -> int:
        return self.stations.size

    @property
    def n_waterlines(self) -> int:
        return self.waterlines.size


@dataclass
class SecondMoments:
    """Second-order volume moments about the centroid, m^5."""

    xx: float
    yy: float
    zz: float
    xy: float
    xz: float
    yz: float


@dataclass
class GeometricMoments:
    volume: float  # m^3, full hull (both sides of the centerplane)
    centroid: tuple[float, float, float]  # m; y-bar is 0 by symmetry
    second_moments: SecondMoments


@dataclass
class PrincipalDimensions:
    length_waterline: float
    beam_waterline: float
    draft: float
    displacement_volume: float


@dataclass
class ConstraintCheck:
    name: str
    value: float
    lower: float
    upper: float
    satisfied: bool


@dataclass
class ConstraintReport:
    per_constraint: list[ConstraintCheck]
    all_satisfied: bool

    def violation_magnitude(self) -> float:
        """Total constraint violation, each normalized by its band width."""
        total = 0.0
        for c in self.per_constraint:
            width = c.upper - c.lower
            total += max(0.0, c.lower - c.value, c.value - c.upper) / width
        return total


@dataclass
class ValidityReport:
    valid: bool
    failures: list[str] = field(default_factory=list)


def _require_resolution(offsets: OffsetTable):
    if offsets.n_stations < MIN_STATIONS or offsets.n_waterlines < MIN_WATERLINES:
        raise GridResolutionError(
            f"offset grid {offsets.n_stations}x{offsets.n_waterlines} is below the "
            f"minimum of {MIN_STATIONS} stations x {MIN_WATERLINES} waterlines"
        )


def compute_moments(offsets: OffsetTable) -> GeometricMoments:
    """Volume and moments by trapezoidal quadrature over the offset grid.

    The half hull is mirrored about the centerplane, so volume integrals
    are twice the half-hull integral and all odd-in-y moments vanish.
    """
    _require_resolution(offsets)
    x = offsets.stations
    z = offsets.waterlines
    y = offsets.half_breadths

    def integrate(f):
        return np.trapezoid(np.trapezoid(f, z, axis=1), x)

    volume = 2.0 * integrate(y)
    if volume <= 0.0:
        mid = (float(x[0] + x[-1]) / 2.0, 0.0, float(z[0] + z[-1]) / 2.0)
        return GeometricMoments(0.0, mid, SecondMoments(0, 0, 0, 0, 0, 0))

    xg = x[:, None]
    zg = z[None, :]
    cx = 2.0 * integrate(xg * y) / volume
    cz = 2.0 * integrate(zg * y) / volume

    raw_xx = 2.0 * integrate(xg**2 * y)
    raw_zz = 2.0 * integrate(zg**2 * y)
    raw_xz = 2.0 * integrate(xg * zg * y)
    raw_yy = (2.0 / 3.0) * integrate(y**3)

    second = SecondMoments(
        xx=raw_xx - volume * cx * cx,
        yy=raw_yy,
        zz=raw_zz - volume * cz * cz,
        xy=0.0,
        xz=raw_xz - volume * cx * cz,
        yz=0.0,
    )
    return GeometricMoments(float(volume), (float(cx), 0.0, float(cz)), second)


def compute_principal_dimensions(offsets: OffsetTable) -> PrincipalDimensions:
    """Waterline length/beam, draft, and displacement from the offset table.

    Waterline length spans the first to last station with nonzero breadth
    at the top waterline.
    """
    _require_resolution(offsets)
    top = offsets.half_breadths[:, -1]
    nonzero = np.nonzero(top > 0.0)[0]
    if nonzero.size == 0:
        raise DegenerateHullError("no breadth anywhere at the design waterline")
    lwl = float(offsets.stations[nonzero[-1]] - offsets.stations[nonzero[0]])
    bwl = 2.0 * float(top.max())
    draft = float(offsets.waterlines[-1] - offsets.waterlines[0])
    volume = compute_moments(offsets).volume
    return PrincipalDimensions(lwl, bwl, draft, volume)


def check_constraints(dims: PrincipalDimensions) -> ConstraintReport:
    """Evaluate the four box constraints on the principal dimensions."""
    bands = [
        ("displacement_volume", dims.displacement_volume, DISPLACEMENT_BOUNDS),
        ("length_waterline", dims.length_waterline, LENGTH_BOUNDS),
        ("beam_waterline", dims.beam_waterline, BEAM_BOUNDS),
        ("draft", dims.draft, DRAFT_BOUNDS),
    ]
    checks = [
        ConstraintCheck(name, value, lo, hi, lo <= value <= hi)
        for name, value, (lo, hi) in bands
    ]
    return ConstraintReport(checks, all(c.satisfied for c in checks))


def validate_geometry(offsets: OffsetTable, envelope_tolerance: float = 0.05) -> ValidityReport:
    """Flag negative breadths, non-monotone axes, and fold-over.

    Fold-over means a breadth below the design waterline sticking out past
    the station's waterline breadth by more than ``envelope_tolerance``
    metres (the hull folding back over itself).
    """
    failures: list[str] = []
    y = offsets.half_breadths

    if np.any(np.diff(offsets.stations) <= 0.0):
        failures.append("stations not strictly increasing")
    if np.any(np.diff(offsets.waterlines) <= 0.0):
        failures.append("waterlines not strictly increasing")

    neg = np.argwhere(y < 0.0)
    for i, j in neg[:10]:
        failures.append(f"negative breadth at ({i},{j})")
    if len(neg) > 10:
        failures.append(f"... and {len(neg) - 10} more negative breadths")

    envelope = y[:, -1][:, None] + envelope_tolerance
    fold = np.argwhere(y[:, :-1] > envelope)
    for i, j in fold[:10]:
        failures.append(
            f"fold-over at ({i},{j}): breadth {y[i, j]:.4f} exceeds waterline "
            f"envelope {y[i, -1]:.4f} + {envelope_tolerance}"
        )
    if len(fold) > 10:
        failures.append(f"... and {len(fold) - 10} more fold-overs")

    return ValidityReport(valid=not failures, failures=failures)


# ---------------------------------------------------------------------------
# Offset-table text format: the exchange contract between the core, the
# wave-resistance evaluator, and UI export.
#
#   stations N waterlines M
#   x_1 ... x_N
#   z_1 ... z_M
#   N lines of M half-breadths
#
# All values are decimal metres, whitespace-separated.
# ---------------------------------------------------------------------------

def write_offsets(offsets: OffsetTable) -> str:
    """Serialize to the plain-text offset-table format."""
    out = io.StringIO()
    out.write(f"stations {offsets.n_stations} waterlines {offsets.n_waterlines}\n")
    out.write(" ".join(repr(v) for v in offsets.stations.tolist()) + "\n")
    out.write(" ".join(repr(v) for v in offsets.waterlines.tolist()) + "\n")
    for row in offsets.half_breadths:
        out.write(" ".join(repr(v) for v in row.tolist()) + "\n")
    return out.getvalue()


def parse_offsets(text: str) -> OffsetTable:
    """Parse the plain-text offset-table format."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = lines[0].split()
    if len(header) != 4 or header[0] != "stations" or header[2] != "waterlines":
        raise ValueError(f"bad offset-table header: {lines[0]!r}")
    n, m = int(header[1]), int(header[3])
    stations = np.array([float(v) for v in lines[1].split()])
    waterlines = np.array([float(v) for v in lines[2].split()])
    if stations.size != n or waterlines.size != m:
        raise ValueError("axis line lengths do not match header")
    if len(lines) != 3 + n:
        raise ValueError(f"expected {n} breadth rows, got {len(lines) - 3}")
    breadths = np.array([[float(v) for v in lines[3 + i].split()] for i in range(n)])
    if breadths.shape != (n, m):
        raise ValueError("breadth rows do not match header")
    return OffsetTable(stations, waterlines, breadths)


def box_barge(length: float, beam: float, draft: float,
              n_stations: int = 20, n_waterlines: int = 10) -> OffsetTable:
    """Rectangular box hull; handy analytic reference."""
    stations = np.linspace(0.0, length, n_stations)
    waterlines = np.linspace(0.0, draft, n_waterlines)
    breadths = np.full((n_stations, n_waterlines), beam / 2.0)
    return OffsetTable(stations, waterlines, breadths)

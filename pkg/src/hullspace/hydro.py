"""Wave-making resistance of an offset-table hull.

The reference evaluator computes the thin-ship (centerplane source) wave
integral: hull source strength from longitudinal breadth derivatives,
a depth-weighted transform over the grid for each wave propagation angle,
and a clustered-angle quadrature of the squared transform.  Cell
integrals in both directions are done analytically against the
exponential/oscillatory weights, so the fixed angle rule keeps its
accuracy while the offset grid refines.

The result is normalized to a dimensionless coefficient by 0.5 rho U^2 S
with S the wetted surface.  Evaluators are pluggable: a config key swaps
in an external command that receives the offset-table text and prints a
single coefficient back.
"""

from __future__ import annotations

import shlex
import subprocess
from dataclasses import dataclass

import numpy as np

from .config import HydroConfig
from .geometry import OffsetTable, write_offsets


class EvaluationError(RuntimeError):
    pass


@dataclass
class FlowConditions:
    """Steady-forward-speed condition for the wave integral."""

    froude_number: float = 0.28
    gravity: float = 9.81
    reference_length: float = 230.0

    def __post_init__(self):
        if self.froude_number <= 0 or self.gravity <= 0 or self.reference_length <= 0:
            raise ValueError("froude number, gravity and reference length must be positive")

    @property
    def speed(self) -> float:
        return self.froude_number * np.sqrt(self.gravity * self.reference_length)


@dataclass
class CwResult:
    value: float
    degenerate: bool = False


def wetted_surface(offsets: OffsetTable) -> float:
    """Hull surface area: shell (both sides) plus keel-plane and end closures.

    The shell is summed over bilinear patches split into triangles; flat
    closures account for open keel planes and transom/bow ends so that a
    box hull comes out exact.
    """
    x, z, y = offsets.stations, offsets.waterlines, offsets.half_breadths
    pts = np.stack(np.broadcast_arrays(x[:, None], y, z[None, :]), axis=-1)

    p00 = pts[:-1, :-1]
    p10 = pts[1:, :-1]
    p01 = pts[:-1, 1:]
    p11 = pts[1:, 1:]

    def tri_area(a, b, c):
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=-1)

    # Average the two diagonal splits of each patch: exact for planar
    # patches and symmetric under fore-aft mirroring of skew ones.
    split_a = tri_area(p00, p10, p11) + tri_area(p00, p11, p01)
    split_b = tri_area(p10, p11, p01) + tri_area(p10, p01, p00)
    shell = 0.5 * np.sum(split_a + split_b)
    keel = np.trapezoid(y[:, 0], x)
    ends = np.trapezoid(y[0, :], z) + np.trapezoid(y[-1, :], z)
    return float(2.0 * (shell + keel + ends))


def _decay_weights(psi):
    """C0 = int_0^1 e^(-psi s) ds and C1 = int_0^1 s e^(-psi s) ds, stable near 0."""
    psi = np.asarray(psi, dtype=float)
    small = psi < 1e-5
    safe = np.where(small, 1.0, psi)
    em = np.exp(-safe)
    c0 = np.where(small, 1.0 - psi / 2.0 + psi**2 / 6.0, (1.0 - em) / safe)
    c1 = np.where(small, 0.5 - psi / 3.0 + psi**2 / 8.0, (1.0 - em * (1.0 + safe)) / safe**2)
    return c0, c1


def _osc_weights(phi):
    """A = int_0^1 (1-t) e^(i phi t) dt and B = int_0^1 t e^(i phi t) dt, stable near 0."""
    phi = np.asarray(phi, dtype=float)
    small = np.abs(phi) < 1e-5
    ip = 1j * np.where(small, 1.0, phi)
    eip = np.exp(ip)
    b = np.where(small,
                 0.5 + 1j * phi / 3.0 - phi**2 / 8.0,
                 (eip * (ip - 1.0) + 1.0) / ip**2)
    a = np.where(small,
                 0.5 + 1j * phi / 6.0 - phi**2 / 24.0,
                 (eip - 1.0) / ip - ((eip * (ip - 1.0) + 1.0) / ip**2))
    return a, b


def _theta_nodes(n_theta: int, max_frac: float) -> np.ndarray:
    """Wave-angle nodes on [0, max_frac * pi/2], clustered toward the top."""
    u = np.linspace(0.0, 1.0, n_theta)
    spread = (np.power(10.0, u) - 1.0) / 9.0
    theta_max = max_frac * 0.5 * np.pi
    return theta_max - spread[::-1] * theta_max


class ThinShipEvaluator:
    """Reference wave-resistance evaluator (centerplane source integral)."""

    def __init__(self, config: HydroConfig | None = None):
        self.config = config or HydroConfig()

    def evaluate(self, offsets: OffsetTable, conditions: FlowConditions) -> CwResult:
        cfg = self.config
        x, z, y = offsets.stations, offsets.waterlines, offsets.half_breadths
        if not np.any(y > 0.0):
            return CwResult(0.0, degenerate=True)

        surface = wetted_surface(offsets)
        speed = conditions.speed
        k0 = conditions.gravity / speed**2
        draft_top = z[-1]

        yx = np.gradient(y, x, axis=0)

        theta = _theta_nodes(cfg.n_theta, cfg.theta_max_frac)
        sec = 1.0 / np.cos(theta)
        q = k0 * sec**2            # vertical decay rate per angle
        k = k0 * sec               # longitudinal wavenumber per angle

        # Depth integral: per-cell exact integration of a linear breadth
        # derivative against exp(-q (T - z)), assembled into per-node weights.
        hz = np.diff(z)
        psi = q[:, None] * hz[None, :]
        c0, c1 = _decay_weights(psi)
        scale = hz[None, :] * np.exp(-q[:, None] * (draft_top - z[None, 1:]))
        wz = np.zeros((theta.size, z.size))
        wz[:, :-1] += scale * c1
        wz[:, 1:] += scale * (c0 - c1)
        g_matrix = yx @ wz.T       # (n_stations, n_theta)

        # Longitudinal integral: per-cell exact integration against
        # exp(i k x), again assembled into per-node complex weights.
        hx = np.diff(x)
        phi = k[:, None] * hx[None, :]
        a_w, b_w = _osc_weights(phi)
        phase = np.exp(1j * k[:, None] * x[None, :-1]) * hx[None, :]
        wx = np.zeros((theta.size, x.size), dtype=complex)
        wx[:, :-1] += phase * a_w
        wx[:, 1:] += phase * b_w
        transform = np.einsum("ti,it->t", wx, g_matrix)

        integrand = np.abs(transform) ** 2 * sec**3
        wave_integral = np.trapezoid(integrand, theta)
        resistance = (4.0 * cfg.water_density * conditions.gravity**2
                      / (np.pi * speed**2)) * wave_integral
        cw = resistance / (0.5 * cfg.water_density * speed**2 * surface)
        if not np.isfinite(cw):
            raise EvaluationError("non-finite intermediate in wave-resistance evaluation")
        return CwResult(float(cw))


class ExternalCommandEvaluator:
    """Pipes the offset-table text to a user-supplied solver command.

    The command receives the table on stdin with the Froude number
    appended as its last argument, and must print a single decimal
    coefficient.
    """

    def __init__(self, command: str):
        if not command:
            raise ValueError("external-command evaluator needs a command string")
        self.command = command

    def evaluate(self, offsets: OffsetTable, conditions: FlowConditions) -> CwResult:
        argv = shlex.split(self.command) + [repr(conditions.froude_number)]
        proc = subprocess.run(argv, input=write_offsets(offsets),
                              capture_output=True, text=True)
        if proc.returncode != 0:
            raise EvaluationError(f"external solver failed: {proc.stderr.strip()}")
        try:
            return CwResult(float(proc.stdout.strip().split()[-1]))
        except (ValueError, IndexError) as exc:
            raise EvaluationError(f"external solver output not a number: {proc.stdout!r}") from exc


def make_evaluator(config: HydroConfig | None = None):
    cfg = config or HydroConfig()
    if cfg.evaluator == "thin-ship":
        return ThinShipEvaluator(cfg)
    if cfg.evaluator == "external-command":
        return ExternalCommandEvaluator(cfg.external_command or "")
    raise ValueError(f"unknown evaluator: {cfg.evaluator}")


def evaluate_cw(offsets: OffsetTable, conditions: FlowConditions | None = None,
                config: HydroConfig | None = None) -> CwResult:
    """Wave-resistance coefficient of a hull under the given flow conditions."""
    cfg = config or HydroConfig()
    if conditions is None:
        length = float(offsets.stations[-1] - offsets.stations[0])
        conditions = FlowConditions(cfg.froude_number, cfg.gravity, length)
    return make_evaluator(cfg).evaluate(offsets, conditions)

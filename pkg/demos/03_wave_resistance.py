"""Thin-ship wave resistance: Froude sweeps, convergence, symmetry.

The evaluator integrates centerplane sources from longitudinal breadth
gradients against an exponential depth weight and an oscillatory
longitudinal weight, then squares the transform over propagation angles.
"""

import numpy as np

from hullspace.generator import generate
from hullspace.geometry import OffsetTable
from hullspace.hydro import FlowConditions, evaluate_cw, wetted_surface

hull = generate(np.full(20, 0.5))
length = float(hull.stations[-1] - hull.stations[0])
print(f"hull: Lwl ~ {length:.1f} m, wetted surface {wetted_surface(hull):.0f} m^2")

print("\nFroude sweep (the design condition is Fr = 0.28):")
for froude in (0.18, 0.22, 0.26, 0.28, 0.32, 0.36):
    cw = evaluate_cw(hull, FlowConditions(froude, 9.81, length)).value
    bar = "#" * int(cw * 2e4)
    print(f"  Fr={froude:.2f}  Cw={cw:.5f}  {bar}")

# Grid self-convergence on a smooth analytic hull.
def parabolic(nx, nz):
    x = np.linspace(0, 230, nx)
    z = np.linspace(0, 14.4, nz)
    y = 11.5 * np.outer(1 - (2 * x / 230 - 1) ** 2, 1 - ((14.4 - z) / 14.4) ** 2)
    return OffsetTable(x, z, y)

cond = FlowConditions(0.28, 9.81, 230.0)
print("\ngrid refinement on the parabolic test hull:")
for nx, nz in ((30, 10), (60, 20), (120, 40), (240, 80)):
    print(f"  {nx:3d}x{nz:<3d} -> Cw = {evaluate_cw(parabolic(nx, nz), cond).value:.6e}")

# Fore-aft mirror symmetry: the squared transform cannot tell bow from stern.
mirror = OffsetTable(hull.stations, hull.waterlines, hull.half_breadths[::-1].copy())
a = evaluate_cw(hull, FlowConditions(0.28, 9.81, length)).value
b = evaluate_cw(mirror, FlowConditions(0.28, 9.81, length)).value
print(f"\nmirror symmetry: |Cw - Cw_mirrored| / Cw = {abs(a - b) / a:.2e}")

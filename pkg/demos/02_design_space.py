"""The 20-dimensional hull design space.

Shows the latent roles, what moving one coordinate does, rejection
sampling against the container-ship constraints, and the space-filling
sampler used everywhere else.
"""

import numpy as np

from hullspace.generator import (
    DIM_ROLES,
    DesignSpaceBounds,
    describe_design,
    generate,
    sample_constrained,
    uniform_sample,
)

print("latent dimension roles:")
for index, role in enumerate(DIM_ROLES):
    print(f"  {index:2d}  {role}")

centre = describe_design("centre", np.full(20, 0.5))
print("\ncentre-of-space hull:", centre.dimensions)
print("feasible:", centre.constraints.all_satisfied)

# One coordinate at a time: beam scale sweeps the waterline beam band.
print("\nbeam sweep (dimension 1):")
for t in (0.0, 0.5, 1.0):
    latent = np.full(20, 0.5)
    latent[1] = t
    d = describe_design("sweep", latent).dimensions
    print(f"  t={t:.1f} -> Bwl={d.beam_waterline:.2f} m, volume={d.displacement_volume:9.0f} m^3")

# Stern parameters act only abaft midship.
base = np.full(20, 0.5)
other = base.copy()
other[10] = 0.9  # much wider transom
a, b = generate(base), generate(other)
fore = a.stations <= 0.5 * a.stations[-1]
print("\nwider transom changes fore-body:",
      not np.array_equal(a.half_breadths[fore], b.half_breadths[fore]))

# Rejection sampling: how hard is it to hit the constraint box?
pool = sample_constrained(500, seed=1)
volumes = [r.dimensions.displacement_volume for r in pool]
print(f"\nsampled {len(pool)} feasible designs; displacement spans "
      f"{min(volumes):.0f}..{max(volumes):.0f} m^3")

# The space-filling sampler stratifies every dimension.
points = np.array(uniform_sample(DesignSpaceBounds.root(), 5, seed=2))
print("\n5-point space-filling sample, dimension 0 strata:",
      sorted(np.floor(points[:, 0] * 5).astype(int).tolist()))

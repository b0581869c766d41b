"""Random exploration: a constrained pool on a 2-D map.

Builds a desk-scale session, saves the embedding scatter with its convex
boundary, and walks the click / evaluate-on-demand / select flow.  The
performance coefficient stays hidden until explicitly requested.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from hullspace.config import RemConfig, SurrogateConfig
from hullspace.rem import build_rem_session
from hullspace.surrogate import train_surrogate_pipeline

model, _ = train_surrogate_pipeline(200, seed=11,
                                    config=SurrogateConfig(hyper_subset=200))
session = build_rem_session(seed=4, surrogate=model,
                            config=RemConfig(pool_size=300, tsne_iterations=600))
print(f"pool: {len(session.pool)} feasible designs, "
      f"boundary: {len(session.embedding.hull_polygon)} hull vertices")

out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)
fig, ax = plt.subplots(figsize=(7, 6))
pts = session.embedding.points
ax.scatter(pts[:, 0], pts[:, 1], s=8, alpha=0.6)
boundary = session.embedding.hull_polygon
ax.plot(*zip(*list(boundary) + [boundary[0]]), "k-", lw=1.5)
ax.set_title("design pool embedding with convex boundary")
fig.savefig(out / "rem_embedding.png", dpi=120)
print("saved", out / "rem_embedding.png")

# Click, inspect, evaluate on demand, and fill the preferred slots.
design = session.click(float(pts[42, 0]), float(pts[42, 1]), timestamp=1000)
print(f"\nclicked design {design.id}: Cw shown = {design.cw} (hidden until evaluated)")
design = session.evaluate_on_demand(design.id, timestamp=2000)
print(f"after evaluate request: Cw = {design.cw:.5f} ({design.cw_source})")

for slot, index in enumerate((42, 7, 99, 150, 260), start=1):
    session.select_preferred(slot, session.pool[index].id, "both", timestamp=3000 + slot)
session.terminate(timestamp=9000)
print(f"\nsession complete; event log holds {len(session.log)} events")
print("embedding export header:", session.embedding.to_csv().splitlines()[0])

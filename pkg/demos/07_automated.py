"""Automated exploration: population search over the preference objective.

The population moves toward the best and away from the worst solution
under an objective blending predicted wave resistance with closeness to
the user's latest pick.  The first interaction ignores closeness (there
is no pick yet); afterwards the scripted user retunes the weights.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from hullspace.aem import AemSession
from hullspace.config import SurrogateConfig
from hullspace.surrogate import train_surrogate_pipeline

model, _ = train_surrogate_pipeline(200, seed=11,
                                    config=SurrogateConfig(hyper_subset=200))
session = AemSession(seed=7, surrogate=model).start()

t = 1000
best_trace = []
for interaction in range(16):
    shown = session.run_interaction(seed=500 + interaction, timestamp=t)
    t += 45_000
    best_trace.append(session.objectives.min())
    pick = min(shown, key=lambda s: s.record.cw)
    # drift the preference weights toward pure performance over the run
    closeness = max(0.3 - 0.02 * interaction, 0.0)
    session.record_selection_and_weights(pick.record.id, "performance",
                                         performance=1.0 - closeness,
                                         closeness=closeness, timestamp=t)
    t += 5_000

summary = session.terminate(timestamp=t)
print(f"final design {summary.final_design_id}, predicted Cw "
      f"{summary.selected_cw[-1]:.5f}")
print("weight history (interaction, performance, closeness):")
for row in session.weight_history[:5]:
    print("  ", row)
print("   ...")
print(f"diversity of the 16 picks: {summary.diversity.sc:.3f} "
      "(low: the optimiser funnels hard)")

out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)
fig, ax = plt.subplots(figsize=(7, 4))
ax.plot(range(1, len(best_trace) + 1), best_trace, "o-")
ax.set_xlabel("interaction")
ax.set_ylabel("population-best objective")
ax.set_title("greedy population search per interaction")
fig.savefig(out / "aem_convergence.png", dpi=120)
print("saved", out / "aem_convergence.png")

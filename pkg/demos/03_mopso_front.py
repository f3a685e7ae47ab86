"""The swarm optimizer on a closed-form bi-objective problem.

Minimizing (x^2, (x-2)^2) over [-5, 5] has the known trade-off curve
x in [0, 2].  The archive should spread along it; the script prints the
recovered front and optionally saves a scatter plot next to this file.
"""

import numpy as np

from abetune import mopso


class BiObjective:
    bounds = mopso.Bounds(lower=np.array([-5.0]), upper=np.array([5.0]))

    def evaluate_batch(self, X):
        x = X[:, 0]
        return np.stack([x ** 2, (x - 2.0) ** 2], axis=1)


cfg = mopso.MopsoConfig(pop_size=50, max_iter=100, seed=42)
archive = mopso.run(BiObjective(), cfg)
xs = np.sort(np.array([p[0] for p in archive.positions]))
print(f"archive holds {len(archive)} mutually non-dominated solutions")
print(f"decision values span [{xs.min():.3f}, {xs.max():.3f}] (ideal [0, 2])")

F = archive.fitnesses[np.argsort(archive.fitnesses[:, 0])]
print("\n   f1 = x^2    f2 = (x-2)^2")
for row in F[:: max(1, len(F) // 12)]:
    print(f"   {row[0]:8.4f}    {row[1]:8.4f}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.figure(figsize=(5, 4))
    plt.plot(F[:, 0], F[:, 1], "o", ms=4)
    plt.xlabel("$x^2$")
    plt.ylabel("$(x-2)^2$")
    plt.title("Recovered trade-off front")
    plt.tight_layout()
    out = __file__.replace(".py", "_front.png")
    plt.savefig(out, dpi=120)
    print(f"\nsaved {out}")
except ImportError:
    print("\n(matplotlib not installed; skipping the plot)")

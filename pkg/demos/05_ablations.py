"""What each decision variable contributes.

Re-runs local tuning with one variable pinned: the starred variant keeps
every feature in the adaptation (mask fixed to all ones), the plus variant
keeps literal unit weights.  Optimizing all three variables together should
not be worse than pinning one.
"""

from abetune import datasets, metrics, mopso, tuning

cfg = mopso.MopsoConfig(pop_size=60, max_iter=40, seed=11)

for name in ("albrecht", "kemerer"):
    ds = datasets.load_bundled(name)
    baseline = metrics.random_guess_baseline(ds.efforts())
    print(f"\n{name} (n={ds.n}, m={ds.m})")
    print(f"{'variant':28s} {'SA%':>7s} {'MBRE%':>8s} {'MIBRE%':>8s}")
    for label, variant in (("full (k, mask, weights)", tuning.variant_lt()),
                           ("mask pinned to all ones", tuning.variant_lt_star()),
                           ("weights pinned to ones", tuning.variant_lt_plus()),
                           ("k only", tuning.variant_k_only())):
        res = tuning.run_lt(ds, variant, cfg, threads=2)
        recs = [metrics.PredictionRecord(a, p)
                for a, p in zip(ds.efforts(), res.predictions)]
        s = metrics.aggregate(recs, baseline)
        print(f"{label:28s} {100 * s.sa:7.1f} {100 * s.mbre:8.1f} {100 * s.mibre:8.1f}")

"""Load, preprocess and standardize a benchmark dataset.

Shows the ingestion pipeline on the bundled albrecht data: raw shape,
missing-value handling, and the min-max scaling that puts every numeric
input feature into [0, 1] while leaving efforts in their native unit.
"""

import numpy as np

from abetune import datasets

raw = datasets.load_bundled_raw("albrecht")
print(f"albrecht raw: {raw.n} projects, {raw.m} input features")
print("features:", ", ".join(s.name for s in raw.input_specs))
print("efforts (months): min=%.1f max=%.1f median=%.1f"
      % (raw.efforts().min(), raw.efforts().max(), np.median(raw.efforts())))

std = datasets.load_bundled("albrecht")
print("\nafter standardization:")
for j, spec in enumerate(s for s in std.specs if s.role.name == "INPUT"):
    col = std.matrix[:, j]
    lo, hi = std.scaling[j]
    print(f"  {spec.name:13s} raw [{lo:8.2f}, {hi:8.2f}] -> scaled "
          f"[{col.min():.2f}, {col.max():.2f}]")

# a dataset with missing rows shrinks during preprocessing
desh_raw = datasets.load_bundled_raw("desharnais")
desh = datasets.load_bundled("desharnais")
print(f"\ndesharnais: {desh_raw.n} rows on disk, {desh.n} complete rows kept")
print("categorical features keep their labels:",
      [std_labels for std_labels in desh.labels if std_labels is not None])

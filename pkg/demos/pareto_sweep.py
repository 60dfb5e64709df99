"""
Tracing the fit / tightness trade-off
=====================================

Sweep the spread bound on the Ionosphere data and tabulate the fit reached.
Looser bounds let the templates open up and fit better.
"""

import warnings
from pathlib import Path

import numpy as np

from tsnmf import SearchConfig, pareto_sweep
from tsnmf.dataio import load_delimited, preprocess_ionosphere

warnings.filterwarnings("ignore", "some data columns lie outside")

path = Path(__file__).resolve().parents[1] / "data" / "ionosphere.data"
X = preprocess_ionosphere(load_delimited(path, label_column=-1)).matrix

eps = np.linspace(0.1, 1.0, 10) * np.pi
points = pareto_sweep(X, 2, eps, SearchConfig(epsilon=np.pi, i_max=100, seed=1))

print(f"{'epsilon':>8s} {'fit':>10s} {'spread':>8s} {'area':>7s}")
for p in points:
    r = p.result
    print(f"{p.epsilon:8.4f} {p.fit:10.4f} {r.spread:8.4f} {r.area:7.4f}")

# the spread constraint is active until the bound stops mattering
active = [p.result.spread >= p.epsilon - 1e-9 for p in points]
print("bound active:", active)

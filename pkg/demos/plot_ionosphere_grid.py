"""
Ionosphere: coefficient scatter for three spread bounds
=======================================================

Preprocess the Ionosphere radar returns, reduce them onto two templates for
spread bounds pi/4, pi/2 and 3pi/4 after 1, 5, 10, 25 and 100 iterations,
and plot the two coefficient rows against each other, coloured by class.

Usage::

    python demos/plot_ionosphere_grid.py [path/to/ionosphere.data] [out_dir]
"""

import sys
import warnings
from pathlib import Path

import numpy as np

from tsnmf import SearchConfig, factorize
from tsnmf.dataio import emit_scatter, load_delimited, preprocess_ionosphere

root = Path(__file__).resolve().parents[1]
src = Path(sys.argv[1]) if len(sys.argv) > 1 else root / "data" / "ionosphere.data"
out = Path(sys.argv[2]) if len(sys.argv) > 2 else Path("ionosphere_grid")
out.mkdir(parents=True, exist_ok=True)

ds = preprocess_ionosphere(load_delimited(src, label_column=-1))
print("points:", ds.matrix.shape[1], "dimension:", ds.matrix.shape[0])
for step in ds.provenance["steps"]:
    print("  ", step)

# some points sit more than 90 degrees from the mean; that is expected here
warnings.filterwarnings("ignore", "some data columns lie outside")

epsilons = {"pi/4": np.pi / 4, "pi/2": np.pi / 2, "3pi/4": 3 * np.pi / 4}
imaxes = [1, 5, 10, 25, 100]
grid = {}
for name, eps in epsilons.items():
    for imax in imaxes:
        res = factorize(ds.matrix, SearchConfig(epsilon=eps, i_max=imax, seed=0), 2)
        grid[name, imax] = res
        tag = name.replace("/", "_")
        emit_scatter(res, ds.labels, out / f"scatter_eps{tag}_imax{imax}.csv")
        print(f"eps={name:6s} i_max={imax:3d}  fit={res.fit:9.4f}  spread={res.spread:.4f}")

###############################################################################
# One row per spread bound, one column per iteration count.

try:
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not installed; scatter CSVs are in", out)
    sys.exit(0)

labels = np.array(ds.labels)
fig, axes = plt.subplots(3, 5, figsize=(15, 9))
for r, name in enumerate(epsilons):
    for c, imax in enumerate(imaxes):
        ax = axes[r, c]
        H = grid[name, imax].H
        for cls, colour in (("g", "tab:blue"), ("b", "tab:red")):
            sel = labels == cls
            ax.scatter(H[0, sel], H[1, sel], s=4, c=colour, label=cls)
        ax.set_title(f"eps={name}, i={imax}", fontsize=9)
axes[0, 0].legend()
fig.tight_layout()
fig.savefig(out / "ionosphere_grid.png", dpi=120)
print("wrote", out / "ionosphere_grid.png")

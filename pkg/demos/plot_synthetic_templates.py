"""
Recovering two tight templates from synthetic data
==================================================

Build data as nonnegative combinations of two unit templates 0.9 rad apart,
start the search from a poor initialization, and watch the fit fall while the
template spread stays under the bound.
"""

import numpy as np

from tsnmf import SearchConfig, factorize, geodesic_spread, parallelogram_area

rng = np.random.default_rng(0)
n, m = 5, 40

# two templates symmetric about a random centre, in a random plane
c = rng.normal(size=n)
c /= np.linalg.norm(c)
u = rng.normal(size=n)
u -= c * (c @ u)
u /= np.linalg.norm(u)
W_true = np.column_stack([np.cos(0.45) * c + np.sin(0.45) * u,
                          np.cos(0.45) * c - np.sin(0.45) * u])
H_true = rng.uniform(0.2, 1.0, size=(2, m))
X = W_true @ H_true
print("true spread:", geodesic_spread(W_true))


###############################################################################
# The default farthest-point start already spans this data cone exactly, so
# for illustration we start from the two points closest to the mean instead.

def central_init(data, k):
    order = np.argsort(-(data.karcher_mean @ data.columns), kind="stable")
    return data.columns[:, order[:k]].copy()


config = SearchConfig(epsilon=1.0, i_max=200, seed=0)
res = factorize(X, config, 2, init=central_init)

print(f"fit {res.fit0:.3e} -> {res.fit:.3e}, spread {res.spread:.4f} <= {config.epsilon}")
steps = [r.step for r in res.trace[1:]]
for tag in ("refit", "dilation", "poll+", "poll-", "reject"):
    print(f"  {tag:8s} {steps.count(tag)}")

# Any pair of templates whose cone contains the data fits exactly, and the
# data here only fill the middle of the true cone. The search stops at the
# first exact fit it finds, which is tighter than the generating pair.
print("template / truth cosines:\n", np.round(np.abs(res.W.T @ W_true), 6))

###############################################################################
# Why spread rather than area: two template pairs with the same area but
# opposite orientation of the second column.

for a in (0.6, -0.6):
    W = np.array([[1.0, a], [0.0, np.sqrt(1 - a * a)], [0.0, 0.0]])
    print(f"a={a:+.1f}: area {parallelogram_area(W):.3f}, spread {geodesic_spread(W):.3f}")

###############################################################################
# Fit per iteration.

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fits = [r.fit for r in res.trace]
    plt.semilogy(fits)
    plt.xlabel("iteration")
    plt.ylabel("fit")
    plt.savefig("synthetic_fit.png", dpi=120)

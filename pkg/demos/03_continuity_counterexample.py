"""
The continuity bound and its coefficient
========================================

The bound p(x,z) <= p(y,z) + c sqrt(1 - p(x,y)) + (1 - p(x,y)) is
stated with c = 1/2.  A two-level family breaks it; c = 1 holds and is
tight.
"""

# %%
import numpy as np

from spstruct import continuity_bound, continuity_family
from spstruct.checker import continuity_sweep

# %% [markdown]
# x = sqrt(r) u + sqrt(1-r) v and y = sqrt(r-eps) u + sqrt(1-r+eps) v, tested at z = u.

# %%
fam = continuity_family(0.5, 1e-3)
m = fam.model
q = 1 - m.similarity(fam.x, fam.y)
print(f"1 - p(x,y)        = {q:.4e}   (eps^2/(4r(1-r)) = {1e-6:.4e})")
print(f"p(x,u) - p(y,u)   = {m.similarity(fam.x, fam.u) - m.similarity(fam.y, fam.u):.4e}")
print(f"slack with c = 1/2: {continuity_bound(m, fam.x, fam.y, fam.u, 0.5):+.4e}")
print(f"slack with c = 1  : {continuity_bound(m, fam.x, fam.y, fam.u, 1.0):+.4e}")

# %% [markdown]
# Over a grid the c = 1/2 slack goes negative near delta = 0.  The worst
# case over all states is sqrt(q)/2 - q, peaking at 1/16.

# %%
grid = dict(rs=[0.1, 0.3, 0.5, 0.7, 0.9], epss=[0, 1e-3, 1e-2], deltas=[0, 1e-3, 1e-2])
for c in (0.5, 1.0):
    rows = continuity_sweep(**grid, coefficient=c)
    w = min(rows, key=lambda row: row["slack"])
    print(f"c = {c}: min slack {w['slack']:+.3e} at r={w['r']} eps={w['eps']} delta={w['delta']}")

qs = np.linspace(0, 0.25, 1001)
print("max of sqrt(q)/2 - q:", (np.sqrt(qs) / 2 - qs).max())

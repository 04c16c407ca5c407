"""
Similarity, ortho-sets and projections
======================================

Three kinds of model and the geometry built on top of p(x, y).
"""

# %%
import numpy as np

from spstruct import (
    ClassicalModel, HilbertModel, SectoredModel,
    complement, intersection, o_project, project, span,
)

rng = np.random.default_rng(0)

# %% [markdown]
# In C^2, |+z> and |+x> are tested against each other with probability 1/2.

# %%
m = HilbertModel(2)
up_z, up_x = m.state([1, 0]), m.state([1, 1])
print("p(+z, +x) =", m.similarity(up_z, up_x))

# %% [markdown]
# Classical states are labels; p is 1 on the diagonal and 0 elsewhere.
# Sectored states never overlap across sectors.

# %%
c = ClassicalModel(3)
print("classical p(0,0), p(0,1):", c.similarity(0, 0), c.similarity(0, 1))
s = SectoredModel([2, 3])
x, y = s.state(0, [1, 1j]), s.state(1, [1, 0, 0])
print("cross-sector p:", s.similarity(x, y))

# %% [markdown]
# O-projection: the state orthogonal to A that carries the remaining weight.

# %%
m = HilbertModel(4)
F = m.random_frame(rng)
A = F[:2]
x = m.random_state(rng)
y = o_project(m, x, A)
X = span(m, A)
print(f"p(x, A) + p(x, y) = {X.weight(x) + m.similarity(x, y):.15f}")

# %% [markdown]
# Projection onto a subspace maximizes p, and every p(x, z) with z in the
# subspace factors through it.

# %%
t = project(m, x, X)
z = m.random_state_in(list(X.basis), rng)
print(f"p(x,z) = {m.similarity(x, z):.6f}, p(x,t) p(t,z) = {m.similarity(x, t) * m.similarity(t, z):.6f}")

# %% [markdown]
# The subspace lattice: complements and intersections.

# %%
Xp = complement(m, X)
print("dim X, dim X':", X.dim, Xp.dim)
e = [m.state(v) for v in np.eye(4)]
W = intersection(m, span(m, e[:3]), span(m, [e[0], m.state([0, 0, 1, 1]), e[1]]))
print("dim of the intersection:", W.dim)

"""
Interference quantities alpha, rho and omega
============================================

For orthogonal X and Y with Z their sum, alpha measures how far
p(a, b) departs from the two-path sum and rho bounds it.
"""

# %%
import math

import numpy as np

from spstruct import HilbertModel, ClassicalModel, phase_context, quantities

# %%
m = HilbertModel(2)
e1, e2 = m.state([1, 0]), m.state([0, 1])
ctx = phase_context(m, [e1], [e2])

for label, b in [("b = a", [1, 1]), ("opposite", [1, -1]), ("60 degrees", [1, np.exp(1j * math.pi / 3)])]:
    q = quantities(ctx, m.state([1, 1]), m.state(b))
    print(f"{label:>10}: alpha={q.alpha:+.3f} rho={q.rho:.3f} omega={q.omega:+.3f} phi={q.phi:.4f}")

# %% [markdown]
# Classical models have no interference: alpha and rho vanish.

# %%
c = ClassicalModel(3)
cctx = phase_context(c, [0], [1])
print("classical:", quantities(cctx, 0, 1))

# %% [markdown]
# |alpha| <= rho on random pairs.

# %%
rng = np.random.default_rng(1)
m = HilbertModel(5)
F = m.random_frame(rng)
ctx = phase_context(m, F[:2], F[2:4])
slack = []
for _ in range(500):
    a, b = m.random_state(rng), m.random_state_in(F[:4], rng)
    q = quantities(ctx, a, b)
    slack.append(q.rho - abs(q.alpha))
print(f"min rho - |alpha| over 500 pairs: {min(slack):+.2e}")

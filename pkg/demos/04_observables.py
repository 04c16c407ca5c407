"""
Observables as state transformations
====================================

A Hermitian matrix gives eigenvalues on orthogonal eigensubspaces; the
observable sends a to A a / |A a|.
"""

# %%
import math

import numpy as np

from spstruct import (
    HilbertModel, apply, check_omega_signs, hermitian_to_observable,
    mean_continuity_slack, mean_value, mean_value_from_basis,
)

m = HilbertModel(2)

# %%
r = hermitian_to_observable(np.diag([2.0, 1.0]), m)
a = m.state([1, 1])
print("p(r(a), e1) =", round(m.similarity(apply(r, a), m.state([1, 0])), 12))

# %% [markdown]
# Mean values, directly and from an eigenbasis.

# %%
sz = hermitian_to_observable([[1, 0], [0, -1]], m)
x = m.state([math.sqrt(0.8), math.sqrt(0.2)])
print("mean of sigma_Z at x:", mean_value(sz, x), mean_value_from_basis(sz, x))

# %% [markdown]
# Opposite-sign eigenvalues negate omega, same-sign ones keep it.

# %%
rng = np.random.default_rng(2)
m4 = HilbertModel(4)
for lams in ([2, 2, 1, 1], [1, 1, -1, -1]):
    r = hermitian_to_observable(np.diag(np.asarray(lams, float)), m4)
    chk = check_omega_signs(r, m4.random_state(rng), m4.random_state(rng), 0, 1)
    print(lams, chk.verdict, f"{chk.before:+.4f} -> {chk.after:+.4f}")

# %% [markdown]
# The mean-value continuity bound uses the signed sum of eigenvalues,
# which is zero for sigma_Z; summing |lambda| with coefficient 1 is sound.

# %%
y = m.state([1, 0])
print("signed sum, c = 1/2:", mean_continuity_slack(sz, y, x))
print("sum |lambda|, c = 1:", mean_continuity_slack(sz, y, x, coefficient=1.0, absolute=True))

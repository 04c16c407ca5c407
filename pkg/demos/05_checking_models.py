"""
Checking axioms on a model
==========================

run_suite samples linear models and decides matrix models exactly.
"""

# %%
from spstruct import HilbertModel, MatrixModel, run_suite, CheckConfig, fuzz
from spstruct.checker import STRUCTURE_AXIOMS, render_text, report_document

# %%
cfg = CheckConfig(samples=300, seed=42, axioms=STRUCTURE_AXIOMS)
m = HilbertModel(3)
print(render_text(report_document(m, cfg, run_suite(m, cfg))))

# %% [markdown]
# With the sound coefficient every family passes.

# %%
cfg1 = CheckConfig(samples=300, seed=42, axioms=STRUCTURE_AXIOMS, continuity_coefficient=1.0)
print(render_text(report_document(m, cfg1, run_suite(m, cfg1))))

# %% [markdown]
# A matrix model without o-projections, and the fuzzer closing in on 1/16.

# %%
bad = MatrixModel([[1, 0.5], [0.5, 1]])
rep = next(r for r in run_suite(bad) if r.axiom == "OProjection")
print(rep.verdict, rep.witness)

worst = next(r for r in fuzz(HilbertModel(2), CheckConfig(samples=300, axioms=("Continuity",)), rounds=3))
print(f"fuzzed continuity margin {worst.worst_margin:+.4f} (1/16 = {1 / 16:.4f})")

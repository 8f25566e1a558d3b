"""One input, every layer: how a fuzzy rule network produces a number.

Builds the smallest interesting model (two inputs, two membership
functions each, so four rules) and walks a single sample through
fuzzification, rule firing, weight normalization, and the final blend
of per-rule linear outputs.
"""

import numpy as np

from neurofuzzy import anfis_forward, build_grid_model

model = build_grid_model("gbell", mfs_per_input=2, input_dim=2,
                         input_range=(-1.0, 1.0))

# give the rules distinct linear consequents so the blend is visible
rng = np.random.default_rng(3)
model.consequents = np.round(rng.uniform(-2, 2, model.consequents.shape), 2)

x = np.array([0.4, -0.1])
detail = anfis_forward(model, x)

print("input:", x)
print()
print("rule  antecedent  firing   normalized  rule_out  contribution")
for r in range(model.n_rules):
    ant = tuple(int(i) for i in model.antecedents[r])
    print(f"{r:>4}  {str(ant):>10}  {detail.firing[r]:.4f}"
          f"   {detail.normalized[r]:.4f}     {detail.rule_outputs[r]:>7.3f}"
          f"   {detail.contributions[r]:>8.4f}")

print()
print("normalized weights sum to", detail.normalized.sum())
print("output = sum of contributions =", round(detail.y, 6))

# the output is always a convex blend, so it can never leave the range
# spanned by the per-rule outputs
lo, hi = detail.rule_outputs.min(), detail.rule_outputs.max()
print(f"blend stays inside [{lo:.3f}, {hi:.3f}]")

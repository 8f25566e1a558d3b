"""Hybrid training on the bundled dataset, start to finish.

Every epoch solves the rule consequents exactly (ridge least squares)
and then nudges the membership functions one gradient step.  Run from
the repository root; takes a few seconds.
"""

import numpy as np

from neurofuzzy import (TrainingConfig, binarize, build_grid_model,
                        ensemble_predict_classes, load_dataset,
                        split_stratified, to_arrays, train_hybrid, train_oaa)

samples = binarize(load_dataset("data/ukm_synthetic.csv"))
split = split_stratified(samples, 0.8, seed=0)
print(f"{len(split.train)} training / {len(split.test)} test samples")

# Single-output variant first: one network regresses the knowledge
# level directly as a number in 1..4.
model = build_grid_model("gauss2", mfs_per_input=2)
config = TrainingConfig(epochs=30, learn_rate=0.01)
trained, trace = train_hybrid(model, split.train, split.test, config)
print(f"\nsingle-output: train RMSE {trace.train_rmse[0]:.4f} -> "
      f"{trace.train_rmse[-1]:.4f} over {trace.epochs_run} epochs, "
      f"test RMSE {trace.test_rmse:.4f}")

# One-against-all is what the evaluation pipeline expects: four binary
# networks, one per knowledge level, argmax at the end.
ensemble, traces = train_oaa(build_grid_model("gauss2"), split.train,
                             split.test, config)
for k, t in enumerate(traces):
    print(f"member {k}: final train RMSE {t.train_rmse[-1]:.4f}")

X, _, _, labels = to_arrays(split.test)
predicted = ensemble_predict_classes(ensemble, X)
wrong = int(np.sum(predicted != labels))
print(f"\ntest accuracy {1 - wrong / len(labels):.4f} "
      f"({len(labels) - wrong}/{len(labels)}), CAP "
      f"{100 * (1 - wrong / len(labels)):.2f}%")

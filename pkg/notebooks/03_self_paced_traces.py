"""
Self-paced training traces
==========================

Train the self-paced SVM on the standard synthetic scene with a slow pace
(``kappa = 1.05``) and print how the mean weight grows, with and without the
neighbourhood term.
"""

import numpy as np

from splnc.scene import SceneSpec, generate_scene
from splnc.trainer import TrainerConfig, predict, train_multiclass

ds = generate_scene(SceneSpec(seed=0))
test = ds.test_mask

for reg in ("linear", "neighborhood"):
    cfg = TrainerConfig(c=1.0, gamma=1.0 / 7.0, kappa=1.05, regularizer=reg)
    model, traces = train_multiclass(ds, cfg)
    oa = np.mean(predict(model, ds)[test] == ds.labels[test])
    print(f"{reg}: test OA {oa:.4f}")
    for cid, t in traces.items():
        mv = np.array(t.mean_v)
        marks = mv[:: max(1, len(mv) // 6)]
        print(f"  class {cid}: {len(mv)} iterations, mean v " + " ".join(f"{m:.2f}" for m in marks))

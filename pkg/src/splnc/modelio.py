"""Model files: one JSON document per trained classifier.

Floats are written with Python's shortest round-trip representation, so a
saved and reloaded model predicts bit-identically.
"""

import json

import numpy as np

from .baselines import WishartCenters
from .features import FeatureStats, coherency_from_entries, coherency_to_entries
from .svm import KernelParams, SvmModel
from .trainer import MulticlassModel

FORMAT_NAME = "splnc-model"
FORMAT_VERSION = 1


def model_to_dict(model):
    if isinstance(model, WishartCenters):
        return {
            "format": FORMAT_NAME,
            "format_version": FORMAT_VERSION,
            "kind": "wishart",
            "method": "wc",
            "classes": [
                {"id": cid, "center": coherency_to_entries(S).tolist()}
                for cid, S in zip(model.class_ids, model.centers)
            ],
        }
    doc = {
        "format": FORMAT_NAME,
        "format_version": FORMAT_VERSION,
        "kind": "svm",
        "method": model.method,
        "config": model.config,
        "normalization": None,
        "classes": [],
    }
    if model.stats is not None:
        doc["normalization"] = {"mean": model.stats.mean.tolist(), "std": model.stats.std.tolist()}
    for cid, m in zip(model.classes, model.models):
        doc["classes"].append(
            {
                "id": cid,
                "kernel": {"kind": m.params.kind, "gamma": m.params.gamma},
                "bias": m.bias,
                "coef": m.coef.tolist(),
                "support_vectors": m.support_vectors.tolist(),
            }
        )
    return doc


def model_from_dict(doc):
    if doc.get("format") != FORMAT_NAME:
        raise ValueError("not a model file")
    if doc.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {doc.get('format_version')}")
    if doc["kind"] == "wishart":
        ids = [c["id"] for c in doc["classes"]]
        centers = coherency_from_entries(np.array([c["center"] for c in doc["classes"]]))
        return WishartCenters.from_centers(ids, centers)
    stats = None
    if doc["normalization"] is not None:
        stats = FeatureStats(np.array(doc["normalization"]["mean"]), np.array(doc["normalization"]["std"]))
    models = []
    for c in doc["classes"]:
        params = KernelParams(c["kernel"]["gamma"], c["kernel"]["kind"])
        sv = np.array(c["support_vectors"], dtype=float).reshape(len(c["coef"]), -1)
        models.append(SvmModel(sv, np.array(c["coef"], dtype=float), float(c["bias"]), params))
    ids = [c["id"] for c in doc["classes"]]
    return MulticlassModel(tuple(ids), models, stats, doc.get("config", {}), doc.get("method", "svm"))


def save_model(model, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(model_to_dict(model), fh, indent=1)
        fh.write("\n")


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))

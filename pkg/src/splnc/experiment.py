"""Config-driven experiments: train, predict and score several methods over
several seeds, writing every artefact to an output directory.

Config grammar
--------------
Plain text, one entry per line::

    # comment (also ';')
    [section]
    key = value

Sections and keys are fixed (see ``SCHEMA``); anything else is an error
reported with its line number. Lists are comma separated. A key may appear
once per section.
"""

import os
from dataclasses import dataclass, field

import numpy as np

from .baselines import predict_wishart, train_plain_svm, wishart_centers
from .dataset import read_dataset, write_label_map
from .errors import ConfigError
from .metrics import confusion_matrix, default_palette, oa_aa, render_class_map
from .modelio import save_model
from .scene import SceneSpec, generate_scene, make_rng, sample_training_mask
from .trainer import TrainerConfig, predict, train_multiclass

METHODS = ("svm", "wc", "svm_spl", "svm_splnc")

# the plain SVM baseline uses a smaller cost than the self-paced methods
SVM_DEFAULTS = {"c": 50.0}


def _str(v):
    return v


def _bool(v):
    low = v.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ValueError(f"expected a boolean, got {v!r}")


def _ints(v):
    return [int(t) for t in v.split(",") if t.strip()]


def _names(v):
    return [t.strip() for t in v.split(",") if t.strip()]


def _lambda0(v):
    return None if v.strip().lower() == "auto" else float(v)


SCHEMA = {
    "experiment": {
        "methods": _names,
        "seeds": _ints,
        "output": _str,
        "evaluate": _str,
    },
    "data": {
        "source": _str,
        "path": _str,
        "width": int,
        "height": int,
        "classes": int,
        "layout": _str,
        "voronoi_seeds": int,
        "looks": int,
        "similarity": float,
        "train_fraction": float,
        "block_size": int,
        "resample_mask": _bool,
    },
    "svm": {"c": float, "gamma": float, "tol": float, "normalize": _bool},
    "spl": {
        "c": float,
        "gamma": float,
        "lambda0": _lambda0,
        "quantile": float,
        "kappa": float,
        "entropy_mode": _str,
        "stop_eps": float,
        "max_iters": int,
        "tol": float,
        "normalize": _bool,
        "warm_start_size": int,
    },
}


@dataclass
class ExperimentConfig:
    methods: list
    seeds: list
    output: str = "results"
    evaluate: str = "test"
    data: dict = field(default_factory=dict)
    svm: dict = field(default_factory=dict)
    spl: dict = field(default_factory=dict)
    base_dir: str = "."

    def scene_spec(self, seed):
        d = self.data
        return SceneSpec(
            width=d.get("width", 64),
            height=d.get("height", 64),
            n_classes=d.get("classes", 5),
            layout=d.get("layout", "voronoi"),
            voronoi_seeds=d.get("voronoi_seeds", 15),
            looks=d.get("looks", 4),
            similarity=d.get("similarity", 0.6),
            seed=seed,
            train_fraction=d.get("train_fraction", 0.02),
            block_size=d.get("block_size", 3),
        )

    def trainer_config(self, method, seed):
        if method == "svm":
            return TrainerConfig(seed=seed, **{**SVM_DEFAULTS, **self.svm})
        reg = "neighborhood" if method == "svm_splnc" else "linear"
        return TrainerConfig(seed=seed, regularizer=reg, **self.spl)


def parse_config(text, base_dir="."):
    """Parse experiment config text into an :class:`ExperimentConfig`."""
    sections = {name: {} for name in SCHEMA}
    seen = {name: {} for name in SCHEMA}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {line!r}", lineno)
            current = line[1:-1].strip()
            if current not in SCHEMA:
                raise ConfigError(f"unknown section [{current}]", lineno, current)
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        if current is None:
            raise ConfigError("entry before any [section] header", lineno)
        key, value = (t.strip() for t in line.split("=", 1))
        if key not in SCHEMA[current]:
            raise ConfigError(f"unknown key {key!r} in [{current}]", lineno, key)
        if key in seen[current]:
            raise ConfigError(f"duplicate key {key!r} (first on line {seen[current][key]})", lineno, key)
        try:
            sections[current][key] = SCHEMA[current][key](value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", lineno, key) from None
        seen[current][key] = lineno

    exp = sections["experiment"]
    for key in ("methods", "seeds"):
        if key not in exp:
            raise ConfigError(f"[experiment] needs {key!r}", key=key)
    bad = [m for m in exp["methods"] if m not in METHODS]
    if bad:
        raise ConfigError(
            f"unknown method {bad[0]!r}; choose from {', '.join(METHODS)}",
            seen["experiment"]["methods"],
            "methods",
        )
    if exp.get("evaluate", "test") not in ("test", "all-labeled"):
        raise ConfigError("evaluate must be 'test' or 'all-labeled'", seen["experiment"]["evaluate"], "evaluate")
    source = sections["data"].get("source", "synthetic")
    if source not in ("synthetic", "file"):
        raise ConfigError("source must be 'synthetic' or 'file'", seen["data"]["source"], "source")
    if source == "file" and "path" not in sections["data"]:
        raise ConfigError("file source needs a path", key="path")
    return ExperimentConfig(
        methods=exp["methods"],
        seeds=exp["seeds"],
        output=exp.get("output", "results"),
        evaluate=exp.get("evaluate", "test"),
        data=sections["data"],
        svm=sections["svm"],
        spl=sections["spl"],
        base_dir=base_dir,
    )


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, base_dir=os.path.dirname(os.path.abspath(path)))


def fmt(x):
    """Six significant digits, as used in every metrics CSV."""
    return f"{x:.6g}"


def trace_csv(traces):
    lines = ["class,iter,mean_v,mean_loss,active,train_oa"]
    for cid in sorted(traces):
        for it, mv, ml, act, oa in traces[cid].rows():
            lines.append(f"{cid},{it},{fmt(mv)},{fmt(ml)},{act},{fmt(oa)}")
    return "\n".join(lines) + "\n"


def confusion_csv(cm):
    lines = ["true," + ",".join(f"pred_{c}" for c in cm.classes)]
    for c, row in zip(cm.classes, cm.counts):
        lines.append(f"{c}," + ",".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


@dataclass
class RunResult:
    method: str
    seed: int
    oa: float = None
    aa: float = None
    per_class: list = None
    classes: tuple = ()
    error: str = None


@dataclass
class Report:
    runs: list
    summary_path: str

    @property
    def failures(self):
        return [r for r in self.runs if r.error is not None]

    @property
    def ok(self):
        return not self.failures


def _dataset_for_seed(cfg, seed):
    d = cfg.data
    if d.get("source", "synthetic") == "synthetic":
        return generate_scene(cfg.scene_spec(seed))
    path = d["path"]
    if not os.path.isabs(path):
        path = os.path.join(cfg.base_dir, path)
    ds = read_dataset(path)
    if d.get("resample_mask", False):
        ss = np.random.SeedSequence([seed]).spawn(1)[0]
        ds = sample_training_mask(ds, d.get("train_fraction", 0.02), d.get("block_size", 3), make_rng(ss))
    return ds


def _write(path, data):
    mode = "wb" if isinstance(data, bytes) else "w"
    kw = {} if mode == "wb" else {"encoding": "utf-8", "newline": "\n"}
    with open(path, mode, **kw) as fh:
        fh.write(data)


def run_single(method, seed, ds, cfg, run_dir):
    """Train, predict and score one method on one dataset."""
    os.makedirs(run_dir, exist_ok=True)
    if method == "wc":
        model = wishart_centers(ds)
        pred = predict_wishart(model, ds)
    else:
        tc = cfg.trainer_config(method, seed)
        if method == "svm":
            model = train_plain_svm(ds, tc)
        else:
            model, traces = train_multiclass(ds, tc)
            _write(os.path.join(run_dir, "trace.csv"), trace_csv(traces))
        pred = predict(model, ds)
    save_model(model, os.path.join(run_dir, "model.json"))
    classes = ds.class_ids()
    cm = confusion_matrix(pred, ds.labels, ds.split, mode=cfg.evaluate, classes=classes)
    oa, aa, per_class = oa_aa(cm)
    _write(os.path.join(run_dir, "confusion.csv"), confusion_csv(cm))
    write_label_map(pred, os.path.join(run_dir, "prediction.txt"))
    _write(os.path.join(run_dir, "map.ppm"), render_class_map(pred, default_palette(max(classes))))
    return RunResult(method, seed, oa, aa, per_class, tuple(classes))


def summary_csv(runs):
    classes = sorted({c for r in runs for c in r.classes})
    lines = ["method,seed,oa,aa," + ",".join(f"acc_{c}" for c in classes)]
    for r in runs:
        if r.error is not None:
            lines.append(f"{r.method},{r.seed},,," + ",".join("" for _ in classes))
            continue
        acc = dict(zip(r.classes, r.per_class))
        cells = ["" if acc.get(c) is None else fmt(acc[c]) for c in classes]
        lines.append(f"{r.method},{r.seed},{fmt(r.oa)},{fmt(r.aa)}," + ",".join(cells))
    return "\n".join(lines) + "\n"


def run_experiment(path, log=None):
    """Run every method for every seed of the config at ``path``.

    Writes ``<output>/<method>_seed<seed>/`` run directories and
    ``<output>/summary.csv``. Failed runs are recorded in the report and
    leave empty metric cells in the summary.
    """
    cfg = path if isinstance(path, ExperimentConfig) else load_config(path)
    out = cfg.output if os.path.isabs(cfg.output) else os.path.join(cfg.base_dir, cfg.output)
    os.makedirs(out, exist_ok=True)
    runs = []
    for seed in cfg.seeds:
        ds = _dataset_for_seed(cfg, seed)
        ds.ensure_features()
        for method in cfg.methods:
            run_dir = os.path.join(out, f"{method}_seed{seed}")
            try:
                res = run_single(method, seed, ds, cfg, run_dir)
            except Exception as exc:  # recorded per run; the experiment goes on
                res = RunResult(method, seed, error=f"{type(exc).__name__}: {exc}")
            if log is not None:
                log(res)
            runs.append(res)
    summary_path = os.path.join(out, "summary.csv")
    _write(summary_path, summary_csv(runs))
    return Report(runs, summary_path)

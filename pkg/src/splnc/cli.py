"""Command-line driver.

Exit codes: 0 success, 1 run failure, 2 usage error.
"""

import argparse
import sys

import numpy as np

from . import __version__
from .baselines import WishartCenters, predict_wishart, train_plain_svm, wishart_centers
from .dataset import read_dataset, read_label_map, write_dataset, write_label_map
from .errors import ConfigError, SplncError
from .experiment import METHODS, confusion_csv, fmt, run_experiment, trace_csv
from .metrics import EVAL_MODES, confusion_matrix, default_palette, oa_aa, render_class_map
from .modelio import load_model, save_model
from .scene import LAYOUTS, SceneSpec, generate_scene
from .spl import ENTROPY_MODES
from .trainer import TrainerConfig, predict, train_multiclass


def _lambda0(text):
    return None if text == "auto" else float(text)


def _add_trainer_flags(p):
    d = TrainerConfig()
    p.add_argument("--c", type=float, default=d.c)
    p.add_argument("--gamma", type=float, default=d.gamma)
    p.add_argument("--lambda0", type=_lambda0, default=None, help="initial pace or 'auto'")
    p.add_argument("--kappa", type=float, default=d.kappa)
    p.add_argument("--regularizer", choices=("binary", "linear", "neighborhood"), default=None)
    p.add_argument("--entropy-mode", choices=ENTROPY_MODES, default=d.entropy_mode)
    p.add_argument("--quantile", type=float, default=d.quantile)
    p.add_argument("--stop-eps", type=float, default=d.stop_eps)
    p.add_argument("--max-iters", type=int, default=d.max_iters)
    p.add_argument("--tol", type=float, default=d.tol)
    p.add_argument("--no-normalize", action="store_true", help="train on raw features")


def build_parser():
    parser = argparse.ArgumentParser(prog="splnc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic scene as coherency CSV")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--width", type=int, default=64)
    p.add_argument("--height", type=int, default=64)
    p.add_argument("--classes", type=int, default=5)
    p.add_argument("--layout", choices=LAYOUTS, default="voronoi")
    p.add_argument("--voronoi-seeds", type=int, default=15)
    p.add_argument("--looks", type=int, default=4)
    p.add_argument("--similarity", type=float, default=0.6)
    p.add_argument("--train-fraction", type=float, default=0.02)
    p.add_argument("--block-size", type=int, default=3)
    p.add_argument("--out", required=True, help="coherency CSV to write")
    p.add_argument("--truth", help="also write the ground-truth label map here")

    p = sub.add_parser("features", help="convert a coherency CSV into a feature CSV")
    p.add_argument("input")
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="train one classifier")
    p.add_argument("data", help="coherency or feature CSV with a training split")
    p.add_argument("--method", choices=METHODS, default="svm_splnc")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--model", required=True, help="model file to write")
    p.add_argument("--trace", help="trace CSV to write (self-paced methods)")
    _add_trainer_flags(p)

    p = sub.add_parser("predict", help="label every pixel with a trained model")
    p.add_argument("model")
    p.add_argument("data")
    p.add_argument("--out", required=True, help="label map to write")
    p.add_argument("--ppm", help="also render the map as a PPM image")

    p = sub.add_parser("eval", help="score a predicted label map")
    p.add_argument("prediction")
    p.add_argument("data", help="dataset CSV providing truth labels and split")
    p.add_argument("--mode", choices=EVAL_MODES, default="test")
    p.add_argument("--confusion", help="confusion matrix CSV to write")

    p = sub.add_parser("run", help="run a configured experiment")
    p.add_argument("config")
    return parser


def _trainer_config(args, regularizer):
    return TrainerConfig(
        c=args.c,
        gamma=args.gamma,
        lambda0=args.lambda0,
        quantile=args.quantile,
        kappa=args.kappa,
        regularizer=regularizer,
        entropy_mode=args.entropy_mode,
        stop_eps=args.stop_eps,
        max_iters=args.max_iters,
        tol=args.tol,
        seed=args.seed,
        normalize=not args.no_normalize,
    )


def cmd_synth(args):
    spec = SceneSpec(
        width=args.width,
        height=args.height,
        n_classes=args.classes,
        layout=args.layout,
        voronoi_seeds=args.voronoi_seeds,
        looks=args.looks,
        similarity=args.similarity,
        seed=args.seed,
        train_fraction=args.train_fraction,
        block_size=args.block_size,
    )
    ds = generate_scene(spec)
    write_dataset(ds, args.out, "coherency")
    if args.truth:
        write_label_map(ds.labels, args.truth)
    print(f"wrote {ds.width}x{ds.height} scene, training fraction {fmt(ds.training_fraction)}")
    return 0


def cmd_features(args):
    ds = read_dataset(args.input)
    if ds.coherency is None:
        raise SplncError("input already holds features")
    write_dataset(ds, args.out, "features")
    return 0


def cmd_train(args):
    ds = read_dataset(args.data)
    if args.method == "wc":
        model = wishart_centers(ds)
    elif args.method == "svm":
        model = train_plain_svm(ds, _trainer_config(args, "linear"))
    else:
        default = "neighborhood" if args.method == "svm_splnc" else "linear"
        model, traces = train_multiclass(ds, _trainer_config(args, args.regularizer or default))
        if args.trace:
            with open(args.trace, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(trace_csv(traces))
    save_model(model, args.model)
    return 0


def cmd_predict(args):
    model = load_model(args.model)
    ds = read_dataset(args.data)
    if isinstance(model, WishartCenters):
        if ds.coherency is None:
            raise SplncError("the Wishart model needs a coherency CSV")
        labels = predict_wishart(model, ds)
    else:
        labels = predict(model, ds)
    write_label_map(labels, args.out)
    if args.ppm:
        with open(args.ppm, "wb") as fh:
            fh.write(render_class_map(labels, default_palette(int(np.max(labels)))))
    return 0


def cmd_eval(args):
    pred = read_label_map(args.prediction)
    ds = read_dataset(args.data)
    cm = confusion_matrix(pred, ds.labels, ds.split, mode=args.mode)
    oa, aa, per_class = oa_aa(cm)
    print(f"oa,{fmt(oa)}")
    print(f"aa,{fmt(aa)}")
    for cid, acc in zip(cm.classes, per_class):
        print(f"acc_{cid},{'' if acc is None else fmt(acc)}")
    if args.confusion:
        with open(args.confusion, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(confusion_csv(cm))
    return 0


def cmd_run(args):
    def log(res):
        if res.error:
            print(f"{res.method} seed {res.seed}: FAILED {res.error}", file=sys.stderr)
        else:
            print(f"{res.method} seed {res.seed}: oa {fmt(res.oa)} aa {fmt(res.aa)}")

    report = run_experiment(args.config, log=log)
    print(f"summary: {report.summary_path}")
    return 0 if report.ok else 1


COMMANDS = {
    "synth": cmd_synth,
    "features": cmd_features,
    "train": cmd_train,
    "predict": cmd_predict,
    "eval": cmd_eval,
    "run": cmd_run,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (SplncError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

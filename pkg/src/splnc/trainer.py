"""Self-paced SVM training, one-vs-rest composition and prediction."""

from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DegenerateProblem, DimensionMismatch, TooFewClasses
from .features import FeatureStats, normalize_features
from .spl import ENTROPY_MODES, init_pace, weight_binary, weight_linear, weight_neighborhood
from .svm import ZERO_WEIGHT, KernelParams, fit_svm, hinge_losses

REGULARIZERS = ("binary", "linear", "neighborhood")
# 8-connected offsets (dx, dy), fixed order
NEIGHBOR_OFFSETS = ((-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1))


@dataclass(frozen=True)
class TrainerConfig:
    """Hyper-parameters of the self-paced trainer.

    ``lambda0=None`` selects the initial pace automatically as the
    ``quantile`` order statistic of the warm-start losses that exceed the
    solver tolerance (1.0 when there are none).
    """

    c: float = 100.0
    gamma: float = 1.0
    lambda0: float = None
    quantile: float = 0.3
    kappa: float = 1.05
    regularizer: str = "neighborhood"
    entropy_mode: str = "normalized"
    stop_eps: float = 0.01
    max_iters: int = 200
    tol: float = 1e-3
    seed: int = 0
    normalize: bool = True
    warm_start_size: int = 200

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("c must be positive")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if self.lambda0 is not None and not self.lambda0 > 0:
            raise ValueError("lambda0 must be positive")
        if not 0 < self.quantile < 1:
            raise ValueError("quantile must lie in (0, 1)")
        if not self.kappa > 1:
            raise ValueError("kappa must exceed 1")
        if self.regularizer not in REGULARIZERS:
            raise ValueError(f"regularizer must be one of {REGULARIZERS}")
        if self.entropy_mode not in ENTROPY_MODES:
            raise ValueError(f"entropy mode must be one of {ENTROPY_MODES}")
        if not 0 <= self.stop_eps < 1:
            raise ValueError("stop_eps must lie in [0, 1)")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.warm_start_size < 2:
            raise ValueError("warm_start_size must be at least 2")

    @property
    def kernel(self):
        return KernelParams(self.gamma)

    def to_dict(self):
        return asdict(self)


@dataclass
class TrainingTrace:
    """One record per completed outer iteration.

    ``lam`` is the pace after that iteration's update, so
    ``lam[m-1] == lambda0 * kappa**m``. ``train_oa`` is the binary training
    accuracy of the model solved in that iteration.
    """

    lambda0: float = None
    mean_v: list = field(default_factory=list)
    mean_loss: list = field(default_factory=list)
    active: list = field(default_factory=list)
    train_oa: list = field(default_factory=list)
    lam: list = field(default_factory=list)
    reached_stop: bool = False
    solver_converged: bool = True

    def __len__(self):
        return len(self.mean_v)

    def rows(self):
        return list(zip(range(1, len(self) + 1), self.mean_v, self.mean_loss, self.active, self.train_oa))


def neighbor_table(coords):
    """Index of each sample's 8-connected training neighbours, -1 if absent.

    Parameters
    ----------
    coords : array_like, shape (n, 2)
        Integer ``(x, y)`` grid positions of the training samples.
    """
    coords = np.asarray(coords, dtype=np.int64)
    lookup = {(int(x), int(y)): i for i, (x, y) in enumerate(coords)}
    table = np.full((coords.shape[0], 8), -1, dtype=np.int64)
    for i, (x, y) in enumerate(coords):
        for k, (dx, dy) in enumerate(NEIGHBOR_OFFSETS):
            table[i, k] = lookup.get((int(x) + dx, int(y) + dy), -1)
    return table


def _gather(losses, table):
    return np.where(table >= 0, losses[np.maximum(table, 0)], np.nan)


def spl_weights(losses, lam, config, table=None):
    """Weights for every sample under the configured regulariser."""
    if config.regularizer == "binary":
        return np.asarray(weight_binary(losses, lam), dtype=float)
    if config.regularizer == "linear":
        return np.asarray(weight_linear(losses, lam), dtype=float)
    if table is None:
        raise ValueError("the neighborhood regularizer needs grid coordinates")
    return np.asarray(
        weight_neighborhood(losses, _gather(losses, table), lam, config.entropy_mode), dtype=float
    )


def _degenerate(v, y):
    return not (np.any(v[y > 0] >= ZERO_WEIGHT) and np.any(v[y < 0] >= ZERO_WEIGHT))


def _warm_start_subset(y, size, rng):
    n = y.size
    sub = np.sort(rng.choice(n, size=min(n, size), replace=False))
    for label in (1.0, -1.0):
        if not np.any(y[sub] == label):
            sub = np.sort(np.append(sub, np.flatnonzero(y == label)[0]))
    return sub


def train_spl_svm_binary(X, y, config, coords=None, rng=None):
    """Self-paced training of one binary weighted SVM.

    Iteration 0 fits an unweighted SVM on a random subset of at most
    ``config.warm_start_size`` samples to get initial losses. Each outer
    iteration then solves the weighted dual with the current weights,
    recomputes hinge losses, updates the weights at the current pace and
    multiplies the pace by ``kappa``. Once the mean weight reaches
    ``1 - stop_eps`` a final model is fitted with those weights.

    When the weights leave a class with no active sample the solve is
    skipped for that iteration; the pace still advances.

    Parameters
    ----------
    X : array_like, shape (n, d)
    y : array_like, shape (n,)
        Labels in ``{-1, +1}``.
    config : TrainerConfig
    coords : array_like, shape (n, 2), optional
        Grid positions; required by the neighbourhood regulariser.
    rng : numpy.random.Generator, optional
        Source for the warm-start subset; defaults to one seeded from
        ``config.seed``.

    Returns
    -------
    model : SvmModel
    trace : TrainingTrace
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] != y.size:
        raise DimensionMismatch("X and y have different sample counts")
    if not (np.any(y > 0) and np.any(y < 0)):
        raise DegenerateProblem("both classes must be present")
    if rng is None:
        rng = np.random.default_rng(config.seed)
    table = None
    if config.regularizer == "neighborhood":
        if coords is None:
            raise ValueError("the neighborhood regularizer needs grid coordinates")
        table = neighbor_table(coords)

    params = config.kernel
    solve_kw = {"tol": config.tol}
    trace = TrainingTrace()

    sub = _warm_start_subset(y, config.warm_start_size, rng)
    v_warm = np.zeros(y.size)
    v_warm[sub] = 1.0
    model, sol = fit_svm(X, y, v_warm, config.c, params, **solve_kw)
    trace.solver_converged &= sol.converged
    losses = hinge_losses(model, X, y)
    if config.lambda0 is not None:
        lam = config.lambda0
    else:
        # losses within solver tolerance are margin noise; the pace is scaled
        # on the remaining ones, or set to the hinge scale 1 if none remain
        positive = losses[losses > config.tol]
        lam = init_pace(positive, config.quantile) if positive.size else 1.0
    trace.lambda0 = lam
    v = spl_weights(losses, lam, config, table)

    for _ in range(config.max_iters):
        if not _degenerate(v, y):
            model, sol = fit_svm(X, y, v, config.c, params, **solve_kw)
            trace.solver_converged &= sol.converged
            losses = hinge_losses(model, X, y)
        v = spl_weights(losses, lam, config, table)
        lam = config.kappa * lam
        pred = np.where(model.decision_function(X) >= 0, 1.0, -1.0)
        trace.mean_v.append(float(v.mean()))
        trace.mean_loss.append(float(losses.mean()))
        trace.active.append(int(np.count_nonzero(v > 0)))
        trace.train_oa.append(float(np.mean(pred == y)))
        trace.lam.append(lam)
        if v.mean() >= 1.0 - config.stop_eps:
            trace.reached_stop = True
            break

    if not _degenerate(v, y):
        model, sol = fit_svm(X, y, v, config.c, params, **solve_kw)
        trace.solver_converged &= sol.converged
    return model, trace


@dataclass
class MulticlassModel:
    """One-vs-rest collection of binary models, ordered by class id."""

    classes: tuple
    models: list
    stats: FeatureStats = None
    config: dict = field(default_factory=dict)
    method: str = "svm_splnc"

    def __post_init__(self):
        self.classes = tuple(int(c) for c in self.classes)
        if len(self.classes) < 2:
            raise TooFewClasses("a multiclass model needs at least two classes")
        if len(set(self.classes)) != len(self.classes):
            raise ValueError("class ids must be unique")
        if len(self.models) != len(self.classes):
            raise ValueError("one binary model per class is required")

    def decision_matrix(self, F):
        """Binary decision values, shape ``(n, n_classes)``."""
        F = np.atleast_2d(np.asarray(F, dtype=float))
        if self.stats is not None:
            F = self.stats.apply(F)
        return np.column_stack([m.decision_function(F) for m in self.models])

    def predict_features(self, F):
        D = self.decision_matrix(F)
        # argmax returns the first maximum, i.e. the lowest class id
        return np.asarray(self.classes)[np.argmax(D, axis=1)]


def _prepare(dataset, config):
    F, labels, coords = dataset.training_samples()
    classes = sorted(set(int(c) for c in labels))
    if len(classes) < 2:
        raise TooFewClasses("need at least two labelled classes in the training mask")
    stats = None
    if config.normalize:
        F, stats = normalize_features(F)
    return F, labels, coords, classes, stats


def class_seed(seed, class_id):
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(class_id)]))


def train_multiclass(dataset, config):
    """One-vs-rest self-paced training over the dataset's training pixels.

    Returns the :class:`MulticlassModel` and a dict of traces keyed by
    class id.
    """
    F, labels, coords, classes, stats = _prepare(dataset, config)
    models, traces = [], {}
    for cid in classes:
        y = np.where(labels == cid, 1.0, -1.0)
        model, trace = train_spl_svm_binary(F, y, config, coords=coords, rng=class_seed(config.seed, cid))
        models.append(model)
        traces[cid] = trace
    method = "svm_splnc" if config.regularizer == "neighborhood" else "svm_spl"
    return MulticlassModel(tuple(classes), models, stats, config.to_dict(), method), traces


def predict(model, dataset):
    """Label map over the whole grid from the dataset's features."""
    F = dataset.ensure_features()
    flat = F.reshape(-1, F.shape[-1])
    return model.predict_features(flat).reshape(dataset.height, dataset.width)

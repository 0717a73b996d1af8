"""Self-paced sample weights and the pace schedule.

All weight functions accept scalars or arrays and broadcast. Neighbour
losses are passed as an array whose last axis holds up to eight entries;
``NaN`` marks a missing neighbour (grid border or a non-training pixel).
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import EmptyInput, NonPositivePace

ENTROPY_MODES = ("normalized", "literal")
PACE_FLOOR = 1e-6


def _check_pace(lam):
    lam = np.asarray(lam, dtype=float)
    if np.any(~(lam > 0)):
        raise NonPositivePace("pace parameter must be positive")
    return lam


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def weight_binary(L, lam):
    """1 where ``L < lam``, else 0."""
    lam = _check_pace(lam)
    return _out(np.where(np.asarray(L, dtype=float) < lam, 1.0, 0.0))


def weight_linear(L, lam):
    """``1 - L / lam`` where ``L < lam``, else 0."""
    lam = _check_pace(lam)
    L = np.asarray(L, dtype=float)
    return _out(np.where(L < lam, 1.0 - L / lam, 0.0))


def neighborhood_gamma(neighbor_losses, mode="normalized"):
    """Entropy of the neighbour-loss distribution (natural log).

    In ``normalized`` mode the available losses are divided by their sum; in
    ``literal`` mode by their mean, which gives a non-positive value because
    the resulting "probabilities" sum to the neighbour count. No neighbours,
    or an all-zero neighbourhood, gives 0.
    """
    if mode not in ENTROPY_MODES:
        raise ValueError(f"unknown entropy mode {mode!r}")
    nl = np.asarray(neighbor_losses, dtype=float)
    if nl.ndim == 0:
        nl = nl[None]
    present = ~np.isnan(nl)
    vals = np.where(present, nl, 0.0)
    total = vals.sum(axis=-1)
    k = present.sum(axis=-1)
    if mode == "normalized":
        denom = total
    else:
        denom = np.where(k > 0, total / np.maximum(k, 1), 0.0)
    ok = denom > 0
    p = vals / np.where(ok, denom, 1.0)[..., None]
    plogp = np.where(p > 0, p * np.log(np.where(p > 0, p, 1.0)), 0.0)
    gamma = np.where(ok, -plogp.sum(axis=-1), 0.0)
    return _out(gamma + 0.0)


def neighbor_mean(neighbor_losses):
    """Average over the available neighbours (0 when there are none)."""
    nl = np.asarray(neighbor_losses, dtype=float)
    if nl.ndim == 0:
        nl = nl[None]
    present = ~np.isnan(nl)
    k = present.sum(axis=-1)
    total = np.where(present, nl, 0.0).sum(axis=-1)
    return _out(np.where(k > 0, total / np.maximum(k, 1), 0.0))


def weight_neighborhood(L, neighbor_losses, lam, mode="normalized"):
    """Linear weight on the neighbourhood-combined loss.

    The combined loss is ``L + gamma * Lbar`` with ``Lbar`` the mean
    available neighbour loss and ``gamma`` from :func:`neighborhood_gamma`.
    It is floored at 0 (only reachable in ``literal`` mode), so weights stay
    in ``[0, 1]``. Without neighbours this is exactly :func:`weight_linear`.
    """
    lam = _check_pace(lam)
    L = np.asarray(L, dtype=float)
    gamma = np.asarray(neighborhood_gamma(neighbor_losses, mode))
    lbar = np.asarray(neighbor_mean(neighbor_losses))
    combined = np.maximum(L + gamma * lbar, 0.0)
    return _out(np.where(combined < lam, 1.0 - combined / lam, 0.0))


@dataclass(frozen=True)
class SplState:
    weights: np.ndarray
    lam: float
    kappa: float
    iteration: int = 0

    def __post_init__(self):
        if not self.lam > 0:
            raise NonPositivePace("pace parameter must be positive")
        if not self.kappa > 1:
            raise ValueError("pace step kappa must exceed 1")


def advance_pace(state):
    """Multiply the pace by ``kappa`` and bump the iteration counter."""
    return replace(state, lam=state.kappa * state.lam, iteration=state.iteration + 1)


def init_pace(losses, quantile=0.3):
    """Initial pace: the nearest-rank ``quantile`` of ``losses``, floored at 1e-6."""
    L = np.sort(np.asarray(losses, dtype=float).ravel())
    if L.size == 0:
        raise EmptyInput("init_pace needs at least one loss")
    if not 0 < quantile < 1:
        raise ValueError("quantile must lie in (0, 1)")
    # guard against q * n landing a hair above an integer
    rank = max(int(np.ceil(quantile * L.size - 1e-9)), 1)
    return max(float(L[rank - 1]), PACE_FLOOR)

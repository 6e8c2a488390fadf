"""Low-dimensional curve fit and stochastic layout optimization."""

import warnings
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import structlog
from scipy.optimize import OptimizeWarning, curve_fit

from ..core.errors import NonConvergence
from .graph import FuzzyGraph

logger = structlog.get_logger()

FIT_POINTS = 300
FIT_RMS_LIMIT = 0.05
GRADIENT_CLIP = 4.0
REPULSION_EPS = 1e-3


@dataclass
class Layout:
    coords: np.ndarray

    def __post_init__(self) -> None:
        self.coords = np.asarray(self.coords, dtype=np.float32)

    @property
    def n(self) -> int:
        return int(self.coords.shape[0])

    @property
    def x(self) -> np.ndarray:
        return self.coords[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.coords[:, 1]


def _curve(x, a, b):
    return 1.0 / (1.0 + a * x ** (2 * b))


def target_curve(x: np.ndarray, min_dist: float = 0.1, spread: float = 1.0) -> np.ndarray:
    """1 up to and including ``min_dist``, exponential decay beyond."""
    x = np.asarray(x, dtype=np.float64)
    return np.where(x <= min_dist, 1.0, np.exp(-(x - min_dist) / spread))


def fit_ab(min_dist: float = 0.1, spread: float = 1.0) -> Tuple[float, float]:
    """Fit 1/(1 + a·x^2b) to ``target_curve`` sampled on [0, 3·spread]."""
    xv = np.linspace(0, spread * 3, FIT_POINTS)
    yv = target_curve(xv, min_dist, spread)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OptimizeWarning)
            (a, b), _ = curve_fit(_curve, xv, yv, p0=(1.0, 1.0), maxfev=100 * (len(xv) + 1))
    except RuntimeError as e:
        raise NonConvergence(f"curve fit failed for min_dist={min_dist}: {e}", float("nan")) from e

    rms = float(np.sqrt(np.mean((_curve(xv, a, b) - yv) ** 2)))
    if not (a > 0 and b > 0) or rms > FIT_RMS_LIMIT:
        raise NonConvergence(f"curve fit for min_dist={min_dist} gave a={a:.4g}, b={b:.4g}", rms)
    return float(a), float(b)


def _clip(values: np.ndarray) -> np.ndarray:
    return np.clip(values, -GRADIENT_CLIP, GRADIENT_CLIP)


def epochs_per_sample(weights: np.ndarray, n_epochs: int) -> np.ndarray:
    """Heavier edges are sampled more often; the heaviest every epoch."""
    result = np.full(weights.shape, -1.0)
    n_samples = n_epochs * (weights / weights.max())
    result[n_samples > 0] = float(n_epochs) / n_samples[n_samples > 0]
    return result


def layout_sgd(
    graph: FuzzyGraph,
    n_epochs: int = 300,
    seed: int = 0,
    a: float = 1.577,
    b: float = 0.895,
    negative_sample_rate: int = 5,
    learning_rate: float = 1.0,
    init_scale: float = 10.0,
    batch_size: int = 256,
) -> Layout:
    """Attract along graph edges, repel from random points.

    Edges are applied in fixed chunks with scattered adds, so the result
    depends only on the inputs and ``seed``.
    """
    rng = np.random.default_rng(seed)
    Y = rng.normal(0.0, init_scale, size=(graph.n, 2))
    heads, tails, weights = graph.edges()
    if heads.size == 0:
        return Layout(Y)

    schedule = epochs_per_sample(weights, n_epochs)
    next_sample = schedule.copy()

    for epoch in range(n_epochs):
        alpha = learning_rate * (1.0 - epoch / n_epochs)
        active = np.flatnonzero((schedule > 0) & (next_sample <= epoch + 1))
        next_sample[active] += schedule[active]

        for start in range(0, active.size, batch_size):
            chunk = active[start : start + batch_size]
            head, tail = heads[chunk], tails[chunk]

            diff = Y[head] - Y[tail]
            dist_sq = np.einsum("ij,ij->i", diff, diff)
            coeff = np.zeros_like(dist_sq)
            moved = dist_sq > 0
            coeff[moved] = (-2.0 * a * b * dist_sq[moved] ** (b - 1.0)) / (a * dist_sq[moved] ** b + 1.0)
            grad = _clip(coeff[:, None] * diff) * alpha
            np.add.at(Y, head, grad)
            np.add.at(Y, tail, -grad)

            if negative_sample_rate <= 0:
                continue
            neg_head = np.repeat(head, negative_sample_rate)
            neg = rng.integers(graph.n, size=neg_head.size)
            keep = neg != neg_head
            neg_head, neg = neg_head[keep], neg[keep]
            diff = Y[neg_head] - Y[neg]
            dist_sq = np.einsum("ij,ij->i", diff, diff)
            apart = dist_sq > 0
            coeff = np.zeros_like(dist_sq)
            coeff[apart] = (2.0 * b) / ((REPULSION_EPS + dist_sq[apart]) * (a * dist_sq[apart] ** b + 1.0))
            grad = np.where(apart[:, None], _clip(coeff[:, None] * diff), GRADIENT_CLIP) * alpha
            np.add.at(Y, neg_head, grad)

    if not np.all(np.isfinite(Y)):
        raise NonConvergence("layout diverged", float("inf"))
    logger.debug("layout_optimized", points=graph.n, edges=int(heads.size), epochs=n_epochs)
    return Layout(Y)

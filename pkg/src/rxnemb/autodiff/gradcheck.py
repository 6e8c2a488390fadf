"""Central finite-difference gradient checking."""

from typing import Callable, Dict, Iterable, Mapping, Optional

import numpy as np
import structlog

from .tensor import Tape, Tensor, backward

logger = structlog.get_logger()

LossFn = Callable[[Dict[str, Tensor]], Tensor]

# differences this small count as agreement; roundoff in the numeric side
# is far below it for float64 losses of order one
DEFAULT_ATOL = 1e-8


def relative_error(analytic: np.ndarray, numeric: np.ndarray, atol: float = DEFAULT_ATOL) -> np.ndarray:
    """|a − n| / max(|a|, |n|), or 0 where |a − n| ≤ atol."""
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    diff = np.abs(analytic - numeric)
    scale = np.maximum(np.abs(analytic), np.abs(numeric))
    with np.errstate(divide="ignore", invalid="ignore"):
        err = np.where(diff <= atol, 0.0, diff / scale)
    return err


def gradient_check(
    fn: LossFn,
    params: Mapping[str, np.ndarray],
    step: float = 1e-3,
    max_entries: Optional[int] = None,
    seed: int = 0,
    atol: float = DEFAULT_ATOL,
    names: Optional[Iterable[str]] = None,
) -> Dict[str, float]:
    """Max relative error per parameter between backward and finite differences.

    Everything runs in 64-bit. With ``max_entries`` set, each parameter is
    checked on a seeded random subset of that many entries. ``names`` limits
    the check to some parameters; the others still feed the loss.
    """
    base = {name: np.asarray(value, dtype=np.float64) for name, value in params.items()}
    checked = list(base) if names is None else list(names)
    position = {name: i for i, name in enumerate(base)}

    with Tape() as tape:
        tracked = {name: Tensor(value, requires_grad=True, name=name, dtype=np.float64) for name, value in base.items()}
        loss = fn(tracked)
    analytic = backward(tape, loss, tracked)

    def evaluate(name: str, flat_index: int, delta: float) -> float:
        shifted = base[name].copy()
        shifted.reshape(-1)[flat_index] += delta
        inputs = {k: Tensor(shifted if k == name else v, dtype=np.float64) for k, v in base.items()}
        return fn(inputs).item()

    errors: Dict[str, float] = {}
    for name in checked:
        size = base[name].size
        if max_entries is not None and size > max_entries:
            # seeded per parameter so a narrower ``names`` samples the same entries
            rng = np.random.default_rng([seed, position[name]])
            entries = np.sort(rng.choice(size, size=max_entries, replace=False))
        else:
            entries = np.arange(size)

        flat_grad = analytic[name].reshape(-1)
        numeric = np.array(
            [(evaluate(name, int(i), step) - evaluate(name, int(i), -step)) / (2 * step) for i in entries]
        )
        err = relative_error(flat_grad[entries], numeric, atol)
        errors[name] = float(err.max()) if err.size else 0.0

    logger.debug(
        "gradient_check_completed",
        parameters=len(errors),
        step=step,
        max_error=max(errors.values(), default=0.0),
    )
    return errors

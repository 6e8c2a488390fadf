"""Tensor and tape for reverse-mode differentiation."""

from contextvars import ContextVar, Token
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import NonFiniteValue, NotScalar

DEFAULT_DTYPE = np.float32

BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]
Gradients = Dict[str, np.ndarray]

_active_tape: ContextVar[Optional["Tape"]] = ContextVar("rxnemb_active_tape", default=None)


class Tensor:
    """Immutable dense array, optionally tracked for gradients."""

    __slots__ = ("data", "requires_grad", "name")

    def __init__(self, data, requires_grad: bool = False, name: Optional[str] = None, dtype=DEFAULT_DTYPE):
        array = np.array(data, dtype=dtype, copy=True)
        array.setflags(write=False)
        self.data = array
        self.requires_grad = requires_grad
        self.name = name

    @classmethod
    def _wrap(cls, array: np.ndarray, requires_grad: bool = False) -> "Tensor":
        out = cls.__new__(cls)
        array.setflags(write=False)
        out.data = array
        out.requires_grad = requires_grad
        out.name = None
        return out

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        if self.data.size != 1:
            raise NotScalar(f"tensor of shape {self.shape} is not a scalar")
        return float(self.data.reshape(()))

    def detach(self) -> "Tensor":
        return Tensor._wrap(self.data)

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, dtype={self.dtype}{label}, requires_grad={self.requires_grad})"


@dataclass
class _Node:
    output: Tensor
    inputs: Tuple[Tensor, ...]
    backward_fn: BackwardFn


class Tape:
    """Records primitive applications while active.

    Use as a context manager; nested tapes shadow outer ones.
    """

    def __init__(self) -> None:
        self.nodes: List[_Node] = []
        self._token: Optional[Token] = None

    def __enter__(self) -> "Tape":
        self._token = _active_tape.set(self)
        return self

    def __exit__(self, *exc) -> None:
        _active_tape.reset(self._token)
        self._token = None

    def __len__(self) -> int:
        return len(self.nodes)


def active_tape() -> Optional[Tape]:
    return _active_tape.get()


def record(op: str, data: np.ndarray, inputs: Sequence[Tensor], backward_fn: BackwardFn) -> Tensor:
    """Wrap an op result, validate it and put it on the active tape if needed."""
    if not np.all(np.isfinite(data)):
        raise NonFiniteValue(f"{op} produced a non-finite value")
    tape = _active_tape.get()
    tracked = tape is not None and any(t.requires_grad for t in inputs)
    out = Tensor._wrap(data, requires_grad=tracked)
    if tracked:
        tape.nodes.append(_Node(out, tuple(inputs), backward_fn))
    return out


def backward(tape: Tape, loss: Tensor, params: Optional[Mapping[str, Tensor]] = None) -> Gradients:
    """Reverse traversal of ``tape`` from a scalar ``loss``.

    Returns one gradient per named parameter; parameters that the loss does not
    depend on get zeros. Untracked inputs never appear.
    """
    if loss.data.size != 1:
        raise NotScalar(f"loss must be scalar, got shape {loss.shape}")

    grads: Dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    for node in reversed(tape.nodes):
        upstream = grads.pop(id(node.output), None)
        if upstream is None:
            continue
        for tensor, grad in zip(node.inputs, node.backward_fn(upstream)):
            if grad is None or not tensor.requires_grad:
                continue
            key = id(tensor)
            if key in grads:
                grads[key] = grads[key] + grad
            else:
                grads[key] = np.asarray(grad, dtype=tensor.dtype)

    if params is None:
        leaves = {}
        for node in tape.nodes:
            for tensor in node.inputs:
                if tensor.requires_grad and tensor.name:
                    leaves[tensor.name] = tensor
        params = leaves

    return {
        name: np.asarray(grads.get(id(t), np.zeros_like(t.data)), dtype=t.dtype).reshape(t.shape)
        for name, t in params.items()
        if t.requires_grad
    }

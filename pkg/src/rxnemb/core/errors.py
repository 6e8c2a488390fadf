"""Exception hierarchy for RXNEmb."""

from typing import Optional


class RxnEmbError(Exception):
    """Base class for all RXNEmb errors."""


class ConfigError(RxnEmbError, ValueError):
    """Invalid or inconsistent configuration."""


class DataError(RxnEmbError):
    """Input data could not be used."""


# --- chem -----------------------------------------------------------------


class SmilesError(DataError, ValueError):
    """A SMILES string could not be parsed."""

    def __init__(self, message: str, offset: Optional[int] = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)


class UnbalancedRing(SmilesError):
    """A ring-closure digit was opened but never closed."""


class UnbalancedParen(SmilesError):
    """Branch parentheses do not match."""


class UnknownToken(SmilesError):
    """A character sequence outside the supported grammar."""


class ValenceUnderflow(SmilesError):
    """Hydrogen count and bonds cannot be reconciled for an atom."""


class EmptySide(DataError, ValueError):
    """A reaction side has no components."""


class ComponentParseError(DataError, ValueError):
    """A reaction component failed to parse."""

    def __init__(self, side: str, index: int, cause: SmilesError):
        self.side = side
        self.index = index
        self.cause = cause
        super().__init__(f"{side} component {index}: {cause}")


class FragmentError(DataError, ValueError):
    """A bond cut or fragment exchange is not possible."""


class BondInCycle(FragmentError):
    """The bond belongs to a ring."""


class NotSingleOrder(FragmentError):
    """Only single bonds can be cut."""


class IndexOutOfRange(FragmentError):
    """Bond index does not exist in the graph."""


class NoCuttableBond(FragmentError):
    """A product has no acyclic single bond."""


# --- autodiff -------------------------------------------------------------


class TensorError(RxnEmbError, ValueError):
    """Base class for tensor operation errors."""


class ShapeMismatch(TensorError):
    """Operand shapes are incompatible."""


class AllMaskedRow(TensorError):
    """A softmax row has no unmasked entry."""


class NotScalar(TensorError):
    """Backward was called on a non-scalar tensor."""


class NonFiniteValue(TensorError):
    """An operation produced NaN or infinity."""


# --- encoder --------------------------------------------------------------


class LayerCountMismatch(RxnEmbError, ValueError):
    """Jumping knowledge received the wrong number of layer outputs."""


class TooManyComponents(DataError, ValueError):
    """A reaction side has more components than the padding allows."""


class AllMasked(RxnEmbError, ValueError):
    """Pooling over a set where every row is masked."""


class CheckpointError(DataError):
    """A checkpoint file is malformed or inconsistent with its config."""


# --- pretrain -------------------------------------------------------------


class SingleClassCorpus(DataError, ValueError):
    """Training requires both real and fictitious reactions."""


class EmptySet(DataError, ValueError):
    """Evaluation on an empty set."""


# --- cluster / project ----------------------------------------------------


class ZeroVectorCosine(DataError, ValueError):
    """Cosine distance is undefined for zero vectors."""


class LengthMismatch(DataError, ValueError):
    """Embeddings of different lengths."""


class KTooLarge(ConfigError):
    """Requested more items than available."""


class TreeMatrixMismatch(RxnEmbError, ValueError):
    """Dendrogram leaves do not match the distance matrix."""


class NonConvergence(RxnEmbError):
    """An iterative fit did not reach the required residual."""

    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(f"{message} (residual {residual:.4g})")


# --- viz ------------------------------------------------------------------


class CountMismatch(RxnEmbError, ValueError):
    """Intensities do not line up with the atoms being drawn."""


class UnknownTag(RxnEmbError, ValueError):
    """A dataset tag is not in the declared palette."""

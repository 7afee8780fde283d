from __future__ import annotations

from typing import Any, Callable, Iterable, Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt
from numpy import array
from typing_extensions import TypeAlias

from .operators import prod

MAX_DIMS = 8


class IndexingError(RuntimeError):
    """Exception raised for indexing errors."""

    pass


Storage: TypeAlias = npt.NDArray[np.object_]
OutIndex: TypeAlias = npt.NDArray[np.int32]
Index: TypeAlias = npt.NDArray[np.int32]
Shape: TypeAlias = npt.NDArray[np.int32]
Strides: TypeAlias = npt.NDArray[np.int32]

UserIndex: TypeAlias = Sequence[int]
UserShape: TypeAlias = Sequence[int]
UserStrides: TypeAlias = Sequence[int]


def index_to_position(index: Index, strides: Strides) -> int:
    """Converts a multidimensional `index` into a position in storage based on strides.

    Args:
    ----
        index : index tuple of ints
        strides : tensor strides

    Returns:
    -------
        Position in storage

    """
    position = 0
    for ind, stride in zip(index, strides):
        position += int(ind) * int(stride)
    return position


def to_index(ordinal: int, shape: Shape, out_index: OutIndex) -> None:
    """Convert an `ordinal` to an index in the `shape`.

    Enumerating ``0 ... size - 1`` produces every index exactly once, last
    dimension fastest.

    Args:
    ----
        ordinal: ordinal position to convert.
        shape : tensor shape.
        out_index : return index corresponding to position.

    """
    cur_ord = ordinal + 0
    for i in range(len(shape) - 1, -1, -1):
        sh = shape[i]
        out_index[i] = int(cur_ord % sh)
        cur_ord = cur_ord // sh


def strides_from_shape(shape: UserShape) -> UserStrides:
    """Return a contiguous stride for a shape"""
    layout = [1]
    offset = 1
    for s in reversed(shape):
        layout.append(s * offset)
        offset = s * offset
    return tuple(reversed(layout[:-1]))


class TensorData:
    """Strided container of exact entries (polynomials or coefficients).

    Components such as ``g^{ab}``, ``Gamma^{ab}_c`` or ``C^{ab}_c`` are stored
    with index order ``(a, b[, c])``.
    """

    _storage: Storage
    _strides: Strides
    _shape: Shape
    strides: UserStrides
    shape: UserShape
    dims: int

    def __init__(
        self,
        storage: Union[Sequence[Any], Storage],
        shape: UserShape,
        strides: Optional[UserStrides] = None,
    ):
        if isinstance(storage, np.ndarray):
            self._storage = storage
        else:
            self._storage = np.empty(len(storage), dtype=object)
            for i, v in enumerate(storage):
                self._storage[i] = v

        shape = tuple(int(s) for s in shape)
        if strides is None:
            strides = strides_from_shape(shape)
        strides = tuple(int(s) for s in strides)
        if len(strides) != len(shape):
            raise IndexingError(f"Len of strides {strides} must match {shape}.")
        if len(shape) > MAX_DIMS:
            raise IndexingError(f"At most {MAX_DIMS} dimensions are supported, got {len(shape)}.")
        self._strides = array(strides, dtype=np.int32)
        self._shape = array(shape, dtype=np.int32)
        self.strides = strides
        self.dims = len(strides)
        self.size = int(prod(shape))
        self.shape = shape
        if len(self._storage) != self.size:
            raise IndexingError(f"Storage of {len(self._storage)} entries cannot hold shape {shape}.")

    @classmethod
    def build(cls, shape: UserShape, fn: Callable[..., Any]) -> TensorData:
        """Contiguous tensor whose entry at ``index`` is ``fn(*index)``."""
        out = cls([None] * int(prod(shape)), tuple(shape))
        for index in out.indices():
            out.set(index, fn(*index))
        return out

    @classmethod
    def from_nested(cls, rows: Sequence[Any], dims: int) -> TensorData:
        """Read a nested list such as ``[[g11, g12], [g21, g22]]``."""
        shape = []
        level: Any = rows
        for _ in range(dims):
            shape.append(len(level))
            level = level[0]

        def pick(*index: int) -> Any:
            value: Any = rows
            for d, i in enumerate(index):
                if len(value) != shape[d]:
                    raise IndexingError(f"Ragged nested data at depth {d}.")
                value = value[i]
            return value

        return cls.build(tuple(shape), pick)

    def index(self, index: Union[int, UserIndex]) -> int:
        """Converts the given index to a position in storage.

        Args:
        ----
            index: an int for 1-D data or a tuple of ints

        Returns:
        -------
            int: The position in storage

        Raises:
        ------
            IndexingError: on wrong arity, out-of-range or negative entries

        """
        if isinstance(index, (int, np.integer)):
            aindex: Index = array([index])
        else:
            aindex = array(index)

        if aindex.shape[0] != len(self.shape):
            raise IndexingError(f"Index {tuple(aindex)} must be size of {self.shape}.")
        for i, ind in enumerate(aindex):
            if ind >= self.shape[i]:
                raise IndexingError(f"Index {tuple(aindex)} out of range {self.shape}.")
            if ind < 0:
                raise IndexingError(f"Negative indexing for {tuple(aindex)} not supported.")

        return index_to_position(aindex, self._strides)

    def indices(self) -> Iterable[Tuple[int, ...]]:
        """Generate all the indices of the tensor.

        Returns
        -------
            Iterable[UserIndex] : All the indices of the tensor.

        """
        lshape: Shape = array(self.shape, dtype=np.int32)
        out_index: Index = array(self.shape, dtype=np.int32)
        for i in range(self.size):
            to_index(i, lshape, out_index)
            yield tuple(int(x) for x in out_index)

    def get(self, key: UserIndex) -> Any:
        return self._storage[self.index(key)]

    def set(self, key: UserIndex, val: Any) -> None:
        self._storage[self.index(key)] = val

    def __getitem__(self, key: Union[int, UserIndex]) -> Any:
        return self._storage[self.index(key)]

    def tuple(self) -> Tuple[Storage, Shape, Strides]:
        """Return core tensor data as a tuple."""
        return (self._storage, self._shape, self._strides)

    def permute(self, *order: int) -> TensorData:
        """Permute the dimensions of the tensor.

        Args:
        ----
            *order: a permutation of the dimensions

        Returns:
        -------
            New `TensorData` with the same storage and a new dimension order.

        """
        if sorted(order) != list(range(len(self.shape))):
            raise IndexingError(
                f"Must give a position to each dimension. Shape: {self.shape} Order:{order}"
            )

        return TensorData(
            self._storage,
            tuple([self.shape[o] for o in order]),
            tuple([self.strides[o] for o in order]),
        )

    def entries(self) -> Iterable[Tuple[Tuple[int, ...], Any]]:
        for index in self.indices():
            yield index, self.get(index)

    def to_nested(self) -> Any:
        """Inverse of `from_nested`."""

        def level(prefix: Tuple[int, ...]) -> Any:
            d = len(prefix)
            if d == self.dims:
                return self.get(prefix)
            return [level(prefix + (i,)) for i in range(self.shape[d])]

        return level(())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TensorData):
            return NotImplemented
        return self.shape == other.shape and all(
            self.get(index) == other.get(index) for index in self.indices()
        )

    def __hash__(self) -> int:
        return hash((tuple(self.shape), tuple(self.get(index) for index in self.indices())))

    def __repr__(self) -> str:
        return f"TensorData(shape={tuple(self.shape)}, entries={self.to_nested()!r})"

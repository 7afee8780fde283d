"""Higher-order operations over `TensorData` of exact entries.

`map` walks output ordinals, converts them to indices and reads the input
through its own strides, so permuted views work without copies.
"""

from __future__ import annotations

from typing import Any, Callable, List, Sequence

import numpy as np

from .tensor_data import (
    MAX_DIMS,
    IndexingError,
    Shape,
    Storage,
    Strides,
    TensorData,
    index_to_position,
    to_index,
)


def _empty(shape: Sequence[int]) -> TensorData:
    size = 1
    for s in shape:
        size *= s
    return TensorData(np.empty(size, dtype=object), tuple(shape))


class SimpleOps:
    @staticmethod
    def map(fn: Callable[[Any], Any]) -> Callable[[TensorData], TensorData]:
        """Higher-order tensor map function ::

          fn_map = map(fn)
          out = fn_map(a)

        Simple version::

            for i:
                for j:
                    out[i, j] = fn(a[i, j])

        Args:
        ----
            fn: function applied to every entry

        Returns:
        -------
            function from `TensorData` to a new contiguous `TensorData`

        """
        f = tensor_map(fn)

        def ret(a: TensorData) -> TensorData:
            out = _empty(a.shape)
            f(*out.tuple(), *a.tuple())
            return out

        return ret


def tensor_map(fn: Callable[[Any], Any]) -> Callable[..., None]:
    """Low-level strided map; output and input share a shape."""

    def _map(
        out: Storage,
        out_shape: Shape,
        out_strides: Strides,
        in_storage: Storage,
        in_shape: Shape,
        in_strides: Strides,
    ) -> None:
        index = np.zeros(MAX_DIMS, dtype=np.int32)[: len(out_shape)]
        for i in range(len(out)):
            to_index(i, out_shape, index)
            o = index_to_position(index, out_strides)
            j = index_to_position(index, in_strides)
            out[o] = fn(in_storage[j])

    return _map


def contract(
    a: TensorData, axis_a: int, b: TensorData, axis_b: int, zero: Any
) -> TensorData:
    """Sum over one paired index: ``out[..a.., ..b..] = sum_k a[..k..] b[..k..]``.

    The output keeps the free indices of `a` followed by those of `b`.
    """
    if a.shape[axis_a] != b.shape[axis_b]:
        raise IndexingError(f"Cannot contract axis {axis_a} of {a.shape} with axis {axis_b} of {b.shape}")
    free_a = [d for d in range(a.dims) if d != axis_a]
    free_b = [d for d in range(b.dims) if d != axis_b]
    shape = tuple(a.shape[d] for d in free_a) + tuple(b.shape[d] for d in free_b)

    def entry(*index: int) -> Any:
        ia = list(index[: len(free_a)])
        ib = list(index[len(free_a) :])
        acc = zero
        for k in range(a.shape[axis_a]):
            left = a.get(tuple(ia[:axis_a] + [k] + ia[axis_a:]))
            right = b.get(tuple(ib[:axis_b] + [k] + ib[axis_b:]))
            acc = acc + left * right
        return acc

    return TensorData.build(shape, entry)


# Point-value matrices. Entries are Fractions or coefficient elements; all
# helpers below only need ring operations plus `inverse` on pivots.


def is_unit(x: Any) -> bool:
    unit = getattr(x, "is_unit", None)
    return bool(unit()) if unit is not None else x != 0


def _inverse(x: Any) -> Any:
    inverse = getattr(x, "inverse", None)
    return inverse() if inverse is not None else 1 / x


def matmul(a: List[List[Any]], b: List[List[Any]]) -> List[List[Any]]:
    rows, inner, cols = len(a), len(b), len(b[0])
    out = []
    for i in range(rows):
        row = []
        for k in range(cols):
            acc = a[i][0] * b[0][k]
            for j in range(1, inner):
                acc = acc + a[i][j] * b[j][k]
            row.append(acc)
        out.append(row)
    return out


def matrix_inverse(m: List[List[Any]]) -> List[List[Any]]:
    """Exact Gauss-Jordan inverse, pivoting on invertible entries.

    Raises
    ------
        ZeroDivisionError: if some column has no invertible pivot

    """
    n = len(m)
    one = m[0][0] * 0 + 1
    zero = m[0][0] * 0
    work = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if is_unit(work[r][col])), None)
        if pivot is None:
            raise ZeroDivisionError(f"No invertible pivot in column {col + 1}.")
        work[col], work[pivot] = work[pivot], work[col]
        scale = _inverse(work[col][col])
        work[col] = [x * scale for x in work[col]]
        for r in range(n):
            if r != col:
                factor = work[r][col]
                if factor != 0:
                    work[r] = [x - factor * y for x, y in zip(work[r], work[col])]
    return [row[n:] for row in work]

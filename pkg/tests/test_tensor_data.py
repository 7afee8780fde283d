from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis.strategies import DataObject, data

import minifrob
from minifrob import IndexingError, SimpleOps, TensorData, contract, matrix_inverse, matmul

from .tensor_strategies import indices, square_tensors, tensor_data


@pytest.mark.algebra
def test_layout() -> None:
    "Test basic properties of layout and strides"
    data = [Fraction(0)] * 3 * 5
    tensor_data = minifrob.TensorData(data, (3, 5), (5, 1))
    assert tensor_data.shape == (3, 5)
    assert tensor_data.index((1, 0)) == 5
    assert tensor_data.index((1, 2)) == 7

    tensor_data = minifrob.TensorData(data, (5, 3), (1, 5))
    assert tensor_data.shape == (5, 3)
    assert tensor_data.index((1, 0)) == 1
    assert tensor_data.index((0, 1)) == 5

    data = [Fraction(0)] * 4 * 2 * 2
    tensor_data = minifrob.TensorData(data, (4, 2, 2))
    assert tensor_data.strides == (4, 2, 1)


@pytest.mark.algebra
def test_layout_bad() -> None:
    "Test bad layout"
    with pytest.raises(IndexingError):
        data = [Fraction(0)] * 3 * 5
        minifrob.TensorData(data, (3, 5), (6,))
    with pytest.raises(IndexingError):
        minifrob.TensorData([Fraction(0)] * 4, (3, 2))


@pytest.mark.algebra
@given(tensor_data())
def test_enumeration(tensor_data: TensorData) -> None:
    "Test enumeration of tensor_datas."
    indices = list(tensor_data.indices())

    # Check that enough positions are enumerated.
    assert len(indices) == tensor_data.size

    # Check that enough positions are enumerated only once.
    assert len(set(tensor_data.indices())) == len(indices)

    # Check that all indices are within the shape.
    for ind in tensor_data.indices():
        for i, p in enumerate(ind):
            assert p >= 0 and p < tensor_data.shape[i]


@pytest.mark.algebra
@given(tensor_data())
def test_index(tensor_data: TensorData) -> None:
    "Test enumeration of tensor_data."
    # Check that all indices are within the size.
    for ind in tensor_data.indices():
        pos = tensor_data.index(ind)
        assert pos >= 0 and pos < tensor_data.size

    base = [0] * tensor_data.dims
    with pytest.raises(IndexingError):
        base[0] = -1
        tensor_data.index(tuple(base))

    if tensor_data.dims > 1:
        with pytest.raises(IndexingError):
            base = [0] * (tensor_data.dims - 1)
            tensor_data.index(tuple(base))


@pytest.mark.algebra
@given(data())
def test_permute(data: DataObject) -> None:
    td = data.draw(tensor_data())
    ind = data.draw(indices(td))
    td_rev = td.permute(*list(reversed(range(td.dims))))
    assert td.get(ind) == td_rev.get(tuple(reversed(ind)))

    td2 = td_rev.permute(*list(reversed(range(td_rev.dims))))
    assert td.get(ind) == td2.get(ind)
    assert td == td2


@pytest.mark.algebra
def test_nested_round_trip() -> None:
    rows = [[Fraction(1), Fraction(2)], [Fraction(3), Fraction(4)]]
    td = TensorData.from_nested(rows, 2)
    assert td.to_nested() == rows
    assert td.get((1, 0)) == 3
    with pytest.raises(IndexingError):
        TensorData.from_nested([[1, 2], [3]], 2)


@pytest.mark.algebra
@given(tensor_data())
def test_map_reads_permuted_views(td: TensorData) -> None:
    doubled = SimpleOps.map(lambda x: 2 * x)(td)
    for ind in td.indices():
        assert doubled.get(ind) == 2 * td.get(ind)
    order = list(reversed(range(td.dims)))
    flipped = SimpleOps.map(lambda x: x + 1)(td.permute(*order))
    assert tuple(flipped.shape) == tuple(reversed(td.shape))
    for ind in td.indices():
        assert flipped.get(tuple(reversed(ind))) == td.get(ind) + 1


@pytest.mark.algebra
@given(data())
def test_contract_is_matmul(data: DataObject) -> None:
    a = data.draw(square_tensors(2))
    n = a.shape[0]
    rows = a.to_nested()
    out = contract(a, 1, a, 0, Fraction(0))
    assert out.to_nested() == matmul(rows, rows)
    assert out.shape == (n, n)


@pytest.mark.algebra
def test_matrix_inverse() -> None:
    m = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(1)]]
    inv = matrix_inverse(m)
    assert matmul(m, inv) == [[1, 0], [0, 1]]
    with pytest.raises(ZeroDivisionError):
        matrix_inverse([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]])

import json
from fractions import Fraction

import pytest

from minifrob import (
    CoeffKind,
    DegreeVector,
    GradedPoly,
    RingConfig,
    SchemaError,
    SeriesCoeff,
    decode_poly,
    encode_poly,
    parse_instance_text,
    parse_series_request,
)

R2 = RingConfig(2)
ELLIPTIC = DegreeVector.elliptic([1, Fraction(1, 2), 0])
SERIES = RingConfig.for_degrees(ELLIPTIC, CoeffKind.SERIES, 3)


@pytest.mark.codec
def test_encode_term_shape() -> None:
    t1, t2 = GradedPoly.variable(R2, 0), GradedPoly.variable(R2, 1)
    assert encode_poly(t1 * Fraction(1, 2)) == [{"coeff": "1/2", "exp": [1, 0]}]
    p = t1 * t1 * t2 * Fraction(1, 2) + t2**4 * Fraction(27, 8) - 3
    assert encode_poly(p) == [
        {"coeff": "-3", "exp": [0, 0]},
        {"coeff": "27/8", "exp": [0, 4]},
        {"coeff": "1/2", "exp": [2, 1]},
    ]
    assert json.dumps(encode_poly(t2), sort_keys=True) == '[{"coeff": "1", "exp": [0, 1]}]'
    assert encode_poly(GradedPoly.zero(R2)) == []


@pytest.mark.codec
def test_encode_series_terms() -> None:
    t2 = GradedPoly.variable(SERIES, 1)
    t1 = GradedPoly.variable(SERIES, 0)
    p = t2 * t2 * SeriesCoeff.from_list([Fraction(-1, 8), 12, 144]) + t1
    assert encode_poly(p) == [
        {"coeff": ["-1/8", "12", "144"], "exp": [0, 2, 0]},
        {"coeff": ["1", "0", "0"], "exp": [1, 0, 0]},
    ]
    assert decode_poly(encode_poly(p), SERIES) == p


@pytest.mark.codec
def test_decode_accepts_any_order() -> None:
    data = [{"exp": [2, 1], "coeff": "1/2"}, {"coeff": 3, "exp": [0, 0]}]
    p = decode_poly(data, R2)
    assert encode_poly(p) == [{"coeff": "3", "exp": [0, 0]}, {"coeff": "1/2", "exp": [2, 1]}]
    constant = decode_poly([{"coeff": "5", "exp": [0, 0, 0]}], SERIES)
    assert constant == GradedPoly.constant(SERIES, 5)


@pytest.mark.codec
@pytest.mark.parametrize(
    "data, path",
    [
        ({"coeff": "1", "exp": [1, 0]}, "g"),
        ([[[1, 0], "1"]], "g[0]"),
        ([{"coeff": "1", "exp": [1, 0], "extra": 1}], "g[0]"),
        ([{"coeff": "1", "exp": [1]}], "g[0].exp"),
        ([{"coeff": "1", "exp": [1, -1]}], "g[0].exp"),
        ([{"coeff": "1", "exp": [1, 0]}, {"coeff": "2", "exp": [1, 0]}], "g[1].exp"),
        ([{"coeff": 0.5, "exp": [1, 0]}], "g[0].coeff"),
        ([{"coeff": ["1", "2"], "exp": [1, 0]}], "g[0].coeff"),
    ],
)
def test_decode_errors_name_the_field(data: object, path: str) -> None:
    with pytest.raises(SchemaError) as info:
        decode_poly(data, R2, "g")
    assert info.value.path == path


@pytest.mark.codec
def test_instance_encode_uses_term_objects() -> None:
    text = json.dumps(
        {
            "mode": "generic",
            "degrees": ["1"],
            "charge": "2",
            "eta": [["1"]],
            "metric": [[[{"coeff": "1", "exp": [1]}]]],
        }
    )
    spec = parse_instance_text(text)
    assert spec.encode()["metric"] == [[[{"coeff": "1", "exp": [1]}]]]
    assert spec.options.points == 20


@pytest.mark.codec
def test_series_request_layers() -> None:
    request = parse_series_request(
        {
            "degrees": ["1", "1/2", "0"],
            "eta": [["0", "0", "1"], ["0", "1", "0"], ["1", "0", "0"]],
            "truncation": 4,
            "seed_layers": {"0": [{"coeff": "-1/96", "exp": [0, 4, 0]}]},
        }
    )
    assert request.seed_layers == {0: {(0, 4, 0): Fraction(-1, 96)}}
    with pytest.raises(SchemaError) as info:
        parse_series_request(
            {
                "degrees": ["1", "1/2", "0"],
                "eta": [["0", "0", "1"], ["0", "1", "0"], ["1", "0", "0"]],
                "truncation": 4,
                "seed_layers": {"0": [[[0, 4, 0], "-1/96"]]},
            }
        )
    assert info.value.path == "seed_layers.0[0]"

import pytest
from hypothesis import given, strategies as st

from hypersem.errors import MissingVariable, UnknownVariable, ValueOutOfRange
from hypersem.space import StateSpace


def test_single_var_identity_encoding(x8):
    assert x8.encode({"x": 2}) == 2
    assert x8.decode(2) == {"x": 2}


def test_mixed_radix_declaration_order(bits):
    assert bits.encode({"hi": 1, "lo": 0}) == 2
    assert bits.encode({"hi": 0, "lo": 1}) == 1


def test_encode_out_of_range(x8):
    with pytest.raises(ValueOutOfRange):
        x8.encode({"x": 9})


def test_encode_unknown_and_missing(bits):
    with pytest.raises(UnknownVariable):
        bits.encode({"hi": 0, "lo": 0, "zz": 1})
    with pytest.raises(MissingVariable):
        bits.encode({"hi": 0})


@pytest.mark.parametrize("decls", [
    (("x", 0, 7),),
    (("hi", 0, 1), ("lo", 0, 1)),
    (("a", 0, 3), ("b", 0, 3), ("c", 0, 3)),
    (("p", -2, 1), ("q", 5, 7)),
])
def test_roundtrip_exhaustive(decls):
    space = StateSpace(decls)
    for s in space.states():
        assert space.encode(space.decode(s)) == s
    assert len({tuple(sorted(space.decode(s).items())) for s in space.states()}) \
        == space.size


@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(0, 2)),
                min_size=1, max_size=3))
def test_roundtrip_random_spaces(ranges):
    decls = tuple((f"v{i}", lo, lo + w) for i, (lo, w) in enumerate(ranges))
    space = StateSpace(decls)
    for s in space.states():
        assert space.encode(space.decode(s)) == s


def test_size_cap():
    with pytest.raises(ValueError):
        StateSpace((("x", 0, 64),))
    StateSpace((("x", 0, 63),))  # exactly the cap is fine


def test_bad_declarations():
    with pytest.raises(ValueError):
        StateSpace((("x", 0, 1), ("x", 0, 1)))
    with pytest.raises(ValueError):
        StateSpace((("x", 3, 2),))


def test_decode_out_of_range(x8):
    with pytest.raises(ValueOutOfRange):
        x8.decode(8)

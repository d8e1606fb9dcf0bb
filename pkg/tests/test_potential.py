import json
import math
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwimpedance.errors import ProfileSemanticError, ProfileSyntaxError
from qwimpedance.potential import (
    NATURAL,
    DeltaBarrier,
    Segment,
    UnitSystem,
    build_profile,
    characteristic_impedance,
    parse_profile,
    profile_to_dict,
    serialize_profile,
    wavenumber,
)

from conftest import DATA

energy = st.floats(-50, 50, allow_nan=False)
positive = st.floats(0.05, 20, allow_nan=False)


def test_wavenumber_examples():
    assert wavenumber(2, 0) == 2.0
    assert wavenumber(0, 2) == 2.0j
    assert wavenumber(1, 0, UnitSystem(hbar=2, mass=2)) == pytest.approx(1.0, abs=1e-15)


def test_characteristic_impedance_examples():
    assert characteristic_impedance(2, 0) == 2.0
    assert characteristic_impedance(0, 2) == 2.0j
    assert characteristic_impedance(3, 3) == 0


def test_impedance_is_scaled_wavenumber(rng):
    for _ in range(100):
        E, U = rng.uniform(-10, 10, 2)
        u = UnitSystem(hbar=float(rng.uniform(0.2, 3)), mass=float(rng.uniform(0.2, 3)))
        z = characteristic_impedance(E, U, u)
        assert abs(z * u.mass / u.hbar - wavenumber(E, U, u)) < 1e-14 * max(1, abs(z))


@given(energy, energy)
def test_branch(E, U):
    k = wavenumber(E, U)
    assert k.imag >= 0 and k.real >= 0
    assert k.real == 0 or k.imag == 0


@given(energy, energy, st.floats(0.01, 100), positive, positive)
def test_scaling(E, U, s, hbar, mass):
    a = wavenumber(E, U, UnitSystem(hbar, mass))
    b = wavenumber(s * E, s * U, UnitSystem(hbar * math.sqrt(s), mass))
    assert abs(a - b) <= 1e-12 * max(abs(a), 1e-300)


def test_unit_system_rejects_non_positive():
    with pytest.raises(ValueError):
        UnitSystem(hbar=0)
    with pytest.raises(ValueError):
        UnitSystem(mass=-1)


def _doc(elements, left=0.0, right=0.0):
    return json.dumps({"left_lead": {"U": left}, "elements": elements, "right_lead": {"U": right}})


def test_parse_single_segment():
    p = parse_profile(_doc([{"segment": {"length": 1, "U": 5}}]))
    assert p.segments == [Segment(1.0, 5.0)]
    assert p.units == NATURAL


def test_parse_merges_coincident_deltas_with_warning():
    text = _doc([{"delta": {"alpha": 1}}, {"delta": {"alpha": 2}}])
    with pytest.warns(UserWarning, match="merging"):
        p = parse_profile(text)
    assert p.deltas == [DeltaBarrier(3.0, 0)]


def test_parse_rejects_negative_length():
    with pytest.raises(ProfileSemanticError):
        parse_profile(_doc([{"segment": {"length": -1, "U": 0}}]))


def test_syntax_error_position():
    with pytest.raises(ProfileSyntaxError) as info:
        parse_profile('{\n  "left_lead": {"U": 0},\n  oops\n}')
    assert info.value.line == 3
    assert info.value.column == 3


@pytest.mark.parametrize("doc", [{"left_lead": {"U": 0}}, {"left_lead": {"U": "a"}, "right_lead": {"U": 0}}, [1]])
def test_semantic_errors(doc):
    with pytest.raises(ProfileSemanticError):
        parse_profile(json.dumps(doc))


def test_equal_potential_segments_are_not_merged():
    p = parse_profile(_doc([{"segment": {"length": 1, "U": 2}}, {"segment": {"length": 1, "U": 2}}]))
    assert len(p.segments) == 2


def test_zero_delta_dropped():
    p = build_profile(0, [("segment", 1, 0), ("delta", 0.0)], 0)
    assert p.deltas == []


def test_profile_geometry():
    p = build_profile(1, [("delta", -1), ("segment", 1.5, 0), ("delta", 2), ("segment", 0.5, 3)], 2)
    assert p.total_length == pytest.approx(2.0)
    assert p.boundaries() == pytest.approx([0.0, 1.5, 2.0])
    assert p.potentials() == [1.0, 0.0, 3.0, 2.0]
    assert [d.position_index for d in p.deltas] == [0, 1]
    assert not p.symmetric_leads


elements = st.lists(
    st.one_of(
        st.tuples(st.just("segment"), st.floats(0.01, 10), st.floats(-10, 10)),
        st.tuples(st.just("delta"), st.floats(-5, 5).filter(lambda a: a != 0)),
    ),
    max_size=8,
)


@settings(max_examples=60)
@given(elements, st.floats(-5, 5), st.floats(-5, 5), positive, positive)
def test_roundtrip(items, left, right, hbar, mass):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        p = build_profile(left, items, right, UnitSystem(hbar, mass))
    q = parse_profile(serialize_profile(p))
    assert q == p
    assert parse_profile(serialize_profile(q)) == p
    assert profile_to_dict(q) == profile_to_dict(p)


@pytest.mark.parametrize("path", sorted(DATA.glob("*.json")))
def test_shipped_profiles_parse(path):
    doc = json.loads(path.read_text())
    if "left_lead" in doc:
        parse_profile(path.read_text())

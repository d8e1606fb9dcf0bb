import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qwimpedance.errors import BoundStatePoleError, NodeSingularityError
from qwimpedance.impedance import (
    apply_impedance_matrix,
    apply_transfer,
    delta_jump,
    gamma,
    impedance_from_amplitudes,
    impedance_from_reflection,
    profile_input_impedance,
    profile_reflection,
    propagate_uniform,
    reflection_from_impedance,
)
from qwimpedance.matrices import (
    ImpedanceMatrix,
    TransferMatrix,
    compose,
    delta_matrix,
    profile_transfer,
    propagation_matrix,
    rect_barrier_transfer,
    rt_from_transfer,
    transfer_to_impedance_matrix,
)
from qwimpedance.potential import UnitSystem, build_profile, characteristic_impedance

from conftest import propagating_energies, random_profile

cplx = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)


def test_amplitude_examples():
    z, k = 1.7, 1.7
    for x in (0.0, 0.4, 2.0):
        assert abs(impedance_from_amplitudes(1.0, 0.0, k, x, z) - z) < 1e-15
        assert abs(impedance_from_amplitudes(0.0, 1.0, k, x, z) + z) < 1e-15
    assert impedance_from_amplitudes(1.0, 1.0, k, 0.0, z) == 0
    with pytest.raises(NodeSingularityError):
        impedance_from_amplitudes(1.0, -1.0, k, 0.0, z)


def test_impedance_is_log_derivative():
    # hbar psi' / (i m psi) against a finite difference
    units = UnitSystem(1.2, 0.8)
    k = 1.3
    z = units.hbar * k / units.mass
    Ap, Am, x, h = 0.7 + 0.1j, -0.2 + 0.5j, 0.37, 1e-6
    psi = lambda y: Ap * cmath.exp(1j * k * y) + Am * cmath.exp(-1j * k * y)
    dpsi = (psi(x + h) - psi(x - h)) / (2 * h)
    Z = units.hbar * dpsi / (1j * units.mass * psi(x))
    assert abs(impedance_from_amplitudes(Ap, Am, k, x, z) - Z) < 1e-8


def test_propagate_fixed_point_and_zero_length():
    for z in (1.0, 2.5, 0.8j):
        g = gamma(z)
        for d in (0.1, 1.0, 7.0):
            assert abs(propagate_uniform(z, z, g, d) - z) < 1e-12 * abs(z)
    assert propagate_uniform(0.3 + 0.2j, 1.0, 1j, 0.0) == 0.3 + 0.2j


@given(cplx, st.floats(0.1, 4), st.floats(0.05, 3), st.booleans())
def test_propagate_semigroup(Z, zmag, d, evanescent):
    z0 = 1j * zmag if evanescent else zmag
    g = gamma(z0)
    try:
        half = propagate_uniform(propagate_uniform(Z, z0, g, d / 2), z0, g, d / 2)
        full = propagate_uniform(Z, z0, g, d)
    except NodeSingularityError:
        return
    if abs(full) < 1e6 and abs(half) < 1e6:
        assert abs(half - full) < 1e-10 * max(1, abs(full)) ** 2


def test_propagate_matches_amplitudes(rng):
    # carrying Z leftwards equals evaluating amplitudes at the new point
    for _ in range(50):
        k = float(rng.uniform(0.2, 3))
        Ap, Am = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
        x, d = float(rng.uniform(-1, 1)), float(rng.uniform(0.05, 2))
        far = impedance_from_amplitudes(Ap, Am, k, x, k)
        near = impedance_from_amplitudes(Ap, Am, k, x - d, k)
        assert abs(propagate_uniform(far, k, gamma(k), d) - near) < 1e-10 * max(1, abs(near))


def test_propagate_node_raises():
    # Z_far = 0 at quarter wavelength maps to a pole
    k = 1.0
    with pytest.raises(NodeSingularityError):
        propagate_uniform(0.0, k, gamma(k), math.pi / 2 / k * 1.0 + 0.0 * 1j)


def test_delta_jump():
    assert delta_jump(0.4 - 1j, 0.0) == 0.4 - 1j
    assert delta_jump(1.0, 1.0) == 1 + 2j
    assert delta_jump(1.0, 1.0, UnitSystem(hbar=2.0)) == 1 + 1j


def test_dirac_cell_cross_formalism():
    alpha, l = 0.9, 0.8
    for E in (0.4, 1.7, 3.3):
        z0 = math.sqrt(2 * E)
        Zm = transfer_to_impedance_matrix(compose(delta_matrix(alpha, z0), propagation_matrix(z0, l)))
        for Z_b in (z0, 0.3 + 0.4j, -1.2j):
            direct = delta_jump(propagate_uniform(Z_b, z0, gamma(z0), l), alpha)
            assert abs(apply_impedance_matrix(Zm, z0, z0, Z_b) - direct) < 1e-12 * max(1, abs(direct))


def test_apply_identity_like_cell():
    Zm = ImpedanceMatrix([[0, -1], [1, 0]], 1, 1)
    for Z_b in (0.3, 1 + 1j, -2j):
        assert apply_impedance_matrix(Zm, 2.0, 2.0, Z_b) == Z_b
        assert abs(apply_impedance_matrix(Zm, 1.0, 2.0, Z_b) - Z_b / 2) < 1e-15


def test_long_form_equals_short_form(rng):
    for _ in range(100):
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        T = TransferMatrix(m, 1, 1)
        z1, z2, Z_b = (complex(*rng.normal(size=2)) for _ in range(3))
        a = apply_transfer(T, z1, z2, Z_b)
        b = apply_impedance_matrix(transfer_to_impedance_matrix(T), z1, z2, Z_b)
        assert abs(a - b) < 1e-13 * max(1, abs(a))


def test_reflection_examples():
    assert reflection_from_impedance(1.3, 1.3) == 0
    assert reflection_from_impedance(0.0, 1.3) == 1
    with pytest.raises(BoundStatePoleError):
        reflection_from_impedance(-1.3, 1.3)
    assert abs(impedance_from_reflection(reflection_from_impedance(0.2 + 0.7j, 1.1), 1.1) - (0.2 + 0.7j)) < 1e-15
    with pytest.raises(NodeSingularityError):
        impedance_from_reflection(-1, 1.0)


def test_barrier_reflection_both_routes():
    U_b, L = 4.0, 0.9
    p = build_profile(0, [("segment", L, U_b)], 0)
    for E in np.linspace(0.1, 3.9, 40):
        rho = profile_reflection(p, E)
        r = rt_from_transfer(rect_barrier_transfer(E, U_b, L))[1]
        assert abs(abs(rho) - abs(r)) < 1e-10
        assert abs(rho - r) < 1e-10


def test_input_impedance_cross_formalism(rng):
    for _ in range(30):
        p = random_profile(rng)
        for E in propagating_energies(p, 5, rng):
            T = profile_transfer(p, E)
            zL = characteristic_impedance(E, p.left_lead.potential)
            zR = characteristic_impedance(E, p.right_lead.potential)
            via_matrix = apply_impedance_matrix(transfer_to_impedance_matrix(T), zL, zR, zR)
            iterated = profile_input_impedance(p, E)
            assert abs(via_matrix - iterated) < 1e-10 * max(1, abs(iterated))
            assert abs(reflection_from_impedance(iterated, zL) - rt_from_transfer(T)[1]) < 1e-10


def test_matched_load_default():
    p = build_profile(0, [("segment", 1.0, 2.0)], 0)
    E = 3.0
    assert profile_input_impedance(p, E) == profile_input_impedance(p, E, characteristic_impedance(E, 0))

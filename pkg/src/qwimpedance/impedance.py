"""Quantum wave impedance Z(x) and its right-to-left propagation.

Z(x) = hbar psi'(x) / (i m psi(x)). It is continuous across potential steps,
jumps by ``2 i alpha / hbar`` across a delta barrier (left value minus right
value), and inside a uniform region obeys a fractional-linear (Moebius) map.
The load sits on the right: iteration starts from the right lead, where a pure
outgoing wave gives Z = z_right, and walks leftwards.
"""

from __future__ import annotations

import cmath
import sys

from .errors import BoundStatePoleError, NodeSingularityError
from .matrices import ImpedanceMatrix, TransferMatrix
from .potential import NATURAL, Segment, UnitSystem, characteristic_impedance

Impedance = complex


def gamma(z: complex, units: UnitSystem = NATURAL) -> complex:
    """Propagation constant ``i m z / hbar`` (equals ``i k``)."""
    return 1j * units.mass * z / units.hbar


def impedance_from_amplitudes(A_plus: complex, A_minus: complex, k: complex, x: float, z: complex) -> Impedance:
    fwd = A_plus * cmath.exp(1j * k * x)
    bwd = A_minus * cmath.exp(-1j * k * x)
    den = fwd + bwd
    if den == 0:
        raise NodeSingularityError(f"wavefunction node at x = {x}: impedance diverges")
    return z * (fwd - bwd) / den


def propagate_uniform(Z_far: Impedance, z0: complex, gamma0: complex, d: float) -> Impedance:
    """Carry an impedance a distance ``d`` leftwards through a uniform region.

    ``Z_near = z0 (Z_far ch(g d) - z0 sh(g d)) / (z0 ch(g d) - Z_far sh(g d))``
    """
    if d == 0:
        return complex(Z_far)
    arg = gamma0 * d
    if abs(arg.real) > 1.0:
        # evanescent: divide through by ch to keep magnitudes bounded
        th = cmath.tanh(arg)
        num = Z_far - z0 * th
        a, b = z0, Z_far * th
        scale = 1 + abs(th)
    else:
        ch, sh = cmath.cosh(arg), cmath.sinh(arg)
        num = Z_far * ch - z0 * sh
        a, b = z0 * ch, Z_far * sh
        scale = abs(ch) + abs(sh)
    den = a - b
    # a denominator at rounding level of its inputs is a node
    if abs(den) <= 4 * sys.float_info.epsilon * scale * (abs(z0) + abs(Z_far)):
        raise NodeSingularityError("impedance pole: wavefunction node at the evaluation point")
    out = z0 * num / den
    if not cmath.isfinite(out):
        raise NodeSingularityError("impedance pole: wavefunction node at the evaluation point")
    return out


def delta_jump(Z_right_side: Impedance, alpha: float, units: UnitSystem = NATURAL) -> Impedance:
    """Impedance just left of a delta barrier of strength ``alpha``."""
    return Z_right_side + 2j * alpha / units.hbar


def apply_impedance_matrix(Zm: ImpedanceMatrix, z1: complex, z2: complex, Z_b: Impedance) -> Impedance:
    """``Z(a) = z1 (z2 Z11 - Z(b) Z12) / (z2 Z21 - Z(b) Z22)``."""
    den = z2 * Zm.m21 - Z_b * Zm.m22
    if den == 0:
        raise NodeSingularityError("impedance pole in the fractional-linear map")
    return z1 * (z2 * Zm.m11 - Z_b * Zm.m12) / den


def apply_transfer(T: TransferMatrix, z1: complex, z2: complex, Z_b: Impedance) -> Impedance:
    """Same map written directly in transfer-matrix entries."""
    T11, T12, T21, T22 = T.m11, T.m12, T.m21, T.m22
    num = z2 * (T11 - T21 + T12 - T22) + Z_b * (T11 - T21 - T12 + T22)
    den = z2 * (T11 + T21 + T12 + T22) + Z_b * (T11 + T21 - T12 - T22)
    if den == 0:
        raise NodeSingularityError("impedance pole in the fractional-linear map")
    return z1 * num / den


def reflection_from_impedance(Z: Impedance, z_lead: complex) -> complex:
    """Reflection amplitude ``(z_lead - Z) / (z_lead + Z)`` seen from a lead."""
    den = z_lead + Z
    if den == 0:
        raise BoundStatePoleError("Z = -z_lead: reflection has a pole (bound-state condition)")
    return (z_lead - Z) / den


def impedance_from_reflection(rho: complex, z_lead: complex) -> Impedance:
    if rho == -1:
        raise NodeSingularityError("rho = -1 corresponds to an infinite impedance")
    return z_lead * (1 - rho) / (1 + rho)


def profile_input_impedance(profile, E: float, Z_load: Impedance | None = None) -> Impedance:
    """Impedance at the left-lead boundary, iterating from the right lead.

    ``Z_load`` defaults to the right-lead characteristic impedance (no wave
    incoming from the right).
    """
    units = profile.units
    Z = characteristic_impedance(E, profile.right_lead.potential, units) if Z_load is None else Z_load
    for el in reversed(profile.elements):
        if isinstance(el, Segment):
            z = characteristic_impedance(E, el.potential, units)
            Z = propagate_uniform(Z, z, gamma(z, units), el.length)
        else:
            Z = delta_jump(Z, el.strength, units)
    return Z


def profile_reflection(profile, E: float) -> complex:
    """Reflection amplitude of ``profile`` via the impedance route."""
    z_left = characteristic_impedance(E, profile.left_lead.potential, profile.units)
    return reflection_from_impedance(profile_input_impedance(profile, E), z_left)

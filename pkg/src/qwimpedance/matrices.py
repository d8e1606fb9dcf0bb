"""2x2 transfer, scattering and impedance matrices and the maps between them.

Amplitude convention: a transfer matrix acts on the local wave components
``(A+ exp(ikx), A- exp(-ikx))`` evaluated at the region endpoints,

    v(a) = T_ab v(b),

so a uniform region of length d is ``diag(exp(-ikd), exp(ikd))``. Every matrix
carries the characteristic impedances of the regions it connects.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import (
    ImpedanceMismatchError,
    ResonanceSingularityError,
    SingularInputError,
    ZeroTransmissionError,
)
from .potential import NATURAL, Segment, UnitSystem, characteristic_impedance, wavenumber

ALGEBRA_TOL = 1e-13
PHYSICS_TOL = 1e-10


# Entries are stored in extended precision where the platform has it. Long
# cascades through evanescent regions reach |T| ~ 1e3 and more, and a
# float64 product would lose det T = 1 to cancellation at that size.
STORAGE_DTYPE = np.clongdouble


def _frozen(m) -> np.ndarray:
    arr = np.array(m, dtype=STORAGE_DTYPE).reshape(2, 2)
    arr.flags.writeable = False
    return arr


def same_impedance(z1: complex, z2: complex, rtol: float = 1e-12) -> bool:
    return z1 == z2 or abs(z1 - z2) <= rtol * max(abs(z1), abs(z2))


@dataclass(frozen=True, eq=False)
class _Matrix2:
    m: np.ndarray
    z_left: complex = 1.0
    z_right: complex = 1.0

    def __post_init__(self):
        m = _frozen(self.m)
        if not np.all(np.isfinite(m)):
            raise ValueError(f"matrix entries must be finite: {m!r}")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "z_left", complex(self.z_left))
        object.__setattr__(self, "z_right", complex(self.z_right))

    @property
    def m11(self) -> complex:
        return complex(self.m[0, 0])

    @property
    def m12(self) -> complex:
        return complex(self.m[0, 1])

    @property
    def m21(self) -> complex:
        return complex(self.m[1, 0])

    @property
    def m22(self) -> complex:
        return complex(self.m[1, 1])

    @property
    def det(self) -> complex:
        m = self.m
        return complex(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])

    def allclose(self, other, atol: float = ALGEBRA_TOL) -> bool:
        return bool(np.max(np.abs(self.m - other.m)) <= atol)


class TransferMatrix(_Matrix2):
    @property
    def half_trace(self) -> complex:
        return complex(0.5 * (self.m[0, 0] + self.m[1, 1]))

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return compose(self, other)


class ScatteringMatrix(_Matrix2):
    """Entries ``[[t_ab, r_ba], [r_ab, t_ba]]``."""


class ImpedanceMatrix(_Matrix2):
    pass


def identity(z: complex = 1.0) -> TransferMatrix:
    return TransferMatrix(np.eye(2), z, z)


def compose(a: TransferMatrix, b: TransferMatrix, *more: TransferMatrix) -> TransferMatrix:
    """Cascade ``a`` then ``b`` (left to right along x): ``a.m @ b.m``."""
    if not same_impedance(a.z_right, b.z_left):
        raise ImpedanceMismatchError(
            f"cannot compose: right impedance {a.z_right} != left impedance {b.z_left}"
        )
    out = TransferMatrix(a.m @ b.m, a.z_left, b.z_right)
    for c in more:
        out = compose(out, c)
    return out


def interface_matrix(z1: complex, z2: complex) -> TransferMatrix:
    """Step from a region of impedance ``z1`` into one of ``z2``.

    Follows from continuity of psi and psi'; det = z2/z1 and
    ``I(z1, z2) @ I(z2, z3) == I(z1, z3)``.
    """
    if z1 == 0:
        raise SingularInputError("interface matrix undefined for z1 = 0 (E equals the region potential)")
    if z1 == z2:
        return identity(z1)
    q = STORAGE_DTYPE(z2) / STORAGE_DTYPE(z1)
    return TransferMatrix(0.5 * np.array([[1 + q, 1 - q], [1 - q, 1 + q]]), z1, z2)


def propagation_matrix(k: complex, d: float, z: complex | None = None) -> TransferMatrix:
    """Uniform region of wavenumber ``k`` and length ``d``.

    ``z`` tags the region impedance; it defaults to ``k`` (natural units).
    """
    if d < 0:
        raise ValueError(f"propagation length must be non-negative, got {d}")
    z = k if z is None else z
    phase = 1j * k * d
    return TransferMatrix(np.diag([cmath.exp(-phase), cmath.exp(phase)]), z, z)


def delta_matrix(alpha: float, k: complex, units: UnitSystem = NATURAL) -> TransferMatrix:
    """Delta barrier ``alpha * delta(x)`` inside a region of wavenumber ``k``.

    psi is continuous and psi' jumps by ``2 m alpha psi / hbar^2``; with
    ``Omega = m alpha / (hbar^2 k)`` the matrix is
    ``[[1 + i Omega, i Omega], [-i Omega, 1 - i Omega]]``.
    """
    z = units.hbar * k / units.mass
    if alpha == 0:
        return identity(z)
    if k == 0:
        raise SingularInputError("delta matrix undefined for k = 0")
    om = units.mass * alpha / (units.hbar**2 * k)
    return TransferMatrix([[1 + 1j * om, 1j * om], [-1j * om, 1 - 1j * om]], z, z)


def rt_from_transfer(T: TransferMatrix) -> tuple[complex, complex]:
    """Transmission and reflection amplitudes ``t = 1/T11``, ``r = T21/T11``."""
    if T.m11 == 0:
        raise ResonanceSingularityError("T11 = 0: bound-state condition, no scattering state")
    return 1.0 / T.m11, T.m21 / T.m11


def transfer_to_scattering(T: TransferMatrix) -> ScatteringMatrix:
    T11, T12, T21, T22 = T.m11, T.m12, T.m21, T.m22
    if T11 == 0:
        raise ResonanceSingularityError("T11 = 0: bound-state condition, no scattering state")
    S = [[1 / T11, -T12 / T11], [T21 / T11, T22 - T12 * T21 / T11]]
    return ScatteringMatrix(S, T.z_left, T.z_right)


def scattering_to_transfer(S: ScatteringMatrix) -> TransferMatrix:
    S11, S12, S21, S22 = S.m11, S.m12, S.m21, S.m22
    if S11 == 0:
        raise ZeroTransmissionError("S11 = 0: zero transmission, transfer matrix undefined")
    T = [[1 / S11, -S12 / S11], [S21 / S11, S22 - S12 * S21 / S11]]
    return TransferMatrix(T, S.z_left, S.z_right)


def transfer_to_impedance_matrix(T: TransferMatrix) -> ImpedanceMatrix:
    T11, T12, T21, T22 = T.m11, T.m12, T.m21, T.m22
    Z = 0.5 * np.array(
        [
            [T11 - T21 + T12 - T22, -T11 + T21 + T12 - T22],
            [T11 + T21 + T12 + T22, -T11 - T21 + T12 + T22],
        ]
    )
    return ImpedanceMatrix(Z, T.z_left, T.z_right)


def impedance_matrix_to_transfer(Z: ImpedanceMatrix) -> TransferMatrix:
    Z11, Z12, Z21, Z22 = Z.m11, Z.m12, Z.m21, Z.m22
    T = 0.5 * np.array(
        [
            [Z11 - Z12 + Z21 - Z22, Z11 + Z12 + Z21 + Z22],
            [-Z11 + Z12 + Z21 - Z22, -Z11 - Z12 + Z21 + Z22],
        ]
    )
    return TransferMatrix(T, Z.z_left, Z.z_right)


def impedance_to_scattering(Z: ImpedanceMatrix) -> ScatteringMatrix:
    """Scattering matrix straight from impedance-matrix entries.

    Equivalent to ``transfer_to_scattering(impedance_matrix_to_transfer(Z))``
    for unimodular matrices, where S22 == S11.
    """
    Z11, Z12, Z21, Z22 = Z.m11, Z.m12, Z.m21, Z.m22
    den = Z11 - Z12 + Z21 - Z22
    if den == 0:
        raise ResonanceSingularityError("T11 = 0: bound-state condition, no scattering state")
    s11 = 2 / den
    S = [[s11, -(Z11 + Z12 + Z21 + Z22) / den], [(-Z11 + Z12 + Z21 - Z22) / den, s11]]
    return ScatteringMatrix(S, Z.z_left, Z.z_right)


def rect_barrier_transfer(
    E: float, U_b: float, L: float, z0: complex | None = None, units: UnitSystem = NATURAL, U_lead: float = 0.0
) -> TransferMatrix:
    """Closed-form transfer matrix of one rectangular barrier between equal leads.

    With ``a = (k0^2 + kb^2)/(2 k0 kb)`` and ``b = (kb^2 - k0^2)/(2 k0 kb)``
    (``kb`` the decay constant under the barrier)::

        T = [[ch + i b sh,   i a sh],
             [-i a sh,       ch - i b sh]],   sh, ch of kb*L

    Complex arithmetic carries the same expression over to E > U_b, where
    ``kb`` is imaginary and sh/ch turn into sin/cos.
    """
    if E == U_b:
        raise SingularInputError("rectangular barrier closed form is singular at E = U_b")
    if L < 0:
        raise ValueError(f"barrier width must be non-negative, got {L}")
    k0 = wavenumber(E, U_lead, units)
    if z0 is None:
        z0 = characteristic_impedance(E, U_lead, units)
    if k0 == 0:
        raise SingularInputError("lead wavenumber is zero")
    kappa = -1j * wavenumber(E, U_b, units)
    sh, ch = cmath.sinh(kappa * L), cmath.cosh(kappa * L)
    a = (k0**2 + kappa**2) / (2 * k0 * kappa)
    b = (kappa**2 - k0**2) / (2 * k0 * kappa)
    T = [[ch + 1j * b * sh, 1j * a * sh], [-1j * a * sh, ch - 1j * b * sh]]
    return TransferMatrix(T, z0, z0)


def rect_barrier_impedance_matrix_unscaled(E: float, U_b: float, L: float, units: UnitSystem = NATURAL) -> np.ndarray:
    """Impedance-matrix entries of a rectangular barrier in un-normalised form.

    ``[[(kb/k0)^2 sh, i (kb/k0) ch], [-i (kb/k0) ch, sh]]``. This equals
    ``transfer_to_impedance_matrix(rect_barrier_transfer(...))`` divided by
    ``i k0/kb``; the common factor drops out of the impedance map, so both act
    identically on a load impedance. Its determinant is ``-(kb/k0)^2``.
    """
    k0 = wavenumber(E, 0.0, units)
    kappa = -1j * wavenumber(E, U_b, units)
    sh, ch = cmath.sinh(kappa * L), cmath.cosh(kappa * L)
    q = kappa / k0
    return np.array([[q * q * sh, 1j * q * ch], [-1j * q * ch, sh]])


def segment_transfer(E: float, U: float, L: float, z_out: complex, units: UnitSystem = NATURAL) -> TransferMatrix:
    """``I(z_out, z) P(k, L) I(z, z_out)`` for a uniform segment embedded in ``z_out``."""
    k = wavenumber(E, U, units)
    z = characteristic_impedance(E, U, units)
    return compose(interface_matrix(z_out, z), propagation_matrix(k, L, z), interface_matrix(z, z_out))


def profile_factors(profile, E: float) -> list[TransferMatrix]:
    """Interface, propagation and delta factors of a profile, left to right."""
    units = profile.units
    U_cur = profile.left_lead.potential
    z_cur = characteristic_impedance(E, U_cur, units)
    k_cur = wavenumber(E, U_cur, units)
    factors = []
    for el in profile.elements:
        if isinstance(el, Segment):
            z = characteristic_impedance(E, el.potential, units)
            k = wavenumber(E, el.potential, units)
            factors.append(interface_matrix(z_cur, z))
            factors.append(propagation_matrix(k, el.length, z))
            z_cur, k_cur = z, k
        else:
            factors.append(delta_matrix(el.strength, k_cur, units))
    factors.append(interface_matrix(z_cur, characteristic_impedance(E, profile.right_lead.potential, units)))
    return factors


def profile_transfer(profile, E: float) -> TransferMatrix:
    """Transfer matrix of the whole finite part of ``profile`` at energy ``E``."""
    factors = profile_factors(profile, E)
    return factors[0] if len(factors) == 1 else compose(*factors)

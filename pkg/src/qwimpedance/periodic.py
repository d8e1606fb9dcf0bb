"""N identical cells in closed form.

For a unimodular cell matrix T with half-trace chi, Cayley-Hamilton gives
``T^N = T U_{N-1}(chi) - I U_{N-2}(chi)`` with U the Chebyshev polynomials of
the second kind. The same linear combination carries over to the impedance
matrix, so an N-cell input impedance costs one cell evaluation.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import NodeSingularityError, NonUnimodularError, ResonanceSingularityError
from .impedance import Impedance, apply_impedance_matrix, gamma
from .matrices import ImpedanceMatrix, TransferMatrix, same_impedance, transfer_to_impedance_matrix
from .potential import NATURAL, UnitSystem

BAND_EDGE_EPS = 1e-6


def chebyshev_U(N: int, chi: complex) -> complex:
    """Chebyshev polynomial of the second kind by upward recurrence.

    ``U_{-1} = 0``, ``U_0 = 1``, ``U_{n+1} = 2 chi U_n - U_{n-1}``.
    """
    if N < -1:
        raise ValueError(f"U_N defined here for N >= -1, got {N}")
    prev, cur = 0.0, 1.0
    if N == -1:
        return prev
    for _ in range(N):
        prev, cur = cur, 2 * chi * cur - prev
    return cur


def chebyshev_T(N: int, chi: complex) -> complex:
    """Chebyshev polynomial of the first kind, ``T_N(cos l) = cos(N l)``."""
    if N < 0:
        raise ValueError(f"T_N defined for N >= 0, got {N}")
    prev, cur = 1.0, chi
    if N == 0:
        return prev
    for _ in range(N - 1):
        prev, cur = cur, 2 * chi * cur - prev
    return cur


def chebyshev_U_sine(N: int, chi: complex) -> complex:
    """Closed form ``sin((N+1) l) / sin(l)`` with ``l = arccos(chi)``.

    Near a band edge (``|sin l| < 1e-6``) the ratio is 0/0 and the recurrence
    is used instead.
    """
    lam = cmath.acos(chi)
    s = cmath.sin(lam)
    if abs(s) < BAND_EDGE_EPS:
        return chebyshev_U(N, chi)
    return cmath.sin((N + 1) * lam) / s


@dataclass(frozen=True)
class BlochParameter:
    chi: complex
    lam: complex

    @classmethod
    def from_chi(cls, chi: complex) -> "BlochParameter":
        chi = complex(chi)
        if chi.imag == 0 and abs(chi.real) <= 1:
            return cls(chi, complex(np.arccos(chi.real)))
        return cls(chi, cmath.acos(chi))

    @classmethod
    def from_transfer(cls, T: TransferMatrix) -> "BlochParameter":
        return cls.from_chi(T.half_trace)

    @property
    def in_gap(self) -> bool:
        return abs(self.chi.real) > 1


@dataclass(frozen=True)
class CellSpec:
    """One elementary cell: its transfer matrix and entry/exit impedances."""

    transfer: TransferMatrix
    z0: complex
    zN: complex
    period: float

    def __post_init__(self):
        if not same_impedance(self.transfer.z_left, self.z0) or not same_impedance(self.transfer.z_right, self.zN):
            raise ValueError("cell transfer matrix impedances do not match z0/zN")
        if self.period <= 0:
            raise ValueError(f"period must be positive, got {self.period}")

    @property
    def impedance_matrix(self) -> ImpedanceMatrix:
        return transfer_to_impedance_matrix(self.transfer)

    @property
    def bloch(self) -> BlochParameter:
        return BlochParameter.from_transfer(self.transfer)


@dataclass(frozen=True)
class AffixSpec:
    """Uniform spacers between the leads and the periodic core.

    ``l_L`` is the full spacer length on the left (background impedance
    ``z0``), ``l_R`` on the right (background ``zN``).
    """

    l_L: float
    l_R: float
    z_L: complex
    z_R: complex

    def __post_init__(self):
        if self.l_L < 0 or self.l_R < 0:
            raise ValueError("affix lengths must be non-negative")


def _check_unimodular(T: TransferMatrix, tol: float):
    if abs(T.det - 1) > tol:
        raise NonUnimodularError(f"det T = {T.det} differs from 1 by more than {tol}")


def matrix_power_chebyshev(T: TransferMatrix, N: int, tol: float = 1e-10) -> TransferMatrix:
    """``T^N`` of a unimodular matrix via Chebyshev polynomials."""
    if N < 1:
        raise ValueError(f"N must be a positive integer, got {N}")
    _check_unimodular(T, tol)
    chi = T.half_trace
    u1, u2 = chebyshev_U(N - 1, chi), chebyshev_U(N - 2, chi)
    return TransferMatrix(T.m * u1 - np.eye(2) * u2, T.z_left, T.z_right)


def matrix_power_bruteforce(T: TransferMatrix, N: int) -> TransferMatrix:
    m = np.eye(2, dtype=complex)
    for _ in range(N):
        m = m @ T.m
    return TransferMatrix(m, T.z_left, T.z_right)


def rt_N(T: TransferMatrix, N: int) -> tuple[complex, complex]:
    """Transmission and reflection amplitudes of N identical cells."""
    if N < 1:
        raise ValueError(f"N must be a positive integer, got {N}")
    chi = T.half_trace
    u1, u2 = chebyshev_U(N - 1, chi), chebyshev_U(N - 2, chi)
    den = T.m11 * u1 - u2
    if den == 0:
        raise ResonanceSingularityError("(T^N)_11 = 0: bound-state condition")
    return 1 / den, T.m21 * u1 / den


def input_impedance_N(cell: CellSpec, N: int, Z_load: Impedance) -> Impedance:
    """Impedance in front of N cells terminated by ``Z_load``."""
    if N < 1:
        raise ValueError(f"N must be a positive integer, got {N}")
    Zm = cell.impedance_matrix
    chi = cell.transfer.half_trace
    u1, u2 = chebyshev_U(N - 1, chi), chebyshev_U(N - 2, chi)
    num = Zm.m11 * u1 * cell.zN - (Zm.m12 * u1 + u2) * Z_load
    den = (Zm.m21 * u1 - u2) * cell.zN - Zm.m22 * u1 * Z_load
    if den == 0:
        raise NodeSingularityError("impedance pole in front of the N-cell stack")
    return cell.z0 * num / den


def input_impedance_iterative(cell: CellSpec, N: int, Z_load: Impedance) -> Impedance:
    """N successive single-cell maps; reference for :func:`input_impedance_N`."""
    Zm = cell.impedance_matrix
    Z = Z_load
    for _ in range(N):
        Z = apply_impedance_matrix(Zm, cell.z0, cell.zN, Z)
    return Z


def bloch_impedance(cell: CellSpec) -> tuple[complex, complex]:
    """Both fixed points of the single-cell impedance map (``z0 == zN``)."""
    Zm = cell.impedance_matrix
    z = cell.z0
    # -Z22 Z^2 + z (Z21 + Z12) Z - z^2 Z11 = 0
    roots = np.roots([-Zm.m22, z * (Zm.m21 + Zm.m12), -(z**2) * Zm.m11])
    return complex(roots[0]), complex(roots[1])


def eigen_residual_fps(
    E: float, cell: CellSpec, affix: AffixSpec, N: int, units: UnitSystem = NATURAL, normalize: bool = True
) -> complex:
    """Bound-state residual of a finite periodic structure with spacers.

    Left lead | spacer l_L | N cells | spacer l_R | right lead. The state is
    bound when the impedance at the left lead equals ``-z_L``. Substituting the
    spacer maps into the N-cell formula and clearing every denominator leaves
    an entire function of the spacer ch/sh, so there are no poles. ``E`` only
    labels the evaluation; all energy dependence is already in ``cell`` and
    ``affix``.
    """
    z0, zN = cell.z0, cell.zN
    Zm = cell.impedance_matrix
    chi = cell.transfer.half_trace
    u1, u2 = chebyshev_U(N - 1, chi), chebyshev_U(N - 2, chi)

    gL = gamma(z0, units) * affix.l_L
    gR = gamma(zN, units) * affix.l_R
    chL, shL = cmath.cosh(gL), cmath.sinh(gL)
    chR, shR = cmath.cosh(gR), cmath.sinh(gR)

    lhs_num = z0 * shL - affix.z_L * chL
    lhs_den = z0 * chL - affix.z_L * shL
    load_fwd = zN * chR - affix.z_R * shR
    load_bwd = affix.z_R * chR - zN * shR
    rhs_num = Zm.m11 * u1 * load_fwd - (Zm.m12 * u1 + u2) * load_bwd
    rhs_den = (Zm.m21 * u1 - u2) * load_fwd - Zm.m22 * u1 * load_bwd

    a = lhs_num * rhs_den
    b = rhs_num * lhs_den
    res = a - b
    if normalize:
        scale = abs(a) + abs(b)
        if scale > 0:
            res /= scale
    return complex(res)

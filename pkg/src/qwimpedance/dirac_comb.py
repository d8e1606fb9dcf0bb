"""Finite Dirac comb between two equal walls, and its Tamm surface states.

Geometry (interior potential zero, walls at ``U_E``)::

    U_E | l | a | l | a | ... | a | l | U_E      (N deltas "a", N+1 gaps)

One cell is a delta followed by a gap of length ``l``; the leading gap is the
left spacer. With ``xi = k0 l``, ``Omega = alpha / (hbar z0)`` and
``rho = kappa_E / k0`` the cell half-trace is ``cos(xi) + Omega sin(xi)``.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularInputError
from .matrices import ImpedanceMatrix, TransferMatrix, compose, delta_matrix, propagation_matrix
from .periodic import AffixSpec, CellSpec, chebyshev_T, chebyshev_U, eigen_residual_fps
from .potential import NATURAL, PotentialProfile, Segment, UnitSystem, build_profile, characteristic_impedance
from .roots import find_roots, reference_phase

log = logging.getLogger(__name__)

IMPEDANCE_FORM = "impedance-form"
COT_FORM = "cot-form"
BRUTE_FORCE = "brute-force"


@dataclass(frozen=True)
class CombSpec:
    alpha: float
    l: float
    N: int
    U_E: float
    units: UnitSystem = NATURAL

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N}")
        if not self.l > 0:
            raise ValueError(f"period must be positive, got {self.l}")

    def to_profile(self) -> PotentialProfile:
        items = [("segment", self.l, 0.0)]
        for _ in range(self.N):
            items += [("delta", self.alpha), ("segment", self.l, 0.0)]
        return build_profile(self.U_E, items, self.U_E, self.units)

    def params(self, E: float) -> "CombParams":
        if E <= 0:
            raise SingularInputError(f"comb formulas need E > 0 (propagation inside the comb), got {E}")
        u = self.units
        z0 = math.sqrt(2 * E / u.mass)
        k0 = u.mass * z0 / u.hbar
        kappa_E = math.sqrt(2 * (self.U_E - E) / u.mass) if E < self.U_E else float("nan")
        return CombParams(k0=k0, z0=z0, xi=k0 * self.l, omega=self.alpha / (z0 * u.hbar), rho=kappa_E / z0)


@dataclass(frozen=True)
class CombParams:
    k0: float
    z0: float
    xi: float
    omega: float
    rho: float

    @property
    def chi(self) -> float:
        return math.cos(self.xi) + self.omega * math.sin(self.xi)


@dataclass(frozen=True)
class TammLevel:
    energy: float
    residual: float
    method: str
    discrepancy: float = 0.0
    chi: float = float("nan")

    @property
    def in_gap(self) -> bool:
        return abs(self.chi) > 1


def comb_cell_transfer(E: float, spec: CombSpec) -> TransferMatrix:
    p = spec.params(E)
    om, e = p.omega, cmath.exp(1j * p.xi)
    m = [[(1 + 1j * om) / e, 1j * om * e], [-1j * om / e, (1 - 1j * om) * e]]
    return TransferMatrix(m, p.z0, p.z0)


def comb_cell_factored(E: float, spec: CombSpec) -> TransferMatrix:
    """Same cell built as delta matrix times propagation matrix."""
    p = spec.params(E)
    return compose(delta_matrix(spec.alpha, p.k0, spec.units), propagation_matrix(p.k0, spec.l, p.z0))


def comb_cell_impedance_matrix(E: float, spec: CombSpec) -> ImpedanceMatrix:
    p = spec.params(E)
    sh, ch = cmath.sinh(1j * p.xi), cmath.cosh(1j * p.xi)
    two_i_om = 2j * p.omega
    m = [[-sh + two_i_om * ch, -ch + two_i_om * sh], [ch, sh]]
    return ImpedanceMatrix(m, p.z0, p.z0)


def comb_cell(E: float, spec: CombSpec) -> CellSpec:
    p = spec.params(E)
    return CellSpec(comb_cell_transfer(E, spec), p.z0, p.z0, spec.l)


def comb_affix(E: float, spec: CombSpec) -> AffixSpec:
    z_E = characteristic_impedance(E, spec.U_E, spec.units)
    return AffixSpec(l_L=spec.l, l_R=0.0, z_L=z_E, z_R=z_E)


def bloch_chi(E: float, spec: CombSpec) -> float:
    return spec.params(E).chi


def surface_rhs(E: float, spec: CombSpec) -> float:
    """Right-hand side ``[(1 - rho^2) sin xi - 2 rho cos xi] / [2 (Omega - rho)]``."""
    p = spec.params(E)
    return ((1 - p.rho**2) * math.sin(p.xi) - 2 * p.rho * math.cos(p.xi)) / (2 * (p.omega - p.rho))


def surface_lhs_trig(E: float, spec: CombSpec) -> complex:
    """``cos l - sin l ctg((N+1) l)`` with ``l = arccos(chi)``, complex in gaps."""
    lam = cmath.acos(spec.params(E).chi)
    return cmath.cos(lam) - cmath.sin(lam) * cmath.cos((spec.N + 1) * lam) / cmath.sin((spec.N + 1) * lam)


def tamm_residual_impedance(E: float, spec: CombSpec) -> float:
    """Impedance-form eigencondition with denominators cleared.

    ``cos l - sin l ctg((N+1) l) = U_{N-1}/U_N``, which is real for any real
    chi, so the condition is evaluated as
    ``2 (Omega - rho) U_{N-1} - [(1 - rho^2) sin xi - 2 rho cos xi] U_N``.
    """
    p = spec.params(E)
    chi = p.chi
    rhs_num = (1 - p.rho**2) * math.sin(p.xi) - 2 * p.rho * math.cos(p.xi)
    return 2 * (p.omega - p.rho) * chebyshev_U(spec.N - 1, chi) - rhs_num * chebyshev_U(spec.N, chi)


def cot_form_mu(E: float, spec: CombSpec) -> complex:
    """``mu = sin l / ((rho - Omega) sin xi)``; infinite where ``sin xi = 0``."""
    p = spec.params(E)
    lam = cmath.acos(p.chi)
    return cmath.sin(lam) / ((p.rho - p.omega) * math.sin(p.xi))


def cot_form_sides(E: float, spec: CombSpec) -> tuple[complex, complex]:
    """``(ctg((N+1) l), (mu^2 - 1) / (2 mu))``; equal at a bound state."""
    lam = cmath.acos(spec.params(E).chi)
    mu = cot_form_mu(E, spec)
    arg = (spec.N + 1) * lam
    return cmath.cos(arg) / cmath.sin(arg), (mu * mu - 1) / (2 * mu)


def tamm_residual_cot(E: float, spec: CombSpec) -> float:
    """Cot-form eigencondition, cleared of poles.

    Multiplying ``2 mu ctg((N+1) l) = mu^2 - 1`` by
    ``sin((N+1) l) (rho - Omega)^2 sin^2 xi / sin l`` and dividing out the
    common ``sin xi`` (it carries the pole of mu) gives
    ``2 (rho - Omega) T_{N+1} - [(1 - Omega^2 - (rho - Omega)^2) sin xi - 2 Omega cos xi] U_N``.
    """
    p = spec.params(E)
    chi = p.chi
    d = p.rho - p.omega
    bracket = (1 - p.omega**2 - d * d) * math.sin(p.xi) - 2 * p.omega * math.cos(p.xi)
    return 2 * d * chebyshev_T(spec.N + 1, chi) - bracket * chebyshev_U(spec.N, chi)


def tamm_residual_fps(E: float, spec: CombSpec) -> complex:
    """General spacer/cell eigencondition specialised to the comb."""
    return eigen_residual_fps(E, comb_cell(E, spec), comb_affix(E, spec), spec.N, spec.units)


def _default_range(spec: CombSpec, E_range):
    if E_range is None:
        span = spec.U_E
        return (span * 1e-9, span * (1 - 1e-9))
    lo, hi = E_range
    if not (0 < lo < hi < spec.U_E):
        raise ValueError(f"E_range must lie inside (0, U_E={spec.U_E}), got {E_range}")
    return lo, hi


def _match(a: list[float], b: list[float]) -> list[float]:
    """Distance from each root in ``a`` to the nearest root in ``b``."""
    if not b:
        return [math.inf] * len(a)
    bb = np.asarray(b)
    return [float(np.min(np.abs(bb - x))) for x in a]


def solve_tamm(
    spec: CombSpec,
    E_range: tuple[float, float] | None = None,
    grid: int = 2000,
    surface_only: bool = True,
    residual=None,
) -> list[TammLevel]:
    """Bound levels of the finite comb from the impedance-form condition.

    Every level is re-solved with the cot form on the same grid and tagged
    with the distance to the nearest cot-form root. With ``surface_only``
    only levels inside a gap of the infinite comb (``|chi| > 1``), the Tamm
    surface states, are returned.
    """
    if grid < 16:
        raise ValueError(f"grid must be at least 16, got {grid}")
    lo, hi = _default_range(spec, E_range)
    f_imp = residual if residual is not None else (lambda E: tamm_residual_impedance(E, spec))
    imp = find_roots(f_imp, lo, hi, grid)
    cot = find_roots(lambda E: tamm_residual_cot(E, spec), lo, hi, grid)
    if len(imp) != len(cot):
        log.warning("impedance form found %d levels, cot form %d", len(imp), len(cot))
    gaps = _match([r for r, _ in imp], [r for r, _ in cot])
    levels = [
        TammLevel(E, res, IMPEDANCE_FORM, d, bloch_chi(E, spec)) for (E, res), d in zip(imp, gaps)
    ]
    if surface_only:
        levels = [lv for lv in levels if lv.in_gap]
    return levels


def solve_cot_form(spec: CombSpec, E_range=None, grid: int = 2000, surface_only: bool = False) -> list[TammLevel]:
    lo, hi = _default_range(spec, E_range)
    levels = [
        TammLevel(E, res, COT_FORM, chi=bloch_chi(E, spec))
        for E, res in find_roots(lambda E: tamm_residual_cot(E, spec), lo, hi, grid)
    ]
    return [lv for lv in levels if lv.in_gap] if surface_only else levels


def solve_fps_form(spec: CombSpec, E_range=None, grid: int = 2000) -> list[float]:
    """Roots of the general spacer/cell condition, for cross-checks."""
    lo, hi = _default_range(spec, E_range)
    E = np.linspace(lo, hi, grid)
    phase = reference_phase([tamm_residual_fps(e, spec) for e in E])
    return [r for r, _ in find_roots(lambda e: (tamm_residual_fps(e, spec) / phase).real, lo, hi, energies=E)]


# -- brute force ----------------------------------------------------------------


def _step_back(psi: float, dpsi: float, q2: float, d: float) -> tuple[float, float]:
    """(psi, psi') a distance ``d`` to the left, ``psi'' = -q2 psi``."""
    if q2 > 0:
        q = math.sqrt(q2)
        c, s = math.cos(q * d), math.sin(q * d)
        return psi * c - dpsi * s / q, psi * q * s + dpsi * c
    if q2 < 0:
        kap = math.sqrt(-q2)
        c, s = math.cosh(kap * d), math.sinh(kap * d)
        return psi * c - dpsi * s / kap, -psi * kap * s + dpsi * c
    return psi - dpsi * d, dpsi


def bound_state_residual(profile: PotentialProfile, E: float) -> float:
    """Growing-exponential coefficient at the left lead, up to a positive factor.

    Starts from the decaying solution in the right lead and integrates
    (psi, psi') leftwards in real arithmetic. Zero exactly at a bound state.
    """
    u = profile.units
    c = 2 * u.mass / u.hbar**2
    kL2 = c * (profile.left_lead.potential - E)
    kR2 = c * (profile.right_lead.potential - E)
    if kL2 <= 0 or kR2 <= 0:
        raise ValueError(f"E = {E} is not below both lead potentials")
    kL, kR = math.sqrt(kL2), math.sqrt(kR2)
    psi, dpsi = 1.0, -kR
    for el in reversed(profile.elements):
        if isinstance(el, Segment):
            psi, dpsi = _step_back(psi, dpsi, c * (E - el.potential), el.length)
        else:
            dpsi -= c * el.strength * psi
        scale = math.hypot(psi, dpsi / kL)
        psi, dpsi = psi / scale, dpsi / scale
    return (dpsi - kL * psi) / math.hypot(psi, dpsi / kL) / kL


def bound_states_bruteforce(
    profile: PotentialProfile, E_range: tuple[float, float] | None = None, grid: int = 2000
) -> list[TammLevel]:
    """Bound states of an arbitrary profile by dense scan and bisection."""
    top = min(profile.left_lead.potential, profile.right_lead.potential)
    if E_range is None:
        bottom = min(profile.potentials())
        neg = [d.strength for d in profile.deltas if d.strength < 0]
        if neg:
            u = profile.units
            # a merged delta binds deepest; keep that edge strictly inside
            bottom -= 1.25 * u.mass * sum(neg) ** 2 / (2 * u.hbar**2)
        span = top - bottom
        if span <= 0:
            return []
        E_range = (bottom + 1e-9 * span, top - 1e-9 * span)
    lo, hi = E_range
    if hi >= top:
        raise ValueError(f"E_range must lie below both leads (< {top})")
    roots = find_roots(lambda E: bound_state_residual(profile, E), lo, hi, grid)
    return [TammLevel(E, res, BRUTE_FORCE) for E, res in roots]


def comb_bruteforce(spec: CombSpec, E_range=None, grid: int = 2000, surface_only: bool = False) -> list[TammLevel]:
    lo, hi = _default_range(spec, E_range)
    levels = [
        TammLevel(lv.energy, lv.residual, BRUTE_FORCE, chi=bloch_chi(lv.energy, spec))
        for lv in bound_states_bruteforce(spec.to_profile(), (lo, hi), grid)
    ]
    return [lv for lv in levels if lv.in_gap] if surface_only else levels

"""Piecewise-constant potentials with delta barriers, and the unit convention.

A profile is a left lead, an ordered list of finite segments and delta
barriers, and a right lead. Deltas sit on the boundary at the point where they
appear in the element list.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Union

from .errors import ProfileSemanticError, ProfileSyntaxError


@dataclass(frozen=True)
class UnitSystem:
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "mass"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ProfileSemanticError(f"{name} must be positive and finite, got {value!r}")


NATURAL = UnitSystem()


@dataclass(frozen=True)
class Lead:
    potential: float

    def __post_init__(self):
        if not math.isfinite(self.potential):
            raise ProfileSemanticError(f"lead potential must be finite, got {self.potential!r}")


@dataclass(frozen=True)
class Segment:
    length: float
    potential: float

    def __post_init__(self):
        if not (math.isfinite(self.length) and self.length > 0):
            raise ProfileSemanticError(f"segment length must be positive, got {self.length!r}")
        if not math.isfinite(self.potential):
            raise ProfileSemanticError(f"segment potential must be finite, got {self.potential!r}")


@dataclass(frozen=True)
class DeltaBarrier:
    """Delta barrier ``alpha * delta(x - x_b)`` on a segment boundary.

    ``position_index`` counts the segments to the left of the barrier, so 0 is
    the left-lead boundary and ``len(segments)`` the right-lead boundary.
    """

    strength: float
    position_index: int = 0

    def __post_init__(self):
        if not math.isfinite(self.strength) or self.strength == 0:
            raise ProfileSemanticError(f"delta strength must be finite and non-zero, got {self.strength!r}")


Element = Union[Segment, DeltaBarrier]


@dataclass(frozen=True)
class PotentialProfile:
    left_lead: Lead
    elements: tuple[Element, ...] = ()
    right_lead: Lead = field(default_factory=lambda: Lead(0.0))
    units: UnitSystem = NATURAL

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        seen = set()
        n_seg = 0
        for el in self.elements:
            if isinstance(el, Segment):
                n_seg += 1
            elif isinstance(el, DeltaBarrier):
                if el.position_index != n_seg:
                    raise ProfileSemanticError(
                        f"delta position_index {el.position_index} does not match its place (boundary {n_seg})"
                    )
                if n_seg in seen:
                    raise ProfileSemanticError(f"two delta barriers on boundary {n_seg}; merge them first")
                seen.add(n_seg)
            else:
                raise ProfileSemanticError(f"unknown element {el!r}")

    @property
    def segments(self) -> list[Segment]:
        return [el for el in self.elements if isinstance(el, Segment)]

    @property
    def deltas(self) -> list[DeltaBarrier]:
        return [el for el in self.elements if isinstance(el, DeltaBarrier)]

    @property
    def total_length(self) -> float:
        return math.fsum(s.length for s in self.segments)

    def boundaries(self) -> list[float]:
        """Boundary coordinates, starting at x = 0 for the left-lead edge."""
        xs = [0.0]
        for s in self.segments:
            xs.append(xs[-1] + s.length)
        return xs

    def potentials(self) -> list[float]:
        """Every distinct region potential, leads included."""
        return [self.left_lead.potential, *(s.potential for s in self.segments), self.right_lead.potential]

    @property
    def symmetric_leads(self) -> bool:
        return self.left_lead.potential == self.right_lead.potential


def build_profile(left: float, elements, right: float, units: UnitSystem = NATURAL) -> PotentialProfile:
    """Build a profile from ``("segment", length, U)`` / ``("delta", alpha)`` tuples.

    Zero-strength deltas are dropped and deltas on a shared boundary merged
    (with a warning), the same rules :func:`parse_profile` applies.
    """
    out: list[Element] = []
    n_seg = 0
    for item in elements:
        kind = item[0]
        if kind == "segment":
            out.append(Segment(float(item[1]), float(item[2])))
            n_seg += 1
        elif kind == "delta":
            alpha = float(item[1])
            if out and isinstance(out[-1], DeltaBarrier):
                prev = out.pop()
                warnings.warn(
                    f"merging delta barriers on boundary {n_seg}: {prev.strength} + {alpha}",
                    stacklevel=2,
                )
                alpha += prev.strength
            if alpha != 0:
                out.append(DeltaBarrier(alpha, n_seg))
        else:
            raise ProfileSemanticError(f"unknown element kind {kind!r}")
    return PotentialProfile(Lead(float(left)), tuple(out), Lead(float(right)), units)


def wavenumber(E: float, U: float, units: UnitSystem = NATURAL) -> complex:
    """k = sqrt(2m(E-U))/hbar on the branch Im(k) >= 0, Re(k) >= 0."""
    arg = 2.0 * units.mass * (E - U)
    if arg >= 0:
        return complex(math.sqrt(arg) / units.hbar, 0.0)
    return complex(0.0, math.sqrt(-arg) / units.hbar)


def characteristic_impedance(E: float, U: float, units: UnitSystem = NATURAL) -> complex:
    """z = hbar k / m = sqrt(2(E-U)/m), same branch as :func:`wavenumber`."""
    return units.hbar * wavenumber(E, U, units) / units.mass


# -- file format ------------------------------------------------------------


def _number(obj, key, where):
    if key not in obj:
        raise ProfileSemanticError(f"{where}: missing field {key!r}")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProfileSemanticError(f"{where}.{key}: expected a number, got {value!r}")
    return float(value)


def profile_from_dict(doc: dict) -> PotentialProfile:
    if not isinstance(doc, dict):
        raise ProfileSemanticError("profile document must be a JSON object")
    units_doc = doc.get("units", {})
    units = UnitSystem(
        hbar=_number(units_doc, "hbar", "units") if "hbar" in units_doc else 1.0,
        mass=_number(units_doc, "mass", "units") if "mass" in units_doc else 1.0,
    )
    for key in ("left_lead", "right_lead"):
        if key not in doc:
            raise ProfileSemanticError(f"missing field {key!r}")
    left = _number(doc["left_lead"], "U", "left_lead")
    right = _number(doc["right_lead"], "U", "right_lead")
    raw = doc.get("elements", [])
    if not isinstance(raw, list):
        raise ProfileSemanticError("elements must be a list")
    items = []
    for i, el in enumerate(raw):
        where = f"elements[{i}]"
        if not isinstance(el, dict) or len(el) != 1:
            raise ProfileSemanticError(f"{where}: expected {{'segment': ...}} or {{'delta': ...}}")
        (kind, body), = el.items()
        if kind == "segment":
            length = _number(body, "length", f"{where}.segment")
            if length <= 0:
                raise ProfileSemanticError(f"{where}.segment.length must be positive, got {length}")
            items.append(("segment", length, _number(body, "U", f"{where}.segment")))
        elif kind == "delta":
            items.append(("delta", _number(body, "alpha", f"{where}.delta")))
        else:
            raise ProfileSemanticError(f"{where}: unknown element kind {kind!r}")
    return build_profile(left, items, right, units)


def parse_profile(text: str) -> PotentialProfile:
    """Parse a JSON profile document.

    Raises:
        ProfileSyntaxError: malformed JSON, carries ``line`` and ``column``.
        ProfileSemanticError: well-formed JSON describing an invalid profile.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProfileSyntaxError(exc.msg, exc.lineno, exc.colno) from exc
    return profile_from_dict(doc)


def profile_to_dict(profile: PotentialProfile) -> dict:
    elements = []
    for el in profile.elements:
        if isinstance(el, Segment):
            elements.append({"segment": {"length": el.length, "U": el.potential}})
        else:
            elements.append({"delta": {"alpha": el.strength}})
    return {
        "units": {"hbar": profile.units.hbar, "mass": profile.units.mass},
        "left_lead": {"U": profile.left_lead.potential},
        "elements": elements,
        "right_lead": {"U": profile.right_lead.potential},
    }


def serialize_profile(profile: PotentialProfile) -> str:
    return json.dumps(profile_to_dict(profile), indent=2)

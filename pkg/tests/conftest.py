from __future__ import annotations

import warnings
from pathlib import Path

import numpy as np
import pytest

from qwimpedance.potential import NATURAL, build_profile

REPO = Path(__file__).resolve().parents[1]
DATA = REPO / "data"


def random_profile(rng: np.random.Generator, lead_U: float = 0.0, max_items: int = 5, units=NATURAL):
    """Random mix of segments and deltas between two leads at ``lead_U``.

    Opacity is bounded (total barrier exponent below ~10) so that |T| stays
    under ~1e4, where det T is still resolvable in extended precision.
    """
    items = []
    for _ in range(int(rng.integers(1, max_items + 1))):
        if rng.random() < 0.6:
            items.append(("segment", float(rng.uniform(0.05, 0.6)), lead_U + float(rng.uniform(-3.0, 5.0))))
        else:
            items.append(("delta", float(rng.uniform(-2.0, 2.0))))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return build_profile(lead_U, items, lead_U, units)


def propagating_energies(profile, n: int, rng: np.random.Generator, top: float = 12.0):
    """Energies above the leads that avoid every region potential."""
    lead = max(profile.left_lead.potential, profile.right_lead.potential)
    pots = np.array(profile.potentials())
    out = []
    while len(out) < n:
        E = float(rng.uniform(lead + 0.5, lead + top))
        if np.min(np.abs(pots - E)) > 1e-3:
            out.append(E)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

"""Sign-change scanning and bisection for real residual functions."""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy.optimize import bisect

log = logging.getLogger(__name__)


def reference_phase(values) -> complex:
    """Unit phase of the largest finite sample.

    Residuals of real (time-reversal symmetric) problems carry one fixed
    complex phase up to sign; dividing it out gives a real function.
    """
    values = np.asarray(values, dtype=complex)
    values = values[np.isfinite(values)]
    if values.size == 0:
        return 1.0
    ref = values[np.argmax(np.abs(values))]
    return ref / abs(ref) if ref != 0 else 1.0


def scan_brackets(energies, values) -> list[tuple[int, int]]:
    """Index pairs ``(i, i+1)`` where the sampled residual changes sign.

    An exact zero on a grid point is bracketed with its right neighbour.
    """
    out = []
    for i in range(len(values) - 1):
        a, b = values[i], values[i + 1]
        if not (math.isfinite(a) and math.isfinite(b)):
            continue
        if a == 0 or (a < 0) != (b < 0) and b != 0:
            out.append((i, i + 1))
    return out


def find_roots(f, lo: float, hi: float, grid: int = 2000, xtol_rel: float = 1e-12, energies=None):
    """All simple roots of a real function on ``[lo, hi]``.

    Brackets come from sign changes on a uniform grid, each shrunk by
    bisection to ``xtol_rel * (hi - lo)``. Brackets where ``|f|`` grows while
    the bracket shrinks are poles and are discarded.

    Returns:
        list of ``(root, f(root))`` sorted by root.
    """
    if not hi > lo:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    E = np.linspace(lo, hi, grid) if energies is None else np.asarray(energies, dtype=float)
    v = np.array([f(e) for e in E], dtype=float)
    xtol = xtol_rel * (hi - lo)
    out = []
    for i, j in scan_brackets(E, v):
        a, b = E[i], E[j]
        if v[i] == 0:
            out.append((float(a), 0.0))
            continue
        root = bisect(f, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=400)
        fr = f(root)
        if abs(fr) > max(abs(v[i]), abs(v[j])):
            log.debug("discarding pole near E=%r", root)
            continue
        out.append((float(root), float(fr)))
    return out

"""Command-line front end: ``spectrum``, ``tamm``, ``convert``, ``validate``.

Exit codes: 0 success, 1 validation failure, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import dirac_comb as dc
from .errors import NonUnimodularError, ProfileError, QWImpedanceError, ResonanceSingularityError, ZeroTransmissionError
from .impedance import profile_reflection
from .matrices import (
    ImpedanceMatrix,
    ScatteringMatrix,
    TransferMatrix,
    impedance_matrix_to_transfer,
    profile_factors,
    profile_transfer,
    rt_from_transfer,
    scattering_to_transfer,
    transfer_to_impedance_matrix,
    transfer_to_scattering,
)
from .periodic import (
    CellSpec,
    input_impedance_iterative,
    input_impedance_N,
    matrix_power_bruteforce,
    matrix_power_chebyshev,
)
from .potential import PotentialProfile, UnitSystem, characteristic_impedance, profile_from_dict

log = logging.getLogger("qwimpedance")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
CSV_HEADER = ["E", "T", "R", "unitarity_defect", "chi_re", "chi_im", "in_gap"]
NUDGE_REL = 1e-12


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    emin: float | None = None
    emax: float | None = None
    grid: int = 201
    tol: float = 1e-10
    fmt: str = "csv"
    method: str = "transfer"
    verify: bool = False
    output: str | None = None
    all_levels: bool = False
    inject: str | None = None

    def validate(self):
        if self.emin is not None and self.emax is not None and not self.emin < self.emax:
            raise InputError(f"--emin ({self.emin}) must be smaller than --emax ({self.emax})")
        if self.grid < 2:
            raise InputError(f"--grid must be at least 2, got {self.grid}")
        if not self.tol > 0:
            raise InputError(f"--tol must be positive, got {self.tol}")


@dataclass
class System:
    """A parsed input: a general profile, optionally backed by a comb spec."""

    profile: PotentialProfile
    comb: dc.CombSpec | None = None
    nudged: list = field(default_factory=list)


# -- input ---------------------------------------------------------------------


def _read(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})") from exc


def comb_from_dict(doc: dict) -> dc.CombSpec:
    body = doc["comb"]
    units_doc = doc.get("units", {})
    units = UnitSystem(float(units_doc.get("hbar", 1.0)), float(units_doc.get("mass", 1.0)))
    try:
        return dc.CombSpec(
            alpha=float(body["alpha"]), l=float(body["l"]), N=int(body["N"]), U_E=float(body["U_E"]), units=units
        )
    except KeyError as exc:
        raise InputError(f"comb spec missing field {exc.args[0]!r}") from exc


def load_system(path: str | None) -> System:
    return system_from_doc(_load_json(_read(path)))


def is_matrix_doc(doc) -> bool:
    return isinstance(doc, dict) and "kind" in doc and "matrix" in doc


def system_from_doc(doc) -> System:
    if isinstance(doc, dict) and "comb" in doc:
        comb = comb_from_dict(doc)
        return System(comb.to_profile(), comb)
    return System(profile_from_dict(doc))


# -- output ----------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_table(rows: list[dict], columns: list[str], fmt: str, meta: dict | None = None) -> str:
    if fmt == "json":
        doc = dict(meta or {})
        doc["columns"] = columns
        doc["rows"] = [{c: row[c] for c in columns} for row in rows]
        return json.dumps(doc, indent=1, allow_nan=True) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def _emit(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cplx(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _matrix_doc(M) -> list:
    return [[_cplx(complex(M.m[i, j])) for j in range(2)] for i in range(2)]


def _parse_cplx(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise InputError(f"expected a number or [re, im] pair, got {v!r}")


# -- energy grid -------------------------------------------------------------------


def default_range(system: System) -> tuple[float, float]:
    pots = system.profile.potentials()
    base = max(system.profile.left_lead.potential, system.profile.right_lead.potential)
    span = max(max(pots) - base, 1.0)
    return base + 0.01 * span, max(pots) + span


def energy_grid(system: System, cfg: RunConfig) -> np.ndarray:
    lo, hi = default_range(system)
    lo = cfg.emin if cfg.emin is not None else lo
    hi = cfg.emax if cfg.emax is not None else hi
    if not lo < hi:
        raise InputError(f"empty energy range [{lo}, {hi}]")
    return np.linspace(lo, hi, cfg.grid)


def nudge(E: float, system: System) -> float:
    """Move ``E`` off any region potential; every shift is logged and recorded."""
    E0 = E
    pots = system.profile.potentials()
    for _ in range(8):
        if not any(abs(E - U) <= NUDGE_REL * max(1.0, abs(U)) for U in pots):
            break
        E = E + NUDGE_REL * 4 * max(1.0, abs(E))
    if E != E0:
        log.warning("energy %r coincides with a region potential, nudged to %r", E0, E)
        system.nudged.append({"E": E0, "nudged_to": E})
    return E


# -- spectrum ------------------------------------------------------------------------


def _chi(system: System, E: float, T: TransferMatrix) -> complex:
    if system.comb is not None and E > 0:
        return complex(dc.bloch_chi(E, system.comb))
    return T.half_trace


def spectrum_row(system: System, E: float, method: str) -> dict:
    prof = system.profile
    u = prof.units
    z_L = characteristic_impedance(E, prof.left_lead.potential, u)
    z_R = characteristic_impedance(E, prof.right_lead.potential, u)
    T = profile_transfer(prof, E)
    chi = _chi(system, E, T)
    row = {"E": float(E), "chi_re": float(chi.real), "chi_im": float(chi.imag), "in_gap": bool(abs(chi.real) > 1)}
    if z_L.real <= 0:
        # no incident propagating wave from the left
        row.update(T=math.nan, R=math.nan, unitarity_defect=math.nan, discrepancy=math.nan)
        return row
    flux = z_R.real / z_L.real
    r_t = r_z = None
    if method in ("transfer", "both"):
        t, r_t = rt_from_transfer(T)
        trans, refl = flux * abs(t) ** 2, abs(r_t) ** 2
    if method in ("impedance", "both"):
        r_z = profile_reflection(prof, E)
        if method == "impedance":
            refl = abs(r_z) ** 2
            trans = 1.0 - refl if flux > 0 else 0.0
    row.update(T=float(trans), R=float(refl), unitarity_defect=float(abs(trans + refl - 1.0)))
    row["discrepancy"] = float(abs(r_t - r_z)) if method == "both" else math.nan
    return row


def cmd_spectrum(cfg: RunConfig) -> int:
    system = load_system(cfg.input)
    rows = []
    for E in energy_grid(system, cfg):
        E = nudge(float(E), system)
        try:
            rows.append(spectrum_row(system, E, cfg.method))
        except QWImpedanceError:
            E2 = E + NUDGE_REL * 4 * max(1.0, abs(E))
            log.warning("singular point at E=%r, nudged to %r", E, E2)
            system.nudged.append({"E": E, "nudged_to": E2})
            rows.append(spectrum_row(system, E2, cfg.method))
    columns = list(CSV_HEADER)
    status = EXIT_OK
    if cfg.method == "both":
        columns.append("discrepancy")
        worst = max((r["discrepancy"] for r in rows if not math.isnan(r["discrepancy"])), default=0.0)
        if worst > cfg.tol:
            log.error("transfer and impedance routes disagree by %.3g > tol %.3g", worst, cfg.tol)
            status = EXIT_FAIL
    meta = {"command": "spectrum", "method": cfg.method, "nudged": system.nudged}
    _emit(write_table(rows, columns, cfg.fmt, meta), cfg.output)
    return status


# -- tamm ----------------------------------------------------------------------------


def _corrupted(spec: dc.CombSpec):
    # test hook: shifts every root so --verify must fail
    return lambda E: dc.tamm_residual_impedance(E * 1.01, spec) if E * 1.01 < spec.U_E else 1.0


def cmd_tamm(cfg: RunConfig) -> int:
    system = load_system(cfg.input)
    spec = system.comb
    if spec is None:
        raise InputError("tamm needs a comb spec document ({'comb': {alpha, l, N, U_E}})")
    E_range = None
    if cfg.emin is not None or cfg.emax is not None:
        lo, hi = dc._default_range(spec, None)
        E_range = (cfg.emin if cfg.emin is not None else lo, cfg.emax if cfg.emax is not None else hi)
    grid = max(cfg.grid, 16)
    residual = _corrupted(spec) if cfg.inject == "residual" else None
    levels = dc.solve_tamm(spec, E_range, grid, surface_only=not cfg.all_levels, residual=residual)
    columns = ["E", "residual", "method", "cross_form_discrepancy", "chi", "in_gap"]
    rows = [
        {
            "E": lv.energy,
            "residual": lv.residual,
            "method": lv.method,
            "cross_form_discrepancy": lv.discrepancy,
            "chi": lv.chi,
            "in_gap": lv.in_gap,
        }
        for lv in levels
    ]
    status = EXIT_OK
    if cfg.verify:
        brute = dc.comb_bruteforce(spec, E_range, grid, surface_only=not cfg.all_levels)
        columns += ["E_bruteforce", "verify_diff"]
        targets = [b.energy for b in brute]
        for row in rows:
            j = int(np.argmin([abs(b - row["E"]) for b in targets])) if targets else None
            row["E_bruteforce"] = targets[j] if j is not None else math.nan
            row["verify_diff"] = abs(targets[j] - row["E"]) if j is not None else math.inf
        tol = max(cfg.tol, 1e-8)
        if len(brute) != len(levels) or any(row["verify_diff"] > tol for row in rows):
            log.error("Tamm levels disagree with the brute-force scan (%d vs %d levels)", len(levels), len(brute))
            status = EXIT_FAIL
    meta = {"command": "tamm", "comb": {"alpha": spec.alpha, "l": spec.l, "N": spec.N, "U_E": spec.U_E}}
    _emit(write_table(rows, columns, cfg.fmt, meta), cfg.output)
    return status


# -- convert ---------------------------------------------------------------------------


def _parse_matrix(doc: dict):
    try:
        kind = doc["kind"]
        m = np.array([[_parse_cplx(v) for v in row] for row in doc["matrix"]], dtype=complex)
    except (KeyError, TypeError) as exc:
        raise InputError("matrix document needs 'kind' (T|S|Z) and a 2x2 'matrix'") from exc
    if m.shape != (2, 2):
        raise InputError("matrix must be 2x2")
    if kind not in ("T", "S", "Z"):
        raise InputError(f"unknown matrix kind {kind!r}; expected T, S or Z")
    zl = _parse_cplx(doc.get("z_left", 1.0))
    zr = _parse_cplx(doc.get("z_right", zl))
    return kind, m, zl, zr


def convert_document(doc: dict) -> tuple[dict, int]:
    kind, m, zl, zr = _parse_matrix(doc)
    errors = []
    T = S = Z = None
    if kind == "T":
        T = TransferMatrix(m, zl, zr)
    elif kind == "S":
        S = ScatteringMatrix(m, zl, zr)
        try:
            T = scattering_to_transfer(S)
        except ZeroTransmissionError as exc:
            errors.append(f"S->T: {exc}")
    elif kind == "Z":
        Z = ImpedanceMatrix(m, zl, zr)
        T = impedance_matrix_to_transfer(Z)
    out: dict = {"input_kind": kind, "z_left": _cplx(zl), "z_right": _cplx(zr)}
    if T is not None:
        Z = Z if Z is not None else transfer_to_impedance_matrix(T)
        if S is None:
            try:
                S = transfer_to_scattering(T)
            except ResonanceSingularityError as exc:
                errors.append(f"T->S: {exc}")
    for name, M in (("T", T), ("S", S), ("Z", Z)):
        out[name] = _matrix_doc(M) if M is not None else None
        out[f"det_{name}"] = _cplx(M.det) if M is not None else None
    if T is not None and T.m11 != 0:
        t, r = rt_from_transfer(T)
        out["t"], out["r"] = _cplx(t), _cplx(r)
    else:
        out["t"] = out["r"] = None
    out["errors"] = errors
    return out, (EXIT_FAIL if errors else EXIT_OK)


def cmd_convert(cfg: RunConfig) -> int:
    doc = _load_json(_read(cfg.input))
    out, status = convert_document(doc)
    for e in out["errors"]:
        log.error("%s", e)
    _emit(json.dumps(out, indent=1) + "\n", cfg.output)
    return status


# -- validate ----------------------------------------------------------------------------


@dataclass
class Check:
    name: str
    tol: float
    max_error: float = 0.0
    evaluated: int = 0

    def update(self, err: float):
        self.evaluated += 1
        if not err <= self.max_error:
            self.max_error = float(err)

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tol

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "max_error": self.max_error, "tol": self.tol,
                "evaluated": self.evaluated}


def _rel(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))


def validate_system(system: System, energies, tol: float = 1e-10, inject: str | None = None) -> list[Check]:
    prof = system.profile
    u = prof.units
    checks = {
        name: Check(name, t)
        for name, t in [
            ("flux_conservation", tol),
            ("determinant", tol),
            ("interface_determinants", 1e-12),
            ("reciprocity", 1e-12 if tol < 1e-12 else tol),
            ("cross_formalism", tol),
            ("round_trip_T_S_T", 1e-12),
            ("round_trip_T_Z_T", 1e-12),
            ("det_preserved_T_Z", tol),
            ("chebyshev_power", 1e-9),
        ]
    }
    if system.comb is not None:
        checks["cell_input_impedance"] = Check("cell_input_impedance", tol)
        checks["tamm_agreement"] = Check("tamm_agreement", 1e-8)
    for E in energies:
        E = nudge(float(E), system)
        z_L = characteristic_impedance(E, prof.left_lead.potential, u)
        z_R = characteristic_impedance(E, prof.right_lead.potential, u)
        try:
            factors = profile_factors(prof, E)
            T = factors[0]
            for f in factors[1:]:
                T = T @ f
        except QWImpedanceError:
            continue
        if inject == "det":
            T = TransferMatrix(T.m * 1.01, T.z_left, T.z_right)
        for f in factors:
            # interface factors have differing end impedances; others are unimodular
            expected = f.z_right / f.z_left
            checks["interface_determinants"].update(abs(f.det - expected) / max(1.0, abs(expected)))
        checks["determinant"].update(abs(T.det - z_R / z_L) / max(1.0, abs(z_R / z_L)))
        Zm = transfer_to_impedance_matrix(T)
        checks["round_trip_T_Z_T"].update(_rel(impedance_matrix_to_transfer(Zm).m, T.m))
        checks["det_preserved_T_Z"].update(abs(Zm.det - T.det))
        propagating = z_L.real > 0 and z_R.real > 0
        S = None
        if T.m11 != 0:
            S = transfer_to_scattering(T)
            checks["round_trip_T_S_T"].update(_rel(scattering_to_transfer(S).m, T.m))
        if propagating and S is not None:
            t, r = rt_from_transfer(T)
            flux = z_R.real / z_L.real
            checks["flux_conservation"].update(abs(flux * abs(t) ** 2 + abs(r) ** 2 - 1))
        if propagating and prof.symmetric_leads and S is not None:
            checks["reciprocity"].update(abs(S.m11 - S.m22))
            for N in (2, 3, 5, 10):
                try:
                    cheb = matrix_power_chebyshev(T, N, tol=1e-6)
                except NonUnimodularError:
                    checks["chebyshev_power"].update(math.inf)
                    break
                checks["chebyshev_power"].update(_rel(cheb.m, matrix_power_bruteforce(T, N).m))
        if z_L.real > 0:
            try:
                r_z = profile_reflection(prof, E)
                checks["cross_formalism"].update(abs(r_z - rt_from_transfer(T)[1]))
            except QWImpedanceError:
                pass
        if system.comb is not None and E > 0:
            spec = system.comb
            cell = dc.comb_cell(E, spec)
            checks["chebyshev_power"].update(
                _rel(matrix_power_chebyshev(cell.transfer, spec.N).m, matrix_power_bruteforce(cell.transfer, spec.N).m)
            )
            try:
                a = input_impedance_N(cell, spec.N, z_R)
                b = input_impedance_iterative(cell, spec.N, z_R)
                checks["cell_input_impedance"].update(abs(a - b) / max(1.0, abs(b)))
            except QWImpedanceError:
                pass
    if system.comb is not None:
        spec = system.comb
        imp = [lv.energy for lv in dc.solve_tamm(spec, surface_only=False)]
        cot = [lv.energy for lv in dc.solve_cot_form(spec)]
        brute = [lv.energy for lv in dc.comb_bruteforce(spec)]
        chk = checks["tamm_agreement"]
        if not len(imp) == len(cot) == len(brute):
            chk.update(math.inf)
        else:
            for a, b, c in zip(imp, cot, brute):
                chk.update(max(abs(a - b), abs(a - c), abs(b - c)))
    return list(checks.values())


def validate_matrix(doc: dict, tol: float = 1e-10, inject: str | None = None) -> list[Check]:
    """Conversion invariants of a single T, S or Z matrix document."""
    kind, m, zl, zr = _parse_matrix(doc)
    checks = {
        name: Check(name, t)
        for name, t in [
            ("determinant", tol),
            ("round_trip_T_S_T", 1e-12),
            ("round_trip_T_Z_T", 1e-12),
            ("det_preserved_T_Z", tol),
        ]
    }
    if kind == "T":
        T = TransferMatrix(m, zl, zr)
    elif kind == "S":
        T = scattering_to_transfer(ScatteringMatrix(m, zl, zr))
    else:
        T = impedance_matrix_to_transfer(ImpedanceMatrix(m, zl, zr))
    if inject == "det":
        T = TransferMatrix(T.m * 1.01, T.z_left, T.z_right)
    checks["determinant"].update(abs(T.det - zr / zl) / max(1.0, abs(zr / zl)))
    Zm = transfer_to_impedance_matrix(T)
    checks["round_trip_T_Z_T"].update(_rel(impedance_matrix_to_transfer(Zm).m, T.m))
    checks["det_preserved_T_Z"].update(abs(Zm.det - T.det))
    if T.m11 != 0:
        checks["round_trip_T_S_T"].update(_rel(scattering_to_transfer(transfer_to_scattering(T)).m, T.m))
    return list(checks.values())


def cmd_validate(cfg: RunConfig) -> int:
    doc = _load_json(_read(cfg.input))
    if is_matrix_doc(doc):
        nudged = []
        checks = validate_matrix(doc, cfg.tol, cfg.inject)
    else:
        system = system_from_doc(doc)
        nudged = system.nudged
        checks = validate_system(system, energy_grid(system, cfg), cfg.tol, cfg.inject)
    report = {
        "command": "validate",
        "passed": all(c.passed for c in checks),
        "invariants": [c.as_dict() for c in checks],
        "nudged": nudged,
    }
    for c in checks:
        if not c.passed:
            log.error("invariant %s failed: max error %.3g > tol %.3g", c.name, c.max_error, c.tol)
    _emit(json.dumps(report, indent=1) + "\n", cfg.output)
    return EXIT_OK if report["passed"] else EXIT_FAIL


# -- entry point -------------------------------------------------------------------------

COMMANDS = {"spectrum": cmd_spectrum, "tamm": cmd_tamm, "convert": cmd_convert, "validate": cmd_validate}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qwimpedance", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--input", "-i", help="input document (JSON); '-' or omitted reads stdin")
        s.add_argument("--output", "-o", help="output path (default stdout)")
        s.add_argument("--emin", type=float)
        s.add_argument("--emax", type=float)
        s.add_argument("--grid", type=int, default=2000 if name == "tamm" else 201)
        s.add_argument("--method", choices=["transfer", "impedance", "both"], default="transfer")
        s.add_argument("--format", dest="fmt", choices=["csv", "json"], default="csv")
        s.add_argument("--tol", type=float, default=1e-10)
        s.add_argument("--verify", action="store_true", help="add the brute-force oracle column (tamm)")
        s.add_argument("--all-levels", action="store_true", help="tamm: list band states as well")
        s.add_argument("--inject", choices=["det", "residual"], help=argparse.SUPPRESS)
        s.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    cfg = RunConfig(
        command=args.command,
        input=args.input,
        emin=args.emin,
        emax=args.emax,
        grid=args.grid,
        tol=args.tol,
        fmt=args.fmt,
        method=args.method,
        verify=args.verify,
        output=args.output,
        all_levels=args.all_levels,
        inject=args.inject,
    )
    try:
        cfg.validate()
        return COMMANDS[cfg.command](cfg)
    except (InputError, ProfileError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

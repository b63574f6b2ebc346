"""Command line interface.

Commands: generate, verify, design, sweep, check2d. Settings come from an
optional flat ``key = value`` file (``--config``) and are overridden by
flags. Exit status: 0 all checks passed, 2 validation error, 3 numerical
check failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import __version__
from .design import DesignTarget, PRESET_INTERVALS, design_fixed_ground, figure1_samples, sweep_family
from .errors import NumericalError, ScaledSusyError, ValidationError
from .grid import GridFunction, GridSpec
from .intertwining import (darboux_potential_difference, ground_state_wavefunction,
                           oscillator_partner, scaled_partner)
from .potentials import Harmonic
from .riccati import (IntertwiningParams, check_oscillator_params, oscillator_alpha,
                      oscillator_superpotential, scaled_riccati_residual)
from .separable import (AxisFactorization, block_commutator_residual, combine_spectra,
                        separable_spectrum)
from .spectral import (FACTORIZATION_C, INTERTWINING_C, ShapeClass, SpectrumReport,
                       factorization_residual, gaussian_test_functions,
                       intertwining_residual, predicted_spectrum, verify_spectrum_map)

EXIT_OK, EXIT_VALIDATION, EXIT_CHECK, EXIT_IO = 0, 2, 3, 4
COMMANDS = ("generate", "verify", "design", "sweep", "check2d")
RICCATI_TOL = 1e-8
PARTNER_FORMS_TOL = 1e-10
ORDER_RATIO = 3.5
AMBIGUOUS_BAND = 0.02
FIGURE1_GRID = (-4.0, 4.0, 801)


@dataclass
class RunConfig:
    """Every setting of a run, as flat scalars."""

    command: str = "verify"
    lam: float = 0.0
    energy: float = -0.5
    nu: float = 0.0
    e0: float = -0.5
    kappa: float = 1.0
    interval: str = ""
    grid_min: float = -12.0
    grid_max: float = 12.0
    grid_n: int = 3001
    k_levels: int = 6
    tol: float = 1e-3
    out: str = "-"
    format: str = "csv"
    preset: str = ""
    energies: str = ""
    lambda_y: float = 0.0
    energy_y: float = -0.5
    nu_y: float = 0.0
    then_verify: bool = False
    unsafe_skip_validation: bool = False

    @property
    def params(self) -> IntertwiningParams:
        return IntertwiningParams(self.lam, self.energy, self.nu)

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.grid_min, self.grid_max, self.grid_n)

    @property
    def design(self) -> DesignTarget:
        interval = None
        if self.interval:
            if self.interval not in PRESET_INTERVALS:
                raise ValidationError(f"unknown interval preset {self.interval!r}")
            interval = PRESET_INTERVALS[self.interval]
        return DesignTarget(self.e0, self.kappa, interval)

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, float):
                v = repr(v)
            elif isinstance(v, bool):
                v = "true" if v else "false"
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, base: "RunConfig | None" = None) -> "RunConfig":
        cfg = cls() if base is None else cls(**asdict(base))
        types = {f.name: f.type for f in fields(cls)}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValidationError(f"config line {lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key == "lambda":
                key = "lam"
            if key not in types:
                raise ValidationError(f"config line {lineno}: unknown key {key!r}")
            setattr(cfg, key, _convert(types[key], value, key))
        return cfg


def _convert(kind, value: str, key: str):
    try:
        if kind in (float, "float"):
            return float(value)
        if kind in (int, "int"):
            return int(value)
        if kind in (bool, "bool"):
            low = value.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(value)
            return low in ("true", "1", "yes")
    except ValueError:
        raise ValidationError(f"bad value for {key}: {value!r}") from None
    return value


def validate_config(cfg: RunConfig) -> None:
    """Check every numeric setting before any computation starts."""
    if cfg.command not in COMMANDS:
        raise ValidationError(f"unknown command {cfg.command!r}")
    if cfg.format not in ("csv", "json"):
        raise ValidationError(f"format must be csv or json, got {cfg.format!r}")
    cfg.grid  # noqa: B018  (GridSpec validates)
    if cfg.k_levels < 1:
        raise ValidationError("k_levels must be >= 1")
    if not cfg.tol > 0.0:
        raise ValidationError("tol must be > 0")
    for name in ("lam", "energy", "nu", "e0", "kappa", "lambda_y", "energy_y", "nu_y"):
        if not math.isfinite(getattr(cfg, name)):
            raise ValidationError(f"{name} must be finite")
    if cfg.preset not in ("", "figure1"):
        raise ValidationError(f"unknown preset {cfg.preset!r}")
    if cfg.unsafe_skip_validation:
        return
    if cfg.command in ("generate", "verify"):
        check_oscillator_params(cfg.energy, cfg.nu)
    elif cfg.command == "design":
        cfg.design  # noqa: B018
    elif cfg.command == "check2d":
        check_oscillator_params(cfg.energy, cfg.nu)
        check_oscillator_params(cfg.energy_y, cfg.nu_y)


# -- output -----------------------------------------------------------------

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if v is None:
        return ""
    return str(v)


def render_table(columns, rows, fmt: str, meta: dict | None = None) -> str:
    if fmt == "json":
        doc = {"columns": list(columns), "rows": [dict(zip(columns, r)) for r in rows]}
        if meta:
            doc["meta"] = meta
        return json.dumps(_jsonable(doc), indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    return obj


def write_output(text: str, path: str) -> None:
    """Write ``text`` to ``path`` atomically (``-`` means stdout)."""
    if path in ("-", ""):
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- commands ---------------------------------------------------------------

def cmd_generate(cfg: RunConfig):
    """Columns x, V, alpha, V2, psi_ground on the reference grid dilated by e^-lam."""
    p = cfg.params
    g2 = cfg.grid.dilated(p.lam)
    x = g2.points()
    validate = not cfg.unsafe_skip_validation
    alpha, _ = oscillator_alpha(p, x, validate)
    v2 = oscillator_partner(p, g2, validate)
    psi = ground_state_wavefunction(GridFunction(g2, alpha))
    rows = list(zip(x, Harmonic()(x), alpha, v2.values, psi.values))
    meta = {"lambda": p.lam, "energy": p.energy, "nu": p.nu, "epsilon": p.epsilon}
    return ["x", "V", "alpha", "V2", "psi_ground"], rows, meta, EXIT_OK


def residual_bound(c: float, params: IntertwiningParams, grid: GridSpec) -> float:
    return c * max(1.0, params.scale) * grid.h**2


def _operator_checks(params, grid, validate=True):
    V = Harmonic()
    out = {}
    for label, g in (("coarse", GridSpec(grid.x_min, grid.x_max, (grid.n + 1) // 2)),
                     ("fine", grid)):
        g2 = g.dilated(params.lam)
        a, _ = oscillator_alpha(params, g2.points(), validate)
        alpha = GridFunction(g2, a)
        tests = gaussian_test_functions(g)
        r_int = intertwining_residual(V, alpha, params, tests)
        r_h, r_h2 = factorization_residual(V, alpha, params, tests)
        out[label] = (g, {"intertwining": r_int, "factorization_H": r_h,
                          "factorization_H2": r_h2})
    return out


def run_verify(cfg: RunConfig):
    """All checks for one parameter set; returns (records, spectrum report)."""
    p = cfg.params
    V = Harmonic()
    validate = not cfg.unsafe_skip_validation
    grid = cfg.grid
    records = []

    g2 = grid.dilated(p.lam)
    a, da = oscillator_alpha(p, g2.points(), validate)
    alpha, dalpha = GridFunction(g2, a), GridFunction(g2, da)
    r = scaled_riccati_residual(alpha, dalpha, V, p)
    records.append(("riccati", None, 0.0, r, RICCATI_TOL, r < RICCATI_TOL))

    f = darboux_potential_difference(V, dalpha, p.lam)
    form1 = V(g2.points()) - p.scale * f.values
    form2 = scaled_partner(V, dalpha, p.lam).values
    r = float(np.max(np.abs(form1 - form2)))
    records.append(("partner_forms", None, 0.0, r, PARTNER_FORMS_TOL, r < PARTNER_FORMS_TOL))

    checks = _operator_checks(p, grid, validate)
    gf, fine = checks["fine"]
    _, coarse = checks["coarse"]
    consts = {"intertwining": INTERTWINING_C, "factorization_H": FACTORIZATION_C,
              "factorization_H2": FACTORIZATION_C}
    for name, value in fine.items():
        bound = residual_bound(consts[name], p, gf)
        records.append((name, None, 0.0, value, bound, value < bound))
        ratio = coarse[name] / value if value > 0 else math.inf
        records.append((name + "_order", None, ORDER_RATIO, ratio, ORDER_RATIO, ratio >= ORDER_RATIO))

    report = verify_spectrum_map(V, p, cfg.k_levels, cfg.tol, grid, validate=validate)
    for row in report.rows():
        records.append(("spectrum", row["level"], row["expected"], row["computed"],
                        cfg.tol, row["passed"]))
    return records, report


def cmd_verify(cfg: RunConfig):
    try:
        records, _ = run_verify(cfg)
    except NumericalError as exc:
        rows = [("failure", None, None, None, None, False, f"{type(exc).__name__}: {exc}")]
        return ["check", "level", "expected", "value", "threshold", "passed", "detail"], rows, {}, EXIT_CHECK
    rows = [rec + ("",) for rec in records]
    ok = all(rec[5] for rec in records)
    return (["check", "level", "expected", "value", "threshold", "passed", "detail"], rows,
            {"all_passed": ok}, EXIT_OK if ok else EXIT_CHECK)


def cmd_design(cfg: RunConfig):
    target = cfg.design
    p = design_fixed_ground(target, cfg.nu)
    pred = predicted_spectrum(Harmonic(), p, cfg.k_levels)
    rows = [("lambda", p.lam), ("energy", p.energy), ("nu", p.nu), ("epsilon", p.epsilon)]
    rows += [(f"level_{i}", v) for i, v in enumerate(pred)]
    status = EXIT_OK
    meta = {}
    if cfg.then_verify:
        vcfg = RunConfig(**{**asdict(cfg), "lam": p.lam, "energy": p.energy, "nu": p.nu})
        _, vrows, vmeta, status = cmd_verify(vcfg)
        meta["verify"] = vmeta
        rows += [(f"verify_{r[0]}" + ("" if r[1] is None else f"_{r[1]}"), r[3]) for r in vrows]
        rows.append(("verify_passed", 1.0 if status == EXIT_OK else 0.0))
    return ["name", "value"], rows, meta, status


def sweep_shape_label(energy: float, shape: ShapeClass | None, ground_level: float = -0.5) -> str:
    if shape is None:
        return ""
    if ground_level == -0.5 and 0.0 < abs(energy + 0.5) < AMBIGUOUS_BAND:
        return ShapeClass.AMBIGUOUS.value
    return shape.value


def cmd_sweep(cfg: RunConfig):
    if cfg.preset == "figure1":
        e0, nu = -0.5, 0.0
        energies = figure1_samples()
        grid = GridSpec(*FIGURE1_GRID)
    else:
        e0, nu = cfg.e0, cfg.nu
        if not cfg.energies:
            raise ValidationError("sweep needs --energies or --preset figure1")
        try:
            energies = [float(s) for s in cfg.energies.split(",") if s.strip()]
        except ValueError:
            raise ValidationError(f"bad energy list {cfg.energies!r}") from None
        grid = cfg.grid
    rows_out = []
    n_ok = 0
    for row in sweep_family(e0, nu, energies, grid):
        if not row.ok:
            rows_out.append((row.energy, None, None, None, "", None, None, row.error))
            continue
        n_ok += 1
        label = sweep_shape_label(row.energy, row.shape, e0)
        for xv, vv in zip(row.x, row.v2):
            rows_out.append((row.energy, row.lam, xv, vv, label,
                             row.e0_computed, row.e1_computed, ""))
    cols = ["energy", "lambda", "x", "V2", "shape_class", "e0_computed", "e1_computed", "error"]
    return cols, rows_out, {"rows_ok": n_ok, "rows": len(energies)}, EXIT_OK if n_ok else EXIT_CHECK


def _axis(lam, energy, nu, grid, axis):
    V = Harmonic()
    a, da = oscillator_superpotential(energy, nu, grid.points())
    return AxisFactorization(GridFunction(grid, a), GridFunction(grid, da), V, energy, lam, axis)


def run_check2d(cfg: RunConfig):
    grid = cfg.grid
    ax = _axis(cfg.lam, cfg.energy, cfg.nu, grid, "x")
    ay = _axis(cfg.lambda_y, cfg.energy_y, cfg.nu_y, grid, "y")
    records = []
    tests = gaussian_test_functions(grid)
    coarse = GridSpec(grid.x_min, grid.x_max, (grid.n + 1) // 2)
    cx = _axis(0.0, cfg.energy, cfg.nu, coarse, "x")
    cy = _axis(0.0, cfg.energy_y, cfg.nu_y, coarse, "y")
    r = block_commutator_residual(ax, ay, tests, tests)
    rc = block_commutator_residual(cx, cy, gaussian_test_functions(coarse),
                                   gaussian_test_functions(coarse))
    bound = INTERTWINING_C * grid.h**2
    records.append(("block_commutator", None, 0.0, r, bound, r < bound))
    ratio = rc / r if r > 0 else math.inf
    records.append(("block_commutator_order", None, ORDER_RATIO, ratio, ORDER_RATIO, ratio >= ORDER_RATIO))

    k = cfg.k_levels
    spec = separable_spectrum(ax, ay, k, partner=True)
    px = predicted_spectrum(Harmonic(), IntertwiningParams(cfg.lam, cfg.energy, cfg.nu), k)
    py = predicted_spectrum(Harmonic(), IntertwiningParams(cfg.lambda_y, cfg.energy_y, cfg.nu_y), k)
    pred = combine_spectra(px, py, k)
    rep = SpectrumReport(pred.values, spec.values, cfg.tol)
    for row in rep.rows():
        records.append(("spectrum2d", row["level"], row["expected"], row["computed"],
                        cfg.tol, row["passed"]))
    degeneracy = ["%.10g:%d" % (v, d) for v, d in spec.levels]
    return records, degeneracy


def cmd_check2d(cfg: RunConfig):
    records, degeneracy = run_check2d(cfg)
    rows = [rec + ("",) for rec in records]
    ok = all(rec[5] for rec in records)
    meta = {"all_passed": ok, "levels_with_degeneracy": degeneracy}
    rows.append(("degeneracy", None, None, None, None, True, " ".join(degeneracy)))
    return (["check", "level", "expected", "value", "threshold", "passed", "detail"], rows,
            meta, EXIT_OK if ok else EXIT_CHECK)


HANDLERS = {"generate": cmd_generate, "verify": cmd_verify, "design": cmd_design,
            "sweep": cmd_sweep, "check2d": cmd_check2d}


# -- argument parsing -------------------------------------------------------

_FLAG_KEYS = {
    "lambda": "lam", "energy": "energy", "nu": "nu", "e0": "e0", "kappa": "kappa",
    "interval": "interval", "grid_min": "grid_min", "grid_max": "grid_max",
    "grid_n": "grid_n", "k_levels": "k_levels", "tol": "tol", "out": "out",
    "format": "format", "preset": "preset", "energies": "energies",
    "lambda_y": "lambda_y", "energy_y": "energy_y", "nu_y": "nu_y",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scaledsusy",
        description="Scaled first-order intertwining: generate, verify and design potentials.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="flat 'key = value' settings file")
    parser.add_argument("--lambda", dest="lambda", type=float)
    parser.add_argument("--energy", type=float)
    parser.add_argument("--nu", type=float)
    parser.add_argument("--e0", type=float, help="fixed ground level (design/sweep)")
    parser.add_argument("--kappa", type=float, help="excited-level factor E0/E (design)")
    parser.add_argument("--interval", choices=sorted(PRESET_INTERVALS))
    parser.add_argument("--grid-min", dest="grid_min", type=float)
    parser.add_argument("--grid-max", dest="grid_max", type=float)
    parser.add_argument("--grid-n", dest="grid_n", type=int)
    parser.add_argument("--k-levels", dest="k_levels", type=int)
    parser.add_argument("--tol", type=float)
    parser.add_argument("--out")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--preset", choices=("figure1",))
    parser.add_argument("--energies", help="comma separated energies (sweep)")
    parser.add_argument("--lambda-y", dest="lambda_y", type=float)
    parser.add_argument("--energy-y", dest="energy_y", type=float)
    parser.add_argument("--nu-y", dest="nu_y", type=float)
    parser.add_argument("--then-verify", action="store_true", help="design: verify the result")
    parser.add_argument("--unsafe-skip-validation", action="store_true",
                        help="skip parameter checks (negative controls)")
    return parser


def config_from_args(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(command=args.command)
    if args.config:
        with open(args.config) as fh:
            cfg = RunConfig.from_text(fh.read(), cfg)
        cfg.command = args.command
    for flag, key in _FLAG_KEYS.items():
        v = getattr(args, flag)
        if v is not None:
            setattr(cfg, key, v)
    if args.then_verify:
        cfg.then_verify = True
    if args.unsafe_skip_validation:
        cfg.unsafe_skip_validation = True
    return cfg


def run(cfg: RunConfig) -> int:
    validate_config(cfg)
    cols, rows, meta, status = HANDLERS[cfg.command](cfg)
    write_output(render_table(cols, rows, cfg.format, meta), cfg.out)
    return status


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
        return run(cfg)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ScaledSusyError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())

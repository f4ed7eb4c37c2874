"""Command line interface: ``clifford-doubling <command> [config.toml] [flags]``.

Flags override values read from the config file.  Exit codes: 0 success,
2 check failure, 3 numerical error, 4 configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

try:  # Python >= 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - depends on the interpreter
    import tomli as tomllib

from .driver import (EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, SCHEMA_VERSION,
                     CONVERGED, MAX_ITER, Tolerances, embeddedness_check, run_newton, run_report)
from .export import (dumps_report, force_rows, history_rows, mesh_rows, write_csv, write_json,
                     write_obj)
from .initsurf import ConstructionError, ConstructionParams, build_mesh, derive_params
from .suites import SUITES

log = logging.getLogger("clifford_doubling")

_CONSTRUCTION_KEYS = {"m", "zeta", "b", "gamma", "n_theta", "n_axial", "n_square", "c_bar",
                      "rho_target"}
_SOLVE_KEYS = set(Tolerances.__dataclass_fields__) | {"c_bar"}
_OUTPUT_KEYS = {"dir", "report", "obj", "csv", "deterministic", "tile"}


class ConfigError(ValueError):
    pass


# --- configuration ------------------------------------------------------------------

def load_config(path) -> dict:
    """Read and validate a TOML config; missing file or unknown keys raise ConfigError."""
    if path is None:
        return {"construction": {}, "solve": {}, "output": {}}
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    allowed = {"construction": _CONSTRUCTION_KEYS, "solve": _SOLVE_KEYS, "output": _OUTPUT_KEYS}
    extra = set(raw) - set(allowed)
    if extra:
        raise ConfigError(f"unknown config sections: {sorted(extra)}")
    cfg = {}
    for sec, keys in allowed.items():
        body = raw.get(sec, {})
        if not isinstance(body, dict):
            raise ConfigError(f"[{sec}] must be a table")
        bad = set(body) - keys
        if bad:
            raise ConfigError(f"unknown keys in [{sec}]: {sorted(bad)}")
        cfg[sec] = dict(body)
    return cfg


def _merge_flags(cfg: dict, args) -> dict:
    c = cfg["construction"]
    for key in ("m", "zeta", "b", "gamma", "n_theta"):
        val = getattr(args, key, None)
        if val is not None:
            c[key] = val
    out = cfg["output"]
    if getattr(args, "out", None):
        out["dir"] = args.out
    if getattr(args, "deterministic", False):
        out["deterministic"] = True
    if getattr(args, "tile", False):
        out["tile"] = True
    if getattr(args, "max_iter", None) is not None:
        cfg["solve"]["max_iter"] = args.max_iter
    return cfg


def params_from_config(cfg: dict) -> ConstructionParams:
    c = dict(cfg["construction"])
    if "m" not in c:
        raise ConfigError("[construction] m is required (or pass --m)")
    c_bar = cfg["solve"].get("c_bar", c.pop("c_bar", 10.0))
    try:
        return derive_params(c.pop("m"), c.pop("zeta", 0.0), c_bar=c_bar, **c)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def tolerances_from_config(cfg: dict) -> Tolerances:
    s = {k: v for k, v in cfg["solve"].items() if k != "c_bar"}
    try:
        return Tolerances.from_dict(s)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def parse_m_range(text: str) -> list[int]:
    """'4..16' -> [4, ..., 16]; '6,8,10' -> [6, 8, 10]."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(v) for v in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad m range {text!r}") from exc


# --- output --------------------------------------------------------------------------

def _outdir(cfg: dict) -> Path | None:
    d = cfg["output"].get("dir")
    return None if d is None else Path(d)


def _emit(payload: dict, cfg: dict, name: str) -> None:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    out = _outdir(cfg)
    if out is not None:
        write_json(payload, out / cfg["output"].get("report", f"{name}.json"))
    sys.stdout.write(dumps_report(payload))


# --- commands --------------------------------------------------------------------

def cmd_construct(args, cfg) -> int:
    params = params_from_config(cfg)
    mesh = build_mesh(params)
    emb = embeddedness_check(mesh)
    payload = {"command": "construct", "params": params.to_dict(),
               "mesh": {"n_vertices": mesh.n, "n_triangles": int(len(mesh.tri))},
               "embeddedness": emb.to_dict()}
    out = _outdir(cfg)
    if out is not None:
        write_obj(mesh, out / cfg["output"].get("obj", "initial.obj"), tile=cfg["output"].get("tile", False))
    _emit(payload, cfg, "construct")
    return EXIT_OK


def _report_command(name: str, which: list, args, cfg, options=None) -> int:
    params = params_from_config(cfg)
    report, code = run_report(params, which, options=options)
    d = report.to_dict(deterministic=cfg["output"].get("deterministic", False))
    out = _outdir(cfg)
    if out is not None:
        if report.spectrum_table:
            write_csv(report.spectrum_table, out / "spectrum.csv")
        if report.force:
            write_csv(force_rows(report.force), out / "forces.csv")
        if report.solve_history:
            write_csv(history_rows(report.solve_history), out / "convergence.csv")
    _emit({"command": name, **d}, cfg, name)
    for sec in report.sections.values():
        for c in sec.checks:
            log.info("%s %-40s %s", "PASS" if c.passed else "FAIL", f"{sec.name}: {c.name}", c.value)
    return code


def cmd_check(args, cfg) -> int:
    which = args.suites or [s for s in SUITES if s != "solve"]
    unknown = sorted(set(which) - set(SUITES))
    if unknown:
        raise ConfigError(f"unknown check suites {unknown}; choose from {', '.join(SUITES)}")
    options = {}
    if args.m_range:
        options["construction"] = {"m_values": parse_m_range(args.m_range)}
    if args.force_m:
        options["force"] = {"m_values": parse_m_range(args.force_m)}
    if "solve" in which:
        options["solve"] = {"tolerances": tolerances_from_config(cfg)}
    return _report_command("check", which, args, cfg, options)


def cmd_spectrum(args, cfg) -> int:
    return _report_command("spectrum", ["spectrum"], args, cfg,
                           {"spectrum": {"k": args.k, "models": False}})


def cmd_force(args, cfg) -> int:
    opts = {"force": {"m_values": parse_m_range(args.force_m)} if args.force_m else {}}
    return _report_command("force", ["force"], args, cfg, opts)


def cmd_solve(args, cfg) -> int:
    params = params_from_config(cfg)
    state = run_newton(params, tolerances_from_config(cfg))
    surf = state.perturbed if state.perturbed is not None else state.mesh
    emb = embeddedness_check(surf)
    d = state.to_dict()
    if cfg["output"].get("deterministic", False):
        d.pop("timings")
    payload = {"command": "solve", "params": params.to_dict(), "state": d,
               "embeddedness": emb.to_dict()}
    out = _outdir(cfg)
    if out is not None:
        write_csv(history_rows(d["history"]), out / "convergence.csv")
        write_obj(surf, out / cfg["output"].get("obj", "solved.obj"), tile=cfg["output"].get("tile", False))
    _emit(payload, cfg, "solve")
    if state.status not in (CONVERGED, MAX_ITER):
        return EXIT_NUMERICAL
    ok = state.reduction >= 1e3 and emb.embedded
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_export(args, cfg) -> int:
    params = params_from_config(cfg)
    out = _outdir(cfg) or Path(".")
    tile = cfg["output"].get("tile", False)
    phi = None
    if args.solved:
        state = run_newton(params, tolerances_from_config(cfg))
        surf = state.perturbed if state.perturbed is not None else state.mesh
        phi = state.phi.values
    else:
        surf = build_mesh(params)
    obj = write_obj(surf, out / cfg["output"].get("obj", "surface.obj"), tile=tile)
    csv_path = write_csv(mesh_rows(surf, phi), out / cfg["output"].get("csv", "vertices.csv"))
    _emit({"command": "export", "params": params.to_dict(), "obj": str(obj), "csv": str(csv_path)},
          cfg, "export")
    return EXIT_OK


# --- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", nargs="?", help="TOML config file")
    common.add_argument("--m", type=int, help="lattice size")
    common.add_argument("--zeta", type=float)
    common.add_argument("--b", type=float)
    common.add_argument("--gamma", type=float)
    common.add_argument("--n-theta", dest="n_theta", type=int, help="angular resolution")
    common.add_argument("--out", help="output directory")
    common.add_argument("--deterministic", action="store_true",
                        help="omit timings so repeated runs give identical JSON")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="clifford-doubling",
                                description="Doubling of the Clifford torus: construction and checks.")
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("construct", parents=[common], help="build the initial surface")
    c.add_argument("--tile", action="store_true", help="export all m^2 cells")
    c.set_defaults(func=cmd_construct)
    c = sub.add_parser("check", parents=[common], help="run check suites")
    c.add_argument("suites", nargs="*", metavar="SUITE",
                   help=f"any of {', '.join(SUITES)} (default: all but solve)")
    c.add_argument("--m-range", help="m values for the construction bounds, e.g. 4..16")
    c.add_argument("--force-m", help="m values for the force slope, e.g. 8,10")
    c.set_defaults(func=cmd_check)
    c = sub.add_parser("spectrum", parents=[common], help="low spectrum of -L_h")
    c.add_argument("--k", type=int, default=6)
    c.set_defaults(func=cmd_spectrum)
    c = sub.add_parser("force", parents=[common], help="vertical force diagnostics")
    c.add_argument("--force-m", help="m values for the force slope, e.g. 8,10")
    c.set_defaults(func=cmd_force)
    c = sub.add_parser("solve", parents=[common], help="run the outer Newton loop")
    c.add_argument("--max-iter", dest="max_iter", type=int)
    c.add_argument("--tile", action="store_true")
    c.set_defaults(func=cmd_solve)
    c = sub.add_parser("export", parents=[common], help="write OBJ and CSV for a surface")
    c.add_argument("--solved", action="store_true", help="export the solved surface")
    c.add_argument("--max-iter", dest="max_iter", type=int)
    c.add_argument("--tile", action="store_true")
    c.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    from .geomq import LinearizationError, PerturbationError
    from .specsolve import NumericalError, OperatorError, PreconditionError

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.command == "check" and args.config in SUITES and not Path(args.config).exists():
        # `check ambient` without a config file: the first word names a suite
        args.suites.insert(0, args.config)
        args.config = None
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = _merge_flags(load_config(args.config), args)
        return args.func(args, cfg)
    except (ConfigError, ConstructionError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, PerturbationError, LinearizationError, OperatorError,
            PreconditionError, ArithmeticError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

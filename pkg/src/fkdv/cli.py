"""Command-line front end.

    fkdv evolve      --config run.yaml   --out DIR
    fkdv groundstate --config gs.yaml    --out DIR
    fkdv linear      --config lin.yaml   --out DIR
    fkdv scenario NAME [--config over.yaml] --out DIR

Exit codes: 0 success, 1 configuration error (or unknown scenario),
2 blow-up abort, 3 a scenario or solver that ran but did not pass.
Every output directory receives exactly one ``manifest.json``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from importlib import metadata
from pathlib import Path

import numpy as np

from . import diagnostics as diag
from .groundstate import petviashvili_solve, verify_decay, write_profile_csv
from .io import (ConfigError, build_data, check_keys, config_hash, load_yaml, parse_grid,
                 parse_model, parse_stepper, require, write_snapshot)
from .propagator import BlowUpError, apply_group, evolve
from .scenarios import default_config, parse_scenario_config, resolve_name, SCENARIOS

__all__ = ["main", "cmd_evolve", "cmd_groundstate", "cmd_scenario", "cmd_linear",
           "EXIT_OK", "EXIT_CONFIG", "EXIT_BLOWUP", "EXIT_FAILED"]

EXIT_OK, EXIT_CONFIG, EXIT_BLOWUP, EXIT_FAILED = 0, 1, 2, 3

log = logging.getLogger("fkdv")


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


class _Job:
    """Collects manifest fields; the manifest is written once, on exit."""

    def __init__(self, command: str, config_path, out_dir):
        self.t0 = time.perf_counter()
        self.out = Path(out_dir)
        self.manifest = {
            "command": command,
            "config_path": str(config_path) if config_path is not None else None,
            "output_dir": str(out_dir),
            "version": _version(),
            "config_sha256": None,
            "status": "failed",
            "exit_code": EXIT_FAILED,
            "blowup_time": None,
            "outputs": [],
            "message": "",
        }

    def output(self, name: str) -> Path:
        self.manifest["outputs"].append(name)
        return self.out / name

    def finish(self, code: int, status: str, message: str = "") -> int:
        self.manifest["exit_code"] = code
        self.manifest["status"] = status
        self.manifest["message"] = message
        self.manifest["wall_time"] = time.perf_counter() - self.t0
        try:
            self.out.mkdir(parents=True, exist_ok=True)
            (self.out / "manifest.json").write_text(json.dumps(self.manifest, indent=2) + "\n")
        except OSError as err:
            log.error("cannot write manifest in %s: %s", self.out, err)
        return code


def _load(job: _Job, path) -> dict:
    tree, digest = load_yaml(path)
    job.manifest["config_sha256"] = digest
    return tree


def _diagnostics_section(tree) -> tuple[tuple, tuple]:
    sec = check_keys(tree.get("diagnostics", {}), "diagnostics", (), ("weights", "sobolev"))
    weights = tuple(float(r) for r in sec.get("weights", (0.0, 1.0)))
    sobolev = tuple(float(s) for s in sec.get("sobolev", (0.0, 1.0)))
    return weights, sobolev


def _run(job: _Job, body) -> int:
    try:
        return body()
    except ConfigError as err:
        log.error("config error: %s", err)
        return job.finish(EXIT_CONFIG, "config_error", str(err))
    except BlowUpError as err:
        return job.finish(EXIT_BLOWUP, "blow_up", str(err))
    except Exception as err:  # recorded in the manifest, then re-raised
        job.finish(EXIT_FAILED, "failed", f"{type(err).__name__}: {err}")
        raise


def cmd_evolve(config_path, out_dir) -> int:
    """Nonlinear run: ``diagnostics.csv``, ``final_state.bin``, ``manifest.json``."""
    job = _Job("evolve", config_path, out_dir)

    def body():
        tree = _load(job, config_path)
        check_keys(tree, "", ("model", "grid", "stepper", "data"), ("diagnostics",))
        params = parse_model(tree["model"])
        grid = parse_grid(tree["grid"], params.d)
        stepper = parse_stepper(tree["stepper"])
        weights, sobolev = _diagnostics_section(tree)
        u0 = build_data(tree["data"], grid, params, base_dir=Path(config_path).parent)
        job.out.mkdir(parents=True, exist_ok=True)
        try:
            traj = evolve(u0, params, stepper, weights=weights, sobolev_orders=sobolev)
        except BlowUpError as err:
            diag.write_records_csv(job.output("diagnostics.csv"), getattr(err, "records", []))
            job.manifest["blowup_time"] = err.t
            log.error("blow-up at t=%g", err.t)
            raise
        diag.write_records_csv(job.output("diagnostics.csv"), traj.records)
        write_snapshot(job.output("final_state.bin"), traj.final, params.a)
        first, last = traj.records[0], traj.records[-1]
        log.info("t=%g  I2 drift %.3e", last.t, abs(last.I2 - first.I2) / max(first.I2, 1e-300))
        return job.finish(EXIT_OK, "ok")

    return _run(job, body)


def cmd_groundstate(config_path, out_dir) -> int:
    """Petviashvili profile: ``profile.csv``, ``final_state.bin``, ``report.json``."""
    job = _Job("groundstate", config_path, out_dir)

    def body():
        tree = _load(job, config_path)
        check_keys(tree, "", ("model", "grid"), ("solver", "decay"))
        params = parse_model(tree["model"])
        grid = parse_grid(tree["grid"], params.d)
        sec = check_keys(tree.get("solver", {}), "solver", (), ("c", "tol", "max_iter"))
        dec = check_keys(tree.get("decay", {}), "decay", (), ("window",))
        try:
            res = petviashvili_solve(params, float(sec.get("c", 1.0)), grid=grid,
                                     tol=float(sec.get("tol", 1e-10)),
                                     max_iter=int(sec.get("max_iter", 500)))
        except ValueError as err:
            raise ConfigError(str(err)) from err
        job.out.mkdir(parents=True, exist_ok=True)
        write_profile_csv(job.output("profile.csv"), res.Q)
        write_snapshot(job.output("final_state.bin"), res.Q, params.a)
        report = {"converged": res.converged, "c": res.c, "residual": res.residual,
                  "iterations": res.iterations, "stabilizer": res.stabilizer,
                  "tail_exponent": diag_number(res.tail_exponent), "message": res.message}
        if res.converged:
            window = dec.get("window")
            rep = verify_decay(res, tuple(window) if window else None)
            report["decay"] = {"exponent": diag_number(rep.exponent), "expected": rep.expected,
                               "lower_constant": diag_number(rep.lower_constant),
                               "upper_constant": diag_number(rep.upper_constant),
                               "super_polynomial": rep.super_polynomial, "passed": rep.passed,
                               "window": list(rep.window), "message": rep.message}
        job.output("report.json").write_text(json.dumps(report, indent=2) + "\n")
        if not res.converged:
            return job.finish(EXIT_FAILED, "not_converged", res.message)
        return job.finish(EXIT_OK, "ok")

    return _run(job, body)


def diag_number(v):
    v = float(v)
    return v if np.isfinite(v) else str(v)


def cmd_linear(config_path, out_dir) -> int:
    """Free flow at listed times: ``diagnostics.csv``, ``final_state.bin``."""
    job = _Job("linear", config_path, out_dir)

    def body():
        tree = _load(job, config_path)
        check_keys(tree, "", ("model", "grid", "data", "times"), ("diagnostics",))
        params = parse_model(tree["model"], need_nonlinearity=False)
        grid = parse_grid(tree["grid"], params.d)
        times = require(tree, "times")
        if not isinstance(times, list) or not times:
            raise ConfigError("times must be a non-empty list")
        times = [float(t) for t in times]
        weights, sobolev = _diagnostics_section(tree)
        f = build_data(tree["data"], grid, params, base_dir=Path(config_path).parent)
        records = []
        u = f
        for t in times:
            u = apply_group(f, t, params.a)
            records.append(diag.make_record(u, params, t, weights, sobolev))
        job.out.mkdir(parents=True, exist_ok=True)
        diag.write_records_csv(job.output("diagnostics.csv"), records)
        write_snapshot(job.output("final_state.bin"), u, params.a)
        return job.finish(EXIT_OK, "ok")

    return _run(job, body)


def cmd_scenario(name, config_path, out_dir) -> int:
    """Run a named protocol; exit 0 iff the report passes."""
    job = _Job(f"scenario {name}", config_path, out_dir)

    def body():
        try:
            key = resolve_name(name)
        except KeyError as err:
            raise ConfigError(err.args[0]) from None
        if config_path is not None:
            tree = _load(job, config_path)
        else:
            tree = {}
            job.manifest["config_sha256"] = config_hash(default_config(key))
        cfg = parse_scenario_config(key, tree)
        try:
            report = SCENARIOS[key](cfg)
        except ValueError as err:
            raise ConfigError(str(err)) from err
        job.out.mkdir(parents=True, exist_ok=True)
        report.write(job.out)
        job.manifest["outputs"].extend(report.artifacts)
        if not report.passed:
            return job.finish(EXIT_FAILED, "scenario_failed")
        return job.finish(EXIT_OK, "ok")

    return _run(job, body)


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which here means blow-up
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fkdv", description="Fractional KdV spectral laboratory")
    parser.add_argument("--version", action="version", version=_version())
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="YAML configuration file")
        p.add_argument("--out", default="fkdv-out", help="output directory (default: fkdv-out)")
        p.add_argument("--quiet", action="store_true", help="only report errors")

    common(sub.add_parser("evolve", help="nonlinear evolution"))
    common(sub.add_parser("groundstate", help="solitary-wave profile"))
    common(sub.add_parser("linear", help="free linear flow"))
    p = sub.add_parser("scenario", help="named experiment protocol")
    p.add_argument("name", help="one of: " + ", ".join(sorted(SCENARIOS)))
    common(p, config_required=False)
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO,
                        format="%(levelname)s %(message)s", stream=sys.stderr, force=True)
    if args.command == "evolve":
        code = cmd_evolve(args.config, args.out)
    elif args.command == "groundstate":
        code = cmd_groundstate(args.config, args.out)
    elif args.command == "linear":
        code = cmd_linear(args.config, args.out)
    else:
        code = cmd_scenario(args.name, args.config, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())

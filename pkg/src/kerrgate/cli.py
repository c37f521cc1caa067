"""Command-line front end.

Subcommands: ``gate``, ``entangle``, ``feasibility``, ``sweep`` (named
recipes) and ``replay`` (re-run a manifest).  Exit codes: 0 success,
2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .config import RunConfig, load_config
from .entangle import FORMULAS, EntConfig, entanglement_fidelity, sweep_ent
from .errors import ConfigError, NumericalError, ParameterError
from .gate import ESTIMATORS, GateConfig, process_metrics, sweep_gate
from .output import (
    ENT_COLUMNS,
    GATE_COLUMNS,
    dump_json,
    feasibility_report,
    make_manifest,
    render_csv,
    write_text,
)
from .params import PRESET_NAMES
from .pulse import DEFAULT_MAX_NODES, DEFAULT_NODES, DEFAULT_TOL, WINDOW_HALF_WIDTH

EXIT_USAGE = 2
EXIT_NUMERICAL = 3

QUADRATURE_SETTINGS = {
    "scheme": "gauss-legendre-panels",
    "nodes_per_panel": DEFAULT_NODES,
    "tol": DEFAULT_TOL,
    "max_nodes": DEFAULT_MAX_NODES,
    "window_half_width_sigma": WINDOW_HALF_WIDTH,
}

RECIPES = {
    "fig3": {"kind": "gate", "eta_norm": (2.2, 4.2), "sweep": "kappa:0.5:1.0:0.005"},
    "fig4a": {"kind": "entangle", "eta_norm_alpha": 3.0, "sweep": "kappa:0.5:1.0:0.005"},
    "fig4b": {"kind": "entangle", "kappa_ratio": 0.99, "sweep": "eta-alpha:2:6:0.01"},
}

KITTEN_COLUMNS = (("p_minus", "dimensionless"), ("F_kitten_minus", "dimensionless"))


class UsageError(Exception):
    pass


def parse_sweep(text: str, axes) -> dict:
    """``axis:lo:hi:step`` -> dict; the grid is lo, lo+step, ... <= hi."""
    parts = text.split(":")
    if len(parts) != 4:
        raise UsageError(f"--sweep expects axis:lo:hi:step, got {text!r}")
    axis = parts[0].replace("-", "_")
    if axis not in axes:
        raise UsageError(f"unknown sweep axis {parts[0]!r}; choose from {', '.join(axes)}")
    try:
        lo, hi, step = (float(p) for p in parts[1:])
    except ValueError:
        raise UsageError(f"--sweep bounds must be numbers, got {text!r}") from None
    if not step > 0 or not all(math.isfinite(v) for v in (lo, hi, step)):
        raise UsageError("--sweep step must be positive and bounds finite")
    return {"axis": axis, "lo": lo, "hi": hi, "step": step}


def sweep_grid(sweep: dict) -> list[float]:
    lo, hi, step = sweep["lo"], sweep["hi"], sweep["step"]
    if hi < lo:
        return []
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(count)]


# ---------------------------------------------------------------------------
# parameter resolution


def _from_config(args) -> RunConfig:
    if getattr(args, "config", None):
        try:
            return load_config(args.config)
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config!r}: {exc.strerror}") from None
    return RunConfig()


def _check_grid(config, sweep):
    """Reject sweep points outside the valid parameter range before any work."""
    if not sweep:
        return
    name = "kappa_ratio" if sweep["axis"] == "kappa" else "eta_norm_alpha"
    for x in sweep_grid(sweep):
        try:
            type(config)(**{**asdict(config), name: x})
        except ParameterError as exc:
            raise UsageError(f"sweep point {x}: {exc}") from None


def _pick(flag, configured, default):
    if flag is not None:
        return flag
    if configured is not None:
        return configured
    return default


def _coupling(args, cfg: RunConfig) -> float:
    ratio = _pick(args.kappa_ratio, cfg.kappa_ratio, None)
    if args.kappa_io_ratio is not None:
        if not 0 <= args.kappa_io_ratio < 1:
            raise UsageError("--kappa-io-ratio must lie in [0, 1)")
        if ratio is None:
            ratio = 1.0 - args.kappa_io_ratio
        elif abs(ratio + args.kappa_io_ratio - 1.0) > 1e-9:
            raise UsageError("--kappa-ratio and --kappa-io-ratio must add up to 1 (kappa_o = kappa_eo + kappa_io)")
    if ratio is None:
        ratio = 0.99
    if not 0 < ratio <= 1:
        raise UsageError(f"--kappa-ratio must lie in (0, 1], got {ratio}")
    return float(ratio)


def _detuning(cfg: RunConfig):
    return "minus_eta" if cfg.delta_in is None else cfg.delta_in


def resolve_gate(args) -> GateConfig:
    cfg = _from_config(args)
    try:
        return GateConfig(
            kappa_ratio=_coupling(args, cfg),
            eta_norm=float(_pick(args.eta_norm, cfg.eta_norm, 2.2)),
            sigma_omega=float(_pick(args.sigma_omega, cfg.sigma_omega, 0.2)),
            correct_backaction=bool(args.correct_backaction or cfg.correct_backaction),
            estimator=_pick(args.estimator, cfg.estimator, "pure_choi"),
            detuning_rule=_detuning(cfg),
        )
    except ParameterError as exc:
        raise UsageError(str(exc)) from None


def resolve_entangle(args) -> EntConfig:
    cfg = _from_config(args)
    try:
        return EntConfig(
            alpha=complex(_pick(args.alpha, cfg.alpha, 1.0)),
            kappa_ratio=_coupling(args, cfg),
            eta_norm_alpha=float(_pick(args.eta_alpha, cfg.eta_norm_alpha, 3.0)),
            sigma_omega=float(_pick(args.sigma_omega, cfg.sigma_omega, 0.2)),
            formula=_pick(args.formula, cfg.formula, "paper_literal"),
            detuning_rule=_detuning(cfg),
        )
    except ParameterError as exc:
        raise UsageError(str(exc)) from None


def _params(config) -> dict:
    out = asdict(config)
    if "alpha" in out:
        a = complex(out["alpha"])
        out["alpha"] = [a.real, a.imag]
    return out


def _gate_from_params(p: dict) -> GateConfig:
    return GateConfig(**p)


def _ent_from_params(p: dict) -> EntConfig:
    p = dict(p)
    p["alpha"] = complex(*p["alpha"])
    return EntConfig(**p)


# ---------------------------------------------------------------------------
# runners shared by direct invocation and replay


def _emit(text: str, out: str | None):
    if out:
        write_text(out, text)
    else:
        sys.stdout.write(text)


def _manifest_path(out, manifest):
    if manifest:
        return manifest
    if out:
        return str(out) + ".manifest.json"
    return None


def _write_manifest(command, params, sweep, out, manifest):
    path = _manifest_path(out, manifest)
    if path:
        doc = make_manifest(command, params, sweep, {"data": None if out is None else str(out)}, QUADRATURE_SETTINGS)
        write_text(path, dump_json(doc))


def run_gate(config: GateConfig, sweep, out=None, manifest=None, jobs=1):
    if sweep:
        rows = sweep_gate(config, sweep_grid(sweep), jobs=jobs)
        text = render_csv(rows, GATE_COLUMNS)
    else:
        m = process_metrics(config)
        by_est = {}
        for est in ESTIMATORS:
            other = process_metrics(GateConfig(**{**asdict(config), "estimator": est}))
            by_est[est] = {"F_G": other.F_G, "D_G": other.D_G}
        report = {
            "F_G": m.F_G,
            "D_G": m.D_G,
            "success_trace": m.success_trace,
            "theta_mu_over_2pi": m.theta_mu_over_2pi,
            "estimator": m.estimator,
            "correct_backaction": m.correct_backaction,
            "correction_phase": m.correction_phase,
            "by_estimator": by_est,
            "params": _params(config),
        }
        text = dump_json(report)
    _emit(text, out)
    _write_manifest("gate", _params(config), sweep, out, manifest)
    return text


def run_entangle(config: EntConfig, sweep, out=None, manifest=None, jobs=1, kitten=False):
    if sweep:
        rows = sweep_ent(config, sweep["axis"], sweep_grid(sweep), jobs=jobs)
        columns = ENT_COLUMNS
        if kitten:
            columns = ENT_COLUMNS + KITTEN_COLUMNS
            for row in rows:
                m = entanglement_fidelity(_point_config(config, sweep["axis"], row["x_value"]))
                row["p_minus"] = m.p_minus
                row["F_kitten_minus"] = m.F_kitten_minus
        text = render_csv(rows, columns)
    else:
        m = entanglement_fidelity(config)
        report = {
            "F_ent": m.F_ent,
            "theta": m.theta,
            "theta_over_2pi": m.theta_over_2pi,
            "formula": m.formula,
            "F_ent_paper_literal": m.F_ent_paper_literal,
            "F_ent_multimode": m.F_ent_multimode,
            "params": _params(config),
        }
        if kitten:
            report.update(
                p_plus=m.p_plus,
                p_minus=m.p_minus,
                F_kitten_plus=m.F_kitten_plus,
                F_kitten_minus=m.F_kitten_minus,
            )
        text = dump_json(report)
    _emit(text, out)
    params = _params(config)
    params["kitten"] = kitten
    _write_manifest("entangle", params, sweep, out, manifest)
    return text


def _point_config(config: EntConfig, axis: str, x: float) -> EntConfig:
    fields = asdict(config)
    fields["kappa_ratio" if axis == "kappa" else "eta_norm_alpha"] = x
    return EntConfig(**fields)


def run_recipe(name: str, outdir: str, jobs=1, estimator="pure_choi", sigma_omega=0.2):
    recipe = RECIPES[name]
    outdir = Path(outdir)
    data = outdir / f"{name}.csv"
    sweep = parse_sweep(recipe["sweep"], ("kappa", "eta_alpha"))
    if recipe["kind"] == "gate":
        rows = []
        for eta in recipe["eta_norm"]:
            cfg = GateConfig(eta_norm=eta, sigma_omega=sigma_omega, estimator=estimator)
            rows.extend(sweep_gate(cfg, sweep_grid(sweep), jobs=jobs))
        text = render_csv(rows, GATE_COLUMNS)
    else:
        cfg = EntConfig(
            kappa_ratio=recipe.get("kappa_ratio", 0.99),
            eta_norm_alpha=recipe.get("eta_norm_alpha", 3.0),
            sigma_omega=sigma_omega,
        )
        text = render_csv(sweep_ent(cfg, sweep["axis"], sweep_grid(sweep), jobs=jobs), ENT_COLUMNS)
    write_text(data, text)
    params = {"recipe": name, "estimator": estimator, "sigma_omega": sigma_omega}
    doc = make_manifest("sweep", params, sweep, {"data": str(data)}, QUADRATURE_SETTINGS)
    write_text(outdir / f"{name}.manifest.json", dump_json(doc))
    return data


def replay(manifest_path, out=None, jobs=1):
    doc = json.loads(Path(manifest_path).read_text(encoding="utf-8"))
    command, params, sweep = doc["command"], dict(doc["params"]), doc.get("sweep")
    target = out or doc["outputs"]["data"]
    if command == "gate":
        return run_gate(_gate_from_params(params), sweep, out=target, jobs=jobs)
    if command == "entangle":
        kitten = params.pop("kitten", False)
        return run_entangle(_ent_from_params(params), sweep, out=target, jobs=jobs, kitten=kitten)
    if command == "sweep":
        outdir = out if out else Path(doc["outputs"]["data"]).parent
        return run_recipe(params["recipe"], outdir, jobs, params["estimator"], params["sigma_omega"])
    raise UsageError(f"manifest names unknown command {command!r}")


# ---------------------------------------------------------------------------
# argument parsing


def _add_cavity_flags(p):
    p.add_argument("--config", help="YAML configuration file with explicit units")
    p.add_argument("--kappa-ratio", type=float, help="kappa_eo / kappa_o (default 0.99)")
    p.add_argument("--kappa-io-ratio", type=float, help="kappa_io / kappa_o; must equal 1 - kappa ratio (default 0.01)")
    p.add_argument("--sigma-omega", type=float, help="pulse bandwidth in kappa_o units (default 0.2)")
    p.add_argument("--out", help="output path (CSV for sweeps, JSON otherwise)")
    p.add_argument("--manifest", help="manifest path (default: <out>.manifest.json)")
    p.add_argument("--jobs", type=int, default=1, help="worker threads for sweeps")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kerrgate", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gate", help="controlled-Z gate fidelity and distance")
    _add_cavity_flags(g)
    g.add_argument("--eta-norm", type=float, help="4 eta / (2 pi kappa_o) (default 2.2)")
    g.add_argument("--correct-backaction", action="store_true", default=False)
    g.add_argument("--estimator", choices=ESTIMATORS)
    g.add_argument("--sweep", help="kappa:lo:hi:step")

    e = sub.add_parser("entangle", help="hybrid entanglement fidelity and kitten projection")
    _add_cavity_flags(e)
    e.add_argument("--eta-alpha", type=float, help="4 eta |alpha|^2 / (2 pi kappa_o) (default 3.0)")
    e.add_argument("--alpha", type=complex, help="coherent amplitude (default 1)")
    e.add_argument("--formula", choices=FORMULAS)
    e.add_argument("--kitten", action="store_true", help="add kitten projection outputs")
    e.add_argument("--sweep", help="kappa:lo:hi:step or eta-alpha:lo:hi:step")

    f = sub.add_parser("feasibility", help="interaction strength for a physical platform")
    f.add_argument("preset", choices=PRESET_NAMES)
    f.add_argument("--estimator", choices=ESTIMATORS, default="pure_choi")
    f.add_argument("--out", help="write the JSON report here as well")

    s = sub.add_parser("sweep", help="emit the data table of a named recipe")
    s.add_argument("recipe", choices=sorted(RECIPES))
    s.add_argument("--out", default=".", help="output directory")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--estimator", choices=ESTIMATORS, default="pure_choi")
    s.add_argument("--sigma-omega", type=float, default=0.2)

    r = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    r.add_argument("manifest")
    r.add_argument("--out", help="override the recorded data path")
    r.add_argument("--jobs", type=int, default=1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")

    try:
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be at least 1")
        if args.command == "gate":
            config = resolve_gate(args)
            sweep = parse_sweep(args.sweep, ("kappa",)) if args.sweep else None
            _check_grid(config, sweep)
            task = lambda: run_gate(config, sweep, args.out, args.manifest, args.jobs)  # noqa: E731
        elif args.command == "entangle":
            config = resolve_entangle(args)
            sweep = parse_sweep(args.sweep, ("kappa", "eta_alpha")) if args.sweep else None
            _check_grid(config, sweep)
            task = lambda: run_entangle(config, sweep, args.out, args.manifest, args.jobs, args.kitten)  # noqa: E731
        elif args.command == "feasibility":
            task = lambda: _feasibility(args)  # noqa: E731
        elif args.command == "sweep":
            if not args.sigma_omega > 0:
                raise UsageError("--sigma-omega must be positive")
            task = lambda: print(run_recipe(args.recipe, args.out, args.jobs, args.estimator, args.sigma_omega))  # noqa: E731
        else:
            if not Path(args.manifest).is_file():
                raise UsageError(f"manifest {args.manifest!r} not found")
            task = lambda: replay(args.manifest, args.out, args.jobs)  # noqa: E731
    except (UsageError, ConfigError) as exc:
        parser.error(str(exc))

    try:
        task()
    except (NumericalError, ParameterError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        estimates = getattr(exc, "estimates", ())
        if estimates:
            print(f"last estimates: {estimates}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (UsageError, ConfigError) as exc:
        parser.error(str(exc))
    return 0


def _feasibility(args):
    report = feasibility_report(args.preset, estimator=args.estimator)
    text = dump_json(report)
    sys.stdout.write(text)
    if args.out:
        write_text(args.out, text)
    if report["discrepancy_flag"]:
        print(f"WARNING: discrepancy flagged: {report['discrepancy_note']}", file=sys.stderr)


if __name__ == "__main__":
    raise SystemExit(main())

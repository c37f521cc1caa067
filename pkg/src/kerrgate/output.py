"""CSV tables, JSON manifests and the feasibility report."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from . import __version__
from .gate import ESTIMATORS, GateConfig, evaluate_gate
from .params import KerrCoupling, eta_from_ensemble, eta_norm, preset_record

GATE_COLUMNS = (
    ("kappa_ratio", "kappa_o_units"),
    ("eta_norm", "dimensionless"),
    ("F_G", "dimensionless"),
    ("D_G", "dimensionless"),
    ("F_G_corrected", "dimensionless"),
    ("success_trace", "dimensionless"),
    ("theta_mu_over_2pi", "radians_over_2pi"),
    ("estimator", "label"),
)

ENT_COLUMNS = (
    ("x_name", "label"),
    ("x_value", "kappa_o_units_or_dimensionless"),
    ("theta_over_2pi", "radians_over_2pi"),
    ("F_ent_paper_literal", "dimensionless"),
    ("F_ent_multimode", "dimensionless"),
    ("p_plus", "dimensionless"),
    ("F_kitten_plus", "dimensionless"),
)

DISCREPANCY_FACTOR = 3.0


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(rows, columns) -> str:
    """Two header rows (names, then units) followed by the data."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([name for name, _ in columns])
    writer.writerow([unit for _, unit in columns])
    for row in rows:
        writer.writerow([_cell(row[name]) for name, _ in columns])
    return buf.getvalue()


def write_text(path, text: str) -> Path:
    path = Path(path)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def read_csv(path) -> list[dict]:
    """Parse a table written by :func:`render_csv` (units row skipped)."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        names = next(reader)
        next(reader)
        return [dict(zip(names, line)) for line in reader]


def make_manifest(command: str, params: dict, sweep: dict | None, outputs: dict, quadrature: dict) -> dict:
    return {
        "artifact_version": __version__,
        "command": command,
        "params": params,
        "sweep": sweep,
        "quadrature": quadrature,
        "outputs": outputs,
    }


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def feasibility_report(name: str, estimator: str = "pure_choi", kappa_ratio: float = 0.99) -> dict:
    """Literal interaction strength for a preset next to the claimed value.

    A ratio outside ``[1/3, 3]`` between the literal and the claimed
    ``4 eta / (2 pi kappa_o)`` sets ``discrepancy_flag``; nothing is adjusted.
    """
    rec = preset_record(name)
    cav, ens = rec.cavity, rec.ensemble
    eta = eta_from_ensemble(ens)
    literal = eta_norm(eta, cav.kappa_o)
    ratio = abs(literal) / rec.claimed_eta_norm
    flagged = not (1 / DISCREPANCY_FACTOR <= ratio <= DISCREPANCY_FACTOR)

    def fidelity(norm_value):
        cfg = GateConfig(kappa_ratio=kappa_ratio, eta_norm=norm_value, estimator=estimator)
        m = evaluate_gate(*cfg.physical(), estimator=estimator)
        return {"F_G": m.F_G, "D_G": m.D_G, "theta_mu_over_2pi": m.theta_mu_over_2pi}

    by_estimator = {}
    for est in ESTIMATORS:
        cfg = GateConfig(kappa_ratio=kappa_ratio, eta_norm=rec.claimed_eta_norm, estimator=est)
        m = evaluate_gate(*cfg.physical(), estimator=est)
        by_estimator[est] = {"F_G": m.F_G, "D_G": m.D_G}

    note = (
        f"literal |4 eta/(2 pi kappa_o)| = {abs(literal):.4g} vs claimed {rec.claimed_eta_norm}"
        f" (ratio {ratio:.3g})"
    )
    return {
        "preset": rec.name,
        "platform": rec.notes.get("platform", ""),
        "N_a": ens.N_a,
        "Delta_over_2pi_Hz": ens.Delta / (2 * math.pi),
        "kappa_o_over_2pi_Hz": cav.kappa_o / (2 * math.pi),
        "kappa_mu_over_kappa_eo": cav.kappa_mu / cav.kappa_eo,
        "eta_literal_rad_per_s": eta,
        "eta_literal_over_2pi_Hz": eta / (2 * math.pi),
        "eta_norm_literal": literal,
        "eta_norm_claimed": rec.claimed_eta_norm,
        "ratio_literal_over_claimed": ratio,
        "discrepancy_flag": flagged,
        "discrepancy_note": note,
        "kappa_ratio": kappa_ratio,
        "estimator": estimator,
        "gate_at_claimed": fidelity(rec.claimed_eta_norm),
        "gate_at_literal": fidelity(literal),
        "gate_at_claimed_by_estimator": by_estimator,
        "eta_claimed_rad_per_s": KerrCoupling.from_norm(rec.claimed_eta_norm, cav.kappa_o).eta_plus,
    }

"""YAML run configuration with explicit units on every rate.

Example::

    cavity:
      kappa_eo: 9.9 MHz
      kappa_io: {value: 0.1, unit: MHz}
    kerr:
      eta_norm: 2.2              # 4 eta / (2 pi kappa_o), dimensionless
    pulse:
      sigma_omega: 0.2 kappa_o_units
      alpha: 1.0
    run:
      estimator: pure_choi

Frequency units ``Hz``/``kHz``/``MHz``/``GHz`` are cyclic (the value is
omega / 2 pi); ``rad_per_s`` is angular; ``kappa_o_units`` is relative to the
total bad-cavity linewidth.  Everything is converted to kappa_o units here
and nowhere else.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, fields
from pathlib import Path

import yaml

from .errors import ConfigError
from .params import TWO_PI

CYCLIC = {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9}
TIME = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9}
RELATIVE = "kappa_o_units"

RATE_FIELDS = {
    "cavity": ("kappa_eo", "kappa_io", "kappa_emu", "kappa_imu"),
    "kerr": ("eta",),
    "pulse": ("sigma_omega", "delta_in"),
}
DURATION_FIELDS = {"pulse": ("sigma_T",)}
PLAIN_FIELDS = {
    "cavity": ("kappa_ratio",),
    "kerr": ("eta_norm", "eta_norm_alpha"),
    "pulse": ("alpha",),
    "run": ("estimator", "formula", "correct_backaction"),
}

_QUANTITY = re.compile(r"^\s*([-+0-9.eE]+)\s*([A-Za-z_]+)\s*$")


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings, all in kappa_o units; ``None`` means not given."""

    kappa_ratio: float | None = None
    eta_norm: float | None = None
    eta_norm_alpha: float | None = None
    sigma_omega: float | None = None
    delta_in: float | None = None
    alpha: complex | None = None
    estimator: str | None = None
    formula: str | None = None
    correct_backaction: bool | None = None

    def given(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self) if getattr(self, f.name) is not None}


def _quantity(section: str, name: str, raw) -> tuple[float, str]:
    where = f"{section}.{name}"
    if isinstance(raw, dict):
        if set(raw) != {"value", "unit"}:
            raise ConfigError(f"{where}: expected keys 'value' and 'unit'")
        value, unit = raw["value"], raw["unit"]
    elif isinstance(raw, str):
        m = _QUANTITY.match(raw)
        if not m:
            raise ConfigError(f"{where}: cannot parse quantity {raw!r}")
        value, unit = m.group(1), m.group(2)
    else:
        raise ConfigError(f"{where}: a unit is required (got bare {raw!r})")
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: value {value!r} is not a number") from None
    if not math.isfinite(value):
        raise ConfigError(f"{where}: value must be finite")
    return value, str(unit)


def _rate(section, name, raw):
    """(value, is_relative); physical values come back in rad/s."""
    value, unit = _quantity(section, name, raw)
    if unit == RELATIVE:
        return value, True
    if unit == "rad_per_s":
        return value, False
    if unit in CYCLIC:
        return TWO_PI * value * CYCLIC[unit], False
    raise ConfigError(f"{section}.{name}: unknown rate unit {unit!r}")


def _duration(section, name, raw):
    """(value, is_relative); physical values come back in seconds."""
    value, unit = _quantity(section, name, raw)
    if unit == RELATIVE:
        return value, True
    if unit in TIME:
        return value * TIME[unit], False
    raise ConfigError(f"{section}.{name}: unknown time unit {unit!r}")


def parse_config(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a mapping of sections")
    known = set(RATE_FIELDS) | set(PLAIN_FIELDS)
    for section, body in data.items():
        if section not in known:
            raise ConfigError(f"unknown section {section!r}")
        if not isinstance(body, dict):
            raise ConfigError(f"section {section!r} must be a mapping")
        allowed = set(RATE_FIELDS.get(section, ())) | set(DURATION_FIELDS.get(section, ())) | set(
            PLAIN_FIELDS.get(section, ())
        )
        for key in body:
            if key not in allowed:
                raise ConfigError(f"unknown field {section}.{key}")

    rates, durations = {}, {}
    for section, names in RATE_FIELDS.items():
        for name in names:
            if name in data.get(section, {}):
                rates[name] = _rate(section, name, data[section][name])
    for section, names in DURATION_FIELDS.items():
        for name in names:
            if name in data.get(section, {}):
                durations[name] = _duration(section, name, data[section][name])

    cavity = data.get("cavity", {})
    kerr = data.get("kerr", {})
    pulse = data.get("pulse", {})
    run = data.get("run", {})

    kappa_o_phys = None
    kappa_ratio = cavity.get("kappa_ratio")
    if "kappa_eo" in rates or "kappa_io" in rates:
        if not ("kappa_eo" in rates and "kappa_io" in rates):
            raise ConfigError("cavity: give both kappa_eo and kappa_io")
        (eo, eo_rel), (io, io_rel) = rates["kappa_eo"], rates["kappa_io"]
        if eo_rel != io_rel:
            raise ConfigError("cavity: kappa_eo and kappa_io must both be physical or both relative")
        total = eo + io
        if total <= 0 or eo < 0 or io < 0:
            raise ConfigError("cavity: rates must be non-negative and not both zero")
        if eo_rel and abs(total - 1.0) > 1e-9:
            raise ConfigError(f"cavity: in kappa_o units kappa_eo + kappa_io must be 1, got {total!r}")
        if not eo_rel:
            kappa_o_phys = total
        ratio = eo / total
        if kappa_ratio is not None and abs(float(kappa_ratio) - ratio) > 1e-9:
            raise ConfigError("cavity: kappa_ratio contradicts kappa_eo / kappa_o")
        kappa_ratio = ratio

    def relative(name):
        if name not in rates:
            return None
        value, is_rel = rates[name]
        if is_rel:
            return value
        if kappa_o_phys is None:
            raise ConfigError(f"{name}: physical units need physical cavity rates to set kappa_o")
        return value / kappa_o_phys

    eta_norm = kerr.get("eta_norm")
    eta = relative("eta")
    if eta is not None:
        implied = 4 * eta / TWO_PI
        if eta_norm is not None and abs(implied - float(eta_norm)) > 1e-9 * max(1.0, abs(implied)):
            raise ConfigError("kerr: eta and eta_norm disagree")
        eta_norm = implied

    sigma_omega = relative("sigma_omega")
    if "sigma_T" in durations:
        value, is_rel = durations["sigma_T"]
        if is_rel:
            from_t = 1.0 / value
        else:
            if kappa_o_phys is None:
                raise ConfigError("sigma_T: physical units need physical cavity rates to set kappa_o")
            from_t = 1.0 / (value * kappa_o_phys)
        if sigma_omega is not None and abs(from_t - sigma_omega) > 1e-9 * sigma_omega:
            raise ConfigError("pulse: sigma_T and sigma_omega disagree (sigma_omega = 1/sigma_T)")
        sigma_omega = from_t

    alpha = pulse.get("alpha")
    if alpha is not None:
        try:
            alpha = complex(str(alpha).replace(" ", ""))
        except ValueError:
            raise ConfigError(f"pulse.alpha: cannot parse {alpha!r}") from None

    correct = run.get("correct_backaction")
    if correct is not None and not isinstance(correct, bool):
        raise ConfigError("run.correct_backaction must be true or false")

    return RunConfig(
        kappa_ratio=None if kappa_ratio is None else float(kappa_ratio),
        eta_norm=None if eta_norm is None else float(eta_norm),
        eta_norm_alpha=None if kerr.get("eta_norm_alpha") is None else float(kerr["eta_norm_alpha"]),
        sigma_omega=sigma_omega,
        delta_in=relative("delta_in"),
        alpha=alpha,
        estimator=run.get("estimator"),
        formula=run.get("formula"),
        correct_backaction=correct,
    )


def load_config(path) -> RunConfig:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML ({exc})") from None
    return parse_config(data)

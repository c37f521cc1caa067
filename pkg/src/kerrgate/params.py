"""Physical parameters, the cross-Kerr strength formulas and feasibility presets.

Rates are angular frequencies.  Any consistent unit works for the numerical
core; :meth:`CavityPair.in_kappa_o_units` rescales everything so that the
bad-cavity linewidth equals one.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

from .errors import ConfigError, ParameterError

TWO_PI = 2.0 * math.pi

HBAR = 1.054571817e-34  # J s
EPSILON_0 = 8.8541878128e-12  # F / m

STATIONARY_RATIO = 0.01


def _check_nonnegative(**rates):
    for name, value in rates.items():
        if value is None:
            continue
        if not math.isfinite(value) or value < 0:
            raise ParameterError(f"{name} must be a finite non-negative rate, got {value!r}")


@dataclass(frozen=True)
class CavityPair:
    """Bad (optical, fast) and good (stationary) cavity rates.

    ``kappa_o`` and ``kappa_mu`` are derived, so the total-rate identities
    hold exactly.
    """

    kappa_eo: float
    kappa_io: float
    kappa_emu: float = 0.0
    kappa_imu: float = 0.0
    omega_o: float = 0.0
    omega_mu: float = 0.0

    def __post_init__(self):
        _check_nonnegative(
            kappa_eo=self.kappa_eo,
            kappa_io=self.kappa_io,
            kappa_emu=self.kappa_emu,
            kappa_imu=self.kappa_imu,
        )
        if self.kappa_o == 0:
            raise ParameterError("kappa_eo and kappa_io cannot both be zero")
        if self.kappa_mu > STATIONARY_RATIO * self.kappa_o:
            warnings.warn(
                f"kappa_mu/kappa_o = {self.kappa_mu / self.kappa_o:.3g} exceeds "
                f"{STATIONARY_RATIO}; the stored photon is not effectively stationary",
                stacklevel=3,
            )

    @property
    def kappa_o(self) -> float:
        return self.kappa_eo + self.kappa_io

    @property
    def kappa_mu(self) -> float:
        return self.kappa_emu + self.kappa_imu

    @property
    def coupling_ratio(self) -> float:
        """External coupling fraction kappa_eo / kappa_o."""
        return self.kappa_eo / self.kappa_o

    def scaled(self, factor: float) -> "CavityPair":
        return CavityPair(
            kappa_eo=self.kappa_eo * factor,
            kappa_io=self.kappa_io * factor,
            kappa_emu=self.kappa_emu * factor,
            kappa_imu=self.kappa_imu * factor,
            omega_o=self.omega_o * factor,
            omega_mu=self.omega_mu * factor,
        )

    def in_kappa_o_units(self) -> "CavityPair":
        return self.scaled(1.0 / self.kappa_o)

    @classmethod
    def from_ratio(cls, kappa_ratio: float, omega_o: float = 0.0) -> "CavityPair":
        """Bad cavity with ``kappa_o = 1`` and ``kappa_eo = kappa_ratio``."""
        if not 0 < kappa_ratio <= 1:
            raise ParameterError(f"kappa_eo/kappa_o must lie in (0, 1], got {kappa_ratio!r}")
        return cls(kappa_eo=kappa_ratio, kappa_io=1.0 - kappa_ratio, omega_o=omega_o)


@dataclass(frozen=True)
class KerrCoupling:
    """Polarization-resolved photon-photon interaction strengths.

    Only the right-circular mode couples to the atoms, so ``eta_minus`` is
    pinned to zero.
    """

    eta_plus: float
    eta_minus: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.eta_plus):
            raise ParameterError(f"eta_plus must be finite, got {self.eta_plus!r}")
        if self.eta_minus != 0.0:
            raise ParameterError("the left-circular mode is uncoupled: eta_minus must be 0")

    def for_pol(self, pol) -> float:
        return self.eta_plus if str(pol) == "R" else self.eta_minus

    def scaled(self, factor: float) -> "KerrCoupling":
        return KerrCoupling(self.eta_plus * factor)

    @classmethod
    def from_norm(cls, eta_norm: float, kappa_o: float = 1.0) -> "KerrCoupling":
        """Build from the dimensionless group ``4 eta / (2 pi kappa_o)``."""
        return cls(eta_norm * TWO_PI * kappa_o / 4.0)


def eta_norm(eta: float, kappa_o: float) -> float:
    """The group ``4 eta / (2 pi kappa_o)`` used as the natural sweep axis."""
    return 4.0 * eta / (TWO_PI * kappa_o)


@dataclass(frozen=True)
class AtomEnsemble:
    """N-type emitter ensemble mediating the cross-Kerr coupling.

    When ``g_o`` is ``None`` the optical coupling is only known through
    ``omega_c_over_g_o``; it then cancels from the interaction strength as
    long as the mean stored photon number is zero.
    """

    Delta: float
    Gamma_1: float
    gamma_3: float
    g_mu: float
    N_a: float | None = None
    rho_N: float | None = None
    V_a: float | None = None
    g_o: float | None = None
    Omega_c: float | None = None
    omega_c_over_g_o: float | None = None
    n_mu_mean: float = 0.0
    # housed for completeness; no formula consumes them
    delta: float = 0.0
    gamma_1: float = 0.0
    gamma_2: float = 0.0
    d_21: float | None = None
    d_43: float | None = None
    epsilon_0: float = EPSILON_0

    def __post_init__(self):
        _check_nonnegative(
            Gamma_1=self.Gamma_1,
            gamma_1=self.gamma_1,
            gamma_2=self.gamma_2,
            gamma_3=self.gamma_3,
            n_mu_mean=self.n_mu_mean,
            rho_N=self.rho_N,
            V_a=self.V_a,
        )
        if self.N_a is None:
            if self.rho_N is None or self.V_a is None:
                raise ParameterError("give N_a, or both rho_N and V_a")
            object.__setattr__(self, "N_a", self.rho_N * self.V_a)
        elif self.rho_N is not None and self.V_a is not None:
            implied = self.rho_N * self.V_a
            if abs(implied - self.N_a) > 1e-9 * max(abs(self.N_a), abs(implied)):
                raise ParameterError(
                    f"N_a={self.N_a!r} inconsistent with rho_N*V_a={implied!r}"
                )
        if not self.N_a >= 1:
            raise ParameterError(f"N_a must be >= 1, got {self.N_a!r}")
        if self.g_o is None:
            if self.omega_c_over_g_o is None:
                raise ParameterError("give g_o (and Omega_c) or omega_c_over_g_o")
        elif self.Omega_c is None:
            if self.omega_c_over_g_o is None:
                raise ParameterError("Omega_c is required when g_o is given")
            object.__setattr__(self, "Omega_c", self.omega_c_over_g_o * self.g_o)

    def _optical_factor(self) -> float:
        """g_o^2 / (Omega_c^2 + g_mu^2 <n_mu>)."""
        if self.g_o is None:
            if self.n_mu_mean != 0:
                raise ParameterError(
                    "g_o is symbolic (only Omega_c/g_o is known); it cancels only for n_mu_mean = 0"
                )
            if self.omega_c_over_g_o == 0:
                raise ParameterError("Omega_c/g_o = 0 makes the drive denominator vanish")
            return 1.0 / self.omega_c_over_g_o**2
        denom = self.Omega_c**2 + self.g_mu**2 * self.n_mu_mean
        if denom <= 0:
            raise ParameterError("Omega_c^2 + g_mu^2 <n_mu> must be positive (check Omega_c)")
        return self.g_o**2 / denom


def eta_from_ensemble(ens: AtomEnsemble) -> float:
    """Photon-photon interaction strength from the ensemble parameters.

    Returns ``-2 N g_o^2 g_mu^2 Delta / ([Delta^2 + (Gamma_1+gamma_3)^2](Omega_c^2 + g_mu^2 <n_mu>))``
    in the rate unit of the inputs.
    """
    linewidth = ens.Gamma_1 + ens.gamma_3
    atomic = ens.Delta**2 + linewidth**2
    if atomic == 0:
        raise ParameterError("Delta^2 + (Gamma_1+gamma_3)^2 vanishes (check Delta)")
    return -2.0 * ens.N_a * ens.g_mu**2 * ens.Delta * ens._optical_factor() / atomic


@dataclass(frozen=True)
class SusceptibilityResult:
    chi3_cross: complex

    @property
    def real(self) -> float:
        return self.chi3_cross.real


def chi3_cross(ens: AtomEnsemble, hbar: float = HBAR) -> SusceptibilityResult:
    """Cross third-order susceptibility of the ensemble (SI units).

    Needs both dipole moments and the ensemble volume.  Note that with
    ``g_o`` symbolic the drive factor is taken as ``Omega_c^2`` with
    ``Omega_c`` unknown, so this function requires explicit ``Omega_c``.
    """
    if ens.d_21 is None or ens.d_43 is None or ens.V_a is None:
        raise ParameterError("chi3_cross needs d_21, d_43 and V_a")
    if ens.d_21 <= 0 or ens.d_43 <= 0 or ens.V_a <= 0:
        raise ParameterError("d_21, d_43 and V_a must be positive")
    if ens.Omega_c is None:
        raise ParameterError("chi3_cross needs an explicit Omega_c")
    drive = ens.Omega_c**2 + ens.g_mu**2 * ens.n_mu_mean
    atomic = complex(ens.Delta, -(ens.Gamma_1 + ens.gamma_3))
    if drive == 0 or atomic == 0:
        raise ParameterError("chi3_cross denominator vanishes (check Delta, Omega_c)")
    prefactor = -2.0 * ens.N_a * ens.d_21**2 * ens.d_43**2 / (hbar**3 * ens.epsilon_0 * ens.V_a)
    return SusceptibilityResult(prefactor / (atomic * drive))


# ---------------------------------------------------------------------------
# Feasibility presets (rates in rad/s)

PRESET_NAMES = ("nv", "cs")

# value of 4 eta / (2 pi kappa_o) claimed for the presets
CLAIMED_ETA_NORM = 2.2


@dataclass(frozen=True)
class Preset:
    name: str
    cavity: CavityPair
    ensemble: AtomEnsemble
    claimed_eta_norm: float = CLAIMED_ETA_NORM
    notes: dict = field(default_factory=dict)


def _standard_cavities() -> CavityPair:
    kappa_o = TWO_PI * 10e6
    kappa_mu = TWO_PI * 10e3
    return CavityPair(
        kappa_eo=0.99 * kappa_o,
        kappa_io=0.01 * kappa_o,
        kappa_emu=kappa_mu / 2,
        kappa_imu=kappa_mu / 2,
    )


def preset(name: str) -> tuple[CavityPair, AtomEnsemble]:
    """Cavity and ensemble parameters for the ``nv`` or ``cs`` platform."""
    rec = preset_record(name)
    return rec.cavity, rec.ensemble


def preset_record(name: str) -> Preset:
    key = name.strip().lower()
    if key == "nv":
        ens = AtomEnsemble(
            rho_N=5e18,
            V_a=0.7e-6,
            g_mu=TWO_PI * 10.0,
            Delta=TWO_PI * 0.1e6,
            Gamma_1=TWO_PI * 3e3,
            gamma_3=TWO_PI * 3e3,
            omega_c_over_g_o=10.0,
        )
        return Preset("nv", _standard_cavities(), ens, notes={"platform": "NV centres in nanodiamond"})
    if key == "cs":
        ens = AtomEnsemble(
            N_a=6900,
            g_mu=TWO_PI * 0.5e6,
            Delta=TWO_PI * 50e6,
            Gamma_1=0.0,
            gamma_3=TWO_PI * 5e6,
            omega_c_over_g_o=10.0,
        )
        return Preset("cs", _standard_cavities(), ens, notes={"platform": "cold Cs atom cloud"})
    raise ConfigError(f"unknown preset {name!r}; valid presets: {', '.join(PRESET_NAMES)}")


def with_ensemble(ens: AtomEnsemble, **changes) -> AtomEnsemble:
    """Copy of ``ens`` with fields replaced; re-derives ``N_a`` if density/volume change."""
    if ("rho_N" in changes or "V_a" in changes) and "N_a" not in changes:
        changes["N_a"] = None
    return replace(ens, **changes)

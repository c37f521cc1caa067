import math
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kerrgate.errors import ConfigError, ParameterError
from kerrgate.params import (
    CLAIMED_ETA_NORM,
    TWO_PI,
    AtomEnsemble,
    CavityPair,
    KerrCoupling,
    chi3_cross,
    eta_from_ensemble,
    eta_norm,
    preset,
    preset_record,
    with_ensemble,
)

rates = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False)


def ensemble(**kw):
    base = dict(N_a=1000.0, g_mu=2.0, Delta=5.0, Gamma_1=0.1, gamma_3=0.2, g_o=1.0, Omega_c=10.0)
    base.update(kw)
    return AtomEnsemble(**base)


# cavity ------------------------------------------------------------------


def test_cavity_totals_are_derived():
    cav = CavityPair(kappa_eo=0.7, kappa_io=0.3, kappa_emu=0.001, kappa_imu=0.002)
    assert cav.kappa_o == 1.0
    assert cav.kappa_mu == pytest.approx(0.003)
    assert cav.coupling_ratio == pytest.approx(0.7)


@pytest.mark.parametrize("kw", [dict(kappa_eo=-1, kappa_io=1), dict(kappa_eo=0, kappa_io=0), dict(kappa_eo=1, kappa_io=math.nan)])
def test_cavity_rejects_bad_rates(kw):
    with pytest.raises(ParameterError):
        CavityPair(**kw)


def test_cavity_warns_when_storage_cavity_is_lossy():
    with pytest.warns(UserWarning, match="stationary"):
        CavityPair(kappa_eo=1.0, kappa_io=0.0, kappa_emu=0.02)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        CavityPair(kappa_eo=1.0, kappa_io=0.0, kappa_emu=0.005)


@pytest.mark.parametrize("ratio", [0.0, -0.1, 1.5])
def test_from_ratio_range(ratio):
    with pytest.raises(ParameterError):
        CavityPair.from_ratio(ratio)


@given(rates, rates, st.floats(min_value=1e-3, max_value=1e3))
def test_unit_scaling_round_trip(eo, io, factor):
    cav = CavityPair(eo, io, omega_o=0.3 * eo)
    unit = cav.scaled(factor).in_kappa_o_units()
    assert unit.kappa_o == pytest.approx(1.0, rel=1e-12)
    assert unit.coupling_ratio == pytest.approx(cav.coupling_ratio, rel=1e-12)
    assert unit.omega_o == pytest.approx(cav.omega_o / cav.kappa_o, rel=1e-12)


# Kerr coupling -------------------------------------------------------------


def test_kerr_only_right_mode_couples():
    k = KerrCoupling(3.0)
    assert k.for_pol("R") == 3.0
    assert k.for_pol("L") == 0.0
    with pytest.raises(ParameterError):
        KerrCoupling(3.0, eta_minus=0.5)


@given(st.floats(min_value=-50, max_value=50), st.floats(min_value=1e-3, max_value=1e9))
def test_eta_norm_round_trip(value, kappa_o):
    k = KerrCoupling.from_norm(value, kappa_o)
    assert eta_norm(k.eta_plus, kappa_o) == pytest.approx(value, rel=1e-12, abs=1e-12)


def test_eta_norm_reading():
    # 4 eta / (2 pi kappa_o) with kappa_o = 1 and eta = pi/2 is exactly 1
    assert eta_norm(math.pi / 2, 1.0) == pytest.approx(1.0, rel=1e-15)


# ensemble interaction -------------------------------------------------------


def test_eta_zero_detuning():
    assert eta_from_ensemble(ensemble(Delta=0.0)) == 0.0


def test_eta_far_detuned_limit():
    ens = ensemble(Delta=1e6, Gamma_1=0.0, gamma_3=1e-3, Omega_c=1e4, g_mu=1.0)
    eta = eta_from_ensemble(ens)
    limit = -2 * ens.N_a * ens.g_o**2 * ens.g_mu**2 / (ens.Delta * ens.Omega_c**2)
    assert eta < 0
    assert eta == pytest.approx(limit, rel=1e-9)


def test_eta_closed_form_with_photons_in_storage():
    ens = ensemble(n_mu_mean=2.0)
    expected = -2 * 1000 * 1.0 * 4.0 * 5.0 / ((25 + 0.09) * (100 + 4 * 2.0))
    assert eta_from_ensemble(ens) == pytest.approx(expected, rel=1e-14)


@given(st.floats(min_value=1e-3, max_value=1e6))
def test_eta_odd_in_detuning_without_decay(delta):
    ens = ensemble(Delta=delta, Gamma_1=0.0, gamma_3=0.0)
    flipped = with_ensemble(ens, Delta=-delta)
    assert eta_from_ensemble(flipped) == pytest.approx(-eta_from_ensemble(ens), rel=1e-14)


@given(st.floats(min_value=0.1, max_value=1e3), st.floats(min_value=1.0, max_value=10.0))
def test_eta_monotone_in_drive(omega_c, factor):
    weak = eta_from_ensemble(ensemble(Omega_c=omega_c))
    strong = eta_from_ensemble(ensemble(Omega_c=omega_c * factor))
    assert abs(strong) <= abs(weak) * (1 + 1e-14)


def test_eta_zero_denominators_name_the_parameter():
    with pytest.raises(ParameterError, match="Delta"):
        eta_from_ensemble(ensemble(Delta=0.0, Gamma_1=0.0, gamma_3=0.0))
    with pytest.raises(ParameterError, match="Omega_c"):
        eta_from_ensemble(ensemble(Omega_c=0.0))


def test_symbolic_optical_coupling_cancels_only_when_storage_empty():
    ens = AtomEnsemble(N_a=10.0, g_mu=1.0, Delta=1.0, Gamma_1=0.0, gamma_3=0.0, omega_c_over_g_o=10.0)
    assert eta_from_ensemble(ens) == pytest.approx(-2 * 10 * 1 / (1 * 100))
    with pytest.raises(ParameterError, match="symbolic"):
        eta_from_ensemble(with_ensemble(ens, n_mu_mean=1.0))


def test_ensemble_count_consistency():
    ens = AtomEnsemble(rho_N=2e3, V_a=0.5, g_mu=1, Delta=1, Gamma_1=0, gamma_3=0, g_o=1, Omega_c=1)
    assert ens.N_a == 1000.0
    with pytest.raises(ParameterError, match="inconsistent"):
        AtomEnsemble(N_a=999.0, rho_N=2e3, V_a=0.5, g_mu=1, Delta=1, Gamma_1=0, gamma_3=0, g_o=1, Omega_c=1)
    with pytest.raises(ParameterError):
        AtomEnsemble(g_mu=1, Delta=1, Gamma_1=0, gamma_3=0, g_o=1, Omega_c=1)


# susceptibility -------------------------------------------------------------


def test_chi3_matches_high_precision_oracle(oracle):
    case = oracle["chi3"]
    i = case["inputs"]
    ens = AtomEnsemble(
        N_a=i["N"], V_a=i["V"], d_21=i["d21"], d_43=i["d43"], Delta=i["Delta"], Gamma_1=i["Gamma_1"],
        gamma_3=i["gamma_3"], g_mu=i["g_mu"], g_o=1.0, Omega_c=i["Omega_c"], n_mu_mean=i["n_mu"],
    )
    chi = chi3_cross(ens).chi3_cross
    assert chi.real == pytest.approx(case["re"], rel=1e-12)
    assert chi.imag == pytest.approx(case["im"], rel=1e-12)


def _chi_ensemble(**kw):
    return ensemble(V_a=1.0, d_21=1.0, d_43=1.0, N_a=1000.0, **kw)


def test_chi3_real_and_negative_without_decay():
    chi = chi3_cross(_chi_ensemble(Gamma_1=0.0, gamma_3=0.0), hbar=1.0).chi3_cross
    assert chi.imag == 0.0
    assert chi.real < 0


def test_chi3_decays_with_detuning():
    values = [abs(chi3_cross(_chi_ensemble(Delta=d), hbar=1.0).chi3_cross) for d in (1e2, 1e4, 1e6)]
    assert values[0] > values[1] > values[2]
    assert values[2] < 1e-3 * values[0]


def test_chi3_real_part_tracks_interaction_strength():
    # with unit dipoles, volume and hbar the ratio Re(chi3) / eta is Delta independent
    ratios = []
    for delta in (0.5, 3.0, 40.0, -7.0):
        ens = _chi_ensemble(Delta=delta)
        ens = with_ensemble(ens, epsilon_0=1.0)
        ratios.append(chi3_cross(ens, hbar=1.0).real / eta_from_ensemble(ens))
    assert max(ratios) == pytest.approx(min(ratios), rel=1e-12)


def test_chi3_needs_dipoles_and_drive():
    with pytest.raises(ParameterError, match="d_21"):
        chi3_cross(ensemble())
    sym = AtomEnsemble(N_a=1.0, V_a=1.0, d_21=1.0, d_43=1.0, g_mu=1, Delta=1, Gamma_1=0, gamma_3=0, omega_c_over_g_o=10)
    with pytest.raises(ParameterError, match="Omega_c"):
        chi3_cross(sym)


# presets --------------------------------------------------------------------


def test_nv_preset():
    cav, ens = preset("nv")
    assert ens.N_a == pytest.approx(3.5e12)
    assert cav.kappa_o == pytest.approx(TWO_PI * 10e6)
    assert cav.kappa_mu == pytest.approx(TWO_PI * 10e3)
    assert ens.omega_c_over_g_o == 10.0 and ens.g_o is None


def test_cs_preset():
    cav, ens = preset("CS")
    assert ens.N_a == 6900
    assert ens.Delta == pytest.approx(TWO_PI * 50e6)
    assert ens.Gamma_1 == 0.0
    assert preset_record("cs").claimed_eta_norm == CLAIMED_ETA_NORM


def test_unknown_preset_lists_choices():
    with pytest.raises(ConfigError, match="nv, cs"):
        preset("xx")


def test_preset_interaction_matches_oracle(oracle):
    ref = oracle["eta_ensemble"]
    for name in ("nv", "cs"):
        cav, ens = preset(name)
        assert eta_from_ensemble(ens) == pytest.approx(ref[name], rel=1e-12)
        assert cav.kappa_o == pytest.approx(ref["kappa_o"], rel=1e-15)


@settings(max_examples=25)
@given(st.floats(min_value=0.1, max_value=100.0))
def test_preset_interaction_scales_with_count(factor):
    _, ens = preset("cs")
    scaled = with_ensemble(ens, N_a=ens.N_a * factor)
    assert eta_from_ensemble(scaled) == pytest.approx(factor * eta_from_ensemble(ens), rel=1e-12)

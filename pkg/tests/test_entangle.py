import cmath
import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kerrgate.entangle import (
    AGREEMENT_TOL,
    EntConfig,
    entanglement_fidelity,
    evaluate_entanglement,
    kitten_projection,
    sweep_ent,
)
from kerrgate.errors import ParameterError

ratios = st.floats(min_value=0.5, max_value=1.0)
eta_alphas = st.floats(min_value=0.5, max_value=6.0)
amps = st.complex_numbers(min_magnitude=0.1, max_magnitude=2.0, allow_nan=False, allow_infinity=False)

# lossless, narrowband and strongly coupled: reflections are -1 and +1,
# integer eta_norm_alpha puts the backaction phase on a multiple of 2 pi
IDEAL = dict(kappa_ratio=1.0, eta_norm_alpha=10000.0, sigma_omega=1e-4)


def test_config_validation():
    for kw in (dict(kappa_ratio=1.01), dict(sigma_omega=-1.0), dict(formula="exact"), dict(alpha=complex("nan")),
               dict(eta_norm_alpha=math.nan), dict(detuning_rule="zero")):
        with pytest.raises(ParameterError):
            EntConfig(**kw)


def test_eta_from_group():
    assert EntConfig(alpha=2.0, eta_norm_alpha=4.0).eta == pytest.approx(2 * math.pi / 4)
    # vacuum input: the group is read with |alpha|^2 = 1
    assert EntConfig(alpha=0.0, eta_norm_alpha=4.0).eta == pytest.approx(2 * math.pi)


@pytest.mark.parametrize("formula", ["paper_literal", "multimode_exact"])
def test_ideal_limit(formula):
    m = entanglement_fidelity(EntConfig(formula=formula, **IDEAL))
    assert m.F_ent == pytest.approx(1.0, abs=1e-6)
    assert m.F_kitten_plus == pytest.approx(1.0, abs=1e-6)
    assert m.F_kitten_minus == pytest.approx(1.0, abs=1e-6)
    assert m.p_plus == pytest.approx((1 + math.exp(-2)) / 2, abs=1e-6)
    assert m.p_minus == pytest.approx((1 - math.exp(-2)) / 2, abs=1e-6)
    assert m.p_plus == pytest.approx(0.5677, abs=1e-4)


def test_ideal_limit_converges():
    losses = [1 - entanglement_fidelity(EntConfig(kappa_ratio=1.0, eta_norm_alpha=1000.0, sigma_omega=s)).F_ent
              for s in (1e-1, 1e-2, 1e-3)]
    assert losses[0] > losses[1] > losses[2] >= 0


def test_large_amplitude_projection_is_even():
    m = entanglement_fidelity(EntConfig(alpha=3.0, **IDEAL))
    assert m.p_plus == pytest.approx(0.5, abs=1e-6)


def test_vacuum_input():
    m = entanglement_fidelity(EntConfig(alpha=0.0))
    assert m.F_ent == 1.0 and m.theta == 0.0
    assert m.p_plus == pytest.approx(1.0) and m.p_minus == pytest.approx(0.0)
    # both kitten targets are degenerate for alpha = 0
    assert math.isnan(m.F_kitten_minus)


def test_small_amplitude_branches_merge():
    p = [entanglement_fidelity(EntConfig(alpha=a)).p_plus for a in (0.5, 0.1, 0.01)]
    assert p[0] < p[1] < p[2] < 1
    assert p[2] == pytest.approx(1.0, abs=1e-3)


@settings(max_examples=20, deadline=None)
@given(amps, ratios, eta_alphas)
def test_probabilities_sum_to_one(alpha, ratio, eta):
    p_plus, p_minus, f_plus, f_minus = kitten_projection(EntConfig(alpha=alpha, kappa_ratio=ratio, eta_norm_alpha=eta))
    assert p_plus + p_minus == pytest.approx(1.0, abs=1e-12)
    assert 0 <= p_minus <= 1 and 0 <= p_plus <= 1
    assert 0 <= f_plus <= 1 and 0 <= f_minus <= 1


@settings(max_examples=10, deadline=None)
@given(amps, st.floats(min_value=-math.pi, max_value=math.pi), ratios, eta_alphas)
def test_global_phase_invariance(alpha, phi, ratio, eta):
    a = entanglement_fidelity(EntConfig(alpha=alpha, kappa_ratio=ratio, eta_norm_alpha=eta))
    b = entanglement_fidelity(EntConfig(alpha=alpha * cmath.exp(1j * phi), kappa_ratio=ratio, eta_norm_alpha=eta))
    assert b.F_ent_paper_literal == pytest.approx(a.F_ent_paper_literal, abs=1e-10)
    assert b.F_ent_multimode == pytest.approx(a.F_ent_multimode, abs=1e-10)
    assert b.theta == pytest.approx(a.theta, rel=1e-12)


@settings(max_examples=10, deadline=None)
@given(st.floats(min_value=0.1, max_value=2.0), st.floats(min_value=0.1, max_value=3.0))
def test_theta_scales_with_photon_number(alpha, c):
    # at fixed eta the group 4 eta |alpha|^2 / (2 pi kappa_o) scales with |alpha|^2
    a = entanglement_fidelity(EntConfig(alpha=alpha, eta_norm_alpha=3.0))
    b = entanglement_fidelity(EntConfig(alpha=c * alpha, eta_norm_alpha=3.0 * c**2))
    assert b.theta == pytest.approx(c**2 * a.theta, rel=1e-12)


def test_theta_nearly_linear_along_fig4b():
    grid = np.arange(2.0, 6.01, 0.25)
    theta = np.array([r["theta_over_2pi"] for r in sweep_ent(EntConfig(), "eta_alpha", grid)])
    slope, intercept = np.polyfit(grid, theta, 1)
    assert np.max(np.abs(theta - (slope * grid + intercept))) < 0.01 * theta.max()


def test_fidelity_peaks_near_integer_phase():
    grid = np.round(np.arange(2.0, 6.0001, 0.01), 12)
    rows = sweep_ent(EntConfig(), "eta_alpha", grid)
    f = np.array([r["F_ent_paper_literal"] for r in rows])
    t = np.array([r["theta_over_2pi"] for r in rows])
    peaks = [i for i in range(1, len(f) - 1) if f[i] > f[i - 1] and f[i] >= f[i + 1]]
    assert len(peaks) >= 3
    for i in peaks:
        assert abs(t[i] - round(t[i])) < 0.1


@settings(max_examples=15, deadline=None)
@given(amps, ratios, eta_alphas, st.floats(min_value=0.05, max_value=0.6))
def test_fidelities_in_unit_interval(alpha, ratio, eta, sigma):
    m = entanglement_fidelity(EntConfig(alpha=alpha, kappa_ratio=ratio, eta_norm_alpha=eta, sigma_omega=sigma))
    for value in (m.F_ent_paper_literal, m.F_ent_multimode):
        assert 0 <= value <= 1


def test_formula_selection():
    lit = entanglement_fidelity(EntConfig(formula="paper_literal"))
    exact = entanglement_fidelity(EntConfig(formula="multimode_exact"))
    assert lit.F_ent == lit.F_ent_paper_literal and exact.F_ent == exact.F_ent_multimode
    assert lit.F_ent_multimode == exact.F_ent_multimode
    cav, kerr, pulse = EntConfig().physical()
    with pytest.raises(ParameterError):
        evaluate_entanglement(cav, kerr, pulse, formula="other")


def test_formulas_converge_when_narrowband():
    gaps = []
    for sigma in (0.2, 0.05, 0.01):
        m = entanglement_fidelity(EntConfig(kappa_ratio=1.0, eta_norm_alpha=3.19, sigma_omega=sigma))
        gaps.append(abs(m.F_ent_paper_literal - m.F_ent_multimode))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < AGREEMENT_TOL


def test_disagreement_logged_not_raised(caplog):
    with caplog.at_level(logging.WARNING, logger="kerrgate.entangle"):
        m = entanglement_fidelity(EntConfig(kappa_ratio=0.99, eta_norm_alpha=3.0))
    gap = abs(m.F_ent_paper_literal - m.F_ent_multimode)
    assert (gap > AGREEMENT_TOL) == any("disagree" in r.message for r in caplog.records)


def test_sweep_shape():
    rows = sweep_ent(EntConfig(), "kappa", [0.9, 0.5])
    assert [r["x_value"] for r in rows] == [0.9, 0.5]
    assert rows[0]["x_name"] == "kappa_ratio"
    assert set(rows[0]) == {"x_name", "x_value", "theta_over_2pi", "F_ent_paper_literal", "F_ent_multimode",
                            "p_plus", "F_kitten_plus"}
    assert sweep_ent(EntConfig(), "eta_alpha", []) == []
    assert rows == sweep_ent(EntConfig(), "kappa", [0.9, 0.5], jobs=2)
    with pytest.raises(ParameterError):
        sweep_ent(EntConfig(), "sigma", [0.1])
    with pytest.raises(ParameterError):
        sweep_ent(EntConfig(), "kappa", [0.9, 1.2])

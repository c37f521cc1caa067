"""Hybrid controlled-Z gate between a stored cavity photon and a flying pulse.

A high-Q ("good") cavity holds a photonic qubit; a flying optical pulse is
reflected off a fast ("bad") cavity whose resonance is shifted by a cross-Kerr
coupling to the stored photon.  The package computes reflection spectra,
backaction phases, gate process metrics and hybrid-entanglement metrics.

All frequencies inside the numerical core may be given in any consistent unit;
the configuration layer works in multiples of the bad-cavity linewidth.
"""

__version__ = "0.1.0"

from .errors import ConfigError, NumericalError, ParameterError
from .params import (
    AtomEnsemble,
    CavityPair,
    KerrCoupling,
    SusceptibilityResult,
    chi3_cross,
    eta_from_ensemble,
    preset,
)
from .pulse import DrivePulse, Quadrature, integrate, spectrum
from .scattering import Branch, Pol, ScatterSet, backaction_phase, reflection, scatter_set
from .gate import GateConfig, GateMetrics, process_metrics, sweep_gate, target_unitary
from .entangle import EntConfig, EntMetrics, entanglement_fidelity, kitten_projection, sweep_ent

__all__ = [
    "AtomEnsemble",
    "Branch",
    "CavityPair",
    "ConfigError",
    "DrivePulse",
    "EntConfig",
    "EntMetrics",
    "GateConfig",
    "GateMetrics",
    "KerrCoupling",
    "NumericalError",
    "ParameterError",
    "Pol",
    "Quadrature",
    "ScatterSet",
    "SusceptibilityResult",
    "backaction_phase",
    "chi3_cross",
    "entanglement_fidelity",
    "eta_from_ensemble",
    "integrate",
    "kitten_projection",
    "preset",
    "process_metrics",
    "reflection",
    "scatter_set",
    "spectrum",
    "sweep_ent",
    "sweep_gate",
    "target_unitary",
]

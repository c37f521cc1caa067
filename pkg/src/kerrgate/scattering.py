"""Reflection off the bad cavity, the backaction phase and the branch integrals.

A branch is a pair (stored photon number n, flying polarization).  For the
right-circular polarization the bad-cavity resonance is pulled by ``eta * n``;
the left-circular mode is uncoupled.

Frequencies are absolute: the pulse carries ``omega_in`` and the cavity
``omega_o``, so ``Delta_in = omega_o - omega_in``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .params import CavityPair, KerrCoupling
from .pulse import DrivePulse, Quadrature, integrate, pulse_window, spectral_density


class Pol(str, Enum):
    L = "L"
    R = "R"

    def __str__(self):
        return self.value


@dataclass(frozen=True, order=True)
class Branch:
    n_mu: int
    pol: Pol

    def __post_init__(self):
        if int(self.n_mu) != self.n_mu or self.n_mu < 0:
            raise ValueError(f"n_mu must be a non-negative integer, got {self.n_mu!r}")
        object.__setattr__(self, "pol", Pol(self.pol))

    @property
    def label(self) -> str:
        return f"{self.n_mu}{self.pol}"


# (0,L), (0,R), (1,L), (1,R): the order of every vector and matrix
CANONICAL_BRANCHES = (Branch(0, Pol.L), Branch(0, Pol.R), Branch(1, Pol.L), Branch(1, Pol.R))


def _detuning(omega, b: Branch, cav: CavityPair, k: KerrCoupling):
    return cav.omega_o - np.asarray(omega, dtype=float) + k.for_pol(b.pol) * b.n_mu


def reflection(omega, b: Branch, cav: CavityPair, k: KerrCoupling):
    """Reflection amplitude r(omega) of the one-sided bad cavity."""
    d = _detuning(omega, b, cav, k)
    num = -1j * d + cav.kappa_eo - cav.kappa_io
    den = 1j * d + cav.kappa_eo + cav.kappa_io
    r = num / den
    return r if np.ndim(r) else complex(r)


def intracavity_amplitude(omega, b: Branch, cav: CavityPair, k: KerrCoupling):
    """Ratio of the intracavity field to the incident field, 2 kappa_eo / (i d + kappa_o)."""
    d = _detuning(omega, b, cav, k)
    a = 2.0 * cav.kappa_eo / (1j * d + cav.kappa_o)
    return a if np.ndim(a) else complex(a)


def resonance(b: Branch, cav: CavityPair, k: KerrCoupling) -> float:
    """Frequency at which branch ``b`` is resonant with the bad cavity."""
    return cav.omega_o + k.for_pol(b.pol) * b.n_mu


def default_quadrature(p: DrivePulse, cav: CavityPair, k: KerrCoupling, branches=CANONICAL_BRANCHES) -> Quadrature:
    return pulse_window(p, sorted({resonance(b, cav, k) for b in branches}))


def backaction_phase(b: Branch, p: DrivePulse, cav: CavityPair, k: KerrCoupling, q: Quadrature | None = None) -> float:
    """Phase picked up by the stored photon state while the pulse is in the cavity.

    The cross-Kerr term ``eta * n * a_o^dag a_o`` acts for the intracavity
    occupation ``|alpha|^2 |2 kappa_eo/(i d + kappa_o)|^2`` integrated over the
    pulse spectrum, measured in cavity lifetimes ``1/kappa_o``.  The phase is
    zero for ``n = 0`` and for the uncoupled polarization; in the narrowband
    resonant limit it tends to ``4 eta |alpha|^2 kappa_eo^2 / kappa_o^3``.
    """
    eta = k.for_pol(b.pol)
    if eta == 0 or b.n_mu == 0 or p.mean_photons == 0:
        return 0.0
    q = q or default_quadrature(p, cav, k, (b,))

    def occupation(w):
        return spectral_density(p, w) * np.abs(intracavity_amplitude(w, b, cav, k)) ** 2

    integral = integrate(q, occupation).real
    return eta * b.n_mu * p.mean_photons * integral / cav.kappa_o


@dataclass(frozen=True)
class ScatterSet:
    """Spectral integrals of the scattered single-photon branches.

    ``overlaps[j]`` is the projection of the scattered wavepacket of branch j
    back onto the incident mode (built from ``conj(r)``); ``weights[j]`` the
    surviving norm; ``gram[j, k]`` the mode overlap between branches of the
    same polarization; ``theta[j]`` the backaction phase of the branch.
    """

    branches: tuple
    overlaps: np.ndarray
    weights: np.ndarray
    gram: np.ndarray
    theta: np.ndarray
    quadrature: Quadrature

    def index(self, b: Branch) -> int:
        return self.branches.index(b)


def scatter_set(branches, p: DrivePulse, cav: CavityPair, k: KerrCoupling, q: Quadrature | None = None) -> ScatterSet:
    branches = tuple(Branch(b.n_mu, b.pol) if isinstance(b, Branch) else Branch(*b) for b in branches)
    if len(set(branches)) != len(branches):
        raise ValueError("branches must be distinct")
    q = q or default_quadrature(p, cav, k, branches)
    density = lambda w: spectral_density(p, w)  # noqa: E731

    size = len(branches)
    overlaps = np.empty(size, dtype=complex)
    gram = np.zeros((size, size), dtype=complex)
    for j, bj in enumerate(branches):
        overlaps[j] = integrate(q, lambda w, bj=bj: density(w) * np.conj(reflection(w, bj, cav, k)))
        for m in range(j, size):
            bm = branches[m]
            if bm.pol != bj.pol:
                continue
            if m == j:
                value = integrate(q, lambda w: density(w) * np.abs(reflection(w, bj, cav, k)) ** 2).real
            else:
                value = integrate(
                    q,
                    lambda w, bm=bm: density(w) * np.conj(reflection(w, bj, cav, k)) * reflection(w, bm, cav, k),
                )
            gram[j, m] = value
            gram[m, j] = np.conj(value)
    weights = gram.diagonal().real.copy()
    theta = np.array([backaction_phase(b, p, cav, k, q) for b in branches])
    return ScatterSet(branches, overlaps, weights, gram, theta, q)

"""Gaussian drive pulse and the spectral quadrature used by every integral."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import NumericalError, ParameterError

DEFAULT_NODES = 512
DEFAULT_TOL = 1e-10
DEFAULT_MAX_NODES = 16384
WINDOW_HALF_WIDTH = 8.0


@dataclass(frozen=True)
class DrivePulse:
    """Gaussian wavepacket incident on the bad cavity.

    ``alpha`` is the coherent amplitude (``|alpha|^2`` photons on average);
    ``alpha = 1`` also describes a single-photon wavepacket normalized to
    one integrated photon.  The good cavity is never driven, so ``beta_in``
    must stay zero.
    """

    sigma_omega: float
    omega_in: float = 0.0
    alpha: complex = 1.0
    beta_in: complex = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.sigma_omega) and self.sigma_omega > 0):
            raise ParameterError(f"sigma_omega must be positive, got {self.sigma_omega!r}")
        if self.beta_in != 0:
            raise ParameterError("the good cavity is not driven externally: beta_in must be 0")
        if not np.isfinite(complex(self.alpha)):
            raise ParameterError(f"alpha must be finite, got {self.alpha!r}")

    @property
    def sigma_T(self) -> float:
        return 1.0 / self.sigma_omega

    @property
    def mean_photons(self) -> float:
        return abs(complex(self.alpha)) ** 2

    @classmethod
    def from_duration(cls, sigma_T: float, **kwargs) -> "DrivePulse":
        """Pulse of duration ``sigma_T``; the bandwidth is ``1 / sigma_T``."""
        if not sigma_T > 0:
            raise ParameterError(f"sigma_T must be positive, got {sigma_T!r}")
        return cls(sigma_omega=1.0 / sigma_T, **kwargs)

    def scaled(self, factor: float) -> "DrivePulse":
        """Same pulse with all frequencies multiplied by ``factor``."""
        return DrivePulse(self.sigma_omega * factor, self.omega_in * factor, self.alpha)


def spectrum(p: DrivePulse, omega):
    """Real spectral amplitude f(omega), normalized so that the integral of f^2 is 1."""
    omega = np.asarray(omega, dtype=float)
    norm = 1.0 / math.sqrt(math.sqrt(math.pi) * p.sigma_omega)
    return norm * np.exp(-((omega - p.omega_in) ** 2) / (2.0 * p.sigma_omega**2))


def spectral_density(p: DrivePulse, omega):
    """|f(omega)|^2."""
    omega = np.asarray(omega, dtype=float)
    return np.exp(-((omega - p.omega_in) ** 2) / p.sigma_omega**2) / (math.sqrt(math.pi) * p.sigma_omega)


def time_profile(p: DrivePulse, t):
    """Envelope s(t) whose Fourier partner is :func:`spectrum` (unit norm)."""
    t = np.asarray(t, dtype=float)
    sigma_T = p.sigma_T
    return np.exp(-(t**2) / (2.0 * sigma_T**2)) / math.sqrt(math.sqrt(math.pi) * sigma_T)


@lru_cache(maxsize=32)
def _gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@dataclass(frozen=True)
class Quadrature:
    """Panel-wise Gauss-Legendre rule on ``[lower, upper]``.

    Panels are split at ``breakpoints``.  Every panel gets ``nodes`` points;
    the node count doubles until two successive estimates agree to ``tol``
    (relative to ``max(1, |I|)``) or ``max_nodes`` is exceeded.
    """

    lower: float
    upper: float
    nodes: int = DEFAULT_NODES
    breakpoints: tuple = field(default=())
    tol: float = DEFAULT_TOL
    max_nodes: int = DEFAULT_MAX_NODES
    scheme: str = "gauss-legendre-panels"

    def __post_init__(self):
        if not self.upper > self.lower:
            raise ParameterError(f"empty interval [{self.lower}, {self.upper}]")
        if self.nodes < 2:
            raise ParameterError("need at least two nodes per panel")
        inner = sorted(float(b) for b in self.breakpoints if self.lower < b < self.upper)
        object.__setattr__(self, "breakpoints", tuple(dict.fromkeys(inner)))

    @property
    def edges(self) -> np.ndarray:
        return np.array([self.lower, *self.breakpoints, self.upper])

    def rule(self, nodes: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Concatenated abscissae and weights for all panels."""
        x, w = _gauss_legendre(nodes or self.nodes)
        edges = self.edges
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        points = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        weights = (half[:, None] * w[None, :]).ravel()
        return points, weights

    def refined(self) -> "Quadrature":
        return Quadrature(self.lower, self.upper, 2 * self.nodes, self.breakpoints, self.tol, 2 * self.max_nodes)

    def settings(self) -> dict:
        return {
            "scheme": self.scheme,
            "lower": self.lower,
            "upper": self.upper,
            "nodes_per_panel": self.nodes,
            "breakpoints": list(self.breakpoints),
            "tol": self.tol,
            "max_nodes": self.max_nodes,
        }


def _apply(q: Quadrature, integrand, nodes: int):
    points, weights = q.rule(nodes)
    values = np.asarray(integrand(points))
    if values.shape != points.shape:
        values = np.broadcast_to(values, points.shape)
    if not np.all(np.isfinite(values)):
        raise NumericalError("integrand is not finite on the quadrature window")
    return np.dot(weights, values)


def integrate(q: Quadrature, integrand: Callable) -> complex:
    """Integrate a vectorized ``integrand`` (array -> array) over ``q``.

    Raises :class:`NumericalError` with the last two estimates if the
    doubling sequence does not settle.
    """
    nodes = q.nodes
    previous = _apply(q, integrand, nodes)
    while True:
        nodes *= 2
        current = _apply(q, integrand, nodes)
        if abs(current - previous) <= q.tol * max(1.0, abs(current)):
            return complex(current)
        if nodes >= q.max_nodes:
            raise NumericalError(
                f"quadrature did not converge with {nodes} nodes per panel",
                estimates=(complex(previous), complex(current)),
            )
        previous = current


def pulse_window(p: DrivePulse, features: Sequence[float] = (), **kwargs) -> Quadrature:
    """Window ``omega_in +/- 8 sigma_omega``, stretched to cover each feature.

    ``features`` are Lorentzian centres; each becomes a panel edge, as do the
    pulse centre and the edges of the Gaussian core.
    """
    lo = p.omega_in - WINDOW_HALF_WIDTH * p.sigma_omega
    hi = p.omega_in + WINDOW_HALF_WIDTH * p.sigma_omega
    centres = [float(c) for c in features]
    breaks = set(centres) | {p.omega_in, lo, hi}
    if centres:
        lo = min(lo, *centres)
        hi = max(hi, *centres)
    return Quadrature(lo, hi, breakpoints=tuple(sorted(breaks)), **kwargs)

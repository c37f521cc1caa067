"""Dense density-matrix metrics and coherent-state overlaps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .pulse import Quadrature, integrate

MAX_DIM = 32
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
TRACE_TOL = 1e-9


class DensityMatrix:
    """Validated Hermitian positive-semidefinite matrix of dimension <= 32.

    Instances are read-only; ``data`` is a non-writeable view.
    """

    __slots__ = ("_data", "_trace")

    def __init__(self, entries):
        m = np.array(entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ParameterError(f"density matrix must be square, got shape {m.shape}")
        if m.shape[0] > MAX_DIM:
            raise ParameterError(f"dimension {m.shape[0]} exceeds the cap of {MAX_DIM}")
        scale = max(1.0, np.abs(m).max(initial=0.0))
        if np.abs(m - m.conj().T).max(initial=0.0) > HERMITIAN_TOL * scale:
            raise ParameterError("density matrix is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        if np.linalg.eigvalsh(m).min() < -PSD_TOL:
            raise ParameterError("density matrix has a negative eigenvalue beyond tolerance")
        trace = float(np.trace(m).real)
        if not 0 < trace <= m.shape[0] + TRACE_TOL:
            raise ParameterError(f"density matrix trace {trace!r} outside (0, dim]")
        m.setflags(write=False)
        self._data = m
        self._trace = trace

    @classmethod
    def from_vector(cls, psi) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).ravel()
        return cls(np.outer(psi, psi.conj()))

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def dim(self) -> int:
        return self._data.shape[0]

    @property
    def trace(self) -> float:
        return self._trace

    def normalized(self) -> "DensityMatrix":
        return DensityMatrix(self._data / self._trace)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim}, trace={self._trace:.6g})"


def _as_density(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.data
    return DensityMatrix(rho).data


def _checked_pair(rho, sigma):
    a, b = _as_density(rho), _as_density(sigma)
    if a.shape != b.shape:
        raise ParameterError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    for name, m in (("rho", a), ("sigma", b)):
        if abs(np.trace(m).real - 1.0) > TRACE_TOL:
            raise ParameterError(f"{name} is not normalized (trace {np.trace(m).real!r})")
    return a, b


def _resolved(vals: np.ndarray) -> np.ndarray:
    """Clamp eigenvalues that sit below round-off to zero.

    Anything under ``dim * eps * max|eigenvalue|`` is indistinguishable from
    zero; keeping it would add ~sqrt(eps) noise once square-rooted.
    """
    floor = vals.size * np.finfo(float).eps * max(np.abs(vals).max(initial=0.0), 1e-300)
    return np.where(vals > floor, vals, 0.0)


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    """Square root of a Hermitian PSD matrix via eigendecomposition.

    Eigenvalues in ``[-1e-10, 0)`` and positive ones below round-off are
    clamped to zero; anything more negative raises :class:`ParameterError`.
    """
    vals, vecs = np.linalg.eigh(m)
    if vals.min() < -PSD_TOL:
        raise ParameterError(f"matrix is not positive semidefinite (eigenvalue {vals.min():.3g})")
    vals = _resolved(vals)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def uhlmann_fidelity(rho, sigma) -> float:
    """F = [tr sqrt(sqrt(rho) sigma sqrt(rho))]^2."""
    a, b = _checked_pair(rho, sigma)
    root = psd_sqrt(a)
    inner = root @ b @ root
    inner = 0.5 * (inner + inner.conj().T)
    vals = np.linalg.eigvalsh(inner)
    if vals.min() < -PSD_TOL:
        raise ParameterError("fidelity kernel is not positive semidefinite")
    fid = float(np.sum(np.sqrt(_resolved(vals))) ** 2)
    return min(max(fid, 0.0), 1.0)


def trace_distance(rho, sigma) -> float:
    """D = 1/2 * sum of singular values of (rho - sigma)."""
    a, b = _checked_pair(rho, sigma)
    diff = a - b
    vals = np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))
    return min(float(0.5 * np.abs(vals).sum()), 1.0)


@dataclass(frozen=True)
class CoherentAmplitude:
    value: complex
    mode: str = "wavepacket"

    def __post_init__(self):
        if not np.isfinite(complex(self.value)):
            raise ParameterError(f"coherent amplitude must be finite, got {self.value!r}")


def coherent_overlap(beta, gamma):
    """<beta|gamma> for single-mode coherent states.

    Accepts :class:`CoherentAmplitude` (mode labels must match) or plain
    complex numbers / arrays, which broadcast.
    """
    if isinstance(beta, CoherentAmplitude) or isinstance(gamma, CoherentAmplitude):
        if not (isinstance(beta, CoherentAmplitude) and isinstance(gamma, CoherentAmplitude)):
            raise ParameterError("mix of labelled and unlabelled coherent amplitudes")
        if beta.mode != gamma.mode:
            raise ParameterError(f"mode mismatch: {beta.mode!r} vs {gamma.mode!r}")
        beta, gamma = complex(beta.value), complex(gamma.value)
    b = np.asarray(beta, dtype=complex)
    g = np.asarray(gamma, dtype=complex)
    out = np.exp(-0.5 * np.abs(b) ** 2 - 0.5 * np.abs(g) ** 2 + np.conj(b) * g)
    return out if out.ndim else complex(out)


def multimode_coherent_overlap(u, v, q: Quadrature) -> complex:
    """Overlap of two multimode coherent states with spectral amplitudes u, v."""
    nu = integrate(q, lambda w: np.abs(u(w)) ** 2).real
    nv = integrate(q, lambda w: np.abs(v(w)) ** 2).real
    cross = integrate(q, lambda w: np.conj(u(w)) * v(w))
    return complex(np.exp(-0.5 * nu - 0.5 * nv + cross))

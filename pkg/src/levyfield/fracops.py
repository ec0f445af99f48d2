"""Spectral fractional Laplacian and corrected Riesz potentials.

On a periodic grid the fractional Laplacian of order gamma > 0 is the
Fourier multiplier |w|^gamma on the lattice frequencies; its shift- and
scale-invariant left inverse is the Riesz potential with multiplier
|w|^-gamma.  To land in L^p the potential needs a Taylor correction at
w = 0: the corrected potential of index k subtracts from the spectrum its
Taylor polynomial of degree floor(gamma) - k before dividing,

    F(I_{gamma,k} phi)(w)
        = |w|^-gamma (F phi(w) - sum_{|j| <= floor(gamma)-k}
                      d^j F phi(0) / j! * w^j).

The admissible integrability exponents form k(d,gamma)+1 intervals of
[1, inf] separated by the forbidden values d / (d - eps(gamma) - m),
m = 0..k(d,gamma)-1, where eps(gamma) = gamma - floor(gamma) and
k(d,gamma) = min(floor(gamma)+1, d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Optional

import numpy as np

from ._fft import fftn, ifftn
from .grids import SampledFunction, angular_frequencies, frequency_norm

__all__ = [
    "FracOrder",
    "CorrectionPlan",
    "Interval",
    "frac_epsilon",
    "k_count",
    "forbidden_set",
    "interval_for",
    "matching_k",
    "frac_laplacian",
    "riesz_potential",
    "corrected_riesz",
    "correction_multi_indices",
]

_IMAG_TOL = 1e-12


def _require_fractional(gamma: float) -> None:
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if float(gamma).is_integer():
        raise ValueError(f"gamma must not be an integer, got {gamma}")


def frac_epsilon(gamma: float) -> float:
    """Fractional part gamma - floor(gamma)."""
    return gamma - math.floor(gamma)


def k_count(d: int, gamma: float) -> int:
    """Number of forbidden exponents, min(floor(gamma) + 1, d)."""
    _require_fractional(gamma)
    if d < 1:
        raise ValueError("dimension must be at least 1")
    return min(math.floor(gamma) + 1, d)


def forbidden_set(d: int, gamma: float) -> list[float]:
    """Forbidden integrability exponents d / (d - eps - m), ascending.

    These are exactly the shared endpoints of the admissible intervals;
    there are k(d, gamma) of them, all strictly greater than 1.
    """
    eps = frac_epsilon(gamma)
    return [d / (d - eps - m) for m in range(k_count(d, gamma))]


@dataclass(frozen=True)
class Interval:
    """One admissible exponent interval of [1, +inf]."""

    lo: float
    hi: float
    lo_closed: bool
    hi_closed: bool

    def contains(self, p: float) -> bool:
        if p < self.lo or (p == self.lo and not self.lo_closed):
            return False
        if p > self.hi or (p == self.hi and not self.hi_closed):
            return False
        return True

    def __str__(self):
        lo = "[" if self.lo_closed else "("
        hi = "]" if self.hi_closed else ")"
        top = "inf" if math.isinf(self.hi) else f"{self.hi:g}"
        return f"{lo}{self.lo:g}, {top}{hi}"


def interval_for(d: int, gamma: float, k: int) -> Interval:
    """Admissible exponents for correction index k.

    k = 0 gives [1, d/(d-eps)); interior k give the open interval between
    consecutive forbidden values; k = k(d,gamma) runs to +inf inclusive.
    """
    kc = k_count(d, gamma)
    if not 0 <= k <= kc:
        raise ValueError(f"correction index must lie in 0..{kc}, got {k}")
    eps = frac_epsilon(gamma)
    if k == 0:
        return Interval(1.0, d / (d - eps), True, False)
    lo = d / (d - k + 1.0 - eps)
    if k == kc:
        return Interval(lo, math.inf, False, True)
    return Interval(lo, d / (d - k - eps), False, False)


def matching_k(d: int, gamma: float, p: float) -> Optional[int]:
    """Correction index whose interval contains p, or None if forbidden.

    Only defined on [1, +inf]; equals floor(gamma) - floor(gamma - d(1-1/p))
    away from the forbidden set.
    """
    if p < 1.0:
        return None
    for k in range(k_count(d, gamma) + 1):
        if interval_for(d, gamma, k).contains(p):
            return k
    return None


def correction_multi_indices(d: int, gamma: float, k: int) -> list[tuple[int, ...]]:
    """Multi-indices j with |j| <= floor(gamma) - k (possibly none)."""
    order = math.floor(gamma) - k
    if order < 0:
        return []
    out = []
    for j in product(range(order + 1), repeat=d):
        if sum(j) <= order:
            out.append(j)
    return out


@dataclass(frozen=True)
class FracOrder:
    """Fractional order bundled with its dimension and derived exponents."""

    gamma: float
    d: int

    def __post_init__(self):
        _require_fractional(self.gamma)
        if float(self.gamma - self.d).is_integer():
            raise ValueError(
                f"gamma - d must not be an integer, got gamma={self.gamma}, d={self.d}"
            )

    @property
    def eps(self) -> float:
        return frac_epsilon(self.gamma)

    @property
    def k_count(self) -> int:
        return k_count(self.d, self.gamma)


@dataclass(frozen=True)
class CorrectionPlan:
    """Correction index with its exponent interval and killed moments."""

    order: FracOrder
    k: int

    def __post_init__(self):
        if not 0 <= self.k <= self.order.k_count:
            raise ValueError(
                f"correction index must lie in 0..{self.order.k_count}, got {self.k}"
            )

    @property
    def interval(self) -> Interval:
        return interval_for(self.order.d, self.order.gamma, self.k)

    @property
    def moments_to_remove(self) -> list[tuple[int, ...]]:
        return correction_multi_indices(self.order.d, self.order.gamma, self.k)


# ---------------------------------------------------------------------------
# spectral operators
# ---------------------------------------------------------------------------

def _to_real(values: np.ndarray, what: str) -> np.ndarray:
    scale = max(1.0, float(np.abs(values).max()))
    resid = float(np.abs(values.imag).max())
    if resid > _IMAG_TOL * scale:
        raise RuntimeError(
            f"{what} produced imaginary residue {resid:.3e} beyond tolerance"
        )
    return values.real


def frac_laplacian(phi: SampledFunction, gamma: float) -> SampledFunction:
    """(-Delta)^(gamma/2) phi: multiply the spectrum by |w|^gamma.

    Periodic in every axis; the constant mode maps to zero.  Any gamma > 0
    is allowed here (the integer case is the classical power of the
    Laplacian).
    """
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if not phi.is_real():
        raise ValueError("frac_laplacian expects a real field")
    mult = frequency_norm(phi.shape, phi.spacing) ** gamma
    out = ifftn(fftn(phi.values) * mult)
    return phi.with_values(_to_real(out, "frac_laplacian"))


def _origin_phase(phi: SampledFunction) -> np.ndarray:
    """exp(+j <w, x_o>) aligning the DFT with the marked origin."""
    phase = np.ones(phi.shape, dtype=complex)
    freqs = angular_frequencies(phi.shape, phi.spacing)
    for axis, (w, o) in enumerate(zip(freqs, phi.origin)):
        shape = [1] * phi.dims
        shape[axis] = phi.shape[axis]
        phase = phase * np.exp(1j * w * o * phi.spacing).reshape(shape)
    return phase


def riesz_potential(phi: SampledFunction, gamma: float) -> SampledFunction:
    """Plain spectral inverse |w|^-gamma with the constant mode zeroed."""
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    norm = frequency_norm(phi.shape, phi.spacing)
    with np.errstate(divide="ignore"):
        mult = norm ** (-gamma)
    mult[(0,) * phi.dims] = 0.0
    out = ifftn(fftn(phi.values) * mult)
    if phi.is_real():
        out = _to_real(out, "riesz_potential")
    return phi.with_values(out)


def corrected_riesz(phi: SampledFunction, gamma: float, k: int) -> SampledFunction:
    """Taylor-corrected Riesz potential I_{gamma,k}.

    Subtracts from the spectrum the Taylor polynomial of degree
    floor(gamma) - k at w = 0, whose coefficients are exact lattice
    moments (-j)^|n| sum r^n phi(r) h^d / n!, then divides by |w|^gamma
    with the constant mode zeroed.  Requires gamma and gamma - d
    non-integer and samples that decay at the box edge (the lattice
    moments assume the box captures the mass).
    """
    order = FracOrder(gamma, phi.dims)
    plan = CorrectionPlan(order, k)
    if not phi.is_real():
        raise ValueError("corrected_riesz expects a real field")
    phi.require_boundary_decay()

    h = phi.spacing
    hd = phi.cell_volume
    spectrum = fftn(phi.values) * hd * _origin_phase(phi)

    indices = plan.moments_to_remove
    if indices:
        mesh = phi.coordinate_mesh()
        freqs = np.meshgrid(
            *angular_frequencies(phi.shape, h), indexing="ij"
        )
        taylor = np.zeros(phi.shape, dtype=complex)
        for n in indices:
            mono_r = np.ones(phi.shape)
            mono_w = np.ones(phi.shape)
            fact = 1.0
            for axis, power in enumerate(n):
                if power:
                    mono_r = mono_r * mesh[axis] ** power
                    mono_w = mono_w * freqs[axis] ** power
                    fact *= math.factorial(power)
            lattice_moment = float((mono_r * phi.values).sum() * hd)
            coeff = (-1j) ** sum(n) * lattice_moment / fact
            taylor = taylor + coeff * mono_w
        spectrum = spectrum - taylor

    norm = frequency_norm(phi.shape, h)
    with np.errstate(divide="ignore"):
        mult = norm ** (-gamma)
    mult[(0,) * phi.dims] = 0.0
    out = ifftn(spectrum * mult * np.conj(_origin_phase(phi))) / hd
    return phi.with_values(_to_real(out, "corrected_riesz"))

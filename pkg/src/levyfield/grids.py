"""Uniform-grid sampled functions.

Every operator and quadrature in this package works on real- or
complex-valued samples of a function on a uniform d-dimensional grid
(d in {1, 2, 3}) with a common spacing ``h`` on all axes and a marked
origin index (the grid point sitting at r = 0).  Integrals are midpoint
sums, ``sum(values) * h**d``, and L^p quasi-norms are
``(sum(|values|**p) * h**d) ** (1/p)`` for any p > 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SampledFunction",
    "GridMismatchError",
    "BoundaryDecayError",
    "gaussian_bump",
    "gaussian_derivative_bump",
    "hat_function",
    "box_function",
    "cosine_mode",
    "wave_packet",
    "random_smooth_bump",
]


class GridMismatchError(ValueError):
    """Two sampled functions do not share shape, spacing and origin."""


class BoundaryDecayError(ValueError):
    """A sampled function does not decay at the grid boundary.

    Raised by operators that rely on the samples being negligible at the
    edge of the box (periodization of non-periodic kernels, integrals
    running to infinity).
    """


@dataclass
class SampledFunction:
    """Samples of a function on a uniform grid.

    Parameters
    ----------
    values : ndarray
        Real or complex samples, row-major, one axis per dimension.
    spacing : float
        Grid step ``h`` shared by all axes; must be positive.
    origin : tuple of int
        Index of the grid point at ``r = 0``.  Defaults to the all-zero
        index (box corner).
    """

    values: np.ndarray
    spacing: float
    origin: tuple[int, ...] = field(default=())

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.ndim not in (1, 2, 3):
            raise ValueError(f"dims must be 1, 2 or 3, got {self.values.ndim}")
        if not (self.spacing > 0):
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values must be finite")
        if self.origin == ():
            self.origin = (0,) * self.values.ndim
        if len(self.origin) != self.values.ndim:
            raise ValueError("origin length must match dims")

    @property
    def dims(self) -> int:
        return self.values.ndim

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def cell_volume(self) -> float:
        return float(self.spacing) ** self.dims

    def axis_coordinates(self) -> list[np.ndarray]:
        """Per-axis physical coordinates ``(index - origin) * h``."""
        return [
            (np.arange(n) - o) * self.spacing
            for n, o in zip(self.shape, self.origin)
        ]

    def coordinate_mesh(self) -> list[np.ndarray]:
        return list(np.meshgrid(*self.axis_coordinates(), indexing="ij"))

    def integral(self) -> complex | float:
        return self.values.sum() * self.cell_volume

    def quasi_norm(self, p: float) -> float:
        """L^p quasi-norm ``(sum |v|^p h^d)^(1/p)``, valid for any p > 0."""
        if not (p > 0):
            raise ValueError(f"p must be positive, got {p}")
        return float((np.abs(self.values) ** p).sum() * self.cell_volume) ** (1.0 / p)

    def quasi_norm_pow(self, p: float) -> float:
        """``sum |v|^p h^d`` (the p-th power of the quasi-norm)."""
        if not (p > 0):
            raise ValueError(f"p must be positive, got {p}")
        return float((np.abs(self.values) ** p).sum() * self.cell_volume)

    def same_grid(self, other: "SampledFunction") -> bool:
        return (
            self.shape == other.shape
            and self.spacing == other.spacing
            and self.origin == other.origin
        )

    def require_same_grid(self, other: "SampledFunction") -> None:
        if not self.same_grid(other):
            raise GridMismatchError(
                f"grids differ: {self.shape}/{self.spacing}/{self.origin} vs "
                f"{other.shape}/{other.spacing}/{other.origin}"
            )

    def with_values(self, values: np.ndarray) -> "SampledFunction":
        return SampledFunction(values, self.spacing, self.origin)

    def is_real(self) -> bool:
        return not np.iscomplexobj(self.values)

    def boundary_magnitude(self, margin: int = 1) -> float:
        """Largest |value| within ``margin`` cells of the box edge."""
        mask = np.zeros(self.shape, dtype=bool)
        for axis in range(self.dims):
            sl = [slice(None)] * self.dims
            sl[axis] = slice(0, margin)
            mask[tuple(sl)] = True
            sl[axis] = slice(self.shape[axis] - margin, self.shape[axis])
            mask[tuple(sl)] = True
        return float(np.abs(self.values[mask]).max())

    def require_boundary_decay(self, tol: float = 1e-12, margin: int = 1) -> None:
        edge = self.boundary_magnitude(margin)
        peak = float(np.abs(self.values).max())
        if peak > 0 and edge > tol * max(1.0, peak):
            raise BoundaryDecayError(
                f"samples reach {edge:.3e} at the boundary (tolerance "
                f"{tol:.1e} of peak {peak:.3e}); operator assumes decay"
            )


def angular_frequencies(shape: tuple[int, ...], spacing: float) -> list[np.ndarray]:
    """Per-axis angular frequency lattice 2*pi*fftfreq(n, h)."""
    return [2.0 * np.pi * np.fft.fftfreq(n, d=spacing) for n in shape]


def frequency_mesh(shape: tuple[int, ...], spacing: float) -> list[np.ndarray]:
    return list(np.meshgrid(*angular_frequencies(shape, spacing), indexing="ij"))


def frequency_norm(shape: tuple[int, ...], spacing: float) -> np.ndarray:
    sq = 0.0
    for w in np.meshgrid(*angular_frequencies(shape, spacing), indexing="ij"):
        sq = sq + w * w
    return np.sqrt(sq)


# ---------------------------------------------------------------------------
# test-function factories
# ---------------------------------------------------------------------------

def _centered(shape, spacing, origin):
    if origin is None:
        origin = tuple(n // 2 for n in shape)
    f = SampledFunction(np.zeros(shape), spacing, origin)
    return f, origin


def gaussian_bump(shape, spacing, width=0.25, center=None, amplitude=1.0,
                  origin=None) -> SampledFunction:
    """exp(-|r - c|^2 / (2 w^2)), centered mid-grid by default."""
    f, origin = _centered(shape, spacing, origin)
    mesh = f.coordinate_mesh()
    if center is None:
        center = [0.0] * len(shape)
    r2 = sum((m - c) ** 2 for m, c in zip(mesh, center))
    f.values = amplitude * np.exp(-r2 / (2.0 * width ** 2))
    return f


def gaussian_derivative_bump(shape, spacing, width=0.25, axis=0, center=None,
                             origin=None) -> SampledFunction:
    """First coordinate times a Gaussian: changes sign across the center."""
    f = gaussian_bump(shape, spacing, width, center, 1.0, origin)
    mesh = f.coordinate_mesh()
    c = 0.0 if center is None else center[axis]
    f.values = (mesh[axis] - c) / width * f.values
    return f


def hat_function(shape, spacing, half_width=0.5, center=None,
                 origin=None) -> SampledFunction:
    """max(0, 1 - |r - c|_2 / a): Lipschitz with a kink, exercises O(h^2)."""
    f, origin = _centered(shape, spacing, origin)
    mesh = f.coordinate_mesh()
    if center is None:
        center = [0.0] * len(shape)
    r = np.sqrt(sum((m - c) ** 2 for m, c in zip(mesh, center)))
    f.values = np.maximum(0.0, 1.0 - r / half_width)
    return f


def box_function(shape, spacing, lo=0.0, hi=1.0, height=1.0,
                 origin=None) -> SampledFunction:
    """Indicator of the box [lo, hi)^d scaled by ``height``.

    Sampled at grid points; with lo/hi on grid lines the midpoint
    quadrature of |box|^p is exact, which the metric tests rely on.
    """
    f, origin = _centered(shape, spacing, origin)
    mesh = f.coordinate_mesh()
    inside = np.ones(shape, dtype=bool)
    for m in mesh:
        inside &= (m >= lo) & (m < hi)
    f.values = np.where(inside, height, 0.0)
    return f


def cosine_mode(shape, spacing, mode: tuple[int, ...],
                origin=None) -> SampledFunction:
    """cos(<w_k, r>) for an exact lattice frequency (periodic eigenfunction)."""
    f, origin = _centered(shape, spacing, origin)
    mesh = f.coordinate_mesh()
    freqs = [2.0 * np.pi * k / (n * spacing) for k, n in zip(mode, shape)]
    phase = sum(w * m for w, m in zip(freqs, mesh))
    f.values = np.cos(phase)
    return f


def wave_packet(shape, spacing, carrier, width=None, center=None, phase=0.0,
                origin=None) -> SampledFunction:
    """cos(<k0, r> + phase) * exp(-|r - c|^2 / 2 w^2).

    The spectrum concentrates at +-k0 with a Gaussian profile; with
    |k0| * w large the bins near zero frequency fall below 1e-20, so
    every lattice moment is at noise level (a numerically band-limited,
    moment-killed bump).  The envelope decays below any boundary
    tolerance when the box is several widths wide.
    """
    f, origin = _centered(shape, spacing, origin)
    mesh = f.coordinate_mesh()
    if center is None:
        center = [0.0] * len(shape)
    if width is None:
        width = 0.1 * min(n * spacing for n in shape)
    r2 = sum((m - c) ** 2 for m, c in zip(mesh, center))
    arg = sum(k * (m - c) for k, m, c in zip(carrier, mesh, center)) + phase
    f.values = np.cos(arg) * np.exp(-r2 / (2.0 * width ** 2))
    return f


def random_smooth_bump(shape, spacing, rng, width_range=(0.15, 0.35),
                       amp_range=(0.5, 1.5), origin=None) -> SampledFunction:
    """Random Gaussian bump with random center/width/sign, for draws."""
    f, origin = _centered(shape, spacing, origin)
    extent = [n * spacing for n in shape]
    center = [(rng.random() - 0.5) * 0.3 * L for L in extent]
    width = rng.uniform(*width_range) * min(extent)
    amp = rng.uniform(*amp_range) * (1 if rng.random() < 0.5 else -1)
    return gaussian_bump(shape, spacing, width, center, amp, origin)

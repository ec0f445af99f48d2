"""Directional derivative operators and their left inverses.

A first-order factor D_u - alpha*Id acts along the unit direction u.  For
Re(alpha) != 0 the inverse is the stable convolution with a one-sided
exponential, realized spectrally through the multiplier
1 / (j<w,u> - alpha).  On the imaginary axis alpha = j*w0 the inverse is
only marginally stable; the usable right inverse anchors the line
integral at the hyperplane <r,u> = 0,

    J_{u,w0} phi(r) = exp(j w0 <r,u>) int_0^{<r,u>}
                      exp(-j w0 tau) phi(p_perp(r) + tau u) dtau,

and its adjoint J* subtracts the full-line integral on the half-space
<r,u> <= 0.  Both reduce to the w0 = 0 case through the modulation
operators M_{u,w0} phi = exp(j w0 <r,u>) phi.

Directions are integer lattice vectors (reduced to primitive form), so
the line integrals run along exact lattice lines with trapezoidal steps
of length h*|e|; the anchor cell is half-open, which costs one O(h) term
globally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from ._fft import fftn, ifftn
from .fracops import CorrectionPlan, FracOrder, corrected_riesz, riesz_potential
from .grids import SampledFunction, angular_frequencies

__all__ = [
    "DirFactor",
    "FracFactor",
    "OperatorSpec",
    "unit_direction",
    "orthogonal_projection",
    "directional_derivative",
    "stable_inverse",
    "stable_inverse_transpose",
    "modulation",
    "marginal_right_inverse",
    "marginal_adjoint_left_inverse",
    "marginal_full_inverse",
    "marginal_full_inverse_adjoint",
    "line_derivative",
    "compose_adjoint_left_inverse",
    "apply_operator_adjoint",
]


def _primitive(direction: Sequence[int]) -> tuple[int, ...]:
    e = tuple(int(c) for c in direction)
    if all(c == 0 for c in e):
        raise ValueError("direction must be a nonzero integer vector")
    if any(float(c) != int(c) for c in direction):
        raise ValueError(f"direction must have integer components, got {direction}")
    g = 0
    for c in e:
        g = math.gcd(g, abs(c))
    return tuple(c // g for c in e)


def unit_direction(direction: Sequence[int]) -> np.ndarray:
    e = np.asarray(_primitive(direction), dtype=float)
    return e / np.linalg.norm(e)


def orthogonal_projection(r: np.ndarray, direction: Sequence[int]) -> np.ndarray:
    """p_perp(r) = r - <u,r> u for the normalized direction."""
    u = unit_direction(direction)
    r = np.asarray(r, dtype=float)
    return r - np.dot(r, u) * u


@dataclass(frozen=True)
class DirFactor:
    """One factor D_u - alpha*Id with an integer lattice direction.

    kind is 'stable' when Re(alpha) != 0 and 'marginal' when alpha sits
    on the imaginary axis (alpha = j*w0).
    """

    direction: tuple[int, ...]
    alpha: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "direction", _primitive(self.direction))
        object.__setattr__(self, "alpha", complex(self.alpha))

    @property
    def kind(self) -> str:
        return "stable" if self.alpha.real != 0.0 else "marginal"

    @property
    def omega0(self) -> float:
        if self.kind != "marginal":
            raise ValueError("omega0 only defined for marginal factors")
        return self.alpha.imag

    @property
    def unit(self) -> np.ndarray:
        return unit_direction(self.direction)


@dataclass(frozen=True)
class FracFactor:
    """Fractional Laplacian factor; k = None means the plain potential."""

    gamma: float
    k: Optional[int] = None

    def plan(self, d: int) -> Optional[CorrectionPlan]:
        if self.k is None:
            return None
        return CorrectionPlan(FracOrder(self.gamma, d), self.k)


@dataclass(frozen=True)
class OperatorSpec:
    """Whitening operator as an ordered product of directional factors
    and at most one fractional-Laplacian factor."""

    factors: tuple[DirFactor, ...] = ()
    frac: Optional[FracFactor] = None

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def stable_factors(self) -> tuple[DirFactor, ...]:
        return tuple(f for f in self.factors if f.kind == "stable")

    @property
    def marginal_factors(self) -> tuple[DirFactor, ...]:
        return tuple(f for f in self.factors if f.kind == "marginal")

    def describe(self) -> str:
        parts = []
        for f in self.factors:
            parts.append(f"(D_{f.direction} - ({f.alpha:g})Id)")
        if self.frac is not None:
            k = "plain" if self.frac.k is None else str(self.frac.k)
            parts.append(f"(-Lap)^({self.frac.gamma:g}/2)[k={k}]")
        return " ".join(parts) if parts else "Id"


# ---------------------------------------------------------------------------
# spectral factors
# ---------------------------------------------------------------------------

def _direction_multiplier(phi: SampledFunction, direction) -> np.ndarray:
    """j <w, u> on the frequency lattice."""
    u = unit_direction(direction)
    freqs = angular_frequencies(phi.shape, phi.spacing)
    acc = np.zeros(phi.shape)
    for axis, (w, uc) in enumerate(zip(freqs, u)):
        shape = [1] * phi.dims
        shape[axis] = phi.shape[axis]
        acc = acc + uc * w.reshape(shape)
    return 1j * acc


def _spectral_apply(phi: SampledFunction, mult: np.ndarray) -> SampledFunction:
    out = ifftn(fftn(phi.values) * mult)
    if phi.is_real():
        scale = max(1.0, float(np.abs(out).max()))
        if float(np.abs(out.imag).max()) <= 1e-12 * scale:
            out = out.real
    return phi.with_values(out)


def directional_derivative(phi: SampledFunction, direction) -> SampledFunction:
    """D_u phi = <grad phi, u> as a spectral multiplier on the periodic grid."""
    return _spectral_apply(phi, _direction_multiplier(phi, direction))


def stable_inverse(phi: SampledFunction, direction, alpha: complex) -> SampledFunction:
    """Inverse of D_u - alpha*Id for Re(alpha) != 0: multiplier
    1/(j<w,u> - alpha), causal for Re(alpha) < 0 and anti-causal for
    Re(alpha) > 0."""
    alpha = complex(alpha)
    if alpha.real == 0.0:
        raise ValueError("Re(alpha) = 0 is marginally stable; use the anchored path")
    return _spectral_apply(phi, 1.0 / (_direction_multiplier(phi, direction) - alpha))


def stable_inverse_transpose(
    phi: SampledFunction, direction, alpha: complex
) -> SampledFunction:
    """Inverse of the transpose factor (-D_u - alpha*Id): multiplier
    1/(-j<w,u> - alpha)."""
    alpha = complex(alpha)
    if alpha.real == 0.0:
        raise ValueError("Re(alpha) = 0 is marginally stable; use the anchored path")
    return _spectral_apply(phi, 1.0 / (-_direction_multiplier(phi, direction) - alpha))


# ---------------------------------------------------------------------------
# lattice-line machinery for the marginal case
# ---------------------------------------------------------------------------

@dataclass
class _LinePartition:
    order: np.ndarray        # permutation: flat grid -> line-sorted
    starts: np.ndarray       # first sorted position of each line
    ends: np.ndarray         # last sorted position of each line
    line_of: np.ndarray      # line id per sorted position
    s_int: np.ndarray        # integer line coordinate <i - o, e> per sorted position
    anchors: np.ndarray      # per line: first sorted position with s_int >= 0
    anchors_nonpos: np.ndarray  # per line: last position with s_int <= 0 (may be starts-1)

    @property
    def n_lines(self) -> int:
        return len(self.starts)


# partitions of a 1024^2 grid hold ~25 MB of index arrays; keep few
@lru_cache(maxsize=8)
def _line_partition(shape: tuple, origin: tuple, e: tuple) -> _LinePartition:
    d = len(shape)
    idx = np.indices(shape).reshape(d, -1)
    rel = idx - np.asarray(origin, dtype=np.int64).reshape(d, 1)
    ev = np.asarray(e, dtype=np.int64)
    s_int = (rel * ev.reshape(d, 1)).sum(axis=0)

    axis = int(np.argmax(np.abs(ev)))
    keys = []
    for j in range(d):
        if j != axis:
            keys.append(rel[j] * ev[axis] - rel[axis] * ev[j])
    # sort by line key(s), then by position along the line
    order = np.lexsort(tuple([s_int] + keys))
    s_sorted = s_int[order]
    if keys:
        key_sorted = np.stack([k[order] for k in keys])
        new_line = np.ones(len(order), dtype=bool)
        new_line[1:] = (key_sorted[:, 1:] != key_sorted[:, :-1]).any(axis=0)
    else:
        new_line = np.zeros(len(order), dtype=bool)
        new_line[0] = True
    starts = np.flatnonzero(new_line)
    ends = np.append(starts[1:] - 1, len(order) - 1)
    line_of = np.cumsum(new_line) - 1

    pos = np.arange(len(order))
    cand = np.where(s_sorted >= 0, pos, len(order))
    first_nonneg = np.minimum.reduceat(cand, starts)
    anchors = np.where(first_nonneg == len(order), ends, first_nonneg)
    cand_pos = np.where(s_sorted > 0, pos, len(order))
    first_pos = np.minimum.reduceat(cand_pos, starts)
    anchors_nonpos = np.where(first_pos == len(order), ends, first_pos - 1)
    return _LinePartition(
        order, starts, ends, line_of, s_sorted, anchors, anchors_nonpos
    )


def _line_antiderivative(part: _LinePartition, values: np.ndarray, step: float):
    """Per-line trapezoid antiderivative, zero at each line start."""
    v = values[part.order]
    inc = np.empty_like(v)
    inc[0] = 0
    inc[1:] = 0.5 * step * (v[1:] + v[:-1])
    inc[part.starts] = 0
    C = np.cumsum(inc)
    return C - C[part.starts[part.line_of]]


def _scatter(part: _LinePartition, phi: SampledFunction,
             sorted_vals: np.ndarray) -> SampledFunction:
    flat = np.empty(
        sorted_vals.shape,
        dtype=complex if np.iscomplexobj(sorted_vals) else float,
    )
    flat[part.order] = sorted_vals
    return phi.with_values(flat.reshape(phi.shape))


def _line_setup(phi: SampledFunction, direction):
    e = _primitive(direction)
    if len(e) != phi.dims:
        raise ValueError("direction dimension does not match the grid")
    part = _line_partition(phi.shape, tuple(phi.origin), e)
    norm_e = math.sqrt(sum(c * c for c in e))
    step = phi.spacing * norm_e           # arclength between lattice samples
    return e, part, step, norm_e


def modulation(phi: SampledFunction, direction, omega0: float) -> SampledFunction:
    """M_{u,w0} phi = exp(j w0 <r,u>) phi."""
    if omega0 == 0.0:
        return phi.with_values(phi.values.copy())
    u = unit_direction(direction)
    mesh = phi.coordinate_mesh()
    tau = sum(uc * m for uc, m in zip(u, mesh))
    return phi.with_values(np.exp(1j * omega0 * tau) * phi.values)


def _anchored_integral(phi: SampledFunction, direction) -> SampledFunction:
    """J_{u,0}: int_0^{<r,u>} phi along the lattice line, half-open anchor."""
    e, part, step, _ = _line_setup(phi, direction)
    C = _line_antiderivative(part, phi.values.ravel(), step)
    out = C - C[part.anchors[part.line_of]]
    return _scatter(part, phi, out)


def _reverse_integral_with_gate(phi: SampledFunction, direction) -> SampledFunction:
    """J*_{u,0}: int_{<r,u>}^{inf} phi minus the full-line integral gated
    on the half-space <r,u> <= 0."""
    phi.require_boundary_decay()
    e, part, step, _ = _line_setup(phi, direction)
    C = _line_antiderivative(part, phi.values.ravel(), step)
    C_end = C[part.ends[part.line_of]]
    out = (C_end - C) - np.where(part.s_int <= 0, C_end, 0.0 * C_end)
    return _scatter(part, phi, out)


def _full_line_integral(phi: SampledFunction, direction, adjoint: bool) -> SampledFunction:
    phi.require_boundary_decay()
    e, part, step, _ = _line_setup(phi, direction)
    C = _line_antiderivative(part, phi.values.ravel(), step)
    if adjoint:
        out = C[part.ends[part.line_of]] - C
    else:
        out = C
    return _scatter(part, phi, out)


def marginal_right_inverse(
    phi: SampledFunction, direction, omega0: float = 0.0
) -> SampledFunction:
    """J_{u,w0}: anchored line integral; vanishes on <r,u> = 0.

    Evaluated through the modulation identity
    J_{u,w0} = M_{u,w0} J_{u,0} M_{u,-w0}.
    """
    inner = modulation(phi, direction, -omega0)
    out = _anchored_integral(inner, direction)
    return modulation(out, direction, omega0)


def marginal_adjoint_left_inverse(
    phi: SampledFunction, direction, omega0: float = 0.0
) -> SampledFunction:
    """J*_{u,w0} = M_{u,-w0} J*_{u,0} M_{u,w0}: left inverse of the
    transpose factor (-D_u - j w0 Id); discontinuous across the anchor
    hyperplane."""
    inner = modulation(phi, direction, omega0)
    out = _reverse_integral_with_gate(inner, direction)
    return modulation(out, direction, -omega0)


def marginal_full_inverse(
    phi: SampledFunction, direction, omega0: float = 0.0
) -> SampledFunction:
    """I_{u,j w0}: unanchored line integral from the -u box edge (stands in
    for -infinity under the boundary-decay precondition)."""
    inner = modulation(phi, direction, -omega0)
    out = _full_line_integral(inner, direction, adjoint=False)
    return modulation(out, direction, omega0)


def marginal_full_inverse_adjoint(
    phi: SampledFunction, direction, omega0: float = 0.0
) -> SampledFunction:
    """I*_{u,j w0}: unanchored reverse line integral to the +u box edge."""
    inner = modulation(phi, direction, omega0)
    out = _full_line_integral(inner, direction, adjoint=True)
    return modulation(out, direction, -omega0)


def line_derivative(phi: SampledFunction, direction):
    """Centered difference along lattice lines; second return value masks
    the interior points where both neighbors exist."""
    e, part, step, _ = _line_setup(phi, direction)
    v = phi.values.ravel()[part.order]
    out = np.zeros_like(v)
    out[1:-1] = (v[2:] - v[:-2]) / (2.0 * step)
    valid = np.ones(len(v), dtype=bool)
    valid[part.starts] = False
    valid[part.ends] = False
    deriv = _scatter(part, phi, out)
    mask = np.empty(len(v), dtype=bool)
    mask[part.order] = valid
    return deriv, mask.reshape(phi.shape)


# ---------------------------------------------------------------------------
# composition
# ---------------------------------------------------------------------------

def compose_adjoint_left_inverse(
    spec: OperatorSpec, phi: SampledFunction
) -> SampledFunction:
    """L*^{-1} phi: stable factors (spectral transpose inverses), then the
    fractional factor, then the marginal factors by line quadrature, each
    group in the declared order.

    Marginal factors do not commute with the anchoring, so the declared
    order is part of the operator's definition.
    """
    cur = phi
    for f in spec.stable_factors:
        cur = stable_inverse_transpose(cur, f.direction, f.alpha)
    if spec.frac is not None:
        if spec.frac.k is None:
            cur = riesz_potential(cur, spec.frac.gamma)
        else:
            cur = corrected_riesz(cur, spec.frac.gamma, spec.frac.k)
    for f in spec.marginal_factors:
        cur = marginal_adjoint_left_inverse(cur, f.direction, f.omega0)
    return cur


def apply_operator_adjoint(spec: OperatorSpec, phi: SampledFunction) -> SampledFunction:
    """L* phi for the product L = F_1 ... F_n: the transpose factors all
    commute (constant coefficients), with (D_u - a Id)* = -D_u - a Id and
    the fractional factor self-adjoint.

    Spectral throughout; intended for smooth decaying test functions, so
    that compose_adjoint_left_inverse(spec, apply_operator_adjoint(spec,
    phi)) recovers phi.
    """
    cur = phi
    for f in spec.marginal_factors:
        mult = -_direction_multiplier(cur, f.direction) - 1j * f.omega0
        cur = _spectral_apply(cur, mult)
    if spec.frac is not None:
        from .fracops import frac_laplacian

        cur = frac_laplacian(cur, spec.frac.gamma)
    for f in spec.stable_factors:
        mult = -_direction_multiplier(cur, f.direction) - f.alpha
        cur = _spectral_apply(cur, mult)
    return cur

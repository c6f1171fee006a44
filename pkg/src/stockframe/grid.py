"""Cell-centred frequency quadrature grids and the phase-sum kernels built on them.

Nodes sit at ``(n + 1/2) h`` for ``n = -K .. K-1`` with a dyadic spacing
``h = 2**-p``. Half-integer band endpoints therefore never coincide with a
node, and an interval of length ``L`` (a multiple of ``h``) holds exactly
``L / h`` nodes. For integrands that vanish at ``+-Omega`` this midpoint sum
coincides with the composite trapezoid rule.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["FrequencyGrid", "grid_from_points", "phase_analysis", "phase_synthesis"]


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform cell-centred grid on ``[-omega_max, omega_max]**d``."""

    half_count: int
    spacing: float
    dimension: int = 1

    @property
    def omega_max(self):
        return self.half_count * self.spacing

    @property
    def index(self):
        return np.arange(-self.half_count, self.half_count)

    @property
    def axis(self):
        return (self.index + 0.5) * self.spacing

    @property
    def shape(self):
        return (2 * self.half_count,) * self.dimension

    @property
    def cell(self):
        """Quadrature weight ``h**d``."""
        return self.spacing ** self.dimension

    def points(self):
        """Node coordinates: shape ``(N,)`` in 1D, ``(N, N, 2)`` in 2D."""
        ax = self.axis
        if self.dimension == 1:
            return ax
        xx, yy = np.meshgrid(ax, ax, indexing="ij")
        return np.stack([xx, yy], axis=-1)

    def refine(self, factor=2):
        return FrequencyGrid(self.half_count * factor, self.spacing / factor, self.dimension)

    def integrate(self, values):
        return np.sum(values) * self.cell


def grid_from_points(omega_max, points, dimension=1):
    """Grid covering ``[-omega_max, omega_max]`` with spacing ``2**-p <= 2*omega_max/points``."""
    if omega_max <= 0 or points < 2:
        raise ValueError("grid needs omega_max > 0 and at least two points")
    p = int(np.ceil(np.log2(points / (2.0 * omega_max))))
    h = 2.0 ** (-p)
    half = int(np.ceil(omega_max / h))
    return FrequencyGrid(half, h, dimension)


def _period(theta):
    # Integer period P with theta * P == 1, or None.
    if theta <= 0:
        return None
    P = 1.0 / theta
    Pr = int(round(P))
    if Pr >= 1 and abs(P - Pr) <= 1e-9 * P:
        return Pr
    return None


def _fold_axis(arr, axis, P, start):
    # Sum entries whose global index n (starting at `start`) agrees mod P.
    arr = np.moveaxis(arr, axis, -1)
    n = arr.shape[-1]
    lead = start % P
    total = lead + n
    pad_to = -(-total // P) * P
    padded = np.zeros(arr.shape[:-1] + (pad_to,), dtype=arr.dtype)
    padded[..., lead:lead + n] = arr
    folded = padded.reshape(arr.shape[:-1] + (pad_to // P, P)).sum(axis=-2)
    return np.moveaxis(folded, -1, axis)


def _unfold_axis(arr, axis, start, n):
    # Inverse of folding: entry for global index m is arr[m mod P].
    arr = np.moveaxis(arr, axis, -1)
    P = arr.shape[-1]
    idx = np.mod(np.arange(start, start + n), P)
    return np.moveaxis(arr[..., idx], -1, axis)


def phase_analysis(grid, values, theta, L):
    """``c_l = sum_n values_n exp(+2 pi i (n + 1/2) theta . l)`` for ``l in [-L, L]**d``.

    ``values`` lives on the grid; ``theta`` is ``h * nu * tau`` (same on each
    axis). When ``1/theta`` is an integer the sum is folded modulo the period
    and evaluated with one FFT per axis, otherwise it is summed directly.
    """
    d = grid.dimension
    ls = np.arange(-L, L + 1)
    P = _period(theta)
    if P is None:
        return _direct_analysis(grid, values, theta, ls)
    folded = values.astype(complex)
    for ax in range(d):
        folded = _fold_axis(folded, ax, P, -grid.half_count)
    # sum_r b_r exp(2 pi i r l / P) = P * ifft(b)[l mod P]
    spec = np.fft.ifftn(folded, axes=tuple(range(d))) * P ** d
    idx = np.mod(ls, P)
    half_phase = np.exp(1j * np.pi * theta * ls)
    out = spec
    for ax in range(d):
        out = np.take(out, idx, axis=ax)
        shape = [1] * d
        shape[ax] = len(ls)
        out = out * half_phase.reshape(shape)
    return out


def _direct_analysis(grid, values, theta, ls):
    nn = grid.index + 0.5
    E = np.exp(2j * np.pi * theta * np.outer(ls, nn))
    if grid.dimension == 1:
        return E @ values
    return E @ values @ E.T


def phase_synthesis(grid, coeffs, theta):
    """``g_n = sum_l coeffs_l exp(-2 pi i (n + 1/2) theta . l)`` on the grid."""
    d = grid.dimension
    L = (coeffs.shape[0] - 1) // 2
    ls = np.arange(-L, L + 1)
    P = _period(theta)
    N = 2 * grid.half_count
    if P is None:
        nn = grid.index + 0.5
        E = np.exp(-2j * np.pi * theta * np.outer(nn, ls))
        if d == 1:
            return E @ coeffs
        return E @ coeffs @ E.T
    half_phase = np.exp(-1j * np.pi * theta * ls)
    a = coeffs.astype(complex)
    for ax in range(d):
        shape = [1] * d
        shape[ax] = len(ls)
        a = a * half_phase.reshape(shape)
    # fold the l index modulo P, then a forward FFT gives sum_l a_l exp(-2 pi i m l / P)
    for ax in range(d):
        a = _fold_axis(a, ax, P, -L)
    spec = np.fft.fftn(a, axes=tuple(range(d)))
    for ax in range(d):
        spec = _unfold_axis(spec, ax, -grid.half_count, N)
    return spec

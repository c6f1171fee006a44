"""Frame elements, analysis, Gram matrices and the frame operator.

Frame elements are handled in the frequency domain. For a band ``sigma`` with
symbol ``Psi``, translation step ``tau`` and amplitude ``A``::

    F phi_{sigma, lambda}(w) = exp(-2 pi i w . lambda tau) * A * Psi(w)

with ``lambda = nu * l``, ``l`` in ``[-L, L]**d``.

===============  ===========  ==========================  ======================
set              tau          A                           Psi(w)
===============  ===========  ==========================  ======================
central          1            1                           phi_hat(w)
band j >= 0      2**-j        |Z|**-1/2 or 2**(-j d/2)    Phi_j(w)
band -j < 0      2**j         A_j * 2**(j d)              Phi_j(4**j w)
===============  ===========  ==========================  ======================

Coefficients are the Riemann sums ``c = h**d sum_n f_hat(w_n) conj(element(w_n))``
on the cell-centred grid; one FFT per band produces every ``l`` at once.
"""
from __future__ import annotations

import dataclasses
import functools
import io
from dataclasses import dataclass

import numpy as np

from .grid import grid_from_points, phase_analysis, phase_synthesis
from .partition import Band, FrequencyPartition
from .window import BandSymbol, Window

__all__ = [
    "BandwidthError",
    "FrameSpec",
    "FrameBand",
    "FrameIndex",
    "CoefficientTable",
    "frame_element_freq",
    "frame_element_time",
    "analyze",
    "naive_coefficient",
    "gram",
    "frame_operator_apply",
    "walnut_apply",
    "walnut_terms",
    "fmt",
]

BANDWIDTH_TOL = 1e-10


def fmt(x):
    """Fixed 17-significant-digit formatting used by every file writer."""
    return format(float(x) + 0.0, ".17g")


class BandwidthError(ValueError):
    """Signal energy outside the quadrature box exceeds the tolerance."""

    def __init__(self, tail, omega_max):
        super().__init__(
            f"signal tail mass {tail:.3e} outside |omega| <= {omega_max:g} exceeds {BANDWIDTH_TOL:g}"
        )
        self.tail = tail
        self.omega_max = omega_max


@dataclass(frozen=True)
class FrameBand:
    """One band of a frame: symbol, translation step, amplitude and scale index."""

    key: tuple
    j: int
    k: object
    band: Band | None
    tau: float
    amplitude: float
    symbol: BandSymbol = dataclasses.field(compare=False, hash=False)

    @property
    def is_central(self):
        return self.band is None

    def weight(self, s):
        return 1.0 if self.is_central else 2.0 ** (2 * self.j * s)


@dataclass(frozen=True)
class FrameSpec:
    """Full description of a truncated frame.

    Parameters
    ----------
    partition : FrequencyPartition
    window : Window
    nu : float
        Translation step; translations are ``lambda in nu Z^d``.
    s : float
        Sobolev index used for coefficient weights ``2**(2 j s)``.
    normalization : {'exact', 'dyadic'}
        ``|Z_{j,k}|**-1/2`` or ``2**(-j d / 2)``.
    seminorm_mode : bool
        Drop the central set and add contracted bands ``j = -j_neg .. -1``.
    lambda_max : float
        Keep ``|lambda_i| <= lambda_max``.
    omega_max, points : float, int
        Quadrature box half-width (default ``2**(j_max+1) + 8``) and target
        node count per axis.
    """

    partition: FrequencyPartition
    window: Window
    nu: float = 1.0
    s: float = 0.0
    normalization: str = "exact"
    seminorm_mode: bool = False
    j_neg: int = 6
    lambda_max: float = 16.0
    omega_max: float | None = None
    points: int = 2 ** 16

    def __post_init__(self):
        if self.partition.dimension != self.window.dimension:
            raise ValueError("window and partition dimensions differ")
        if not self.nu > 0:
            raise ValueError("nu must be positive")
        if not self.lambda_max > 0:
            raise ValueError("lambda_max must be positive")
        if self.s < 0:
            raise ValueError("s must be nonnegative")
        if self.normalization not in ("exact", "dyadic"):
            raise ValueError("normalization must be 'exact' or 'dyadic'")
        if self.seminorm_mode and self.j_neg < 0:
            raise ValueError("j_neg must be nonnegative")
        if self.omega_max is not None and self.omega_max < 2.0 ** (self.partition.j_max + 1):
            raise ValueError("omega_max must be at least 2**(j_max + 1)")
        if self.points < 2:
            raise ValueError("points must be >= 2")

    @property
    def dimension(self):
        return self.partition.dimension

    @property
    def grid(self):
        om = self.omega_max
        if om is None:
            om = 2.0 ** (self.partition.j_max + 1) + 8
        return grid_from_points(om, self.points, self.dimension)

    @property
    def L(self):
        return int(np.floor(self.lambda_max / self.nu + 1e-9))

    @property
    def l_values(self):
        return np.arange(-self.L, self.L + 1)

    def replace(self, **kw):
        return dataclasses.replace(self, **kw)

    def bands(self):
        return _bands(self.partition, self.window, self.normalization, self.seminorm_mode, self.j_neg)

    def band(self, key):
        for b in self.bands():
            if b.key == key:
                return b
        raise KeyError(f"band {key} is not part of this frame")

    def indices(self, keys=None, lmax=None):
        """All frame indices (optionally restricted to band keys and ``|l| <= lmax``)."""
        out = []
        ls = self.l_values if lmax is None else np.arange(-lmax, lmax + 1)
        for b in self.bands():
            if keys is not None and b.key not in keys:
                continue
            for lam in _lattice(ls, self.dimension):
                out.append(FrameIndex(b.key, tuple(self.nu * np.asarray(lam, float))))
        return out

    def to_json(self):
        g = self.grid
        return {
            "dimension": self.dimension,
            "partition": {"kind": self.partition.kind, "j_max": int(self.partition.j_max)},
            "window": self.window.to_json(),
            "nu": float(self.nu),
            "s": float(self.s),
            "normalization": self.normalization,
            "seminorm_mode": bool(self.seminorm_mode),
            "j_neg": int(self.j_neg),
            "lambda_max": float(self.lambda_max),
            "grid": {"omega_max": float(g.omega_max), "points": int(self.points)},
        }

    @classmethod
    def from_json(cls, data):
        part = FrequencyPartition.from_json(data["partition"])
        if "dimension" in data and int(data["dimension"]) != part.dimension:
            raise ValueError("spec dimension does not match the partition")
        grid = data.get("grid", {})
        return cls(
            partition=part,
            window=Window.from_json(data["window"]),
            nu=float(data.get("nu", 1.0)),
            s=float(data.get("s", 0.0)),
            normalization=data.get("normalization", "exact"),
            seminorm_mode=bool(data.get("seminorm_mode", False)),
            j_neg=int(data.get("j_neg", 6)),
            lambda_max=float(data.get("lambda_max", 16.0)),
            omega_max=grid.get("omega_max"),
            points=int(grid.get("points", 2 ** 16)),
        )


def _lattice(ls, d):
    if d == 1:
        return [(int(l),) for l in ls]
    return [(int(a), int(b)) for a in ls for b in ls]


@functools.lru_cache(maxsize=64)
def _bands(partition, window, normalization, seminorm_mode, j_neg):
    d = partition.dimension
    out = []
    if not seminorm_mode:
        out.append(FrameBand(("bullet",), 0, None, None, 1.0, 1.0, BandSymbol(window, None)))

    def amp(b):
        if normalization == "exact":
            return len(b.parent.lattice()) ** -0.5
        return 2.0 ** (-abs(b.j) * d / 2)

    if seminorm_mode:
        for b in partition.contracted_bands(j_neg):
            m = -b.j
            out.append(
                FrameBand((b.j, b.k), b.j, b.k, b, 2.0 ** m, amp(b) * 2.0 ** (m * d), BandSymbol(window, b))
            )
    for b in partition.bands:
        out.append(FrameBand((b.j, b.k), b.j, b.k, b, 2.0 ** -b.j, amp(b), BandSymbol(window, b)))
    return tuple(out)


@dataclass(frozen=True)
class FrameIndex:
    """Band key (``('bullet',)`` or ``(j, k)``) plus translation ``lambda``."""

    key: tuple
    lam: tuple

    @property
    def tag(self):
        return "bullet" if self.key == ("bullet",) else "band"


def _check_index(spec, idx):
    band = spec.band(idx.key)
    l = np.asarray(idx.lam, float) / spec.nu
    if len(l) != spec.dimension:
        raise ValueError("translation has the wrong dimension")
    if np.any(np.abs(l - np.rint(l)) > 1e-9) or np.any(np.abs(l) > spec.L + 1e-9):
        raise ValueError(f"translation {idx.lam} is outside the truncated lattice")
    return band


def _dot(omega, vec, d):
    if d == 1:
        return omega * vec[0]
    return omega[..., 0] * vec[0] + omega[..., 1] * vec[1]


def frame_element_freq(spec, idx, omega):
    """Fourier transform of the frame element ``idx`` at frequency points ``omega``."""
    band = _check_index(spec, idx)
    omega = np.asarray(omega, dtype=float)
    shift = np.asarray(idx.lam, float) * band.tau
    phase = np.exp(-2j * np.pi * _dot(omega, shift, spec.dimension))
    return phase * band.amplitude * band.symbol(omega)


def _modulated_sum(window, lattice, u, d):
    # sum_eta exp(2 pi i eta . u) * phi(u)
    total = np.zeros(u.shape[:-1] if d == 2 else u.shape, dtype=complex)
    for eta in lattice:
        total += np.exp(2j * np.pi * _dot(u, np.atleast_1d(eta), d))
    return total * window.time(u)


def frame_element_time(spec, idx, t):
    """Frame element ``idx`` evaluated directly in time at points ``t``."""
    band = _check_index(spec, idx)
    d = spec.dimension
    t = np.asarray(t, dtype=float)
    shift = np.asarray(idx.lam, float) * band.tau
    u = t - (shift[0] if d == 1 else shift)
    w = spec.window
    if band.is_central:
        return w.time(u).astype(complex)
    lattice = band.band.parent.lattice()
    if band.j >= 0:
        return band.amplitude * _modulated_sum(w, lattice, u, d)
    m = -band.j
    base = band.amplitude * 2.0 ** (-m * d)  # parent amplitude
    return 2.0 ** (-m * d) * base * _modulated_sum(w, lattice, u / 4.0 ** m, d)


@functools.lru_cache(maxsize=2)
def _symbol_samples(spec):
    pts = spec.grid.points()
    return tuple(b.symbol(pts) for b in spec.bands())


class CoefficientTable:
    """Frame coefficients per band over the truncated translation lattice.

    ``blocks[key]`` has shape ``(2L+1,)*d`` and is indexed by ``l + L`` with
    ``lambda = nu * l``.
    """

    def __init__(self, spec, blocks, signal_id="", path="fast"):
        self.spec = spec
        self.blocks = blocks
        self.signal_id = signal_id
        self.path = path

    @property
    def seminorm_mode(self):
        return self.spec.seminorm_mode

    def keys(self):
        return [b.key for b in self.spec.bands() if b.key in self.blocks]

    def __getitem__(self, idx):
        block = self.blocks[idx.key]
        l = np.rint(np.asarray(idx.lam, float) / self.spec.nu).astype(int) + self.spec.L
        return complex(block[tuple(l)])

    def items(self):
        """Iterate ``(FrameIndex, value)`` band-major, then ``lambda`` lexicographic."""
        ls = self.spec.l_values
        L = self.spec.L
        for key in self.keys():
            block = self.blocks[key]
            for lam in _lattice(ls, self.spec.dimension):
                yield FrameIndex(key, tuple(self.spec.nu * np.asarray(lam, float))), complex(
                    block[tuple(np.asarray(lam) + L)]
                )

    def band_energy(self):
        return {key: float(np.sum(np.abs(self.blocks[key]) ** 2)) for key in self.keys()}

    def weighted_energy(self, s):
        total = 0.0
        for b in self.spec.bands():
            if b.key in self.blocks:
                total += b.weight(s) * float(np.sum(np.abs(self.blocks[b.key]) ** 2))
        return total

    def truncation_estimate(self):
        """Share of coefficient energy in the outermost 10% of translations."""
        L = self.spec.L
        edge = max(1, int(np.ceil(0.1 * (2 * L + 1) / 2)))
        ls = np.abs(self.spec.l_values)
        outer = ls > L - edge
        tot = out = 0.0
        for key in self.keys():
            e = np.abs(self.blocks[key]) ** 2
            tot += e.sum()
            mask = outer
            if self.spec.dimension == 2:
                mask = outer[:, None] | outer[None, :]
            out += e[mask].sum()
        return out / tot if tot > 0 else 0.0

    def to_csv(self, s=None):
        s = self.spec.s if s is None else s
        d = self.spec.dimension
        lam_cols = ["lambda"] if d == 1 else ["lambda1", "lambda2"]
        buf = io.StringIO()
        buf.write(",".join(["tag", "j", "k", *lam_cols, "re", "im", "weight"]) + "\n")
        weights = {b.key: b.weight(s) for b in self.spec.bands()}
        for idx, val in self.items():
            if idx.key == ("bullet",):
                tag, j, k = "bullet", "", ""
            else:
                tag, j, k = "band", str(idx.key[0]), str(idx.key[1])
            row = [tag, j, k, *(fmt(x) for x in idx.lam), fmt(val.real), fmt(val.imag), fmt(weights[idx.key])]
            buf.write(",".join(row) + "\n")
        return buf.getvalue()


def _check_bandwidth(spec, signal):
    tail = signal.tail_mass(spec.grid.omega_max)
    if tail > BANDWIDTH_TOL:
        raise BandwidthError(tail, spec.grid.omega_max)


def analyze(spec, signal, check_bandwidth=True):
    """Frame coefficients of ``signal`` for every band and translation of ``spec``."""
    if check_bandwidth:
        _check_bandwidth(spec, signal)
    grid = spec.grid
    fhat = np.asarray(signal.freq(grid.points()), dtype=complex)
    blocks = {}
    shape = (2 * spec.L + 1,) * spec.dimension
    for band, psi in zip(spec.bands(), _symbol_samples(spec)):
        g = fhat * np.conj(psi) * grid.cell
        if not np.any(g):
            blocks[band.key] = np.zeros(shape, dtype=complex)
            continue
        theta = grid.spacing * spec.nu * band.tau
        blocks[band.key] = band.amplitude * phase_analysis(grid, g, theta, spec.L)
    return CoefficientTable(spec, blocks, getattr(signal, "signal_id", ""), "fast")


def naive_coefficient(spec, signal, idx):
    """Single coefficient by direct quadrature (reference path)."""
    grid = spec.grid
    pts = grid.points()
    vals = signal.freq(pts) * np.conj(frame_element_freq(spec, idx, pts))
    return complex(np.sum(vals) * grid.cell)


def gram(spec, indices):
    """Gram matrix ``G[a, b] = <phi_a, phi_b>`` by frequency quadrature."""
    if len(indices) == 0:
        raise ValueError("gram needs at least one index")
    grid = spec.grid
    d = spec.dimension
    pts = grid.points().reshape(-1, d) if d == 2 else grid.points()
    groups = {}
    for pos, idx in enumerate(indices):
        _check_index(spec, idx)
        groups.setdefault(idx.key, []).append(pos)
    bands = {b.key: b for b in spec.bands()}
    samples = dict(zip([b.key for b in spec.bands()], _symbol_samples(spec)))
    G = np.zeros((len(indices), len(indices)), dtype=complex)
    keys = list(groups)
    for ia, ka in enumerate(keys):
        for kb in keys[ia:]:
            A, B = bands[ka], bands[kb]
            pa = samples[ka].reshape(-1)
            pb = samples[kb].reshape(-1)
            w = pa * np.conj(pb) * grid.cell
            nz = np.nonzero(w)[0]
            if len(nz) == 0:
                continue
            om = pts[nz]
            la = np.array([indices[p].lam for p in groups[ka]]) * A.tau
            lb = np.array([indices[p].lam for p in groups[kb]]) * B.tau
            Ea = np.exp(-2j * np.pi * (om @ la.T if d == 2 else np.outer(om, la[:, 0]))).T
            Eb = np.exp(-2j * np.pi * (om @ lb.T if d == 2 else np.outer(om, lb[:, 0]))).T
            block = (Ea * w[nz]) @ Eb.conj().T * (A.amplitude * B.amplitude)
            G[np.ix_(groups[ka], groups[kb])] = block
            if ka != kb:
                G[np.ix_(groups[kb], groups[ka])] = block.conj().T
    return G


def frame_operator_apply(spec, signal, s=None, check_bandwidth=True):
    """Grid samples of ``F(S^s f)``: analysis followed by weighted synthesis."""
    s = spec.s if s is None else s
    table = analyze(spec, signal, check_bandwidth)
    grid = spec.grid
    out = np.zeros(grid.shape, dtype=complex)
    for band, psi in zip(spec.bands(), _symbol_samples(spec)):
        c = table.blocks[band.key]
        if not np.any(c) or not np.any(psi):
            continue
        theta = grid.spacing * spec.nu * band.tau
        out += band.weight(s) * band.amplitude * psi * phase_synthesis(grid, c, theta)
    return out


def _shifted(arr, shift):
    # arr[n + shift] with zero fill outside the grid, per axis
    out = np.zeros_like(arr)
    src = []
    dst = []
    for ax, sh in enumerate(shift):
        n = arr.shape[ax]
        if abs(sh) >= n:
            return out
        if sh >= 0:
            src.append(slice(sh, n))
            dst.append(slice(0, n - sh))
        else:
            src.append(slice(0, n + sh))
            dst.append(slice(-sh, n))
    out[tuple(dst)] = arr[tuple(src)]
    return out


def _support_box(arr, rel=1e-18):
    # Index bounding box of entries above rel * max|arr|, per axis.
    mag = np.abs(arr)
    top = mag.max()
    if top == 0:
        return None
    mask = mag > rel * top
    box = []
    for ax in range(arr.ndim):
        other = tuple(i for i in range(arr.ndim) if i != ax)
        hit = np.nonzero(mask.any(axis=other) if other else mask)[0]
        box.append((int(hit[0]), int(hit[-1])))
    return box


def walnut_terms(spec, signal, key, s=None):
    """Yield ``(m, samples)`` for each nonzero translate term of one band.

    The term is ``w A^2 (nu tau)^-d Psi(w) (f_hat conj(Psi))(w + m / (nu tau))``.
    Shifts that are multiples of the grid spacing reuse grid samples; other
    shifts are evaluated directly. Aligned shifts whose support box (entries
    above 1e-18 of the peak) misses the symbol's support box are skipped.
    """
    s = spec.s if s is None else s
    grid = spec.grid
    d = spec.dimension
    band = spec.band(key)
    pts = grid.points()
    keys = [b.key for b in spec.bands()]
    psi = _symbol_samples(spec)[keys.index(key)]
    if not np.any(psi):
        return
    fhat = np.asarray(signal.freq(pts), dtype=complex)
    prod = fhat * np.conj(psi)
    period = 1.0 / (spec.nu * band.tau)
    scale = band.weight(s) * band.amplitude ** 2 * period ** d
    M = int(np.ceil(2 * grid.omega_max / period)) + 1
    ms = range(-M, M + 1)
    cells = period / grid.spacing
    aligned = abs(cells - round(cells)) < 1e-9
    if aligned:
        box_p = _support_box(prod)
        box_s = _support_box(psi)
        if box_p is None:
            return
    for m in (_lattice(ms, d)):
        if aligned:
            shift_cells = [int(round(mi * cells)) for mi in m]
            # the shifted product occupies box_p - shift; skip if it misses psi
            if any(
                lo - sh > hi_s or hi - sh < lo_s
                for (lo, hi), (lo_s, hi_s), sh in zip(box_p, box_s, shift_cells)
            ):
                continue
            shifted = _shifted(prod, shift_cells)
        else:
            offset = np.asarray(m, float) * period
            q = pts + (offset[0] if d == 1 else offset)
            shifted = np.asarray(signal.freq(q), dtype=complex) * np.conj(band.symbol(q))
        if np.any(shifted):
            yield m, scale * psi * shifted


def walnut_apply(spec, signal, s=None, check_bandwidth=True):
    """Grid samples of ``F(S^s f)`` from the translate-sum representation."""
    if check_bandwidth:
        _check_bandwidth(spec, signal)
    out = np.zeros(spec.grid.shape, dtype=complex)
    for band in spec.bands():
        for _, term in walnut_terms(spec, signal, band.key, s):
            out += term
    return out

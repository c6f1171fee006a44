"""Test signals, reference Sobolev norms, coefficient energies and frame-bound estimates."""
from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from .frame import analyze, fmt, frame_element_freq, frame_element_time
from .grid import FrequencyGrid

__all__ = [
    "Signal",
    "GaussianSignal",
    "BumpSignal",
    "FrameElementSignal",
    "MixtureSignal",
    "DilatedSignal",
    "TranslatedSignal",
    "ZeroSignal",
    "LCG",
    "BoundEstimate",
    "sobolev_norm_sq",
    "sobolev_seminorm_sq",
    "coefficient_energy",
    "seminorm_energy",
    "estimate_frame_bounds",
    "scan_nu",
    "default_family",
    "dilation_family",
    "gaussian_mixture_family",
    "band_limited_family",
]

TAIL_TOL = 1e-10


class Signal:
    """Base class: frequency evaluation, effective radius and tail mass."""

    dimension = 1
    signal_id = ""

    def freq(self, omega):
        raise NotImplementedError

    def radius(self):
        """Half-width of a box outside which ``|f_hat|**2`` carries < 1e-16 of the energy."""
        raise NotImplementedError

    def tail_mass(self, omega_max):
        """Relative energy outside ``[-omega_max, omega_max]**d``."""
        return _numeric_tail(self, omega_max)

    def energy(self):
        return sobolev_norm_sq(self, 0.0)


def _numeric_tail(sig, omega_max):
    R = max(4 * omega_max, 4 * sig.radius(), 64.0)
    h = 1.0 / 32 if sig.dimension == 1 else 1.0 / 8
    grid = FrequencyGrid(int(np.ceil(R / h)), h, sig.dimension)
    pts = grid.points()
    e = np.abs(sig.freq(pts)) ** 2
    if sig.dimension == 1:
        outside = np.abs(pts) > omega_max
    else:
        outside = np.max(np.abs(pts), axis=-1) > omega_max
    tot = e.sum()
    return float(e[outside].sum() / tot) if tot > 0 else 0.0


def _dot(omega, vec, d):
    if d == 1:
        return omega * vec[0]
    return omega[..., 0] * vec[0] + omega[..., 1] * vec[1]


def _sq(omega, d):
    return omega * omega if d == 1 else np.sum(omega * omega, axis=-1)


@dataclass(frozen=True)
class GaussianSignal(Signal):
    """``amp * exp(-pi |t - t0|^2 / a^2) * exp(2 pi i w0 . t)``.

    Its transform is ``amp * a^d exp(-pi a^2 |w - w0|^2) exp(-2 pi i (w - w0) . t0)``.
    """

    a: float = 1.0
    t0: tuple = (0.0,)
    w0: tuple = (0.0,)
    amp: complex = 1.0
    signal_id: str = "gaussian"

    @property
    def dimension(self):
        return len(self.t0)

    def freq(self, omega):
        d = self.dimension
        omega = np.asarray(omega, dtype=float)
        w0 = np.asarray(self.w0, float)
        shifted = omega - (w0[0] if d == 1 else w0)
        return (
            self.amp
            * self.a ** d
            * np.exp(-np.pi * self.a ** 2 * _sq(shifted, d))
            * np.exp(-2j * np.pi * _dot(shifted, self.t0, d))
        )

    def time(self, t):
        d = self.dimension
        t = np.asarray(t, dtype=float)
        t0 = np.asarray(self.t0, float)
        u = t - (t0[0] if d == 1 else t0)
        return self.amp * np.exp(-np.pi * _sq(u, d) / self.a ** 2) * np.exp(2j * np.pi * _dot(t, self.w0, d))

    def radius(self):
        return float(np.max(np.abs(self.w0))) + 6.0 / (np.sqrt(2 * np.pi) * self.a)

    def tail_mass(self, omega_max):
        c = np.sqrt(2 * np.pi) * self.a
        logp = 0.0
        for w in self.w0:
            t = 0.5 * (erfc(c * (omega_max - w)) + erfc(c * (omega_max + w)))
            logp += np.log1p(-min(t, 1.0)) if t < 1 else -np.inf
        return float(-np.expm1(logp))

    def energy(self):
        return float(abs(self.amp) ** 2 * (self.a / np.sqrt(2)) ** self.dimension)


@dataclass(frozen=True)
class BumpSignal(Signal):
    """Smooth compactly supported spectrum ``amp * exp(-1 / (1 - u^2))``, ``u = (w - center) / width``."""

    center: float = 0.0
    width: float = 1.0
    amp: complex = 1.0
    signal_id: str = "bump"
    dimension = 1

    def freq(self, omega):
        u = (np.asarray(omega, dtype=float) - self.center) / self.width
        inside = np.abs(u) < 1
        safe = np.where(inside, 1 - u * u, 1.0)
        return self.amp * np.where(inside, np.exp(-1.0 / safe), 0.0)

    def radius(self):
        return abs(self.center) + self.width

    def tail_mass(self, omega_max):
        if abs(self.center) + self.width <= omega_max:
            return 0.0
        return _numeric_tail(self, omega_max)


@dataclass(frozen=True)
class FrameElementSignal(Signal):
    """A frame element used as a signal."""

    spec: object = None
    index: object = None
    signal_id: str = "frame_element"

    @property
    def dimension(self):
        return self.spec.dimension

    def freq(self, omega):
        return frame_element_freq(self.spec, self.index, omega)

    def time(self, t):
        return frame_element_time(self.spec, self.index, t)

    def radius(self):
        w = self.spec.window
        band = self.spec.band(self.index.key)
        if np.isfinite(w.freq_radius):
            if band.band is None:
                return w.freq_radius
            return band.band.radii[1] + w.freq_radius * band.band.scale
        return self.spec.grid.omega_max


@dataclass(frozen=True)
class MixtureSignal(Signal):
    """Finite linear combination ``sum_i c_i f_i``."""

    terms: tuple = ()
    signal_id: str = "mixture"

    @property
    def dimension(self):
        return self.terms[0][1].dimension if self.terms else 1

    def freq(self, omega):
        omega = np.asarray(omega, dtype=float)
        out = np.zeros(omega.shape[:-1] if self.dimension == 2 else omega.shape, dtype=complex)
        for c, sig in self.terms:
            out = out + c * sig.freq(omega)
        return out

    def time(self, t):
        return sum(c * sig.time(t) for c, sig in self.terms)

    def radius(self):
        return max((sig.radius() for _, sig in self.terms), default=1.0)

    def tail_mass(self, omega_max):
        # Triangle inequality on the tail norms.
        h0 = 1.0 / 256 if self.dimension == 1 else 1.0 / 64
        total = _weighted_integral(self, lambda p: 1.0, h0, 1e-6, 2 ** 22)
        if total == 0:
            return 0.0
        tail = sum(abs(c) * np.sqrt(sig.tail_mass(omega_max) * sig.energy()) for c, sig in self.terms)
        return float(tail ** 2 / total)


@dataclass(frozen=True)
class DilatedSignal(Signal):
    """``D_a f(t) = a^{-d/2} f(t / a)``, transform ``a^{d/2} f_hat(a w)``."""

    base: Signal = None
    a: float = 1.0
    signal_id: str = "dilated"

    @property
    def dimension(self):
        return self.base.dimension

    def freq(self, omega):
        return self.a ** (self.dimension / 2) * self.base.freq(self.a * np.asarray(omega, dtype=float))

    def time(self, t):
        return self.a ** (-self.dimension / 2) * self.base.time(np.asarray(t, dtype=float) / self.a)

    def radius(self):
        return self.base.radius() / self.a

    def tail_mass(self, omega_max):
        return self.base.tail_mass(self.a * omega_max)

    def energy(self):
        return self.base.energy()


@dataclass(frozen=True)
class TranslatedSignal(Signal):
    """``T_x f(t) = f(t - x)``, transform ``exp(-2 pi i w . x) f_hat(w)``."""

    base: Signal = None
    shift: tuple = (0.0,)
    signal_id: str = "translated"

    @property
    def dimension(self):
        return self.base.dimension

    def freq(self, omega):
        omega = np.asarray(omega, dtype=float)
        return np.exp(-2j * np.pi * _dot(omega, self.shift, self.dimension)) * self.base.freq(omega)

    def time(self, t):
        t = np.asarray(t, dtype=float)
        x = np.asarray(self.shift, float)
        return self.base.time(t - (x[0] if self.dimension == 1 else x))

    def radius(self):
        return self.base.radius()

    def tail_mass(self, omega_max):
        return self.base.tail_mass(omega_max)

    def energy(self):
        return self.base.energy()


@dataclass(frozen=True)
class ZeroSignal(Signal):
    dim: int = 1
    signal_id: str = "zero"

    @property
    def dimension(self):
        return self.dim

    def freq(self, omega):
        omega = np.asarray(omega, dtype=float)
        return np.zeros(omega.shape[:-1] if self.dim == 2 else omega.shape, dtype=complex)

    def time(self, t):
        t = np.asarray(t, dtype=float)
        return np.zeros(t.shape[:-1] if self.dim == 2 else t.shape, dtype=complex)

    def radius(self):
        return 1.0

    def tail_mass(self, omega_max):
        return 0.0

    def energy(self):
        return 0.0


def _weighted_integral(signal, weight, h0, rtol, max_points):
    R = signal.radius()
    d = signal.dimension
    h = h0
    prev = None
    while True:
        grid = FrequencyGrid(int(np.ceil(R / h)), h, d)
        pts = grid.points()
        val = float(grid.integrate(weight(pts) * np.abs(signal.freq(pts)) ** 2))
        if prev is not None and abs(val - prev) <= rtol * abs(val):
            return val
        if prev is not None and val == 0.0 == prev:
            return 0.0
        if (2 * grid.half_count * 2) ** d > max_points:
            return val
        prev = val
        h /= 2


def _norm(pts, d):
    return np.abs(pts) if d == 1 else np.hypot(pts[..., 0], pts[..., 1])


def _reference(signal, s, grid, rtol, seminorm):
    if s < 0:
        raise ValueError("s must be nonnegative")
    tail = signal.tail_mass(signal.radius())
    if tail > TAIL_TOL:
        raise ValueError(f"signal tail mass {tail:.3e} above {TAIL_TOL:g} outside its radius")
    d = signal.dimension
    h0 = grid.spacing / 4 if grid is not None else 1.0 / 256
    if d == 2:
        h0 = max(h0, 1.0 / 64)
    if seminorm:
        weight = lambda p: _norm(p, d) ** (2 * s)  # noqa: E731
    else:
        weight = lambda p: (1 + _norm(p, d)) ** (2 * s)  # noqa: E731
    cap = 2 ** 23 if d == 1 else 2 ** 24
    return _weighted_integral(signal, weight, h0, rtol, cap)


def sobolev_norm_sq(signal, s, grid=None, rtol=1e-8):
    """``int (1 + |w|)^(2s) |f_hat(w)|^2 dw`` by refined midpoint quadrature.

    Starts at a quarter of ``grid``'s spacing (or 1/256) and halves the step
    until the value moves by less than ``rtol`` relative.
    """
    return _reference(signal, s, grid, rtol, seminorm=False)


def sobolev_seminorm_sq(signal, s, grid=None, rtol=1e-8):
    """``int |w|^(2s) |f_hat(w)|^2 dw`` by refined midpoint quadrature."""
    return _reference(signal, s, grid, rtol, seminorm=True)


def coefficient_energy(table, s):
    """``sum |c_bullet|^2 + sum 2^(2js) |c_jk|^2`` for a norm-mode table."""
    if table.seminorm_mode:
        raise ValueError("coefficient_energy needs a norm-mode table")
    return table.weighted_energy(s)


def seminorm_energy(table, s):
    """``sum_{j in [-j_neg, j_max]} 2^(2js) |c_jk|^2`` for a seminorm-mode table."""
    if not table.seminorm_mode:
        raise ValueError("seminorm_energy needs a seminorm-mode table")
    return table.weighted_energy(s)


class LCG:
    """64-bit linear congruential generator (Knuth's MMIX constants).

    ``x <- (6364136223846793005 x + 1442695040888963407) mod 2**64``;
    uniforms use the top 53 bits. Chosen so signal families are identical
    on every platform and numpy version.
    """

    A = 6364136223846793005
    C = 1442695040888963407
    MASK = (1 << 64) - 1

    def __init__(self, seed=0):
        self.state = (int(seed) ^ 0x9E3779B97F4A7C15) & self.MASK
        self.next()

    def next(self):
        self.state = (self.A * self.state + self.C) & self.MASK
        return self.state

    def uniform(self, lo=0.0, hi=1.0):
        return lo + (hi - lo) * (self.next() >> 11) / float(1 << 53)

    def choice(self, n):
        return int(self.uniform() * n) % n


def default_family(seed=0):
    """20 Gaussians: dilations {1/4,1/2,1,2,4} x two modulations x two translations."""
    rng = LCG(seed)
    mods = (0.0, rng.uniform(1.0, 3.0))
    shifts = (0.0, rng.uniform(-1.5, 1.5))
    out = []
    for a in (0.25, 0.5, 1.0, 2.0, 4.0):
        for w0 in mods:
            for t0 in shifts:
                out.append(GaussianSignal(a, (t0,), (w0,), 1.0, f"gauss_a{a:g}_w{w0:.4f}_t{t0:.4f}"))
    return out


def dilation_family(base=None, dilations=None):
    """``D_a f`` for a base signal (default the unit Gaussian)."""
    base = GaussianSignal() if base is None else base
    if dilations is None:
        dilations = 2.0 ** (np.arange(-4, 5) / 2)
    return [DilatedSignal(base, float(a), f"dilate_{a:.6g}") for a in dilations]


def gaussian_mixture_family(count=5, seed=0, components=3, t_range=(-1.0, 1.0), w_range=(-4.0, 4.0),
                            a_range=(0.7, 1.5)):
    """Seeded sums of modulated, translated Gaussians with complex weights."""
    rng = LCG(seed)
    out = []
    for i in range(count):
        terms = []
        for _ in range(components):
            g = GaussianSignal(rng.uniform(*a_range), (rng.uniform(*t_range),), (rng.uniform(*w_range),))
            c = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            terms.append((c, g))
        out.append(MixtureSignal(tuple(terms), f"mixture_{seed}_{i}"))
    return out


def band_limited_family(partition, count=10, seed=0, width=6.0):
    """Gaussians centred inside bands with ``a = width / 2**j``.

    The spectral spread scales with the band, so the spectrum is below
    ~1e-12 of its peak at the band edges and the time spread fits inside
    ``|t| <= 16 / 2**j``.
    """
    if partition.dimension != 1:
        raise ValueError("band_limited_family is 1D")
    rng = LCG(seed)
    sets = [None] + list(partition.bands)
    out = []
    for i in range(count):
        terms = []
        for _ in range(1 + rng.choice(3)):
            b = sets[rng.choice(len(sets))]
            if b is None:
                centre, a = 0.0, width
            else:
                lo, hi = b.interval
                centre, a = 0.5 * (lo + hi), width / 2.0 ** b.j
            c = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            terms.append((c, GaussianSignal(a, (0.0,), (centre,))))
        out.append(MixtureSignal(tuple(terms), f"bandlimited_{seed}_{i}"))
    return out


@dataclass
class BoundEstimate:
    """Ratios of coefficient energy to the reference (semi)norm over a family."""

    A_hat: float
    B_hat: float
    ratios: list
    energies: list
    norms: list
    ids: list
    s: float
    nu: float
    seminorm: bool = False
    notes: dict = field(default_factory=dict)

    @property
    def ratio(self):
        return self.B_hat / self.A_hat if self.A_hat > 0 else np.inf

    def to_csv(self):
        buf = io.StringIO()
        buf.write("signal_id,ratio,energy,norm_sq\n")
        for i, r, e, n in zip(self.ids, self.ratios, self.energies, self.norms):
            buf.write(f"{i},{fmt(r)},{fmt(e)},{fmt(n)}\n")
        return buf.getvalue()


def estimate_frame_bounds(spec, family, s=None):
    """Per-signal ratios ``energy / norm`` and their min/max.

    In seminorm mode the energy is the seminorm energy and the reference is
    ``|f|_s^2``; otherwise ``||f||_s^2``.
    """
    s = spec.s if s is None else s
    if len(family) == 0:
        raise ValueError("family must be nonempty")
    ratios, energies, norms, ids = [], [], [], []
    for sig in family:
        table = analyze(spec, sig)
        if spec.seminorm_mode:
            e = seminorm_energy(table, s)
            n = sobolev_seminorm_sq(sig, s, spec.grid)
        else:
            e = coefficient_energy(table, s)
            n = sobolev_norm_sq(sig, s, spec.grid)
        if n <= 0:
            raise ValueError(f"family member {sig.signal_id!r} has zero norm")
        ratios.append(e / n)
        energies.append(e)
        norms.append(n)
        ids.append(sig.signal_id)
    return BoundEstimate(min(ratios), max(ratios), ratios, energies, norms, ids, s, spec.nu, spec.seminorm_mode)


def scan_nu(spec, family, s=None, nus=(1.0, 0.5, 0.25)):
    """Bound estimates for each translation step in ``nus``."""
    for nu in nus:
        if not 0 < nu <= 1:
            raise ValueError("nu values must lie in (0, 1]")
    return [estimate_frame_bounds(spec.replace(nu=float(nu)), family, s) for nu in nus]

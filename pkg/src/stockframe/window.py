"""Window catalog and band symbols.

Fourier convention: ``F u(w) = int exp(-2 pi i x w) u(x) dx``. Every catalog
window is real and even, so its frequency response is real.

==================  ===========================  ============================
kind                time domain                  frequency domain
==================  ===========================  ============================
gaussian            exp(-pi t^2)                 exp(-pi w^2)
sinc_pow(n)         sinc(t)^n                    centred cardinal B-spline B_n
boxcar              indicator of (-1/2, 1/2)     sinc(w)
bspline_freq(n)     B_n(t)                       sinc(w)^n
tensor(wx, wy)      product (2D only)            product
==================  ===========================  ============================

``sinc`` denotes the normalized ``sin(pi x)/(pi x)``. The "sinc window" of
the orthonormal-basis example is ``sinc_pow(1)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .partition import Band

__all__ = [
    "Window",
    "BandSymbol",
    "cardinal_bspline",
    "window_time",
    "window_freq",
    "band_symbol",
    "gaussian",
    "sinc_window",
    "sinc_pow",
    "boxcar",
    "bspline_freq",
    "tensor",
    "zero_window",
]

# exp(-pi x^2) is exactly 0.0 in double precision for |x| > 15.41
_GAUSS_RADIUS = 15.5


def cardinal_bspline(x, n):
    """Centred cardinal B-spline of order ``n`` (``n``-fold convolution of the unit box).

    Uses the recursion
    ``B_n(x) = [(n/2 + x) B_{n-1}(x + 1/2) + (n/2 - x) B_{n-1}(x - 1/2)] / (n - 1)``
    with ``B_1`` equal to 1 on (-1/2, 1/2) and 1/2 at the endpoints.
    """
    if n < 1:
        raise ValueError("B-spline order must be >= 1")
    x = np.asarray(x, dtype=float)
    # B_m is needed at x + o for offsets o = -(n-m)/2, ..., (n-m)/2 (step 1)
    offsets = np.arange(n) - (n - 1) / 2.0
    vals = []
    for o in offsets:
        ax = np.abs(x + o)
        vals.append(np.where(ax < 0.5, 1.0, np.where(ax == 0.5, 0.5, 0.0)))
    for m in range(2, n + 1):
        offsets = np.arange(n - m + 1) - (n - m) / 2.0
        new = []
        for i, o in enumerate(offsets):
            y = x + o
            new.append(((m / 2 + y) * vals[i + 1] + (m / 2 - y) * vals[i]) / (m - 1))
        vals = new
    return vals[0]


@dataclass(frozen=True)
class Window:
    """Catalog window.

    Parameters
    ----------
    kind : str
        One of ``gaussian``, ``sinc_pow``, ``boxcar``, ``bspline_freq``,
        ``tensor``, ``zero``.
    n : int, optional
        Power/order for ``sinc_pow`` and ``bspline_freq``.
    factors : tuple of Window, optional
        The two 1D factors of a ``tensor`` window.
    """

    kind: str
    n: int | None = None
    factors: tuple = ()

    def __post_init__(self):
        kinds = ("gaussian", "sinc_pow", "boxcar", "bspline_freq", "tensor", "zero")
        if self.kind not in kinds:
            raise ValueError(f"unknown window kind {self.kind!r}")
        if self.kind in ("sinc_pow", "bspline_freq") and (self.n is None or self.n < 1):
            raise ValueError(f"{self.kind} needs an integer order n >= 1")
        if self.kind == "tensor":
            if len(self.factors) != 2 or any(f.dimension != 1 for f in self.factors):
                raise ValueError("tensor windows take exactly two 1D factors")

    @property
    def dimension(self):
        return 2 if self.kind == "tensor" else 1

    @property
    def name(self):
        if self.kind == "tensor":
            return "tensor(" + ",".join(f.name for f in self.factors) + ")"
        if self.kind == "sinc_pow" and self.n == 1:
            return "sinc"
        return f"{self.kind}({self.n})" if self.n is not None else self.kind

    @property
    def freq_radius(self):
        """Radius outside which the frequency response is exactly zero (per axis)."""
        if self.kind == "gaussian":
            return _GAUSS_RADIUS
        if self.kind == "sinc_pow":
            return self.n / 2.0
        if self.kind == "zero":
            return 0.0
        if self.kind == "tensor":
            return max(f.freq_radius for f in self.factors)
        return np.inf

    @property
    def time_radius(self):
        """Radius outside which the time function is zero (inf if not compact)."""
        if self.kind == "boxcar":
            return 0.5
        if self.kind == "bspline_freq":
            return self.n / 2.0
        if self.kind == "gaussian":
            return _GAUSS_RADIUS
        if self.kind == "zero":
            return 0.0
        if self.kind == "tensor":
            return max(f.time_radius for f in self.factors)
        return np.inf

    def time(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "tensor":
            return self.factors[0].time(t[..., 0]) * self.factors[1].time(t[..., 1])
        if self.kind == "gaussian":
            return np.exp(-np.pi * t * t)
        if self.kind == "sinc_pow":
            return np.sinc(t) ** self.n
        if self.kind == "boxcar":
            return cardinal_bspline(t, 1)
        if self.kind == "bspline_freq":
            return cardinal_bspline(t, self.n)
        return np.zeros_like(t)

    def freq(self, omega):
        omega = np.asarray(omega, dtype=float)
        if self.kind == "tensor":
            return self.factors[0].freq(omega[..., 0]) * self.factors[1].freq(omega[..., 1])
        if self.kind == "gaussian":
            return np.exp(-np.pi * omega * omega)
        if self.kind == "sinc_pow":
            return cardinal_bspline(omega, self.n)
        if self.kind == "boxcar":
            return np.sinc(omega)
        if self.kind == "bspline_freq":
            return np.sinc(omega) ** self.n
        return np.zeros_like(omega)

    def to_json(self):
        out = {"kind": self.kind, "dimension": self.dimension}
        if self.n is not None:
            out["n"] = int(self.n)
        if self.kind == "tensor":
            out["factors"] = [f.to_json() for f in self.factors]
        return out

    @classmethod
    def from_json(cls, data):
        kind = data["kind"]
        if kind == "sinc":
            return sinc_window()
        if kind == "tensor":
            return tensor(*(cls.from_json(f) for f in data["factors"]))
        w = cls(kind, data.get("n"))
        if "dimension" in data and int(data["dimension"]) != w.dimension:
            raise ValueError("window dimension does not match its kind")
        return w


def gaussian():
    return Window("gaussian")


def sinc_pow(n):
    return Window("sinc_pow", int(n))


def sinc_window():
    return Window("sinc_pow", 1)


def boxcar():
    return Window("boxcar")


def bspline_freq(n):
    return Window("bspline_freq", int(n))


def tensor(wx, wy):
    return Window("tensor", factors=(wx, wy))


def zero_window():
    return Window("zero")


def window_time(w, t):
    return w.time(t)


def window_freq(w, omega):
    return w.freq(omega)


def _boxcar_sum(omega, a, b):
    """``sum_{eta=a}^{b} sinc(omega - eta)`` with pairwise grouping.

    Writing ``sin(pi (w - eta)) = (-1)^eta sin(pi w)``, consecutive terms
    combine to ``(-1)^(eta+1) sin(pi w) / (pi (w - eta)(w - eta - 1))``,
    which avoids cancellation between neighbouring large terms. The pair
    holding the nearest integer to ``w`` is evaluated directly.
    """
    omega = np.asarray(omega, dtype=float)
    r = np.rint(omega)
    delta = omega - r
    sin_pw = np.where(np.mod(r, 2) == 0, 1.0, -1.0) * np.sin(np.pi * delta) / np.pi
    near_pair = np.floor((r - a) / 2)
    total = np.zeros_like(omega)
    npairs = (b - a + 1) // 2
    with np.errstate(divide="ignore", invalid="ignore"):
        for p in range(npairs):
            eta = a + 2 * p
            u = omega - eta
            sign = -1.0 if eta % 2 == 0 else 1.0
            term = sign * sin_pw / (u * (u - 1.0))
            hit = near_pair == p
            if hit.any():
                term = np.where(hit, np.sinc(u) + np.sinc(u - 1.0), term)
            total += term
    if (b - a + 1) % 2:
        total += np.sinc(omega - b)
    return total


class BandSymbol:
    """``Phi(w) = sum_{eta in Z} phi_hat(w - eta)`` for one band.

    Contracted bands evaluate the parent symbol at ``4**|j| w``. The central
    set uses ``phi_hat`` itself.

    Parameters
    ----------
    window : Window
    band : Band or None
        ``None`` selects the central set.
    method : {'auto', 'sum'}
        ``'sum'`` disables closed forms and grouped evaluation and sums all
        lattice terms in ascending order (used as a reference).
    """

    def __init__(self, window, band, method="auto"):
        self.window = window
        self.band = band
        self.method = method
        if band is not None:
            if band.dimension != window.dimension:
                raise ValueError("window and band dimensions differ")
            self.lattice = band.parent.lattice()
        else:
            self.lattice = None

    def __repr__(self):
        owner = "bullet" if self.band is None else self.band.label()
        return f"BandSymbol({self.window.name}, {owner})"

    def __call__(self, omega):
        omega = np.asarray(omega, dtype=float)
        w = self.window
        if self.band is None:
            return w.freq(omega)
        if self.band.j < 0:
            omega = omega * 4.0 ** (-self.band.j)
        if w.kind == "zero":
            return np.zeros(omega.shape[:-1] if w.dimension == 2 else omega.shape)
        if self.method == "sum":
            return self._sum_all(omega)
        parent = self.band.parent
        if w.dimension == 1:
            if w.kind == "sinc_pow" and w.n == 1:
                return parent.contains(omega).astype(float)
            if w.kind == "boxcar":
                return _boxcar_sum(omega, int(self.lattice[0]), int(self.lattice[-1]))
        if np.isfinite(w.freq_radius):
            return self._sum_local(omega)
        return self._sum_all(omega)

    def _sum_all(self, omega):
        w = self.window
        total = np.zeros(omega.shape[:-1] if w.dimension == 2 else omega.shape)
        for eta in self.lattice:
            total += w.freq(omega - eta)
        return total

    def _sum_local(self, omega):
        # Skip lattice terms farther than the support radius; they are exact zeros.
        w = self.window
        R = w.freq_radius
        if w.dimension == 1:
            a, b = int(self.lattice[0]), int(self.lattice[-1])
            start = np.floor(omega - R)
            total = np.zeros_like(omega)
            for o in range(int(2 * R) + 2):
                eta = start + o
                ok = (eta >= a) & (eta <= b) & (np.abs(omega - eta) <= R)
                if ok.any():
                    total += np.where(ok, w.freq(omega - eta), 0.0)
            return total
        total = np.zeros(omega.shape[:-1])
        flat = omega.reshape(-1, 2)
        out = total.reshape(-1)
        lo = flat.min(axis=0) - R
        hi = flat.max(axis=0) + R
        for eta in self.lattice:
            if np.all(eta >= lo) and np.all(eta <= hi):
                out += w.freq(flat - eta)
        return out.reshape(total.shape)


def band_symbol(window, band, method="auto"):
    """Band symbol of ``window`` on ``band`` (``None`` for the central set)."""
    return BandSymbol(window, band, method)

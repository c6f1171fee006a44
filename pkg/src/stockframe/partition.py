"""Dyadic frequency partitions of the line and the plane.

Two concrete partitions are provided: ``dyadic1d`` (two half-lines of dyadic
intervals around a central interval) and ``polar2d`` (dyadic annuli cut into
eight angular sectors around a central disk). Band endpoints are dyadic
rationals offset by 1/2, which are exact in double precision, so membership
tests use plain float comparisons without boundary ambiguity.

Negative scale indices denote contracted bands ``{x : 4**j x in band(j)}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Band",
    "CentralSet",
    "EnlargedRegion",
    "FrequencyPartition",
    "PartitionReport",
    "make_dyadic_1d",
    "make_polar_2d",
    "lattice_points",
    "distance_to_band",
    "enlarged_region",
    "contract_band",
    "validate_admissible",
]

SIGNS = ("+", "-")
SECTORS = tuple(range(8))


def _as_points(omega, dimension):
    omega = np.asarray(omega, dtype=float)
    if dimension == 2 and omega.shape[-1:] != (2,):
        raise ValueError("2D frequency points need a trailing axis of length 2")
    return omega


def _octant(x, y, k):
    # Exact half-open angular sector k*pi/4 <= theta < (k+1)*pi/4 by comparisons.
    if k == 0:
        return (y >= 0) & (y < x)
    if k == 1:
        return (x > 0) & (y >= x)
    if k == 2:
        return (x <= 0) & (y > -x)
    if k == 3:
        return (y > 0) & (y <= -x)
    if k == 4:
        return (y <= 0) & (x < 0) & (y > x)
    if k == 5:
        return (x < 0) & (y <= x)
    if k == 6:
        return (x >= 0) & (y < -x)
    if k == 7:
        return (x > 0) & (y < 0) & (y >= -x)
    raise ValueError(f"sector index must be in 0..7, got {k}")


@dataclass(frozen=True)
class Band:
    """One set of a frequency partition.

    Parameters
    ----------
    j : int
        Scale index. Negative values are contracted copies of band ``-j``.
    k : str or int
        Direction: ``'+'``/``'-'`` in 1D, ``0..7`` in 2D.
    dimension : int
        1 or 2.
    """

    j: int
    k: object
    dimension: int = 1

    def __post_init__(self):
        if self.dimension == 1 and self.k not in SIGNS:
            raise ValueError(f"1D band direction must be '+' or '-', got {self.k!r}")
        if self.dimension == 2 and self.k not in SECTORS:
            raise ValueError(f"2D band direction must be in 0..7, got {self.k!r}")
        if self.dimension not in (1, 2):
            raise ValueError("dimension must be 1 or 2")

    @property
    def scale(self):
        """Contraction factor 4**-|j| for negative j, otherwise 1."""
        return 4.0 ** self.j if self.j < 0 else 1.0

    @property
    def parent(self):
        """The positive-scale band this one is a contraction of (or itself)."""
        return Band(-self.j, self.k, self.dimension) if self.j < 0 else self

    @property
    def radii(self):
        """Inner and outer radius ``(r0, r1)``, scaled for contracted bands."""
        jj = abs(self.j)
        c = self.scale
        return ((2.0 ** jj - 0.5) * c, (2.0 ** (jj + 1) - 0.5) * c)

    @property
    def interval(self):
        """``(a, b)`` endpoints in 1D: ``[a, b)`` for '+', ``(a, b]`` for '-'."""
        if self.dimension != 1:
            raise ValueError("interval is only defined in 1D")
        r0, r1 = self.radii
        return (r0, r1) if self.k == "+" else (-r1, -r0)

    @property
    def angles(self):
        k = int(self.k)
        return (k * np.pi / 4, (k + 1) * np.pi / 4)

    @property
    def measure(self):
        r0, r1 = self.radii
        if self.dimension == 1:
            return r1 - r0
        return (r1 ** 2 - r0 ** 2) * np.pi / 8

    def contains(self, omega):
        """Boolean membership mask for frequency points."""
        omega = _as_points(omega, self.dimension)
        r0, r1 = self.radii
        if self.dimension == 1:
            if self.k == "+":
                return (omega >= r0) & (omega < r1)
            return (omega > -r1) & (omega <= -r0)
        x, y = omega[..., 0], omega[..., 1]
        rho2 = x * x + y * y
        return (rho2 >= r0 * r0) & (rho2 < r1 * r1) & _octant(x, y, int(self.k))

    def distance(self, omega):
        """Euclidean distance from each point to the band (0 on the closure)."""
        omega = _as_points(omega, self.dimension)
        r0, r1 = self.radii
        if self.dimension == 1:
            a, b = self.interval
            return np.maximum(np.maximum(a - omega, omega - b), 0.0)
        return _sector_distance(omega, r0, r1, *self.angles)

    def lattice(self):
        """Integer points of the band in lexicographic order, shape ``(n,)`` or ``(n, 2)``."""
        if self.j < 0:
            raise ValueError("lattice points are defined for bands with j >= 0")
        r0, r1 = self.radii
        if self.dimension == 1:
            a, b = self.interval
            pts = np.arange(int(np.floor(a)), int(np.ceil(b)) + 1)
            return pts[self.contains(pts.astype(float))]
        m = int(np.ceil(r1))
        g = np.arange(-m, m + 1)
        xx, yy = np.meshgrid(g, g, indexing="ij")
        pts = np.stack([xx.ravel(), yy.ravel()], axis=-1)
        return pts[self.contains(pts.astype(float))]

    def key(self):
        return (self.j, self.k)

    def label(self):
        return f"{self.j},{self.k}"


def _sector_distance(omega, r0, r1, t0, t1):
    x, y = omega[..., 0], omega[..., 1]
    rho = np.hypot(x, y)
    theta = np.mod(np.arctan2(y, x), 2 * np.pi)
    width = t1 - t0
    rel = np.mod(theta - t0, 2 * np.pi)
    in_wedge = rel <= width
    inside = in_wedge & (rho >= r0) & (rho <= r1)

    def arc(r):
        # distance to the arc of radius r spanning [t0, t1]
        ends = np.minimum(
            np.hypot(x - r * np.cos(t0), y - r * np.sin(t0)),
            np.hypot(x - r * np.cos(t1), y - r * np.sin(t1)),
        )
        return np.where(in_wedge, np.abs(rho - r), ends)

    def ray(t):
        # distance to the segment {rho*(cos t, sin t): r0 <= rho <= r1}
        ux, uy = np.cos(t), np.sin(t)
        proj = np.clip(x * ux + y * uy, r0, r1)
        return np.hypot(x - proj * ux, y - proj * uy)

    d = np.minimum(np.minimum(arc(r0), arc(r1)), np.minimum(ray(t0), ray(t1)))
    return np.where(inside, 0.0, d)


@dataclass(frozen=True)
class CentralSet:
    """Open neighbourhood of the origin: ``(-1/2, 1/2)`` or the disk ``rho < 1/2``."""

    dimension: int = 1
    radius: float = 0.5

    def contains(self, omega):
        omega = _as_points(omega, self.dimension)
        if self.dimension == 1:
            return np.abs(omega) < self.radius
        return (omega[..., 0] ** 2 + omega[..., 1] ** 2) < self.radius ** 2

    def distance(self, omega):
        omega = _as_points(omega, self.dimension)
        r = np.abs(omega) if self.dimension == 1 else np.hypot(omega[..., 0], omega[..., 1])
        return np.maximum(r - self.radius, 0.0)


@dataclass(frozen=True)
class EnlargedRegion:
    """Points within ``2**(j-1)`` of a band; contracted bands scale the region by ``4**-|j|``."""

    band: Band

    @property
    def pad(self):
        jj = abs(self.band.j)
        return 2.0 ** (jj - 1) * self.band.scale

    @property
    def interval(self):
        """Closed interval ``[lo, hi]`` in 1D."""
        a, b = self.band.interval
        return (a - self.pad, b + self.pad)

    @property
    def radial_range(self):
        r0, r1 = self.band.radii
        return (r0 - self.pad, r1 + self.pad)

    def contains(self, omega):
        return self.band.distance(omega) <= self.pad

    def disjoint_from(self, other):
        """Certified disjointness by interval (1D) or radial-shell (2D) arithmetic.

        Returns False when the certificate fails, which in 1D means the regions
        do intersect.
        """
        if self.band.dimension == 1:
            if self.band.k != other.band.k:
                return True
            a0, a1 = self.interval
            b0, b1 = other.interval
            return a1 < b0 or b1 < a0
        a0, a1 = self.radial_range
        b0, b1 = other.radial_range
        return a1 < b0 or b1 < a0


@dataclass(frozen=True)
class FrequencyPartition:
    """A truncated dyadic partition.

    Parameters
    ----------
    kind : {'dyadic1d', 'polar2d'}
    j_max : int
        Largest positive scale kept; everything below the ceiling
        ``2**(j_max+1) - 1/2`` is covered.
    omit : tuple of (j, k)
        Bands deliberately removed (used to exercise validation failures).
    """

    kind: str
    j_max: int
    omit: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in ("dyadic1d", "polar2d"):
            raise ValueError(f"unknown partition kind {self.kind!r}")
        if int(self.j_max) != self.j_max or self.j_max < 0:
            raise ValueError(f"j_max must be a nonnegative integer, got {self.j_max!r}")

    @property
    def dimension(self):
        return 1 if self.kind == "dyadic1d" else 2

    @property
    def directions(self):
        return SIGNS if self.dimension == 1 else SECTORS

    @property
    def ceiling(self):
        return 2.0 ** (self.j_max + 1) - 0.5

    @property
    def central(self):
        return CentralSet(self.dimension)

    @property
    def bands(self):
        out = []
        for j in range(self.j_max + 1):
            for k in self.directions:
                if (j, k) not in self.omit:
                    out.append(Band(j, k, self.dimension))
        return tuple(out)

    def band(self, j, k):
        if (j, k) in self.omit or abs(j) > self.j_max or k not in self.directions:
            raise KeyError(f"band ({j}, {k}) is not part of this partition")
        return Band(j, k, self.dimension)

    def contracted_bands(self, j_neg):
        """Contracted bands ``-j_neg .. -1``; they do not depend on ``j_max``."""
        return tuple(
            Band(-j, k, self.dimension)
            for j in range(j_neg, 0, -1)
            for k in self.directions
            if (j, k) not in self.omit
        )

    def to_json(self):
        return {"dimension": self.dimension, "kind": self.kind, "j_max": int(self.j_max)}

    @classmethod
    def from_json(cls, data):
        kind = data["kind"]
        part = cls(kind, data["j_max"])
        if "dimension" in data and int(data["dimension"]) != part.dimension:
            raise ValueError("partition dimension does not match its kind")
        return part


def make_dyadic_1d(j_max):
    """Dyadic partition of the line up to scale ``j_max``."""
    return FrequencyPartition("dyadic1d", j_max)


def make_polar_2d(j_max):
    """Polar dyadic partition of the plane with eight directions per scale."""
    return FrequencyPartition("polar2d", j_max)


def lattice_points(band):
    """Integer points of a band with ``j >= 0``; raises if there are none."""
    pts = band.lattice()
    if len(pts) == 0:
        raise ValueError(f"band {band.label()} contains no integer points")
    return pts


def distance_to_band(omega, band):
    return band.distance(omega)


def enlarged_region(band):
    return EnlargedRegion(band)


def contract_band(band, j):
    """Contract a positive-scale band by ``4**-j``."""
    if j <= 0:
        raise ValueError("contraction scale must be a positive integer")
    if band.j != j:
        raise ValueError(f"band has scale {band.j}, cannot contract with j={j}")
    return Band(-j, band.k, band.dimension)


@dataclass
class PartitionReport:
    holes: list
    max_overlap: int
    c_inf: float
    c_sup: float
    sampled_c_inf: float
    sampled_c_sup: float
    empty_lattice_bands: list
    n_samples: int
    hole_samples: int

    @property
    def passed(self):
        return (
            not self.holes
            and self.hole_samples == 0
            and not self.empty_lattice_bands
            and self.c_inf > 0
            and np.isfinite(self.c_sup)
        )

    def to_json(self):
        return {
            "passed": bool(self.passed),
            "holes": self.holes,
            "hole_samples": int(self.hole_samples),
            "max_overlap": int(self.max_overlap),
            "c_inf": float(self.c_inf),
            "c_sup": float(self.c_sup),
            "sampled_c_inf": float(self.sampled_c_inf),
            "sampled_c_sup": float(self.sampled_c_sup),
            "empty_lattice_bands": self.empty_lattice_bands,
            "n_samples": int(self.n_samples),
        }


def _interval_holes(partition):
    # Exact 1D covering check: walk the sets in order and record gaps.
    pieces = [(-0.5, 0.5, False, False)]
    for b in partition.bands:
        a, c = b.interval
        pieces.append((a, c, b.k == "+", b.k == "-"))
    pieces.sort()
    lo, hi = -partition.ceiling, partition.ceiling
    holes = []
    pos, pos_closed = lo, False  # the open ceiling itself is excluded
    for a, c, closed_a, closed_c in pieces:
        if a > pos or (a == pos and not closed_a and not pos_closed and a != lo):
            holes.append([float(pos), float(a)])
        if c > pos or (c == pos and closed_c):
            pos, pos_closed = c, closed_c
    if pos < hi:
        holes.append([float(pos), float(hi)])
    return holes


def validate_admissible(partition, spacing=1.0 / 64):
    """Check covering, overlap, lattice and scale constants on a sample grid.

    Samples are the multiples of ``spacing`` strictly below the ceiling; with
    a dyadic spacing they include every band endpoint, so the half-open
    conventions are exercised exactly. In 1D the covering is also certified
    by exact interval arithmetic.
    """
    d = partition.dimension
    ceil = partition.ceiling
    m = int(np.ceil(ceil / spacing))
    axis = np.arange(-m, m + 1) * spacing
    if d == 1:
        pts = axis[np.abs(axis) < ceil]
        radius = np.abs(pts)
    else:
        xx, yy = np.meshgrid(axis, axis, indexing="ij")
        pts = np.stack([xx.ravel(), yy.ravel()], axis=-1)
        keep = pts[:, 0] ** 2 + pts[:, 1] ** 2 < ceil ** 2
        pts = pts[keep]
        radius = np.hypot(pts[:, 0], pts[:, 1])

    # Sort by |w| so each band only tests the contiguous slice of its radial shell.
    order = np.argsort(radius, kind="stable")
    pts, radius = pts[order], radius[order]
    count = partition.central.contains(pts).astype(np.int64)
    s_inf, s_sup = np.inf, -np.inf
    c_inf, c_sup = np.inf, -np.inf
    empty = []
    for b in partition.bands:
        r0, r1 = b.radii
        lo = np.searchsorted(radius, r0 * (1 - 1e-12), side="left")
        hi = np.searchsorted(radius, r1 * (1 + 1e-12), side="right")
        mask = b.contains(pts[lo:hi])
        count[lo:hi] += mask
        if mask.any():
            ratio = radius[lo:hi][mask] / 2.0 ** b.j
            s_inf = min(s_inf, ratio.min())
            s_sup = max(s_sup, ratio.max())
        r0, r1 = b.radii
        c_inf = min(c_inf, r0 / 2.0 ** b.j)
        c_sup = max(c_sup, r1 / 2.0 ** b.j)
        if len(b.lattice()) == 0:
            empty.append(b.label())

    holes = _interval_holes(partition) if d == 1 else []
    hole_mask = count == 0
    if d == 2 and hole_mask.any():
        holes = pts[hole_mask][:20].tolist()
    return PartitionReport(
        holes=holes,
        max_overlap=int(count.max()) if count.size else 0,
        c_inf=float(c_inf),
        c_sup=float(c_sup),
        sampled_c_inf=float(s_inf),
        sampled_c_sup=float(s_sup),
        empty_lattice_bands=empty,
        n_samples=int(len(pts)),
        hole_samples=int(hole_mask.sum()),
    )

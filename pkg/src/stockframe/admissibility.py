"""Numerical admissibility diagnostics for a window against a partition.

All checks are sample based. The decay exponent of a band symbol is the
least-squares slope of ``log env(d)`` against ``log(1 + d)``, where ``env(d)``
is the largest ``|Phi|`` over the unit window of distances ``[d, d + 1)`` on
either side of the band (this rides over the zeros of oscillating symbols).
Distances run over ``[2**(j/2), 2**(j+3)]``. A band whose envelope reaches
exact zero in that range decays faster than any power and gets ``inf``.

A fitted exponent passes when it exceeds the required one minus ``slack``
(0.1 by default); conditions are certified for ``j0 <= j <= j_max`` only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .partition import Band, FrequencyPartition
from .window import BandSymbol

__all__ = [
    "ConfigError",
    "CheckConfig",
    "AdmissibilityReport",
    "fit_decay",
    "symbol_decay",
    "check_norm_admissibility",
    "check_seminorm_admissibility",
    "check_sufficient",
    "uniform_symbol_sum",
    "bessel_xi_bound",
    "weighted_bound_constant",
]

TINY = 1e-300


class ConfigError(ValueError):
    """Invalid diagnostic configuration."""


@dataclass(frozen=True)
class CheckConfig:
    """Sampling parameters for the admissibility checks.

    Parameters
    ----------
    spacing : float
        Grid step for band-interior and central-set samples (at most 1/8).
    j0 : int
        Smallest scale at which decay and boundedness are certified.
    decay_points : int
        Number of log-spaced distances in each decay fit.
    envelope_points : int
        Samples per unit distance window for the envelope.
    slack : float
        Tolerance on fitted exponents.
    j_neg : int
        Contracted scales checked in seminorm mode.
    """

    spacing: float = 1.0 / 64
    j0: int = 1
    decay_points: int = 48
    envelope_points: int = 16
    slack: float = 0.1
    j_neg: int = 6

    def validate(self):
        if not 0 < self.spacing <= 1.0 / 8:
            raise ConfigError(f"grid spacing {self.spacing} is too coarse (must be <= 1/8)")
        if self.j0 < 0:
            raise ConfigError("j0 must be nonnegative")
        if self.decay_points < 3 or self.envelope_points < 1:
            raise ConfigError("need at least 3 decay points and 1 envelope point")


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    if isinstance(x, (np.floating,)):
        return _jsonable(float(x))
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


@dataclass
class AdmissibilityReport:
    """Outcome of one admissibility check; ``passed`` is the conjunction of ``flags``."""

    window: str
    partition: dict | None
    s: float
    mode: str
    j_range: tuple
    decay: dict = field(default_factory=dict)
    prefactor: dict = field(default_factory=dict)
    a_hat: float = float("nan")
    b_hat: float = float("nan")
    band_sup: dict = field(default_factory=dict)
    origin: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)

    @property
    def passed(self):
        return bool(self.flags) and all(self.flags.values())

    @property
    def tail_exponent(self):
        """Smallest per-band decay exponent over the certified scales."""
        vals = [v for v in self.decay.values()]
        return min(vals) if vals else float("inf")

    def to_json(self):
        return _jsonable(
            {
                "window": self.window,
                "partition": self.partition,
                "s": self.s,
                "mode": self.mode,
                "passed": self.passed,
                "j_range": list(self.j_range),
                "tail_exponent": self.tail_exponent,
                "decay": self.decay,
                "prefactor": self.prefactor,
                "a_hat": self.a_hat,
                "b_hat": self.b_hat,
                "band_sup": self.band_sup,
                "origin": self.origin,
                "details": self.details,
                "flags": self.flags,
            }
        )


def fit_decay(distances, envelope):
    """Decay exponent and log-prefactor from ``envelope ~ C (1 + d)**-alpha``.

    Returns ``(inf, -inf)`` when the envelope hits zero anywhere.
    """
    env = np.asarray(envelope, dtype=float)
    if np.any(env <= TINY):
        return float("inf"), float("-inf")
    slope, intercept = np.polyfit(np.log1p(np.asarray(distances, float)), np.log(env), 1)
    return float(-slope), float(intercept)


def _unit(band):
    t0, t1 = band.angles
    t = 0.5 * (t0 + t1)
    return np.array([np.cos(t), np.sin(t)])


def _decay_samples(symbol, band, cfg, d_lo=None, d_hi=None):
    # Envelope of |Phi| at log-spaced distances from the band.
    j = abs(band.j)
    d_lo = 2.0 ** (j / 2) if d_lo is None else d_lo
    d_hi = 2.0 ** (j + 3) if d_hi is None else d_hi
    ds = np.geomspace(d_lo, d_hi, cfg.decay_points)
    offs = np.arange(cfg.envelope_points) / cfg.envelope_points
    dd = ds[:, None] + offs[None, :]
    if band.dimension == 1:
        a, b = band.interval
        vals = np.maximum(np.abs(symbol(b + dd)), np.abs(symbol(a - dd)))
    else:
        r0, r1 = band.radii
        u = _unit(band)
        vals = np.abs(symbol((r1 + dd)[..., None] * u))
        inward = r0 - dd
        ok = inward > 0
        if ok.any():
            vin = np.abs(symbol(np.where(ok, inward, 0.0)[..., None] * u))
            vals = np.maximum(vals, np.where(ok, vin, 0.0))
    return ds, vals.max(axis=1)


def symbol_decay(symbol, band, cfg=None):
    """Fitted decay exponent and prefactor ``C_j`` of ``|Phi| ~ C_j 2^(jd/2) (1+d)^-alpha``."""
    cfg = cfg or CheckConfig()
    ds, env = _decay_samples(symbol, band, cfg)
    alpha, logc = fit_decay(ds, env)
    j = abs(band.j)
    return alpha, float(np.exp(logc) / 2.0 ** (j * band.dimension / 2)) if np.isfinite(logc) else 0.0


def _interior_samples(band, spacing):
    # Band points at least one grid cell away from the boundary.
    h = spacing * band.scale
    if band.dimension == 1:
        a, b = band.interval
        n = int(round((b - a) / h))
        return a + h * np.arange(1, n)
    r0, r1 = band.radii
    t0, t1 = band.angles
    rho = r0 + h * np.arange(1, int(round((r1 - r0) / h)))
    pts = []
    for r in rho:
        # arc step at least h, so every angle is >= h (in arc length) from both rays
        nt = int(np.floor((t1 - t0) * r / h))
        if nt < 2:
            continue
        th = t0 + (t1 - t0) / nt * np.arange(1, nt)
        pts.append(np.stack([r * np.cos(th), r * np.sin(th)], axis=-1))
    return np.concatenate(pts) if pts else np.zeros((0, 2))


def _central_samples(dimension, spacing):
    m = int(round(0.5 / spacing))
    ax = spacing * np.arange(-m + 1, m)
    if dimension == 1:
        return ax
    xx, yy = np.meshgrid(ax, ax, indexing="ij")
    pts = np.stack([xx.ravel(), yy.ravel()], axis=-1)
    return pts[np.hypot(pts[:, 0], pts[:, 1]) <= 0.5 - spacing]


def _growth(js, sups):
    # Slope of log2 sup|Phi_j| against j.
    js = np.asarray(js, float)
    sups = np.asarray(sups, float)
    if len(js) < 2 or np.any(sups <= TINY):
        return 0.0
    return float(np.polyfit(js, np.log2(sups), 1)[0])


def _origin_exponent(symbol, band, cfg):
    # Slope of log|Phi| against log|w| for small w inside the central set.
    r = np.geomspace(2.0 ** -14, 2.0 ** -3, 24)
    if band.dimension == 1:
        vals = np.maximum(np.abs(symbol(r)), np.abs(symbol(-r)))
    else:
        u = _unit(band)
        vals = np.maximum(np.abs(symbol(r[:, None] * u)), np.abs(symbol(-r[:, None] * u)))
    if np.all(vals <= TINY):
        return float("inf")
    if np.any(vals <= TINY):
        vals = np.maximum(vals, TINY)
    return float(np.polyfit(np.log(r), np.log(vals), 1)[0])


def _band_pass(cfg, window, partition, s, seminorm):
    cfg.validate()
    if s < 0:
        raise ConfigError("s must be nonnegative")
    if window.dimension != partition.dimension:
        raise ConfigError("window and partition dimensions differ")
    d = partition.dimension
    j_lo = min(cfg.j0, partition.j_max)
    report = AdmissibilityReport(
        window=window.name,
        partition=partition.to_json(),
        s=float(s),
        mode="seminorm" if seminorm else "norm",
        j_range=(j_lo, partition.j_max),
    )
    lower = []
    sups = {}
    required = d / 2 + s - cfg.slack
    for band in partition.bands:
        sym = BandSymbol(window, band)
        inner = np.abs(sym(_interior_samples(band, cfg.spacing)))
        lower.append(float(inner.min()) if inner.size else 0.0)
        if band.j < j_lo:
            continue
        alpha, pref = symbol_decay(sym, band, cfg)
        report.decay[band.label()] = alpha
        report.prefactor[band.label()] = pref
        _, env = _decay_samples(sym, band, cfg)
        sups[band.j] = max(sups.get(band.j, 0.0), float(inner.max()) if inner.size else 0.0, float(env.max()))
        if seminorm:
            report.origin[band.label()] = _origin_exponent(sym, band, cfg)
    report.band_sup = {str(j): v for j, v in sorted(sups.items())}
    growth = _growth(list(sups), list(sups.values()))
    report.details["band_sup_growth"] = growth
    report.details["band_lower"] = min(lower) if lower else 0.0
    report.flags["decay"] = bool(report.decay) and all(a >= required for a in report.decay.values())
    report.flags["bounded"] = growth <= 0.05
    report.details["required_exponent"] = d / 2 + s
    return report, lower


def check_norm_admissibility(window, partition, s, cfg=None):
    """Sampled check of the norm-mode admissibility conditions.

    Verifies a positive lower bound on every band interior and on the central
    set, per-band decay with exponent above ``d/2 + s``, decay of the central
    symbol with exponent above ``d/2``, uniform boundedness across scales and
    a finite uniform symbol sum.
    """
    cfg = cfg or CheckConfig()
    report, lower = _band_pass(cfg, window, partition, s, seminorm=False)
    d = partition.dimension
    central = np.abs(window.freq(_central_samples(d, cfg.spacing)))
    lower.append(float(central.min()))
    ds = np.geomspace(1.0, 100.0, cfg.decay_points)
    offs = np.arange(cfg.envelope_points) / cfg.envelope_points
    rr = 0.5 + ds[:, None] + offs[None, :]
    if d == 1:
        env = np.maximum(np.abs(window.freq(rr)), np.abs(window.freq(-rr))).max(axis=1)
    else:
        env = np.abs(window.freq(rr[..., None] * np.array([np.sqrt(0.5), np.sqrt(0.5)]))).max(axis=1)
    alpha_c, _ = fit_decay(ds, env)
    report.details["central_decay"] = alpha_c
    report.details["central_lower"] = float(central.min())
    report.a_hat = min(lower)
    b_hat, tail_ok, partial = uniform_symbol_sum(window, partition, s, "norm", cfg.spacing)
    report.b_hat = b_hat
    report.details["b_partial"] = partial
    report.flags["lower_bound"] = report.a_hat > 0
    report.flags["central_decay"] = alpha_c >= d / 2 - cfg.slack
    report.flags["uniform_sum"] = bool(np.isfinite(b_hat) and tail_ok)
    return report


def check_seminorm_admissibility(window, partition, s, cfg=None):
    """Sampled check of the seminorm-mode admissibility conditions.

    As the norm check without the central set, plus the origin factor: the
    slope of ``log |Phi_j|`` against ``log |w|`` near 0 must be at least
    ``s`` (minus the slack). Lower bounds on contracted bands go through the
    contraction identity.
    """
    cfg = cfg or CheckConfig()
    report, lower = _band_pass(cfg, window, partition, s, seminorm=True)
    d = partition.dimension
    for band in partition.contracted_bands(cfg.j_neg):
        sym = BandSymbol(window, band)
        inner = np.abs(sym(_interior_samples(band, cfg.spacing)))
        lower.append(float(inner.min()) if inner.size else 0.0)
    report.a_hat = min(lower)
    b_hat, tail_ok, partial = uniform_symbol_sum(
        window, partition, s, "seminorm", cfg.spacing, j_neg=cfg.j_neg
    )
    report.b_hat = b_hat
    report.details["b_partial"] = partial
    report.flags["lower_bound"] = report.a_hat > 0
    report.flags["origin"] = bool(report.origin) and all(p >= s - cfg.slack for p in report.origin.values())
    report.flags["uniform_sum"] = bool(np.isfinite(b_hat) and tail_ok)
    report.details["required_origin_exponent"] = s
    return report


def check_sufficient(window, s, cfg=None):
    """Check the sufficient conditions directly on ``phi_hat`` (1D).

    ``|phi_hat|`` must decay with exponent at least ``s + 1 + 0.05``, keep one
    sign wherever it is nonzero, and stay away from 0 on ``(-1/2, 1/2)``.
    """
    cfg = cfg or CheckConfig()
    cfg.validate()
    if window.dimension != 1:
        raise ConfigError("check_sufficient needs a 1D window")
    report = AdmissibilityReport(window=window.name, partition=None, s=float(s), mode="sufficient", j_range=())
    ds = np.geomspace(2.0, 200.0, cfg.decay_points)
    offs = np.arange(cfg.envelope_points) / cfg.envelope_points
    rr = ds[:, None] + offs[None, :]
    env = np.maximum(np.abs(window.freq(rr)), np.abs(window.freq(-rr))).max(axis=1)
    alpha, _ = fit_decay(ds, env)
    report.decay["phi_hat"] = alpha
    R = min(window.freq_radius, 200.0)
    m = int(np.ceil(R / cfg.spacing))
    vals = window.freq(cfg.spacing * np.arange(-m, m + 1))
    nz = vals[np.abs(vals) > 0]
    one_sign = bool(np.all(nz > 0) or np.all(nz < 0))
    central = np.abs(window.freq(_central_samples(1, cfg.spacing)))
    report.a_hat = float(central.min())
    report.details["min_value"] = float(vals.min())
    report.flags["decay"] = alpha >= s + 1 + 0.05
    report.flags["sign"] = one_sign
    report.flags["lower_bound"] = report.a_hat > 0
    return report


def _sum_samples(partition, spacing, seminorm, j_neg):
    ceil = partition.ceiling
    m = int(np.ceil(ceil / spacing))
    ax = (np.arange(-m, m) + 0.5) * spacing
    if seminorm:
        small = np.geomspace(4.0 ** -(j_neg + 1), 0.5, 256)
        ax = np.sort(np.concatenate([ax, small, -small]))
    if partition.dimension == 1:
        pts = ax[np.abs(ax) < ceil]
        return pts, np.abs(pts)
    xx, yy = np.meshgrid(ax, ax, indexing="ij")
    pts = np.stack([xx.ravel(), yy.ravel()], axis=-1)
    r = np.hypot(pts[:, 0], pts[:, 1])
    keep = r < ceil
    return pts[keep], r[keep]


def uniform_symbol_sum(window, partition, s, mode="norm", spacing=1.0 / 64, j_neg=6, omega_cap=None):
    """``sup_w sum_{j,k} 2^(2js) weight(w)^(-2s) |Phi_jk(w)|^2`` on samples.

    ``weight`` is ``1 + |w|`` in norm mode and ``|w|`` in seminorm mode, where
    the sum also runs over contracted scales ``-j_neg .. -1``. Samples lie
    below the partition ceiling, or below ``omega_cap`` when given (to compare
    truncations of the scale sum on a fixed frequency range).

    Returns
    -------
    b_hat : float
    tail_ok : bool
        The last increment of the partial suprema is no larger than the
        first one in the window ``j_max - 3 .. j_max``.
    partial : list of float
        Partial suprema for ``j_max - 3 .. j_max`` (clipped at 0).
    """
    if mode not in ("norm", "seminorm"):
        raise ConfigError("mode must be 'norm' or 'seminorm'")
    if not 0 < spacing <= 1.0 / 8:
        raise ConfigError(f"grid spacing {spacing} is too coarse (must be <= 1/8)")
    seminorm = mode == "seminorm"
    pts, r = _sum_samples(partition, spacing, seminorm, j_neg)
    if omega_cap is not None:
        pts, r = pts[r < omega_cap], r[r < omega_cap]
    weight = (r if seminorm else 1.0 + r) ** (-2.0 * s)
    total = np.zeros(len(pts))
    if seminorm:
        for band in partition.contracted_bands(j_neg):
            total += 2.0 ** (2 * band.j * s) * weight * BandSymbol(window, band)(pts) ** 2
    J = partition.j_max
    partial = {}
    for j in range(J + 1):
        for k in partition.directions:
            if (j, k) in partition.omit:
                continue
            total += 2.0 ** (2 * j * s) * weight * BandSymbol(window, Band(j, k, partition.dimension))(pts) ** 2
        partial[j] = float(total.max()) if total.size else 0.0
    b_hat = partial[J]
    levels = [partial[j] for j in range(max(0, J - 3), J + 1)]
    inc = np.diff(levels)
    tol = 1e-12 * max(b_hat, 1e-300)
    tail_ok = bool(inc[-1] <= inc[0] + tol) if len(inc) > 1 else True
    return b_hat, tail_ok, levels


def bessel_xi_bound(window, band, nu, s=0.0, gamma_points=256, term_tol=1e-14):
    """``sup_gamma (2^j / nu) Xi_jk(gamma)`` on the grid ``gamma = k / gamma_points``.

    ``(2^j/nu) Xi(gamma) = (1/nu) sum_m |2^(js) (1+|x_m|)^(-s) Phi(x_m)|^2``
    with ``x_m = (gamma - m) 2^j / nu``. The ``m``-range is widened until the
    boundary terms fall below ``term_tol``.
    """
    if not 0 < nu <= 1:
        raise ConfigError("nu must lie in (0, 1]")
    if band.dimension != 1 or band.j < 0:
        raise ConfigError("bessel_xi_bound needs a 1D band with j >= 0")
    sym = BandSymbol(window, band)
    j = band.j
    step = 2.0 ** j / nu
    gam = np.arange(gamma_points) / gamma_points
    centre = 0.5 * sum(band.interval)
    m0 = int(np.floor(-centre / step))
    half = int(np.ceil((2.0 ** (j + 1) + 16) / step)) + 1

    def terms(ms):
        x = (gam[:, None] - ms[None, :]) * step
        v = 2.0 ** (j * s) * (1 + np.abs(x)) ** (-s) * sym(x)
        return v * v

    while True:
        ms = np.arange(m0 - half, m0 + half + 1)
        t = terms(ms)
        edge = max(t[:, 0].max(), t[:, -1].max())
        if edge < term_tol or half > 2 ** 20:
            break
        half *= 2
    return float(t.sum(axis=1).max() / nu)


def weighted_bound_constant(window, partition, s, alpha, mode="norm", cfg=None):
    """Smallest ``C`` with the weighted symbol bounds holding on samples.

    Off the band ``2^(js) w^(-s) |Phi_j| <= C 2^(jd/2) (1+d)^(-alpha)`` and on
    the band ``2^(js) w^(-s) |Phi_j| <= C``, with ``w = 1 + |omega|`` (norm)
    or ``|omega|`` (seminorm).
    """
    cfg = cfg or CheckConfig()
    d = partition.dimension
    worst = 0.0
    for band in partition.bands:
        if band.j < cfg.j0:
            continue
        sym = BandSymbol(window, band)
        ds = np.geomspace(2.0 ** (band.j / 2), 2.0 ** (band.j + 3), cfg.decay_points)
        offs = np.arange(cfg.envelope_points) / cfg.envelope_points
        dd = (ds[:, None] + offs[None, :]).ravel()
        if d == 1:
            a, b = band.interval
            off = np.concatenate([b + dd, a - dd])
            rad = np.abs(off)
        else:
            off = (band.radii[1] + dd)[:, None] * _unit(band)
            rad = np.hypot(off[:, 0], off[:, 1])
        dist = band.distance(off)
        wt = rad if mode == "seminorm" else 1 + rad
        val = 2.0 ** (band.j * s) * wt ** (-s) * np.abs(sym(off))
        bound = 2.0 ** (band.j * d / 2) * (1 + dist) ** (-alpha)
        worst = max(worst, float(np.max(val / bound)))
        inner = _interior_samples(band, cfg.spacing)
        rin = np.abs(inner) if d == 1 else np.hypot(inner[:, 0], inner[:, 1])
        win = rin if mode == "seminorm" else 1 + rin
        worst = max(worst, float(np.max(2.0 ** (band.j * s) * win ** (-s) * np.abs(sym(inner)))))
    return worst

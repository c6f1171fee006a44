import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stockframe import (
    FrameIndex,
    FrameSpec,
    analyze,
    boxcar,
    frame_element_freq,
    frame_element_time,
    gaussian,
    gram,
    make_dyadic_1d,
    make_polar_2d,
    sinc_window,
    tensor,
)
from stockframe.frame import BandwidthError, fmt, frame_operator_apply, naive_coefficient, walnut_apply
from stockframe.grid import FrequencyGrid, grid_from_points, phase_analysis, phase_synthesis
from stockframe.sobolev import GaussianSignal, MixtureSignal, TranslatedSignal

SPEC = FrameSpec(make_dyadic_1d(3), gaussian(), nu=0.5, lambda_max=8)
SEMI = FrameSpec(make_dyadic_1d(2), gaussian(), nu=0.5, seminorm_mode=True, j_neg=2, lambda_max=8)

INDICES = [
    (SPEC, FrameIndex(("bullet",), (0.0,))),
    (SPEC, FrameIndex(("bullet",), (1.5,))),
    (SPEC, FrameIndex((0, "+"), (-2.0,))),
    (SPEC, FrameIndex((1, "-"), (0.5,))),
    (SPEC, FrameIndex((2, "+"), (3.0,))),
    (SPEC, FrameIndex((3, "-"), (-1.0,))),
    (SPEC, FrameIndex((3, "+"), (8.0,))),
    (SEMI, FrameIndex((-1, "+"), (0.5,))),
    (SEMI, FrameIndex((-2, "-"), (-1.5,))),
    (SEMI, FrameIndex((2, "-"), (2.0,))),
]


@pytest.mark.parametrize("spec, idx", INDICES, ids=[f"{i.key}@{i.lam[0]}" for _, i in INDICES])
def test_time_element_is_inverse_transform(spec, idx):
    # midpoint inverse transform on a fine grid wide enough for contracted symbols
    h = 1 / 512
    om = (np.arange(-24 * 512, 24 * 512) + 0.5) * h
    vals = frame_element_freq(spec, idx, om)
    band = spec.band(idx.key)
    centre = idx.lam[0] * band.tau
    t = centre + np.linspace(-2, 2, 41) * (4.0 ** max(0, -band.j))
    num = (vals * h) @ np.exp(2j * np.pi * np.outer(om, t))
    np.testing.assert_allclose(frame_element_time(spec, idx, t), num, atol=1e-8)


def test_conjugate_symmetry_between_directions():
    t = np.linspace(-3, 3, 61)
    for j in range(4):
        for lam in (-1.0, 0.0, 2.5):
            plus = frame_element_time(SPEC, FrameIndex((j, "+"), (lam,)), t)
            minus = frame_element_time(SPEC, FrameIndex((j, "-"), (lam,)), t)
            np.testing.assert_allclose(minus, np.conj(plus), atol=1e-14)


def test_translation_relabels_coefficients():
    # shifting by nu moves band j by 2**j lattice steps
    spec = SPEC
    f = GaussianSignal(0.7, (0.1,), (1.3,))
    g = TranslatedSignal(f, (spec.nu,))
    cf, cg = analyze(spec, f), analyze(spec, g)
    for b in spec.bands():
        step = int(round(1 / b.tau))
        a, c = cf.blocks[b.key], cg.blocks[b.key]
        np.testing.assert_allclose(c[step:], a[:-step], atol=1e-13)


@settings(max_examples=15, deadline=None)
@given(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_analysis_is_linear(a, b):
    f = GaussianSignal(1.0, (0.2,), (0.5,))
    g = GaussianSignal(0.6, (-0.4,), (-2.0,))
    mix = MixtureSignal(((a, f), (b, g)))
    tm, tf, tg = analyze(SPEC, mix), analyze(SPEC, f), analyze(SPEC, g)
    for key in tm.keys():
        np.testing.assert_allclose(tm.blocks[key], a * tf.blocks[key] + b * tg.blocks[key], atol=1e-12)


def test_gram_is_hermitian_and_psd():
    idx = SPEC.indices(lmax=2)
    G = gram(SPEC, idx)
    np.testing.assert_allclose(G, G.conj().T, atol=1e-15)
    assert np.min(np.linalg.eigvalsh(G)) > -1e-12
    # spot-check entries by direct quadrature
    g = SPEC.grid
    pts = g.points()
    for a, b in [(0, 5), (7, 30), (12, 44)]:
        direct = np.sum(frame_element_freq(SPEC, idx[a], pts) * np.conj(frame_element_freq(SPEC, idx[b], pts)))
        assert G[a, b] == pytest.approx(direct * g.cell, abs=1e-14)


def test_sinc_elements_are_orthonormal_exact_normalization():
    spec = FrameSpec(make_dyadic_1d(2), sinc_window(), nu=1.0)
    idx = spec.indices(lmax=3)
    G = gram(spec, idx)
    assert np.max(np.abs(G - np.eye(len(idx)))) < 1e-12


def test_gram_2d_small():
    spec = FrameSpec(make_polar_2d(1), tensor(gaussian(), gaussian()), nu=1.0, lambda_max=1, points=256)
    idx = spec.indices(keys={("bullet",), (0, 0), (1, 3)})
    G = gram(spec, idx)
    np.testing.assert_allclose(G, G.conj().T, atol=1e-15)
    assert np.all(np.diag(G).real > 0)
    assert np.min(np.linalg.eigvalsh(G)) > -1e-12


def test_fast_analysis_2d_matches_naive():
    spec = FrameSpec(make_polar_2d(1), tensor(gaussian(), gaussian()), nu=1.0, lambda_max=1, points=256)
    sig = GaussianSignal(0.8, (0.1, -0.2), (0.5, 1.0))
    table = analyze(spec, sig)
    vals = list(table.items())
    fast = np.array([v for _, v in vals])
    naive = np.array([naive_coefficient(spec, sig, i) for i, _ in vals])
    assert np.max(np.abs(fast - naive)) <= 1e-10 * np.max(np.abs(naive))


def test_walnut_matches_operator_1d():
    f = MixtureSignal(((1.0, GaussianSignal(0.9, (0.3,), (2.0,))), (0.5j, GaussianSignal(1.2, (-0.5,), (-1.0,)))))
    spec = FrameSpec(make_dyadic_1d(2), gaussian(), nu=0.25, lambda_max=16)
    for s in (0.0, 1.0):
        a = frame_operator_apply(spec, f, s)
        b = walnut_apply(spec, f, s)
        assert np.max(np.abs(a - b)) <= 1e-10 * np.max(np.abs(a))


@pytest.mark.parametrize("theta", [1 / 64, 1 / 48, 0.013])
def test_phase_kernels_match_direct_sums(theta):
    grid = FrequencyGrid(96, 1 / 8, 1)
    rng = np.random.default_rng(3)
    v = rng.normal(size=192) + 1j * rng.normal(size=192)
    L = 5
    nn = grid.index + 0.5
    ls = np.arange(-L, L + 1)
    direct = np.exp(2j * np.pi * theta * np.outer(ls, nn)) @ v
    np.testing.assert_allclose(phase_analysis(grid, v, theta, L), direct, atol=1e-11)
    c = rng.normal(size=2 * L + 1) + 0j
    back = np.exp(-2j * np.pi * theta * np.outer(nn, ls)) @ c
    np.testing.assert_allclose(phase_synthesis(grid, c, theta), back, atol=1e-11)


def test_grid_from_points_is_dyadic_and_cell_centred():
    g = grid_from_points(24, 2 ** 16)
    assert np.log2(1 / g.spacing) == int(np.log2(1 / g.spacing))
    assert g.omega_max >= 24
    assert g.axis[0] == -g.axis[-1]
    assert not np.any(np.isclose(np.mod(g.axis, 0.5), 0))
    with pytest.raises(ValueError):
        grid_from_points(0, 10)


def test_bandwidth_error():
    with pytest.raises(BandwidthError):
        analyze(SPEC, GaussianSignal(0.05))


def test_csv_layout_and_precision():
    table = analyze(SPEC, GaussianSignal(1.0, (0.0,), (1.0,)))
    lines = table.to_csv().splitlines()
    assert lines[0] == "tag,j,k,lambda,re,im,weight"
    assert len(lines) == 1 + len(SPEC.bands()) * (2 * SPEC.L + 1)
    assert lines[1].startswith("bullet,,,-8,")
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(-0.0) == "0"


def test_spec_json_round_trip_and_validation():
    again = FrameSpec.from_json(SEMI.to_json())
    assert again.to_json() == SEMI.to_json()
    assert [b.key for b in again.bands()] == [b.key for b in SEMI.bands()]
    with pytest.raises(ValueError):
        FrameSpec(make_dyadic_1d(2), gaussian(), nu=0)
    with pytest.raises(ValueError):
        FrameSpec(make_dyadic_1d(2), tensor(gaussian(), gaussian()))
    with pytest.raises(ValueError):
        FrameSpec(make_dyadic_1d(2), gaussian(), omega_max=4)
    with pytest.raises(ValueError):
        frame_element_freq(SPEC, FrameIndex((1, "+"), (0.3,)), 0.0)
    with pytest.raises(KeyError):
        SPEC.band((9, "+"))


def test_seminorm_band_order_and_weights():
    keys = [b.key for b in SEMI.bands()]
    assert keys[0] == (-2, "+") and ("bullet",) not in keys
    b = SEMI.band((-1, "+"))
    assert b.tau == 2.0 and b.weight(0.5) == 0.5
    box = FrameSpec(make_dyadic_1d(2), boxcar(), normalization="dyadic")
    assert box.band((2, "+")).amplitude == 0.5

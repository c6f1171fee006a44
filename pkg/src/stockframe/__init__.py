"""Stockwell-type frames for Sobolev spaces on the line and the plane."""
from .partition import (
    Band,
    FrequencyPartition,
    contract_band,
    distance_to_band,
    enlarged_region,
    lattice_points,
    make_dyadic_1d,
    make_polar_2d,
    validate_admissible,
)
from .window import Window, band_symbol, boxcar, bspline_freq, gaussian, sinc_pow, sinc_window, tensor
from .frame import (
    FrameIndex,
    FrameSpec,
    analyze,
    frame_element_freq,
    frame_element_time,
    frame_operator_apply,
    gram,
    walnut_apply,
)

__version__ = "0.1.0"

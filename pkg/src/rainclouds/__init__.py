"""Raincloud plots: summary statistics, shape estimators, layout,
a deterministic rasterizer, and algebraic robustness checks.

A raincloud combines three bands. The cloud shows the overall shape of the
distribution, the rain shows individual values, and the optional lightning
shows derived statistics such as quartiles or the mean.

>>> from rainclouds import RaincloudSpec, render_raincloud, write_ppm
>>> img = render_raincloud([1.0, 2.0, 2.5, 4.0], RaincloudSpec())
>>> write_ppm(img)[:11]
b'P6\\n400 160\\n'
"""
from .errors import (
    BandTooThin,
    EmptySample,
    InsufficientData,
    InvalidParameter,
    RaincloudError,
    ShapeMismatch,
)
from .stats import *  # noqa: F401,F403
from .shape import *  # noqa: F401,F403
from .layout import *  # noqa: F401,F403
from .render import *  # noqa: F401,F403
from .avd import *  # noqa: F401,F403
from .config import *  # noqa: F401,F403
from .rng import SplitMix64
from . import avd, config, layout, render, shape, stats

__version__ = "0.1.0"

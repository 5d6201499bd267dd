"""STAR / STAR-S hyperspectral denoising.

Arrays are float64 cubes of shape (n1, n2, n3) with the spectral axis last.
"""

import json

from ._core import (
    DimsError,
    FormatError,
    MetricUndefined,
    ModeError,
    NumericError,
    ParamError,
    ScheduleParseError,
    StarError,
    ergas,
    psnr,
    read_cube,
    sam,
    simulate,
    soft_threshold,
    ssim,
    tensor_svt,
    write_cube,
)
from ._core import default_schedule as _default_schedule
from ._core import denoise as _denoise
from ._core import metrics

__all__ = [
    "DimsError",
    "FormatError",
    "MetricUndefined",
    "ModeError",
    "NumericError",
    "ParamError",
    "ScheduleParseError",
    "StarError",
    "default_schedule",
    "denoise",
    "ergas",
    "metrics",
    "psnr",
    "read_cube",
    "sam",
    "simulate",
    "soft_threshold",
    "ssim",
    "tensor_svt",
    "write_cube",
]


def default_schedule(model="star", k=9):
    """Default stage schedule as a dict."""
    return json.loads(_default_schedule(model, k))


def denoise(noisy, schedule=None, **kwargs):
    """Denoise a cube; `schedule` may be a dict or a JSON string.

    Returns (denoised, report).
    """
    if isinstance(schedule, dict):
        schedule = json.dumps(schedule)
    return _denoise(noisy, schedule=schedule, **kwargs)

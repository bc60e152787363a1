"""Least-squares envelopes in log-log coordinates.

Data are exact until this module; only the regression itself uses floats.
"""

import math
from dataclasses import asdict, dataclass
from statistics import StatisticsError, linear_regression

RESIDUAL_DIGITS = 9


def _r(x):
    return round(x, RESIDUAL_DIGITS)


@dataclass(frozen=True)
class PowerFit:
    """``log y ≈ slope * log x + intercept`` with envelope intercepts.

    ``upper`` and ``lower`` are the intercepts that make the line an upper
    (resp. lower) envelope of the data: ``y <= e^upper x^slope`` and
    ``y >= e^lower x^slope`` on every point.
    """

    slope: float
    intercept: float
    upper: float
    lower: float
    max_residual: float
    rms_residual: float
    points: int
    degenerate: bool

    def to_json(self):
        return asdict(self)


def fit_power(xs, ys, linear_y=False):
    """Fit ``log y`` against ``log x``; with ``linear_y`` fit ``y`` itself against ``log x``."""
    if len(xs) != len(ys) or not xs:
        raise ValueError("need equally many x and y values")
    u = [math.log(x) for x in xs]
    v = [float(y) if linear_y else math.log(y) for y in ys]
    if len(set(u)) < 2:
        return PowerFit(math.nan, math.nan, math.nan, math.nan, math.nan, math.nan, len(u), True)
    try:
        slope, intercept = linear_regression(u, v)
    except StatisticsError:
        return PowerFit(math.nan, math.nan, math.nan, math.nan, math.nan, math.nan, len(u), True)
    res = [b - (slope * a + intercept) for a, b in zip(u, v)]
    return PowerFit(
        slope=_r(slope),
        intercept=_r(intercept),
        upper=_r(intercept + max(res)),
        lower=_r(intercept + min(res)),
        max_residual=_r(max(abs(r) for r in res)),
        rms_residual=_r(math.sqrt(sum(r * r for r in res) / len(res))),
        points=len(u),
        degenerate=False,
    )


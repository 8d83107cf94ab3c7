from __future__ import annotations

import math
import typing

import numpy as np

from egocount.errors import DimensionMismatch, UndefinedMetric

if typing.TYPE_CHECKING:
    import numpy.typing as npt


def rmse(estimates: npt.ArrayLike, truth: float) -> float:
    x = np.asarray(estimates, dtype=np.float64)
    if x.size == 0:
        raise UndefinedMetric("No estimates given")
    return math.sqrt(float(np.mean((x - truth) ** 2)))


def nrmse(estimates: npt.ArrayLike, truth: float) -> float:
    """Root mean square error over replications, divided by the true value."""
    if truth <= 0:
        raise UndefinedMetric(f"NRMSE is undefined for a true value of {truth}")
    return rmse(estimates, truth) / truth


def nmae(estimates: npt.ArrayLike, truth: npt.ArrayLike) -> float:
    """sum_i |x_i - t_i| / sum_i |t_i| over one estimated vector."""
    x = np.asarray(estimates, dtype=np.float64)
    t = np.asarray(truth, dtype=np.float64)
    if x.shape != t.shape:
        raise DimensionMismatch(f"Estimate vector {x.shape} and truth {t.shape} differ")
    scale = float(np.sum(np.abs(t)))
    if scale <= 0:
        raise UndefinedMetric("NMAE is undefined when every true value is 0")
    return float(np.sum(np.abs(x - t))) / scale


def nmae_per_replication(estimates: npt.ArrayLike, truth: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """NMAE of each row of a (replications x patterns) estimate matrix."""
    x = np.atleast_2d(np.asarray(estimates, dtype=np.float64))
    return np.array([nmae(row, truth) for row in x])

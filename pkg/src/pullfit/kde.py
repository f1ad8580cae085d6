"""Gaussian kernel density on a uniform grid, used as an approximate likelihood.

The density is tabulated once per synthetic sample set and looked up with
linear interpolation, so evaluating many observations is cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import (DegenerateDistribution, EmptyObservations, InsufficientSamples,
                     InvalidBandwidth, InvalidGrid)

DEFAULT_GRID_SIZE = 512
DEFAULT_DENSITY_FLOOR = 1e-12
GRID_PAD = 4.0  # bandwidths beyond the sample range
# kernel tails beyond this many bandwidths are < 1e-31 of the peak
_KERNEL_CUTOFF = 12.0
_REANCHOR_EVERY = 64
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

_trapezoid = getattr(np, "trapezoid", None) or np.trapz


def silverman_bandwidth(samples) -> float:
    """Silverman's rule of thumb, ``0.9 * min(sd, IQR / 1.349) * n ** -0.2``.

    The sd uses the n - 1 denominator; quartiles interpolate linearly between
    order statistics.
    """
    x = np.asarray(samples, dtype=float).ravel()
    n = x.size
    if n < 2:
        raise InsufficientSamples(f"bandwidth needs at least 2 samples, got {n}")
    if np.all(x == x[0]):
        raise DegenerateDistribution("all samples are identical; bandwidth is zero")
    sd = float(np.std(x, ddof=1))
    q25, q75 = np.percentile(x, [25.0, 75.0])
    iqr = float(q75 - q25)
    spread = min(sd, iqr / 1.349) if iqr > 0 else sd
    return 0.9 * spread * n ** -0.2


@numba.njit(nogil=True, cache=True)
def _kernel_sum(samples, lo, step, grid_size, h):
    # sum_i exp(-u^2 / 2) at every grid point, walking each kernel with the
    # recurrence exp(-(u+d)^2/2) = exp(-u^2/2) * exp(-u d - d^2/2)
    out = np.zeros(grid_size)
    d = step / h
    r = math.exp(-d * d)
    reach = _KERNEL_CUTOFF * h
    for i in range(samples.size):
        s = samples[i]
        j0 = max(0, int(math.ceil((s - reach - lo) / step)))
        j1 = min(grid_size - 1, int(math.floor((s + reach - lo) / step)))
        j = j0
        while j <= j1:
            u = (lo + j * step - s) / h
            e = math.exp(-0.5 * u * u)
            q = math.exp(-u * d - 0.5 * d * d)
            stop = min(j1, j + _REANCHOR_EVERY - 1)
            while j <= stop:
                out[j] += e
                e *= q
                q *= r
                j += 1
    return out


@dataclass(frozen=True, eq=False)
class KdeModel:
    bandwidth: float
    grid_x: np.ndarray
    grid_density: np.ndarray
    density_floor: float = DEFAULT_DENSITY_FLOOR

    @property
    def step(self) -> float:
        return float(self.grid_x[1] - self.grid_x[0])

    def integral(self) -> float:
        return float(_trapezoid(self.grid_density, self.grid_x))


def build_kde(samples, bandwidth: float, grid_size: int = DEFAULT_GRID_SIZE,
              density_floor: float = DEFAULT_DENSITY_FLOOR) -> KdeModel:
    """Tabulate the Gaussian KDE of ``samples`` on ``grid_size`` uniform points.

    The grid spans the sample range padded by four bandwidths on each side.
    Raises :class:`InvalidGrid` when the spacing exceeds the bandwidth, since
    the tabulated density could then no longer integrate to one.
    """
    x = np.ascontiguousarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise InsufficientSamples("cannot build a density from zero samples")
    if not (bandwidth > 0 and math.isfinite(bandwidth)):
        raise InvalidBandwidth(f"bandwidth must be positive and finite, got {bandwidth}")
    if grid_size < 16:
        raise InvalidGrid(f"grid_size must be >= 16, got {grid_size}")
    if not density_floor > 0:
        raise InvalidGrid(f"density_floor must be positive, got {density_floor}")
    lo = float(x.min()) - GRID_PAD * bandwidth
    hi = float(x.max()) + GRID_PAD * bandwidth
    grid_x = np.linspace(lo, hi, grid_size)
    step = (hi - lo) / (grid_size - 1)
    if step > bandwidth:
        raise InvalidGrid(
            f"grid spacing {step:.4g} exceeds bandwidth {bandwidth:.4g}; "
            f"increase grid_size")
    sums = _kernel_sum(x, lo, step, grid_size, bandwidth)
    density = sums * (_INV_SQRT_2PI / (x.size * bandwidth))
    return KdeModel(float(bandwidth), grid_x, density, float(density_floor))


def density_at(kde: KdeModel, x):
    """Interpolated density, floored; points off the grid get the floor."""
    xs = np.asarray(x, dtype=float)
    inside = (xs >= kde.grid_x[0]) & (xs <= kde.grid_x[-1])
    dens = np.where(inside, np.interp(xs, kde.grid_x, kde.grid_density), kde.density_floor)
    dens = np.maximum(dens, kde.density_floor)
    return float(dens) if dens.ndim == 0 else dens


def log_likelihood(kde: KdeModel, observations) -> float:
    obs = np.asarray(observations, dtype=float).ravel()
    if obs.size == 0:
        raise EmptyObservations("log-likelihood needs at least one observation")
    return float(np.sum(np.log(density_at(kde, obs))))

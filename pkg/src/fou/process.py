"""Fractional OU paths and the least-squares drift estimator.

The path solves dX = -theta X dt + dB^H, X_0 = 0, discretized with the
exact integrating factor: x[k+1] = exp(-theta dt) x[k] + dB_k.  This is
unconditionally stable; the remaining error is the order-dt approximation
of the noise integral over each cell.

The estimator -int X dX / int X^2 dt comes in two computable forms:

* pathwise_ito (H = 1/2):    theta_hat = (T - X_T^2) / (2 int X^2 dt)
* skorohod_oracle (H > 1/2): theta_hat = -(Y - c_T(theta)) / int X^2 dt,
  where Y is the Young integral of X against itself and c_T(theta) is the
  divergence-trace correction.  c_T needs the true theta, so this form is
  a simulation instrument only.

The same error, normalized by sqrt(T / (theta sigma2_H)), equals a ratio
of two recentred quadratic forms in the driving noise (second-chaos form);
`i2` and `normalized_statistic` evaluate that ratio on the discrete grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .constants import (
    ModelParams,
    sigma2_h,
    skorohod_correction,
    stationary_variance,
)
from .errors import DegeneratePathError, NumericsError
from .fgn import Grid, GramWeights, NoisePath, gram_weights

PATHWISE_ITO = "pathwise_ito"
SKOROHOD_ORACLE = "skorohod_oracle"
CHAOS_RATIO = "chaos_ratio"

DEGENERATE_DENOM_FACTOR = 1e-12
NEAR_ZERO_DENOM = 1e-9


@dataclass(frozen=True)
class FouPath:
    """Node values of the simulated process; x[0] = 0, replayable from noise."""

    grid: Grid
    params: ModelParams
    x: np.ndarray = field(repr=False)
    noise: NoisePath = field(repr=False)


@dataclass(frozen=True)
class EstimatorResult:
    theta_hat: float
    numerator: float
    denominator: float
    method: str

    def __post_init__(self) -> None:
        if self.denominator <= 0:
            raise ValueError(f"denominator must be positive, got {self.denominator}")


def simulate_fou(grid: Grid, params: ModelParams, noise: NoisePath) -> FouPath:
    """Run the exact-factor recursion x[k+1] = exp(-theta dt) x[k] + xi[k]."""
    if noise.grid != grid:
        raise ValueError("noise was generated on a different grid")
    if noise.hurst != params.hurst:
        raise ValueError(f"noise hurst {noise.hurst} != params hurst {params.hurst}")
    if grid.horizon != params.horizon:
        raise ValueError(f"grid horizon {grid.horizon} != params horizon {params.horizon}")
    rho = math.exp(-params.theta * grid.step)
    x = np.empty(grid.n + 1)
    x[0] = 0.0
    x[1:] = lfilter([1.0], [1.0, -rho], noise.xi)
    return FouPath(grid=grid, params=params, x=x, noise=noise)


def _integral_x2(path: FouPath) -> float:
    """Trapezoid rule for int_0^T X^2 dt on the node values."""
    x2 = path.x * path.x
    return float(path.grid.step * (0.5 * x2[0] + x2[1:-1].sum() + 0.5 * x2[-1]))


def estimate_pathwise(path: FouPath) -> EstimatorResult:
    """Least-squares drift estimate from one trajectory.

    H = 1/2 uses the Ito identity directly.  H > 1/2 evaluates the Young
    integral of X dX by the trapezoid sum, which telescopes exactly to
    X_T^2 / 2, then subtracts the theta-dependent trace correction.  (A
    left-point sum differs by half the discrete quadratic variation, which
    at step dt decays only like dt^(2H-1) and visibly biases the estimate;
    the trapezoid sum is the same Riemann-Stieltjes limit without that
    defect.)
    """
    p = path.params
    denominator = _integral_x2(path)
    floor = DEGENERATE_DENOM_FACTOR * p.horizon * stationary_variance(p)
    if denominator < floor:
        raise DegeneratePathError(
            f"int X^2 dt = {denominator} below {floor}; wiring or RNG problem")
    x_t = float(path.x[-1])
    if p.hurst == 0.5:
        numerator = 0.5 * (p.horizon - x_t * x_t)
        method = PATHWISE_ITO
    else:
        young = 0.5 * x_t * x_t  # trapezoid sum of X dX telescopes exactly
        numerator = -(young - skorohod_correction(p))
        method = SKOROHOD_ORACLE
    return EstimatorResult(theta_hat=numerator / denominator,
                           numerator=numerator, denominator=denominator,
                           method=method)


def i2(kernel, noise: NoisePath, weights: GramWeights) -> float:
    """Discrete double Wiener-Ito integral of a midpoint-sampled kernel:

        sum_ij K[i,j] (xi_i xi_j - W[i,j]),

    a quadratic form recentred with the exact increment covariances, so
    its expectation is zero by construction.
    """
    k = kernel.k
    if noise.grid != weights.grid or kernel.grid != weights.grid:
        raise ValueError("kernel, noise and weights must share one grid")
    if noise.hurst != weights.hurst:
        raise ValueError(f"noise hurst {noise.hurst} != weights hurst {weights.hurst}")
    xi = noise.xi
    return float(xi @ k @ xi - np.einsum("ij,ij->", k, weights.w))


def normalized_statistic(path: FouPath, kernel_f, kernel_g, b_t: float,
                         weights: GramWeights | None = None) -> float:
    """sqrt(T / (theta sigma2_H)) (theta_hat - theta) in second-chaos form.

    Equals -I2(f) / (I2(g) + b_T) on the path's own noise: the numerator
    kernel enters with a minus sign because the estimator error is minus
    the divergence integral over the denominator.  b_t must come from the
    closed form (positive).
    """
    if b_t <= 0:
        raise ValueError(f"b_t must be positive, got {b_t}")
    if weights is None:
        weights = gram_weights(path.grid, path.params.hurst)
    numerator = -i2(kernel_f, path.noise, weights)
    denominator = i2(kernel_g, path.noise, weights) + b_t
    if abs(denominator) < NEAR_ZERO_DENOM:
        raise NumericsError(f"chaos denominator {denominator} is numerically zero")
    return numerator / denominator


def normalized_pathwise_statistic(path: FouPath) -> float:
    """sqrt(T / (theta sigma2_H)) (theta_hat - theta) from estimate_pathwise."""
    p = path.params
    est = estimate_pathwise(path)
    return math.sqrt(p.horizon / (p.theta * sigma2_h(p.hurst))) * (est.theta_hat - p.theta)

"""
Multi-hop relay-assisted D2D capacity

    C = (lambda_d / N) * (lambda_d + gamma_dr * lambda_r) * I(zeta_dr)
    I(k) = integral_0^inf exp(-k v) / (1 + v) dv

with zeta_dr = C_alpha * R_r^2 * V_d^(2/alpha), R_r = R_d / N and
gamma_dr = (p_r / p_d)^(2/alpha). I(k) equals exp(k)*E1(k).

The reading of the integrand lives in `_kernel_terms`; IntegrandVariant.EXPONENT
keeps the alternate parse where the density sum multiplies the decay instead.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from typing import List, Optional, Sequence, Tuple

from scipy.integrate import quad
from scipy.special import gamma as gamma_fn

from covsim.core.errors import ParameterError, QuadratureError
from covsim.core.validation import require_count, require_positive

logger = logging.getLogger(__name__)

DEFAULT_QUAD_TOLERANCE = 1e-10
RELAY_DENSITY_SWEEP = (0.1, 0.2, 0.3, 0.4, 0.5)

_QUAD_LIMIT = 500
_QUAD_EPSREL = 1e-12


class IntegrandVariant(str, Enum):
    PREFACTOR = "prefactor"
    EXPONENT = "exponent"


def interference_constant(alpha: float) -> float:
    """C_alpha = (2*pi/alpha) * Gamma(2/alpha) * Gamma(1 - 2/alpha)"""
    require_positive("alpha", alpha)
    if alpha <= 2.0:
        raise ParameterError("alpha", f"must be > 2, got {alpha!r}")
    return float((2.0 * math.pi / alpha) * gamma_fn(2.0 / alpha) * gamma_fn(1.0 - 2.0 / alpha))


@dataclass(frozen=True)
class CapacityParams:
    lambda_d: float = 3.3e-4
    lambda_r: float = 0.3
    r_d_m: float = 50.0
    n_hops: int = 10
    alpha: float = 3.0
    v_d_threshold: float = 1.0
    p_relay_w: float = 1.0
    p_d2d_w: float = 1.0
    c_alpha: Optional[float] = None  # None selects interference_constant(alpha)
    variant: IntegrandVariant = IntegrandVariant.PREFACTOR

    def __post_init__(self):
        require_positive("lambda_d", self.lambda_d)
        # lambda_r = 0 is the relay-free reference case
        if not math.isfinite(self.lambda_r) or self.lambda_r < 0:
            raise ParameterError("lambda_r", f"must be finite and >= 0, got {self.lambda_r!r}")
        require_positive("r_d_m", self.r_d_m)
        require_count("n_hops", self.n_hops, minimum=1)
        require_positive("alpha", self.alpha)
        if self.alpha <= 2.0:
            raise ParameterError("alpha", f"must be > 2, got {self.alpha!r}")
        require_positive("v_d_threshold", self.v_d_threshold)
        require_positive("p_relay_w", self.p_relay_w)
        require_positive("p_d2d_w", self.p_d2d_w)
        if self.c_alpha is not None:
            require_positive("c_alpha", self.c_alpha)
        object.__setattr__(self, "variant", IntegrandVariant(self.variant))

    @property
    def resolved_c_alpha(self) -> float:
        """c_alpha as given, or interference_constant(alpha) when left at None"""
        if self.c_alpha is None:
            return interference_constant(self.alpha)
        return self.c_alpha


@dataclass(frozen=True)
class CapacityResult:
    capacity: float
    zeta_dr: float
    gamma_dr: float
    quadrature_abs_error: float


def hop_distance(r_d_m: float, n_hops: int) -> float:
    """Per-hop distance R_r = R_d / N"""
    require_positive("r_d_m", r_d_m)
    require_count("n_hops", n_hops, minimum=1)
    return r_d_m / n_hops


def power_ratio_gamma(p_relay_w: float, p_d2d_w: float, alpha: float) -> float:
    """(p_r / p_d)^(2/alpha)"""
    require_positive("p_relay_w", p_relay_w)
    require_positive("p_d2d_w", p_d2d_w)
    if not alpha > 2.0:
        raise ParameterError("alpha", f"must be > 2, got {alpha!r}")
    return (p_relay_w / p_d2d_w) ** (2.0 / alpha)


def zeta_dr(c_alpha: float, r_r_m: float, v_d_threshold: float, alpha: float) -> float:
    """C_alpha * R_r^2 * V_d^(2/alpha)"""
    require_positive("c_alpha", c_alpha)
    require_positive("r_r_m", r_r_m)
    require_positive("v_d_threshold", v_d_threshold)
    require_positive("alpha", alpha)
    return c_alpha * r_r_m ** 2 * v_d_threshold ** (2.0 / alpha)


def capacity_integral(decay: float, quad_tolerance: float = DEFAULT_QUAD_TOLERANCE) -> Tuple[float, float]:
    """
    I(k) = integral_0^inf exp(-k v)/(1 + v) dv by adaptive quadrature.

    Returns (value, abs_error) where abs_error includes the truncation tail.
    The range is cut at V_max with exp(-k V_max)/k below both tol/10 and
    1e-13/(1 + k), so the tail stays negligible next to I(k) >= 1/(1 + k).
    For k > 1 the integral is taken in u = k*v so the integrand stays O(1)
    however fast it decays.
    """
    if not decay > 0.0 or not math.isfinite(decay):
        raise ParameterError("zeta_dr", f"must be finite and > 0 for the integral to converge, got {decay!r}")
    require_positive("quad_tolerance", quad_tolerance)

    tail = min(quad_tolerance, _QUAD_EPSREL / (1.0 + decay)) / 10.0
    v_max = max(math.log(1.0 / (decay * tail)) / decay, 1.0 / decay)
    epsabs = 0.9 * quad_tolerance

    # full_output keeps QUADPACK diagnostics local instead of raising warnings
    if decay > 1.0:
        out = quad(lambda u: math.exp(-u) / (1.0 + u / decay), 0.0, decay * v_max,
                   epsabs=epsabs, epsrel=_QUAD_EPSREL, limit=_QUAD_LIMIT, full_output=1)
        scale = 1.0 / decay
    else:
        breaks = sorted({p for p in (1.0, 1.0 / decay) if p < v_max})
        out = quad(lambda v: math.exp(-decay * v) / (1.0 + v), 0.0, v_max,
                   epsabs=epsabs, epsrel=_QUAD_EPSREL, limit=_QUAD_LIMIT,
                   points=breaks or None, full_output=1)
        scale = 1.0
    value, err = out[0] * scale, out[1] * scale
    total_err = err + math.exp(-decay * v_max) / decay

    if len(out) > 3:
        raise QuadratureError(decay, total_err, quad_tolerance, str(out[3]).strip())
    if total_err > quad_tolerance:
        raise QuadratureError(decay, total_err, quad_tolerance)
    return value, total_err


def _kernel_terms(params: CapacityParams, zeta: float, gamma_dr: float) -> Tuple[float, float]:
    """(prefactor, decay) for the selected reading of the integrand."""
    density = params.lambda_d + gamma_dr * params.lambda_r
    if params.variant is IntegrandVariant.PREFACTOR:
        return (params.lambda_d / params.n_hops) * density, zeta
    return params.lambda_d / params.n_hops, zeta * density


def system_capacity(params: CapacityParams, quad_tolerance: float = DEFAULT_QUAD_TOLERANCE) -> CapacityResult:
    r_r = hop_distance(params.r_d_m, params.n_hops)
    zeta = zeta_dr(params.resolved_c_alpha, r_r, params.v_d_threshold, params.alpha)
    gamma_dr = power_ratio_gamma(params.p_relay_w, params.p_d2d_w, params.alpha)
    prefactor, decay = _kernel_terms(params, zeta, gamma_dr)
    integral, err = capacity_integral(decay, quad_tolerance)
    return CapacityResult(
        capacity=prefactor * integral,
        zeta_dr=zeta,
        gamma_dr=gamma_dr,
        quadrature_abs_error=err,
    )


def capacity_vs_hops(params: CapacityParams, n_range: Sequence[int],
                     quad_tolerance: float = DEFAULT_QUAD_TOLERANCE) -> List[Tuple[int, float]]:
    """Capacity for every hop count in n_range, ascending in N."""
    if len(n_range) == 0:
        raise ParameterError("n_range", "must not be empty")
    series = []
    for n in sorted(n_range):
        result = system_capacity(replace(params, n_hops=require_count("n_hops", n, minimum=1)),
                                 quad_tolerance)
        series.append((n, result.capacity))
    return series


def capacity_vs_relay_density(params: CapacityParams, lambda_r_grid: Sequence[float], n_range: Sequence[int],
                              quad_tolerance: float = DEFAULT_QUAD_TOLERANCE,
                              workers: int = 1) -> List[List[Tuple[int, float]]]:
    """One capacity_vs_hops series per relay density, in lambda_r_grid order."""
    if len(lambda_r_grid) == 0:
        raise ParameterError("lambda_r_grid", "must not be empty")

    def column(lambda_r: float) -> List[Tuple[int, float]]:
        return capacity_vs_hops(replace(params, lambda_r=lambda_r), n_range, quad_tolerance)

    if workers <= 1:
        return [column(lr) for lr in lambda_r_grid]
    logger.debug("evaluating %d relay densities on %d threads", len(lambda_r_grid), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(column, lambda_r_grid))

#!/usr/bin/env python3
"""
Air-to-ground channel model

Closed-form average channel between a hovering UAV and ground devices:
slant distance, sigmoid LoS probability over the elevation angle, free-space
loss and the LoS/NLoS mixed excess loss. Every function is pure.

Scalar arguments return floats; numpy arrays are evaluated elementwise.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from covsim.core.errors import ParameterError
from covsim.core.validation import (
    ArrayLike,
    as_output,
    require_finite,
    require_non_negative,
    require_positive,
    require_probability,
)

logger = logging.getLogger(__name__)

SPEED_OF_LIGHT_M_S = 299_792_458.0

# eta_LoS values swept in the path-loss vs P_LoS analysis
ETA_LOS_SWEEP_DB = (0.1, 1.0, 1.6, 2.3)

# served disc of the reference scenario
DEFAULT_COVERAGE_RADIUS_M = 300.0


@dataclass(frozen=True)
class EnvironmentProfile:
    """S-curve parameters (a, b) and excess losses for one environment class"""
    a: float = 10.0
    b: float = 0.6
    eta_los: float = 1.0
    eta_nlos: float = 20.0

    def __post_init__(self):
        require_positive("a", self.a)
        require_positive("b", self.b)
        require_non_negative("eta_los", self.eta_los)
        require_finite("eta_nlos", self.eta_nlos)
        if self.eta_nlos < self.eta_los:
            raise ParameterError("eta_nlos", f"must be >= eta_los ({self.eta_los}), got {self.eta_nlos}")


ENVIRONMENT_PRESETS: Dict[str, EnvironmentProfile] = {
    "default": EnvironmentProfile(10.0, 0.6, 1.0, 20.0),
    "suburban": EnvironmentProfile(4.88, 0.43, 0.1, 21.0),
    "urban": EnvironmentProfile(9.61, 0.16, 1.0, 20.0),
    "dense_urban": EnvironmentProfile(12.08, 0.11, 1.6, 23.0),
    "highrise_urban": EnvironmentProfile(27.23, 0.08, 2.3, 34.0),
}


def environment_preset(name: str) -> EnvironmentProfile:
    try:
        return ENVIRONMENT_PRESETS[name]
    except KeyError:
        valid = ", ".join(sorted(ENVIRONMENT_PRESETS))
        raise ParameterError("environment", f"unknown preset {name!r}; expected one of {valid}") from None


@dataclass(frozen=True)
class UavPlacement:
    """Static UAV: altitude h, ground projection and served disc radius"""
    altitude_m: float
    ground_x_m: float = 0.0
    ground_y_m: float = 0.0
    coverage_radius_m: float = DEFAULT_COVERAGE_RADIUS_M

    def __post_init__(self):
        require_positive("altitude_m", self.altitude_m)
        require_finite("ground_x_m", self.ground_x_m)
        require_finite("ground_y_m", self.ground_y_m)
        require_positive("coverage_radius_m", self.coverage_radius_m)

    def horizontal_range(self, x_m: ArrayLike, y_m: ArrayLike) -> ArrayLike:
        """Ground distance from the UAV projection to (x, y)"""
        return as_output(np.hypot(np.asarray(x_m, dtype=float) - self.ground_x_m,
                                  np.asarray(y_m, dtype=float) - self.ground_y_m))


@dataclass(frozen=True)
class LinkGeometry:
    horizontal_range_m: float
    slant_distance_m: float
    elevation_deg: float


def uav_ground_distance(horizontal_range_m: ArrayLike, altitude_m: ArrayLike) -> ArrayLike:
    """Slant distance d = sqrt(r^2 + h^2)"""
    require_non_negative("horizontal_range_m", horizontal_range_m)
    require_positive("altitude_m", altitude_m)
    return as_output(np.hypot(np.asarray(horizontal_range_m, dtype=float),
                              np.asarray(altitude_m, dtype=float)))


def elevation_angle_deg(horizontal_range_m: ArrayLike, altitude_m: ArrayLike) -> ArrayLike:
    """(180/pi)*atan(h/r) in degrees; the nadir point r = 0 maps to 90."""
    require_non_negative("horizontal_range_m", horizontal_range_m)
    require_positive("altitude_m", altitude_m)
    # arctan2 gives the r -> 0 limit without a division
    return as_output(np.degrees(np.arctan2(np.asarray(altitude_m, dtype=float),
                                           np.asarray(horizontal_range_m, dtype=float))))


def link_geometry(uav: UavPlacement, ground_x_m: float, ground_y_m: float) -> LinkGeometry:
    r = uav.horizontal_range(ground_x_m, ground_y_m)
    return LinkGeometry(
        horizontal_range_m=r,
        slant_distance_m=uav_ground_distance(r, uav.altitude_m),
        elevation_deg=elevation_angle_deg(r, uav.altitude_m),
    )


def p_los(horizontal_range_m: ArrayLike, altitude_m: ArrayLike, env: EnvironmentProfile) -> ArrayLike:
    """Sigmoid LoS probability 1 / (1 + a*exp(-b*(theta - a))), theta in degrees"""
    theta = np.asarray(elevation_angle_deg(horizontal_range_m, altitude_m), dtype=float)
    return as_output(1.0 / (1.0 + env.a * np.exp(-env.b * (theta - env.a))))


def p_nlos(horizontal_range_m: ArrayLike, altitude_m: ArrayLike, env: EnvironmentProfile) -> ArrayLike:
    return as_output(1.0 - np.asarray(p_los(horizontal_range_m, altitude_m, env), dtype=float))


def free_space_path_loss_db(carrier_hz: ArrayLike, distance_m: ArrayLike) -> ArrayLike:
    """20*log10(4*pi*f_c*d / c)"""
    require_positive("carrier_hz", carrier_hz)
    require_positive("distance_m", distance_m)
    f = np.asarray(carrier_hz, dtype=float)
    d = np.asarray(distance_m, dtype=float)
    return as_output(20.0 * np.log10(4.0 * math.pi * f * d / SPEED_OF_LIGHT_M_S))


def average_path_loss_db(carrier_hz: ArrayLike, distance_m: ArrayLike, p_los_value: ArrayLike,
                         env: EnvironmentProfile) -> ArrayLike:
    """FSPL + eta_LoS*P_LoS + eta_NLoS*(1 - P_LoS)"""
    require_probability("p_los", p_los_value)
    fspl = np.asarray(free_space_path_loss_db(carrier_hz, distance_m), dtype=float)
    p = np.asarray(p_los_value, dtype=float)
    return as_output(fspl + env.eta_los * p + env.eta_nlos * (1.0 - p))


def path_loss_at_relay(uav: UavPlacement, relay_xy: Tuple[float, float], carrier_hz: float,
                       env: EnvironmentProfile) -> float:
    """Average path loss on the UAV -> relay link"""
    x, y = relay_xy
    require_finite("relay_xy", (x, y))
    r = uav.horizontal_range(x, y)
    d = uav_ground_distance(r, uav.altitude_m)
    return average_path_loss_db(carrier_hz, d, p_los(r, uav.altitude_m, env), env)


def path_loss_vs_range_db(horizontal_range_m: ArrayLike, altitude_m: float, carrier_hz: float,
                          env: EnvironmentProfile) -> ArrayLike:
    """Average path loss seen by a ground point at horizontal range r"""
    d = uav_ground_distance(horizontal_range_m, altitude_m)
    return average_path_loss_db(carrier_hz, d, p_los(horizontal_range_m, altitude_m, env), env)


def coverage_radius_for_max_path_loss(altitude_m: float, max_path_loss_db: float, carrier_hz: float,
                                      env: EnvironmentProfile) -> float:
    """
    Largest horizontal range whose average path loss stays within the threshold.

    Path loss grows strictly with range (distance grows, P_LoS falls and
    eta_NLoS >= eta_LoS), so the boundary is a single bracketed root.
    """
    require_finite("max_path_loss_db", max_path_loss_db)

    def excess(r: float) -> float:
        return path_loss_vs_range_db(r, altitude_m, carrier_hz, env) - max_path_loss_db

    if excess(0.0) > 0.0:
        return 0.0
    hi = max(altitude_m, 1.0)
    while excess(hi) <= 0.0:
        hi *= 2.0
        if hi > 1e9:
            raise ParameterError("max_path_loss_db", f"threshold {max_path_loss_db} dB is never reached")
    return float(brentq(excess, 0.0, hi, xtol=1e-9, rtol=1e-12))


def optimal_altitude(max_path_loss_db: float, carrier_hz: float, env: EnvironmentProfile,
                     altitude_bounds_m: Sequence[float] = (10.0, 5000.0)) -> Tuple[float, float]:
    """Altitude within the bounds that maximises the coverage radius"""
    lo, hi = altitude_bounds_m
    require_positive("altitude_bounds_m", (lo, hi))
    if hi <= lo:
        raise ParameterError("altitude_bounds_m", f"upper bound must exceed lower, got {altitude_bounds_m!r}")

    result = minimize_scalar(
        lambda h: -coverage_radius_for_max_path_loss(h, max_path_loss_db, carrier_hz, env),
        bounds=(lo, hi), method="bounded", options={"xatol": 1e-3},
    )
    h_best = float(result.x)
    radius = coverage_radius_for_max_path_loss(h_best, max_path_loss_db, carrier_hz, env)
    logger.debug("optimal altitude %.2f m -> radius %.2f m", h_best, radius)
    return h_best, radius

import math

import numpy as np
import pytest

from covsim.core.atg_channel import (
    DEFAULT_COVERAGE_RADIUS_M,
    ENVIRONMENT_PRESETS,
    ETA_LOS_SWEEP_DB,
    SPEED_OF_LIGHT_M_S,
    EnvironmentProfile,
    UavPlacement,
    average_path_loss_db,
    coverage_radius_for_max_path_loss,
    elevation_angle_deg,
    environment_preset,
    free_space_path_loss_db,
    link_geometry,
    optimal_altitude,
    p_los,
    p_nlos,
    path_loss_at_relay,
    path_loss_vs_range_db,
    uav_ground_distance,
)
from covsim.core.errors import ParameterError

ENV = EnvironmentProfile(a=10.0, b=0.6, eta_los=1.0, eta_nlos=20.0)
DOUBLING_DB = 20.0 * math.log10(2.0)


def test_ground_distance_pythagorean_triple_is_exact():
    assert uav_ground_distance(3.0, 4.0) == 5.0


def test_ground_distance_overhead_and_diagonal():
    assert uav_ground_distance(0.0, 120.0) == 120.0
    assert uav_ground_distance(100.0, 100.0) == pytest.approx(100.0 * math.sqrt(2.0), rel=1e-12)


def test_ground_distance_matches_hypot_on_random_grid():
    rng = np.random.default_rng(11)
    r = rng.uniform(0.0, 5000.0, 1000)
    h = rng.uniform(1.0, 1000.0, 1000)
    d = uav_ground_distance(r, h)
    expected = np.array([math.hypot(a, b) for a, b in zip(r, h)])
    np.testing.assert_allclose(d, expected, rtol=1e-12)
    assert np.all(d >= h)


@pytest.mark.parametrize("r, h", [(-1.0, 10.0), (1.0, 0.0), (1.0, -5.0), (math.nan, 10.0), (1.0, math.inf)])
def test_ground_distance_rejects_bad_inputs(r, h):
    with pytest.raises(ParameterError):
        uav_ground_distance(r, h)


def test_elevation_is_ninety_degrees_at_nadir():
    assert elevation_angle_deg(0.0, 50.0) == 90.0


def test_p_los_saturates_overhead():
    assert abs(p_los(0.0, 120.0, ENV) - 1.0) < 1e-12
    assert abs(p_nlos(0.0, 120.0, ENV)) < 1e-12


def test_p_los_when_elevation_equals_a():
    h = 100.0
    r = h / math.tan(math.radians(ENV.a))
    assert p_los(r, h, ENV) == pytest.approx(1.0 / 11.0, abs=1e-12)
    assert p_nlos(r, h, ENV) == pytest.approx(10.0 / 11.0, abs=1e-12)


def test_p_los_and_p_nlos_sum_to_one():
    rng = np.random.default_rng(2024)
    r = rng.uniform(0.0, 3000.0, 10_000)
    h = rng.uniform(1.0, 500.0, 10_000)
    total = np.asarray(p_los(r, h, ENV)) + np.asarray(p_nlos(r, h, ENV))
    assert np.max(np.abs(total - 1.0)) <= 1e-15


def test_p_los_monotone_in_altitude_and_range():
    altitudes = np.linspace(10.0, 1000.0, 200)
    ranges = np.linspace(0.0, 2000.0, 200)
    assert np.all(np.diff(p_los(300.0, altitudes, ENV)) >= 0.0)
    assert np.all(np.diff(p_los(ranges, 120.0, ENV)) <= 0.0)
    inside = np.asarray(p_los(ranges, 120.0, ENV))
    assert np.all((inside > 0.0) & (inside <= 1.0))


def test_fspl_reference_values():
    assert free_space_path_loss_db(2.8e9, 100.0) == pytest.approx(81.39, abs=0.01)
    expected = 20.0 * math.log10(4.0 * math.pi * 2.8e9 * 100.0 / SPEED_OF_LIGHT_M_S)
    assert free_space_path_loss_db(2.8e9, 100.0) == pytest.approx(expected, abs=1e-12)


def test_fspl_carrier_gap_is_constant():
    for d in (10.0, 250.0, 4000.0):
        gap = free_space_path_loss_db(5.8e9, d) - free_space_path_loss_db(2.8e9, d)
        assert gap == pytest.approx(20.0 * math.log10(5.8 / 2.8), abs=1e-9)
        assert gap == pytest.approx(6.33, abs=0.005)


def test_fspl_distance_doubling_law():
    carriers = np.linspace(1e9, 1e10, 10)
    distances = np.logspace(0.0, 4.0, 25)
    f, d = np.meshgrid(carriers, distances)
    step = np.asarray(free_space_path_loss_db(f, 2.0 * d)) - np.asarray(free_space_path_loss_db(f, d))
    assert np.max(np.abs(step - DOUBLING_DB)) < 1e-9


def test_fspl_rejects_zero_distance():
    with pytest.raises(ParameterError):
        free_space_path_loss_db(2.8e9, 0.0)


def test_average_path_loss_degenerate_mixtures():
    fspl = free_space_path_loss_db(3.5e9, 200.0)
    assert average_path_loss_db(3.5e9, 200.0, 1.0, ENV) == fspl + ENV.eta_los
    assert average_path_loss_db(3.5e9, 200.0, 0.0, ENV) == fspl + ENV.eta_nlos
    assert average_path_loss_db(3.5e9, 200.0, 0.5, ENV) == pytest.approx(fspl + 10.5, abs=1e-12)


def test_average_path_loss_is_affine_in_p_los():
    p1, p2 = 0.1, 0.9
    slope = (average_path_loss_db(2.8e9, 150.0, p2, ENV) - average_path_loss_db(2.8e9, 150.0, p1, ENV)) / (p2 - p1)
    assert slope == pytest.approx(ENV.eta_los - ENV.eta_nlos, abs=1e-9)


def test_average_path_loss_rejects_bad_probability():
    with pytest.raises(ParameterError):
        average_path_loss_db(2.8e9, 150.0, 1.2, ENV)


def test_path_loss_at_relay_overhead():
    uav = UavPlacement(altitude_m=120.0, ground_x_m=500.0, ground_y_m=500.0, coverage_radius_m=300.0)
    pl = path_loss_at_relay(uav, (500.0, 500.0), 2.8e9, ENV)
    assert pl == pytest.approx(free_space_path_loss_db(2.8e9, 120.0) + ENV.eta_los, abs=1e-9)
    assert path_loss_at_relay(uav, (500.0, 500.0), 5.8e9, ENV) > pl


def test_path_loss_at_relay_equals_manual_composition():
    uav = UavPlacement(altitude_m=80.0, ground_x_m=100.0, ground_y_m=200.0, coverage_radius_m=250.0)
    relay = (310.0, 260.0)
    r = math.hypot(relay[0] - 100.0, relay[1] - 200.0)
    d = uav_ground_distance(r, 80.0)
    manual = average_path_loss_db(3.5e9, d, p_los(r, 80.0, ENV), ENV)
    assert path_loss_at_relay(uav, relay, 3.5e9, ENV) == pytest.approx(manual, abs=1e-12)


def test_link_geometry_is_consistent():
    uav = UavPlacement(altitude_m=60.0, coverage_radius_m=100.0)
    geo = link_geometry(uav, 80.0, 0.0)
    assert geo.horizontal_range_m == 80.0
    assert geo.slant_distance_m == pytest.approx(100.0, rel=1e-12)
    assert 0.0 < geo.elevation_deg <= 90.0


@pytest.mark.parametrize("kwargs", [
    {"a": 0.0},
    {"b": -0.1},
    {"eta_los": 5.0, "eta_nlos": 1.0},
    {"eta_los": -1.0},
])
def test_environment_profile_invariants(kwargs):
    with pytest.raises(ParameterError):
        EnvironmentProfile(**kwargs)


def test_uav_placement_invariants():
    with pytest.raises(ParameterError):
        UavPlacement(altitude_m=0.0)
    with pytest.raises(ParameterError):
        UavPlacement(altitude_m=10.0, coverage_radius_m=0.0)
    assert UavPlacement(altitude_m=10.0).coverage_radius_m == DEFAULT_COVERAGE_RADIUS_M == 300.0


def test_presets_cover_the_eta_los_sweep():
    classes = ("suburban", "urban", "dense_urban", "highrise_urban")
    assert tuple(environment_preset(name).eta_los for name in classes) == ETA_LOS_SWEEP_DB
    assert environment_preset("default") == ENV
    assert set(classes) < set(ENVIRONMENT_PRESETS)


def test_unknown_preset_is_rejected():
    with pytest.raises(ParameterError, match="urban"):
        environment_preset("lunar")


def test_coverage_radius_hits_threshold():
    env = environment_preset("urban")
    radius = coverage_radius_for_max_path_loss(200.0, 110.0, 2.8e9, env)
    assert radius > 0.0
    assert path_loss_vs_range_db(radius, 200.0, 2.8e9, env) == pytest.approx(110.0, abs=1e-6)
    assert path_loss_vs_range_db(radius * 1.01, 200.0, 2.8e9, env) > 110.0


def test_coverage_radius_zero_when_nadir_exceeds_threshold():
    nadir = path_loss_vs_range_db(0.0, 500.0, 2.8e9, ENV)
    assert coverage_radius_for_max_path_loss(500.0, nadir - 1.0, 2.8e9, ENV) == 0.0


def test_optimal_altitude_beats_the_bounds():
    env = environment_preset("dense_urban")
    h, radius = optimal_altitude(110.0, 2.8e9, env, (20.0, 3000.0))
    assert 20.0 <= h <= 3000.0
    for edge in (20.0, 3000.0):
        assert radius >= coverage_radius_for_max_path_loss(edge, 110.0, 2.8e9, env) - 1e-6

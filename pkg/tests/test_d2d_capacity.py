import math
from dataclasses import replace

import pytest

from covsim.core.d2d_capacity import (
    CapacityParams,
    IntegrandVariant,
    capacity_integral,
    capacity_vs_hops,
    capacity_vs_relay_density,
    hop_distance,
    interference_constant,
    power_ratio_gamma,
    system_capacity,
    zeta_dr,
)
from covsim.core.errors import ParameterError, QuadratureError

EULER_GAMMA = 0.5772156649015329
ZETAS = [1e-3, 0.1, 1.0, 10.0, 1e3, 1e4]


def scaled_e1(x):
    """exp(x) * E1(x): power series up to 1, Lentz continued fraction above."""
    if x <= 1.0:
        total, term, k = 0.0, 1.0, 1
        while True:
            term *= -x / k
            contribution = term / k
            total += contribution
            if abs(contribution) < 1e-17 * abs(total) + 1e-300:
                break
            k += 1
        return math.exp(x) * (-EULER_GAMMA - math.log(x) - total)
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            break
    return h


def test_oracle_reference_points():
    # E1(1) = 0.219383934395520...
    assert scaled_e1(1.0) == pytest.approx(math.e * 0.21938393439552029, rel=1e-14)
    assert scaled_e1(1.0000001) == pytest.approx(scaled_e1(1.0), rel=1e-6)


@pytest.mark.parametrize("zeta", ZETAS)
def test_integral_matches_exponential_integral(zeta):
    value, err = capacity_integral(zeta)
    assert value == pytest.approx(scaled_e1(zeta), rel=1e-9)
    assert err <= 1e-10


@pytest.mark.parametrize("zeta", ZETAS)
def test_capacity_matches_oracle_with_default_prefactor(zeta):
    params = CapacityParams(n_hops=5, c_alpha=zeta / 100.0)
    result = system_capacity(params)
    assert result.zeta_dr == pytest.approx(zeta, rel=1e-12)
    prefactor = (params.lambda_d / 5) * (params.lambda_d + params.lambda_r)
    oracle = prefactor * scaled_e1(zeta)
    assert abs(result.capacity - oracle) / oracle <= 1e-9
    assert result.quadrature_abs_error <= 1e-10


def test_interference_constant_for_cubic_decay():
    expected = 4.0 * math.pi ** 2 / (3.0 * math.sqrt(3.0))
    assert interference_constant(3.0) == pytest.approx(expected, rel=1e-12)
    assert interference_constant(4.0) == pytest.approx(math.pi ** 2 / 2.0, rel=1e-12)


def test_default_params_resolve_c_alpha():
    assert CapacityParams().c_alpha is None
    assert CapacityParams().resolved_c_alpha == pytest.approx(interference_constant(3.0), rel=1e-12)
    assert CapacityParams(c_alpha=2.5).resolved_c_alpha == 2.5


def test_auto_c_alpha_follows_alpha_through_replace():
    params = replace(CapacityParams(n_hops=5), alpha=4.0)
    assert params.resolved_c_alpha == pytest.approx(interference_constant(4.0), rel=1e-12)
    result = system_capacity(params)
    assert result.zeta_dr == pytest.approx(interference_constant(4.0) * 10.0 ** 2, rel=1e-12)

    pinned = replace(CapacityParams(c_alpha=2.5), alpha=4.0)
    assert pinned.resolved_c_alpha == 2.5


def test_hop_distance():
    assert hop_distance(50.0, 10) == 5.0
    assert hop_distance(50.0, 1) == 50.0
    with pytest.raises(ParameterError):
        hop_distance(50.0, 0)


def test_power_ratio_gamma():
    assert power_ratio_gamma(1.0, 1.0, 3.0) == 1.0
    assert power_ratio_gamma(8.0, 1.0, 3.0) == pytest.approx(4.0, rel=1e-12)
    assert power_ratio_gamma(1.0, 8.0, 3.0) == pytest.approx(0.25, rel=1e-12)


def test_zeta_dr():
    assert zeta_dr(2.0, 5.0, 8.0, 3.0) == pytest.approx(200.0, rel=1e-12)
    with pytest.raises(ParameterError):
        zeta_dr(2.0, 0.0, 1.0, 3.0)


@pytest.mark.parametrize("kwargs", [
    {"lambda_d": 0.0},
    {"lambda_r": -0.1},
    {"n_hops": 0},
    {"alpha": 2.0},
    {"p_relay_w": 0.0},
    {"c_alpha": -1.0},
])
def test_invalid_params_rejected(kwargs):
    with pytest.raises(ParameterError):
        CapacityParams(**kwargs)


def test_relay_free_capacity_scales_with_square_of_density():
    base = CapacityParams(lambda_r=0.0, lambda_d=1e-3, n_hops=4)
    doubled = replace(base, lambda_d=2e-3)
    ratio = system_capacity(doubled).capacity / system_capacity(base).capacity
    assert ratio == pytest.approx(4.0, rel=1e-12)


def test_capacity_is_linear_in_density_sum():
    base = CapacityParams(lambda_r=0.1, n_hops=3)
    density = base.lambda_d + base.lambda_r
    tripled = replace(base, lambda_r=3.0 * density - base.lambda_d)
    ratio = system_capacity(tripled).capacity / system_capacity(base).capacity
    assert ratio == pytest.approx(3.0, rel=1e-12)


def test_more_relays_more_capacity():
    low = system_capacity(CapacityParams(lambda_r=0.1))
    high = system_capacity(CapacityParams(lambda_r=0.5))
    assert high.capacity > low.capacity > 0.0


def test_capacity_decreases_with_zeta():
    values = [system_capacity(CapacityParams(n_hops=10, v_d_threshold=v)).capacity
              for v in (0.01, 0.1, 1.0, 10.0)]
    assert all(later < earlier for earlier, later in zip(values, values[1:]))


def test_capacity_increases_with_hops_at_default_params():
    series = capacity_vs_hops(CapacityParams(), range(1, 11))
    assert [n for n, _ in series] == list(range(1, 11))
    values = [c for _, c in series]
    assert all(c >= 0.0 for c in values)
    assert all(later > earlier for earlier, later in zip(values, values[1:]))
    assert values[0] == system_capacity(CapacityParams(n_hops=1)).capacity


def test_capacity_vs_hops_sorts_input():
    series = capacity_vs_hops(CapacityParams(), [5, 2, 9])
    assert [n for n, _ in series] == [2, 5, 9]


def test_capacity_vs_hops_rejects_empty_and_zero():
    with pytest.raises(ParameterError):
        capacity_vs_hops(CapacityParams(), [])
    with pytest.raises(ParameterError):
        capacity_vs_hops(CapacityParams(), [0, 1])


def test_relay_density_sweep_threads_match_serial():
    grid = [0.1, 0.2, 0.3, 0.4, 0.5]
    serial = capacity_vs_relay_density(CapacityParams(), grid, range(1, 11))
    threaded = capacity_vs_relay_density(CapacityParams(), grid, range(1, 11), workers=3)
    assert serial == threaded
    for n_index in range(10):
        column = [series[n_index][1] for series in serial]
        assert all(later > earlier for earlier, later in zip(column, column[1:]))


def test_exponent_variant_moves_density_into_decay():
    params = CapacityParams(n_hops=10, c_alpha=0.01, variant=IntegrandVariant.EXPONENT)
    result = system_capacity(params)
    density = params.lambda_d + params.lambda_r
    expected = (params.lambda_d / 10) * scaled_e1(result.zeta_dr * density)
    assert result.capacity == pytest.approx(expected, rel=1e-9)
    assert result.capacity != system_capacity(replace(params, variant="prefactor")).capacity


def test_variant_accepts_plain_string():
    assert CapacityParams(variant="exponent").variant is IntegrandVariant.EXPONENT


@pytest.mark.parametrize("decay", [0.0, -1.0, math.inf, math.nan])
def test_integral_rejects_non_positive_decay(decay):
    with pytest.raises(ParameterError):
        capacity_integral(decay)


def test_unreachable_tolerance_is_a_numerical_error():
    with pytest.raises(QuadratureError) as info:
        capacity_integral(1.0, quad_tolerance=1e-300)
    assert info.value.tolerance == 1e-300

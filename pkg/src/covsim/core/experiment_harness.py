#!/usr/bin/env python3
"""
Experiment harness

Turns an ExperimentConfig into SweepTables:

    fig3      path loss vs UAV -> relay distance, one column per carrier
    fig4      path loss vs P_LoS, one column per eta_LoS
    fig5      Erlang-B loss probability vs channel count, one column per load
    fig6      D2D capacity vs hop count, one column per relay density
    altitude  coverage radius vs UAV altitude, one column per environment
    scenario  seeded PPP field -> coverage -> relays -> multi-hop reachability

Table bodies depend only on the config, so identical configs give identical
bytes. Provenance (version, seed, config echo) goes into '#' lines.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

from covsim import __version__
from covsim.core import atg_channel as atg
from covsim.core.d2d_capacity import IntegrandVariant, capacity_vs_relay_density, hop_distance
from covsim.core.disaster_scenario import (
    FIELD_COLUMNS,
    NodeField,
    ReachabilityReport,
    RelaySet,
    classify_coverage,
    generate_field,
    load_field_csv,
    reachability,
    select_relays,
)
from covsim.core.erlang_traffic import TrafficLoad, loss_probability
from covsim.core.errors import CovsimError, StageError
from covsim.core.experiment_config import ExperimentConfig, echo_lines
from covsim.utils.table_io import SweepTable

logger = logging.getLogger(__name__)

T = TypeVar("T")

ALTITUDE_ENVIRONMENTS = ("suburban", "urban", "dense_urban", "highrise_urban")

SCENARIO_NODE_COLUMNS = FIELD_COLUMNS + [
    "in_coverage", "relay", "pl_uav_db", "nearest_relay", "hop_count", "reachable",
]
SCENARIO_SUMMARY_COLUMNS = [
    "trial", "seed", "node_count", "in_coverage", "out_coverage", "relay_count", "reachable",
    "direct_coverage_ratio", "coverage_extension_ratio", "mean_relay_path_loss_db",
]


def _label(value: float) -> str:
    """Shortest round-trip text of a grid value, integral floats without the trailing .0"""
    text = repr(float(value))
    return text[:-2] if text.endswith(".0") else text


def _provenance(config: ExperimentConfig, extra: Sequence[str] = ()) -> List[str]:
    return [f"covsim {__version__}", f"experiment: {config.experiment}", f"seed: {config.seed}",
            *extra, *echo_lines(config)]


def _ordered_map(fn: Callable[..., T], items: Sequence, workers: int) -> List[T]:
    """map() that may use threads but always returns results in input order"""
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def fig3_path_loss(config: ExperimentConfig, distance_m: float, fc_ghz: float) -> float:
    """
    One fig3 cell. The x-axis is the slant distance; the horizontal range
    follows from the altitude and is clamped to 0 when distance < altitude.
    """
    env = config.environment_profile()
    h = config.altitude_m
    r = math.sqrt(max(distance_m * distance_m - h * h, 0.0))
    p = atg.p_los(r, h, env)
    return atg.average_path_loss_db(fc_ghz * 1e9, distance_m, p, env)


def run_fig3(config: ExperimentConfig) -> SweepTable:
    columns = ["distance_m"] + [f"pl_{_label(fc)}GHz_db" for fc in config.fig3_fc_grid_ghz]
    table = SweepTable(columns=columns, provenance=_provenance(config))
    for d in config.fig3_distance_grid_m:
        table.add_row([d] + [fig3_path_loss(config, d, fc) for fc in config.fig3_fc_grid_ghz])
    return table


def run_fig4(config: ExperimentConfig) -> SweepTable:
    base = config.environment_profile()
    profiles = [atg.EnvironmentProfile(base.a, base.b, eta, base.eta_nlos)
                for eta in config.fig4_eta_los_grid_db]
    columns = ["p_los"] + [f"pl_eta{_label(eta)}_db" for eta in config.fig4_eta_los_grid_db]
    table = SweepTable(columns=columns, provenance=_provenance(config))
    for p in config.fig4_p_los_grid:
        table.add_row([p] + [atg.average_path_loss_db(config.carrier_hz, config.fig4_distance_m, p, env)
                             for env in profiles])
    return table


def run_fig5(config: ExperimentConfig) -> SweepTable:
    loads = config.fig5_offered_grid_erlang
    columns = ["channels"] + [f"lp_A{_label(a)}" for a in loads]
    extra = []
    if config.fig5_include_accept:
        columns += [f"accept_A{_label(a)}" for a in loads]
        extra.append("accept_A* = 1 - lp_A*, the probability that a call is carried")
    table = SweepTable(columns=columns, provenance=_provenance(config, extra))
    for n in config.fig5_channel_grid:
        lp = [loss_probability(TrafficLoad(a, n)) for a in loads]
        row = [n] + lp
        if config.fig5_include_accept:
            row += [1.0 - b for b in lp]
        table.add_row(row)
    return table


def run_fig6(config: ExperimentConfig) -> SweepTable:
    grid = config.fig6_lambda_r_grid
    hops = config.fig6_hop_grid
    variants = [IntegrandVariant(config.integrand_variant)]
    columns = ["n_hops"] + [f"cap_lr{_label(lr)}" for lr in grid]
    if config.fig6_compare_variants:
        alternate = (IntegrandVariant.EXPONENT if variants[0] is IntegrandVariant.PREFACTOR
                     else IntegrandVariant.PREFACTOR)
        variants.append(alternate)
        columns += [f"capalt_lr{_label(lr)}" for lr in grid]

    series = []
    for variant in variants:
        params = config.capacity_params(grid[0], variant=variant)
        logger.info("🔄 Capacity sweep (%s integrand): %d densities x %d hop counts",
                    variant.value, len(grid), len(hops))
        series.extend(capacity_vs_relay_density(params, grid, hops, config.quad_tol, config.workers))

    extra = [f"integrand: {v.value}" for v in variants]
    table = SweepTable(columns=columns, provenance=_provenance(config, extra))
    for i, n in enumerate(sorted(hops)):
        table.add_row([n] + [col[i][1] for col in series])
    return table


def run_altitude(config: ExperimentConfig) -> SweepTable:
    """Coverage radius at max_path_loss_db for every altitude and environment class"""
    profiles = [atg.environment_preset(name) for name in ALTITUDE_ENVIRONMENTS]
    bounds = (config.altitude_grid_m[0], config.altitude_grid_m[-1])
    extra = []
    for name, env in zip(ALTITUDE_ENVIRONMENTS, profiles):
        h_opt, r_opt = atg.optimal_altitude(config.max_path_loss_db, config.carrier_hz, env, bounds)
        extra.append(f"optimal_altitude: {name} = {h_opt:.6g} m, radius {r_opt:.6g} m")

    columns = ["altitude_m"] + [f"rcov_{name}_m" for name in ALTITUDE_ENVIRONMENTS]
    table = SweepTable(columns=columns, provenance=_provenance(config, extra))
    for h in config.altitude_grid_m:
        table.add_row([h] + [atg.coverage_radius_for_max_path_loss(h, config.max_path_loss_db,
                                                                   config.carrier_hz, env)
                             for env in profiles])
    return table


@dataclass
class TrialResult:
    trial: int
    seed: int
    field: NodeField
    relays: RelaySet
    report: ReachabilityReport
    in_coverage: frozenset
    pl_uav_db: List[float]


@dataclass
class ScenarioOutcome:
    nodes: SweepTable
    summary: SweepTable
    report: ReachabilityReport
    trials: List[TrialResult]


def _stage(name: str, fn: Callable[..., T], *args, **kwargs) -> T:
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except CovsimError as exc:
        raise StageError(name, exc) from exc


def _scenario_trial(config: ExperimentConfig, trial: int, fixed_field: Optional[NodeField]) -> TrialResult:
    seed = config.seed + trial
    uav = _stage("classify_coverage", atg.UavPlacement, config.altitude_m, config.uav_x_m,
                 config.uav_y_m, config.coverage_radius_m)
    if fixed_field is not None:
        field = fixed_field
    else:
        field = _stage("generate_field", generate_field, config.lambda_d_per_m2, config.area_m, seed)
    partition = _stage("classify_coverage", classify_coverage, field, uav)
    relays = _stage("select_relays", select_relays, field, partition, uav, config.resolved_edge_band_m(),
                    (config.w_energy, config.w_quality), config.k_max)
    radius = config.r_d_m
    if config.hop_radius == "r_r":
        radius = _stage("reachability", hop_distance, config.r_d_m, config.n_max)
    report = _stage("reachability", reachability, field, partition, relays, radius, config.n_max)

    env = config.environment_profile()
    pl = [atg.path_loss_at_relay(uav, (n.x_m, n.y_m), config.carrier_hz, env) for n in field.nodes]
    logger.debug("🔄 trial %d: %d nodes, %d relays, extension %.3f", trial, len(field),
                 len(relays.relays), report.coverage_extension_ratio)
    return TrialResult(trial, seed, field, relays, report, partition.in_coverage, pl)


def _summary_row(result: TrialResult) -> list:
    relay_pl = [result.pl_uav_db[i] for i in result.relays.ids]
    mean_pl = sum(relay_pl) / len(relay_pl) if relay_pl else None
    n_in = len(result.in_coverage)
    return [result.trial, result.seed, len(result.field), n_in, len(result.field) - n_in,
            len(result.relays.relays), result.report.reachable_count,
            result.report.direct_coverage_ratio, result.report.coverage_extension_ratio, mean_pl]


def _node_table(config: ExperimentConfig, result: TrialResult) -> SweepTable:
    table = SweepTable(columns=list(SCENARIO_NODE_COLUMNS),
                       provenance=_provenance(config, [f"trial: {result.trial}", f"field_seed: {result.seed}"]))
    reach = result.report.by_id()
    relay_ids = set(result.relays.ids)
    for n in result.field.nodes:
        row = [n.id, n.x_m, n.y_m, n.residual_energy, n.link_quality,
               n.id in result.in_coverage, n.id in relay_ids, result.pl_uav_db[n.id]]
        r = reach.get(n.id)
        row += [r.nearest_relay, r.hop_count, r.reachable] if r is not None else [None, None, None]
        table.add_row(row)
    return table


def run_scenario(config: ExperimentConfig) -> ScenarioOutcome:
    fixed_field = None
    if config.field_csv:
        fixed_field = _stage("generate_field", load_field_csv, config.field_csv, config.area_m)

    logger.info("🔄 Scenario: %d trial(s) from seed %d", config.trials, config.seed)
    results = _ordered_map(lambda t: _scenario_trial(config, t, fixed_field), list(range(config.trials)),
                           config.workers)

    summary = SweepTable(columns=list(SCENARIO_SUMMARY_COLUMNS), provenance=_provenance(config))
    for result in results:
        summary.add_row(_summary_row(result))
    first = results[0]
    logger.info("✅ direct coverage %.3f, coverage extension %.3f (trial 0)",
                first.report.direct_coverage_ratio, first.report.coverage_extension_ratio)
    return ScenarioOutcome(nodes=_node_table(config, first), summary=summary, report=first.report,
                           trials=results)


SWEEPS: Dict[str, Callable[[ExperimentConfig], SweepTable]] = {
    "fig3": run_fig3,
    "fig4": run_fig4,
    "fig5": run_fig5,
    "fig6": run_fig6,
    "altitude": run_altitude,
}


def run_experiment(config: ExperimentConfig) -> List[Tuple[str, SweepTable]]:
    """Run the configured experiment; returns (output suffix, table) pairs, main table first."""
    logger.info("🔄 Running %s", config.experiment)
    if config.experiment == "scenario":
        outcome = run_scenario(config)
        return [("", outcome.nodes), (".summary", outcome.summary)]
    table = SWEEPS[config.experiment](config)
    logger.info("✅ %s: %d rows x %d columns", config.experiment, len(table.rows), len(table.columns))
    return [("", table)]

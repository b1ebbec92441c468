#!/usr/bin/env python3
"""
Disaster-area scenario generator

Seeded Monte-Carlo pipeline for one static UAV over a square disaster area:

    generate_field -> classify_coverage -> select_relays -> reachability

Ground devices follow a homogeneous Poisson point process. Devices inside the
served disc get coverage from the UAV directly, devices at the edge of the disc
are ranked as relays, and out-of-coverage devices are reached over multi-hop
D2D links whose hops are at most r_d_m long.

RNG streams: the seed feeds a numpy SeedSequence that is split into one child
per attribute class, in this fixed order

    0 node count, 1 positions, 2 residual energy, 3 link quality

New attribute classes are appended as further children so existing draws for
a seed never change.
"""

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from scipy.spatial.distance import cdist

from covsim.core.atg_channel import UavPlacement
from covsim.core.errors import ParameterError
from covsim.core.validation import (
    is_close_unit_sum,
    require_count,
    require_non_negative,
    require_positive,
)
from covsim.utils.table_io import SweepTable, read_csv

logger = logging.getLogger(__name__)

FIELD_COLUMNS = ["id", "x_m", "y_m", "energy", "quality"]

_STREAM_COUNT, _STREAM_POSITION, _STREAM_ENERGY, _STREAM_QUALITY = range(4)
_N_STREAMS = 4


@dataclass(frozen=True)
class Node:
    id: int
    x_m: float
    y_m: float
    residual_energy: float
    link_quality: float


@dataclass(frozen=True)
class NodeField:
    """One realization of ground user devices on [0, area_m]^2"""
    area_m: float
    nodes: Tuple[Node, ...]
    seed: Optional[int] = None
    intensity: Optional[float] = None

    def __len__(self) -> int:
        return len(self.nodes)

    def positions(self) -> np.ndarray:
        if not self.nodes:
            return np.empty((0, 2), dtype=float)
        return np.array([(n.x_m, n.y_m) for n in self.nodes], dtype=float)

    def node(self, node_id: int) -> Node:
        return self.nodes[node_id]


@dataclass(frozen=True)
class CoveragePartition:
    in_coverage: FrozenSet[int]
    out_coverage: FrozenSet[int]


@dataclass(frozen=True)
class RelaySet:
    """Selected relays as (node id, score), best first"""
    relays: Tuple[Tuple[int, float], ...]
    edge_band_m: float
    weights: Tuple[float, float]

    @property
    def ids(self) -> List[int]:
        return [node_id for node_id, _ in self.relays]


@dataclass(frozen=True)
class NodeReach:
    node_id: int
    nearest_relay: Optional[int]
    hop_count: Optional[int]
    reachable: bool


@dataclass(frozen=True)
class ReachabilityReport:
    per_node: Tuple[NodeReach, ...]
    coverage_extension_ratio: float
    direct_coverage_ratio: float

    @property
    def reachable_count(self) -> int:
        return sum(1 for r in self.per_node if r.reachable)

    def by_id(self) -> Dict[int, NodeReach]:
        return {r.node_id: r for r in self.per_node}


def field_from_nodes(nodes: Sequence[Node], area_m: float, seed: Optional[int] = None,
                     intensity: Optional[float] = None) -> NodeField:
    """Build a field from explicit nodes, checking ids and bounds."""
    require_positive("area_m", area_m)
    for expected, node in enumerate(nodes):
        if node.id != expected:
            raise ParameterError("nodes", f"ids must be dense from 0, found {node.id} at position {expected}")
        if not (0.0 <= node.x_m <= area_m and 0.0 <= node.y_m <= area_m):
            raise ParameterError("nodes", f"node {node.id} at ({node.x_m}, {node.y_m}) lies outside the area")
        if not (0.0 <= node.residual_energy <= 1.0 and 0.0 <= node.link_quality <= 1.0):
            raise ParameterError("nodes", f"node {node.id} energy/quality must lie in [0, 1]")
    return NodeField(area_m=area_m, nodes=tuple(nodes), seed=seed, intensity=intensity)


def generate_field(intensity: float, area_m: float, seed: int) -> NodeField:
    """Homogeneous PPP on the square: Poisson count, uniform positions and attributes"""
    require_positive("intensity", intensity)
    require_positive("area_m", area_m)
    require_count("seed", seed, minimum=0)

    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(_N_STREAMS)]
    count = int(streams[_STREAM_COUNT].poisson(intensity * area_m * area_m))
    xy = streams[_STREAM_POSITION].uniform(0.0, area_m, size=(count, 2))
    energy = streams[_STREAM_ENERGY].uniform(0.0, 1.0, size=count)
    quality = streams[_STREAM_QUALITY].uniform(0.0, 1.0, size=count)

    nodes = tuple(
        Node(i, float(xy[i, 0]), float(xy[i, 1]), float(energy[i]), float(quality[i]))
        for i in range(count)
    )
    logger.debug("📚 seed %d: %d nodes on a %g m square", seed, count, area_m)
    return NodeField(area_m=area_m, nodes=nodes, seed=seed, intensity=intensity)


def field_table(field: NodeField) -> SweepTable:
    table = SweepTable(columns=list(FIELD_COLUMNS))
    for n in field.nodes:
        table.add_row([n.id, n.x_m, n.y_m, n.residual_energy, n.link_quality])
    return table


def save_field_csv(field: NodeField, path: Union[str, Path]) -> None:
    field_table(field).write(path)


def load_field_csv(path: Union[str, Path], area_m: float) -> NodeField:
    """Read an `id,x_m,y_m,energy,quality` file; every read or parse failure is a ParameterError."""
    try:
        header, rows = read_csv(path)
    except (OSError, UnicodeDecodeError, csv.Error) as exc:
        raise ParameterError("field_csv", f"cannot read {path}: {exc}") from exc
    if header and header != FIELD_COLUMNS:
        raise ParameterError("field_csv", f"header must be {','.join(FIELD_COLUMNS)}, got {','.join(header)}")

    nodes = []
    for line, r in enumerate(rows, start=2):
        try:
            nodes.append(Node(int(r["id"]), float(r["x_m"]), float(r["y_m"]),
                              float(r["energy"]), float(r["quality"])))
        except (TypeError, ValueError) as exc:
            raise ParameterError("field_csv", f"{path} row {line}: {exc}") from exc
    logger.info("📚 Loaded %d nodes from %s", len(nodes), path)
    return field_from_nodes(nodes, area_m)


def _horizontal_ranges(field: NodeField, uav: UavPlacement) -> np.ndarray:
    xy = field.positions()
    return np.hypot(xy[:, 0] - uav.ground_x_m, xy[:, 1] - uav.ground_y_m)


def classify_coverage(field: NodeField, uav: UavPlacement) -> CoveragePartition:
    """Closed disc rule: distance == r_cov counts as covered."""
    ranges = _horizontal_ranges(field, uav)
    inside = ranges <= uav.coverage_radius_m
    in_ids = frozenset(int(i) for i in np.flatnonzero(inside))
    out_ids = frozenset(int(i) for i in np.flatnonzero(~inside))
    return CoveragePartition(in_coverage=in_ids, out_coverage=out_ids)


def select_relays(field: NodeField, partition: CoveragePartition, uav: UavPlacement, edge_band_m: float,
                  weights: Tuple[float, float] = (0.5, 0.5), k_max: int = 1) -> RelaySet:
    """
    Rank in-coverage nodes in the annulus [r_cov - edge_band_m, r_cov] by
    w_e*residual_energy + w_q*link_quality and keep the best k_max.
    Equal scores go to the lower node id.
    """
    if not 0.0 < edge_band_m < uav.coverage_radius_m:
        raise ParameterError("edge_band_m", f"must lie in (0, {uav.coverage_radius_m}), got {edge_band_m!r}")
    w_energy, w_quality = weights
    require_non_negative("weights", (w_energy, w_quality))
    if not is_close_unit_sum(w_energy, w_quality):
        raise ParameterError("weights", f"must sum to 1, got {weights!r}")
    require_count("k_max", k_max, minimum=1)

    ranges = _horizontal_ranges(field, uav)
    inner = uav.coverage_radius_m - edge_band_m
    candidates = []
    for node_id in sorted(partition.in_coverage):
        if inner <= ranges[node_id] <= uav.coverage_radius_m:
            n = field.nodes[node_id]
            score = w_energy * n.residual_energy + w_quality * n.link_quality
            candidates.append((node_id, score))

    candidates.sort(key=lambda c: (-c[1], c[0]))
    chosen = tuple(candidates[:k_max])
    logger.debug("%d edge candidates, %d relays kept", len(candidates), len(chosen))
    return RelaySet(relays=chosen, edge_band_m=edge_band_m, weights=(w_energy, w_quality))


def _d2d_graph(field: NodeField, out_ids: List[int], r_d_m: float) -> nx.Graph:
    """Disc graph over out-of-coverage nodes, edges where distance <= r_d_m."""
    graph = nx.Graph()
    graph.add_nodes_from(out_ids)
    if len(out_ids) > 1:
        xy = field.positions()[out_ids]
        dist = cdist(xy, xy)
        rows, cols = np.nonzero(np.triu(dist <= r_d_m, k=1))
        graph.add_edges_from((out_ids[i], out_ids[j]) for i, j in zip(rows, cols))
    return graph


def reachability(field: NodeField, partition: CoveragePartition, relays: RelaySet, r_d_m: float,
                 n_max: int) -> ReachabilityReport:
    """
    Minimum-hop reachability of out-of-coverage nodes from the relays.

    A path starts at a relay, continues only through out-of-coverage nodes,
    uses hops no longer than r_d_m and at most n_max hops. The nearest relay
    of a reachable node minimises (hops, euclidean distance, relay id); for an
    unreachable node it is the euclidean nearest relay.
    """
    require_positive("r_d_m", r_d_m)
    require_count("n_max", n_max, minimum=1)

    out_ids = sorted(partition.out_coverage)
    relay_ids = relays.ids
    xy = field.positions()
    graph = _d2d_graph(field, out_ids, r_d_m)

    best: Dict[int, Tuple[int, float, int]] = {}
    if relay_ids and out_ids:
        out_xy = xy[out_ids]
        for relay in relay_ids:
            rx, ry = xy[relay]
            # the relay joins the out-of-coverage graph through its own disc edges only
            g = graph.copy()
            g.add_node(relay)
            first = np.flatnonzero(np.hypot(out_xy[:, 0] - rx, out_xy[:, 1] - ry) <= r_d_m)
            g.add_edges_from((relay, out_ids[i]) for i in first if out_ids[i] != relay)
            hops = nx.single_source_shortest_path_length(g, relay, cutoff=n_max)
            for node_id, h in hops.items():
                if node_id == relay:
                    continue
                d = float(np.hypot(xy[node_id, 0] - rx, xy[node_id, 1] - ry))
                key = (h, d, relay)
                if node_id not in best or key < best[node_id]:
                    best[node_id] = key

    per_node = []
    for node_id in out_ids:
        if node_id in best:
            h, _, relay = best[node_id]
            per_node.append(NodeReach(node_id, relay, int(h), True))
        else:
            per_node.append(NodeReach(node_id, _euclidean_nearest(xy, node_id, relay_ids), None, False))

    reachable = sum(1 for r in per_node if r.reachable)
    extension = reachable / len(out_ids) if out_ids else 1.0
    # an empty field leaves nobody uncovered
    direct = len(partition.in_coverage) / len(field) if len(field) else 1.0
    return ReachabilityReport(tuple(per_node), extension, direct)


def _euclidean_nearest(xy: np.ndarray, node_id: int, relay_ids: List[int]) -> Optional[int]:
    if not relay_ids:
        return None
    d = np.hypot(xy[relay_ids, 0] - xy[node_id, 0], xy[relay_ids, 1] - xy[node_id, 1])
    order = sorted(range(len(relay_ids)), key=lambda i: (d[i], relay_ids[i]))
    return relay_ids[order[0]]

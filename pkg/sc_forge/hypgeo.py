"""Finite δ-hyperbolic graph laboratory.

Graphs are unit-edge and connected; all-pairs distances are held in a
numpy matrix. Cycles are 1-Lipschitz vertex sequences. The subsegment
finder follows the recursive argument for short subsegments of embedded
cycles and re-validates its answer before returning it.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Optional, Sequence

import networkx as nx
import numpy as np

from sc_forge.constants import THRESHOLD_SCAN_LIMIT
from sc_forge.errors import InputError, InternalInvariantError, PreconditionError
from sc_forge.exact import log2_upper
from sc_forge.functions import FunctionSpec
from sc_forge.pieces import FAIL, PASS

logger = logging.getLogger(__name__)

EQ5_WINDOW_SLACK = 64


def _sorted_nodes(graph: nx.Graph) -> list[Hashable]:
    try:
        return sorted(graph.nodes())
    except TypeError:
        return sorted(graph.nodes(), key=str)


class MetricGraph:
    """Connected unit-edge graph with vertices relabeled 0..n-1 in sorted label order"""

    def __init__(self, graph: nx.Graph):
        if graph.number_of_nodes() == 0:
            raise InputError("graph has no vertices")
        if not nx.is_connected(graph):
            raise InputError("graph is not connected")
        self.labels: list[Hashable] = _sorted_nodes(graph)
        self.index = {label: i for i, label in enumerate(self.labels)}
        self.graph: nx.Graph = nx.relabel_nodes(graph, self.index)
        n = len(self.labels)
        self.dist = np.zeros((n, n), dtype=np.int64)
        for source, lengths in nx.all_pairs_shortest_path_length(self.graph):
            for target, d in lengths.items():
                self.dist[source, target] = d
        self.neighbors: list[list[int]] = [sorted(self.graph.neighbors(v)) for v in range(n)]

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[Hashable, Hashable]]) -> "MetricGraph":
        graph = nx.Graph()
        graph.add_edges_from(edges)
        graph.remove_edges_from(nx.selfloop_edges(graph))
        return cls(graph)

    def __len__(self) -> int:
        return len(self.labels)

    def d(self, u: int, v: int) -> int:
        return int(self.dist[u, v])

    def vertex(self, label: Hashable) -> int:
        if label not in self.index:
            raise InputError(f"vertex {label!r} is not in the graph")
        return self.index[label]

    def geodesic(self, u: int, v: int) -> list[int]:
        """Shortest path from u to v, stepping to the least neighbour at each vertex"""
        path = [u]
        while path[-1] != v:
            here = path[-1]
            target = self.dist[here, v] - 1
            path.append(next(w for w in self.neighbors[here] if self.dist[w, v] == target))
        return path

    @property
    def is_tree(self) -> bool:
        return nx.is_tree(self.graph)


@dataclass(frozen=True)
class EmbeddedCycle:
    vertices: tuple[int, ...]

    def __post_init__(self):
        if not self.vertices:
            raise InputError("cycle has no vertices")

    @classmethod
    def from_labels(cls, labels: Sequence[Hashable], graph: MetricGraph) -> "EmbeddedCycle":
        cycle = cls(tuple(graph.vertex(label) for label in labels))
        cycle.check(graph)
        return cycle

    def __len__(self) -> int:
        return len(self.vertices)

    def at(self, position: int) -> int:
        return self.vertices[position % len(self.vertices)]

    def arc(self, start: int, length: int) -> list[int]:
        return [self.at(start + j) for j in range(length + 1)]

    def check(self, graph: MetricGraph) -> None:
        n = len(self.vertices)
        for j in range(n):
            if graph.d(self.vertices[j], self.vertices[(j + 1) % n]) > 1:
                raise InputError(f"cycle is not 1-Lipschitz between positions {j} and {(j + 1) % n}")


@dataclass(frozen=True)
class SubsegmentWitness:
    start: int
    end: int
    length: int
    endpoint_distance: int
    valid: bool


# --- δ ---------------------------------------------------------------------


def compute_delta(graph: MetricGraph) -> Fraction:
    """Four-point hyperbolicity constant: half the largest gap between the two largest pair sums"""
    if graph.is_tree:
        return Fraction(0)
    D = graph.dist
    n = len(graph)
    first, second = np.triu_indices(n, k=1)
    order = np.argsort(-D[first, second], kind="stable")
    xs, ys = first[order], second[order]
    best = 0
    for i in range(1, len(xs)):
        x, y = xs[i], ys[i]
        if 2 * D[x, y] <= best:
            break
        zs, ws = xs[:i], ys[:i]
        sums = np.stack([
            D[x, y] + D[zs, ws],
            D[x, zs] + D[y, ws],
            D[x, ws] + D[y, zs],
        ])
        sums.sort(axis=0)
        gap = int((sums[2] - sums[1]).max())
        best = max(best, gap)
    return Fraction(best, 2)


def four_point_delta_oracle(graph: MetricGraph) -> Fraction:
    D = graph.dist
    best = 0
    for x, y, z, w in itertools.combinations(range(len(graph)), 4):
        sums = sorted((D[x, y] + D[z, w], D[x, z] + D[y, w], D[x, w] + D[y, z]))
        best = max(best, int(sums[2] - sums[1]))
    return Fraction(best, 2)


# --- logarithmic neighbourhoods --------------------------------------------


def _f(n: Fraction, delta: Fraction) -> Fraction:
    if delta == 0:
        return Fraction(1)
    return delta * log2_upper(n) + 1


def neighborhood_bounds(n: int | Fraction, delta: Fraction) -> tuple[Fraction, Fraction]:
    """(f(n), f'(n)) with f(n) = δ·log₂(n) + 1 and f'(n) = f(n + f(n)) + f(n), log₂ rounded up"""
    n, delta = Fraction(n), Fraction(delta)
    if n < 1:
        raise InputError("n must be at least 1")
    if delta < 0:
        raise InputError("δ must be nonnegative")
    f = _f(n, delta)
    return f, _f(n + f, delta) + f


def eq5_holds(n: int, delta: Fraction, g: FunctionSpec) -> bool:
    """g(n) ≥ 12 f(n) + 3δ + f'(n) + 3"""
    f, f_prime = neighborhood_bounds(n, delta)
    return g.value(n) >= 12 * f + 3 * delta + f_prime + 3


def required_cycle_length(delta: Fraction, U: int, g: FunctionSpec) -> int:
    """max(least N ≥ 2 with the g-bound holding on [N, 2N + 64], 32U)"""
    if U < 1:
        raise InputError("U must be at least 1")
    candidate, n = 2, 2
    while n <= 2 * candidate + EQ5_WINDOW_SLACK:
        if n > THRESHOLD_SCAN_LIMIT:
            raise InputError(f"g = {g.describe()} does not dominate the neighbourhood bounds below {THRESHOLD_SCAN_LIMIT}")
        if not eq5_holds(n, delta, g):
            candidate = n + 1
        n += 1
    return max(candidate, 32 * U)


def check_lipschitz_neighborhood(graph: MetricGraph, path: Sequence[int], D: Fraction) -> tuple[str, int]:
    """PASS iff the chosen geodesic between the path's endpoints stays within D of the path"""
    if not path:
        raise InputError("path has no vertices")
    for a, b in zip(path, path[1:]):
        if graph.d(a, b) > 1:
            raise InputError("path is not 1-Lipschitz")
    geodesic = graph.geodesic(path[0], path[-1])
    worst = int(graph.dist[np.ix_(geodesic, list(path))].min(axis=1).max())
    return (PASS if worst <= D else FAIL), worst


# --- excursions --------------------------------------------------------------


@dataclass(frozen=True)
class Excursion:
    """Offsets of the two boundary points; the points strictly between lie outside the ball"""

    start: int
    end: int

    @property
    def length(self) -> int:
        return self.end - self.start

    def contains(self, offset: int) -> bool:
        return self.start < offset < self.end


def _excursions(distances: np.ndarray, radius: Fraction) -> list[Excursion]:
    inside = np.flatnonzero(distances <= math.floor(radius))
    gaps = np.flatnonzero(np.diff(inside) >= 2)
    return [Excursion(int(inside[j]), int(inside[j + 1])) for j in gaps]


def find_excursions(cycle: EmbeddedCycle, start: int, length: int, z: int, D: Fraction, graph: MetricGraph) -> list[Excursion]:
    """Maximal runs of the arc outside B_D(z) bounded on both sides by arc points inside it"""
    if not 0 <= length <= len(cycle):
        raise InputError("arc length outside [0, |C|]")
    arc = cycle.arc(start, length)
    return _excursions(graph.dist[z, arc], D)


# --- short subsegments -----------------------------------------------------------


def validate_witness(
    cycle: EmbeddedCycle, graph: MetricGraph, U: int, L: int, g: FunctionSpec, start: int, length: int
) -> SubsegmentWitness:
    n = len(cycle)
    distance = graph.d(cycle.at(start), cycle.at(start + length))
    valid = length * L >= n and length * U <= n and distance <= g.value(n)
    return SubsegmentWitness(start % n, (start + length) % n, length, distance, valid)


def exhaustive_subsegment_oracle(
    cycle: EmbeddedCycle, graph: MetricGraph, U: int, L: int, g: FunctionSpec
) -> Optional[SubsegmentWitness]:
    """First (shortest, then leftmost) subsegment with |C|/L ≤ length ≤ |C|/U and close endpoints"""
    n = len(cycle)
    limit = g.value(n)
    if limit < 0:
        return None
    vertices = np.array(cycle.vertices)
    starts = np.arange(n)
    for length in range(-(-n // L), n // U + 1):
        ends = vertices[(starts + length) % n]
        hits = np.flatnonzero(graph.dist[vertices, ends] <= math.floor(limit))
        if len(hits):
            return validate_witness(cycle, graph, U, L, g, int(hits[0]), length)
    return None


@dataclass
class _Arm:
    """Cycle positions from x_i to y along γ (unreduced, so differences are lengths)"""

    positions: list[int]
    vertices: list[int]
    geodesic: list[int]

    def offset_before_end(self, steps: int) -> Optional[int]:
        index = len(self.positions) - 1 - steps
        return index if index >= 0 else None


class _Finder:
    def __init__(self, cycle: EmbeddedCycle, graph: MetricGraph, U: int, g: FunctionSpec, delta: Fraction):
        self.cycle, self.graph, self.U, self.g, self.delta = cycle, graph, U, g, delta
        self.n = len(cycle)
        self.L = 32 * U
        self.M1, self.M2 = 4 * U, 16 * U
        self.D, self.D_prime = neighborhood_bounds(self.n, delta)
        self.g_value = g.value(self.n)
        self.step = -(-self.n // self.M2)

    def witness(self, start: int, length: int) -> SubsegmentWitness:
        return validate_witness(self.cycle, self.graph, self.U, self.L, self.g, start, length)

    def arm(self, positions: list[int]) -> _Arm:
        vertices = [self.cycle.at(p) for p in positions]
        return _Arm(positions, vertices, self.graph.geodesic(vertices[0], vertices[-1]))

    def long_excursion(self, arm: _Arm) -> Optional[tuple[int, int]]:
        block = self.graph.dist[np.ix_(arm.geodesic, arm.vertices)]
        for row in block:
            for excursion in _excursions(row, self.D):
                if excursion.length * self.M1 >= self.n:
                    a, b = arm.positions[excursion.start], arm.positions[excursion.end]
                    return min(a, b), abs(a - b)
        return None

    def anchor(self, arm: _Arm) -> tuple[int, int]:
        """(index of a_i' on the arm, vertex u_i on the arm's geodesic)"""
        index = arm.offset_before_end(self.step)
        if index is None:
            return 0, arm.vertices[0]
        a = arm.vertices[index]
        to_geodesic = self.graph.dist[a, arm.geodesic]
        closest = arm.geodesic[int(np.argmin(to_geodesic))]
        if to_geodesic.min() <= self.D:
            return index, closest
        for z in arm.geodesic:
            for excursion in _excursions(self.graph.dist[z, arm.vertices], self.D):
                if excursion.contains(index):
                    return excursion.start, z
        logger.debug("a_i lies on no excursion; using the closest geodesic point")
        return index, closest

    def close_up(self, fixed: _Arm, fixed_index: int, u_fixed: int, other: _Arm, other_index: int) -> SubsegmentWitness:
        """λ' from the fixed arm's anchor to the first point of the other arm near u' ∈ [x_other, y]"""
        graph = self.graph
        y = fixed.vertices[-1]
        t = max(0, math.floor(graph.d(y, u_fixed) - 2 * self.D - self.delta))
        t = min(t, len(other.geodesic) - 1)
        u_prime = other.geodesic[len(other.geodesic) - 1 - t]
        tail = other.vertices[other_index:]
        near = graph.dist[u_prime, tail]
        hits = np.flatnonzero(near <= math.floor(self.D_prime))
        chosen = other_index + int(hits[0] if len(hits) else np.argmin(near))
        a, b = fixed.positions[fixed_index], other.positions[chosen]
        return self.witness(min(a, b), abs(a - b))

    def run(self) -> SubsegmentWitness:
        start, length = 0, self.n
        for iteration in range(self.n):
            arc = self.cycle.arc(start, length)
            diameter = int(self.graph.dist[np.ix_(arc, arc)].max())
            logger.debug("iteration %d: γ = (%d, %d), diam %d", iteration, start, length, diameter)
            if diameter <= self.g_value:
                return self.witness(start, self.step)
            x2 = arc[-1]
            k = int(np.argmax(self.graph.dist[x2, arc]))
            arm1 = self.arm([start + j for j in range(k + 1)])
            arm2 = self.arm([start + length - j for j in range(length - k + 1)])

            found = self.long_excursion(arm1) or self.long_excursion(arm2)
            if found is not None:
                start, length = found
                continue

            if len(arm2.positions) > len(arm1.positions):
                arm1, arm2 = arm2, arm1
            index1, u1 = self.anchor(arm1)
            index2, u2 = self.anchor(arm2)
            y = arm1.vertices[-1]
            first = (arm1, index1, u1, arm2, index2)
            second = (arm2, index2, u2, arm1, index1)
            if self.graph.d(y, u1) > self.graph.d(y, u2) + 2 * self.D:
                first, second = second, first
            witness = self.close_up(*first)
            if not witness.valid:
                logger.debug("primary closing step failed; trying the symmetric one")
                witness = self.close_up(*second)
            if not witness.valid:
                raise InternalInvariantError(
                    f"subsegment ({witness.start}, {witness.length}) fails the length or distance bound"
                )
            return witness
        raise InternalInvariantError("subsegment recursion did not terminate within |C| steps")


def find_short_subsegment(
    cycle: EmbeddedCycle, graph: MetricGraph, U: int, g: FunctionSpec, delta: Optional[Fraction] = None
) -> SubsegmentWitness:
    """A subsegment λ with |C|/32U ≤ |λ| ≤ |C|/U and d(λ⁻, λ⁺) ≤ g(|C|)"""
    if U < 1:
        raise InputError("U must be at least 1")
    delta = compute_delta(graph) if delta is None else Fraction(delta)
    required = required_cycle_length(delta, U, g)
    n = len(cycle)
    if n < required:
        raise PreconditionError(f"cycle length {n} is below N(δ={delta}, U={U}, L={32 * U}) = {required}")
    if not eq5_holds(n, delta, g):
        raise PreconditionError(f"g-bound fails at |C| = {n}")
    witness = _Finder(cycle, graph, U, g, delta).run()
    logger.info("short subsegment at %d of length %d (distance %d)", witness.start, witness.length, witness.endpoint_distance)
    return witness


# --- subdivision -------------------------------------------------------------


def subdivide(graph: MetricGraph, k: int, cycle: Optional[EmbeddedCycle] = None) -> tuple[MetricGraph, Optional[EmbeddedCycle]]:
    """Replace every edge by a path of k edges; a cycle is re-sampled through the new vertices"""
    if k < 1:
        raise InputError("subdivision level must be at least 1")
    if k == 1:
        return graph, cycle

    def label(u: int, v: int, j: int) -> str:
        if u > v:
            u, v, j = v, u, k - j
        return f"{graph.labels[u]}~{graph.labels[v]}~{j}"

    finer = nx.Graph()
    for u, v in graph.graph.edges():
        chain = [str(graph.labels[u])] + [label(u, v, j) for j in range(1, k)] + [str(graph.labels[v])]
        nx.add_path(finer, chain)
    new_graph = MetricGraph(finer)
    if cycle is None:
        return new_graph, None
    labels: list[str] = []
    n = len(cycle)
    for j in range(n):
        u, v = cycle.vertices[j], cycle.vertices[(j + 1) % n]
        labels.append(str(graph.labels[u]))
        if u == v:
            labels.extend([str(graph.labels[u])] * (k - 1))
        else:
            labels.extend(label(u, v, i) for i in range(1, k))
    return new_graph, EmbeddedCycle.from_labels(labels, new_graph)

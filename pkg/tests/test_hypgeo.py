import random
from fractions import Fraction

import networkx as nx
import pytest

from sc_forge.errors import InputError, PreconditionError
from sc_forge.functions import FunctionSpec
from sc_forge.hypgeo import (
    EmbeddedCycle,
    MetricGraph,
    check_lipschitz_neighborhood,
    compute_delta,
    eq5_holds,
    exhaustive_subsegment_oracle,
    find_excursions,
    find_short_subsegment,
    four_point_delta_oracle,
    neighborhood_bounds,
    required_cycle_length,
    subdivide,
    validate_witness,
)
from sc_forge.pieces import FAIL, PASS
from sc_forge.textformat import parse_cycle, parse_edges

from tests.generators import euler_tour, ladder_cycle, out_and_back, random_tree

SQRT = FunctionSpec.parse("sqrt")


def assert_valid(witness, cycle, graph, U, g):
    n = len(cycle)
    assert witness.valid
    assert witness.length * 32 * U >= n
    assert witness.length * U <= n
    assert graph.d(cycle.at(witness.start), cycle.at(witness.start + witness.length)) == witness.endpoint_distance
    assert witness.endpoint_distance <= g.value(n)
    assert validate_witness(cycle, graph, U, 32 * U, g, witness.start, witness.length).valid


def test_metric_graph_basics():
    graph = MetricGraph(nx.cycle_graph(6))
    assert len(graph) == 6
    assert graph.d(0, 3) == 3
    assert graph.geodesic(0, 3) == [0, 1, 2, 3]
    assert graph.geodesic(3, 0) == [3, 2, 1, 0]
    assert not graph.is_tree
    with pytest.raises(InputError):
        graph.vertex(17)


def test_metric_graph_rejects_bad_graphs():
    disconnected = nx.Graph([(0, 1), (2, 3)])
    with pytest.raises(InputError):
        MetricGraph(disconnected)
    with pytest.raises(InputError):
        MetricGraph(nx.Graph())
    looped = MetricGraph.from_edges([("a", "a"), ("a", "b")])
    assert looped.graph.number_of_edges() == 1


def test_delta_of_trees_is_zero():
    rng = random.Random(3)
    for _ in range(100):
        assert compute_delta(MetricGraph(random_tree(rng, rng.randint(2, 60)))) == 0


@pytest.mark.parametrize("n, expected", [(4, 1), (5, Fraction(1, 2)), (6, 1), (8, 2), (10, 2)])
def test_delta_of_cycles(n, expected):
    graph = MetricGraph(nx.cycle_graph(n))
    assert compute_delta(graph) == expected
    assert four_point_delta_oracle(graph) == expected


def test_delta_of_ladders():
    assert compute_delta(MetricGraph(nx.ladder_graph(3))) == 1
    assert compute_delta(MetricGraph(nx.ladder_graph(6))) == 1
    assert compute_delta(MetricGraph(nx.complete_graph(5))) == 0


def test_delta_matches_four_point_oracle():
    rng = random.Random(11)
    checked = 0
    while checked < 30:
        graph = nx.gnp_random_graph(rng.randint(5, 10), 0.4, seed=rng.randint(0, 10 ** 6))
        if graph.number_of_nodes() == 0 or not nx.is_connected(graph):
            continue
        metric = MetricGraph(graph)
        assert compute_delta(metric) == four_point_delta_oracle(metric)
        checked += 1


def test_shipped_c8_graph(data_dir):
    graph = MetricGraph.from_edges(parse_edges((data_dir / "c8.graph").read_text()))
    assert compute_delta(graph) == 2


def test_neighborhood_bounds():
    assert neighborhood_bounds(100, Fraction(0)) == (1, 2)
    assert neighborhood_bounds(1, Fraction(3)) == (1, 5)
    f, f_prime = neighborhood_bounds(16, Fraction(1))
    assert f == 5
    assert f_prime > 2 * f
    with pytest.raises(InputError):
        neighborhood_bounds(0, Fraction(1))
    with pytest.raises(InputError):
        neighborhood_bounds(4, Fraction(-1))


def test_f_prime_grows_like_two_delta_log():
    delta = Fraction(1)
    for n in (16, 64, 256, 1024):
        assert neighborhood_bounds(2 * n, delta)[1] - neighborhood_bounds(n, delta)[1] <= 2 * delta + Fraction(1, 10)


def test_required_cycle_length():
    assert required_cycle_length(Fraction(0), 1, SQRT) == 257
    assert required_cycle_length(Fraction(0), 9, SQRT) == 288
    assert eq5_holds(257, Fraction(0), SQRT)
    assert not eq5_holds(256, Fraction(0), SQRT)
    with pytest.raises(InputError):
        required_cycle_length(Fraction(0), 0, SQRT)


def test_embedded_cycles():
    graph = MetricGraph(nx.path_graph(4))
    cycle = EmbeddedCycle.from_labels([0, 1, 2, 2, 3, 2, 1], graph)
    assert len(cycle) == 7
    assert cycle.at(9) == 2
    assert cycle.arc(5, 3) == [2, 1, 0, 1]
    with pytest.raises(InputError):
        EmbeddedCycle.from_labels([0, 2, 1], graph)
    with pytest.raises(InputError):
        EmbeddedCycle.from_labels([0, 1, 9], graph)


def test_lipschitz_neighborhood():
    path_graph = MetricGraph(nx.path_graph(6))
    assert check_lipschitz_neighborhood(path_graph, [0, 1, 2, 3, 2, 1], Fraction(0)) == (PASS, 0)
    cycle_graph = MetricGraph(nx.cycle_graph(8))
    long_way = [0, 1, 2, 3, 4, 5, 6]
    assert check_lipschitz_neighborhood(cycle_graph, long_way, Fraction(0)) == (FAIL, 1)
    assert check_lipschitz_neighborhood(cycle_graph, long_way, Fraction(1)) == (PASS, 1)
    with pytest.raises(InputError):
        check_lipschitz_neighborhood(cycle_graph, [0, 2], Fraction(1))
    with pytest.raises(InputError):
        check_lipschitz_neighborhood(cycle_graph, [], Fraction(1))


def test_random_walks_in_trees_cover_their_geodesics():
    rng = random.Random(21)
    for _ in range(30):
        tree = random_tree(rng, rng.randint(5, 40))
        graph = MetricGraph(tree)
        walk = [rng.randrange(len(graph))]
        for _ in range(rng.randint(1, 60)):
            walk.append(rng.choice(graph.neighbors[walk[-1]] + [walk[-1]]))
        D, _ = neighborhood_bounds(len(walk), Fraction(0))
        assert check_lipschitz_neighborhood(graph, walk, D) == (PASS, 0)


def test_find_excursions_on_an_out_and_back_tour():
    graph = MetricGraph(nx.path_graph(11))
    cycle = EmbeddedCycle(tuple(out_and_back(10)))
    (excursion,) = find_excursions(cycle, 0, 20, 0, Fraction(2), graph)
    assert (excursion.start, excursion.end, excursion.length) == (2, 18, 16)
    assert excursion.contains(10) and not excursion.contains(2)
    assert find_excursions(cycle, 0, 4, 0, Fraction(10), graph) == []
    with pytest.raises(InputError):
        find_excursions(cycle, 0, 21, 0, Fraction(2), graph)


def test_find_excursions_matches_direct_scan():
    rng = random.Random(8)
    for _ in range(40):
        tree = random_tree(rng, rng.randint(5, 40))
        graph = MetricGraph(tree)
        cycle = EmbeddedCycle(tuple(graph.index[v] for v in euler_tour(tree)))
        start, length = rng.randrange(len(cycle)), rng.randint(0, len(cycle))
        z, D = rng.randrange(len(graph)), Fraction(rng.randint(0, 3))
        expected, last_inside = [], None
        for offset, vertex in enumerate(cycle.arc(start, length)):
            if graph.d(z, vertex) <= D:
                if last_inside is not None and offset - last_inside >= 2:
                    expected.append((last_inside, offset))
                last_inside = offset
        found = find_excursions(cycle, start, length, z, D, graph)
        assert [(e.start, e.end) for e in found] == expected


def test_subsegment_on_shipped_out_and_back_tour(data_dir):
    graph = MetricGraph.from_edges(parse_edges((data_dir / "path200.graph").read_text()))
    cycle = EmbeddedCycle.from_labels(parse_cycle((data_dir / "path200.cycle").read_text()), graph)
    assert len(cycle) == 400
    witness = find_short_subsegment(cycle, graph, 1, SQRT)
    assert (witness.start, witness.length, witness.endpoint_distance) == (175, 50, 0)
    assert_valid(witness, cycle, graph, 1, SQRT)
    assert exhaustive_subsegment_oracle(cycle, graph, 1, 32, SQRT) is not None


@pytest.mark.slow
def test_subsegment_on_random_tree_tours():
    rng = random.Random(2024)
    for trial in range(12):
        tree = random_tree(rng, rng.randint(130, 300))
        graph = MetricGraph(tree)
        cycle = EmbeddedCycle(tuple(graph.index[v] for v in euler_tour(tree)))
        U = 1 + trial % 3
        if len(cycle) < required_cycle_length(Fraction(0), U, SQRT):
            continue
        witness = find_short_subsegment(cycle, graph, U, SQRT, delta=Fraction(0))
        assert_valid(witness, cycle, graph, U, SQRT)
        oracle = exhaustive_subsegment_oracle(cycle, graph, U, 32 * U, SQRT)
        assert oracle is not None and oracle.length <= witness.length


@pytest.mark.slow
def test_subsegment_on_ladder_boundary():
    g = FunctionSpec.parse("sqrt:c=6")
    graph = MetricGraph(nx.ladder_graph(400))
    cycle = EmbeddedCycle.from_labels(ladder_cycle(400), graph)
    assert len(cycle) >= required_cycle_length(Fraction(1), 1, g)
    witness = find_short_subsegment(cycle, graph, 1, g, delta=Fraction(1))
    assert_valid(witness, cycle, graph, 1, g)
    assert exhaustive_subsegment_oracle(cycle, graph, 1, 32, g) is not None



def closed_tree_walk(rng: random.Random, tree: nx.Graph, steps: int) -> list:
    walk = [0]
    for _ in range(steps):
        walk.append(rng.choice(list(tree.neighbors(walk[-1])) + [walk[-1]]))
    return walk + nx.shortest_path(tree, walk[-1], 0)[1:-1]


@pytest.mark.slow
def test_subsegment_agrees_with_oracle_on_random_cycles():
    rng = random.Random(77)
    ladder_g = FunctionSpec.parse("sqrt:c=6")
    cases = []
    for _ in range(80):
        tree = random_tree(rng, rng.randint(130, 290))
        cases.append((tree, euler_tour(tree), SQRT, Fraction(0)))
    for _ in range(60):
        tree = random_tree(rng, rng.randint(40, 150))
        cases.append((tree, closed_tree_walk(rng, tree, rng.randint(260, 420)), SQRT, Fraction(0)))
    for _ in range(60):
        k = rng.randint(330, 500)
        labels = ladder_cycle(k)
        shift = rng.randrange(len(labels))
        cases.append((nx.ladder_graph(k), labels[shift:] + labels[:shift], ladder_g, Fraction(1)))
    for trial, (network, labels, g, delta) in enumerate(cases):
        graph = MetricGraph(network)
        cycle = EmbeddedCycle.from_labels(labels, graph)
        U = 1 + trial % 3
        assert len(cycle) >= required_cycle_length(delta, U, g)
        witness = find_short_subsegment(cycle, graph, U, g, delta=delta)
        assert_valid(witness, cycle, graph, U, g)
        oracle = exhaustive_subsegment_oracle(cycle, graph, U, 32 * U, g)
        assert oracle is not None and oracle.length <= witness.length


def test_subsegment_preconditions():
    graph = MetricGraph(nx.path_graph(11))
    cycle = EmbeddedCycle(tuple(out_and_back(10)))
    with pytest.raises(PreconditionError, match="257"):
        find_short_subsegment(cycle, graph, 1, SQRT)
    with pytest.raises(InputError):
        find_short_subsegment(cycle, graph, 0, SQRT)


def test_oracle_with_negative_bound_finds_nothing():
    graph = MetricGraph(nx.path_graph(11))
    cycle = EmbeddedCycle(tuple(out_and_back(10)))
    assert exhaustive_subsegment_oracle(cycle, graph, 1, 32, FunctionSpec.parse("const:-1")) is None
    found = exhaustive_subsegment_oracle(cycle, graph, 1, 32, FunctionSpec.parse("const:0"))
    assert (found.start, found.length, found.endpoint_distance) == (9, 2, 0)


def test_subdivide():
    graph = MetricGraph(nx.cycle_graph(4))
    cycle = EmbeddedCycle.from_labels([0, 1, 2, 3], graph)
    finer, finer_cycle = subdivide(graph, 2, cycle)
    assert len(finer) == 8
    assert len(finer_cycle) == 8
    assert compute_delta(finer) == 2 * compute_delta(graph)
    assert subdivide(graph, 1, cycle) == (graph, cycle)
    with pytest.raises(InputError):
        subdivide(graph, 0)


def test_subdivide_repeats_stays():
    graph = MetricGraph(nx.path_graph(3))
    cycle = EmbeddedCycle.from_labels([0, 0, 1, 2, 1], graph)
    finer, finer_cycle = subdivide(graph, 3, cycle)
    assert len(finer) == 7
    assert len(finer_cycle) == 15
    assert finer_cycle.vertices[:3] == (finer.vertex("0"),) * 3

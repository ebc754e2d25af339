import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twcount.formula import Assignment, reduce
from twcount.generators import DetRng, gen_grid_formula, gen_grid_formula_x
from twcount.graphs import Graph, build_incidence, make_wall
from twcount.treewidth import (
    AT_MOST,
    EXCEEDS,
    UNKNOWN,
    TreeDecomposition,
    VertexCapExceeded,
    decomposition_from_order,
    degeneracy,
    exact_treewidth,
    lower_bound,
    minor_min_width,
    read_td,
    treewidth_at_most,
    upper_bound_heuristic,
    validate_decomposition,
    write_td,
)


def complete_graph(n):
    g = Graph()
    for v in range(1, n + 1):
        g.add_vertex(v)
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            g.add_edge(a, b)
    return g


def complete_bipartite(a, b):
    g = Graph()
    for v in range(1, a + b + 1):
        g.add_vertex(v)
    for u in range(1, a + 1):
        for v in range(a + 1, a + b + 1):
            g.add_edge(u, v)
    return g


def cycle_graph(n):
    g = Graph()
    for v in range(1, n + 1):
        g.add_vertex(v)
    for i in range(1, n + 1):
        g.add_edge(i, i % n + 1)
    return g


def random_gnm(n, m, seed):
    rng = DetRng(seed)
    g = Graph()
    for v in range(1, n + 1):
        g.add_vertex(v)
    pairs = [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)]
    for (a, b) in rng.sample(pairs, min(m, len(pairs))):
        g.add_edge(a, b)
    return g


def test_validate_single_bag():
    g = complete_graph(5)
    td = TreeDecomposition({1: frozenset(range(1, 6))}, ())
    assert validate_decomposition(g, td).ok
    assert td.width == 4


def test_validate_path():
    g = Graph()
    for v in (1, 2, 3):
        g.add_vertex(v)
    g.add_edge(1, 2)
    g.add_edge(2, 3)
    td = TreeDecomposition({1: frozenset({1, 2}), 2: frozenset({2, 3})}, ((1, 2),))
    rep = validate_decomposition(g, td)
    assert rep.ok and td.width == 1


def test_validate_connectivity_violation():
    g = Graph()
    for v in (1, 2, 3):
        g.add_vertex(v)
    g.add_edge(1, 2)
    g.add_edge(2, 3)
    td = TreeDecomposition(
        {1: frozenset({1, 2}), 2: frozenset({3}), 3: frozenset({2})},
        ((1, 2), (2, 3)),
    )
    rep = validate_decomposition(g, td)
    assert not rep.ok
    assert ("connectivity", 2) in rep.violations


def test_validate_edge_coverage_violation():
    g = Graph()
    for v in (1, 2):
        g.add_vertex(v)
    g.add_edge(1, 2)
    td = TreeDecomposition({1: frozenset({1}), 2: frozenset({2})}, ((1, 2),))
    rep = validate_decomposition(g, td)
    assert ("edge-coverage", (1, 2)) in rep.violations


def test_validate_tree_violation():
    g = Graph()
    g.add_vertex(1)
    td = TreeDecomposition({1: frozenset({1}), 2: frozenset({1})}, ())
    assert not validate_decomposition(g, td).ok  # two bags, no edge: disconnected


def test_lower_bound_anchors():
    assert lower_bound(complete_graph(5)) == 4
    assert lower_bound(complete_bipartite(4, 4)) == 4
    tree = Graph()
    for v in range(1, 6):
        tree.add_vertex(v)
    for v in range(2, 6):
        tree.add_edge(1, v)
    assert lower_bound(tree) == 1
    assert degeneracy(Graph()) == -1


def test_upper_bound_heuristic():
    w, td = upper_bound_heuristic(Graph())
    assert w == -1 and len(td.bags) == 1
    w, td = upper_bound_heuristic(cycle_graph(5))
    assert w == 2
    assert validate_decomposition(cycle_graph(5), td).ok
    w, _ = upper_bound_heuristic(complete_graph(5))
    assert w == 4


def test_exact_anchors():
    assert exact_treewidth(complete_bipartite(4, 4))[0] == 4
    assert exact_treewidth(complete_graph(5))[0] == 4
    f = reduce(gen_grid_formula_x(3), Assignment({10: 1}))
    assert exact_treewidth(build_incidence(f))[0] == 1


def test_exact_wall8():
    g, _ = make_wall(8)
    w, td = exact_treewidth(g, vertex_cap=64)
    assert w >= 4
    assert validate_decomposition(g, td).ok
    assert td.width == w


def test_exact_cap():
    g, _ = make_wall(8)
    with pytest.raises(VertexCapExceeded):
        exact_treewidth(g, vertex_cap=48)


def test_exact_isolated_vertices():
    g = Graph()
    for v in (1, 2, 3):
        g.add_vertex(v)
    w, td = exact_treewidth(g)
    assert w == 0
    assert validate_decomposition(g, td).ok


def test_at_most_verdicts():
    forest = Graph()
    for v in range(1, 7):
        forest.add_vertex(v)
    for v in range(2, 7):
        forest.add_edge(v // 2, v)
    assert treewidth_at_most(forest, 1).kind == AT_MOST
    v = treewidth_at_most(complete_graph(5), 3)
    assert v.kind == EXCEEDS
    assert v.bound >= 4
    v = treewidth_at_most(build_incidence(gen_grid_formula(3)), 2)
    assert v.kind == EXCEEDS


def test_at_most_above_cap():
    g, _ = make_wall(8)
    v = treewidth_at_most(g, 1, vertex_cap=10)
    assert v.kind == EXCEEDS  # degeneracy 2 already rules out t=1
    v = treewidth_at_most(g, 4, vertex_cap=10)
    assert v.kind == AT_MOST  # heuristic width 4 certifies
    v = treewidth_at_most(g, 3, vertex_cap=10)
    assert v.kind == UNKNOWN


def test_empty_graph_verdict():
    v = treewidth_at_most(Graph(), 0)
    assert v.kind == AT_MOST and v.bound == -1


@given(st.integers(0, 400))
@settings(max_examples=50, deadline=None)
def test_bound_sandwich(seed):
    rng = DetRng(seed)
    n = rng.randint(3, 11)
    m = rng.randint(n - 1, min(2 * n, n * (n - 1) // 2))
    g = random_gnm(n, m, seed)
    lb = max(lower_bound(g), minor_min_width(g))
    exact, td = exact_treewidth(g)
    ub, utd = upper_bound_heuristic(g)
    assert lb <= exact <= ub
    assert validate_decomposition(g, td).ok
    assert validate_decomposition(g, utd).ok
    assert td.width == exact


@given(st.integers(0, 400))
@settings(max_examples=30, deadline=None)
def test_at_most_matches_exact(seed):
    rng = DetRng(seed)
    n = rng.randint(3, 10)
    g = random_gnm(n, rng.randint(n, 2 * n), seed + 7)
    exact, _ = exact_treewidth(g)
    for t in range(0, exact + 2):
        verdict = treewidth_at_most(g, t)
        assert (verdict.kind == AT_MOST) == (exact <= t)
        if verdict.kind == AT_MOST:
            assert verdict.decomposition.width <= t
            assert validate_decomposition(g, verdict.decomposition).ok


@given(st.integers(0, 300))
@settings(max_examples=25, deadline=None)
def test_subgraph_monotonicity(seed):
    rng = DetRng(seed)
    n = rng.randint(4, 10)
    g = random_gnm(n, rng.randint(n, 2 * n), seed + 13)
    keep = set(rng.sample(g.sorted_vertices(), rng.randint(2, n - 1)))
    sub = g.subgraph(keep)
    assert exact_treewidth(sub)[0] <= exact_treewidth(g)[0]


def test_decomposition_from_order_validates():
    g = random_gnm(8, 14, 99)
    order = g.sorted_vertices()
    td = decomposition_from_order(g, order)
    assert validate_decomposition(g, td).ok


def test_td_roundtrip():
    g = cycle_graph(5)
    w, td = exact_treewidth(g)
    id_map = {v: v for v in g.sorted_vertices()}
    text = write_td(td, id_map)
    assert text.startswith(f"s td {len(td.bags)} {w + 1} 5")
    back = read_td(text)
    assert validate_decomposition(g, back).ok
    assert back.width == td.width

"""Tree decompositions: validation, bounds, exact solving, PACE .td io.

The exact solver searches elimination orderings: safe reductions (simplicial,
almost-simplicial, degree-2) shrink the graph, then a depth-first decision
search per target width with memoized dead states settles the rest. This is
practical to roughly fifty vertices, larger for structured graphs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .graphs import Graph

DEFAULT_VERTEX_CAP = 48

AT_MOST = "at_most"
EXCEEDS = "exceeds"
UNKNOWN = "unknown"


class VertexCapExceeded(RuntimeError):
    """Exact treewidth was asked for a graph above the configured cap."""


@dataclass(frozen=True)
class TreeDecomposition:
    """Bags indexed by int, plus tree edges between bag indices."""

    bags: Mapping[int, frozenset[int]]
    edges: tuple[tuple[int, int], ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags.values()), default=0) - 1


def single_bag_decomposition(vertices: Iterable[int]) -> TreeDecomposition:
    return TreeDecomposition({1: frozenset(vertices)}, ())


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[tuple[str, object], ...] = ()

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class TwVerdict:
    """Outcome of a treewidth-at-most query.

    kind 'at_most' carries a witnessing decomposition; 'exceeds' carries a
    certificate (a vertex set of degeneracy above the target, or a note that
    exact search ran); 'unknown' means the caps prevented a decision.
    """

    kind: str
    bound: int
    decomposition: TreeDecomposition | None = None
    certificate: object = None


def validate_decomposition(g: Graph, td: TreeDecomposition) -> ValidationReport:
    """Check tree-ness, vertex coverage, edge coverage, and occurrence connectivity."""
    violations: list[tuple[str, object]] = []
    idx = set(td.bags)
    for (i, j) in td.edges:
        if i not in idx or j not in idx:
            violations.append(("tree", (i, j)))
    if not violations and idx:
        parent = {}
        seen = set()
        adj: dict[int, set[int]] = {i: set() for i in idx}
        for (i, j) in td.edges:
            adj[i].add(j)
            adj[j].add(i)
        root = min(idx)
        stack = [root]
        seen.add(root)
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    parent[w] = u
                    stack.append(w)
        if len(seen) != len(idx) or len(td.edges) != len(idx) - 1:
            violations.append(("tree", "not a connected acyclic index set"))
    covered: set[int] = set()
    for b in td.bags.values():
        covered |= b
    for v in g.sorted_vertices():
        if v not in covered:
            violations.append(("vertex-coverage", v))
    for (u, v) in g.edges():
        if not any(u in b and v in b for b in td.bags.values()):
            violations.append(("edge-coverage", (u, v)))
    if not any(code == "tree" for code, _ in violations):
        adj = {i: set() for i in idx}
        for (i, j) in td.edges:
            adj[i].add(j)
            adj[j].add(i)
        for v in g.sorted_vertices():
            holding = {i for i, b in td.bags.items() if v in b}
            if not holding:
                continue
            start = min(holding)
            seen = {start}
            stack = [start]
            while stack:
                u = stack.pop()
                for w in adj[u]:
                    if w in holding and w not in seen:
                        seen.add(w)
                        stack.append(w)
            if seen != holding:
                violations.append(("connectivity", v))
    return ValidationReport(not violations, tuple(violations))


# ---------------------------------------------------------------------------
# bounds


def _degeneracy_adj(adj: dict[int, set[int]]) -> int:
    if not adj:
        return -1
    work = {v: set(s) for v, s in adj.items()}
    best = 0
    while work:
        v = min(work, key=lambda u: (len(work[u]), u))
        best = max(best, len(work[v]))
        for u in work[v]:
            work[u].discard(v)
        del work[v]
    return best


def degeneracy(g: Graph) -> int:
    """Max over peeling steps of the min degree; a valid treewidth lower bound."""
    return _degeneracy_adj(g.adjacency())


def lower_bound(g: Graph) -> int:
    return degeneracy(g)


def minor_min_width(g: Graph) -> int:
    return _mmw_adj(g.adjacency())


def _mmw_adj(adj: dict[int, set[int]]) -> int:
    """Contraction-based lower bound: contract a min-degree vertex into its
    least-degree neighbor, tracking the largest min degree seen."""
    work = {v: set(s) for v, s in adj.items()}
    best = 0
    while work:
        v = min(work, key=lambda u: (len(work[u]), u))
        d = len(work[v])
        best = max(best, d)
        if d == 0:
            del work[v]
            continue
        u = min(work[v], key=lambda x: (len(work[x]), x))
        nbrs = work.pop(v)
        for w in nbrs:
            work[w].discard(v)
        merged = (work[u] | nbrs) - {u, v}
        work[u] = merged
        for w in merged:
            work[w].add(u)
    return best


def _core_vertices(g: Graph, k: int) -> frozenset[int]:
    """The k-core: repeatedly strip vertices of degree below k."""
    adj = g.adjacency()
    changed = True
    while changed:
        changed = False
        for v in sorted(adj):
            if len(adj[v]) < k:
                for u in adj[v]:
                    adj[u].discard(v)
                del adj[v]
                changed = True
    return frozenset(adj)


# ---------------------------------------------------------------------------
# elimination orderings


def _eliminate(adj: dict[int, set[int]], v: int, journal: list | None = None) -> int:
    """Remove v, clique its neighborhood; returns v's degree at elimination."""
    nbrs = sorted(adj.pop(v))
    added = []
    for i, a in enumerate(nbrs):
        adj[a].discard(v)
        for b in nbrs[i + 1:]:
            if b not in adj[a]:
                adj[a].add(b)
                adj[b].add(a)
                added.append((a, b))
    if journal is not None:
        journal.append((v, nbrs, added))
    return len(nbrs)


def _undo(adj: dict[int, set[int]], journal: list, mark: int) -> None:
    while len(journal) > mark:
        v, nbrs, added = journal.pop()
        for a, b in added:
            adj[a].discard(b)
            adj[b].discard(a)
        adj[v] = set(nbrs)
        for a in nbrs:
            adj[a].add(v)


def _fill_in(adj: dict[int, set[int]], v: int) -> int:
    nbrs = list(adj[v])
    missing = 0
    for i, a in enumerate(nbrs):
        for b in nbrs[i + 1:]:
            if b not in adj[a]:
                missing += 1
    return missing


def _is_simplicial(adj: dict[int, set[int]], v: int) -> bool:
    return _fill_in(adj, v) == 0


def _greedy_order(adj: dict[int, set[int]], key) -> tuple[list[int], int]:
    work = {v: set(s) for v, s in adj.items()}
    order: list[int] = []
    width = -1 if not work else 0
    while work:
        v = min(work, key=lambda u: key(work, u))
        order.append(v)
        width = max(width, _eliminate(work, v))
    return order, width


def _min_fill_order(adj) -> tuple[list[int], int]:
    return _greedy_order(adj, lambda w, u: (_fill_in(w, u), u))


def _min_degree_order(adj) -> tuple[list[int], int]:
    return _greedy_order(adj, lambda w, u: (len(w[u]), u))


def decomposition_from_order(g: Graph, order: list[int]) -> TreeDecomposition:
    """Run the elimination game along `order` and collect bags.

    Each vertex's bag is itself plus its neighbors at elimination time; the
    bag attaches to the bag of its earliest-eliminated such neighbor. Roots of
    separate components get chained so the index set forms one tree.
    """
    adj = g.adjacency()
    if set(order) != set(adj):
        raise ValueError("order must cover the graph's vertices exactly")
    pos = {v: i for i, v in enumerate(order)}
    bags: dict[int, frozenset[int]] = {}
    edges: list[tuple[int, int]] = []
    roots: list[int] = []
    for v in order:
        nbrs = set(adj[v])
        bags[pos[v] + 1] = frozenset(nbrs | {v})
        if nbrs:
            parent = min(nbrs, key=lambda u: pos[u])
            edges.append((pos[v] + 1, pos[parent] + 1))
        else:
            roots.append(pos[v] + 1)
        _eliminate(adj, v)
    for a, b in zip(roots, roots[1:]):
        edges.append((a, b))
    return TreeDecomposition(bags, tuple(edges))


def upper_bound_heuristic(g: Graph) -> tuple[int, TreeDecomposition]:
    """Min-fill elimination ordering turned into a decomposition."""
    if g.num_vertices() == 0:
        return -1, single_bag_decomposition(())
    order, width = _min_fill_order(g.adjacency())
    return width, decomposition_from_order(g, order)


# ---------------------------------------------------------------------------
# exact search


def _preprocess(adj: dict[int, set[int]], lb: int) -> tuple[list[int], int, int]:
    """Apply safe reductions; returns (eliminated prefix, prefix width, new lb)."""
    prefix: list[int] = []
    width = -1
    changed = True
    while changed and adj:
        changed = False
        for v in sorted(adj):
            d = len(adj[v])
            fill = _fill_in(adj, v)
            if fill == 0:
                lb = max(lb, d)
            elif d == 2 and lb >= 2:
                pass
            elif fill == 1 and d <= lb:
                pass
            else:
                continue
            width = max(width, _eliminate(adj, v))
            prefix.append(v)
            changed = True
            break
    return prefix, width, lb


def _decide(adj: dict[int, set[int]], w: int, comp_lb: int) -> list[int] | None:
    """Is there an elimination ordering of width <= w? Returns one if so."""
    order: list[int] = []
    journal: list = []
    dead: set[frozenset[int]] = set()
    use_deg2 = w >= 2 and comp_lb >= 2

    def dfs() -> bool:
        mark = len(journal)
        omark = len(order)
        while True:
            forced = None
            for v in sorted(adj):
                d = len(adj[v])
                if d <= 1:
                    forced = v
                    break
                if d == 2 and use_deg2:
                    forced = v
                    break
                if _is_simplicial(adj, v):
                    if d > w:
                        _undo(adj, journal, mark)
                        del order[omark:]
                        return False
                    forced = v
                    break
            if forced is None:
                break
            order.append(forced)
            _eliminate(adj, forced, journal)
        if len(adj) <= w + 1:
            order.extend(sorted(adj))
            return True
        key = frozenset(adj)
        if key in dead:
            _undo(adj, journal, mark)
            del order[omark:]
            return False
        if min(len(s) for s in adj.values()) > w:
            dead.add(key)
            _undo(adj, journal, mark)
            del order[omark:]
            return False
        cands = sorted(
            (v for v in adj if len(adj[v]) <= w),
            key=lambda v: (_fill_in(adj, v), len(adj[v]), v),
        )
        for v in cands:
            vmark = len(journal)
            order.append(v)
            _eliminate(adj, v, journal)
            if dfs():
                return True
            _undo(adj, journal, vmark)
            order.pop()
        dead.add(key)
        _undo(adj, journal, mark)
        del order[omark:]
        return False

    return order if dfs() else None


def _solve_component(adj: dict[int, set[int]]) -> tuple[int, list[int]]:
    # Invariant of the safe reductions: tw(component) = max(lb, tw(core)).
    lb = max(_degeneracy_adj(adj), _mmw_adj(adj))
    prefix, pwidth, lb = _preprocess(adj, lb)
    if not adj:
        return max(pwidth, lb), prefix
    lb_core = max(_degeneracy_adj(adj), _mmw_adj(adj))
    fill_order, fill_width = _min_fill_order(adj)
    degree_order, degree_width = _min_degree_order(adj)
    ub_order, ub_width = (
        (fill_order, fill_width) if fill_width <= degree_width else (degree_order, degree_width)
    )
    lo = max(lb_core, lb, 0)
    hi = max(ub_width, lb)
    for w in range(lo, hi):
        found = _decide({v: set(s) for v, s in adj.items()}, w, lb_core)
        if found is not None:
            return w, prefix + found
    return hi, prefix + ub_order


def _components(g: Graph) -> list[set[int]]:
    seen: set[int] = set()
    comps = []
    for v in g.sorted_vertices():
        if v in seen:
            continue
        comp = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            for x in g.neighbors(u):
                if x not in comp:
                    comp.add(x)
                    stack.append(x)
        seen |= comp
        comps.append(comp)
    return comps


def exact_treewidth(g: Graph, vertex_cap: int = DEFAULT_VERTEX_CAP) -> tuple[int, TreeDecomposition]:
    """Optimal width and a witnessing decomposition, per-component."""
    n = g.num_vertices()
    if n > vertex_cap:
        raise VertexCapExceeded(f"{n} vertices exceed the exact-solver cap {vertex_cap}")
    if n == 0:
        return -1, single_bag_decomposition(())
    width = -1
    full_order: list[int] = []
    for comp in _components(g):
        adj = {v: {u for u in g.neighbors(v) if u in comp} for v in comp}
        w, order = _solve_component(adj)
        width = max(width, w)
        full_order.extend(order)
    return width, decomposition_from_order(g, full_order)


def treewidth_at_most(g: Graph, t: int, vertex_cap: int = DEFAULT_VERTEX_CAP) -> TwVerdict:
    """Decide tw(g) <= t; decisive at or below the cap, best-effort above.

    Above the cap the answer is AtMost when the heuristic width fits, Exceeds
    when the degeneracy bound already rules t out, and Unknown otherwise.
    """
    if g.num_vertices() == 0:
        return TwVerdict(AT_MOST, -1, single_bag_decomposition(()))
    deg = degeneracy(g)
    if deg > t:
        return TwVerdict(EXCEEDS, deg, None, _core_vertices(g, t + 1))
    ub, td = upper_bound_heuristic(g)
    if ub <= t:
        return TwVerdict(AT_MOST, ub, td)
    if g.num_vertices() <= vertex_cap:
        w, etd = exact_treewidth(g, vertex_cap)
        if w <= t:
            return TwVerdict(AT_MOST, w, etd)
        return TwVerdict(EXCEEDS, w, None, "exact search exhausted orderings")
    return TwVerdict(UNKNOWN, ub)


# ---------------------------------------------------------------------------
# PACE .td io


def write_td(td: TreeDecomposition, id_map: Mapping[int, int]) -> str:
    """PACE .td text; vertex ids are translated through id_map (1-based, contiguous)."""
    n = len(id_map)
    keys = sorted(td.bags)
    renum = {k: i + 1 for i, k in enumerate(keys)}
    lines = [f"s td {len(keys)} {max((len(td.bags[k]) for k in keys), default=0)} {n}"]
    for k in keys:
        body = " ".join(str(id_map[v]) for v in sorted(td.bags[k]))
        lines.append(f"b {renum[k]} {body}".rstrip())
    for (i, j) in td.edges:
        a, b = renum[i], renum[j]
        lines.append(f"{min(a, b)} {max(a, b)}")
    return "\n".join(lines) + "\n"


def read_td(text: str) -> TreeDecomposition:
    bags: dict[int, frozenset[int]] = {}
    edges: list[tuple[int, int]] = []
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("s"):
            parts = line.split()
            if len(parts) != 5 or parts[1] != "td":
                raise ValueError(f"line {lineno}: malformed .td header")
            header_seen = True
            continue
        if line.startswith("b"):
            parts = line.split()
            bags[int(parts[1])] = frozenset(int(x) for x in parts[2:])
            continue
        i, j = (int(x) for x in line.split())
        edges.append((i, j))
    if not header_seen:
        raise ValueError("missing 's td' header")
    return TreeDecomposition(bags, tuple(edges))

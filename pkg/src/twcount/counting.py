"""#SAT engines: brute-force oracle, tree-decomposition DP, backdoor-driven counting.

Counts are Python ints, so they are arbitrary precision by construction.
Free variables of a formula appear as isolated vertices of its incidence
graph; the decomposition DP therefore doubles the count once per free
variable without special handling.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import backdoor as _backdoor
from .formula import Assignment, CnfFormula, assignments, reduce
from .graphs import CLAUSE, VAR, Graph, build_incidence
from .treewidth import (
    AT_MOST,
    DEFAULT_VERTEX_CAP,
    EXCEEDS,
    TreeDecomposition,
    treewidth_at_most,
    validate_decomposition,
)

BRUTE_FORCE_CAP = 30


class VariableCapExceeded(RuntimeError):
    """Brute-force counting was asked for more variables than the cap allows."""


class BackdoorInvalidError(RuntimeError):
    """A claimed backdoor left some reduced formula outside the width bound."""

    def __init__(self, assignment: Assignment, bound: int | None = None):
        self.assignment = assignment
        self.bound = bound
        super().__init__(f"reduction under {assignment} exceeds the width bound (got {bound})")


def count_bruteforce(f: CnfFormula, cap: int = BRUTE_FORCE_CAP) -> int:
    """Exact model count by enumerating assignments of var(F) plus free vars."""
    vs = sorted(f.variables | f.free_vars)
    n = len(vs)
    if n > cap:
        raise VariableCapExceeded(f"{n} variables exceed the brute-force cap {cap}")
    idx = {v: i for i, v in enumerate(vs)}
    masks = []
    for c in f.clauses:
        pos = neg = 0
        for lit in c.literals:
            if lit.positive:
                pos |= 1 << idx[lit.var]
            else:
                neg |= 1 << idx[lit.var]
        masks.append((pos, neg))
    count = 0
    for m in range(1 << n):
        for pos, neg in masks:
            if not (m & pos) and (m & neg) == neg:
                break
        else:
            count += 1
    return count


# ---------------------------------------------------------------------------
# nice-decomposition DP


@dataclass(eq=False)
class _NiceNode:
    kind: str  # leaf / introduce_var / introduce_cla / forget_var / forget_cla / join
    bag_vars: tuple[int, ...]
    bag_clas: tuple[int, ...]
    vertex: int | None = None
    children: tuple["_NiceNode", ...] = ()


def _split_bag(g: Graph, bag) -> tuple[tuple[int, ...], tuple[int, ...]]:
    vs = tuple(sorted(v for v in bag if g.kind(v) == VAR))
    cs = tuple(sorted(v for v in bag if g.kind(v) == CLAUSE))
    return vs, cs


def _chain(g: Graph, node: _NiceNode, current: set[int], target: set[int]) -> _NiceNode:
    """Forget current-minus-target, then introduce target-minus-current."""
    cur = set(current)
    for v in sorted(cur - target):
        cur.remove(v)
        kind = "forget_var" if g.kind(v) == VAR else "forget_cla"
        node = _NiceNode(kind, *_split_bag(g, cur), vertex=v, children=(node,))
    for v in sorted(target - cur):
        cur.add(v)
        kind = "introduce_var" if g.kind(v) == VAR else "introduce_cla"
        node = _NiceNode(kind, *_split_bag(g, cur), vertex=v, children=(node,))
    return node


def _nice_tree(g: Graph, td: TreeDecomposition) -> _NiceNode:
    if not td.bags:
        return _NiceNode("leaf", (), ())
    nbrs: dict[int, list[int]] = {i: [] for i in td.bags}
    for (i, j) in td.edges:
        nbrs[i].append(j)
        nbrs[j].append(i)
    root_id = min(td.bags)

    def build(i: int, parent: int | None) -> _NiceNode:
        bag = set(td.bags[i])
        kids = sorted(j for j in nbrs[i] if j != parent)
        if not kids:
            return _chain(g, _NiceNode("leaf", (), ()), set(), bag)
        subs = [_chain(g, build(j, i), set(td.bags[j]), bag) for j in kids]
        node = subs[0]
        for s in subs[1:]:
            node = _NiceNode("join", *_split_bag(g, bag), children=(node, s))
        return node

    top = build(root_id, None)
    return _chain(g, top, set(td.bags[root_id]), set())


def _insert_bit(mask: int, pos: int, bit: int) -> int:
    low = mask & ((1 << pos) - 1)
    return ((mask >> pos) << (pos + 1)) | (bit << pos) | low


def _remove_bit(mask: int, pos: int) -> int:
    low = mask & ((1 << pos) - 1)
    return ((mask >> (pos + 1)) << pos) | low


def _run_dp(g: Graph, td: TreeDecomposition) -> int:
    """Count satisfying assignments over all variable vertices of g.

    Table state per node: (assignment bits over bag variables, bits over bag
    clauses already satisfied from below). A clause may only be forgotten once
    satisfied; a variable forget sums out its two values.
    """
    root = _nice_tree(g, td)
    postorder: list[_NiceNode] = []
    stack: list[tuple[_NiceNode, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            postorder.append(node)
        else:
            stack.append((node, True))
            for ch in node.children:
                stack.append((ch, False))
    tables: dict[int, dict[tuple[int, int], int]] = {}
    for node in postorder:
        if node.kind == "leaf":
            t = {(0, 0): 1}
        elif node.kind == "join":
            t1 = tables.pop(id(node.children[0]))
            t2 = tables.pop(id(node.children[1]))
            by_alpha: dict[int, list[tuple[int, int]]] = {}
            for (a, s), v in t2.items():
                by_alpha.setdefault(a, []).append((s, v))
            t = {}
            for (a, s1), v1 in t1.items():
                for s2, v2 in by_alpha.get(a, ()):
                    key = (a, s1 | s2)
                    t[key] = t.get(key, 0) + v1 * v2
        elif node.kind == "introduce_var":
            child = node.children[0]
            tc = tables.pop(id(child))
            x = node.vertex
            xi = node.bag_vars.index(x)
            sat_true = sat_false = 0
            for ci, cv in enumerate(node.bag_clas):
                sign = g.sign(x, cv)
                if sign is True:
                    sat_true |= 1 << ci
                elif sign is False:
                    sat_false |= 1 << ci
            t = {}
            for (a, s), v in tc.items():
                for val, extra in ((0, sat_false), (1, sat_true)):
                    key = (_insert_bit(a, xi, val), s | extra)
                    t[key] = t.get(key, 0) + v
        elif node.kind == "introduce_cla":
            child = node.children[0]
            tc = tables.pop(id(child))
            c = node.vertex
            ci = node.bag_clas.index(c)
            pos_idx = []
            neg_idx = []
            for vi, x in enumerate(node.bag_vars):
                sign = g.sign(x, c)
                if sign is True:
                    pos_idx.append(vi)
                elif sign is False:
                    neg_idx.append(vi)
            t = {}
            for (a, s), v in tc.items():
                sat = any((a >> i) & 1 for i in pos_idx) or any(
                    not ((a >> i) & 1) for i in neg_idx
                )
                key = (a, _insert_bit(s, ci, 1 if sat else 0))
                t[key] = t.get(key, 0) + v
        elif node.kind == "forget_var":
            child = node.children[0]
            tc = tables.pop(id(child))
            xi = child.bag_vars.index(node.vertex)
            t = {}
            for (a, s), v in tc.items():
                key = (_remove_bit(a, xi), s)
                t[key] = t.get(key, 0) + v
        elif node.kind == "forget_cla":
            child = node.children[0]
            tc = tables.pop(id(child))
            ci = child.bag_clas.index(node.vertex)
            t = {}
            for (a, s), v in tc.items():
                if (s >> ci) & 1:
                    key = (a, _remove_bit(s, ci))
                    t[key] = t.get(key, 0) + v
        else:  # pragma: no cover
            raise AssertionError(node.kind)
        tables[id(node)] = t
    return tables[id(root)].get((0, 0), 0)


def count_td(f: CnfFormula, td: TreeDecomposition) -> int:
    """Exact model count via dynamic programming over a decomposition of inc(F)."""
    g = build_incidence(f)
    report = validate_decomposition(g, td)
    if not report.ok:
        raise ValueError(f"invalid decomposition: {report.violations[0]}")
    vertices = set(g.vertices())
    for i, bag in td.bags.items():
        if not bag <= vertices:
            raise ValueError(f"bag {i} contains vertices outside inc(F)")
    return _run_dp(g, td)


# ---------------------------------------------------------------------------
# backdoor-driven counting


@dataclass(frozen=True)
class BranchCount:
    assignment: Assignment
    width: int
    vanished: int  # variables gone from the reduction without being assigned
    count: int


def backdoor_branch_counts(
    f: CnfFormula, b, t: int, vertex_cap: int = DEFAULT_VERTEX_CAP
) -> list[BranchCount]:
    """Per-assignment counts for a strong backdoor; raises if a branch is too wide."""
    bset = frozenset(b)
    out = []
    for tau in assignments(bset, cap=20):
        fr = reduce(f, tau)
        g = build_incidence(fr)
        verdict = treewidth_at_most(g, t, vertex_cap)
        if verdict.kind != AT_MOST:
            raise BackdoorInvalidError(tau, verdict.bound)
        vanished = len(f.variables - bset - fr.variables)
        out.append(
            BranchCount(tau, verdict.decomposition.width, vanished, _run_dp(g, verdict.decomposition))
        )
    return out


def _branch_worker(args) -> tuple[int, int]:
    f, tau_items, t, vertex_cap = args
    tau = Assignment(dict(tau_items))
    fr = reduce(f, tau)
    g = build_incidence(fr)
    verdict = treewidth_at_most(g, t, vertex_cap)
    if verdict.kind != AT_MOST:
        raise BackdoorInvalidError(tau, verdict.bound)
    vanished = len(f.variables - tau.domain - fr.variables)
    return vanished, _run_dp(g, verdict.decomposition)


def count_via_backdoor(
    f: CnfFormula,
    b,
    t: int,
    verify: bool = True,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
    jobs: int = 1,
) -> int:
    """Sum 2^vanished * count(F[tau]) over all assignments tau to the backdoor."""
    bset = frozenset(b)
    if verify:
        report = _backdoor.is_strong_backdoor(f, bset, t, vertex_cap=vertex_cap)
        if not report.valid:
            raise BackdoorInvalidError(report.failing_assignment, report.failing_bound)
    if jobs > 1 and len(bset) >= 2:
        from concurrent.futures import ProcessPoolExecutor

        work = [(f, tau.items(), t, vertex_cap) for tau in assignments(bset, cap=20)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return sum((1 << vanished) * cnt for vanished, cnt in pool.map(_branch_worker, work))
    return sum((1 << br.vanished) * br.count for br in backdoor_branch_counts(f, bset, t, vertex_cap))


@dataclass(frozen=True)
class SolveResult:
    outcome: str  # counted / sb_exceeded / inconclusive
    count: int | None
    mode: str | None  # td / backdoor
    t: int
    k: int
    backdoor: tuple[int, ...] | None = None
    branch_widths: tuple[int, ...] | None = None
    note: str | None = None


def solve(
    f: CnfFormula,
    t: int,
    k: int,
    tw_threshold: int = 8,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
) -> SolveResult:
    """Count satisfying assignments, or conclude no small strong backdoor exists.

    Small incidence treewidth (at most tw_threshold) is counted directly by
    the decomposition DP. Otherwise a strong backdoor of size at most 2^k - 1
    is searched; failure to find one is the machine-readable 'sb_exceeded'
    outcome, meaning every strong backdoor into width t has size above k.
    """
    note = "zero-literal clause present; formula unsatisfiable" if any(
        len(c) == 0 for c in f.clauses
    ) else None
    g = build_incidence(f)
    verdict = treewidth_at_most(g, max(tw_threshold, t), vertex_cap)
    if verdict.kind == AT_MOST:
        return SolveResult("counted", _run_dp(g, verdict.decomposition), "td", t, k, note=note)
    if verdict.kind != EXCEEDS:
        return SolveResult("inconclusive", None, None, t, k, note=note)
    try:
        report = _backdoor.approx_backdoor(
            f, t, k, tw_threshold=tw_threshold, vertex_cap=vertex_cap
        )
    except _backdoor.InconclusiveTreewidth:
        return SolveResult("inconclusive", None, None, t, k, note=note)
    if report is None:
        return SolveResult("sb_exceeded", None, "backdoor", t, k, note=note)
    branches = backdoor_branch_counts(f, report.variables, t, vertex_cap)
    total = sum((1 << br.vanished) * br.count for br in branches)
    return SolveResult(
        "counted",
        total,
        "backdoor",
        t,
        k,
        backdoor=report.variables,
        branch_widths=tuple(br.width for br in branches),
        note=note,
    )

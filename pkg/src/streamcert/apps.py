"""Problems solved downstream of a connectivity certificate.

Every routine works purely on the certificate's graph; the companion tests
check each answer against an offline reference computed from the original
input, which is the whole point of carrying a certificate around.
"""

from __future__ import annotations

from collections import deque
from typing import Sequence

from .certify_k import extract_disjoint_branchings
from .certify_one import Certificate
from .digraph import (
    Branching,
    BudgetError,
    ChainCover,
    Digraph,
    chain_cover_minimum,
    grow_branching,
    scc_tarjan,
    transitive_closure,
)
from .exact import kappa_st

_INDEP_BUDGET = 12


def _require_node_cert(cert: Certificate, min_k: int = 1) -> Digraph:
    if cert.kind != "node":
        raise ValueError(f"need a node certificate, got kind={cert.kind!r}")
    if cert.k < min_k:
        raise ValueError(f"need k >= {min_k}, certificate has k={cert.k}")
    return cert.graph()


def scc_and_toposort(cert: Certificate) -> tuple[list[int], list[int]]:
    """Component ids plus topological ranks of the condensation.

    Ranks are equal exactly within a component and strictly increase along
    every cross-component arc.
    """
    g = _require_node_cert(cert)
    comps = scc_tarjan(g)  # emitted in reverse topological order
    comp_of = [0] * g.n
    rank_of = [0] * g.n
    total = len(comps)
    for emitted, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = emitted
            rank_of[v] = total - 1 - emitted
    return comp_of, rank_of


def two_sat(clauses: Sequence[tuple[int, int]], nvars: int) -> list[bool] | None:
    """Solve a conjunction of 2-literal clauses; literals are +/-(1..nvars).

    Returns a satisfying assignment (index v−1 holds variable v) or None.
    """
    if nvars < 0:
        raise ValueError(f"nvars must be >= 0, got {nvars}")

    def node(lit: int) -> int:
        if lit == 0 or abs(lit) > nvars:
            raise ValueError(f"literal {lit} out of range for {nvars} variables")
        v = abs(lit) - 1
        return 2 * v if lit > 0 else 2 * v + 1

    arcs = set()
    for clause in clauses:
        if len(clause) != 2:
            raise ValueError(f"clause {clause!r} does not have two literals")
        a, b = clause
        if node(a) == node(-b):
            continue  # tautology (x or not-x) constrains nothing
        arcs.add((node(-a), node(b)))
        arcs.add((node(-b), node(a)))
    imp = Digraph(2 * nvars, arcs)
    comp = [0] * imp.n
    for emitted, component in enumerate(scc_tarjan(imp)):
        for x in component:
            comp[x] = emitted
    # earlier emission = closer to the sinks; pick the sink-side literal
    out = []
    for v in range(nvars):
        if comp[2 * v] == comp[2 * v + 1]:
            return None
        out.append(comp[2 * v] < comp[2 * v + 1])
    return out


def min_chain_cover_dag(cert: Certificate) -> ChainCover:
    """Minimum chain cover of an acyclic certificate's reachability order."""
    g = _require_node_cert(cert)
    if any(len(c) > 1 for c in scc_tarjan(g)):
        raise ValueError("input graph is not acyclic")
    return chain_cover_minimum(g)


def _is_strong(g: Digraph) -> bool:
    return g.n <= 1 or len(scc_tarjan(g)) == 1


def msss_2apx(cert: Certificate) -> Digraph | None:
    """2-approximate minimum spanning strongly connected subgraph.

    Union of one out- and one in-branching rooted at node 0, hence at most
    2n−2 arcs.  Returns None when the certificate is not strongly connected
    (then no spanning strongly connected subgraph exists at all).
    """
    g = _require_node_cert(cert)
    if not _is_strong(g):
        return None
    if g.n <= 1:
        return Digraph(g.n)
    out_b = grow_branching(g, 0, "out")
    in_b = grow_branching(g, 0, "in")
    return Digraph(g.n, out_b.arcs | in_b.arcs)


def strong_bridges(cert2: Certificate) -> frozenset[tuple[int, int]]:
    """Arcs whose removal increases the SCC count, read off a 2-certificate.

    A 1-certificate is not enough — it can turn every one of its own arcs
    into a bridge while the original graph has none — so k >= 2 is enforced.
    """
    if cert2.k < 2:
        raise ValueError(f"strong bridges need a certificate with k >= 2, got k={cert2.k}")
    g = cert2.graph()
    base = len(scc_tarjan(g))
    found = set()
    for arc in sorted(g.arcs):
        if len(scc_tarjan(Digraph(g.n, g.arcs - {arc}))) > base:
            found.add(arc)
    return frozenset(found)


def arc_disjoint_out_branchings(cert: Certificate, root: int, k: int) -> list[Branching]:
    """k pairwise arc-disjoint spanning out-branchings from the certificate."""
    if cert.k < k:
        raise ValueError(f"certificate has k={cert.k}, cannot support k={k} branchings")
    return extract_disjoint_branchings(cert.graph(), root, k, "out")


def independent_branchings_2(
    cert: Certificate, root: int
) -> tuple[Branching, Branching] | None:
    """Two spanning out-branchings whose root→v paths are internally disjoint.

    Exhaustive backtracking; None when some node lacks two internally
    node-disjoint routes from the root (then no such pair exists).
    """
    g = _require_node_cert(cert, min_k=2)
    if not 0 <= root < g.n:
        raise ValueError(f"root {root} out of range for n={g.n}")
    if g.n > _INDEP_BUDGET:
        raise BudgetError(f"independent branching search capped at n={_INDEP_BUDGET}")
    if g.n == 1:
        b = Branching(root, frozenset(), "out")
        return b, b
    for v in range(g.n):
        if v != root and kappa_st(g, root, v, limit=2) < 2:
            return None

    others = [v for v in range(g.n) if v != root]
    parents = {v: list(g.in_neighbors(v)) for v in others}

    def closes_cycle(v: int, p: int, parent: dict[int, int]) -> bool:
        while p != root:
            if p == v:
                return True
            if p not in parent:
                return False  # chain leaves the assigned prefix
            p = parent[p]
        return False

    def paths_of(parent: dict[int, int]) -> dict[int, frozenset[int]]:
        # internal nodes of the root→v tree path, endpoints excluded
        memo: dict[int, frozenset[int]] = {root: frozenset()}

        def up(v: int) -> frozenset[int]:
            if v not in memo:
                p = parent[v]
                memo[v] = up(p) | ({p} if p != root else frozenset())
            return memo[v]

        return {v: up(v) for v in others}

    def first_tree(idx: int, parent: dict[int, int]) -> tuple[Branching, Branching] | None:
        if idx == len(others):
            tree1 = Branching(root, frozenset((p, v) for v, p in parent.items()), "out")
            second = _grow_disjoint(g, root, paths_of(parent))
            if second is None:
                return None
            return tree1, second
        v = others[idx]
        for p in parents[v]:
            if closes_cycle(v, p, parent):
                continue
            parent[v] = p
            hit = first_tree(idx + 1, parent)
            if hit is not None:
                return hit
            del parent[v]
        return None

    return first_tree(0, {})


def _grow_disjoint(
    g: Digraph, root: int, other_paths: dict[int, frozenset[int]]
) -> Branching | None:
    """Grow a branching whose path internals avoid ``other_paths`` per node."""

    def extend(
        tree: set[int], arcs: set[tuple[int, int]], internals: dict[int, frozenset[int]]
    ) -> Branching | None:
        if len(tree) == g.n:
            return Branching(root, frozenset(arcs), "out")
        for u, v in sorted(g.arcs):
            if u not in tree or v in tree:
                continue
            path = internals[u] | ({u} if u != root else frozenset())
            if path & other_paths[v]:
                continue
            tree.add(v)
            arcs.add((u, v))
            internals[v] = path
            hit = extend(tree, arcs, internals)
            if hit is not None:
                return hit
            tree.discard(v)
            arcs.discard((u, v))
            del internals[v]
        return None

    return extend({root}, set(), {root: frozenset()})


def distance_d_dominating(cert: Certificate, d: int) -> set[int]:
    """Nodes S, |S| <= ceil(n/d), with every node <= d arcs from some s in S."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    g = _require_node_cert(cert)
    if not _is_strong(g):
        raise ValueError("graph is not strongly connected")
    if g.n == 0:
        return set()
    tree = grow_branching(g, 0, "out")
    parent = {v: u for u, v in tree.arcs}
    depth = {v: _tree_depth(v, parent) for v in range(g.n)}

    active = set(range(g.n))
    chosen: set[int] = set()
    while active:
        v = max(active, key=lambda w: (depth[w], -w))
        up = v
        for _ in range(min(d, depth[v])):
            up = parent[up]
        chosen.add(up)
        active -= _ball_out(g, up, d)
    return chosen


def _tree_depth(v: int, parent: dict[int, int]) -> int:
    steps = 0
    while v in parent:
        v = parent[v]
        steps += 1
    return steps


def _ball_out(g: Digraph, source: int, d: int) -> set[int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        if dist[u] == d:
            continue
        for w in g.out_neighbors(u):
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return set(dist)


def transitive_closure_from_cert(cert: Certificate) -> Digraph:
    """Transitive closure computed offline from the stored certificate."""
    return transitive_closure(cert.graph())

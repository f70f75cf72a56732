"""Core digraph type and the offline graph utilities shared by every other module.

Nodes are dense integers ``0..n-1``.  Graphs are simple: no self-loops, no
duplicate arcs; the antiparallel pair ``(u, v)`` and ``(v, u)`` may coexist.
All operations here are pure functions over immutable values and are safe for
concurrent use.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence


class GraphFormatError(ValueError):
    """Raised when graph text input is malformed (bad counts, self-loop, duplicate)."""


class CoverageError(ValueError):
    """Raised when a requested branching cannot span the graph; names a missing node."""

    def __init__(self, missing: int, root: int, kind: str):
        self.missing = missing
        self.root = root
        self.kind = kind
        super().__init__(
            f"no spanning {kind}-branching from root {root}: node {missing} not covered"
        )


class BudgetError(RuntimeError):
    """Raised when an exact routine is asked to exceed its instance-size budget."""


class Digraph:
    """Immutable simple digraph on nodes ``0..n-1`` with an explicit arc set."""

    __slots__ = ("n", "arcs", "_out", "_in")

    def __init__(self, n: int, arcs: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError(f"node count must be nonnegative, got {n}")
        arc_set = frozenset((int(u), int(v)) for u, v in arcs)
        for u, v in arc_set:
            if u == v:
                raise ValueError(f"self-loop ({u},{v}) not allowed")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"arc ({u},{v}) out of range for n={n}")
        self.n = n
        self.arcs = arc_set
        out: list[list[int]] = [[] for _ in range(n)]
        inn: list[list[int]] = [[] for _ in range(n)]
        for u, v in sorted(arc_set):
            out[u].append(v)
            inn[v].append(u)
        for lst in inn:
            lst.sort()
        self._out = tuple(tuple(x) for x in out)
        self._in = tuple(tuple(x) for x in inn)

    # -- basic views ---------------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.arcs)

    def out_neighbors(self, u: int) -> tuple[int, ...]:
        return self._out[u]

    def in_neighbors(self, v: int) -> tuple[int, ...]:
        return self._in[v]

    def out_masks(self) -> list[int]:
        """Adjacency rows as bitmasks (bit v set in row u iff arc (u,v))."""
        rows = [0] * self.n
        for u, v in self.arcs:
            rows[u] |= 1 << v
        return rows

    def in_masks(self) -> list[int]:
        rows = [0] * self.n
        for u, v in self.arcs:
            rows[v] |= 1 << u
        return rows

    def undirected_masks(self) -> list[int]:
        """Underlying undirected adjacency as bitmasks."""
        rows = [0] * self.n
        for u, v in self.arcs:
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return rows

    def reversed(self) -> "Digraph":
        return Digraph(self.n, ((v, u) for u, v in self.arcs))

    def induced(self, nodes: Sequence[int]) -> "Digraph":
        """Subgraph induced by ``nodes``, re-indexed to 0..len(nodes)-1 in the given order."""
        index = {v: i for i, v in enumerate(nodes)}
        sub = [
            (index[u], index[v])
            for u, v in self.arcs
            if u in index and v in index
        ]
        return Digraph(len(nodes), sub)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Digraph)
            and self.n == other.n
            and self.arcs == other.arcs
        )

    def __hash__(self) -> int:
        return hash((self.n, self.arcs))

    def __repr__(self) -> str:
        return f"Digraph(n={self.n}, m={self.m})"

    # -- text format ---------------------------------------------------------

    @classmethod
    def from_text(cls, text: str) -> "Digraph":
        """Parse the ``"n m"`` + ``m * "u v"`` format.  Duplicates/self-loops are errors."""
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise GraphFormatError("empty graph text")
        head = lines[0].split()
        if len(head) != 2:
            raise GraphFormatError(f"bad header {lines[0]!r}, expected 'n m'")
        try:
            n, m = int(head[0]), int(head[1])
        except ValueError as exc:
            raise GraphFormatError(f"bad header {lines[0]!r}") from exc
        if len(lines) - 1 != m:
            raise GraphFormatError(
                f"declared {m} arcs but found {len(lines) - 1} arc lines"
            )
        seen: set[tuple[int, int]] = set()
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 2:
                raise GraphFormatError(f"bad arc line {ln!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise GraphFormatError(f"bad arc line {ln!r}") from exc
            if u == v:
                raise GraphFormatError(f"self-loop line {ln!r}")
            if (u, v) in seen:
                raise GraphFormatError(f"duplicate arc line {ln!r}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"arc line {ln!r} out of range for n={n}")
            seen.add((u, v))
        return cls(n, seen)

    def to_text(self) -> str:
        lines = [f"{self.n} {self.m}"]
        lines.extend(f"{u} {v}" for u, v in sorted(self.arcs))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ChainCover:
    """A partition of the node set into chains.

    Each chain is a node sequence whose consecutive elements are connected by
    reachability in the reference graph.
    """

    chains: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.chains)

    def covered(self) -> frozenset[int]:
        return frozenset(v for c in self.chains for v in c)


@dataclass(frozen=True)
class Branching:
    """A spanning branching: ``out`` grows away from the root, ``in`` grows toward it."""

    root: int
    arcs: frozenset[tuple[int, int]]
    kind: str  # "out" | "in"

    def is_valid_for(self, g: Digraph) -> bool:
        """Check the branching invariants against ``g`` (arc containment + spanning tree)."""
        if self.kind not in ("out", "in"):
            return False
        if not self.arcs <= g.arcs:
            return False
        n = g.n
        if len(self.arcs) != n - 1:
            return False
        parent: dict[int, int] = {}
        for u, v in self.arcs:
            child = v if self.kind == "out" else u
            if child in parent or child == self.root:
                return False
            parent[child] = u if self.kind == "out" else v
        if len(parent) != n - 1:
            return False
        for v in parent:
            seen = {v}
            cur = v
            while cur != self.root:
                cur = parent[cur]
                if cur in seen:
                    return False
                seen.add(cur)
        return True


# ---------------------------------------------------------------------------
# reachability and closure
# ---------------------------------------------------------------------------


def _closure_masks(n: int, out_rows: list[int]) -> list[int]:
    """Per-node reachability bitmasks (node itself excluded)."""
    reach = [0] * n
    for s in range(n):
        seen = 0
        frontier = out_rows[s]
        while frontier:
            seen |= frontier
            nxt = 0
            f = frontier
            while f:
                low = f & -f
                nxt |= out_rows[low.bit_length() - 1]
                f ^= low
            frontier = nxt & ~seen
        reach[s] = seen
    return reach


def reachability_masks(g: Digraph) -> list[int]:
    """Bitmask rows of the transitive closure of ``g`` (self bit not set unless on a cycle)."""
    return _closure_masks(g.n, g.out_masks())


def reachable(g: Digraph, s: int, t: int) -> bool:
    """True iff a directed s->t path exists; ``s == t`` counts as reachable."""
    if not (0 <= s < g.n and 0 <= t < g.n):
        raise ValueError(f"node pair ({s},{t}) out of range for n={g.n}")
    if s == t:
        return True
    seen = {s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for v in g.out_neighbors(u):
            if v == t:
                return True
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return False


def transitive_closure(g: Digraph) -> Digraph:
    reach = reachability_masks(g)
    arcs = []
    for u in range(g.n):
        row = reach[u] & ~(1 << u)
        while row:
            low = row & -row
            arcs.append((u, low.bit_length() - 1))
            row ^= low
    return Digraph(g.n, arcs)


# ---------------------------------------------------------------------------
# strongly connected components
# ---------------------------------------------------------------------------


def scc_tarjan(g: Digraph) -> list[frozenset[int]]:
    """Strongly connected components, emitted in reverse topological order
    of the condensation (a component is emitted only after everything it can
    reach)."""
    n = g.n
    index_of = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[frozenset[int]] = []
    counter = 0

    # Iterative Tarjan so large certify/bench instances cannot hit the
    # interpreter recursion limit.
    for root in range(n):
        if index_of[root] != -1:
            continue
        work: list[tuple[int, int]] = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index_of[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            out = g.out_neighbors(v)
            while pi < len(out):
                w = out[pi]
                pi += 1
                if index_of[w] == -1:
                    work[-1] = (v, pi)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index_of[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index_of[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(frozenset(comp))
            if work:
                u, _ = work[-1]
                low[u] = min(low[u], low[v])
    return comps


def scc_ids(g: Digraph) -> list[int]:
    """Component id per node; ids follow the reverse topological emission order."""
    ids = [-1] * g.n
    for i, comp in enumerate(scc_tarjan(g)):
        for v in comp:
            ids[v] = i
    return ids


# ---------------------------------------------------------------------------
# independence number (exact, branch and bound)
# ---------------------------------------------------------------------------

_INDEPENDENCE_BUDGET = 64


def independence_number_exact(g: Digraph) -> int:
    """Exact maximum independent set size of the underlying undirected graph.

    Branch-and-bound with a greedy clique-cover bound; hard budget n <= 64.
    """
    n = g.n
    if n > _INDEPENDENCE_BUDGET:
        raise BudgetError(
            f"exact independence number limited to n <= {_INDEPENDENCE_BUDGET}, got {n}"
        )
    if n == 0:
        return 0
    adj = g.undirected_masks()
    full = (1 << n) - 1
    best = 0

    def bound(cand: int) -> int:
        # Greedy clique cover of cand: each clique contributes at most one
        # node to an independent set.
        cliques = 0
        rest = cand
        while rest:
            cliques += 1
            low = rest & -rest
            v = low.bit_length() - 1
            clique = low
            grow = rest & adj[v]
            while grow:
                glow = grow & -grow
                w = glow.bit_length() - 1
                clique |= glow
                grow &= adj[w]
            rest &= ~clique
        return cliques

    def expand(cand: int, size: int) -> None:
        nonlocal best
        if size + bin(cand).count("1") <= best:
            return
        if cand == 0:
            best = max(best, size)
            return
        if size + bound(cand) <= best:
            return
        low = cand & -cand
        v = low.bit_length() - 1
        # branch 1: take v
        expand(cand & ~(adj[v] | low), size + 1)
        # branch 2: skip v
        expand(cand ^ low, size)

    expand(full, 0)
    return best


def independence_greedy_bound(g: Digraph) -> int:
    """Cheap lower bound on the independence number (greedy min-degree)."""
    adj = g.undirected_masks()
    alive = (1 << g.n) - 1
    count = 0
    while alive:
        best_v, best_deg = -1, g.n + 1
        rest = alive
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            deg = bin(adj[v] & alive).count("1")
            if deg < best_deg:
                best_v, best_deg = v, deg
            rest ^= low
        count += 1
        alive &= ~(adj[best_v] | (1 << best_v))
    return count


# ---------------------------------------------------------------------------
# degeneracy
# ---------------------------------------------------------------------------


def degeneracy(g: Digraph) -> int:
    """Degeneracy of the underlying undirected graph via min-degree peeling."""
    n = g.n
    if n == 0:
        return 0
    adj = g.undirected_masks()
    alive = (1 << n) - 1
    deg = [bin(adj[v]).count("1") for v in range(n)]
    result = 0
    for _ in range(n):
        best_v, best_deg = -1, n + 1
        rest = alive
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            if deg[v] < best_deg:
                best_v, best_deg = v, deg[v]
            rest ^= low
        result = max(result, best_deg)
        alive &= ~(1 << best_v)
        nbrs = adj[best_v] & alive
        while nbrs:
            low = nbrs & -nbrs
            deg[low.bit_length() - 1] -= 1
            nbrs ^= low
    return result


# ---------------------------------------------------------------------------
# minimum chain cover
# ---------------------------------------------------------------------------


def _chain_order_masks(g: Digraph) -> list[int]:
    """Rows of the chain order: the transitive closure with in-component arcs
    restricted to increasing node id.

    A chain visits each strongly connected component contiguously and may
    order nodes inside a component arbitrarily, so fixing the in-component
    order by node id turns minimum chain cover into minimum path cover of a
    transitively closed DAG.
    """
    reach = reachability_masks(g)
    ids = scc_ids(g)
    rows = [0] * g.n
    for u in range(g.n):
        row = reach[u] & ~(1 << u)
        keep = 0
        r = row
        while r:
            low = r & -r
            v = low.bit_length() - 1
            if ids[u] != ids[v] or u < v:
                keep |= low
            r ^= low
        rows[u] = keep
    return rows


def chain_cover_minimum(g: Digraph) -> ChainCover:
    """A minimum chain cover (Dilworth route: path cover by bipartite matching)."""
    n = g.n
    rows = _chain_order_masks(g)
    match_right = [-1] * n  # right node -> left node
    match_left = [-1] * n

    def try_augment(u: int, visited: list[bool]) -> bool:
        row = rows[u]
        while row:
            low = row & -row
            v = low.bit_length() - 1
            row ^= low
            if visited[v]:
                continue
            visited[v] = True
            if match_right[v] == -1 or try_augment(match_right[v], visited):
                match_right[v] = u
                match_left[u] = v
                return True
        return False

    for u in range(n):
        try_augment(u, [False] * n)

    heads = [v for v in range(n) if match_right[v] == -1]
    chains = []
    for h in heads:
        chain = [h]
        while match_left[chain[-1]] != -1:
            chain.append(match_left[chain[-1]])
        chains.append(tuple(chain))
    return ChainCover(tuple(sorted(chains)))


# ---------------------------------------------------------------------------
# branchings
# ---------------------------------------------------------------------------


def grow_branching(g: Digraph, root: int, kind: str) -> Branching:
    """BFS spanning branching with lowest-node-id tie-breaking.

    ``kind='out'`` spans away from the root along arcs; ``kind='in'`` spans
    toward it.  Raises :class:`CoverageError` naming a missing node when the
    root does not cover the graph.
    """
    if kind not in ("out", "in"):
        raise ValueError(f"kind must be 'out' or 'in', got {kind!r}")
    if not 0 <= root < g.n:
        raise ValueError(f"root {root} out of range for n={g.n}")
    step = g.out_neighbors if kind == "out" else g.in_neighbors
    parent = {root: root}
    queue = deque([root])
    order = []
    while queue:
        u = queue.popleft()
        order.append(u)
        for v in step(u):
            if v not in parent:
                parent[v] = u
                queue.append(v)
    if len(parent) != g.n:
        missing = min(v for v in range(g.n) if v not in parent)
        raise CoverageError(missing, root, kind)
    arcs = set()
    for v, u in parent.items():
        if v == root:
            continue
        arcs.add((u, v) if kind == "out" else (v, u))
    return Branching(root, frozenset(arcs), kind)

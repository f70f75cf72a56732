"""Brute-force ground truth: exact local connectivities and certificate checks.

Everything here favours exactness over scale.  Connectivities come from
unit-capacity max-flow with BFS augmentation; the node version splits each
internal node into an in/out pair joined by a unit arc, so a direct (s,t) arc
contributes exactly one extra path.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .certify_one import Certificate
from .digraph import BudgetError, Digraph, reachability_masks


@dataclass(frozen=True)
class ConnReport:
    """Exact local connectivity of one ordered pair."""

    s: int
    t: int
    kappa: int
    lambda_: int


class _FlowNet:
    """Residual network with integer capacities and BFS augmenting paths."""

    def __init__(self, n: int):
        self.incident: list[list[int]] = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add(self, u: int, v: int, cap: int) -> None:
        self.incident[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(cap)
        self.incident[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0)

    def max_flow(self, s: int, t: int, limit: int | None = None) -> int:
        flow = 0
        n = len(self.incident)
        while limit is None or flow < limit:
            parent = [-1] * n
            parent[s] = -2
            queue = deque([s])
            while queue and parent[t] == -1:
                u = queue.popleft()
                for ei in self.incident[u]:
                    w = self.to[ei]
                    if self.cap[ei] > 0 and parent[w] == -1:
                        parent[w] = ei
                        queue.append(w)
            if parent[t] == -1:
                break
            bottleneck = None
            v = t
            while v != s:
                ei = parent[v]
                if bottleneck is None or self.cap[ei] < bottleneck:
                    bottleneck = self.cap[ei]
                v = self.to[ei ^ 1]
            v = t
            while v != s:
                ei = parent[v]
                self.cap[ei] -= bottleneck
                self.cap[ei ^ 1] += bottleneck
                v = self.to[ei ^ 1]
            flow += bottleneck
        return flow


def lambda_st(g: Digraph, s: int, t: int, limit: int | None = None) -> int:
    """Maximum number of pairwise arc-disjoint s->t paths."""
    if s == t:
        raise ValueError("lambda_st requires s != t")
    if not (0 <= s < g.n and 0 <= t < g.n):
        raise ValueError(f"pair ({s},{t}) out of range for n={g.n}")
    net = _FlowNet(g.n)
    for u, v in g.arcs:
        net.add(u, v, 1)
    return net.max_flow(s, t, limit)


def kappa_st(g: Digraph, s: int, t: int, limit: int | None = None) -> int:
    """Maximum number of internally node-disjoint s->t paths.

    Node splitting: node v becomes (2v -> 2v+1) with unit capacity for
    v not in {s, t}; arc (u, v) becomes (2u+1 -> 2v) with unit capacity.
    The direct arc (s, t), if present, is simply one more unit path.
    """
    if s == t:
        raise ValueError("kappa_st requires s != t")
    if not (0 <= s < g.n and 0 <= t < g.n):
        raise ValueError(f"pair ({s},{t}) out of range for n={g.n}")
    net = _FlowNet(2 * g.n)
    big = g.n + 1
    for v in range(g.n):
        net.add(2 * v, 2 * v + 1, 1 if v not in (s, t) else big)
    for u, v in g.arcs:
        net.add(2 * u + 1, 2 * v, 1)
    return net.max_flow(2 * s + 1, 2 * t, limit)


def connectivity(g: Digraph, s: int, t: int) -> ConnReport:
    return ConnReport(s, t, kappa_st(g, s, t), lambda_st(g, s, t))


# ---------------------------------------------------------------------------
# certificate validation
# ---------------------------------------------------------------------------

_VALIDATE_BUDGET = 64


@dataclass(frozen=True)
class CertValidationReport:
    kind: str
    k: int
    contained: bool
    violations: tuple[tuple[int, int, int, int], ...]  # (s, t, required, got)

    @property
    def ok(self) -> bool:
        return self.contained and not self.violations


def validate_certificate(g: Digraph, cert: Certificate) -> CertValidationReport:
    """All-pairs check of min{k, conn(G)} <= conn(cert) for the cert's kind.

    For each pair the certificate side is evaluated first with the flow capped
    at k; the input graph is only consulted when the cap is not reached, which
    keeps the oracle usable over whole acceptance suites.
    """
    if g.n > _VALIDATE_BUDGET:
        raise BudgetError(f"validate_certificate limited to n <= {_VALIDATE_BUDGET}, got {g.n}")
    if cert.base_n != g.n:
        raise ValueError(f"certificate is over {cert.base_n} nodes, graph has {g.n}")
    h = cert.graph()
    conn = kappa_st if cert.kind == "node" else lambda_st
    contained = cert.arcs <= g.arcs
    violations = []
    k = cert.k
    # pairs that are not even reachable in g need nothing; prune them cheaply
    reach_g = reachability_masks(g)
    for s in range(g.n):
        row = reach_g[s]
        for t in range(g.n):
            if s == t or not (row >> t) & 1:
                continue
            got = conn(h, s, t, limit=k)
            if got >= k:
                continue
            have_g = conn(g, s, t, limit=got + 1)
            if have_g > got:
                violations.append((s, t, min(k, have_g), got))
    return CertValidationReport(cert.kind, k, contained, tuple(violations))


# ---------------------------------------------------------------------------
# exhaustive inclusion-minimal certificates
# ---------------------------------------------------------------------------

_ENUM_BUDGET = 18


def minimal_certificates_exhaustive(g: Digraph, k: int) -> list[frozenset]:
    """All inclusion-minimal arc subsets that are k-node certificates of ``g``.

    Walks the monotone family of valid subsets downward from the full arc set;
    budgeted at 18 arcs.
    """
    if g.m > _ENUM_BUDGET:
        raise BudgetError(f"exhaustive enumeration limited to {_ENUM_BUDGET} arcs, got {g.m}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    arcs = sorted(g.arcs)
    m = len(arcs)
    req: list[tuple[int, int, int]] = []
    for s in range(g.n):
        for t in range(g.n):
            if s != t:
                need = min(k, kappa_st(g, s, t))
                if need > 0:
                    req.append((s, t, need))

    valid_cache: dict[int, bool] = {}

    def is_valid(mask: int) -> bool:
        cached = valid_cache.get(mask)
        if cached is not None:
            return cached
        sub = Digraph(g.n, (arcs[i] for i in range(m) if (mask >> i) & 1))
        ok = True
        reach = reachability_masks(sub)
        for s, t, need in req:
            if not (reach[s] >> t) & 1:
                ok = False
                break
            if need > 1 and kappa_st(sub, s, t, limit=need) < need:
                ok = False
                break
        valid_cache[mask] = ok
        return ok

    full = (1 << m) - 1
    minimal: set[int] = set()
    seen: set[int] = set()

    def walk(mask: int) -> None:
        if mask in seen:
            return
        seen.add(mask)
        shrinkable = False
        bits = mask
        while bits:
            low = bits & -bits
            bits ^= low
            child = mask ^ low
            if is_valid(child):
                shrinkable = True
                walk(child)
        if not shrinkable:
            minimal.add(mask)

    if not is_valid(full):  # pragma: no cover - the full graph is always valid
        raise AssertionError("full arc set failed its own certificate check")
    walk(full)
    return sorted(
        (frozenset(arcs[i] for i in range(m) if (mask >> i) & 1) for mask in minimal),
        key=lambda fs: (len(fs), sorted(fs)),
    )

"""Bipartite min-cost max-flow engine for forest mappings.

The matching graph has a source s, a sink t, the child subtrees of the two
forests as transit nodes, and (when the outdegrees differ) an extra node
theta on the smaller side that absorbs unmatched subtrees at their
insertion/deletion cost.  Everything is integer: unit edit costs make the
whole distance pipeline exact.

Solving is a primal network simplex on an explicit spanning-tree basis,
warm-startable from any feasible flow (problem A).  ``repair_insert`` and
``repair_delete`` restore feasibility after a right-side node appears or
disappears (problem B) without re-optimizing.
"""

from __future__ import annotations

S = 0
T = 1
THETA = 2
_FIRST_REAL = 3


class FlowError(RuntimeError):
    """Infeasible flow state where a feasible one was required."""


class MatchingGraph:
    """Bipartite matching network with integer flows, capacities and costs.

    ``left``/``right`` list the real (non-theta) transit node ids in column
    order.  ``edges`` maps (u, v) to a mutable [flow, capacity, cost]
    triple.  ``left_theta_cost``/``right_theta_cost`` keep the deletion and
    insertion costs of every real node so theta edges can be (re)created
    when the imbalance changes side.
    """

    __slots__ = (
        "left",
        "right",
        "theta_side",
        "edges",
        "left_theta_cost",
        "right_theta_cost",
        "supply",
        "_next_id",
        "pivots",
        "last_pivots",
        "last_flow_pivots",
        "basis_edges",
        "basis_pi",
    )

    def __init__(self):
        self.left: list[int] = []
        self.right: list[int] = []
        self.theta_side: str | None = None
        self.edges: dict[tuple[int, int], list[int]] = {}
        self.left_theta_cost: dict[int, int] = {}
        self.right_theta_cost: dict[int, int] = {}
        self.supply: int = 0
        self._next_id: int = _FIRST_REAL
        self.pivots: int = 0
        self.last_pivots: int = 0
        self.last_flow_pivots: int = 0
        # spanning-tree basis and node potentials of the last simplex
        # solve; None when no optimality certificate is available
        self.basis_edges: set[tuple[int, int]] | None = None
        self.basis_pi: dict[int, int] | None = None

    def new_node(self) -> int:
        n = self._next_id
        self._next_id += 1
        return n

    def add_edge(self, u: int, v: int, cap: int, cost: int, flow: int = 0) -> None:
        self.edges[(u, v)] = [flow, cap, cost]

    def flow_cost(self) -> int:
        return sum(e[0] * e[2] for e in self.edges.values())

    def zero_flows(self) -> None:
        for e in self.edges.values():
            e[0] = 0

    def dump(self) -> str:
        """Debug format: one edge per line 'u v f c cost'."""
        names = {S: "s", T: "t", THETA: "theta"}
        for pos, n in enumerate(self.left):
            names[n] = f"L{pos}"
        for pos, n in enumerate(self.right):
            names[n] = f"R{pos}"
        lines = []
        for (u, v), (f, c, g) in sorted(self.edges.items()):
            lines.append(f"{names[u]} {names[v]} {f} {c} {g}")
        return "\n".join(lines)


def build_graph(
    costs: list[list[int]],
    theta_costs_left: list[int],
    theta_costs_right: list[int],
) -> MatchingGraph:
    """Matching graph between a left forest (row costs) and a right forest.

    costs[i][j] is the subtree distance between left child i and right
    child j; theta_costs_left[i] = D(v_i, empty), theta_costs_right[j] =
    D(empty, w_j).  Initial flow is zero.
    """
    nl = len(theta_costs_left)
    nr = len(theta_costs_right)
    if len(costs) != nl or any(len(row) != nr for row in costs):
        raise ValueError(
            f"cost matrix does not match forest sizes {nl}x{nr}"
        )
    g = MatchingGraph()
    g.supply = max(nl, nr)
    for i in range(nl):
        n = g.new_node()
        g.left.append(n)
        g.left_theta_cost[n] = theta_costs_left[i]
        g.add_edge(S, n, 1, 0)
    for j in range(nr):
        n = g.new_node()
        g.right.append(n)
        g.right_theta_cost[n] = theta_costs_right[j]
        g.add_edge(n, T, 1, 0)
    for i, u in enumerate(g.left):
        for j, v in enumerate(g.right):
            g.add_edge(u, v, 1, costs[i][j])
    if nl > nr:
        _attach_theta_right(g, nl - nr)
    elif nr > nl:
        _attach_theta_left(g, nr - nl)
    return g


def _attach_theta_right(g: MatchingGraph, trunk: int) -> None:
    g.theta_side = "R"
    for u in g.left:
        g.add_edge(u, THETA, 1, g.left_theta_cost[u])
    g.add_edge(THETA, T, trunk, 0)


def _attach_theta_left(g: MatchingGraph, trunk: int) -> None:
    g.theta_side = "L"
    for v in g.right:
        g.add_edge(THETA, v, 1, g.right_theta_cost[v])
    g.add_edge(S, THETA, trunk, 0)


def _detach_theta(g: MatchingGraph) -> None:
    for key in [k for k in g.edges if THETA in k]:
        del g.edges[key]
    g.theta_side = None


def assert_feasible(g: MatchingGraph) -> str | None:
    """None if the stored flow is feasible, else the first violation."""
    for (u, v), (f, c, _) in g.edges.items():
        if not 0 <= f <= c:
            return f"capacity violated on edge ({u},{v}): flow {f}, capacity {c}"
    transit = list(g.left) + list(g.right)
    if g.theta_side is not None:
        transit.append(THETA)
    inflow = {n: 0 for n in transit}
    outflow = {n: 0 for n in transit}
    from_s = 0
    into_t = 0
    for (u, v), (f, _, _) in g.edges.items():
        if u == S:
            from_s += f
        if v == T:
            into_t += f
        if u in outflow:
            outflow[u] += f
        if v in inflow:
            inflow[v] += f
    for n in transit:
        if inflow[n] != outflow[n]:
            return f"conservation violated at node {n}: in {inflow[n]}, out {outflow[n]}"
    if from_s != g.supply:
        return f"supply not met: {from_s} leaves s, supply is {g.supply}"
    if into_t != g.supply:
        return f"demand not met: {into_t} enters t, demand is {g.supply}"
    return None


def solve(g: MatchingGraph, warm: bool = False, check: bool = True) -> int:
    """Optimize the stored flow; returns the minimum cost.

    With ``warm`` the current flow is the starting point (problem A) and
    must be feasible; otherwise the flow is rebuilt from scratch.  In both
    cases the result is a maximum flow of minimum cost.  ``g.last_pivots``
    counts the simplex pivots of this call and ``g.last_flow_pivots`` the
    subset that actually moved flow (the loops of the complexity bound;
    the rest are degenerate basis exchanges).  ``check=False`` skips the
    feasibility validation of a warm start (for callers that maintain
    feasibility by construction).
    """
    if warm and check:
        violation = assert_feasible(g)
        if violation is not None:
            raise FlowError(f"warm start requires a feasible flow: {violation}")
    g.last_pivots = 0
    g.last_flow_pivots = 0
    if len(g.left) <= 1 or len(g.right) <= 1:
        return _solve_direct(g)
    if not warm:
        _cold_start(g)
    pivots, flow_pivots = _network_simplex(g)
    g.last_pivots = pivots
    g.last_flow_pivots = flow_pivots
    g.pivots += pivots
    return g.flow_cost()


def _solve_direct(g: MatchingGraph) -> int:
    """Closed-form optimum when one side has at most one real node."""
    nl = len(g.left)
    nr = len(g.right)
    g.basis_edges = None
    g.zero_flows()
    e = g.edges
    if nl == 0 and nr == 0:
        return 0
    if nr == 0:
        total = 0
        for u in g.left:
            e[(S, u)][0] = 1
            e[(u, THETA)][0] = 1
            total += g.left_theta_cost[u]
        e[(THETA, T)][0] = nl
        return total
    if nl == 0:
        total = 0
        for v in g.right:
            e[(THETA, v)][0] = 1
            e[(v, T)][0] = 1
            total += g.right_theta_cost[v]
        e[(S, THETA)][0] = nr
        return total
    if nr == 1:
        v = g.right[0]
        ltc = g.left_theta_cost
        best = min(g.left, key=lambda u: (e[(u, v)][2] - ltc[u], u))
        total = e[(best, v)][2]
        for u in g.left:
            e[(S, u)][0] = 1
            if u == best:
                e[(u, v)][0] = 1
            else:
                e[(u, THETA)][0] = 1
                total += ltc[u]
        e[(v, T)][0] = 1
        if nl > 1:
            e[(THETA, T)][0] = nl - 1
        return total
    # nl == 1, nr >= 2
    u = g.left[0]
    rtc = g.right_theta_cost
    best = min(g.right, key=lambda v: (e[(u, v)][2] - rtc[v], v))
    total = e[(u, best)][2]
    e[(S, u)][0] = 1
    e[(S, THETA)][0] = nr - 1
    for v in g.right:
        e[(v, T)][0] = 1
        if v == best:
            e[(u, v)][0] = 1
        else:
            e[(THETA, v)][0] = 1
            total += rtc[v]
    return total


def _cold_start(g: MatchingGraph) -> None:
    """Any maximum flow: pair columns off positionally, theta absorbs the rest."""
    g.zero_flows()
    e = g.edges
    nl = len(g.left)
    nr = len(g.right)
    for u in g.left:
        e[(S, u)][0] = 1
    for v in g.right:
        e[(v, T)][0] = 1
    for u, v in zip(g.left, g.right):
        e[(u, v)][0] = 1
    if nl > nr:
        for u in g.left[nr:]:
            e[(u, THETA)][0] = 1
        e[(THETA, T)][0] = nl - nr
    elif nr > nl:
        for v in g.right[nl:]:
            e[(THETA, v)][0] = 1
        e[(S, THETA)][0] = nr - nl


def repair_insert(g: MatchingGraph, column: list[int], theta_cost: int) -> int:
    """Add a right-side node (problem B, insertion case) and restore a
    feasible flow from the previous one.  Returns the new node's id.

    column[i] is the cost toward left column i; theta_cost is the new
    node's insertion cost D(empty, subtree).
    """
    nl = len(g.left)
    nr = len(g.right)
    if len(column) != nl:
        raise ValueError(f"cost column has {len(column)} entries, expected {nl}")
    imbalance = nl - nr
    g.basis_edges = None
    nk = g.new_node()
    g.right.append(nk)
    g.right_theta_cost[nk] = theta_cost
    for i, u in enumerate(g.left):
        g.add_edge(u, nk, 1, column[i])
    g.add_edge(nk, T, 1, 0, flow=1)
    if imbalance > 0:
        # theta sits on the right: shrink its trunk and hand one of its
        # units over to the new node, preferring the largest saving.
        trunk = g.edges[(THETA, T)]
        trunk[0] -= 1
        trunk[1] -= 1
        best = None
        best_gain = None
        for i, u in enumerate(g.left):
            if g.edges[(u, THETA)][0] == 1:
                gain = g.left_theta_cost[u] - column[i]
                if best is None or gain > best_gain:
                    best, best_gain = u, gain
        g.edges[(best, THETA)][0] = 0
        g.edges[(best, nk)][0] = 1
        if trunk[1] == 0:
            _detach_theta(g)
    else:
        if imbalance == 0:
            # balanced before: theta appears on the left, zero-flow edges first
            _attach_theta_left(g, 0)
        else:
            g.add_edge(THETA, nk, 1, theta_cost)
        trunk = g.edges[(S, THETA)]
        trunk[0] += 1
        trunk[1] += 1
        g.supply += 1
        g.edges[(THETA, nk)][0] = 1
    return nk


def repair_delete(g: MatchingGraph, nk: int) -> None:
    """Remove right-side node nk (problem B, deletion case) and restore a
    feasible flow from the previous one."""
    if nk not in g.right:
        raise ValueError(f"node {nk} is not a right-side node")
    if g.edges[(nk, T)][0] != 1:
        raise FlowError(f"node {nk} carries no flow; nothing to repair")
    feeder = None
    candidates = list(g.left) + ([THETA] if g.theta_side == "L" else [])
    for u in candidates:
        if g.edges[(u, nk)][0] == 1:
            feeder = u
            break
    if feeder is None:
        raise FlowError(f"node {nk} has no saturated incoming edge")
    g.basis_edges = None
    nl = len(g.left)
    imbalance = nl - (len(g.right) - 1)  # after removal
    g.right.remove(nk)
    del g.right_theta_cost[nk]
    for key in [k for k in g.edges if nk in k]:
        del g.edges[key]
    if imbalance > 0:
        if g.theta_side is None:
            # was balanced: theta appears on the right, zero-flow edges first
            _attach_theta_right(g, 0)
        trunk = g.edges[(THETA, T)]
        trunk[0] += 1
        trunk[1] += 1
        g.edges[(feeder, THETA)][0] = 1
    else:
        trunk = g.edges[(S, THETA)]
        trunk[0] -= 1
        trunk[1] -= 1
        g.supply -= 1
        if feeder != THETA:
            # theta yields one of its assignments to the orphaned left node
            best = None
            best_gain = None
            for v in g.right:
                if g.edges[(THETA, v)][0] == 1:
                    gain = g.right_theta_cost[v] - g.edges[(feeder, v)][2]
                    if best is None or gain > best_gain:
                        best, best_gain = v, gain
            g.edges[(THETA, best)][0] = 0
            g.edges[(feeder, best)][0] = 1
        if trunk[1] == 0:
            _detach_theta(g)


def update_right_cost(g: MatchingGraph, node: int, column: list[int], theta_cost: int) -> None:
    """Replace the cost column of an existing right node (problem A setup)."""
    for i, u in enumerate(g.left):
        g.edges[(u, node)][2] = column[i]
    g.right_theta_cost[node] = theta_cost
    if g.theta_side == "L":
        g.edges[(THETA, node)][2] = theta_cost


def reprice_right(
    g: MatchingGraph, node: int, column: list[int], theta_cost: int, old_cost: int
) -> int | None:
    """Update a right node's cost column and return the new mapping optimum
    without pivoting, when that is possible.

    One-sided graphs get their closed-form optimum (the stored flow stays
    feasible but is not rewritten).  General graphs are re-certified
    against the basis of the previous solve: potentials only move when a
    basis arc's cost changed, otherwise just the touched arcs are
    re-checked (below-capacity arcs need nonnegative reduced cost,
    saturated ones nonpositive).  Returns None after writing the new costs
    when optimality cannot be certified; the caller then re-solves.
    """
    edges = g.edges
    nl = len(g.left)
    nr = len(g.right)
    if nl <= 1 or nr <= 1:
        for i, u in enumerate(g.left):
            edges[(u, node)][2] = column[i]
        g.right_theta_cost[node] = theta_cost
        if g.theta_side == "L":
            edges[(THETA, node)][2] = theta_cost
        if nl == 0:
            return sum(g.right_theta_cost.values())
        if nr == 0:
            return sum(g.left_theta_cost.values())
        if nr == 1:
            ltc = g.left_theta_cost
            total = sum(ltc.values())
            return total + min(edges[(u, node)][2] - ltc[u] for u in g.left)
        u = g.left[0]
        rtc = g.right_theta_cost
        total = sum(rtc.values())
        return total + min(edges[(u, v)][2] - rtc[v] for v in g.right)
    basis = g.basis_edges
    new_cost = old_cost
    changed: list[tuple[int, int]] = []
    basis_changed = False
    for i, u in enumerate(g.left):
        key = (u, node)
        arc = edges[key]
        delta = column[i] - arc[2]
        if delta:
            arc[2] = column[i]
            new_cost += delta * arc[0]
            changed.append(key)
            if basis is not None and key in basis:
                basis_changed = True
    g.right_theta_cost[node] = theta_cost
    if g.theta_side == "L":
        key = (THETA, node)
        arc = edges[key]
        delta = theta_cost - arc[2]
        if delta:
            arc[2] = theta_cost
            new_cost += delta * arc[0]
            changed.append(key)
            if basis is not None and key in basis:
                basis_changed = True
    if not changed:
        return old_cost
    if basis is None:
        return None
    if basis_changed:
        # rebuild the potentials over the (unchanged) spanning tree
        children: dict[int, list] = {}
        for key in basis:
            u, v = key
            children.setdefault(u, []).append((v, 1, key))
            children.setdefault(v, []).append((u, -1, key))
        pi = {S: 0}
        stack = [S]
        while stack:
            x = stack.pop()
            for y, sign, key in children.get(x, ()):
                if y not in pi:
                    pi[y] = pi[x] + sign * edges[key][2]
                    stack.append(y)
        g.basis_pi = pi
        scan = edges.items()
    else:
        pi = g.basis_pi
        scan = [(key, edges[key]) for key in changed]
    for key, arc in scan:
        if key in basis:
            continue
        rc = arc[2] + pi[key[0]] - pi[key[1]]
        f = arc[0]
        if f == 0:
            if rc < 0:
                return None
        elif f == arc[1]:
            if rc > 0:
                return None
        elif rc != 0:
            return None
    return new_cost


def _network_simplex(g: MatchingGraph) -> int:
    """Primal network simplex from the stored feasible flow.

    The basis is an explicit spanning tree rooted at s, kept strongly
    feasible (upward arcs below capacity, downward arcs carrying flow), so
    choosing the last blocking arc around the pivot cycle prevents cycling.
    Entering arcs are scanned round-robin from the previous entry point.
    """
    nodes = [S, T] + g.left + g.right + ([THETA] if g.theta_side else [])
    index = {n: i for i, n in enumerate(nodes)}
    nn = len(nodes)
    items = list(g.edges.items())
    ne = len(items)
    eu = [0] * ne
    ev = [0] * ne
    triples = [None] * ne
    flow = [0] * ne
    cap = [0] * ne
    cost = [0] * ne
    for e, ((u, v), triple) in enumerate(items):
        eu[e] = index[u]
        ev[e] = index[v]
        triples[e] = triple
        flow[e] = triple[0]
        cap[e] = triple[1]
        cost[e] = triple[2]

    in_basis = _feeder_basis(g, index, nn, ne, eu, ev, flow)

    parent = [-1] * nn
    parent_edge = [-1] * nn
    depth = [0] * nn
    pi = [0] * nn

    def rebuild_tree() -> None:
        children: list[list[tuple[int, int]]] = [[] for _ in range(nn)]
        for e in range(ne):
            if in_basis[e]:
                children[eu[e]].append((ev[e], e))
                children[ev[e]].append((eu[e], e))
        seen = [False] * nn
        seen[0] = True
        parent[0] = -1
        parent_edge[0] = -1
        depth[0] = 0
        pi[0] = 0
        stack = [0]
        while stack:
            x = stack.pop()
            for y, e in children[x]:
                if seen[y]:
                    continue
                seen[y] = True
                parent[y] = x
                parent_edge[y] = e
                depth[y] = depth[x] + 1
                pi[y] = pi[x] + cost[e] if eu[e] == x else pi[x] - cost[e]
                stack.append(y)

    rebuild_tree()

    pivots = 0
    flow_pivots = 0
    scan_from = 0
    while True:
        entering = -1
        forward = True
        for off in range(ne):
            e = (scan_from + off) % ne
            if in_basis[e]:
                continue
            rc = cost[e] + pi[eu[e]] - pi[ev[e]]
            if flow[e] == 0 and rc < 0:
                entering, forward = e, True
                break
            if flow[e] == cap[e] and rc > 0:
                entering, forward = e, False
                break
        if entering == -1:
            break
        scan_from = entering + 1
        pivots += 1

        # pivot cycle ordered from the apex: apex -> x, entering arc x -> y,
        # then y -> apex.  Each element is (edge, pushed along its direction).
        x, y = (eu[entering], ev[entering]) if forward else (ev[entering], eu[entering])
        up_x: list[int] = []
        up_y: list[int] = []
        a, b = x, y
        while depth[a] > depth[b]:
            up_x.append(a)
            a = parent[a]
        while depth[b] > depth[a]:
            up_y.append(b)
            b = parent[b]
        while a != b:
            up_x.append(a)
            up_y.append(b)
            a = parent[a]
            b = parent[b]
        cycle: list[tuple[int, bool]] = []
        for node in reversed(up_x):  # descending steps parent -> child
            e = parent_edge[node]
            cycle.append((e, eu[e] == parent[node]))
        cycle.append((entering, forward))
        for node in up_y:  # ascending steps child -> parent
            e = parent_edge[node]
            cycle.append((e, ev[e] == parent[node]))

        delta = None
        for e, along in cycle:
            residual = cap[e] - flow[e] if along else flow[e]
            if delta is None or residual < delta:
                delta = residual
        leaving = entering
        for e, along in cycle:
            residual = cap[e] - flow[e] if along else flow[e]
            if residual == delta:
                leaving = e
        if delta:
            flow_pivots += 1
            for e, along in cycle:
                flow[e] += delta if along else -delta
        if leaving != entering:
            in_basis[entering] = True
            in_basis[leaving] = False
            rebuild_tree()

    for e in range(ne):
        triples[e][0] = flow[e]
    g.basis_edges = {items[e][0] for e in range(ne) if in_basis[e]}
    g.basis_pi = {nodes[i]: pi[i] for i in range(nn)}
    return pivots, flow_pivots


def _feeder_basis(
    g: MatchingGraph, index: dict[int, int], nn: int, ne: int, eu, ev, flow
) -> list[bool]:
    """Strongly feasible spanning basis read off the flow structure.

    Any feasible flow on a matching graph is a maximum flow, so every
    source and sink arc is saturated and every right node is fed by exactly
    one arc: hanging each node below its feeder yields a spanning tree
    whose arcs all point away from the root s and carry positive flow.
    """
    in_basis = [False] * ne
    has_parent = [False] * nn
    has_parent[0] = True
    remaining = nn - 1
    for e in range(ne):
        if flow[e] == 0:
            continue
        child = ev[e]
        # t and a right-side theta carry several saturated in-arcs: keep the first
        if not has_parent[child]:
            in_basis[e] = True
            has_parent[child] = True
            remaining -= 1
    if remaining:
        raise FlowError("infeasible flow: some node carries no flow to hang from")
    return in_basis

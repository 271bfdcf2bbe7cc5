"""
Transshipment Linear Program Module

Solves the per-scenario transshipment income problem exactly: given the
per-unit route profit h_i + p_j - tau_ij, the surplus left at each location and
the shortage left at each location after demand is observed, choose the
shipped quantities T_ij that maximize total income.

    K = max sum_ij profit_ij * T_ij
        s.t. sum_j T_ij <= surplus_i     (nothing ships that is not on hand)
             sum_i T_ij <= shortage_j    (nothing ships that is not needed)
             T_ij >= 0

SOLVER:
The problem has transportation structure. Locations with surplus become
supply rows, locations with shortage become demand columns. A dummy row
absorbs unmet shortage and a dummy column absorbs unshipped surplus, which
balances the problem and yields an obvious starting tree (everything ships to
or from the dummies). The primal network simplex then pivots on the spanning
tree of the bipartite graph:

1. Duals u_row + v_col = profit on every tree edge (dummy row fixed at 0).
2. Entering edge: lowest-index non-tree edge with positive reduced profit.
3. Leaving edge: lowest-index edge among the decreasing edges of the cycle
   that hit zero first.

Using the lowest index on both sides is Bland's rule, so degenerate pivots
cannot cycle and the returned plan is deterministic. Routes with profit <= 0
are dropped before solving; some optimal plan never uses them.

TWO LOCATIONS:
With n = 2 the two routes 1->2 and 2->1 share no row or column constraint,
so each ships min(surplus, shortage) when profitable. solve_two_location_batch
evaluates that closed form for whole scenario arrays at once.

ORACLE:
brute_force_transshipment enumerates every vertex of the feasible polytope by
walking all spanning forests of the surplus/shortage graph. It is exponential
and guarded to n <= 4; tests use it to certify the simplex.
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from config import Config
from utils.logger import get_logger
from utils.validators import ValidationError, validate_nonnegative_vector

logger = get_logger(__name__)


class TransshipmentError(RuntimeError):
    """Internal solver failure; never expected for valid inputs."""
    pass


@dataclass(frozen=True, eq=False)
class TransshipmentPlan:
    """
    Shipped quantities and the income they earn.

    Attributes:
        quantities: n x n matrix, quantities[i, j] = units shipped from i to j
        objective_value: total income K of the plan
    """
    quantities: np.ndarray
    objective_value: float

    @classmethod
    def zero(cls, n: int) -> "TransshipmentPlan":
        return cls(quantities=np.zeros((n, n)), objective_value=0.0)

    @property
    def total_shipped(self) -> float:
        return float(self.quantities.sum())

    def lead_time(self, lead_matrix: np.ndarray) -> float:
        """Aggregate lead time sum_ij T_ij * L_ij."""
        return float(np.sum(self.quantities * lead_matrix))


def _prepare_inputs(profit, surplus, shortage) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    surplus = validate_nonnegative_vector(surplus, name="surplus")
    shortage = validate_nonnegative_vector(shortage, name="shortage", length=surplus.size)

    profit = np.array(profit, dtype=float)
    n = surplus.size
    if profit.shape != (n, n):
        raise ValidationError(f"profit must be {n}x{n}, got shape {profit.shape}")
    if not np.all(np.isfinite(profit)):
        raise ValidationError("profit entries must be finite")

    return profit, surplus, shortage


def _plan_value(profit: np.ndarray, quantities: np.ndarray) -> float:
    rows, cols = np.nonzero(quantities)
    return math.fsum(profit[i, j] * quantities[i, j] for i, j in zip(rows, cols))


def solve_transshipment(
    profit,
    surplus,
    shortage,
    tol: float = Config.TOLERANCE,
    max_pivots: int = Config.MAX_SIMPLEX_PIVOTS,
) -> TransshipmentPlan:
    """
    Solve the transshipment income LP with the transportation network simplex.

    Args:
        profit: n x n per-unit route profit (may be negative); diagonal ignored
        surplus: length-n surplus per location (>= 0)
        shortage: length-n shortage per location (>= 0)
        tol: reduced-profit threshold for entering edges
        max_pivots: iteration guard

    Returns:
        An optimal TransshipmentPlan

    Raises:
        ValidationError: On malformed inputs
        TransshipmentError: If the pivot guard is exceeded
    """
    profit, surplus, shortage = _prepare_inputs(profit, surplus, shortage)
    n = surplus.size

    sources = [i for i in range(n) if surplus[i] > 0]
    sinks = [j for j in range(n) if shortage[j] > 0]
    routes = [(i, j) for i in sources for j in sinks if i != j and profit[i, j] > 0]

    if not routes:
        return TransshipmentPlan.zero(n)

    flows = _network_simplex(profit, surplus, shortage, sources, sinks, routes, tol, max_pivots)

    quantities = np.zeros((n, n))
    for (i, j), flow in zip(routes, flows):
        quantities[i, j] = flow

    return TransshipmentPlan(quantities=quantities, objective_value=_plan_value(profit, quantities))


def _network_simplex(
    profit: np.ndarray,
    surplus: np.ndarray,
    shortage: np.ndarray,
    sources: List[int],
    sinks: List[int],
    routes: List[Tuple[int, int]],
    tol: float,
    max_pivots: int,
) -> List[float]:
    """Return the optimal flow on each route, in route order."""
    n_rows, n_cols = len(sources), len(sinks)
    dummy_row, dummy_col = n_rows, n_cols
    row_of = {loc: r for r, loc in enumerate(sources)}
    col_of = {loc: c for c, loc in enumerate(sinks)}

    # Edge list: real routes first, then the slack edges of the starting tree
    edge_row: List[int] = []
    edge_col: List[int] = []
    edge_profit: List[float] = []
    for i, j in routes:
        edge_row.append(row_of[i])
        edge_col.append(col_of[j])
        edge_profit.append(float(profit[i, j]))
    n_routes = len(routes)

    flow: List[float] = [0.0] * n_routes
    basis = set()
    for r, loc in enumerate(sources):
        edge_row.append(r)
        edge_col.append(dummy_col)
        edge_profit.append(0.0)
        flow.append(float(surplus[loc]))
        basis.add(len(flow) - 1)
    for c, loc in enumerate(sinks):
        edge_row.append(dummy_row)
        edge_col.append(c)
        edge_profit.append(0.0)
        flow.append(float(shortage[loc]))
        basis.add(len(flow) - 1)
    edge_row.append(dummy_row)
    edge_col.append(dummy_col)
    edge_profit.append(0.0)
    flow.append(0.0)
    basis.add(len(flow) - 1)

    n_edges = len(flow)
    # Node ids: rows 0..n_rows, columns offset by n_rows + 1
    col_offset = n_rows + 1
    n_nodes = n_rows + 1 + n_cols + 1

    for pivot in range(max_pivots):
        adjacency: List[List[Tuple[int, int]]] = [[] for _ in range(n_nodes)]
        for e in basis:
            a, b = edge_row[e], col_offset + edge_col[e]
            adjacency[a].append((b, e))
            adjacency[b].append((a, e))

        potential = _tree_potentials(adjacency, dummy_row, col_offset, edge_profit, n_nodes)

        entering: Optional[int] = None
        for e in range(n_edges):
            if e in basis:
                continue
            reduced = edge_profit[e] - potential[edge_row[e]] - potential[col_offset + edge_col[e]]
            if reduced > tol:
                entering = e
                break

        if entering is None:
            logger.debug(f"network simplex optimal after {pivot} pivots")
            return flow[:n_routes]

        path = _tree_path(adjacency, col_offset + edge_col[entering], edge_row[entering], n_nodes)

        # Edges on the path alternate: the one touching the entering column decreases
        decreasing = path[0::2]
        increasing = path[1::2]
        theta = min(flow[e] for e in decreasing)
        leaving = min(e for e in decreasing if flow[e] == theta)

        flow[entering] = theta
        for e in increasing:
            flow[e] += theta
        for e in decreasing:
            flow[e] -= theta
        flow[leaving] = 0.0

        basis.discard(leaving)
        basis.add(entering)

    raise TransshipmentError(f"network simplex exceeded {max_pivots} pivots")


def _tree_potentials(
    adjacency: List[List[Tuple[int, int]]],
    root: int,
    col_offset: int,
    edge_profit: List[float],
    n_nodes: int,
) -> List[float]:
    potential = [0.0] * n_nodes
    seen = [False] * n_nodes
    seen[root] = True
    stack = [root]
    while stack:
        node = stack.pop()
        for nbr, e in adjacency[node]:
            if not seen[nbr]:
                # u_row + v_col = profit on every tree edge
                potential[nbr] = edge_profit[e] - potential[node]
                seen[nbr] = True
                stack.append(nbr)
    if not all(seen):
        raise TransshipmentError("basis is not a spanning tree")
    return potential


def _tree_path(
    adjacency: List[List[Tuple[int, int]]],
    start: int,
    target: int,
    n_nodes: int,
) -> List[int]:
    """Edges of the tree path from start to target, ordered from start."""
    parent: List[Optional[Tuple[int, int]]] = [None] * n_nodes
    seen = [False] * n_nodes
    seen[start] = True
    stack = [start]
    while stack:
        node = stack.pop()
        if node == target:
            break
        for nbr, e in adjacency[node]:
            if not seen[nbr]:
                seen[nbr] = True
                parent[nbr] = (node, e)
                stack.append(nbr)

    if not seen[target]:
        raise TransshipmentError("entering edge endpoints are disconnected in the basis")

    edges = []
    node = target
    while node != start:
        prev, e = parent[node]
        edges.append(e)
        node = prev
    edges.reverse()
    return edges


def solve_two_location_batch(profit, surplus: np.ndarray, shortage: np.ndarray) -> np.ndarray:
    """
    Closed-form optimal plans for many two-location scenarios at once.

    Args:
        profit: 2 x 2 route profit matrix
        surplus: (N, 2) surplus per scenario
        shortage: (N, 2) shortage per scenario

    Returns:
        (N, 2, 2) array of shipped quantities
    """
    profit = np.asarray(profit, dtype=float)
    surplus = np.asarray(surplus, dtype=float)
    shortage = np.asarray(shortage, dtype=float)
    if profit.shape != (2, 2) or surplus.ndim != 2 or surplus.shape[1] != 2 or surplus.shape != shortage.shape:
        raise ValidationError("two-location batch expects a 2x2 profit and (N, 2) surplus/shortage")

    quantities = np.zeros((surplus.shape[0], 2, 2))
    if profit[0, 1] > 0:
        quantities[:, 0, 1] = np.minimum(surplus[:, 0], shortage[:, 1])
    if profit[1, 0] > 0:
        quantities[:, 1, 0] = np.minimum(surplus[:, 1], shortage[:, 0])
    return quantities


def brute_force_transshipment(profit, surplus, shortage, tol: float = Config.TOLERANCE) -> TransshipmentPlan:
    """
    Reference solution by enumerating every vertex of the feasible polytope.

    A vertex ships only along a forest of the surplus/shortage graph, and in
    each tree of that forest at most one location keeps unused capacity.
    Every forest and every choice of that location is tried.

    Raises:
        ValidationError: If more than Config.BRUTE_FORCE_MAX_LOCATIONS locations
    """
    profit, surplus, shortage = _prepare_inputs(profit, surplus, shortage)
    n = surplus.size
    if n > Config.BRUTE_FORCE_MAX_LOCATIONS:
        raise ValidationError(
            f"brute force is limited to {Config.BRUTE_FORCE_MAX_LOCATIONS} locations, got {n}"
        )

    sources = [i for i in range(n) if surplus[i] > 0]
    sinks = [j for j in range(n) if shortage[j] > 0]
    edges = [(i, j) for i in sources for j in sinks if i != j]

    capacity: Dict[Tuple[str, int], float] = {}
    for i in sources:
        capacity[("s", i)] = float(surplus[i])
    for j in sinks:
        capacity[("d", j)] = float(shortage[j])

    best_value = 0.0
    best_flows: Dict[Tuple[int, int], float] = {}

    for mask in range(1, 1 << len(edges)):
        chosen = [edges[k] for k in range(len(edges)) if (mask >> k) & 1]
        components = _forest_components(chosen)
        if components is None:
            continue

        total = 0.0
        flows: Dict[Tuple[int, int], float] = {}
        feasible = True
        for nodes, comp_edges in components:
            best_comp = None
            for root in nodes:
                comp_flows = _peel_tree(nodes, comp_edges, root, capacity, tol)
                if comp_flows is None:
                    continue
                value = math.fsum(profit[i, j] * f for (i, j), f in comp_flows.items())
                if best_comp is None or value > best_comp[0]:
                    best_comp = (value, comp_flows)
            if best_comp is None:
                feasible = False
                break
            total += best_comp[0]
            flows.update(best_comp[1])

        if feasible and total > best_value:
            best_value = total
            best_flows = flows

    quantities = np.zeros((n, n))
    for (i, j), f in best_flows.items():
        quantities[i, j] = max(f, 0.0)
    return TransshipmentPlan(quantities=quantities, objective_value=_plan_value(profit, quantities))


def _forest_components(edges: List[Tuple[int, int]]):
    """Split an edge set into trees; None if it contains a cycle."""
    parent: Dict[Tuple[str, int], Tuple[str, int]] = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in edges:
        for node in (("s", i), ("d", j)):
            parent.setdefault(node, node)
        a, b = find(("s", i)), find(("d", j))
        if a == b:
            return None
        parent[a] = b

    groups: Dict[Tuple[str, int], Tuple[List, List]] = {}
    for node in sorted(parent):
        groups.setdefault(find(node), ([], []))[0].append(node)
    for i, j in edges:
        groups[find(("s", i))][1].append((i, j))
    return list(groups.values())


def _peel_tree(nodes, edges, root, capacity, tol) -> Optional[Dict[Tuple[int, int], float]]:
    """Flows with every node except root saturated, or None if infeasible."""
    remaining = {node: capacity[node] for node in nodes}
    incident: Dict[Tuple[str, int], List[Tuple[int, int]]] = {node: [] for node in nodes}
    for i, j in edges:
        incident[("s", i)].append((i, j))
        incident[("d", j)].append((i, j))

    flows: Dict[Tuple[int, int], float] = {}
    open_edges = set(edges)
    while open_edges:
        leaf = next(
            node for node in nodes
            if node != root and sum(1 for e in incident[node] if e in open_edges) == 1
        )
        edge = next(e for e in incident[leaf] if e in open_edges)
        amount = remaining[leaf]
        if amount < -tol:
            return None
        other = ("d", edge[1]) if leaf[0] == "s" else ("s", edge[0])
        flows[edge] = amount
        remaining[leaf] = 0.0
        remaining[other] -= amount
        open_edges.discard(edge)

    if remaining[root] < -tol:
        return None
    return flows


def check_feasible(plan: TransshipmentPlan, surplus, shortage, tol: float = Config.TOLERANCE) -> bool:
    """
    True iff the plan ships nonnegative quantities within surplus and shortage.
    """
    quantities = np.asarray(plan.quantities, dtype=float)
    surplus = np.asarray(surplus, dtype=float)
    shortage = np.asarray(shortage, dtype=float)
    n = surplus.size
    if quantities.shape != (n, n) or shortage.shape != (n,):
        return False

    if np.any(quantities < -tol):
        return False
    if np.any(quantities.sum(axis=1) > surplus + tol):
        return False
    if np.any(quantities.sum(axis=0) > shortage + tol):
        return False
    return True

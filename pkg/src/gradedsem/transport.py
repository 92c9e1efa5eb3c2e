"""Transportation simplex (northwest-corner start, MODI pricing).

Solves ``min sum c_ij g_ij`` subject to row sums ``supply`` and column sums
``demand``. The basis is kept as a spanning tree over rows and columns, so
degenerate bases are handled by carrying zero-flow basic cells.
"""
from __future__ import annotations

from collections import deque

import numpy as np

from .errors import SolverError

MAX_PIVOTS = 100_000


def _northwest_corner(supply, demand):
    s, d = list(supply), list(demand)
    m, n = len(s), len(d)
    flow = {}
    i = j = 0
    while True:
        x = min(s[i], d[j])
        flow[(i, j)] = x
        s[i] -= x
        d[j] -= x
        if i == m - 1 and j == n - 1:
            break
        if (s[i] <= d[j] and i < m - 1) or j == n - 1:
            i += 1
        else:
            j += 1
    return flow


def _potentials(basis, cost, m, n):
    rows = [[] for _ in range(m)]
    cols = [[] for _ in range(n)]
    for i, j in basis:
        rows[i].append(j)
        cols[j].append(i)
    u = [None] * m
    v = [None] * n
    u[0] = 0.0
    queue = deque([("r", 0)])
    while queue:
        side, k = queue.popleft()
        if side == "r":
            for j in rows[k]:
                if v[j] is None:
                    v[j] = cost[k, j] - u[k]
                    queue.append(("c", j))
        else:
            for i in cols[k]:
                if u[i] is None:
                    u[i] = cost[i, k] - v[k]
                    queue.append(("r", i))
    if any(x is None for x in u) or any(x is None for x in v):
        raise SolverError("basis is not a spanning tree")
    return np.array(u), np.array(v), rows, cols


def _tree_path(rows, cols, start_col, goal_row):
    """Cells on the tree path from column ``start_col`` to row ``goal_row``."""
    prev = {("c", start_col): None}
    queue = deque([("c", start_col)])
    while queue:
        node = queue.popleft()
        if node == ("r", goal_row):
            break
        side, k = node
        nbrs = [("r", i) for i in cols[k]] if side == "c" else [("c", j) for j in rows[k]]
        for nb in nbrs:
            if nb not in prev:
                prev[nb] = node
                queue.append(nb)
    cells = []
    node = ("r", goal_row)
    while prev[node] is not None:
        p = prev[node]
        cells.append((node[1], p[1]) if node[0] == "r" else (p[1], node[1]))
        node = p
    cells.reverse()
    return cells


def solve_transport(supply, demand, cost):
    """Return ``(flow, u, v)`` with ``flow`` an ``m x n`` array.

    ``u`` and ``v`` are optimal dual potentials: ``u_i + v_j <= c_ij`` with
    equality on basic cells.
    """
    cost = np.asarray(cost, dtype=float)
    m, n = cost.shape
    supply = [float(x) for x in supply]
    demand = [float(x) for x in demand]
    # absorb rounding so the instance is exactly balanced
    demand[-1] += sum(supply) - sum(demand)
    flow = _northwest_corner(supply, demand)
    for _ in range(MAX_PIVOTS):
        u, v, rows, cols = _potentials(flow, cost, m, n)
        reduced = cost - u[:, None] - v[None, :]
        for cell in flow:
            reduced[cell] = 0.0
        i, j = np.unravel_index(int(np.argmin(reduced)), reduced.shape)
        if reduced[i, j] >= -1e-12:
            out = np.zeros((m, n))
            for cell, x in flow.items():
                out[cell] = max(x, 0.0)
            return out, u, v
        path = _tree_path(rows, cols, j, i)
        minus = path[0::2]
        plus = path[1::2]
        leaving = min(minus, key=lambda c: (flow[c], c))
        theta = flow[leaving]
        for c in minus:
            flow[c] -= theta
        for c in plus:
            flow[c] += theta
        del flow[leaving]
        flow[(i, j)] = theta
    raise SolverError("transportation simplex did not terminate")

"""Independent reference implementations used only by the tests."""
import numpy as np


def hiff_recursive(s: str) -> int:
    """HIFF from the transfer-function definition: pairs 00->0, 11->1, else null."""
    level = [c for c in s]
    total, weight = 0, 1
    while True:
        total += weight * sum(1 for c in level if c != "-")
        if len(level) == 1:
            return total
        nxt = []
        for a, b in zip(level[0::2], level[1::2]):
            nxt.append(a if a == b and a != "-" else "-")
        level, weight = nxt, weight * 2


def rr_linkages_loops(x, k, n):
    x = [int(v) for v in x]
    halves = [x[j * k:(j + 1) * k] for j in range(2 * n)]
    score = 0
    for i in range(n):
        left, right = halves[2 * i], halves[2 * i + 1]
        if (all(left) and not any(right)) or (not any(left) and all(right)):
            score += 1
    first, last = halves[0], halves[-1]
    if (all(first) and all(last)) or (not any(first) and not any(last)):
        score += 1
    return score


def dpll_solve(num_vars, clauses):
    """Plain DPLL with unit propagation; returns {var: 0/1} or None."""
    clauses = [list(c) for c in clauses]

    def simplify(cls, lit):
        out = []
        for c in cls:
            if lit in c:
                continue
            reduced = [l for l in c if l != -lit]
            if not reduced:
                return None
            out.append(reduced)
        return out

    def solve(cls, assign):
        while True:
            units = [c[0] for c in cls if len(c) == 1]
            if not units:
                break
            lit = units[0]
            assign = {**assign, abs(lit): int(lit > 0)}
            cls = simplify(cls, lit)
            if cls is None:
                return None
        if not cls:
            return assign
        counts = {}
        for c in cls:
            for l in c:
                counts[l] = counts.get(l, 0) + 1
        lit = max(counts, key=counts.get)
        for choice in (lit, -lit):
            nxt = simplify(cls, choice)
            if nxt is not None:
                res = solve(nxt, {**assign, abs(choice): int(choice > 0)})
                if res is not None:
                    return res
        return None

    res = solve(clauses, {})
    if res is None:
        return None
    return {v: res.get(v, 0) for v in range(1, num_vars + 1)}


def greedy_knapsack(values, weights, capacities):
    values = np.asarray(values, float)
    weights = np.atleast_2d(np.asarray(weights, float))
    capacities = np.asarray(capacities, float)
    norm = (weights / capacities[:, None]).sum(axis=0)
    order = sorted(range(len(values)), key=lambda j: -values[j] / max(norm[j], 1e-12))
    x = np.zeros(len(values), dtype=np.uint8)
    load = np.zeros(len(capacities))
    for j in order:
        if np.all(load + weights[:, j] <= capacities):
            x[j] = 1
            load += weights[:, j]
    return x


def central_difference(f, params: dict, eps=1e-5):
    """Numerical gradient of scalar ``f()`` w.r.t. every entry of the arrays in ``params``."""
    grads = {}
    for name, arr in params.items():
        g = np.zeros_like(arr, dtype=float)
        for idx in np.ndindex(arr.shape):
            old = arr[idx]
            arr[idx] = old + eps
            up = f()
            arr[idx] = old - eps
            down = f()
            arr[idx] = old
            g[idx] = (up - down) / (2 * eps)
        grads[name] = g
    return grads


def max_relative_error(analytic: dict, numeric: dict, floor=1e-8):
    worst = 0.0
    for k in analytic:
        a, n = analytic[k], numeric[k]
        rel = np.abs(a - n) / np.maximum(np.abs(a) + np.abs(n), floor)
        worst = max(worst, float(rel.max()))
    return worst


def total_variation(p, q):
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def exact_prefix_marginals(table, D, prefix_len):
    """Marginal law of the first ``prefix_len`` bits from a full table in MSB-first order."""
    return np.asarray(table).reshape(2 ** prefix_len, 2 ** (D - prefix_len)).sum(axis=1)

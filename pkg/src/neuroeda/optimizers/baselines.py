"""Comparison optimisers: generational GA, PBIL and a two-parent BOA."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..core import Population, RngStream, init_population, tournament_indices, truncation_indices
from .config import OptimizerConfig, RunRecord
from .neural import incorporate


# ---------------------------------------------------------------- GA

def two_point_crossover(a: np.ndarray, b: np.ndarray, cut1: int, cut2: int):
    """Swap the segment ``[cut1, cut2)`` between two parents."""
    lo, hi = sorted((cut1, cut2))
    c1, c2 = a.copy(), b.copy()
    c1[lo:hi], c2[lo:hi] = b[lo:hi], a[lo:hi]
    return c1, c2


def _breed(pop: Population, cfg: OptimizerConfig, rng: np.random.Generator) -> np.ndarray:
    P, D = pop.size, pop.dimension
    pairs = (P + 1) // 2
    parents = tournament_indices(pop.fitness, 2 * pairs, 2, rng).reshape(pairs, 2)
    A, B = pop.bits[parents[:, 0]], pop.bits[parents[:, 1]]
    cuts = np.sort(rng.integers(1, max(D, 2), size=(pairs, 2)), axis=1)
    do_cross = rng.random(pairs) < cfg.crossover_prob
    pos = np.arange(D)
    seg = (pos >= cuts[:, :1]) & (pos < cuts[:, 1:]) & do_cross[:, None]
    C1 = np.where(seg, B, A)
    C2 = np.where(seg, A, B)
    children = np.concatenate([C1, C2])[:P]
    rate = cfg.mutation_rate if cfg.mutation_rate is not None else 1.0 / D
    flips = rng.random(children.shape) < rate
    return (children ^ flips).astype(np.uint8)


def run_ga(cfg: OptimizerConfig, problem, rng: RngStream) -> RunRecord:
    P = cfg.population_size
    rec = RunRecord("GA", rng.seed, cfg.to_dict())
    pop = init_population(P, problem.dimension, rng["init"])
    pop.evaluate(problem)
    rec.log_generation(0, pop.fitness.max())
    evals = 0
    solved = problem.is_optimal(pop.fitness.max())
    if solved:
        rec.evals_to_optimum = 0
    while evals < cfg.max_evals and not solved:
        children = _breed(pop, cfg, rng["selection"])
        fit = problem.evaluate(children)
        evals += P
        if cfg.elitism:
            k = min(cfg.elitism, P)
            elite = np.argsort(-pop.fitness, kind="stable")[:k]
            worst = np.argsort(fit, kind="stable")[:k]
            for e, w in zip(elite, worst):
                if pop.fitness[e] > fit[w]:
                    children[w], fit[w] = pop.bits[e], pop.fitness[e]
        pop = Population(children, fit, pop.generation + 1)
        rec.log_generation(evals, fit.max())
        if problem.is_optimal(rec.best_fitness):
            solved = True
            rec.evals_to_optimum = evals
    rec.success = solved
    rec.final_population = pop
    rec.best_genotype = pop.bits[pop.best_index()].copy()
    return rec


# ---------------------------------------------------------------- PBIL

def pbil_update(p: np.ndarray, best: np.ndarray, alpha: float) -> np.ndarray:
    return (1.0 - alpha) * p + alpha * np.asarray(best, dtype=float)


def pbil_mutate(p: np.ndarray, rng: np.random.Generator, prob: float = 0.02,
                shift: float = 0.05) -> np.ndarray:
    hit = rng.random(p.shape) < prob
    target = rng.integers(0, 2, size=p.shape)
    return np.where(hit, (1.0 - shift) * p + shift * target, p)


def run_pbil(cfg: OptimizerConfig, problem, rng: RngStream, history: list | None = None) -> RunRecord:
    """PBIL; when ``history`` is a list, the probability vector after each iteration is appended."""
    P, D = cfg.population_size, problem.dimension
    lo, hi = cfg.pbil_bounds
    rec = RunRecord("PBIL", rng.seed, cfg.to_dict())
    # uniform initial population, scored but not charged, as for the other optimisers
    init = init_population(P, D, rng["init"])
    init.evaluate(problem)
    samples, fit = init.bits, init.fitness
    best_fit = fit.max()
    best_bits = samples[int(np.argmax(fit))].copy()
    rec.log_generation(0, best_fit)
    p = np.full(D, 0.5)
    gen = rng["sampling"]
    evals = 0
    solved = problem.is_optimal(best_fit)
    if solved:
        rec.evals_to_optimum = 0
    while evals < cfg.max_evals and not solved:
        samples = (gen.random((P, D)) < p).astype(np.uint8)
        fit = problem.evaluate(samples)
        evals += P
        i = int(np.argmax(fit))
        if fit[i] > best_fit:
            best_fit, best_bits = fit[i], samples[i].copy()
        p = pbil_update(p, samples[i], cfg.alpha)
        p = pbil_mutate(p, rng["mutation"], cfg.pbil_mutation_prob, cfg.pbil_mutation_shift)
        p = np.clip(p, lo, hi)
        if history is not None:
            history.append(p.copy())
        rec.log_generation(evals, best_fit)
        if problem.is_optimal(best_fit):
            solved = True
            rec.evals_to_optimum = evals
    rec.success = solved
    rec.final_population = Population(samples, fit)
    rec.best_genotype = best_bits
    rec.model = p
    return rec


# ---------------------------------------------------------------- BOA

def bic_node_score(data: np.ndarray, node: int, parents, log_n: float | None = None) -> float:
    """BIC contribution of one binary node: log-likelihood minus 0.5 log(N) per free parameter."""
    N = data.shape[0]
    parents = list(parents)
    cfg = np.zeros(N, dtype=np.int64)
    for q in parents:
        cfg = 2 * cfg + data[:, q]
    counts = np.bincount(2 * cfg + data[:, node], minlength=2 ** (len(parents) + 1)).reshape(-1, 2)
    totals = counts.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(counts > 0, counts * np.log(counts / np.maximum(totals, 1)), 0.0)
    if log_n is None:
        log_n = math.log(N)
    return float(terms.sum() - 0.5 * log_n * 2 ** len(parents))


@dataclass
class BayesNet:
    parents: list[list[int]]
    edges: list[tuple[int, int]] = field(default_factory=list)   # (parent, child) in insertion order
    tables: list[np.ndarray] = field(default_factory=list)        # P(x_i = 1 | parent config)

    @property
    def dimension(self) -> int:
        return len(self.parents)

    def topological_order(self) -> list[int]:
        D = self.dimension
        indeg = [len(p) for p in self.parents]
        children = [[] for _ in range(D)]
        for par, ch in self.edges:
            children[par].append(ch)
        ready = [i for i in range(D) if indeg[i] == 0]
        order = []
        while ready:
            i = ready.pop(0)
            order.append(i)
            for c in children[i]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    ready.append(c)
        return order


def _reaches(children: list[list[int]], src: int, dst: int) -> bool:
    stack, seen = [src], {src}
    while stack:
        v = stack.pop()
        if v == dst:
            return True
        for c in children[v]:
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return False


def learn_network(data: np.ndarray, max_parents: int = 2) -> BayesNet:
    """Greedy BIC hill-climb adding one edge at a time, keeping the graph acyclic."""
    data = np.asarray(data, dtype=np.int64)
    N, D = data.shape
    log_n = math.log(max(N, 1))
    parents: list[list[int]] = [[] for _ in range(D)]
    children: list[list[int]] = [[] for _ in range(D)]
    score = np.array([bic_node_score(data, i, [], log_n) for i in range(D)])
    gain = np.full((D, D), -np.inf)   # gain[j, i]: add edge j -> i

    def refresh(i):
        gain[:, i] = -np.inf
        if len(parents[i]) >= max_parents:
            return
        for j in range(D):
            if j != i and j not in parents[i]:
                gain[j, i] = bic_node_score(data, i, parents[i] + [j], log_n) - score[i]

    for i in range(D):
        refresh(i)
    edges = []
    while True:
        flat = int(np.argmax(gain))
        j, i = divmod(flat, D)
        if not gain[j, i] > 0:
            break
        if _reaches(children, i, j):
            gain[j, i] = -np.inf
            continue
        parents[i].append(j)
        children[j].append(i)
        edges.append((j, i))
        score[i] += gain[j, i]
        refresh(i)
    net = BayesNet(parents, edges)
    net.tables = [_cpt(data, i, parents[i]) for i in range(D)]
    return net


def _cpt(data, node, parents):
    cfg = np.zeros(data.shape[0], dtype=np.int64)
    for q in parents:
        cfg = 2 * cfg + data[:, q]
    size = 2 ** len(parents)
    ones = np.bincount(cfg, weights=data[:, node], minlength=size)
    tot = np.bincount(cfg, minlength=size)
    # parent configurations never observed fall back to a fair coin
    return np.where(tot > 0, ones / np.maximum(tot, 1), 0.5)


def sample_network(net: BayesNet, n: int, rng: np.random.Generator) -> np.ndarray:
    out = np.zeros((n, net.dimension), dtype=np.uint8)
    for i in net.topological_order():
        cfg = np.zeros(n, dtype=np.int64)
        for q in net.parents[i]:
            cfg = 2 * cfg + out[:, q]
        out[:, i] = rng.random(n) < net.tables[i][cfg]
    return out


def run_boa(cfg: OptimizerConfig, problem, rng: RngStream) -> RunRecord:
    P = cfg.population_size
    rec = RunRecord("BOA", rng.seed, cfg.to_dict())
    pop = init_population(P, problem.dimension, rng["init"])
    pop.evaluate(problem)
    rec.log_generation(0, pop.fitness.max())
    evals = 0
    best_fit = pop.fitness.max()
    best_bits = pop.bits[pop.best_index()].copy()
    solved = problem.is_optimal(best_fit)
    if solved:
        rec.evals_to_optimum = 0
    while evals < cfg.max_evals and not solved:
        selected = pop.bits[truncation_indices(pop, cfg.train_fraction, unique=False)]
        net = learn_network(selected, cfg.max_parents)
        samples = sample_network(net, P, rng["sampling"])
        fit = problem.evaluate(samples)
        evals += P
        i = int(np.argmax(fit))
        if fit[i] > best_fit:
            best_fit, best_bits = fit[i], samples[i].copy()
        pop = incorporate(pop, samples, fit, cfg, rng["niching"])
        rec.model = net
        rec.log_generation(evals, best_fit)
        if problem.is_optimal(best_fit):
            solved = True
            rec.evals_to_optimum = evals
    rec.success = solved
    rec.final_population = pop
    rec.best_genotype = best_bits
    return rec

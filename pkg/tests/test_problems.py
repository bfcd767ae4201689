import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from neuroeda.errors import DimensionError, ParseError
from neuroeda.problems import (
    HIFF, CnfFormula, Knapsack, KnapsackInstance, MaskedProblem, MaxSat, RoyalRoad,
    RoyalRoadLinkages, RoyalRoadSpec, RrLinkSpec, apply_mask, bundled_instance,
    format_knapsack, gen_random_knapsack, hiff, knapsack_fitness, make_problem, maxsat,
    parse_dimacs, parse_knapsack, royal_road, rr_linkages, serialize_dimacs,
)
from neuroeda.errors import ConfigError

from .oracles import dpll_solve, greedy_knapsack, hiff_recursive, rr_linkages_loops


def bits(s):
    return np.array([int(c) for c in s], dtype=np.uint8)


# ---------------------------------------------------------------- HIFF

def test_hiff_table_optima():
    assert hiff(np.ones(128, dtype=np.uint8)) == 1024
    assert hiff(np.ones(256, dtype=np.uint8)) == 2304


@pytest.mark.parametrize("s, expected", [("00000000", 32), ("00001111", 24)])
def test_hiff_small_examples(s, expected):
    assert hiff_recursive(s) == expected
    assert hiff(bits(s)) == expected


def test_hiff_matches_recursive_oracle_exhaustively_at_8():
    X = np.array(list(itertools.product([0, 1], repeat=8)), dtype=np.uint8)
    vec = hiff(X)
    for x, v in zip(X, vec):
        assert v == hiff_recursive("".join(map(str, x)))


def test_hiff_complement_symmetry():
    X = np.array(list(itertools.product([0, 1], repeat=8)), dtype=np.uint8)
    assert np.array_equal(hiff(X), hiff(1 - X))
    R = np.random.default_rng(0).integers(0, 2, (200, 128), dtype=np.uint8)
    assert np.array_equal(hiff(R), hiff(1 - R))


@pytest.mark.parametrize("k", range(0, 9))
def test_hiff_optimum_formula(k):
    D = 2 ** k
    assert HIFF(D).optimum == (k + 1) * D == hiff(np.zeros(D, dtype=np.uint8))


def test_hiff_rejects_non_power_of_two():
    with pytest.raises(DimensionError):
        hiff(np.ones(12, dtype=np.uint8))


# ---------------------------------------------------------------- Royal Road

def test_royal_road_examples():
    spec = RoyalRoadSpec(128, 8)
    assert royal_road(np.ones(128, dtype=np.uint8), spec) == 128
    assert royal_road(np.zeros(128, dtype=np.uint8), spec) == 0
    one_block = np.zeros(128, dtype=np.uint8)
    one_block[40:48] = 1
    assert royal_road(one_block, spec) == 8
    two = one_block.copy()
    two[0:8] = 1
    assert royal_road(two, spec) == 16
    with pytest.raises(DimensionError):
        royal_road(np.ones(64, dtype=np.uint8), spec)


# ---------------------------------------------------------------- RR with linkages

def test_rr_linkages_examples():
    spec = RrLinkSpec(4, 4)
    assert rr_linkages(bits("11110000" * 4), spec) == 4
    assert rr_linkages(np.ones(32, dtype=np.uint8), spec) == 1
    with pytest.raises(DimensionError):
        rr_linkages(np.ones(31, dtype=np.uint8), spec)


def test_rr_linkages_exhaustive_k1_n2():
    spec = RrLinkSpec(1, 2)
    X = np.array(list(itertools.product([0, 1], repeat=4)), dtype=np.uint8)
    vals = rr_linkages(X, spec)
    for x, v in zip(X, vals):
        assert v == rr_linkages_loops(x, 1, 2)
    assert vals.max() == 3
    assert np.all(vals <= spec.n + 1)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_rr_linkages_matches_loop_oracle(k, n, seed):
    X = np.random.default_rng(seed).integers(0, 2, (30, 2 * k * n), dtype=np.uint8)
    # bias toward uniform halves so the interesting branches are exercised
    X[::2] = np.repeat(X[::2, ::k], k, axis=1)
    vals = rr_linkages(X, RrLinkSpec(k, n))
    assert [rr_linkages_loops(x, k, n) for x in X] == vals.tolist()
    assert np.all(vals <= n + 1)


def test_rr_linkages_optimum_reachable():
    p = RoyalRoadLinkages(4, 4)
    best = bits("11110000" + "00001111" * 2 + "00001111")
    assert p.evaluate(best) == 5 == p.optimum


# ---------------------------------------------------------------- DIMACS / MaxSat

def test_parse_minimal():
    f = parse_dimacs("p cnf 2 1\n1 -2 0\n")
    assert f.num_vars == 2 and f.clauses == [(1, -2)]
    g = parse_dimacs(b"c hello\nc world\np cnf 2 1\n1 -2 0\n")
    assert g == f


@pytest.mark.parametrize("text, line", [
    ("p cnf 3 3\n1 2 0\n-1 3 0\n", 3),
    ("p cnf x 1\n1 0\n", 1),
    ("p cnf 2 1\n1 5 0\n", 2),
    ("1 2 0\n", 1),
    ("p cnf 2 1\n1 2\n", 2),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as exc:
        parse_dimacs(text)
    assert exc.value.line == line


def test_parse_satlib_trailer():
    f = parse_dimacs("p cnf 3 1\n1 2 3 0\n%\n0\n\n")
    assert f.num_clauses == 1


def test_parse_clause_spanning_lines():
    assert parse_dimacs("p cnf 3 1\n1 2\n3 0\n").clauses == [(1, 2, 3)]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12).flatmap(lambda v: st.tuples(
    st.just(v),
    st.lists(st.lists(st.integers(1, v).flatmap(lambda i: st.sampled_from([i, -i])),
                      min_size=1, max_size=5), max_size=15))))
def test_dimacs_round_trip(data):
    v, clauses = data
    f = CnfFormula(v, clauses)
    assert parse_dimacs(serialize_dimacs(f)) == f


def test_maxsat_examples():
    assert maxsat(bits("10"), CnfFormula(2, [])) == 0
    assert maxsat(bits("10"), CnfFormula(2, [(1, -2)])) == 1
    assert maxsat(bits("01"), CnfFormula(2, [(1, -2)])) == 0
    with pytest.raises(DimensionError):
        maxsat(bits("1"), CnfFormula(2, [(1, -2)]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_maxsat_adding_clause_changes_count_by_at_most_one(seed):
    rng = np.random.default_rng(seed)
    v = 6
    clauses = [tuple(int(s) * int(i) for s, i in zip(rng.choice([-1, 1], 3), rng.integers(1, v + 1, 3)))
               for _ in range(10)]
    extra = clauses.pop()
    X = rng.integers(0, 2, (16, v), dtype=np.uint8)
    before = MaxSat(CnfFormula(v, clauses)).evaluate(X)
    after = MaxSat(CnfFormula(v, clauses + [extra])).evaluate(X)
    assert np.all((after - before >= 0) & (after - before <= 1))


@pytest.mark.parametrize("name, V, C", [("uf100-010", 100, 430), ("uf20-01", 20, 91)])
def test_satlib_instance_satisfiable(name, V, C):
    f = bundled_instance(name)
    assert (f.num_vars, f.num_clauses) == (V, C)
    model = dpll_solve(f.num_vars, f.clauses)
    assert model is not None
    x = np.array([model[i + 1] for i in range(V)], dtype=np.uint8)
    assert maxsat(x, f) == C
    assert MaxSat(f).optimum == C


# ---------------------------------------------------------------- knapsack

def test_knapsack_examples():
    inst = KnapsackInstance([7], [[15]], [10])
    assert knapsack_fitness(bits("0"), inst) == 0
    assert knapsack_fitness(bits("1"), inst) == -5
    inst2 = KnapsackInstance([3, 4, 5], [[2, 3, 4], [1, 1, 1]], [5, 2])
    assert knapsack_fitness(bits("110"), inst2) == 7
    # 2 + 4 = 6 > 5 by 1, three items > 2 by 1
    assert knapsack_fitness(bits("111"), inst2) == -(4 + 1)


def test_knapsack_sign_property():
    rng = np.random.default_rng(3)
    inst = gen_random_knapsack(30, 3, rng)
    X = rng.integers(0, 2, (500, 30), dtype=np.uint8)
    f = knapsack_fitness(X, inst)
    feasible = np.all(X @ inst.weights.T <= inst.capacities, axis=1)
    assert np.all((f > 0) == (feasible & (X.sum(axis=1) > 0)))
    assert np.all(f[~feasible] < 0)


def test_random_knapsack_determinism_and_capacity_bounds():
    a = gen_random_knapsack(50, 2, np.random.default_rng(9))
    b = gen_random_knapsack(50, 2, np.random.default_rng(9))
    assert np.array_equal(a.weights, b.weights) and np.array_equal(a.values, b.values)
    for seed in range(1000):
        N = 3 + seed % 20
        inst = gen_random_knapsack(N, 1 + seed % 3, np.random.default_rng(seed))
        assert np.array_equal(inst.capacities, 0.5 * inst.weights.sum(axis=1))
        for arr in (inst.values, inst.weights):
            assert arr.min() >= 10 and arr.max() <= 100
        greedy = greedy_knapsack(inst.values, inst.weights, inst.capacities)
        assert knapsack_fitness(greedy, inst) >= 0


def test_knapsack_text_round_trip(tmp_path):
    inst = gen_random_knapsack(12, 2, np.random.default_rng(4), seed=4)
    inst.optimum = 321.0
    text = format_knapsack(inst)
    back = parse_knapsack(text)
    assert np.array_equal(back.values, inst.values)
    assert np.array_equal(back.weights, inst.weights)
    assert np.array_equal(back.capacities, inst.capacities)
    assert back.optimum == 321.0 and back.seed == 4
    path = tmp_path / "k.txt"
    path.write_text(text)
    p = make_problem("knapsack", {"path": str(path)})
    assert p.dimension == 12 and p.optimum == 321.0


def test_knapsack_parse_rejects_wrong_count():
    with pytest.raises(ParseError):
        parse_knapsack("2 1\n1 2\n3 4\n")


# ---------------------------------------------------------------- masking

def test_mask_zero_is_identity():
    p = HIFF(16)
    m = MaskedProblem(p, np.zeros(16, dtype=np.uint8))
    X = np.random.default_rng(0).integers(0, 2, (20, 16), dtype=np.uint8)
    assert np.array_equal(m.evaluate(X), p.evaluate(X))


def test_mask_genotype_equal_to_mask_scores_as_zeros():
    mask = np.random.default_rng(1).integers(0, 2, 64, dtype=np.uint8)
    m = MaskedProblem(HIFF(64), mask)
    assert apply_mask(m, mask) == hiff(np.zeros(64, dtype=np.uint8)) == m.optimum


def test_masked_royal_road_optimum_is_mask_complement():
    mask = np.random.default_rng(2).integers(0, 2, 128, dtype=np.uint8)
    m = MaskedProblem(RoyalRoad(128, 8), mask)
    assert m.evaluate(1 - mask) == 128
    with pytest.raises(DimensionError):
        MaskedProblem(RoyalRoad(128, 8), mask[:10])


def test_make_problem_registry():
    assert make_problem("hiff", {"length": 32}).optimum == 192
    assert make_problem("maxsat", {"instance": "uf20-01"}).dimension == 20
    assert make_problem("rr_linkages", {"k": 2, "n": 3}).dimension == 12
    rk = make_problem("random_knapsack", {"items": 40, "seed": 2})
    assert rk.optimum is None and rk.dimension == 40
    with pytest.raises(ConfigError):
        make_problem("nope")
    with pytest.raises(ConfigError):
        make_problem("maxsat", {"path": "/does/not/exist.cnf"})

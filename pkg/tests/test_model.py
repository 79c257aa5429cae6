import json
import random
from pathlib import Path

import networkx as nx
import pytest

from branchsat.arena import BudgetExceeded, Strategy
from branchsat.cli import solve_formula
from branchsat.formula import Fragment, fl_closure, parse, to_nnf
from branchsat.model import (ModelError, TransitionSystem, check_ctl, ctl_states, export_dot,
                             export_json, extract_model, import_json)
from branchsat.random_formulas import sample, width_formula
from oracles import bounded_ctl

GOLDEN = Path(__file__).parent / "golden"
RUNNING = "A F G p & E G E F !p"


def system(labels, succ, initial=0):
    edges = {(s, t) for s, ts in enumerate(succ) for t in ts}
    return TransitionSystem([frozenset(x) for x in labels], edges, initial)


def random_system(rng, n, props=("p", "q")):
    labels = [frozenset(x for x in props if rng.random() < 0.5) for _ in range(n)]
    succ = [sorted(rng.sample(range(n), rng.randint(1, min(2, n)))) for _ in range(n)]
    return labels, succ


def isomorphic(a, b):
    ga, gb = nx.DiGraph(), nx.DiGraph()
    for g, t in ((ga, a), (gb, b)):
        for s in range(t.n_states):
            g.add_node(s, label=t.labels[s], init=s == t.initial)
        g.add_edges_from(t.edges)
    same = lambda x, y: x["label"] == y["label"] and x["init"] == y["init"]  # noqa: E731
    return nx.is_isomorphic(ga, gb, node_match=same)


# ---------------------------------------------------------------- check_ctl


def test_check_ctl_examples():
    t = system([{"p"}], [[0]])
    assert check_ctl(t, parse("A G p"))
    assert not check_ctl(t, parse("E F q"))
    assert check_ctl(t, parse("E X p & !q"))


def test_check_ctl_until_release():
    # 0:{p} -> 1:{p} -> 2:{q} -> 2, and 1 -> 0
    t = system([{"p"}, {"p"}, {"q"}], [[1], [0, 2], [2]])
    assert check_ctl(t, parse("E (p U q)"))
    assert not check_ctl(t, parse("A (p U q)"))
    assert check_ctl(t, parse("E G p"))
    assert not check_ctl(t, parse("A G p"))
    assert check_ctl(t, parse("A G (q -> A G q)"))
    assert ctl_states(t, parse("A F q")) == frozenset({2})


def test_check_ctl_rejects_non_ctl():
    t = system([{"p"}], [[0]])
    with pytest.raises(ValueError):
        check_ctl(t, parse("A F G p"))


def test_check_ctl_rejects_partial_system():
    t = system([{"p"}, set()], [[1], []])
    with pytest.raises(ValueError):
        check_ctl(t, parse("p"))


def test_check_ctl_vs_bounded_paths(seed):
    rng = random.Random(seed + 500)
    for _ in range(300):
        labels, succ = random_system(rng, 6)
        t = system(labels, succ)
        f = sample(rng, Fragment.CTL, 10)
        got = ctl_states(t, f)
        for s in range(6):
            assert (s in got) == bounded_ctl(succ, labels, f, s, 12), (str(f), s)


def test_check_ctl_negation_duality(seed):
    rng = random.Random(seed + 600)
    for _ in range(200):
        labels, succ = random_system(rng, 5)
        t = system(labels, succ)
        f = sample(rng, Fragment.CTL, 10)
        pos = ctl_states(t, f)
        negf = to_nnf(parse(f"!({f})"))
        assert ctl_states(t, negf) == frozenset(range(5)) - pos


# ---------------------------------------------------------------- extraction


def test_extract_single_literal():
    m = solve_formula("p").model
    assert m.n_states == 1
    assert m.labels == [frozenset({"p"})]
    assert m.edges == {(0, 0)}


def test_extract_running_example():
    m = solve_formula(RUNNING).model
    assert m.is_total()
    g = nx.DiGraph(list(m.edges))
    p_states = [s for s in range(m.n_states) if "p" in m.labels[s]]
    on_cycle = [s for s in p_states if any(s in c and len(c) > 1 for c in nx.strongly_connected_components(g))]
    assert any(any("p" not in m.labels[u] for u in nx.descendants(g, s)) for s in on_cycle)


def test_running_example_golden():
    m = solve_formula(RUNNING).model
    assert export_json(m) == (GOLDEN / "running_example.json").read_text()
    assert export_dot(m) == (GOLDEN / "running_example.dot").read_text()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_extract_width_family(n):
    f = width_formula(n)
    rep = solve_formula(f)
    m = rep.model
    assert rep.satisfiable
    assert n <= m.max_out_degree() <= fl_closure(f).size_of_root
    assert check_ctl(m, f)


def test_extracted_models_total_and_small(seed):
    rng = random.Random(seed + 700)
    checked = 0
    for fragment in Fragment:
        for _ in range(15):
            f = sample(rng, fragment, 8)
            try:
                rep = solve_formula(f, node_budget=20_000)
            except BudgetExceeded:
                continue
            if not rep.satisfiable:
                continue
            m = rep.model
            checked += 1
            assert m.is_total()
            assert m.n_states <= len(rep.game)
            assert m.max_out_degree() <= fl_closure(f).size_of_root
            if fragment == Fragment.CTL:
                assert check_ctl(m, f)
    assert checked > 10


def test_extract_on_losing_game():
    rep = solve_formula("p & E X !p & A X p", want_model=False)
    with pytest.raises(ModelError):
        extract_model(rep.game, rep.strategy)


def test_extract_with_broken_strategy():
    rep = solve_formula("E X p & E X !p")
    g = rep.game
    rule = next(v for v in range(2, len(g)) if not g.modal[v] and not g.leaf[v])
    broken = Strategy(rep.strategy.winner, {**rep.strategy.choice, rule: 1})
    with pytest.raises(ModelError):
        extract_model(g, broken)


# ---------------------------------------------------------------- export


def test_one_state_dot_golden():
    t = system([{"p"}], [[0]])
    assert export_dot(t) == (
        "digraph model {\n"
        "  __start [shape=point];\n"
        "  __start -> s0;\n"
        '  s0 [label="0: {p}"];\n'
        "  s0 -> s0;\n"
        "}\n"
    )


def test_json_layout():
    t = system([{"q", "p"}, set()], [[1], [0, 1]], initial=1)
    data = json.loads(export_json(t))
    assert data == {"initial": 1,
                    "states": [{"id": 0, "props": ["p", "q"]}, {"id": 1, "props": []}],
                    "edges": [[0, 1], [1, 0], [1, 1]]}


def test_json_round_trip(seed):
    rng = random.Random(seed + 800)
    for _ in range(50):
        labels, succ = random_system(rng, rng.randint(1, 6))
        t = system(labels, succ, rng.randrange(len(labels)))
        back = import_json(export_json(t))
        assert back == t
        assert isomorphic(back, t)


def test_json_import_renumbers_ids():
    text = json.dumps({"initial": 7, "states": [{"id": 7, "props": ["p"]}, {"id": 3, "props": []}],
                       "edges": [[7, 3], [3, 3]]})
    t = import_json(text)
    assert t.initial == 1 and t.labels == [frozenset(), frozenset({"p"})]
    assert t.edges == {(1, 0), (0, 0)}


def test_exports_deterministic():
    a = solve_formula("A G E F p & A G E F !p").model
    b = solve_formula("A G E F p & A G E F !p").model
    assert export_json(a) == export_json(b)
    assert export_dot(a) == export_dot(b)

import random

import networkx as nx
import pytest

from branchsat.arena import (WIN0, WIN1, BudgetExceeded, ParityGame, brute_force_solve, build_game,
                             compress_priorities, random_game, solve, solve_buchi, solve_parity)
from branchsat.formula import Fragment, fl_closure, parse, to_nnf
from branchsat.game_core import PLAYER0, PLAYER1, CtlGame, Game
from branchsat.winning_condition import BUCHI, build_acceptance

RUNNING = "A F G p & E G E F !p"


def product(text, fragment=None, budget=5_000_000):
    t = fl_closure(to_nnf(parse(text)))
    fragment = t.fragment if fragment is None else fragment
    engine = CtlGame(t) if fragment == Fragment.CTL else Game(t)
    acc = build_acceptance(t, fragment, None if fragment == Fragment.CTL else engine)
    return build_game(engine, acc.automaton, acc.kind, budget)


def one_node(priority, owner=PLAYER0, buchi=False):
    g = ParityGame(kind=BUCHI if buchi else "parity")
    g.add_node(owner, priority)
    g.succ[0] = [0]
    g.initial = 0
    return g


def check_total(g):
    assert all(g.succ[v] for v in range(len(g)))
    assert all(0 <= w < len(g) for ws in g.succ for w in ws)


def check_strategy(g, s, sinks=True):
    """Winner's moves stay in the region and player 0's subgraph has only even cycles."""
    for v, w in s.choice.items():
        assert w in g.succ[v]
        assert s.winner[w] == s.winner[v]
    for v in range(len(g)):
        if g.owner[v] != s.winner[v]:
            assert all(s.winner[w] == s.winner[v] for w in g.succ[v])
    h = nx.DiGraph()
    for v in range(len(g)):
        if s.winner[v] != PLAYER0:
            continue
        h.add_node(v)
        for w in ([s.choice[v]] if g.owner[v] == PLAYER0 else g.succ[v]):
            h.add_edge(v, w)
    if sinks:
        assert WIN1 not in h
    prio = g.priority
    for d in sorted({prio[v] for v in h}):
        if d % 2 == 0:
            continue
        sub = h.subgraph(v for v in h if prio[v] <= d)
        for comp in nx.strongly_connected_components(sub):
            cyc = len(comp) > 1 or any(sub.has_edge(v, v) for v in comp)
            assert not (cyc and any(prio[v] == d for v in comp)), f"odd cycle with max {d}"


# ---------------------------------------------------------------- build_game


def test_single_literal_is_leaf_won_by_player0():
    g = product("p")
    v = g.initial
    assert g.leaf[v] and g.succ[v] == [v] and g.priority[v] == 2  # CTL pipeline: Büchi
    assert solve(g).wins(v)
    g = product("p", Fragment.CTLSTAR)
    leaves = [v for v in range(len(g)) if g.leaf[v]]
    assert len(leaves) == 1 and g.priority[leaves[0]] == 0
    assert solve(g).wins(g.initial)


def test_contradiction_loses():
    for fragment in Fragment:
        g = product("p & !p", fragment)
        assert not solve(g).wins(g.initial)


def test_running_example_won():
    g = product(RUNNING)
    check_total(g)
    s = solve(g)
    assert s.wins(g.initial)
    check_strategy(g, s)


def test_sinks():
    g = product(RUNNING)
    assert g.succ[WIN0] == [WIN0] and g.succ[WIN1] == [WIN1]
    assert g.priority[WIN0] % 2 == 0 and g.priority[WIN1] % 2 == 1
    s = solve(g)
    assert s.wins(WIN0) and not s.wins(WIN1)


@pytest.mark.parametrize("text", ["E G p & A F !p", "A G (p & E X !p)", "E (p U q) & A G !q"])
def test_unsat_examples(text):
    for fragment in [f for f in Fragment if f >= fl_closure(to_nnf(parse(text))).fragment]:
        g = product(text, fragment)
        check_total(g)
        s = solve(g)
        assert not s.wins(g.initial)
        check_strategy(g, s)


def test_buchi_pipelines_emit_buchi_priorities():
    for fragment in (Fragment.CTL, Fragment.CTLPLUS):
        g = product("A G E F p & A G E F !p", fragment)
        assert g.kind == BUCHI
        assert set(g.priority) <= {1, 2}


def test_parity_priorities_gap_free():
    g = product(RUNNING, Fragment.CTLSTAR)
    ps = sorted(set(g.priority))
    assert ps == list(range(ps[0], ps[-1] + 1))


def test_node_budget():
    with pytest.raises(BudgetExceeded):
        product(RUNNING, budget=20)


def test_node_ids_deterministic():
    assert product(RUNNING).export() == product(RUNNING).export()


def test_out_degree_bounded():
    for text in [RUNNING, "A G E F p & A G E F !p", "E X p & E X q & A X r"]:
        t = fl_closure(to_nnf(parse(text)))
        g = product(text)
        assert max(len(ws) for ws in g.succ) <= 2 ** t.size_of_root


def test_export_format():
    g = product("E X p & E X !p")
    lines = g.export().splitlines()
    assert lines[0] == f"parity {len(g) - 1};"
    assert lines[1] == f"start {g.initial};"
    assert len(lines) == len(g) + 2
    for v, line in enumerate(lines[2:]):
        head, label, tail = line.split('"')
        assert tail == ""
        word, node, owner, prio, succ = head.split()
        assert (word, int(node), int(owner), int(prio)) == ("node", v, g.owner[v], g.priority[v])
        assert [int(w) for w in succ.split(",")] == g.succ[v]
    assert lines[2].endswith('"win_0"') and lines[3].endswith('"win_1"')


# ---------------------------------------------------------------- solvers


def test_one_node_games():
    assert solve_parity(one_node(0)).wins(0)
    assert not solve_parity(one_node(1)).wins(0)
    assert not solve_parity(one_node(1, PLAYER1)).wins(0)
    assert solve_buchi(one_node(2, buchi=True)).wins(0)
    assert not solve_buchi(one_node(1, buchi=True)).wins(0)
    assert brute_force_solve(one_node(0)) == [PLAYER0]
    assert brute_force_solve(one_node(3)) == [PLAYER1]


def test_buchi_cycle_avoiding_final():
    # 0 (prio 1) may go to 1 (prio 2) or loop; player 1 owns 0 and loops
    g = ParityGame(kind=BUCHI)
    g.add_node(PLAYER1, 1)
    g.add_node(PLAYER0, 2)
    g.succ = [[0, 1], [0]]
    g.initial = 0
    assert solve_buchi(g).winner == [PLAYER1, PLAYER1]
    g.owner[0] = PLAYER0
    assert solve_buchi(g).winner == [PLAYER0, PLAYER0]


def test_two_node_alternation_forced():
    g = ParityGame()
    g.add_node(PLAYER1, 1)
    g.add_node(PLAYER1, 2)
    g.succ = [[1], [0]]
    assert brute_force_solve(g) == [PLAYER0, PLAYER0]
    g.priority[0] = 3
    assert brute_force_solve(g) == [PLAYER1, PLAYER1]


def test_no_player0_nodes():
    g = ParityGame()
    for p in (2, 1, 1):
        g.add_node(PLAYER1, p)
    g.succ = [[1], [0, 2], [2]]
    assert brute_force_solve(g) == [PLAYER1, PLAYER1, PLAYER1]
    assert solve_parity(g).winner == [PLAYER1, PLAYER1, PLAYER1]


def test_solve_buchi_rejects_parity_priorities():
    with pytest.raises(ValueError):
        solve_buchi(one_node(0))
    with pytest.raises(ValueError):
        solve_buchi(one_node(3))


def test_brute_force_bound():
    rng = random.Random(1)
    with pytest.raises(ValueError):
        brute_force_solve(random_game(rng, 13))
    brute_force_solve(random_game(rng, 13), bound=13)


def test_compress_priorities_keeps_order_and_parity():
    g = ParityGame()
    for p in (7, 2, 4, 10, 3):
        g.add_node(PLAYER0, p)
    out = compress_priorities(g)
    assert out == [3, 0, 2, 4, 1]


def test_random_parity_games_vs_brute_force(seed):
    rng = random.Random(seed + 100)
    for _ in range(1000):
        g = random_game(rng, rng.randint(1, 8), max_priority=4)
        s = solve_parity(g)
        assert s.winner == brute_force_solve(g)
        check_strategy(g, s, sinks=False)


def test_random_buchi_games_vs_brute_force_and_zielonka(seed):
    rng = random.Random(seed + 200)
    for _ in range(1000):
        g = random_game(rng, rng.randint(1, 8), buchi=True)
        s = solve_buchi(g)
        assert s.winner == solve_parity(g).winner
        assert s.winner == brute_force_solve(g)
        check_strategy(g, s, sinks=False)


def test_buchi_and_zielonka_agree_on_larger_games(seed):
    rng = random.Random(seed + 300)
    for _ in range(200):
        g = random_game(rng, rng.randint(10, 60), buchi=True)
        assert solve_buchi(g).winner == solve_parity(g).winner


def test_solvers_agree_on_satisfiability_games():
    for text in ["A G E F p & A G E F !p", "A (p U q) & E G !q", "A G (E X p & E X !p)",
                 "E (p U q) & A G (q -> E X !q)"]:
        g = product(text, Fragment.CTL)
        assert solve_buchi(g).winner == solve_parity(g).winner


def test_determinacy(seed):
    rng = random.Random(seed + 400)
    for _ in range(100):
        g = random_game(rng, rng.randint(1, 30), max_priority=6)
        s = solve_parity(g)
        assert len(s.winner) == len(g)
        assert set(s.winner) <= {PLAYER0, PLAYER1}

"""The satisfiability game as a parity game, and solvers for it.

Nodes pair a configuration with a state of the deterministic acceptance
automaton.  Two sinks make the game total: ``win_0`` (a self-loop player 0
wins) and ``win_1``.  A dead end of player 0, e.g. a configuration whose only
successors are inconsistent or that contains an empty A-block, moves to
``win_1``.  A consistent set of literals is a leaf with an even self-loop.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

import networkx as nx

from .game_core import PLAYER0, PLAYER1, CtlGame, Game
from .omega_automata import OmegaAutomaton
from .winning_condition import BUCHI

DEFAULT_NODE_BUDGET = 5_000_000
WIN0, WIN1 = 0, 1


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class ParityGame:
    owner: list[int] = field(default_factory=list)
    priority: list[int] = field(default_factory=list)
    succ: list[list[int]] = field(default_factory=list)
    initial: int = 2
    # bookkeeping for model extraction and export
    config: list = field(default_factory=list)
    state: list = field(default_factory=list)
    modal: list[bool] = field(default_factory=list)
    leaf: list[bool] = field(default_factory=list)
    kind: str = "parity"
    show: object = None
    props: object = None

    def __len__(self) -> int:
        return len(self.owner)

    def add_node(self, owner: int, priority: int, config=None, state=None,
                 modal: bool = False, leaf: bool = False) -> int:
        self.owner.append(owner)
        self.priority.append(priority)
        self.succ.append([])
        self.config.append(config)
        self.state.append(state)
        self.modal.append(modal)
        self.leaf.append(leaf)
        return len(self.owner) - 1

    @property
    def n_edges(self) -> int:
        return sum(len(s) for s in self.succ)

    def predecessors(self) -> list[list[int]]:
        pred = [[] for _ in self.owner]
        for v, ws in enumerate(self.succ):
            for w in ws:
                pred[w].append(v)
        return pred

    def label(self, v: int) -> str:
        if v == WIN0:
            return "win_0"
        if v == WIN1:
            return "win_1"
        if self.show is None:
            return str(v)
        return self.show(self.config[v])

    def export(self) -> str:
        """Line format ``node <id> <owner> <priority> <succ,...> "<label>"``."""
        lines = [f"parity {len(self) - 1};", f"start {self.initial};"]
        for v in range(len(self)):
            succ = ",".join(str(w) for w in self.succ[v])
            label = self.label(v).replace('"', "'")
            lines.append(f'node {v} {self.owner[v]} {self.priority[v]} {succ} "{label}"')
        return "\n".join(lines) + "\n"


def build_game(engine: Game | CtlGame, acceptance: OmegaAutomaton, kind: str = "parity",
               node_budget: int = DEFAULT_NODE_BUDGET) -> ParityGame:
    """Breadth-first product of the configuration graph with ``acceptance``."""
    g = ParityGame(kind=kind, show=engine.show, props=engine.positive_props)
    top = 2 if kind == BUCHI else 0
    g.add_node(PLAYER0, top)
    g.add_node(PLAYER0, 1)
    g.succ[WIN0].append(WIN0)
    g.succ[WIN1].append(WIN1)
    ids: dict = {}

    def intern(c, q) -> int:
        key = (c, q)
        v = ids.get(key)
        if v is None:
            if len(g) >= node_budget:
                raise BudgetExceeded(f"game exceeds the node budget of {node_budget}")
            v = g.add_node(PLAYER0, 1, c, q)
            ids[key] = v
            queue.append(v)
        return v

    queue: deque = deque()
    c0 = engine.initial_configuration()
    if not engine.is_consistent(c0):
        g.initial = WIN1
        return g
    g.initial = intern(c0, acceptance.initial)
    while queue:
        v = queue.popleft()
        c, q = g.config[v], g.state[v]
        ex = engine.successors(c)
        g.owner[v] = ex.owner
        g.modal[v] = ex.modal
        if ex.stuck:
            g.succ[v].append(WIN1)
            continue
        if not ex.successors:
            g.priority[v] = top
            g.leaf[v] = True
            g.succ[v].append(v)
            continue
        g.priority[v] = acceptance.priority(q)
        for s in ex.successors:
            if not s.consistent:
                continue
            q2 = acceptance.next(q, s.letter)
            if q2 is None:
                continue
            g.succ[v].append(intern(s.config, q2))
        if not g.succ[v]:
            g.succ[v].append(WIN1)
    if kind != BUCHI:
        g.priority = compress_priorities(g)
    return g


def compress_priorities(g: ParityGame) -> list[int]:
    """Map priorities onto a gap-free range keeping order and parity."""
    out = {}
    nxt = 0
    for p in sorted(set(g.priority)):
        if nxt % 2 != p % 2:
            nxt += 1
        out[p] = nxt
    return [out[p] for p in g.priority]


# ------------------------------------------------------------------ solving


@dataclass
class Strategy:
    winner: list[int]
    choice: dict[int, int]

    def wins(self, v: int, player: int = PLAYER0) -> bool:
        return self.winner[v] == player


def _attractor(g: ParityGame, pred, nodes: set, target: set, player: int, strategy: dict):
    """Attractor of ``target`` for ``player`` inside the subgame ``nodes``."""
    attr = set(target)
    count = {}
    queue = deque(attr)
    while queue:
        w = queue.popleft()
        for v in pred[w]:
            if v not in nodes or v in attr:
                continue
            if g.owner[v] == player:
                attr.add(v)
                strategy[v] = w
                queue.append(v)
            else:
                c = count.get(v)
                if c is None:
                    c = sum(1 for x in g.succ[v] if x in nodes)
                c -= 1
                count[v] = c
                if c == 0:
                    attr.add(v)
                    queue.append(v)
    return attr


def solve_parity(g: ParityGame) -> Strategy:
    """Zielonka's recursive algorithm (max-parity, even priorities for player 0)."""
    prio = compress_priorities(g)
    pred = g.predecessors()
    strat = [dict(), dict()]

    def solve(nodes: frozenset):
        if not nodes:
            return set(), set()
        d = max(prio[v] for v in nodes)
        p = d % 2
        top = {v for v in nodes if prio[v] == d}
        local = {}
        a = _attractor(g, pred, nodes, top, p, local)
        w = solve(frozenset(nodes - a))
        if not w[1 - p]:
            for v in top:
                if g.owner[v] == p:
                    strat[p][v] = next(x for x in g.succ[v] if x in nodes)
            strat[p].update(local)
            win = [None, None]
            win[p] = set(nodes)
            win[1 - p] = set()
            return win[0], win[1]
        local = {}
        b = _attractor(g, pred, nodes, w[1 - p], 1 - p, local)
        strat[1 - p].update(local)
        w2 = solve(frozenset(nodes - b))
        win = [None, None]
        win[p] = w2[p]
        win[1 - p] = w2[1 - p] | b
        return win[0], win[1]

    import sys
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 10_000))
    try:
        w0, w1 = solve(frozenset(range(len(g))))
    finally:
        sys.setrecursionlimit(old)
    winner = [PLAYER0 if v in w0 else PLAYER1 for v in range(len(g))]
    choice = {}
    for v in range(len(g)):
        pl = winner[v]
        if g.owner[v] == pl:
            choice[v] = strat[pl].get(v, g.succ[v][0])
    return Strategy(winner, _repair(g, winner, choice))


def _repair(g: ParityGame, winner, choice):
    """Keep strategy moves inside the mover's winning region."""
    for v, w in choice.items():
        if winner[w] != winner[v]:
            choice[v] = next(x for x in g.succ[v] if winner[x] == winner[v])
    return choice


def solve_buchi(g: ParityGame) -> Strategy:
    """Classic O(n*m) Büchi game solver: player 0 wants priority 2 infinitely often."""
    if not set(g.priority) <= {1, 2}:
        raise ValueError("solve_buchi needs priorities within {1, 2}")
    pred = g.predecessors()
    nodes = set(range(len(g)))
    lose = set()
    choice1 = {}
    while True:
        final = {v for v in nodes if g.priority[v] == 2}
        reach_strat = {}
        reach = _attractor(g, pred, nodes, final, PLAYER0, reach_strat)
        trap = nodes - reach
        if not trap:
            break
        # player 1 wins the trap by staying in it, and everything attracted to it
        for v in trap:
            if g.owner[v] == PLAYER1:
                choice1[v] = next(x for x in g.succ[v] if x in trap or x in lose)
        local = {}
        extra = _attractor(g, pred, nodes, trap, PLAYER1, local)
        choice1.update(local)
        lose |= extra
        nodes -= extra
    winner = [PLAYER0 if v in nodes else PLAYER1 for v in range(len(g))]
    choice = {}
    for v in range(len(g)):
        if winner[v] == PLAYER0 and g.owner[v] == PLAYER0:
            if g.priority[v] == 2:
                choice[v] = next(x for x in g.succ[v] if x in nodes)
            else:
                choice[v] = reach_strat[v]
        elif winner[v] == PLAYER1 and g.owner[v] == PLAYER1:
            choice[v] = choice1.get(v, g.succ[v][0])
    return Strategy(winner, _repair(g, winner, choice))


def solve(g: ParityGame) -> Strategy:
    return solve_buchi(g) if g.kind == BUCHI else solve_parity(g)


def brute_force_solve(g: ParityGame, bound: int = 12) -> list[int]:
    """Winner per node by enumerating every positional strategy of player 0."""
    n = len(g)
    if n > bound:
        raise ValueError(f"brute force limited to {bound} nodes")
    mine = [v for v in range(n) if g.owner[v] == PLAYER0]
    won = [False] * n
    for picks in itertools.product(*(g.succ[v] for v in mine)):
        chosen = dict(zip(mine, picks))
        h = nx.DiGraph()
        h.add_nodes_from(range(n))
        for v in range(n):
            for w in ([chosen[v]] if v in chosen else g.succ[v]):
                h.add_edge(v, w)
        bad = set()
        for d in sorted(set(g.priority)):
            if d % 2 == 0:
                continue
            sub = h.subgraph(v for v in range(n) if g.priority[v] <= d)
            for comp in nx.strongly_connected_components(sub):
                cyc = len(comp) > 1 or any(sub.has_edge(v, v) for v in comp)
                if cyc and any(g.priority[v] == d for v in comp):
                    bad |= comp
        reach_bad = set(bad)
        for v in bad:
            reach_bad |= nx.ancestors(h, v)
        for v in range(n):
            if v not in reach_bad:
                won[v] = True
    return [PLAYER0 if won[v] else PLAYER1 for v in range(n)]


def random_game(rng, n: int, max_priority: int = 4, buchi: bool = False) -> ParityGame:
    """Random total game for solver cross-checks."""
    g = ParityGame(kind=BUCHI if buchi else "parity")
    for _ in range(n):
        p = rng.choice((1, 2)) if buchi else rng.randint(0, max_priority)
        g.add_node(rng.randint(0, 1), p)
    for v in range(n):
        k = rng.randint(1, min(3, n))
        g.succ[v] = sorted(rng.sample(range(n), k))
    g.initial = 0
    return g

"""Play lassos sampled from the game engines, and trace/thread oracles on them.

The oracles work directly on the connection graph of a lasso: traces and
threads of an ultimately periodic play are paths in finite graphs indexed by
lasso positions, so their existence is decided by cycle searches.
"""

from __future__ import annotations

import random

import networkx as nx

from branchsat.formula import EXISTS, FORALL, NEXT, RELEASE, UNTIL, bits
from branchsat.game_core import A, E, CtlRule, CtlX0, CtlX1, Game
from branchsat.omega_automata import LassoWord


class PlayLasso:
    def __init__(self, configs, letters, loop_start):
        self.configs = configs
        self.letters = letters
        self.loop_start = loop_start

    @property
    def word(self) -> LassoWord:
        return LassoWord(tuple(self.letters[: self.loop_start]), tuple(self.letters[self.loop_start:]))

    def __len__(self):
        return len(self.letters)

    def next(self, i: int) -> int:
        i += 1
        return i if i < len(self.letters) else self.loop_start


def random_play(engine, rng: random.Random, max_steps: int = 400, choose=None):
    """Random walk over consistent successors until a configuration repeats.

    Returns None when the walk hits a leaf or a stuck configuration.
    ``choose(config, successors)`` may override the random choice.
    """
    c = engine.initial_configuration()
    if not engine.is_consistent(c):
        return None
    seen = {}
    configs, letters = [], []
    for _ in range(max_steps):
        if c in seen:
            return PlayLasso(configs, letters, seen[c])
        ex = engine.successors(c)
        succ = [s for s in ex.successors if s.consistent]
        if ex.stuck or not succ:
            return None
        seen[c] = len(configs)
        s = choose(c, succ) if choose else rng.choice(succ)
        configs.append(c)
        letters.append(s.letter)
        c = s.config
    return None


def random_plays(engine, rng: random.Random, count: int, attempts: int = 50, **kw):
    out = []
    for _ in range(count * attempts):
        if len(out) == count:
            break
        p = random_play(engine, rng, **kw)
        if p is not None:
            out.append(p)
    return out


# ------------------------------------------------------------------ CTL* traces


def _thread_graph(game: Game, play: PlayLasso, quant: int) -> nx.DiGraph:
    """Formula-level connection graph restricted to blocks with quantifier ``quant``."""
    g = nx.DiGraph()
    for i in range(play.loop_start, len(play)):
        j = play.next(i)
        for b in play.configs[i].blocks:
            if b.quant != quant:
                continue
            for e in game.connections(play.letters[i], b):
                if e.block.quant != quant or e.block not in play.configs[j].blocks:
                    continue
                for chi in bits(b.mask):
                    for chi2 in bits(game.edge_images(e, chi)):
                        g.add_edge((i, b, chi), (j, e.block, chi2))
    return g


def _has_cycle_through(g: nx.DiGraph, good) -> bool:
    for comp in nx.strongly_connected_components(g):
        if len(comp) == 1:
            v = next(iter(comp))
            if not g.has_edge(v, v):
                continue
        if any(good(v) for v in comp):
            return True
    return False


def has_bad_e_trace(game: Game, play: PlayLasso) -> bool:
    """Some E-trace of the play carries a thread visiting a U-formula infinitely often."""
    kind = game.t.kind
    return _has_cycle_through(_thread_graph(game, play, E), lambda v: kind[v[2]] == UNTIL)


def _block_graph(game: Game, play: PlayLasso) -> nx.DiGraph:
    g = nx.DiGraph()
    for i in range(play.loop_start, len(play)):
        j = play.next(i)
        for b in play.configs[i].blocks:
            if b.quant != A:
                continue
            for e in game.connections(play.letters[i], b):
                if e.block.quant == A and e.block in play.configs[j].blocks:
                    g.add_edge((i, b), (j, e.block))
    return g


def _walk_has_r_thread(game: Game, play: PlayLasso, walk) -> bool:
    kind = game.t.kind
    m = len(walk)
    g = nx.DiGraph()
    for t in range(m):
        (i, b), (_, b2) = walk[t], walk[(t + 1) % m]
        for e in game.connections(play.letters[i], b):
            if e.block != b2:
                continue
            for chi in bits(b.mask):
                for chi2 in bits(game.edge_images(e, chi)):
                    g.add_edge((t, chi), ((t + 1) % m, chi2))
    return _has_cycle_through(g, lambda v: kind[v[1]] == RELEASE)


def has_bad_a_trace(game: Game, play: PlayLasso, laps: int = 2) -> bool:
    """Some closed walk of A-blocks repeats into a trace without an R-thread.

    Walks go around the loop of the lasso at most ``laps`` times.
    """
    bg = _block_graph(game, play)
    max_walk = laps * (len(play) - play.loop_start)
    nodes = sorted(bg.nodes, key=repr)
    order = {v: k for k, v in enumerate(nodes)}

    def walks_from(s):
        stack = [(s, [s])]
        while stack:
            v, path = stack.pop()
            for w in bg.successors(v):
                if w == s:
                    yield path
                if order[w] > order[s] and len(path) < max_walk:
                    stack.append((w, path + [w]))

    for s in nodes:
        for walk in walks_from(s):
            if not _walk_has_r_thread(game, play, walk):
                return True
    return False


# ------------------------------------------------------------------ CTL threads


def has_ctl_u_thread(game, play: PlayLasso) -> bool:
    """Some thread of single formulas visits a ``Q(a U b)`` formula infinitely often."""
    t = game.t
    g = nx.DiGraph()
    for i in range(play.loop_start, len(play)):
        j = play.next(i)
        c, c2, r = play.configs[i], play.configs[j], play.letters[i]
        for chi in bits(c):
            if type(r) is CtlRule:
                targets = bits(game.rule(chi)[r.branch]) if chi == r.formula else [chi]
            elif type(r) in (CtlX0, CtlX1):
                path = t.left[chi]
                is_x = t.kind[chi] in (EXISTS, FORALL) and t.kind[path] == NEXT
                keep = is_x and (t.kind[chi] == FORALL or (type(r) is CtlX1 and chi == r.formula))
                targets = [t.left[path]] if keep else []
            else:
                raise TypeError(r)
            for chi2 in targets:
                if c2 >> chi2 & 1:
                    g.add_edge((i, chi), (j, chi2))
    return _has_cycle_through(g, lambda v: v[1] in t.ctl_until_list)

"""Models: extraction from winning strategies, CTL model checking, export.

The model checker works on formula trees and shares nothing with the game
engine, so it can serve as an oracle for the satisfiability procedure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .arena import WIN1, ParityGame, Strategy
from .formula import (AND, EXISTS, FF, FORALL, NEGPROP, NEXT, OR, PROP, RELEASE,
                      TT, UNTIL, Formula, Fragment, classify_fragment, to_nnf)
from .game_core import PLAYER0


@dataclass
class TransitionSystem:
    labels: list[frozenset[str]]
    edges: set[tuple[int, int]]
    initial: int = 0

    @property
    def n_states(self) -> int:
        return len(self.labels)

    def successors(self, s: int) -> list[int]:
        return sorted(t for (u, t) in self.edges if u == s)

    def successor_lists(self) -> list[list[int]]:
        out = [[] for _ in self.labels]
        for u, t in sorted(self.edges):
            out[u].append(t)
        return out

    def is_total(self) -> bool:
        return all(self.successor_lists())

    def max_out_degree(self) -> int:
        return max((len(s) for s in self.successor_lists()), default=0)


class ModelError(ValueError):
    pass


def extract_model(g: ParityGame, strategy: Strategy) -> TransitionSystem:
    """Collapse player 0's strategy subgraph onto its modal and leaf nodes.

    Every chain of rule applications below a modal node (or the root) is
    followed along the strategy to the next modal or leaf node, which becomes a
    state.  A modal node's state gets one edge per game successor; leaves loop.
    """
    if not strategy.wins(g.initial):
        raise ModelError("player 0 does not win the initial node")
    endpoint_cache: dict[int, int] = {}

    def endpoint(v: int) -> int:
        seen = []
        while not (g.modal[v] or g.leaf[v]):
            if v in endpoint_cache:
                v = endpoint_cache[v]
                break
            if v == WIN1 or g.owner[v] != PLAYER0:
                raise ModelError(f"strategy leaves the winning region at node {v}")
            seen.append(v)
            if len(seen) > len(g):
                raise ModelError("strategy loops without a modal step")
            v = strategy.choice[v]
        for u in seen:
            endpoint_cache[u] = v
        return v

    root = endpoint(g.initial)
    ids = {root: 0}
    order = [root]
    edges = set()
    i = 0
    while i < len(order):
        v = order[i]
        i += 1
        if g.leaf[v]:
            targets = [v]
        elif g.owner[v] == PLAYER0:
            targets = [endpoint(strategy.choice[v])]
        else:
            targets = [endpoint(w) for w in g.succ[v]]
        for w in targets:
            if w not in ids:
                ids[w] = len(order)
                order.append(w)
            edges.add((ids[v], ids[w]))
    labels = [g.props(g.config[v]) if g.props else frozenset() for v in order]
    return TransitionSystem(labels, edges, 0)


# ------------------------------------------------------------------ model checking


def check_ctl(t: TransitionSystem, phi: Formula) -> bool:
    """Truth of the CTL formula ``phi`` at the initial state of ``t``."""
    return t.initial in ctl_states(t, phi)


def ctl_states(t: TransitionSystem, phi: Formula) -> frozenset[int]:
    """States of ``t`` satisfying ``phi``, by bottom-up fixpoint labelling."""
    f = to_nnf(phi)
    if classify_fragment(f) != Fragment.CTL:
        raise ValueError("check_ctl handles CTL formulas only")
    if not t.is_total():
        raise ValueError("transition system is not total")
    succ = t.successor_lists()
    everything = frozenset(range(t.n_states))
    memo: dict[Formula, frozenset[int]] = {}

    def pre_e(z):
        return frozenset(s for s in everything if any(u in z for u in succ[s]))

    def pre_a(z):
        return frozenset(s for s in everything if all(u in z for u in succ[s]))

    def lfp(step):
        z = frozenset()
        while True:
            z2 = step(z)
            if z2 == z:
                return z
            z = z2

    def gfp(step):
        z = everything
        while True:
            z2 = step(z)
            if z2 == z:
                return z
            z = z2

    def sat(f: Formula) -> frozenset[int]:
        if f in memo:
            return memo[f]
        k = f.kind
        if k == TT:
            r = everything
        elif k == FF:
            r = frozenset()
        elif k == PROP:
            r = frozenset(s for s in everything if f.name in t.labels[s])
        elif k == NEGPROP:
            r = frozenset(s for s in everything if f.name not in t.labels[s])
        elif k == AND:
            r = sat(f.args[0]) & sat(f.args[1])
        elif k == OR:
            r = sat(f.args[0]) | sat(f.args[1])
        elif k in (EXISTS, FORALL):
            pre = pre_e if k == EXISTS else pre_a
            path = f.args[0]
            if path.kind == NEXT:
                r = pre(sat(path.args[0]))
            else:
                a, b = sat(path.args[0]), sat(path.args[1])
                if path.kind == UNTIL:
                    r = lfp(lambda z: b | (a & pre(z)))
                elif path.kind == RELEASE:
                    r = gfp(lambda z: b & (a | pre(z)))
                else:
                    raise ValueError(f"not a CTL path formula: {path}")
        else:
            raise ValueError(f"unexpected formula kind {k}")
        memo[f] = r
        return r

    return sat(f)


# ------------------------------------------------------------------ export


def export_json(t: TransitionSystem) -> str:
    data = {
        "initial": t.initial,
        "states": [{"id": s, "props": sorted(t.labels[s])} for s in range(t.n_states)],
        "edges": [list(e) for e in sorted(t.edges)],
    }
    return json.dumps(data, indent=2) + "\n"


def import_json(text: str) -> TransitionSystem:
    data = json.loads(text)
    ids = {st["id"]: i for i, st in enumerate(sorted(data["states"], key=lambda st: st["id"]))}
    labels = [frozenset()] * len(ids)
    for st in data["states"]:
        labels[ids[st["id"]]] = frozenset(st["props"])
    edges = {(ids[a], ids[b]) for a, b in data["edges"]}
    return TransitionSystem(labels, edges, ids[data["initial"]])


def export_dot(t: TransitionSystem) -> str:
    lines = ["digraph model {", "  __start [shape=point];", f"  __start -> s{t.initial};"]
    for s in range(t.n_states):
        props = ", ".join(sorted(t.labels[s]))
        lines.append(f'  s{s} [label="{s}: {{{props}}}"];')
    for a, b in sorted(t.edges):
        lines.append(f"  s{a} -> s{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"

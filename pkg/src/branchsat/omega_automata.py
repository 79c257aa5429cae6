"""Omega-word automata given by transition oracles.

Every automaton here is an initial state plus a function computing successors
for a ``(state, letter)`` pair on demand, memoized.  The alphabets involved in
the game are exponential, so nothing is ever tabulated up front.

Acceptance uses max-parity throughout: a run is accepting iff the largest
priority seen infinitely often is even.  Büchi kinds use priorities {1, 2}
(2 marks final states), co-Büchi kinds use {0, 1} (0 marks the states a run
must eventually stay in).  A deterministic automaton may be stuck on a letter;
a stuck run rejects.
"""

from __future__ import annotations

import warnings
from typing import Callable, Hashable, Iterable, NamedTuple

import networkx as nx

NBA, NCOBA, DBA, DCOBA, DPA = "NBA", "NcoBA", "DBA", "DcoBA", "DPA"
DETERMINISTIC = frozenset({DBA, DCOBA, DPA})


class OmegaAutomaton:
    """An automaton of a given acceptance kind over a lazily explored state space.

    ``delta(state, letter)`` returns an iterable of successor states; for
    deterministic kinds it holds at most one element.  ``priority(state)``
    is the max-parity colour of a state.
    """

    def __init__(self, kind: str, initial: Hashable, delta: Callable, priority: Callable,
                 n_states: int | None = None, name: str = "", alphabet: tuple | None = None):
        self.kind = kind
        self.alphabet = alphabet
        self.initial = initial
        self._delta = delta
        self._priority = priority
        self._succ_cache: dict = {}
        self._prio_cache: dict = {}
        self.n_states = n_states
        self.name = name

    @property
    def deterministic(self) -> bool:
        return self.kind in DETERMINISTIC

    def step(self, state, letter) -> tuple:
        key = (state, letter)
        out = self._succ_cache.get(key)
        if out is None:
            out = tuple(dict.fromkeys(self._delta(state, letter)))
            if self.deterministic and len(out) > 1:
                raise ValueError(f"{self.kind} {self.name} has {len(out)} successors")
            self._succ_cache[key] = out
        return out

    def next(self, state, letter):
        """Unique successor of a deterministic automaton, or None when stuck."""
        out = self.step(state, letter)
        return out[0] if out else None

    def priority(self, state) -> int:
        p = self._prio_cache.get(state)
        if p is None:
            p = self._priority(state)
            self._prio_cache[state] = p
        return p

    def is_final(self, state) -> bool:
        """Büchi reading: priority 2 is final; co-Büchi reading: priority 0."""
        return self.priority(state) in (0, 2) if self.kind in (NCOBA, DCOBA) else self.priority(state) == 2

    def explored_edges(self):
        """``(state, letter, successor)`` for every transition computed so far."""
        for (q, x), succ in self._succ_cache.items():
            for r in succ:
                yield q, x, r

    def explored_states(self) -> set:
        out = {self.initial}
        for (q, _), succ in self._succ_cache.items():
            out.add(q)
            out.update(succ)
        return out

    def reachable(self, alphabet: Iterable, limit: int = 1_000_000) -> set:
        alphabet = list(alphabet)
        seen = {self.initial}
        stack = [self.initial]
        while stack:
            q = stack.pop()
            for a in alphabet:
                for r in self.step(q, a):
                    if r not in seen:
                        seen.add(r)
                        if len(seen) > limit:
                            raise RuntimeError("state limit exceeded")
                        stack.append(r)
        return seen

    def index(self, states: Iterable) -> int:
        return len({self.priority(q) for q in states})

    def dump(self, alphabet: Iterable, show=str) -> str:
        """Textual listing of the reachable part (debugging aid)."""
        alphabet = list(alphabet)
        states = sorted(self.reachable(alphabet), key=repr)
        ids = {q: i for i, q in enumerate(states)}
        lines = [f"{self.kind} {self.name} initial {ids[self.initial]}"]
        for q in states:
            moves = []
            for a in alphabet:
                for r in self.step(q, a):
                    moves.append(f"{show(a)}->{ids[r]}")
            lines.append(f"state {ids[q]} priority {self.priority(q)} {show(q)} : " + " ".join(moves))
        return "\n".join(lines)


def explicit(kind: str, initial, transitions: dict, priorities: dict, name: str = "",
             alphabet: tuple | None = None) -> OmegaAutomaton:
    """Automaton from a table ``{(state, letter): [states]}`` and a priority map.

    The alphabet defaults to the letters occurring in the table.
    """
    letters = alphabet if alphabet is not None else tuple(sorted({a for _, a in transitions}, key=repr))
    return OmegaAutomaton(kind, initial, lambda q, a: transitions.get((q, a), ()),
                          priorities.__getitem__, n_states=len(priorities), name=name,
                          alphabet=letters)


# ------------------------------------------------------------------ complement

_SINK = ("sink",)


def complement_dcoba(a: OmegaAutomaton) -> OmegaAutomaton:
    """DcoBA -> DBA for the complement language; same states and transitions."""
    if a.kind != DCOBA:
        raise ValueError("expected a DcoBA")

    def delta(q, x):
        if q == _SINK:
            return (_SINK,)
        return a.step(q, x) or (_SINK,)

    def prio(q):
        if q == _SINK:
            return 2
        return 1 if a.priority(q) == 0 else 2

    return OmegaAutomaton(DBA, a.initial, delta, prio, a.n_states, "co-" + a.name, a.alphabet)


def complement_dpa(a: OmegaAutomaton) -> OmegaAutomaton:
    """Shift every priority by one; a stuck run of ``a`` becomes an accepting sink."""
    if a.kind != DPA:
        raise ValueError("expected a DPA")

    def delta(q, x):
        if q == _SINK:
            return (_SINK,)
        return a.step(q, x) or (_SINK,)

    def prio(q):
        return 0 if q == _SINK else a.priority(q) + 1

    return OmegaAutomaton(DPA, a.initial, delta, prio, a.n_states, "co-" + a.name, a.alphabet)


def mh_complement_ncoba(a: OmegaAutomaton) -> OmegaAutomaton:
    """Breakpoint construction: complement of an NcoBA as a DBA.

    States are pairs ``(S, O)``.  ``S`` holds every state some run can be in;
    ``O`` holds the runs that have stayed in the co-Büchi set since the last
    breakpoint.  When ``O`` empties, every such run has left the set at least
    once; these breakpoints are the final states.
    """
    if a.kind != NCOBA:
        raise ValueError("expected an NcoBA")

    def inside(q):
        return a.priority(q) == 0

    def delta(state, x):
        s, o = state
        s2 = frozenset(r for q in s for r in a.step(q, x))
        if o:
            o2 = frozenset(r for q in o for r in a.step(q, x) if inside(r))
        else:
            o2 = frozenset(r for r in s2 if inside(r))
        return ((s2, o2),)

    return OmegaAutomaton(DBA, (frozenset([a.initial]), frozenset()), delta,
                          lambda st: 2 if not st[1] else 1, name="mh-" + a.name,
                          alphabet=a.alphabet)


# ------------------------------------------------------------------ determinization


class SafraTree(NamedTuple):
    """Compact Safra tree: nodes ``(name, parent, label)`` sorted by name.

    Names are 1..m and preserve age order; the root is node 1.  A label is a
    bitmask over the NBA states in order of discovery (see ``states``).
    """
    nodes: tuple


def determinize_nba(a: OmegaAutomaton, n: int | None = None, recolour: bool = True) -> OmegaAutomaton:
    """Piterman-style determinization of an NBA into a DPA.

    Nodes of a compact Safra tree are named by age.  In every step, newly
    created children are appended, labels advance, states are kept only in the
    oldest branch, empty nodes vanish, and nodes covered by their children are
    collapsed and flagged.  The priority is decided by the smallest name that
    was removed (odd) or flagged (even), whichever is smaller; in max-parity
    form smaller names map to larger priorities.  ``n`` bounds the number of
    tree nodes; it defaults to the NBA's state count when known.

    NBA states are numbered on discovery so that labels are bitmasks; the
    returned automaton exposes the numbering as ``states``.  When the alphabet
    is known the reachable part is materialized and its priorities are
    recoloured to the optimal index (see ``minimize_priorities``).
    """
    if a.kind != NBA:
        raise ValueError("expected an NBA")
    if n is None:
        n = a.n_states if a.n_states is not None else 1 << 20
    ids: dict = {}
    states: list = []
    final = [0]
    image_cache: dict = {}

    def number(q) -> int:
        i = ids.get(q)
        if i is None:
            i = ids[q] = len(states)
            states.append(q)
            if a.is_final(q):
                final[0] |= 1 << i
        return i

    def image(mask: int, x) -> int:
        key = (mask, x)
        out = image_cache.get(key)
        if out is None:
            out = 0
            m = mask
            while m:
                low = m & -m
                for r in a.step(states[low.bit_length() - 1], x):
                    out |= 1 << number(r)
                m ^= low
            image_cache[key] = out
        return out

    def red(e):
        return 2 * (n - e) + 3

    def green(f):
        return 2 * (n - f) + 2

    def delta(state, x):
        tree, _ = state
        parent = {}
        label = {}
        for name, par, lab in tree.nodes:
            parent[name] = par
            label[name] = lab
        fresh = n + 1
        fin = final[0]
        for v in range(1, len(tree.nodes) + 1):
            acc = label[v] & fin
            if acc:
                parent[fresh] = v
                label[fresh] = acc
                fresh += 1
        for v in label:
            label[v] = image(label[v], x)
        children = {v: [] for v in label}
        for v in sorted(label):
            if parent[v] is not None:
                children[parent[v]].append(v)

        # keep each state only in the oldest branch
        def prune(v, allowed):
            label[v] &= allowed
            remaining = label[v]
            for c in children[v]:
                prune(c, remaining)
                remaining &= ~label[c]

        prune(1, label[1])
        removed = {v for v in label if not label[v]}
        greens = []

        def collapse(v):
            if v in removed:
                return
            kids = [c for c in children[v] if c not in removed]
            union = 0
            for c in kids:
                union |= label[c]
            if kids and union == label[v]:
                greens.append(v)
                stack = list(kids)
                while stack:
                    w = stack.pop()
                    removed.add(w)
                    stack.extend(children[w])
                return
            for c in kids:
                collapse(c)

        collapse(1)
        if 1 in removed:
            return ()
        alive = sorted(v for v in label if v not in removed)
        rename = {v: i + 1 for i, v in enumerate(alive)}
        nodes = tuple((rename[v], rename[parent[v]] if parent[v] is not None else None, label[v])
                      for v in alive)
        e = min((v for v in removed if v <= n), default=None)
        f = min(greens, default=None)
        pr = 1
        if e is not None:
            pr = max(pr, red(e))
        if f is not None:
            pr = max(pr, green(f))
        return ((SafraTree(nodes), pr),)

    # the colour is attached to the state reached, so a state is (tree, colour)
    init = (SafraTree(((1, None, 1 << number(a.initial)),)), 1)
    out = OmegaAutomaton(DPA, init, delta, lambda st: st[1], name="det-" + a.name,
                         alphabet=a.alphabet)
    if a.alphabet is not None and recolour:
        out = minimize_priorities(out)
    out.states = states
    return out


def minimize_priorities(a: OmegaAutomaton) -> OmegaAutomaton:
    """Recolour a deterministic parity automaton to the fewest priorities.

    Cycles keep the parity of their maximum, so the language is unchanged.
    States on no cycle receive an already used colour.
    """
    if a.kind != DPA or a.alphabet is None:
        raise ValueError("expected a DPA with a known alphabet")
    states = a.reachable(a.alphabet)
    g = nx.DiGraph()
    g.add_nodes_from(states)
    for q in states:
        for x in a.alphabet:
            for r in a.step(q, x):
                g.add_edge(q, r)
    colour = optimal_colouring(g, a.priority)
    filler = min(colour.values(), default=a.priority(a.initial))
    table = {q: colour.get(q, filler) for q in states}
    return OmegaAutomaton(DPA, a.initial, a.step, table.__getitem__, a.n_states, a.name, a.alphabet)


def optimal_colouring(g: nx.DiGraph, priority: Callable) -> dict:
    """Minimal parity recolouring of the states of ``g`` that lie on cycles.

    Works SCC by SCC: the top-priority states of an SCC get the smallest colour
    of the right parity that dominates the recursively recoloured rest.  Every
    cycle keeps the parity of its maximum.
    """
    colour = {}

    def recurse(nodes):
        sub = g.subgraph(nodes)
        for comp in nx.strongly_connected_components(sub):
            if len(comp) == 1:
                v = next(iter(comp))
                if not sub.has_edge(v, v):
                    continue
            top = max(priority(v) for v in comp)
            head = {v for v in comp if priority(v) == top}
            rest = comp - head
            recurse(rest)
            c = max((colour[v] for v in rest if v in colour), default=0)
            if c % 2 != top % 2:
                c += 1
            for v in head:
                colour[v] = c

    recurse(set(g.nodes))
    return colour


def piterman_bounds(n: int) -> tuple[int, int]:
    """(state bound n^(2n+2), index bound 2n-1) as stated for the construction."""
    return n ** (2 * n + 2), 2 * n - 1


def check_piterman_bound(n: int, n_states: int) -> bool:
    ok = n_states <= n ** (2 * n + 2)
    if not ok:
        warnings.warn(f"determinized automaton has {n_states} states, above n^(2n+2) for n={n}")
    return ok


# ------------------------------------------------------------------ products


def intersect_dba_dpa(a: OmegaAutomaton, b: OmegaAutomaton) -> OmegaAutomaton:
    """DBA x DPA -> DPA.

    The third component is the largest priority of ``b`` seen since ``a``
    last visited a final state; it is reported (shifted by two) at the next
    final state of ``a`` and reset afterwards.
    """
    if a.kind != DBA or b.kind != DPA:
        raise ValueError("expected a DBA and a DPA")

    def delta(state, x):
        q1, q2, p = state
        r1 = a.next(q1, x)
        r2 = b.next(q2, x)
        if r1 is None or r2 is None:
            return ()
        pb = b.priority(r2)
        p2 = pb if a.is_final(q1) else max(p, pb)
        return ((r1, r2, p2),)

    def prio(state):
        q1, _, p = state
        return p + 2 if a.is_final(q1) else 1

    init = (a.initial, b.initial, b.priority(b.initial))
    return OmegaAutomaton(DPA, init, delta, prio, name=f"{a.name}x{b.name}", alphabet=a.alphabet)


def intersect_dba_dcoba(a: OmegaAutomaton, b: OmegaAutomaton) -> OmegaAutomaton:
    """DBA x DcoBA -> NBA with a guessed switch into the co-Büchi set of ``b``."""
    if a.kind != DBA or b.kind != DCOBA:
        raise ValueError("expected a DBA and a DcoBA")

    def delta(state, x):
        q1, q2, flag = state
        r1 = a.next(q1, x)
        r2 = b.next(q2, x)
        if r1 is None or r2 is None:
            return ()
        inside = b.priority(r2) == 0
        if flag == 0:
            return ((r1, r2, 0), (r1, r2, 1)) if inside else ((r1, r2, 0),)
        return ((r1, r2, 1),) if inside else ()

    def prio(state):
        q1, q2, flag = state
        return 2 if flag == 1 and a.is_final(q1) and b.priority(q2) == 0 else 1

    return OmegaAutomaton(NBA, (a.initial, b.initial, 0), delta, prio, name=f"{a.name}x{b.name}",
                          alphabet=a.alphabet)


def intersect_dba_dba(a: OmegaAutomaton, b: OmegaAutomaton) -> OmegaAutomaton:
    """DBA x DBA -> DBA with a phase bit: wait for ``a``'s final, then ``b``'s."""
    if a.kind != DBA or b.kind != DBA:
        raise ValueError("expected two DBAs")

    def delta(state, x):
        q1, q2, phase = state
        r1 = a.next(q1, x)
        r2 = b.next(q2, x)
        if r1 is None or r2 is None:
            return ()
        if phase == 0 and a.is_final(q1):
            phase = 1
        elif phase == 1 and b.is_final(q2):
            phase = 0
        return ((r1, r2, phase),)

    def prio(state):
        _, q2, phase = state
        return 2 if phase == 1 and b.is_final(q2) else 1

    return OmegaAutomaton(DBA, (a.initial, b.initial, 0), delta, prio, name=f"{a.name}x{b.name}",
                          alphabet=a.alphabet)


def project_nba(c: OmegaAutomaton, right_letters: Callable) -> OmegaAutomaton:
    """Existential projection of an NBA over pair letters onto the left component."""
    if c.kind != NBA:
        raise ValueError("expected an NBA")

    def delta(q, x):
        return tuple(r for y in right_letters(x) for r in c.step(q, (x, y)))

    return OmegaAutomaton(NBA, c.initial, delta, c.priority, c.n_states, "proj-" + c.name)


# ------------------------------------------------------------------ lasso oracle


class LassoWord(NamedTuple):
    prefix: tuple
    cycle: tuple

    def letter(self, i: int):
        if i < len(self.prefix):
            return self.prefix[i]
        return self.cycle[(i - len(self.prefix)) % len(self.cycle)]

    def positions(self) -> int:
        return len(self.prefix) + len(self.cycle)

    def next_position(self, i: int) -> int:
        i += 1
        return i if i < self.positions() else len(self.prefix)


def lasso_accepts(a: OmegaAutomaton, w: LassoWord) -> bool:
    """Membership of ``u v^omega`` by search in the product with the lasso positions."""
    if not w.cycle:
        raise ValueError("lasso cycle must be non-empty")
    if a.alphabet is not None:
        stray = set(w.prefix + w.cycle) - set(a.alphabet)
        if stray:
            raise ValueError(f"letters outside the alphabet: {sorted(stray, key=repr)}")
    if a.deterministic:
        return _lasso_deterministic(a, w)
    g = nx.DiGraph()
    start = (a.initial, 0)
    seen = {start}
    stack = [start]
    while stack:
        q, i = stack.pop()
        g.add_node((q, i))
        for r in a.step(q, w.letter(i)):
            node = (r, w.next_position(i))
            g.add_edge((q, i), node)
            if node not in seen:
                seen.add(node)
                stack.append(node)
    loop = [v for v in g if v[1] >= len(w.prefix)]
    colours = sorted({a.priority(v[0]) for v in loop})
    for d in colours:
        if d % 2:
            continue
        sub = g.subgraph(v for v in loop if a.priority(v[0]) <= d)
        for comp in nx.strongly_connected_components(sub):
            if not any(a.priority(v[0]) == d for v in comp):
                continue
            if len(comp) > 1 or any(sub.has_edge(v, v) for v in comp):
                return True
    return False


def _lasso_deterministic(a: OmegaAutomaton, w: LassoWord) -> bool:
    q = a.initial
    for x in w.prefix:
        q = a.next(q, x)
        if q is None:
            return False
    # iterate whole cycles until the state at the cycle boundary repeats
    seen = set()
    while q not in seen:
        seen.add(q)
        for x in w.cycle:
            q = a.next(q, x)
            if q is None:
                return False
    colours = []
    r = q
    while True:
        for x in w.cycle:
            colours.append(a.priority(r))
            r = a.next(r, x)
        if r == q:
            break
    return max(colours) % 2 == 0

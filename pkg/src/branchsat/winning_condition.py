"""Deterministic acceptance automata for infinite plays.

Player 0 wins an infinite play iff it has no bad trace: no E-trace carrying a
U-thread and no A-trace without an R-thread.  Each fragment gets its own
automaton over play letters:

* CTL*: E-trace DBA intersected with the determinized complement of an NBA
  that guesses a bad A-trace (parity game).
* CTL+: E-trace DBA intersected with the breakpoint complement of a
  co-Büchi automaton for bad A-traces (Büchi game).
* CTL: a round-robin DBA over single formulas (Büchi game).
"""

from __future__ import annotations

from typing import NamedTuple

import networkx as nx

from .formula import FORALL, Fragment, FormulaTable, bits
from .game_core import (A, E, X0, Block, CtlRule, Game, RuleLetter,
                        X1Letter, is_modal)
from .omega_automata import (DBA, NBA, NCOBA, OmegaAutomaton, complement_dpa,
                             determinize_nba, intersect_dba_dba, intersect_dba_dpa,
                             mh_complement_ncoba, optimal_colouring)

PARITY, BUCHI = "parity", "buchi"


class EDbaState(NamedTuple):
    component: int
    block: int | None = None


class BadATraceState(NamedTuple):
    """Fused NBA state: marked block, breakpoint pair over thread guesses, flag.

    ``S`` and ``O`` contain closure indices of R/XR formulas of the marked
    block, plus ``WAIT`` for the run that has not yet picked a thread.
    """
    quant: int
    block: int
    s: frozenset
    o: frozenset
    flag: int


class CtlDbaState(NamedTuple):
    component: int
    formula: int | None = None


WAIT = -1


def build_e_dba(table: FormulaTable, game: Game | None = None,
                start_on_unfold: bool = False) -> OmegaAutomaton:
    """DBA accepting the plays without an E-trace that carries a U-thread.

    The ``k`` U-formulas of the closure are checked round-robin.  Component
    ``i`` waits for a modal letter; if the surviving E-block carries
    ``X(phi_i U psi_i)`` it follows that block until the U-formula is
    fulfilled in it (then moves on) or the block's trace ends (moves on).
    Staying in a tracking state forever means the thread is never fulfilled.
    Only the waiting state of component 0 is final.

    ``start_on_unfold`` starts tracking at the first unfolding of the U-formula
    in any E-block instead.  That variant can be misled by a spawned block
    that unfolds and fulfils the same formula first; it is kept for comparison.
    """
    game = game or Game(table)
    us = table.until_list
    k = len(us)
    if k == 0:
        return OmegaAutomaton(DBA, EDbaState(0), lambda q, r: (q,), lambda q: 2, name="e-dba")
    x_of = table.x_of

    def advance(i):
        return (EDbaState((i + 1) % k),)

    def delta(state, r):
        i, blk = state
        u = us[i]
        xu = 1 << x_of[u]
        if blk is None:
            if type(r) is X1Letter:
                if not start_on_unfold and r.block & xu:
                    return (EDbaState(i, game.strip(r.block)),)
                return advance(i)
            if r is X0:
                return advance(i)
            if (start_on_unfold and type(r) is RuleLetter and r.quant == E
                    and r.formula == u and r.branch == 1):
                return (EDbaState(i, game.con_e(r, r.block)),)
            return (state,)
        if r is X0:
            raise RuntimeError("X0 letter while an E-block is tracked")
        if type(r) is RuleLetter and r.quant == E and r.block == blk and r.formula == u and r.branch == 0:
            return advance(i)
        if type(r) is X1Letter:
            if r.block == blk and blk & xu:
                return (EDbaState(i, game.strip(blk)),)
            return advance(i)
        nxt = game.con_e(r, blk)
        if nxt is None:
            return advance(i)
        return (EDbaState(i, nxt),)

    def prio(state):
        return 2 if state == EDbaState(0) else 1

    return OmegaAutomaton(DBA, EDbaState(0), delta, prio, name="e-dba")


def build_bad_a_nba(table: FormulaTable, game: Game | None = None) -> OmegaAutomaton:
    """NBA accepting the plays that contain an A-trace without an R-thread.

    The run guesses a trace by following block connections from the initial
    block.  Alongside it keeps a breakpoint pair over the nondeterministic
    thread tracker: that tracker idles in ``WAIT`` and may jump onto any
    R/XR formula of an A-block, then follows the formula's descendants within
    R/XR shapes and dies when the block turns E or the formula disappears.
    A breakpoint (``O`` empty) infinitely often means every guessed thread
    dies, i.e. the trace has no R-thread.  The flag commits to the trace being
    A-quantified from some point on; final states need flag 1, an A-block and
    an empty ``O``.  Threads are only tracked after the commitment: an
    R-thread eventually consists of R/XR formulas only, so its part after the
    commitment is itself a thread the tracker can jump onto.
    """
    game = game or Game(table)
    flr = table.fl_r_mask

    def thread_step(q, b, edge):
        """Thread-tracker successors of ``q`` along one connection."""
        nb = edge.block
        if q == WAIT:
            out = {WAIT}
            if nb.quant == A:
                out.update(bits(nb.mask & flr))
            return out
        if b.quant != A or nb.quant != A:
            return ()
        return bits(game.edge_images(edge, q) & flr)

    idle = frozenset([WAIT])

    def delta(state, r):
        b = Block(state.quant, state.block)
        out = []
        for edge in game.connections(r, b):
            nb = edge.block
            if state.flag == 0:
                out.append(BadATraceState(nb.quant, nb.mask, idle, frozenset(), 0))
            if nb.quant != A:
                continue
            s2 = frozenset(x for q in state.s for x in thread_step(q, b, edge))
            if state.o:
                o2 = frozenset(x for q in state.o for x in thread_step(q, b, edge) if x != WAIT)
            else:
                o2 = frozenset(x for x in s2 if x != WAIT)
            out.append(BadATraceState(nb.quant, nb.mask, s2, o2, 1))
        return out

    def prio(state):
        return 2 if state.flag == 1 and not state.o and state.quant == A else 1

    init = BadATraceState(E, 1 << table.root_index, frozenset([WAIT]), frozenset(), 0)
    return OmegaAutomaton(NBA, init, delta, prio, name="bad-a-nba")


def build_a_dpa(table: FormulaTable, game: Game | None = None) -> OmegaAutomaton:
    """DPA accepting the plays without a bad A-trace."""
    return complement_dpa(determinize_nba(build_bad_a_nba(table, game)))


def build_ctlplus_bad_a_ncoba(table: FormulaTable, game: Game | None = None) -> OmegaAutomaton:
    """NcoBA accepting the plays with a bad A-trace, for CTL+ inputs.

    Waits, jumps onto the A-block created by a spawning letter, follows the
    block through non-spawning connections and checks, once a modal letter
    has passed, whether the block ever lacks every R/XR formula.
    """
    game = game or Game(table)
    flr = table.fl_r_mask
    kind, left = table.kind, table.left

    def delta(state, r):
        if state == WAIT:
            out = [WAIT]
            if type(r) is RuleLetter and kind[r.formula] == FORALL and (r.quant == E or r.branch == 0):
                body = 1 << left[r.formula]
                out.append((body, 0))
            return out
        mask, flag = state
        out = []
        for edge in game.connections(r, Block(A, mask)):
            if edge.spawning:
                continue
            f = flag
            if f == 0 and is_modal(r):
                f = 1
            if f == 1 and not edge.block.mask & flr:
                f = 2
            out.append((edge.block.mask, f))
        return out

    def prio(state):
        return 0 if state != WAIT and state[1] == 2 else 1

    return OmegaAutomaton(NCOBA, WAIT, delta, prio, name="ctlplus-bad-a")


def build_ctl_dba(table: FormulaTable) -> OmegaAutomaton:
    """Round-robin DBA over the U-state-formulas ``Q(phi U psi)`` of a CTL input.

    Component ``i`` waits for a modal letter.  If the refolded formula
    ``QX Q(phi_i U psi_i)`` survives it, the component follows that single
    formula (at most three shapes: waiting, the U-formula, its refolding)
    until it is fulfilled or dropped by a later modal letter, then moves on.
    Accepts iff the play has no U-thread.
    """
    us = table.ctl_until_list
    k = len(us)
    if k == 0:
        return OmegaAutomaton(DBA, CtlDbaState(0), lambda q, r: (q,), lambda q: 2, name="ctl-dba")
    refold = table.ctl_unfold

    def advance(i):
        return (CtlDbaState((i + 1) % k),)

    def delta(state, r):
        i, chi = state
        u = us[i]
        if is_modal(r):
            if r.survivors >> refold[u] & 1:
                return (CtlDbaState(i, u),)
            return advance(i)
        if chi == u and type(r) is CtlRule and r.formula == u:
            return advance(i) if r.branch == 0 else (CtlDbaState(i, refold[u]),)
        return (state,)

    def prio(state):
        return 2 if state == CtlDbaState(0) else 1

    return OmegaAutomaton(DBA, CtlDbaState(0), delta, prio, name="ctl-dba")


class Acceptance(NamedTuple):
    automaton: OmegaAutomaton
    kind: str
    parts: dict


def build_acceptance(table: FormulaTable, fragment: Fragment, game=None) -> Acceptance:
    """Acceptance automaton, game kind and named components for ``fragment``."""
    if fragment < table.fragment:
        raise ValueError(f"formula is {table.fragment.name}, cannot use the {fragment.name} pipeline")
    if fragment == Fragment.CTL:
        dba = build_ctl_dba(table)
        return Acceptance(dba, BUCHI, {"ctl_dba": dba})
    game = game or Game(table)
    e_dba = build_e_dba(table, game)
    if fragment == Fragment.CTLPLUS:
        ncoba = build_ctlplus_bad_a_ncoba(table, game)
        no_bad_a = mh_complement_ncoba(ncoba)
        both = intersect_dba_dba(e_dba, no_bad_a)
        return Acceptance(both, BUCHI, {"e_dba": e_dba, "ncoba": ncoba, "mh": no_bad_a})
    nba = build_bad_a_nba(table, game)
    dpa = determinize_nba(nba)
    a_dpa = complement_dpa(dpa)
    both = intersect_dba_dpa(e_dba, a_dpa)
    return Acceptance(both, PARITY, {"e_dba": e_dba, "nba": nba, "dpa": dpa, "a_dpa": a_dpa})


def explored_index(a: OmegaAutomaton) -> int:
    """Fewest priorities a DPA needs on the transitions explored so far."""
    g = nx.DiGraph()
    g.add_nodes_from(a.explored_states())
    g.add_edges_from((q, r) for q, _, r in a.explored_edges())
    colours = optimal_colouring(g, a.priority)
    return len(set(colours.values())) if colours else 1


def size_report(table: FormulaTable, acc: Acceptance) -> dict:
    """Observed component sizes next to the bounds proven for them."""
    k_e = len(table.until_list)
    n_fl = len(table.fl)
    out = {}
    p = acc.parts
    if "e_dba" in p:
        out["e_dba_states"] = len(p["e_dba"].explored_states())
        out["e_dba_bound"] = max(1, k_e) * (1 + 2 ** n_fl)
    if "ctl_dba" in p:
        k = len(table.ctl_until_list)
        out["ctl_dba_states"] = len(p["ctl_dba"].explored_states())
        out["ctl_dba_bound"] = max(1, k) * (1 + 3 * table.size_of_root)
    if "mh" in p:
        n = len(p["ncoba"].explored_states())
        out["ncoba_states"] = n
        out["mh_states"] = len(p["mh"].explored_states())
        out["mh_bound"] = 3 ** n
    if "dpa" in p:
        n = len(p["nba"].explored_states())
        out["nba_states"] = n
        out["dpa_states"] = len(p["dpa"].explored_states())
        out["dpa_index"] = explored_index(p["dpa"])
        out["dpa_index_bound"] = 2 * n - 1
        a_dpa = p["a_dpa"]
        k = len({a_dpa.priority(q) for q in a_dpa.explored_states()})
        out["product_priorities"] = len({acc.automaton.priority(q) for q in acc.automaton.explored_states()})
        out["product_priorities_bound"] = k + 1
    return out

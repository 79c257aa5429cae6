"""Random formulas of each fragment and fixed formula families for testing."""

from __future__ import annotations

import random

from .formula import (Formula, Fragment, classify_fragment, conj, disj, exists, fl_closure,
                      forall, neg, nxt, parse, prop, release, to_nnf, tt, until)

PROPS = ("p", "q")


def _atom(rng: random.Random, props) -> Formula:
    f = prop(rng.choice(props))
    return neg(f) if rng.random() < 0.4 else f


def random_ctl(rng: random.Random, depth: int = 3, props=PROPS) -> Formula:
    if depth <= 0 or rng.random() < 0.2:
        return _atom(rng, props)
    sub = lambda: random_ctl(rng, depth - 1, props)
    q = rng.choice((exists, forall))
    op = rng.randrange(8)
    if op in (0, 7):
        return conj(sub(), sub())
    if op == 1:
        return disj(sub(), sub())
    if op == 2:
        return neg(sub())
    if op == 3:
        return q(nxt(sub()))
    if op == 4:
        return q(until(sub(), sub()))
    if op == 5:
        return q(release(sub(), sub()))
    return q(until(tt(), sub()))


def _path_plus(rng: random.Random, depth: int, props) -> Formula:
    """Boolean combination of X, U, R over state formulas (a CTL+ path formula)."""
    state = lambda: random_ctlplus(rng, depth - 1, props)
    if depth <= 1 or rng.random() < 0.5:
        op = rng.randrange(4)
        if op == 0:
            return nxt(state())
        if op == 1:
            return until(state(), state())
        if op == 2:
            return release(state(), state())
        return state()
    a, b = _path_plus(rng, depth - 1, props), _path_plus(rng, depth - 1, props)
    return conj(a, b) if rng.random() < 0.5 else disj(a, b)


def random_ctlplus(rng: random.Random, depth: int = 3, props=PROPS) -> Formula:
    if depth <= 0 or rng.random() < 0.2:
        return _atom(rng, props)
    op = rng.randrange(5)
    sub = lambda: random_ctlplus(rng, depth - 1, props)
    if op in (0, 4):
        return conj(sub(), sub())
    if op == 1:
        return disj(sub(), sub())
    return rng.choice((exists, forall))(_path_plus(rng, depth, props))


def _path_star(rng: random.Random, depth: int, props) -> Formula:
    if depth <= 0 or rng.random() < 0.15:
        return _atom(rng, props)
    sub = lambda: _path_star(rng, depth - 1, props)
    op = rng.randrange(8)
    if op == 0:
        return conj(sub(), sub())
    if op == 1:
        return disj(sub(), sub())
    if op == 2:
        return neg(sub())
    if op == 3:
        return nxt(sub())
    if op == 4:
        return until(sub(), sub())
    if op == 5:
        return release(sub(), sub())
    return rng.choice((exists, forall))(sub())


def random_ctlstar(rng: random.Random, depth: int = 3, props=PROPS) -> Formula:
    return rng.choice((exists, forall))(_path_star(rng, depth, props))


GENERATORS = {Fragment.CTL: random_ctl, Fragment.CTLPLUS: random_ctlplus, Fragment.CTLSTAR: random_ctlstar}


def sample(rng: random.Random, fragment: Fragment, max_size: int, depth: int = 3,
           props=PROPS, exact_fragment: bool = False) -> Formula:
    """NNF formula of ``fragment`` with at most ``max_size`` distinct subformulas.

    Half of the samples are conjunctions of two independent parts, which
    keeps unsatisfiable instances common.  With ``exact_fragment`` the
    formula is not in any smaller fragment.
    """
    gen = GENERATORS[fragment]
    while True:
        if rng.random() < 0.5:
            f = to_nnf(conj(gen(rng, depth - 1, props), gen(rng, depth - 1, props)))
        else:
            f = to_nnf(gen(rng, depth, props))
        frag = classify_fragment(f)
        if frag > fragment or (exact_fragment and frag != fragment):
            continue
        if fl_closure(f).size_of_root <= max_size:
            return f


def width_formula(n: int) -> Formula:
    """A formula whose models need a state with at least ``n`` successors.

    The i-th EX demands a successor where p_i fails and p_(i+1) holds, and the
    AX conjuncts make the set of true p_j upward closed, so these successors
    are pairwise distinct.
    """
    parts = [f"E X (!p{i} & p{i + 1})" for i in range(n)]
    parts += [f"A X (p{i} -> p{i + 1})" for i in range(n)]
    return to_nnf(parse(" & ".join(parts)))

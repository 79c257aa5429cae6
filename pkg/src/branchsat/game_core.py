"""Configurations and the rules of the satisfiability game.

A block is a quantifier plus a formula set, encoded as a bitmask over closure
indices.  A configuration is a frozenset of blocks plus a literal mask.
Successor generation follows a fixed schedule: the principal formula is always
a largest non-X formula, which both prunes the game and bounds the branching
width of extracted models.

The CTL game works on plain formula sets and has its own, smaller rule set.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

from .formula import (AND, EXISTS, FORALL, LITERAL_KINDS, NEXT, OR, PROP, RELEASE,
                      TT, UNTIL, FormulaTable, bits)

A, E = 0, 1
PLAYER0, PLAYER1 = 0, 1


class Block(NamedTuple):
    quant: int
    mask: int


class Configuration(NamedTuple):
    blocks: frozenset
    literals: int


class RuleLetter(NamedTuple):
    """Application of a block rule: quantifier, principal block, principal formula, branch."""
    quant: int
    block: int
    formula: int
    branch: int


class X1Letter(NamedTuple):
    block: int


class Marker(NamedTuple):
    name: str


ETT = Marker("Ett")
X0 = Marker("X0")


class Edge(NamedTuple):
    """One connection of a block into the successor configuration.

    ``images`` holds the descendants of the principal formula inside ``block``;
    ``copies`` says whether the other formulas of the source block are copied.
    """
    block: Block
    spawning: bool
    principal: int
    images: int
    copies: bool


class Successor(NamedTuple):
    letter: object
    config: Configuration
    consistent: bool


class Expansion(NamedTuple):
    owner: int
    successors: list
    stuck: bool = False
    modal: bool = False


def is_modal(letter) -> bool:
    return letter is X0 or type(letter) in (X1Letter, CtlX0, CtlX1)


class Game:
    """Rule engine of the CTL* game over one formula table."""

    def __init__(self, table: FormulaTable):
        self.t = table
        self._rank = {}
        order = sorted(range(len(table)), key=lambda i: (-table.size[i], i))
        for r, i in enumerate(order):
            self._rank[i] = r
        self.expand_rule = lru_cache(maxsize=None)(self._expand_rule)
        self.strip = lru_cache(maxsize=None)(self._strip)

    # ---------------------------------------------------------------- basics

    def initial_configuration(self) -> Configuration:
        return Configuration(frozenset([Block(E, 1 << self.t.root_index)]), 0)

    def is_consistent(self, c: Configuration) -> bool:
        lits = c.literals
        if self.t.ff_index >= 0 and lits >> self.t.ff_index & 1:
            return False
        return all(lits & pair != pair for pair in self.t.complementary)

    def _strip(self, mask: int) -> int:
        left = self.t.left
        out = 0
        for i in bits(mask):
            out |= 1 << left[i]
        return out

    def select_principal(self, c: Configuration):
        """Return ``(block, formula)`` of the scheduled rule, or None in the modal stage."""
        xm = self.t.x_mask
        rank = self._rank
        best = None
        for b in c.blocks:
            cand = b.mask & ~xm
            if not cand:
                continue
            f = min(bits(cand), key=rank.__getitem__)
            key = (rank[f], b.quant, tuple(bits(b.mask)))
            if best is None or key < best[0]:
                best = (key, b, f)
        if best is None:
            return None
        return best[1], best[2]

    # ---------------------------------------------------------------- rules

    def _expand_rule(self, quant: int, mask: int, f: int):
        """Branches of the rule whose principal is ``f`` in block ``(quant, mask)``.

        Each branch is ``(edges, literal)``; ``literal`` is the closure index
        moved into the literal part, or -1.
        """
        t = self.t
        k = t.kind[f]
        rest = mask & ~(1 << f)
        left, right = t.left[f], t.right[f]
        lb, rb = 1 << left if left >= 0 else 0, 1 << right if right >= 0 else 0

        def keep(q, images):
            return Edge(Block(q, rest | images), False, f, images, True)

        def spawn(q):
            return Edge(Block(q, lb), True, f, lb, False)

        if k in LITERAL_KINDS:
            lit = -1 if k == TT else f
            if quant == A:
                return (((), lit), ((keep(A, 0),), -1))
            return (((keep(E, 0),), lit),)
        if k in (UNTIL, RELEASE):
            xb = 1 << t.x_of[f]
        if quant == A:
            if k == AND:
                return (((keep(A, lb), keep(A, rb)), -1),)
            if k == OR:
                return (((keep(A, lb | rb),), -1),)
            if k == UNTIL:
                return (((keep(A, rb | lb), keep(A, rb | xb)), -1),)
            if k == RELEASE:
                return (((keep(A, rb), keep(A, lb | xb)), -1),)
            if k == FORALL:
                return (((spawn(A),), -1), ((keep(A, 0),), -1))
            if k == EXISTS:
                return (((spawn(E),), -1), ((keep(A, 0),), -1))
        else:
            if k == OR:
                return (((keep(E, lb),), -1), ((keep(E, rb),), -1))
            if k == AND:
                return (((keep(E, lb | rb),), -1),)
            if k == UNTIL:
                return (((keep(E, rb),), -1), ((keep(E, lb | xb),), -1))
            if k == RELEASE:
                return (((keep(E, rb | lb),), -1), ((keep(E, rb | xb),), -1))
            if k == EXISTS:
                return (((spawn(E), keep(E, 0)), -1),)
            if k == FORALL:
                return (((spawn(A), keep(E, 0)), -1),)
        raise AssertionError(f"no rule for {k} in block")

    def successors(self, c: Configuration) -> Expansion:
        blocks = c.blocks
        empty_e = Block(E, 0)
        if empty_e in blocks:
            nc = Configuration(blocks - {empty_e}, c.literals)
            return Expansion(PLAYER0, [Successor(ETT, nc, True)])
        if Block(A, 0) in blocks:
            return Expansion(PLAYER0, [], stuck=True)
        chosen = self.select_principal(c)
        if chosen is not None:
            b, f = chosen
            rest = blocks - {b}
            out = []
            for branch, (edges, lit) in enumerate(self.expand_rule(b.quant, b.mask, f)):
                nb = rest.union(e.block for e in edges)
                lits = c.literals | (1 << lit if lit >= 0 else 0)
                nc = Configuration(nb, lits)
                out.append(Successor(RuleLetter(b.quant, b.mask, f, branch), nc,
                                     self.is_consistent(nc)))
            return Expansion(PLAYER0, out)
        if not blocks:
            return Expansion(PLAYER0, [])
        a_blocks = frozenset(Block(A, self.strip(b.mask)) for b in blocks if b.quant == A)
        e_blocks = sorted((b for b in blocks if b.quant == E), key=lambda b: tuple(bits(b.mask)))
        if not e_blocks:
            return Expansion(PLAYER0, [Successor(X0, Configuration(a_blocks, 0), True)],
                             modal=True)
        out = []
        for b in e_blocks:
            nc = Configuration(a_blocks | {Block(E, self.strip(b.mask))}, 0)
            out.append(Successor(X1Letter(b.mask), nc, True))
        return Expansion(PLAYER1, out, modal=True)

    # ---------------------------------------------------------------- connections

    def connections(self, letter, b: Block) -> list:
        """All connection edges leaving block ``b`` under ``letter``."""
        if type(letter) is RuleLetter:
            if letter.quant == b.quant and letter.block == b.mask:
                return list(self.expand_rule(b.quant, b.mask, letter.formula)[letter.branch][0])
            return [Edge(b, False, -1, 0, True)]
        if letter is ETT:
            return [] if b == (E, 0) else [Edge(b, False, -1, 0, True)]
        if letter is X0:
            if b.quant != A:
                raise ValueError("X0 applied to a configuration with an E-block")
            return [Edge(Block(A, self.strip(b.mask)), False, -2, 0, False)]
        if type(letter) is X1Letter:
            if b.quant == A or b.mask == letter.block:
                return [Edge(Block(b.quant, self.strip(b.mask)), False, -2, 0, False)]
            return []
        raise TypeError(f"not a play letter: {letter!r}")

    def edge_images(self, edge: Edge, chi: int) -> int:
        """Mask of formulas in ``edge.block`` connected to ``chi``."""
        if edge.principal == -2:
            return 1 << self.t.left[chi] if self.t.kind[chi] == NEXT else 0
        if chi == edge.principal:
            return edge.images
        if edge.copies and edge.block.mask >> chi & 1:
            return 1 << chi
        return 0

    def block_descendants(self, letter, b: Block) -> list[tuple[Block, bool]]:
        return [(e.block, e.spawning) for e in self.connections(letter, b)]

    def formula_descendants(self, letter, b: Block, chi: int, b2: Block) -> set[int]:
        if not b.mask >> chi & 1:
            raise ValueError("formula not in block")
        out = 0
        for e in self.connections(letter, b):
            if e.block == b2:
                out |= self.edge_images(e, chi)
        return set(bits(out))

    def con_e(self, letter, mask: int):
        """Non-spawning E-successor of the E-block ``mask``, or None when its trace ends."""
        for e in self.connections(letter, Block(E, mask)):
            if not e.spawning and e.block.quant == E:
                return e.block.mask
        return None

    def positive_props(self, c: Configuration) -> frozenset[str]:
        return _positive(self.t, c.literals)

    # ---------------------------------------------------------------- display

    def show_block(self, b: Block) -> str:
        inner = ", ".join(self.t.text(i) for i in bits(b.mask))
        return ("A" if b.quant == A else "E") + "(" + inner + ")"

    def show(self, c: Configuration) -> str:
        parts = [self.show_block(b) for b in sorted(c.blocks, key=lambda b: (b.quant, tuple(bits(b.mask))))]
        parts += [self.t.text(i) for i in bits(c.literals)]
        return ", ".join(parts) if parts else "tt"

    def show_letter(self, letter) -> str:
        if type(letter) is RuleLetter:
            q = "A" if letter.quant == A else "E"
            return f"({q}, {self.show_block(Block(letter.quant, letter.block))}, " \
                   f"{self.t.text(letter.formula)}, {letter.branch})"
        if type(letter) is X1Letter:
            return f"(X1, {self.show_block(Block(E, letter.block))})"
        return letter.name


# -------------------------------------------------------------------- CTL


class CtlRule(NamedTuple):
    formula: int
    branch: int


class CtlX0(NamedTuple):
    """(X0) in the CTL game; ``survivors`` are the AX formulas whose bodies move on."""
    survivors: int


class CtlX1(NamedTuple):
    """(X1) choosing the EX formula ``formula``; ``survivors`` adds the AX formulas."""
    formula: int
    survivors: int


CtlConfiguration = int


class CtlGame:
    """Rule engine of the CTL game; configurations are formula masks."""

    def __init__(self, table: FormulaTable):
        self.t = table
        t = table
        self._rank = {i: r for r, i in enumerate(sorted(range(len(t)), key=lambda i: (-t.size[i], i)))}
        self.modal_mask = 0
        for i in range(len(t)):
            if t.kind[i] in (EXISTS, FORALL) and t.kind[t.left[i]] == NEXT:
                self.modal_mask |= 1 << i
        self.passive_mask = self.modal_mask
        for i in range(len(t)):
            if t.kind[i] in LITERAL_KINDS:
                self.passive_mask |= 1 << i

    def initial_configuration(self) -> int:
        return self._clean(1 << self.t.root_index)

    def _clean(self, mask: int) -> int:
        if self.t.tt_index >= 0:
            mask &= ~(1 << self.t.tt_index)
        return mask

    def is_consistent(self, c: int) -> bool:
        if self.t.ff_index >= 0 and c >> self.t.ff_index & 1:
            return False
        return all(c & pair != pair for pair in self.t.complementary)

    def body(self, i: int) -> int:
        """Body of the modal formula ``QX body``."""
        return self.t.left[self.t.left[i]]

    def select_principal(self, c: int):
        cand = c & ~self.passive_mask
        if not cand:
            return None
        return min(bits(cand), key=self._rank.__getitem__)

    def rule(self, f: int) -> list[int]:
        """Successor sets (as masks) replacing ``f``, one per branch."""
        t = self.t
        k = t.kind[f]
        if k == AND:
            return [1 << t.left[f] | 1 << t.right[f]]
        if k == OR:
            return [1 << t.left[f], 1 << t.right[f]]
        path = t.left[f]
        a, b = t.left[path], t.right[path]
        refold = 1 << t.ctl_unfold[f]
        if t.kind[path] == UNTIL:
            return [1 << b, 1 << a | refold]
        if t.kind[path] == RELEASE:
            return [1 << a | 1 << b, 1 << b | refold]
        raise AssertionError(f"no CTL rule for {t.text(f)}")

    def successors(self, c: int) -> Expansion:
        f = self.select_principal(c)
        if f is not None:
            rest = c & ~(1 << f)
            out = []
            for branch, add in enumerate(self.rule(f)):
                nc = self._clean(rest | add)
                out.append(Successor(CtlRule(f, branch), nc, self.is_consistent(nc)))
            return Expansion(PLAYER0, out)
        modal = c & self.modal_mask
        if not modal:
            return Expansion(PLAYER0, [])
        t = self.t
        a_bodies = 0
        a_mask = 0
        e_list = []
        for i in bits(modal):
            if t.kind[i] == FORALL:
                a_bodies |= 1 << self.body(i)
                a_mask |= 1 << i
            else:
                e_list.append(i)
        if not e_list:
            nc = self._clean(a_bodies)
            return Expansion(PLAYER0, [Successor(CtlX0(a_mask), nc, self.is_consistent(nc))], modal=True)
        out = []
        for i in e_list:
            nc = self._clean(a_bodies | 1 << self.body(i))
            out.append(Successor(CtlX1(i, a_mask | 1 << i), nc, self.is_consistent(nc)))
        return Expansion(PLAYER1, out, modal=True)

    def positive_props(self, c: int) -> frozenset[str]:
        return _positive(self.t, c)

    def show(self, c: int) -> str:
        return "{" + ", ".join(self.t.text(i) for i in bits(c)) + "}"


def _positive(t: FormulaTable, mask: int) -> frozenset[str]:
    return frozenset(t.formulas[i].name for i in bits(mask) if t.kind[i] == PROP)

"""Formulas: parsing, negation normal form, Fischer-Ladner closure, fragments.

Formulas are immutable trees.  Structural equality is value equality, so a
``FormulaTable`` can hash-cons them into dense integer indices.  All later
stages work on those indices.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

TT, FF, PROP, NEGPROP = "tt", "ff", "prop", "negprop"
AND, OR, NEXT, UNTIL, RELEASE, EXISTS, FORALL = "and", "or", "X", "U", "R", "E", "A"
# only present before NNF
NOT, IMPLIES = "not", "implies"

LITERAL_KINDS = frozenset({TT, FF, PROP, NEGPROP})
BINARY_KINDS = frozenset({AND, OR, UNTIL, RELEASE, IMPLIES})


@dataclass(frozen=True)
class Formula:
    kind: str
    args: tuple = ()
    name: str | None = None

    def __str__(self) -> str:
        return to_text(self)

    @property
    def left(self) -> "Formula":
        return self.args[0]

    @property
    def right(self) -> "Formula":
        return self.args[-1]


def tt() -> Formula:
    return Formula(TT)


def ff() -> Formula:
    return Formula(FF)


def prop(name: str) -> Formula:
    return Formula(PROP, (), name)


def negprop(name: str) -> Formula:
    return Formula(NEGPROP, (), name)


def conj(a: Formula, b: Formula) -> Formula:
    return Formula(AND, (a, b))


def disj(a: Formula, b: Formula) -> Formula:
    return Formula(OR, (a, b))


def nxt(a: Formula) -> Formula:
    return Formula(NEXT, (a,))


def until(a: Formula, b: Formula) -> Formula:
    return Formula(UNTIL, (a, b))


def release(a: Formula, b: Formula) -> Formula:
    return Formula(RELEASE, (a, b))


def exists(a: Formula) -> Formula:
    return Formula(EXISTS, (a,))


def forall(a: Formula) -> Formula:
    return Formula(FORALL, (a,))


def neg(a: Formula) -> Formula:
    return Formula(NOT, (a,))


def eventually(a: Formula) -> Formula:
    return until(tt(), a)


def always(a: Formula) -> Formula:
    return release(ff(), a)


def conj_all(items) -> Formula:
    items = list(items)
    if not items:
        return tt()
    out = items[-1]
    for f in reversed(items[:-1]):
        out = conj(f, out)
    return out


# ---------------------------------------------------------------- parsing


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.column = col


_TOKEN = re.compile(r"\s*(?:(->)|([!XFGEAUR&|()])|([a-z][a-zA-Z0-9_]*))")
_UNARY = {"!": neg, "X": nxt, "F": eventually, "G": always, "E": exists, "A": forall}


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        tok = m.group(1) or m.group(2) or m.group(3)
        tokens.append((tok, m.start(m.lastindex)))
        pos = m.end()
    tokens.append(("<end>", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def take(self) -> str:
        tok = self.tokens[self.i][0]
        self.i += 1
        return tok

    def fail(self, message: str):
        tok, pos = self.tokens[self.i]
        if tok == "<end>":
            raise ParseError(f"{message}, found end of input", self.text, pos)
        raise ParseError(f"{message}, found {tok!r}", self.text, pos)

    def parse(self) -> Formula:
        f = self.implication()
        if self.peek() != "<end>":
            self.fail("expected end of input")
        return f

    def implication(self) -> Formula:
        lhs = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Formula(IMPLIES, (lhs, self.implication()))
        return lhs

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek() == "|":
            self.take()
            f = disj(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.temporal()
        while self.peek() == "&":
            self.take()
            f = conj(f, self.temporal())
        return f

    def temporal(self) -> Formula:
        lhs = self.unary()
        if self.peek() in ("U", "R"):
            op = self.take()
            rhs = self.temporal()
            return until(lhs, rhs) if op == "U" else release(lhs, rhs)
        return lhs

    def unary(self) -> Formula:
        tok = self.peek()
        if tok in _UNARY:
            self.take()
            return _UNARY[tok](self.unary())
        if tok == "(":
            self.take()
            f = self.implication()
            if self.peek() != ")":
                self.fail("expected ')'")
            self.take()
            return f
        if tok == "tt":
            self.take()
            return tt()
        if tok == "ff":
            self.take()
            return ff()
        if tok[0].islower():
            self.take()
            return prop(tok)
        self.fail("expected a formula")


def parse(text: str) -> Formula:
    """Parse the ASCII syntax.  The result may still contain ``!`` and ``->``."""
    return _Parser(text).parse()


def to_text(f: Formula) -> str:
    """Print ``f`` so that ``parse(to_text(f)) == f``.  F and G are re-sugared."""
    k = f.kind
    if k in (TT, FF):
        return k
    if k == PROP:
        return f.name
    if k == NEGPROP:
        return "!" + f.name
    if k == UNTIL and f.left.kind == TT:
        return "F " + _operand(f.right)
    if k == RELEASE and f.left.kind == FF:
        return "G " + _operand(f.right)
    if k in (NEXT, EXISTS, FORALL):
        return k + " " + _operand(f.args[0])
    if k == NOT:
        return "!" + _operand(f.args[0])
    op = {AND: "&", OR: "|", UNTIL: "U", RELEASE: "R", IMPLIES: "->"}[k]
    return f"{_operand(f.left)} {op} {_operand(f.right)}"


def _operand(f: Formula) -> str:
    s = to_text(f)
    if f.kind in BINARY_KINDS and not _is_sugar(f):
        return "(" + s + ")"
    return s


def _is_sugar(f: Formula) -> bool:
    return (f.kind == UNTIL and f.left.kind == TT) or (f.kind == RELEASE and f.left.kind == FF)


# ---------------------------------------------------------------- NNF


def to_nnf(f: Formula, negate: bool = False) -> Formula:
    """Push negations to the propositions (De Morgan, U/R and E/A duality)."""
    k = f.kind
    if k == NOT:
        return to_nnf(f.args[0], not negate)
    if k == IMPLIES:
        return to_nnf(disj(neg(f.left), f.right), negate)
    if k == TT:
        return ff() if negate else f
    if k == FF:
        return tt() if negate else f
    if k == PROP:
        return negprop(f.name) if negate else f
    if k == NEGPROP:
        return prop(f.name) if negate else f
    if k in (NEXT, EXISTS, FORALL):
        dual = {NEXT: NEXT, EXISTS: FORALL, FORALL: EXISTS}[k] if negate else k
        return Formula(dual, (to_nnf(f.args[0], negate),))
    dual = {AND: OR, OR: AND, UNTIL: RELEASE, RELEASE: UNTIL}[k] if negate else k
    return Formula(dual, (to_nnf(f.left, negate), to_nnf(f.right, negate)))


def is_nnf(f: Formula) -> bool:
    if f.kind in (NOT, IMPLIES):
        return False
    return all(is_nnf(a) for a in f.args)


def negation(f: Formula) -> Formula:
    """NNF of the negation of ``f``."""
    return to_nnf(f, negate=True)


def propositions(f: Formula) -> set[str]:
    if f.kind in (PROP, NEGPROP):
        return {f.name}
    out = set()
    for a in f.args:
        out |= propositions(a)
    return out


def tree_size(f: Formula) -> int:
    return 1 + sum(tree_size(a) for a in f.args)


# ---------------------------------------------------------------- fragments


class Fragment(enum.IntEnum):
    CTL = 0
    CTLPLUS = 1
    CTLSTAR = 2

    @classmethod
    def from_name(cls, name: str) -> "Fragment":
        return {"ctl": cls.CTL, "ctlplus": cls.CTLPLUS, "ctl+": cls.CTLPLUS,
                "ctlstar": cls.CTLSTAR, "ctl*": cls.CTLSTAR}[name.lower()]


def _ctl_state(f: Formula) -> bool:
    k = f.kind
    if k in LITERAL_KINDS:
        return True
    if k in (AND, OR):
        return _ctl_state(f.left) and _ctl_state(f.right)
    if k in (EXISTS, FORALL):
        p = f.args[0]
        if p.kind == NEXT:
            return _ctl_state(p.args[0])
        if p.kind in (UNTIL, RELEASE):
            return _ctl_state(p.left) and _ctl_state(p.right)
    return False


def _ctlplus_state(f: Formula) -> bool:
    k = f.kind
    if k in LITERAL_KINDS:
        return True
    if k in (AND, OR):
        return _ctlplus_state(f.left) and _ctlplus_state(f.right)
    if k in (EXISTS, FORALL):
        return _ctlplus_path(f.args[0])
    return False


def _ctlplus_path(f: Formula) -> bool:
    k = f.kind
    if _ctlplus_state(f):
        return True
    if k in (AND, OR):
        return _ctlplus_path(f.left) and _ctlplus_path(f.right)
    if k == NEXT:
        body = f.args[0]
        # X(a U b) and X(a R b) are admitted, they arise from unfolding
        if body.kind in (UNTIL, RELEASE):
            return _ctlplus_state(body.left) and _ctlplus_state(body.right)
        return _ctlplus_state(body)
    if k in (UNTIL, RELEASE):
        return _ctlplus_state(f.left) and _ctlplus_state(f.right)
    return False


def classify_fragment(f: Formula) -> Fragment:
    """Smallest of CTL, CTL+, CTL* whose grammar generates the NNF formula ``f``."""
    if _ctl_state(f):
        return Fragment.CTL
    if _ctlplus_state(f):
        return Fragment.CTLPLUS
    return Fragment.CTLSTAR


# ---------------------------------------------------------------- closure


@dataclass
class FormulaTable:
    """Hash-consed formulas of one problem, indexed by closure position.

    Indices ``0 .. len(fl)-1`` are the Fischer-Ladner closure: subformulas in
    post-order followed by the X-guarded copies of U- and R-formulas.  The CTL
    game needs a few more formulas (``EX E(a U b)`` and the like); these are
    registered after the closure and are not part of ``fl``.
    """

    root: Formula
    fragment: Fragment
    formulas: list[Formula] = field(default_factory=list)
    index: dict[Formula, int] = field(default_factory=dict)
    n_subformulas: int = 0
    n_closure: int = 0

    def __post_init__(self):
        self.kind: list[str] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.size: list[int] = []
        self._sub: list[int] = []

    def add(self, f: Formula) -> int:
        i = self.index.get(f)
        if i is not None:
            return i
        kids = [self.add(a) for a in f.args]
        i = len(self.formulas)
        self.formulas.append(f)
        self.index[f] = i
        self.kind.append(f.kind)
        self.left.append(kids[0] if kids else -1)
        self.right.append(kids[-1] if kids else -1)
        sub = 1 << i
        for c in kids:
            sub |= self._sub[c]
        self._sub.append(sub)
        self.size.append(sub.bit_count())
        return i

    def __len__(self) -> int:
        return len(self.formulas)

    def __getitem__(self, i: int) -> Formula:
        return self.formulas[i]

    @property
    def fl(self) -> range:
        return range(self.n_closure)

    @property
    def subformulas(self) -> range:
        return range(self.n_subformulas)

    @property
    def size_of_root(self) -> int:
        """|theta|, the number of distinct subformulas."""
        return self.n_subformulas

    def text(self, i: int) -> str:
        return to_text(self.formulas[i])


def fl_closure(theta: Formula) -> FormulaTable:
    """Build the formula table of the NNF formula ``theta``.

    Beyond the closure it precomputes the masks and lookup arrays the game and
    the automata need, so that those modules can treat formulas as integers.
    """
    if not is_nnf(theta):
        raise ValueError("fl_closure expects a formula in negation normal form")
    t = FormulaTable(theta, classify_fragment(theta))
    t.add(theta)
    t.n_subformulas = len(t)
    for i in range(t.n_subformulas):
        if t.kind[i] in (UNTIL, RELEASE):
            t.add(nxt(t.formulas[i]))
    t.n_closure = len(t)
    t.root_index = t.index[theta]

    fl_range = range(t.n_closure)
    t.until_list = [i for i in fl_range if t.kind[i] == UNTIL]
    t.fl_r_mask = 0
    t.x_mask = 0
    t.literal_mask = 0
    for i in fl_range:
        k = t.kind[i]
        if k == RELEASE or (k == NEXT and t.kind[t.left[i]] == RELEASE):
            t.fl_r_mask |= 1 << i
        if k == NEXT:
            t.x_mask |= 1 << i
        if k in LITERAL_KINDS:
            t.literal_mask |= 1 << i
    t.x_of = {t.left[i]: i for i in fl_range if t.kind[i] == NEXT}

    # CTL refoldings Q X Q(a U b), Q X Q(a R b) for every CTL-shaped Q(a U/R b)
    t.ctl_unfold = {}
    if t.fragment == Fragment.CTL:
        for i in range(t.n_subformulas):
            if t.kind[i] in (EXISTS, FORALL) and t.kind[t.left[i]] in (UNTIL, RELEASE):
                f = t.formulas[i]
                t.ctl_unfold[i] = t.add(Formula(f.kind, (nxt(f),)))
    t.ctl_until_list = [i for i in range(t.n_subformulas)
                        if t.kind[i] in (EXISTS, FORALL) and t.kind[t.left[i]] == UNTIL]

    t.ff_index = t.index.get(ff(), -1)
    t.tt_index = t.index.get(tt(), -1)
    t.complementary = []
    for i in range(len(t)):
        if t.kind[i] == NEGPROP:
            j = t.index.get(prop(t.formulas[i].name))
            if j is not None:
                t.complementary.append((1 << i) | (1 << j))
    t.propositions = sorted(propositions(theta))
    return t


def bits(mask: int):
    """Indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low

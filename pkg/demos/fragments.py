"""The three pipelines side by side.

CTL formulas need only a small deterministic Büchi automaton, CTL+ gets a
Büchi game through the breakpoint construction, and full CTL* needs a
determinized parity automaton.  A CTL formula can be pushed through all
three and must get the same verdict; the game sizes show the price.

Run with ``python demos/fragments.py``.
"""

from branchsat.cli import solve_formula
from branchsat.formula import Fragment

FORMULAS = [
    "A G E F p & A G E F !p",
    "A G A F p & E F E G !p",
    "E (F p & F q) & A G !(p & q)",
    "A (G p | G !p) & E X p & E X !p",
    "A F G p & E G E F !p",
]


def main():
    for text in FORMULAS:
        print(text)
        native = solve_formula(text, want_model=False).fragment
        for fragment in Fragment:
            if fragment < native:
                continue
            rep = solve_formula(text, fragment, want_model=False)
            s = rep.stats
            print(f"  {fragment.name:8} {rep.verdict:5} {s['game']:6} game, {s['game_nodes']:5} nodes, "
                  f"{s['acceptance_states']:4} acceptance states")
        print()


if __name__ == "__main__":
    main()

"""Walk through one satisfiability game end to end.

Run with ``python demos/running_example.py``.
"""

from branchsat.cli import solve_formula
from branchsat.formula import fl_closure, parse, to_nnf
from branchsat.model import export_dot

FORMULA = "A F G p & E G E F !p"


def main():
    f = to_nnf(parse(FORMULA))
    table = fl_closure(f)
    print(f"formula     {f}")
    print(f"fragment    {table.fragment.name}, {len(table.fl)} formulas in the closure")

    rep = solve_formula(FORMULA, sizes=True)
    g, strategy = rep.game, rep.strategy
    print("\nThe game starts from one configuration and applies a rule to its")
    print("largest formula until only literals and X-formulas remain.  Along")
    print("player 0's winning strategy (modal steps marked with *):")
    v = g.initial
    for _ in range(24):
        mark = "*" if g.modal[v] else " "
        print(f"  {mark} {g.label(v)}")
        v = strategy.choice.get(v, g.succ[v][0])

    s = rep.stats
    print(f"\nThe product with the acceptance automaton has {s['game_nodes']} nodes")
    print(f"and priorities {s['priorities']}; the NBA for bad A-traces has {s['nba_states']} states,")
    print(f"its determinization {s['dpa_states']} explored states with index {s['dpa_index']}.")
    print(f"\nverdict: {rep.verdict}")
    print(f"Player 0's winning strategy folds into a {rep.model.n_states}-state model:\n")
    print(export_dot(rep.model))


if __name__ == "__main__":
    main()

"""Formulas that force a wide model, and the width the solver produces.

The n-th formula asks for n successors that disagree on p_0 .. p_n, so any
model needs a state with at least n successors.  Extracted models never
branch wider than the formula is long.

Run with ``python demos/width_family.py``.
"""

from branchsat.cli import solve_formula
from branchsat.formula import fl_closure
from branchsat.random_formulas import width_formula


def main():
    print(f"{'n':>2} {'|formula|':>9} {'game nodes':>10} {'model states':>12} {'width':>5}")
    for n in range(1, 6):
        f = width_formula(n)
        rep = solve_formula(f)
        print(f"{n:>2} {fl_closure(f).size_of_root:>9} {rep.stats['game_nodes']:>10} "
              f"{rep.model.n_states:>12} {rep.model.max_out_degree():>5}")


if __name__ == "__main__":
    main()

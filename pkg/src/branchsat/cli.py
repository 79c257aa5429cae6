"""Command-line front end and the end-to-end ``solve_formula`` pipeline.

Exit codes follow SAT-solver conventions: 10 satisfiable, 20 unsatisfiable,
1 error, 2 node budget exceeded.  ``check-model`` exits 0 iff the model
satisfies the formula.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from .arena import DEFAULT_NODE_BUDGET, BudgetExceeded, ParityGame, Strategy, build_game, solve
from .formula import Formula, Fragment, ParseError, fl_closure, parse, to_nnf
from .game_core import CtlGame, Game
from .model import TransitionSystem, check_ctl, export_dot, export_json, extract_model, import_json
from .winning_condition import build_acceptance, size_report

EXIT_SAT, EXIT_UNSAT, EXIT_ERROR, EXIT_BUDGET = 10, 20, 1, 2
LOGICS = {"auto": None, "ctl": Fragment.CTL, "ctlplus": Fragment.CTLPLUS, "ctlstar": Fragment.CTLSTAR}


@dataclass
class SolveReport:
    satisfiable: bool
    fragment: Fragment
    stats: dict = field(default_factory=dict)
    model: TransitionSystem | None = None
    game: ParityGame | None = None
    strategy: Strategy | None = None
    acceptance: object = None

    @property
    def verdict(self) -> str:
        return "SAT" if self.satisfiable else "UNSAT"


def solve_formula(formula: str | Formula, logic: Fragment | None = None,
                  node_budget: int = DEFAULT_NODE_BUDGET, want_model: bool = True,
                  sizes: bool = False) -> SolveReport:
    """Decide satisfiability of ``formula`` with the pipeline of ``logic``.

    ``logic`` defaults to the smallest fragment containing the formula.
    ``sizes`` adds the observed automaton sizes next to their bounds to the
    statistics; this walks every explored transition and costs extra time.
    Raises ``ValueError`` for a fragment too small for the formula and
    ``BudgetExceeded`` when the game outgrows ``node_budget``.
    """
    start = time.perf_counter()
    f = parse(formula) if isinstance(formula, str) else formula
    table = fl_closure(to_nnf(f))
    fragment = table.fragment if logic is None else logic
    engine = CtlGame(table) if fragment == Fragment.CTL else Game(table)
    acc = build_acceptance(table, fragment, None if fragment == Fragment.CTL else engine)
    g = build_game(engine, acc.automaton, acc.kind, node_budget)
    strategy = solve(g)
    sat = strategy.wins(g.initial)
    model = extract_model(g, strategy) if sat and want_model else None
    stats = {
        "fragment": fragment.name,
        "game": acc.kind,
        "formula_size": table.size_of_root,
        "closure_size": len(table.fl),
        "game_nodes": len(g),
        "game_edges": g.n_edges,
        "acceptance_states": len({q for q in g.state if q is not None}),
        "priorities": sorted(set(g.priority)),
    }
    if sizes:
        stats.update(size_report(table, acc))
    if model is not None:
        stats["model_states"] = model.n_states
        stats["model_width"] = model.max_out_degree()
    stats["seconds"] = round(time.perf_counter() - start, 4)
    return SolveReport(sat, fragment, stats, model, g, strategy, acc.automaton)


# ------------------------------------------------------------------ corpus


@dataclass
class CorpusEntry:
    line: int
    expected: bool
    formula: str


def read_corpus(text: str) -> list[CorpusEntry]:
    """Lines ``sat <formula>`` or ``unsat <formula>``; ``#`` starts a comment."""
    out = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head not in ("sat", "unsat") or not rest.strip():
            raise ValueError(f"line {no}: expected 'sat <formula>' or 'unsat <formula>'")
        out.append(CorpusEntry(no, head == "sat", rest.strip()))
    return out


def run_corpus(entries: list[CorpusEntry], node_budget: int = DEFAULT_NODE_BUDGET, out=None):
    """Solve every entry; returns the list of mismatching entries."""
    bad = []
    for e in entries:
        rep = solve_formula(e.formula, node_budget=node_budget, want_model=False)
        ok = rep.satisfiable == e.expected
        if out is not None:
            mark = "ok " if ok else "MISMATCH"
            print(f"{mark} line {e.line}: {rep.verdict} {rep.fragment.name} {rep.stats['game']} "
                  f"{rep.stats['game_nodes']} nodes  {e.formula}", file=out)
        if not ok:
            bad.append(e)
    return bad


# ------------------------------------------------------------------ commands


def _read_formula(args) -> str:
    if args.expr is not None:
        return args.expr
    if args.file is None:
        raise ValueError("give a formula with -e or a file argument")
    return Path(args.file).read_text()


def cmd_solve(args) -> int:
    rep = solve_formula(_read_formula(args), LOGICS[args.logic], args.node_budget, sizes=args.stats)
    print(rep.verdict)
    if args.stats:
        for key, value in rep.stats.items():
            print(f"{key}: {value}")
    if args.dump_acceptance:
        print(dump_acceptance(rep), end="")
    if args.export_game:
        Path(args.export_game).write_text(rep.game.export())
    if rep.model is not None:
        if args.model:
            Path(args.model).write_text(export_json(rep.model))
        if args.dot:
            Path(args.dot).write_text(export_dot(rep.model))
    return EXIT_SAT if rep.satisfiable else EXIT_UNSAT


def dump_acceptance(rep: SolveReport) -> str:
    """Acceptance states met while building the game, in discovery order."""
    a = rep.acceptance
    seen = dict.fromkeys(q for q in rep.game.state if q is not None)
    lines = [f"acceptance {a.kind} {a.name}: {len(seen)} states reached"]
    for i, q in enumerate(seen):
        lines.append(f"q{i} priority {a.priority(q)} {q!r}")
    return "\n".join(lines) + "\n"


def cmd_check_model(args) -> int:
    model = import_json(Path(args.model).read_text())
    ok = check_ctl(model, parse(args.formula))
    print("holds" if ok else "fails")
    return 0 if ok else 1


def cmd_corpus(args) -> int:
    entries = read_corpus(Path(args.path).read_text())
    bad = run_corpus(entries, args.node_budget, sys.stdout if args.verbose else None)
    print(f"{len(entries)} run, {len(bad)} mismatches")
    for e in bad:
        print(f"mismatch on line {e.line}: {e.formula}")
    return 1 if bad else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="branchsat", description="CTL / CTL+ / CTL* satisfiability via games")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="decide satisfiability of a formula")
    s.add_argument("file", nargs="?", help="file containing the formula")
    s.add_argument("-e", dest="expr", help="formula given on the command line")
    s.add_argument("--logic", choices=sorted(LOGICS), default="auto")
    s.add_argument("--model", help="write the extracted model as JSON")
    s.add_argument("--dot", help="write the extracted model as DOT")
    s.add_argument("--export-game", help="write the parity game")
    s.add_argument("--stats", action="store_true", help="print game and automaton sizes")
    s.add_argument("--dump-acceptance", action="store_true",
                   help="list the acceptance states reached and their priorities")
    s.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("check-model", help="model check a CTL formula on a JSON model")
    c.add_argument("model")
    c.add_argument("formula")
    c.set_defaults(func=cmd_check_model)

    k = sub.add_parser("corpus", help="replay a corpus of formulas with expected verdicts")
    k.add_argument("path")
    k.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    k.add_argument("-v", "--verbose", action="store_true")
    k.set_defaults(func=cmd_corpus)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""Satisfiability of CTL, CTL+ and CTL* via satisfiability games."""

from .cli import SolveReport, solve_formula
from .formula import Fragment, parse, to_nnf
from .model import TransitionSystem, check_ctl

__all__ = ["Fragment", "SolveReport", "TransitionSystem", "check_ctl", "parse", "solve_formula", "to_nnf"]

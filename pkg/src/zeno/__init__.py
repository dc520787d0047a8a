"""Simulator and toolkit for accelerated (Zeno) Turing machines.

Core semantics live in :mod:`zeno.core`, budgeted execution and cycle
certificates in :mod:`zeno.engine`, the limit semantics in :mod:`zeno.limits`
and the diagonal constructions in :mod:`zeno.diag`.
"""
from .codec import decode, encode, parse_description, print_canonical
from .core import (BLANK, Configuration, MachineDescription, Move, TransitionRule,
                   first_output_cell, initial_configuration, rule, step, validate)
from .engine import (RunBudget, SteppableMachine, TuringMachine, bounded_simulate,
                     halting_oracle_small, run)
from .limits import inductive_run, ittm_run, zeno_run

__version__ = "0.1.0"

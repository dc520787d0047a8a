"""Structured programs for Zeno machines: IR, text syntax, a macro-step
machine and reference interpreter, and a compiler to transition tables."""
from .ir import (AddConst, AddReg, AdvanceOutput, BoundedSimulate, Cond, Copy, DoWhile, Halt,
                 If, IsPrime, ParkOutput, Program, Read, Set, Skip, SubConst, SubReg, While,
                 WriteCellOne, bits_to_int, int_to_bits)
from .irtext import IRSyntaxError, parse_program, print_program
from .interp import MacroMachine, StepCapExceeded, Trace, reference_interpret, tag_samples
from .lower import UncompilablePrimitive, lower
from .compiler import compile_program
from .corpus import (corpus_digit_search, corpus_halting_probe, corpus_twin_prime,
                     probe_inputs)

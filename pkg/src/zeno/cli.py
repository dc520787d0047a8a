"""Command line interface.

Every command prints one JSON object per line with sorted keys, so output is
byte-stable for fixed inputs.  Exit status: 0 when a verdict was produced
(whatever it says), 1 for usage, syntax and input errors, 2 when a machine
fails validation, 3 when an internal invariant is violated.
"""
from __future__ import annotations

import argparse
import dataclasses
import enum
import json
import sys
from contextlib import ExitStack
from pathlib import Path
from typing import Sequence

from . import gallery
from .codec import ParseErrors, ValidationErrors, parse_description, print_canonical
from .core import InvalidInputSymbol, MachineDescription
from .digits import first_match_end, format_digit_file, pi_digits, read_digit_file
from .engine import CycleCertificate, ForgedCertificate, RunBudget, TuringMachine, run
from .limits import AlphabetNotBinary, inductive_run, ittm_run, zeno_run

OK, USAGE, INVALID, INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def count(text: str) -> int:
    """Positive integer, also written like ``5e6``."""
    try:
        value = float(text) if any(c in text for c in "eE.") else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a count: {text!r}") from None
    if value != int(value) or value <= 0:
        raise argparse.ArgumentTypeError(f"not a positive integer: {text!r}")
    return int(value)


# --------------------------------------------------------------------------
# rendering

def render(obj):
    if isinstance(obj, CycleCertificate):
        return {"mu": obj.mu, "lam": obj.lam}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: render(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, enum.Enum):
        return obj.name
    if isinstance(obj, dict):
        return {str(k): render(v) for k, v in sorted(obj.items())}
    if isinstance(obj, (list, tuple)):
        return [render(v) for v in obj]
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return str(obj)


def verdict_record(verdict, **extra) -> dict:
    rec = {"verdict": type(verdict).__name__, **render(verdict)}
    if hasattr(verdict, "bit"):
        rec["bit"] = verdict.bit
    rec.update(extra)
    return rec


def emit(rec: dict) -> None:
    sys.stdout.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")


class _TraceFile:
    def __init__(self, path: str):
        self.fh = open(path, "w", encoding="utf-8")

    def __call__(self, rec: dict) -> None:
        self.fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")

    def close(self) -> None:
        self.fh.close()


# --------------------------------------------------------------------------
# inputs

def load_machine(ref: str) -> MachineDescription:
    """A path, or ``@name`` for a bundled machine."""
    if ref.startswith("@"):
        try:
            return gallery.load(ref[1:])
        except KeyError:
            raise UsageError(f"no bundled machine {ref[1:]!r}; try one of {', '.join(gallery.names())}")
    try:
        text = Path(ref).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {ref}: {e.strerror}") from None
    return parse_description(text)


def load_program(path: str):
    """A path, or ``@name`` for a bundled program."""
    from importlib import resources
    from .tmc import parse_program
    if path.startswith("@"):
        res = resources.files("zeno").joinpath("programs").joinpath(f"{path[1:]}.ir")
        if not res.is_file():
            raise UsageError(f"no bundled program {path[1:]!r}")
        return parse_program(res.read_text(encoding="utf-8"))
    try:
        return parse_program(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def budget_of(args) -> RunBudget:
    return RunBudget(args.max_steps, args.max_fingerprints)


def _trace(args, stack: ExitStack):
    if not getattr(args, "trace", None):
        return None
    sink = _TraceFile(args.trace)
    stack.callback(sink.close)
    return sink


# --------------------------------------------------------------------------
# commands

def cmd_validate(args) -> int:
    from .core import validate
    desc = load_machine(args.file) if args.file.startswith("@") else \
        parse_description(Path(args.file).read_text(encoding="utf-8"), check=False)
    report = validate(desc)
    emit({"machine": desc.name, "ok": report.ok,
          "issues": [{"kind": i.kind.name, "message": i.message} for i in report.issues]})
    return OK if report.ok else INVALID


def cmd_run(args) -> int:
    m = TuringMachine(load_machine(args.file))
    with ExitStack() as stack:
        trace = _trace(args, stack)
        if args.command == "run":
            v = run(m, args.input, budget_of(args), trace, sample_every=args.sample_every,
                    radius=args.radius)
        elif args.command == "zeno":
            v = zeno_run(m, args.input, budget_of(args), trace, args.sample_every)
        else:
            v = inductive_run(m, args.input, budget_of(args), args.stability_window, trace,
                              args.sample_every)
    emit(verdict_record(v, machine=m.name, input=args.input, semantics=args.command))
    return OK


def _stage(stage) -> dict:
    return {"index": stage.index, "certificate": render(stage.certificate),
            "cell_one": stage.output_tape.get(1, "0"), "state": stage.state,
            "heads": list(stage.heads), "work_tape": render(stage.work_tape),
            "output_tape": render(stage.output_tape)}


def cmd_ittm(args) -> int:
    desc = load_machine(args.file)
    v = ittm_run(desc, args.input, args.limit_stages, budget_of(args))
    rec = {"verdict": type(v).__name__, "machine": desc.name, "input": args.input,
           "semantics": "ittm", "stages": [_stage(s) for s in v.stages]}
    if hasattr(v, "clock"):
        rec["clock"] = str(v.clock)
    if hasattr(v, "output"):
        rec["output"] = v.output
    if hasattr(v, "stage_index"):
        rec["stage_index"], rec["reason"] = v.stage_index, v.reason
    emit(rec)
    return OK


def cmd_diagonalize(args) -> int:
    from .diag import semantic_cell_one_sequence, zeno_diagonalize_semantic, zeno_diagonalize_syntactic
    y = load_machine(args.file)
    if args.form == "syntactic":
        x = zeno_diagonalize_syntactic(y)
        text = print_canonical(x)
        if args.output:
            Path(args.output).write_text(text, encoding="utf-8")
            emit({"form": "syntactic", "machine": x.name, "states": len(x.states),
                  "rules": len(x.rules), "output": args.output})
        else:
            sys.stdout.write(text)
        return OK
    if args.output:
        raise UsageError("the semantic form is a wrapper with no transition table; drop -o")
    x = zeno_diagonalize_semantic(y)
    seq = semantic_cell_one_sequence(x, args.input, args.steps)
    emit({"form": "semantic", "machine": x.name, "input": args.input, "steps": args.steps,
          "cell_one": "".join(seq)})
    return OK


def cmd_contradict(args) -> int:
    from .diag import BoundedHaltingSolver, demonstrate_contradiction
    if args.bounded is not None:
        solver = BoundedHaltingSolver(args.bounded)
    elif args.file:
        solver = load_machine(args.file)
    else:
        raise UsageError("give a solver file or --bounded LIMIT")
    r = demonstrate_contradiction(solver, budget_of(args))
    emit({"solver": r.solver, "form": r.form, "n_x_bits": len(r.n_x), "solver_bit": r.solver_bit,
          "solver_verdict": verdict_record(r.solver_verdict),
          "diagonal_behavior": verdict_record(r.diagonal_behavior),
          "case": r.case, "consistent": r.consistent})
    return OK


def cmd_corpus(args) -> int:
    from .tmc import corpus
    if args.action == "list":
        for name, entry in corpus.ENTRIES.items():
            emit({"name": name, "summary": entry.summary})
        return OK
    if args.name not in corpus.ENTRIES:
        raise UsageError(f"unknown corpus entry {args.name!r}; try one of {', '.join(corpus.ENTRIES)}")
    budget = budget_of(args)
    if args.name in ("halting-probe", "probe-halt"):
        from .tmc import MacroMachine
        target = load_machine(args.machine)
        m = MacroMachine(corpus.ENTRIES[args.name].build())
        regs = corpus.probe_inputs(target, args.word)
        if args.semantics == "inductive":
            v = inductive_run(m, regs, budget, args.stability_window)
        else:
            v = zeno_run(m, regs, budget)
        emit(verdict_record(v, entry=args.name, machine=target.name, word=args.word,
                            semantics=args.semantics))
    elif args.name == "twin-prime":
        s = corpus.run_twin_prime(args.max_steps, args.windows)
        flags = corpus.sieve(100 * s["iterations"] + 110)
        oracle = "".join("1" if any(flags[n] and flags[n + 2] for n in range(i, i + 101)) else "0"
                         for i in range(1, 100 * s["iterations"] + 1, 100))
        emit({"entry": "twin-prime", **s, "sieve_agrees": oracle == s["bits"]})
    elif args.name == "digit-search":
        stream = read_digit_file(args.digits) if args.digits else pi_digits(args.count)
        s = corpus.run_digit_search(args.pattern, stream, budget)
        oracle = first_match_end(stream, args.pattern)
        emit({"entry": "digit-search", "pattern": args.pattern, "digits": s["digits"],
              "position": s["position"], "oracle_position": oracle,
              "agrees": s["position"] == oracle, **{"verdict": verdict_record(s["verdict"])}})
    else:
        from .diag import subclass_solver_demo
        description, solver, report = subclass_solver_demo(max_len=args.max_len, budget=budget)
        emit({"entry": "subclass-demo", "family": list(report.family), "subclass": description,
              "solver": solver.name, "checks": len(report.checks),
              "mismatches": len(report.mismatches), "unresolved": len(report.unresolved),
              "outside_subclass": list(report.outside_subclass), "verified": report.verified})
    return OK


def cmd_compile(args) -> int:
    from .tmc import compile_program
    desc = compile_program(load_program(args.file))
    text = print_canonical(desc)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        emit({"program": desc.name, "states": len(desc.states), "rules": len(desc.rules),
              "output": args.output})
    else:
        sys.stdout.write(text)
    return OK


def cmd_interpret(args) -> int:
    from .tmc import reference_interpret
    p = load_program(args.file)
    regs = {}
    for item in args.register:
        name, _, value = item.partition("=")
        if not value.isdigit():
            raise UsageError(f"--register expects NAME=VALUE, got {item!r}")
        regs[name] = int(value)
    t = reference_interpret(p, args.input, args.step_cap, registers=regs)
    if args.trace:
        sink = _TraceFile(args.trace)
        for r in t.records:
            sink({"step": r.step, "kind": r.kind, "label": r.label, "registers": dict(r.registers),
                  "cell_one": r.cell_one, "output": r.output, "output_head": r.output_head})
        sink.close()
    emit({"program": p.name, "halted": t.halted, "steps": len(t.records),
          "step_cap_exceeded": t.stopped is not None, "output": t.output,
          "output_head": t.output_head, "registers": dict(t.registers)})
    return OK


def cmd_digits(args) -> int:
    text = format_digit_file(pi_digits(args.count))
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        emit({"digits": args.count, "output": args.output})
    else:
        sys.stdout.write(text)
    return OK


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="zeno", description="Zeno machine workbench")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def budget_flags(sp, steps=100_000, fps=100_000):
        sp.add_argument("--max-steps", type=count, default=steps)
        sp.add_argument("--max-fingerprints", type=count, default=fps)

    def machine_cmd(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("file", help="machine file, or @name for a bundled machine")
        sp.add_argument("--input", default="", help="input word (symbols are characters)")
        budget_flags(sp)
        return sp

    sp = sub.add_parser("validate", help="parse and validate a machine file")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_validate)

    for name, help_ in (("run", "classical run with cycle certification"),
                        ("zeno", "limit bit of a Zeno run"),
                        ("inductive", "inductive (stabilizing output) semantics")):
        sp = machine_cmd(name, help_)
        sp.add_argument("--trace", help="write sampled configurations as JSON lines")
        sp.add_argument("--sample-every", type=count, default=1)
        sp.add_argument("--radius", type=int, default=3)
        if name == "inductive":
            sp.add_argument("--stability-window", type=count, default=1000)
        sp.set_defaults(func=cmd_run)

    sp = machine_cmd("ittm", "infinite-time semantics with lim sup limit stages")
    sp.add_argument("--limit-stages", type=int, default=1)
    sp.set_defaults(func=cmd_ittm)

    sp = sub.add_parser("diagonalize", help="build the diagonal machine of a solver")
    sp.add_argument("file")
    sp.add_argument("--form", choices=("syntactic", "semantic"), default="syntactic")
    sp.add_argument("-o", "--output")
    sp.add_argument("--input", default="")
    sp.add_argument("--steps", type=count, default=64)
    sp.set_defaults(func=cmd_diagonalize)

    sp = sub.add_parser("contradict", help="confront a halting solver with its diagonal machine")
    sp.add_argument("file", nargs="?")
    sp.add_argument("--bounded", type=count, help="use the built-in solver that simulates for LIMIT steps")
    budget_flags(sp, 1_000_000, 100_000)
    sp.set_defaults(func=cmd_contradict)

    sp = sub.add_parser("corpus", help="bundled programs")
    sp.add_argument("action", choices=("list", "run"))
    sp.add_argument("name", nargs="?")
    budget_flags(sp, 5_000_000, 10_000)
    sp.add_argument("--semantics", choices=("zeno", "inductive"), default="zeno")
    sp.add_argument("--stability-window", type=count, default=1000)
    sp.add_argument("--machine", default="@increment")
    sp.add_argument("--word", default="11")
    sp.add_argument("--windows", type=count)
    sp.add_argument("--pattern", default="777")
    sp.add_argument("--digits", help="digit file to scan (default: computed pi digits)")
    sp.add_argument("--count", type=count, default=2000)
    sp.add_argument("--max-len", type=int, default=4)
    sp.set_defaults(func=cmd_corpus)

    sp = sub.add_parser("compile", help="compile a program to a machine description")
    sp.add_argument("file")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_compile)

    sp = sub.add_parser("interpret", help="run a program with the reference interpreter")
    sp.add_argument("file")
    sp.add_argument("--input", default="")
    sp.add_argument("--register", action="append", default=[], metavar="NAME=VALUE")
    sp.add_argument("--step-cap", type=count, default=100_000)
    sp.add_argument("--trace")
    sp.set_defaults(func=cmd_interpret)

    sp = sub.add_parser("digits", help="write a pi digit file")
    sp.add_argument("count", type=count)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_digits)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "corpus" and args.action == "run" and not args.name:
            raise UsageError("corpus run needs an entry name")
        return args.func(args)
    except UsageError as e:
        sys.stderr.write(f"zeno: {e}\n")
        return USAGE
    except ParseErrors as e:
        for err in e.errors:
            sys.stderr.write(f"zeno: {err}\n")
        return USAGE
    except ValidationErrors as e:
        emit({"ok": False, "issues": [{"kind": i.kind.name, "message": i.message}
                                      for i in e.report.issues]})
        return INVALID
    except AlphabetNotBinary as e:
        sys.stderr.write(f"zeno: {e}\n")
        return INVALID
    except (InvalidInputSymbol, ValueError) as e:
        sys.stderr.write(f"zeno: {e}\n")
        return USAGE
    except OSError as e:
        sys.stderr.write(f"zeno: {e.filename or ''}: {e.strerror or e}\n")
        return USAGE
    except (ForgedCertificate, AssertionError) as e:
        sys.stderr.write(f"zeno: internal invariant violated: {e}\n")
        return INTERNAL


if __name__ == "__main__":
    sys.exit(main())

"""Bundled example machines and random machine generators."""
from __future__ import annotations

import random
from functools import lru_cache
from importlib import resources

from .codec import parse_description
from .core import BLANK, MachineDescription, Move, TransitionRule, rule

_MOVES = (Move.LEFT, Move.STAY, Move.RIGHT)


def names() -> list[str]:
    files = resources.files("zeno").joinpath("machines").iterdir()
    return sorted(f.name[:-3] for f in files if f.name.endswith(".tm"))


@lru_cache(maxsize=None)
def load(name: str) -> MachineDescription:
    path = resources.files("zeno").joinpath("machines").joinpath(f"{name}.tm")
    if not path.is_file():
        raise KeyError(f"no bundled machine named {name!r}")
    return parse_description(path.read_text(encoding="utf-8"))


def text(name: str) -> str:
    return resources.files("zeno").joinpath("machines").joinpath(f"{name}.tm").read_text(encoding="utf-8")


def random_machine(rng: random.Random, *, max_states: int = 4, density: float = 0.7,
                   name: str | None = None) -> MachineDescription:
    """A valid machine with random alphabets, states and partial rule table.

    Symbol names are drawn to exercise the codec (multi-character symbols,
    ``#`` and backslashes that need escaping).
    """
    pool = ["0", "1", "a", "b", "x1", "#", "\\", "s#t", "é", "<>"]
    ins = [BLANK] + rng.sample(pool, rng.randint(1, 3))
    work = [BLANK] + rng.sample(pool, rng.randint(0, 3))
    outs = [BLANK] + rng.sample(pool, rng.randint(0, 3))
    n = rng.randint(1, max_states)
    states = [f"q{i}" for i in range(n)]
    halting = [s for s in states[1:] if rng.random() < 0.3]
    rules = []
    for s in states:
        if s in halting:
            continue
        for i in ins:
            for w in work:
                for o in outs:
                    if rng.random() < density:
                        rules.append(TransitionRule(s, i, w, o, rng.choice(states),
                                                    rng.choice(work), rng.choice(outs),
                                                    rng.choice(_MOVES), rng.choice(_MOVES),
                                                    rng.choice(_MOVES)))
    return MachineDescription.build(name or f"rand{rng.randrange(10**6)}", input_alphabet=ins,
                                    work_alphabet=work, output_alphabet=outs, states=states,
                                    start=states[0], halting=halting, rules=rules)


def random_solver(rng: random.Random, *, scan_states: int = 3, name: str | None = None) -> MachineDescription:
    """A random bit-answering machine over input {0, 1}.

    It scans its input with a random automaton, leaving random marks on the
    work tape and rewriting and moving over the output tape along the way (so
    some solvers write 1 and later 0, and some walk off cell 1).  At the end of the input each automaton
    state either halts with a bit on cell 1 and the head on cell 2, loops in
    place, or keeps flipping cell 1.
    """
    states = [f"s{i}" for i in range(scan_states)]
    rules: list[TransitionRule] = []
    for s in states:
        for i in ("0", "1"):
            for o in (BLANK, "0", "1"):
                wo = rng.choice([o, o, "0", "1"])
                rules.append(rule(s, (i, BLANK, o), rng.choice(states), (rng.choice([BLANK, "m"]), wo),
                                  "RR" + rng.choice("SSRL")))
                rules.append(rule(s, (i, "m", o), rng.choice(states), (BLANK, o), "RR" + rng.choice("SSRL")))
        ending = rng.choices(["halt0", "halt1", "loop", "flip", "late1"], weights=[4, 4, 1, 1, 1])[0]
        for w in (BLANK, "m"):
            for o in (BLANK, "0", "1"):
                if ending in ("halt0", "halt1"):
                    rules.append(rule(s, (BLANK, w, o), "done", (w, ending[-1]), "SSR"))
                elif ending == "loop":
                    rules.append(rule(s, (BLANK, w, o), "spin", (w, o), "SSS"))
                elif ending == "flip":
                    rules.append(rule(s, (BLANK, w, o), "flip", (w, "1" if o != "1" else "0"), "SSS"))
                else:
                    # write 1, walk the work tape back for a while, then answer 0
                    rules.append(rule(s, (BLANK, w, o), "late", (w, "1"), "SLS"))
    for w in (BLANK, "m"):
        for o in (BLANK, "0", "1"):
            rules.append(rule("spin", (BLANK, w, o), "spin", (w, o), "SSS"))
            rules.append(rule("flip", (BLANK, w, o), "flip", (w, "1" if o != "1" else "0"), "SSS"))
        rules.append(rule("late", (BLANK, "m", "1"), "late", (BLANK, "1"), "SLS"))
        rules.append(rule("late", (BLANK, BLANK, "1"), "done", (BLANK, "0"), "SSR"))
    return MachineDescription.build(name or f"solver{rng.randrange(10**6)}",
                                    input_alphabet={"0", "1"}, work_alphabet={"m"},
                                    output_alphabet={"0", "1"}, start="s0", halting={"done"},
                                    rules=rules)

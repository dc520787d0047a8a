"""Integer-coded execution of syntactic machines on top of :mod:`zeno._kernels`.

Tapes are numpy arrays that grow on demand; the kernel reports when a head
is about to leave its array and the wrapper here reallocates.  Zobrist keys
are attached to logical cells, so growing the work tape to the left does not
change any configuration's fingerprint.
"""
from __future__ import annotations

from functools import cached_property

import numpy as np

from . import _kernels as K
from .core import BLANK, MachineDescription, Outcome, Stuck, as_word, displayed
from .engine import (BudgetExhausted, CycleCertified, HaltedWithOutput, RunBudget, StuckAt,
                     TuringMachine, issue_certificate)

_INT64_MIN, _INT64_MAX = np.iinfo(np.int64).min, np.iinfo(np.int64).max


def _symbols(alphabet) -> list[str]:
    return [BLANK] + sorted(s for s in alphabet if s != BLANK)


class DenseMachine:
    """Lookup tables for one machine description."""

    def __init__(self, desc: MachineDescription):
        self.desc = desc
        self.states = sorted(desc.states)
        self.state_index = {s: k for k, s in enumerate(self.states)}
        self.in_syms = _symbols(desc.input_alphabet)
        self.work_syms = _symbols(desc.work_alphabet)
        self.out_syms = _symbols(desc.output_alphabet)
        ii = {s: k for k, s in enumerate(self.in_syms)}
        wi = {s: k for k, s in enumerate(self.work_syms)}
        oi = {s: k for k, s in enumerate(self.out_syms)}
        self.in_index, self.work_index, self.out_index = ii, wi, oi
        table = np.full((len(self.states), len(ii), len(wi), len(oi), 6), -1, dtype=np.int32)
        si = self.state_index
        for r in desc.rules:
            table[si[r.state], ii[r.read_input], wi[r.read_work], oi[r.read_output]] = (
                si[r.next_state], wi[r.write_work], oi[r.write_output],
                int(r.move_input), int(r.move_work), int(r.move_output))
        self.table = table
        self.halting = np.array([s in desc.halting for s in self.states], dtype=np.uint8)
        shown = sorted({displayed(s) for s in self.out_syms} - {BLANK})
        self.display_values = [BLANK] + shown
        dv = {v: k for k, v in enumerate(self.display_values)}
        self.disp = np.array([dv[displayed(s)] for s in self.out_syms], dtype=np.int32)
        rng = np.random.default_rng(0x5EED)
        self.zstate = rng.integers(_INT64_MIN, _INT64_MAX, len(self.states), dtype=np.int64)

    @classmethod
    def of(cls, m: TuringMachine | MachineDescription) -> "DenseMachine":
        if isinstance(m, MachineDescription):
            return cls(m)
        dm = getattr(m, "_dense", None)
        if dm is None:
            dm = cls(m.desc)
            m._dense = dm
        return dm


def _rand(rng, shape) -> np.ndarray:
    return rng.integers(_INT64_MIN, _INT64_MAX, shape, dtype=np.int64)


class DenseRun:
    """A running configuration in array form."""

    def __init__(self, dm: DenseMachine, word="", cap_fp: int = 1, seed: int = 1):
        self.dm = dm
        symbols = as_word(word)
        try:
            codes = [dm.in_index[s] for s in symbols]
        except KeyError as exc:
            from .core import InvalidInputSymbol
            raise InvalidInputSymbol(f"input symbol {exc.args[0]!r} not in alphabet") from None
        if any(c == 0 for c in codes):
            from .core import InvalidInputSymbol
            raise InvalidInputSymbol("blank inside input word")
        self.rng = np.random.default_rng(seed)
        n = max(16, len(codes) + 8)
        self.inp = np.zeros(n, dtype=np.int32)
        self.inp[1:1 + len(codes)] = codes
        self.work = np.zeros(32, dtype=np.int32)
        self.work_origin = 16              # array index of logical work cell 0
        self.out = np.zeros(16, dtype=np.int32)
        self.zin = _rand(self.rng, self.inp.shape[0])
        self.zwh = _rand(self.rng, self.work.shape[0])
        self.zoh = _rand(self.rng, self.out.shape[0])
        self.zwork = _rand(self.rng, (len(dm.work_syms), self.work.shape[0]))
        self.zwork[0] = 0
        self.zout = _rand(self.rng, (len(dm.out_syms), self.out.shape[0]))
        self.zout[0] = 0
        self.regs = np.zeros(K.N_REGS, dtype=np.int64)
        self.regs[K.R_STATE] = dm.state_index[dm.desc.start]
        self.regs[K.R_IH] = 1
        self.regs[K.R_WH] = self.work_origin + 1
        self.regs[K.R_OH] = 1
        self.regs[K.R_TORT_AT] = -1
        self.regs[K.R_SKIP] = -1
        self.regs[K.R_CHECKPOINT] = cap_fp
        size = 1 << max(4, int(2 * cap_fp).bit_length())
        self.keys = np.zeros(size, dtype=np.int64)
        self.vals = np.zeros(size, dtype=np.int64)
        self.used = np.zeros(size, dtype=np.uint8)
        self.cap_fp = cap_fp
        self._nolog32 = np.zeros(0, dtype=np.int32)
        self._nolog64 = np.zeros(0, dtype=np.int64)

    # ---- growth -------------------------------------------------------
    def _grow(self, code: int) -> None:
        if code == K.GROW_INPUT:
            k = self.inp.shape[0]
            self.inp = np.concatenate([self.inp, np.zeros(k, dtype=np.int32)])
            self.zin = np.concatenate([self.zin, _rand(self.rng, k)])
        elif code == K.GROW_OUTPUT:
            k = self.out.shape[0]
            self.out = np.concatenate([self.out, np.zeros(k, dtype=np.int32)])
            self.zoh = np.concatenate([self.zoh, _rand(self.rng, k)])
            extra = _rand(self.rng, (self.zout.shape[0], k))
            extra[0] = 0
            self.zout = np.concatenate([self.zout, extra], axis=1)
        elif code in (K.GROW_WORK_LEFT, K.GROW_WORK_RIGHT):
            k = self.work.shape[0]
            pad = np.zeros(k, dtype=np.int32)
            extra = _rand(self.rng, (self.zwork.shape[0], k))
            extra[0] = 0
            heads = _rand(self.rng, k)
            if code == K.GROW_WORK_LEFT:
                self.work = np.concatenate([pad, self.work])
                self.zwh = np.concatenate([heads, self.zwh])
                self.zwork = np.concatenate([extra, self.zwork], axis=1)
                self.work_origin += k
                self.regs[K.R_WH] += k
            else:
                self.work = np.concatenate([self.work, pad])
                self.zwh = np.concatenate([self.zwh, heads])
                self.zwork = np.concatenate([self.zwork, extra], axis=1)

    def run(self, max_step: int, detect: bool = False, logs=None, log_from: int = 0) -> int:
        """Call the kernel until it stops for a reason other than growth."""
        if logs is None:
            c1log, slog, hlog = self._nolog32, self._nolog32, self._nolog64
        else:
            c1log, slog, hlog = logs
        dm = self.dm
        while True:
            code = K.step_kernel(dm.table, dm.halting, dm.disp, self.inp, self.work, self.out,
                                 dm.zstate, self.zin, self.zwh, self.zoh, self.zwork, self.zout,
                                 self.keys, self.vals, self.used, self.regs, max_step,
                                 self.cap_fp, detect, c1log, slog, hlog, log_from)
            if K.GROW_INPUT <= code <= K.GROW_OUTPUT:
                self._grow(code)
                continue
            return int(code)

    # ---- observation --------------------------------------------------
    @property
    def steps(self) -> int:
        return int(self.regs[K.R_STEP])

    @property
    def state(self) -> str:
        return self.dm.states[int(self.regs[K.R_STATE])]

    @property
    def halted(self) -> bool:
        return bool(self.dm.halting[self.regs[K.R_STATE]])

    @property
    def output_head(self) -> int:
        return int(self.regs[K.R_OH])

    @property
    def cell_one(self) -> str:
        return self.dm.display_values[self.dm.disp[self.out[1]]]

    def output_word(self) -> str:
        shown = self.dm.disp[self.out]
        nz = np.nonzero(shown[1:])[0]
        if nz.size == 0:
            return ""
        vals = self.dm.display_values
        return "".join(vals[v] for v in shown[1:nz[-1] + 2])

    def tapes(self) -> tuple[dict[int, str], dict[int, str]]:
        """Non-blank work and output cells as sparse dicts (logical cell -> symbol)."""
        ws, os_ = self.dm.work_syms, self.dm.out_syms
        work = {int(i) - self.work_origin: ws[self.work[i]] for i in np.nonzero(self.work)[0]}
        out = {int(i): os_[self.out[i]] for i in np.nonzero(self.out)[0]}
        return work, out

    def work_head(self) -> int:
        return int(self.regs[K.R_WH]) - self.work_origin


_STUCK = {K.STUCK_MISSING: Stuck.MISSING_RULE, K.STUCK_BOUNDARY: Stuck.BOUNDARY}


def run_dense(m: TuringMachine, word, budget: RunBudget) -> HaltedWithOutput | StuckAt | CycleCertified | BudgetExhausted:
    """Same search as :func:`zeno.engine.drive`, with the loop in the kernel.

    Candidates found by the kernel are certified by replaying the Python
    stepper, so a Zobrist collision can delay detection but never forge it.
    """
    dm = DenseMachine.of(m)
    dr = DenseRun(dm, word, cap_fp=budget.max_fingerprints)
    origin = None
    while True:
        code = dr.run(budget.max_steps, detect=True)
        i = dr.steps
        if code == K.HALTED:
            return HaltedWithOutput(dr.output_word(), i, dr.output_head, dr.cell_one,
                                    int(dr.regs[K.R_OUT_CHANGE]))
        if code in _STUCK:
            return StuckAt(_STUCK[code], i, dr.output_word(), dr.output_head, dr.cell_one,
                           int(dr.regs[K.R_OUT_CHANGE]))
        if code == K.BUDGET:
            return BudgetExhausted(i, dr.cell_one, i - int(dr.regs[K.R_C1_CHANGE]),
                                   dr.output_word(), dr.output_head, int(dr.regs[K.R_OUT_CHANGE]))
        if code == K.CHECKPOINT:
            continue
        j = int(dr.regs[K.R_HIT]) if code == K.TABLE_HIT else int(dr.regs[K.R_TORT_AT])
        if origin is None:
            origin = m.start(word)
        cert = issue_certificate(origin, j, i - j)
        if cert is not None:
            return CycleCertified(cert)
        dr.regs[K.R_SKIP] = i


def cell_one_trace(m: TuringMachine | MachineDescription, word, steps: int):
    """Per-step (state index, displayed cell-one id) arrays for steps 0..steps-1
    (shorter if the machine stops), plus the :class:`DenseMachine` used."""
    dm = DenseMachine.of(m)
    dr = DenseRun(dm, word)
    c1 = np.zeros(steps, dtype=np.int32)
    st = np.zeros(steps, dtype=np.int32)
    hd = np.zeros(steps, dtype=np.int64)
    dr.run(steps, detect=False, logs=(c1, st, hd), log_from=0)
    n = min(dr.steps + 1, steps)
    return st[:n], c1[:n], dm


class DenseSimulation:
    """Array-backed stand-in for :class:`zeno.engine.IncrementalSimulation`."""

    def __init__(self, desc: MachineDescription, word):
        self.dr = DenseRun(DenseMachine.of(desc), word)
        self.code = None

    def advance_to(self, steps: int) -> Outcome:
        if self.code is not None and self.code != K.BUDGET:
            return _OUTCOME[self.code]
        self.code = self.dr.run(steps, detect=False)
        return _OUTCOME[self.code]


_OUTCOME = {K.HALTED: Outcome.HALTED, K.STUCK_MISSING: Outcome.STUCK_MISSING,
            K.STUCK_BOUNDARY: Outcome.STUCK_BOUNDARY, K.BUDGET: Outcome.STEPPED}

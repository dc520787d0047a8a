"""Array kernel for stepping integer-coded 3-tape machines.

The same source runs under ``numba.njit`` or as plain Python over numpy
arrays.  ``ZENO_KERNEL=python`` forces the fallback; it is also used when
numba is not importable.
"""
import os

import numpy as np

BACKEND = os.environ.get("ZENO_KERNEL", "numba").strip().lower()

if BACKEND == "numba":
    try:
        import numba
    except ImportError:  # pragma: no cover - exercised only without numba
        BACKEND = "python"

if BACKEND == "numba":
    jit = numba.njit(cache=True, nogil=True)
else:
    BACKEND = "python"

    def jit(fn):
        return fn

# kernel exit codes
HALTED = 0
STUCK_MISSING = 1
STUCK_BOUNDARY = 2
BUDGET = 3
GROW_INPUT = 4
GROW_WORK_LEFT = 5
GROW_WORK_RIGHT = 6
GROW_OUTPUT = 7
TABLE_HIT = 8
BRENT_HIT = 9
CHECKPOINT = 10

# layout of the ``regs`` vector
R_STATE, R_IH, R_WH, R_OH, R_STEP, R_TAPEHASH = 0, 1, 2, 3, 4, 5
R_STORED, R_TORT_FP, R_TORT_AT, R_CHECKPOINT = 6, 7, 8, 9
R_OUT_CHANGE, R_C1_CHANGE, R_SKIP, R_HIT = 10, 11, 12, 13
N_REGS = 14


@jit
def step_kernel(table, halting, disp, inp, work, out,
                zstate, zin, zwh, zoh, zwork, zout,
                keys, vals, used, regs, max_step, cap_fp, detect,
                c1log, slog, hlog, log_from):
    """Advance until something needs the caller's attention.

    Per step ``i`` the order is: log, halt check, cycle search (table lookup,
    then tortoise comparison and checkpoint), budget check, transition.
    Returning before the transition makes re-entry at the same step safe.
    """
    mask = keys.shape[0] - 1
    log_len = c1log.shape[0]
    while True:
        i = regs[4]
        s = regs[0]
        ih = regs[1]
        wh = regs[2]
        oh = regs[3]
        if log_len > 0 and i >= log_from and i < log_from + log_len:
            k = i - log_from
            c1log[k] = disp[out[1]]
            slog[k] = s
            hlog[k] = oh
        if halting[s]:
            return HALTED
        if detect:
            fp = regs[5] ^ zstate[s] ^ zin[ih] ^ zwh[wh] ^ zoh[oh]
            slot = fp & mask
            found = -1
            while used[slot]:
                if keys[slot] == fp:
                    found = vals[slot]
                    break
                slot = (slot + 1) & mask
            if found == -1:
                if regs[6] < cap_fp:
                    used[slot] = 1
                    keys[slot] = fp
                    vals[slot] = i
                    regs[6] += 1
            elif found != i and i != regs[12]:
                regs[13] = found
                return TABLE_HIT
            if i >= cap_fp:
                if regs[8] >= 0 and i > regs[8] and fp == regs[7] and i != regs[12]:
                    return BRENT_HIT
                if i == regs[9]:
                    regs[7] = fp
                    regs[8] = i
                    regs[9] = 2 * i
                    return CHECKPOINT
        if i >= max_step:
            return BUDGET
        a = inp[ih]
        b = work[wh]
        c = out[oh]
        nxt = table[s, a, b, c, 0]
        if nxt < 0:
            return STUCK_MISSING
        mi = table[s, a, b, c, 3]
        mw = table[s, a, b, c, 4]
        mo = table[s, a, b, c, 5]
        if (mi < 0 and ih == 1) or (mo < 0 and oh == 1):
            return STUCK_BOUNDARY
        if ih + mi >= inp.shape[0]:
            return GROW_INPUT
        if wh + mw < 0:
            return GROW_WORK_LEFT
        if wh + mw >= work.shape[0]:
            return GROW_WORK_RIGHT
        if oh + mo >= out.shape[0]:
            return GROW_OUTPUT
        ww = table[s, a, b, c, 1]
        wo = table[s, a, b, c, 2]
        if ww != b:
            regs[5] ^= zwork[b, wh] ^ zwork[ww, wh]
            work[wh] = ww
        if wo != c:
            regs[5] ^= zout[c, oh] ^ zout[wo, oh]
            out[oh] = wo
            if disp[wo] != disp[c]:
                regs[10] = i + 1
                if oh == 1:
                    regs[11] = i + 1
        regs[0] = nxt
        regs[1] = ih + mi
        regs[2] = wh + mw
        regs[3] = oh + mo
        regs[4] = i + 1


def warm_up():
    """Compile the kernel (numba) with a trivial call."""
    table = -np.ones((1, 1, 1, 1, 6), dtype=np.int32)
    one = np.zeros(1, dtype=np.uint8)
    z = np.zeros(4, dtype=np.int64)
    regs = np.zeros(N_REGS, dtype=np.int64)
    regs[1] = regs[3] = 1
    regs[8] = regs[12] = -1
    tape = np.zeros(4, dtype=np.int32)
    step_kernel(table, one, np.zeros(1, dtype=np.int32), tape.copy(), tape.copy(), tape.copy(),
                np.zeros(1, dtype=np.int64), z, z, z, np.zeros((1, 4), dtype=np.int64),
                np.zeros((1, 4), dtype=np.int64), np.zeros(4, dtype=np.int64),
                np.zeros(4, dtype=np.int64), np.zeros(4, dtype=np.uint8), regs, 0, 1, True,
                np.zeros(0, dtype=np.int32), np.zeros(0, dtype=np.int32),
                np.zeros(0, dtype=np.int64), 0)

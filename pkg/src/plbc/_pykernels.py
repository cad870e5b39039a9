"""Pure-Python implementations of the hot loops.

Same signatures and results as the compiled ``_kernels`` module; used when
the extension is not built (or when ``PLBC_PURE_PYTHON`` is set).  Packed
bit vectors arrive as ``uint64`` arrays of shape ``(count, words)``, little
endian by word.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

SCHEME_NONE = 0
SCHEME_ONE_STEP = 1
SCHEME_TWO_STEP = 2

# output columns of masking_trials
COL_U = 0
COL_UNMASKED = 1
COL_DEFICIENCY = 2
COL_DEFECT_ERRORS = 3
COL_NOISE = 4
COL_STEP = 5
NSTATS = 6

STEP_TRIVIAL = 0
STEP_ONE = 1
STEP_TWO = 2
STEP_ONE_STEP = 3

_M64 = (1 << 64) - 1


def _to_ints(arr: np.ndarray) -> list[int]:
    out = []
    for row in arr.tolist():
        v = 0
        for i, w in enumerate(row):
            v |= int(w) << (64 * i)
        out.append(v)
    return out


def weight_histogram(basis: np.ndarray, n: int) -> np.ndarray:
    """Weight counts of all 2^dim combinations of the basis rows (Gray-code walk)."""
    rows = _to_ints(np.asarray(basis, dtype=np.uint64))
    hist = [0] * (n + 1)
    hist[0] = 1
    c = 0
    for i in range(1, 1 << len(rows)):
        c ^= rows[(i & -i).bit_length() - 1]
        hist[c.bit_count()] += 1
    return np.array(hist, dtype=np.int64)


def _rank(vectors) -> int:
    basis: dict[int, int] = {}
    for r in vectors:
        while r:
            top = r.bit_length() - 1
            b = basis.get(top)
            if b is None:
                basis[top] = r
                break
            r ^= b
    return len(basis)


def subset_deficiency_counts(cols: np.ndarray, u: int) -> np.ndarray:
    """Histogram of u - rank over every u-subset of the given columns."""
    vecs = _to_ints(np.asarray(cols, dtype=np.uint64))
    counts = [0] * (u + 1)
    for sub in combinations(vecs, u):
        counts[u - _rank(sub)] += 1
    return np.array(counts, dtype=np.int64)


def _solve(rows: list[int], rhs: list[int]) -> tuple[int | None, int]:
    """Gauss-Jordan on packed rows with a separate rhs bit per row.

    Returns (solution or None, rank).  Pivots go in increasing column order
    and free variables are zero, matching algebra.solve_rows.
    """
    work = [(r, b) for r, b in zip(rows, rhs)]
    done: list[tuple[int, int, int]] = []  # (row, rhs, pivot bit)
    inconsistent = False
    while True:
        live = [item for item in work if item[0]]
        if any(b for r, b in work if not r):
            inconsistent = True
        if not live:
            break
        low = min(r & -r for r, _ in live)
        for idx, (r, b) in enumerate(live):
            if r & low:
                pr, pb = live.pop(idx)
                break
        work = [(r ^ pr, b ^ pb) if r & low else (r, b) for r, b in live]
        done = [(r ^ pr, b ^ pb, p) if r & low else (r, b, p) for r, b, p in done]
        done.append((pr, pb, low))
    rank = len(done)
    if inconsistent:
        return None, rank
    x = 0
    for _, b, p in done:
        if b:
            x |= p
    return x, rank


def masking_trials(
    g0_cols: np.ndarray,
    g1_cols: np.ndarray,
    n: int,
    k: int,
    d0: int,
    scheme: int,
    fixed_u: int,
    eps_threshold: int,
    eps_all: int,
    p_threshold: int,
    p_all: int,
    off_msg: int,
    off_pos: int,
    off_stuck: int,
    off_data: int,
    off_noise: int,
    track_rank: int,
    words: np.ndarray,
) -> np.ndarray:
    """Run one block of stuck-at trials; one row of ``words`` per trial.

    ``fixed_u >= 0`` draws exactly that many defect positions by a partial
    Fisher-Yates shuffle; ``fixed_u < 0`` makes every cell defective
    independently (word < ``eps_threshold``).  Returns an ``int32`` array of
    shape ``(trials, NSTATS)``.
    """
    g0 = _to_ints(np.asarray(g0_cols, dtype=np.uint64))
    g1 = _to_ints(np.asarray(g1_cols, dtype=np.uint64))
    nw_n = (n + 63) // 64
    kw = (k + 63) // 64
    kmask = (1 << k) - 1
    block = np.asarray(words, dtype=np.uint64)
    out = np.zeros((block.shape[0], NSTATS), dtype=np.int32)
    use_noise = p_all or p_threshold > 0
    for t, row in enumerate(block.tolist()):
        w = 0
        for i in range(kw):
            w |= row[off_msg + i] << (64 * i)
        w &= kmask
        stuck = 0
        data = 0
        for i in range(nw_n):
            stuck |= row[off_stuck + i] << (64 * i)
            data |= row[off_data + i] << (64 * i)

        if fixed_u >= 0:
            perm = list(range(n))
            for i in range(fixed_u):
                j = i + ((row[off_pos + i] * (n - i)) >> 64)
                perm[i], perm[j] = perm[j], perm[i]
            psi = sorted(perm[:fixed_u])
        else:
            psi = [i for i in range(n) if eps_all or row[off_pos + i] < eps_threshold]
        u = len(psi)

        defect_mask = 0
        for i in psi:
            defect_mask |= 1 << i
        noise = 0
        if use_noise:
            for i in range(n):
                if not (defect_mask >> i) & 1 and (p_all or row[off_noise + i] < p_threshold):
                    noise += 1
        defect_errors = ((stuck ^ data) & defect_mask).bit_count()

        # b_i = (w G1)_i xor s_i at each defect position
        b = [((w & g1[i]).bit_count() & 1) ^ ((stuck >> i) & 1) for i in psi]
        cols = [g0[i] for i in psi]

        unmasked = 0
        step = STEP_TRIVIAL
        deficiency = 0
        if scheme == SCHEME_TWO_STEP or track_rank:
            x, rk = _solve(cols, b)
            deficiency = u - rk
        if scheme == SCHEME_TWO_STEP:
            if x is not None:
                step = STEP_TRIVIAL if u < d0 else STEP_ONE
            else:
                step = STEP_TWO
        elif scheme == SCHEME_ONE_STEP:
            step = STEP_ONE_STEP
        if (scheme == SCHEME_TWO_STEP and step == STEP_TWO) or scheme == SCHEME_ONE_STEP:
            m = min(d0 - 1, u)
            # psi is ascending; the m largest indices are the tail
            sel_cols = cols[u - m:]
            sel_b = b[u - m:]
            x, _ = _solve(sel_cols, sel_b)
            if x is None:
                raise ArithmeticError("selected defect columns are dependent; d0 is wrong")
            for c, bi in zip(cols, b):
                unmasked += ((x & c).bit_count() & 1) ^ bi

        r = out[t]
        r[COL_U] = u
        r[COL_UNMASKED] = unmasked
        r[COL_DEFICIENCY] = deficiency
        r[COL_DEFECT_ERRORS] = defect_errors
        r[COL_NOISE] = noise
        r[COL_STEP] = step
    return out

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops.  Mirrors ``plbc._pykernels`` bit for bit."""

import numpy as np

from libc.stdlib cimport malloc, free
from libc.string cimport memcpy, memset
from libc.stdint cimport uint64_t, int64_t, int32_t


cdef extern from *:
    """
    static inline int plbc_popcount(unsigned long long x) { return __builtin_popcountll(x); }
    static inline int plbc_ctz(unsigned long long x) { return __builtin_ctzll(x); }
    static inline unsigned long long plbc_mulhi(unsigned long long a, unsigned long long b) {
        return (unsigned long long)(((unsigned __int128)a * b) >> 64);
    }
    """
    int plbc_popcount(unsigned long long x) nogil
    int plbc_ctz(unsigned long long x) nogil
    unsigned long long plbc_mulhi(unsigned long long a, unsigned long long b) nogil


cdef enum:
    C_SCHEME_NONE = 0
    C_SCHEME_ONE_STEP = 1
    C_SCHEME_TWO_STEP = 2
    C_COL_U = 0
    C_COL_UNMASKED = 1
    C_COL_DEFICIENCY = 2
    C_COL_DEFECT_ERRORS = 3
    C_COL_NOISE = 4
    C_COL_STEP = 5
    C_NSTATS = 6
    C_STEP_TRIVIAL = 0
    C_STEP_ONE = 1
    C_STEP_TWO = 2
    C_STEP_ONE_STEP = 3

SCHEME_NONE = C_SCHEME_NONE
SCHEME_ONE_STEP = C_SCHEME_ONE_STEP
SCHEME_TWO_STEP = C_SCHEME_TWO_STEP
COL_U = C_COL_U
COL_UNMASKED = C_COL_UNMASKED
COL_DEFICIENCY = C_COL_DEFICIENCY
COL_DEFECT_ERRORS = C_COL_DEFECT_ERRORS
COL_NOISE = C_COL_NOISE
COL_STEP = C_COL_STEP
NSTATS = C_NSTATS
STEP_TRIVIAL = C_STEP_TRIVIAL
STEP_ONE = C_STEP_ONE
STEP_TWO = C_STEP_TWO
STEP_ONE_STEP = C_STEP_ONE_STEP


cdef inline int lowest_bit(const uint64_t* v, Py_ssize_t nw) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(nw):
        if v[i]:
            return <int>(i * 64 + plbc_ctz(v[i]))
    return -1


cdef inline int parity_and(const uint64_t* a, const uint64_t* b, Py_ssize_t nw) noexcept nogil:
    cdef Py_ssize_t i
    cdef uint64_t acc = 0
    for i in range(nw):
        acc ^= a[i] & b[i]
    return plbc_popcount(acc) & 1


cdef int solve_inplace(uint64_t* rows, int* rhs, int m, Py_ssize_t nw,
                       int* pivcol, uint64_t* x, int* consistent) noexcept nogil:
    """Gauss-Jordan over m packed rows; returns the rank.

    On exit ``x`` holds the solution with free variables zero (valid only when
    ``consistent`` is 1).
    """
    cdef int rank = 0
    cdef int r, best_row, best_col, lb, tmp_b
    cdef Py_ssize_t i, start
    cdef uint64_t tmp
    cdef uint64_t* prow
    cdef uint64_t* orow
    while True:
        best_row = -1
        best_col = 0
        for r in range(rank, m):
            lb = lowest_bit(rows + r * nw, nw)
            if lb >= 0 and (best_row < 0 or lb < best_col):
                best_row = r
                best_col = lb
        if best_row < 0:
            break
        if best_row != rank:
            for i in range(nw):
                tmp = rows[best_row * nw + i]
                rows[best_row * nw + i] = rows[rank * nw + i]
                rows[rank * nw + i] = tmp
            tmp_b = rhs[best_row]
            rhs[best_row] = rhs[rank]
            rhs[rank] = tmp_b
        prow = rows + rank * nw
        start = best_col >> 6
        for r in range(m):
            if r == rank:
                continue
            orow = rows + r * nw
            if (orow[best_col >> 6] >> (best_col & 63)) & 1:
                for i in range(start, nw):
                    orow[i] ^= prow[i]
                rhs[r] ^= rhs[rank]
        pivcol[rank] = best_col
        rank += 1
    consistent[0] = 1
    for r in range(rank, m):
        if rhs[r]:
            consistent[0] = 0
    memset(x, 0, nw * sizeof(uint64_t))
    for r in range(rank):
        if rhs[r]:
            x[pivcol[r] >> 6] |= (<uint64_t>1) << (pivcol[r] & 63)
    return rank


def weight_histogram(basis, int n):
    """Weight counts of all 2^dim combinations of the basis rows (Gray-code walk)."""
    cdef const uint64_t[:, ::1] B = np.ascontiguousarray(basis, dtype=np.uint64)
    cdef Py_ssize_t dim = B.shape[0]
    cdef Py_ssize_t nw = B.shape[1] if dim else 1
    hist_arr = np.zeros(n + 1, dtype=np.int64)
    cdef int64_t[::1] hist = hist_arr
    cdef uint64_t* c = <uint64_t*>malloc(max(nw, 1) * sizeof(uint64_t))
    cdef unsigned long long i, total
    cdef Py_ssize_t j, row
    cdef int wgt
    if c == NULL:
        raise MemoryError()
    memset(c, 0, max(nw, 1) * sizeof(uint64_t))
    hist[0] = 1
    total = (<unsigned long long>1) << dim
    try:
        with nogil:
            for i in range(1, total):
                row = plbc_ctz(i)
                wgt = 0
                for j in range(nw):
                    c[j] ^= B[row, j]
                    wgt += plbc_popcount(c[j])
                hist[wgt] += 1
    finally:
        free(c)
    return hist_arr


def subset_deficiency_counts(cols, int u):
    """Histogram of u - rank over every u-subset of the given columns."""
    cdef const uint64_t[:, ::1] C = np.ascontiguousarray(cols, dtype=np.uint64)
    cdef Py_ssize_t n = C.shape[0]
    cdef Py_ssize_t nw = C.shape[1] if n else 1
    counts_arr = np.zeros(u + 1, dtype=np.int64)
    cdef int64_t[::1] counts = counts_arr
    if u > n:
        return counts_arr
    if u == 0:
        counts[0] = 1
        return counts_arr
    # level j holds the j-th chosen column reduced against levels < j
    cdef uint64_t* lv = <uint64_t*>malloc(u * nw * sizeof(uint64_t))
    cdef int* piv = <int*>malloc(u * sizeof(int))
    cdef int* rk = <int*>malloc((u + 1) * sizeof(int))
    cdef int* idx = <int*>malloc(u * sizeof(int))
    cdef int depth, i, p
    cdef Py_ssize_t w
    cdef uint64_t* v
    if lv == NULL or piv == NULL or rk == NULL or idx == NULL:
        free(lv); free(piv); free(rk); free(idx)
        raise MemoryError()
    try:
        with nogil:
            rk[0] = 0
            depth = 0
            idx[0] = 0
            while depth >= 0:
                if idx[depth] > n - (u - depth):
                    depth -= 1
                    if depth >= 0:
                        idx[depth] += 1
                    continue
                v = lv + depth * nw
                for w in range(nw):
                    v[w] = C[idx[depth], w]
                for i in range(depth):
                    p = piv[i]
                    if p >= 0 and (v[p >> 6] >> (p & 63)) & 1:
                        for w in range(nw):
                            v[w] ^= lv[i * nw + w]
                piv[depth] = lowest_bit(v, nw)
                rk[depth + 1] = rk[depth] + (1 if piv[depth] >= 0 else 0)
                if depth == u - 1:
                    counts[u - rk[u]] += 1
                    idx[depth] += 1
                else:
                    idx[depth + 1] = idx[depth] + 1
                    depth += 1
    finally:
        free(lv); free(piv); free(rk); free(idx)
    return counts_arr


def masking_trials(g0_cols, g1_cols, int n, int k, int d0, int scheme, int fixed_u,
                   eps_threshold, int eps_all, p_threshold, int p_all,
                   int off_msg, int off_pos, int off_stuck, int off_data, int off_noise,
                   int track_rank, words):
    """Run one block of stuck-at trials; one row of ``words`` per trial."""
    cdef const uint64_t[:, ::1] G0 = np.ascontiguousarray(g0_cols, dtype=np.uint64)
    cdef const uint64_t[:, ::1] G1 = np.ascontiguousarray(g1_cols, dtype=np.uint64)
    cdef const uint64_t[:, ::1] W = np.ascontiguousarray(words, dtype=np.uint64)
    cdef Py_ssize_t T = W.shape[0]
    cdef Py_ssize_t nw0 = G0.shape[1]
    cdef Py_ssize_t nw1 = G1.shape[1]
    cdef Py_ssize_t kw = (k + 63) // 64
    cdef uint64_t eps_thr = <uint64_t>int(eps_threshold)
    cdef uint64_t p_thr = <uint64_t>int(p_threshold)
    out_arr = np.zeros((T, C_NSTATS), dtype=np.int32)
    cdef int32_t[:, ::1] out = out_arr

    cdef int* perm = <int*>malloc(max(n, 1) * sizeof(int))
    cdef int* psi = <int*>malloc(max(n, 1) * sizeof(int))
    cdef int* b = <int*>malloc(max(n, 1) * sizeof(int))
    cdef int* rhs = <int*>malloc(max(n, 1) * sizeof(int))
    cdef int* pivcol = <int*>malloc(max(n, 1) * sizeof(int))
    cdef uint64_t* rows = <uint64_t*>malloc(max(n, 1) * nw0 * sizeof(uint64_t))
    cdef uint64_t* x = <uint64_t*>malloc(nw0 * sizeof(uint64_t))
    cdef uint64_t* wv = <uint64_t*>malloc(max(nw1, 1) * sizeof(uint64_t))

    cdef Py_ssize_t t, i, jj, q
    cdef int u, m, rk, consistent, unmasked, step, deficiency, noise, defect_errors
    cdef int pos, tmp, key, use_noise, sbit, dbit, solved
    cdef uint64_t word

    if (perm == NULL or psi == NULL or b == NULL or rhs == NULL or pivcol == NULL
            or rows == NULL or x == NULL or wv == NULL):
        free(perm); free(psi); free(b); free(rhs); free(pivcol); free(rows); free(x); free(wv)
        raise MemoryError()

    use_noise = 1 if (p_all or p_thr > 0) else 0
    try:
        with nogil:
            for t in range(T):
                # message, masked to k bits
                for i in range(nw1):
                    wv[i] = 0
                for i in range(kw):
                    wv[i] = W[t, off_msg + i]
                if k % 64 and kw > 0:
                    wv[kw - 1] &= ((<uint64_t>1) << (k % 64)) - 1

                # defect positions, ascending
                if fixed_u >= 0:
                    for i in range(n):
                        perm[i] = <int>i
                    for i in range(fixed_u):
                        jj = i + <Py_ssize_t>plbc_mulhi(W[t, off_pos + i], <uint64_t>(n - i))
                        tmp = perm[i]
                        perm[i] = perm[jj]
                        perm[jj] = tmp
                    u = fixed_u
                    for i in range(u):
                        key = perm[i]
                        q = i - 1
                        while q >= 0 and psi[q] > key:
                            psi[q + 1] = psi[q]
                            q -= 1
                        psi[q + 1] = key
                else:
                    u = 0
                    for i in range(n):
                        if eps_all or W[t, off_pos + i] < eps_thr:
                            psi[u] = <int>i
                            u += 1

                # defect-induced errors against random stored data, noise off defects
                defect_errors = 0
                for i in range(u):
                    pos = psi[i]
                    sbit = (W[t, off_stuck + (pos >> 6)] >> (pos & 63)) & 1
                    dbit = (W[t, off_data + (pos >> 6)] >> (pos & 63)) & 1
                    defect_errors += sbit ^ dbit
                noise = 0
                if use_noise:
                    q = 0
                    for i in range(n):
                        if q < u and psi[q] == i:
                            q += 1
                            continue
                        if p_all or W[t, off_noise + i] < p_thr:
                            noise += 1

                for i in range(u):
                    pos = psi[i]
                    sbit = (W[t, off_stuck + (pos >> 6)] >> (pos & 63)) & 1
                    b[i] = parity_and(wv, &G1[pos, 0], nw1) ^ sbit if nw1 > 0 else sbit

                unmasked = 0
                step = C_STEP_TRIVIAL
                deficiency = 0
                solved = 0
                if scheme == C_SCHEME_TWO_STEP or track_rank:
                    for i in range(u):
                        memcpy(rows + i * nw0, &G0[psi[i], 0], nw0 * sizeof(uint64_t))
                        rhs[i] = b[i]
                    rk = solve_inplace(rows, rhs, u, nw0, pivcol, x, &consistent)
                    deficiency = u - rk
                    solved = consistent
                if scheme == C_SCHEME_TWO_STEP:
                    if solved:
                        step = C_STEP_TRIVIAL if u < d0 else C_STEP_ONE
                    else:
                        step = C_STEP_TWO
                elif scheme == C_SCHEME_ONE_STEP:
                    step = C_STEP_ONE_STEP
                if (scheme == C_SCHEME_TWO_STEP and step == C_STEP_TWO) or scheme == C_SCHEME_ONE_STEP:
                    m = d0 - 1 if d0 - 1 < u else u
                    for i in range(m):
                        memcpy(rows + i * nw0, &G0[psi[u - m + i], 0], nw0 * sizeof(uint64_t))
                        rhs[i] = b[u - m + i]
                    solve_inplace(rows, rhs, m, nw0, pivcol, x, &consistent)
                    if not consistent:
                        with gil:
                            raise ArithmeticError("selected defect columns are dependent; d0 is wrong")
                    for i in range(u):
                        unmasked += parity_and(x, &G0[psi[i], 0], nw0) ^ b[i]

                out[t, C_COL_U] = u
                out[t, C_COL_UNMASKED] = unmasked
                out[t, C_COL_DEFICIENCY] = deficiency
                out[t, C_COL_DEFECT_ERRORS] = defect_errors
                out[t, C_COL_NOISE] = noise
                out[t, C_COL_STEP] = step
    finally:
        free(perm); free(psi); free(b); free(rhs); free(pivcol); free(rows); free(x); free(wv)
    return out_arr

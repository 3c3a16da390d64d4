# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled backend for the hot kernels.

Same contracts as `aelforge._core.pure`; see that module for the table
encoding.  Kept allocation-free in the inner loops.
"""

from libc.stdlib cimport malloc, free
from libc.string cimport memcpy, memset

BACKEND = "compiled"


cdef long _ipow(long base, int e):
    cdef long out = 1
    cdef int i
    for i in range(e):
        out *= base
    return out


cdef int _rref(unsigned char *mat, int rows, int cols, int q,
               const unsigned char *mul, const unsigned char *inv,
               const unsigned char *sub, int *pivots) nogil:
    cdef int rank = 0, col, r, c, pivot
    cdef unsigned char lead, f, tmp
    for col in range(cols):
        pivot = -1
        for r in range(rank, rows):
            if mat[r * cols + col]:
                pivot = r
                break
        if pivot < 0:
            continue
        if pivot != rank:
            for c in range(cols):
                tmp = mat[rank * cols + c]
                mat[rank * cols + c] = mat[pivot * cols + c]
                mat[pivot * cols + c] = tmp
        lead = mat[rank * cols + col]
        if lead != 1:
            f = inv[lead]
            for c in range(col, cols):
                mat[rank * cols + c] = mul[mat[rank * cols + c] * q + f]
        for r in range(rows):
            if r == rank:
                continue
            f = mat[r * cols + col]
            if f:
                for c in range(col, cols):
                    mat[r * cols + c] = sub[mat[r * cols + c] * q
                                            + mul[f * q + mat[rank * cols + c]]]
        if pivots != NULL:
            pivots[rank] = col
        rank += 1
        if rank == rows:
            break
    return rank


def rref_inplace(mat, int rows, int cols, int q, mul, inv, sub):
    cdef unsigned char[::1] m = mat
    cdef const unsigned char[::1] mt = mul
    cdef const unsigned char[::1] it = inv
    cdef const unsigned char[::1] st = sub
    cdef int *pivots = <int *> malloc(max(rows, 1) * sizeof(int))
    if pivots == NULL:
        raise MemoryError
    cdef int rank
    try:
        with nogil:
            rank = _rref(&m[0] if rows * cols else NULL, rows, cols, q,
                         &mt[0], &it[0], &st[0], pivots)
        return rank, tuple(pivots[i] for i in range(rank))
    finally:
        free(pivots)


def rank_of(mat, int rows, int cols, int q, mul, inv, sub):
    work = bytearray(mat)
    rank, _ = rref_inplace(work, rows, cols, q, mul, inv, sub)
    return rank


def matmul(a, int ar, int ac, b, int bc, int q, mul, add):
    cdef const unsigned char[::1] av = a
    cdef const unsigned char[::1] bv = b
    cdef const unsigned char[::1] mt = mul
    cdef const unsigned char[::1] at = add
    out = bytearray(ar * bc)
    cdef unsigned char[::1] ov = out
    cdef int i, j, k
    cdef unsigned char acc
    with nogil:
        for i in range(ar):
            for j in range(bc):
                acc = 0
                for k in range(ac):
                    acc = at[acc * q + mt[av[i * ac + k] * q + bv[k * bc + j]]]
                ov[i * bc + j] = acc
    return bytes(out)


def codeword_table(gen, int k, int n, int q, add):
    cdef const unsigned char[::1] g = gen
    cdef const unsigned char[::1] at = add
    cdef long total = _ipow(q, k)
    out = bytearray(total * n)
    cdef unsigned char[::1] ov = out
    cdef unsigned char *cw = <unsigned char *> malloc(n)
    cdef int *digits = <int *> malloc(k * sizeof(int))
    if cw == NULL or digits == NULL:
        free(cw); free(digits)
        raise MemoryError
    cdef long m
    cdef int i, c
    try:
        with nogil:
            memset(cw, 0, n)
            memset(<void *> digits, 0, k * sizeof(int))
            for m in range(total):
                memcpy(&ov[m * n], cw, n)
                if m == total - 1:
                    break
                i = 0
                while True:
                    for c in range(n):
                        cw[c] = at[cw[c] * q + g[i * n + c]]
                    if digits[i] < q - 1:
                        digits[i] += 1
                        break
                    digits[i] = 0
                    i += 1
        return bytes(out)
    finally:
        free(cw)
        free(digits)


def min_nonzero_weight(gen, int k, int n, int q, add):
    cdef const unsigned char[::1] g = gen
    cdef const unsigned char[::1] at = add
    cdef unsigned char *cw = <unsigned char *> malloc(n)
    cdef int *digits = <int *> malloc(k * sizeof(int))
    if cw == NULL or digits == NULL:
        free(cw); free(digits)
        raise MemoryError
    cdef long total = _ipow(q, k) - 1, step
    cdef int i, c, w, best = n + 1
    try:
        with nogil:
            memset(cw, 0, n)
            memset(<void *> digits, 0, k * sizeof(int))
            for step in range(total):
                i = 0
                while True:
                    for c in range(n):
                        cw[c] = at[cw[c] * q + g[i * n + c]]
                    if digits[i] < q - 1:
                        digits[i] += 1
                        break
                    digits[i] = 0
                    i += 1
                w = 0
                for c in range(n):
                    if cw[c]:
                        w += 1
                if w and w < best:
                    best = w
        return best
    finally:
        free(cw)
        free(digits)


def rim_agreement_scan(gen, int k, int n, int q, int t, mul, add, sub,
                       edge_specs):
    """See `aelforge._core.pure.rim_agreement_scan` for the contract."""
    cdef const unsigned char[::1] mt = mul
    cdef const unsigned char[::1] at = add
    cdef const unsigned char[::1] st = sub
    cdef long msgs = _ipow(q, k)
    table_b = codeword_table(gen, k, n, q, add)
    cdef const unsigned char[::1] table = table_b

    # Flatten edge_specs: per mask an offset range into (j0, jneg) pairs.
    cdef int nmasks = 1 << t
    cdef int total_rows = 0
    for spec in edge_specs:
        total_rows += len(spec)
    cdef int *offs = <int *> malloc((nmasks + 1) * sizeof(int))
    cdef int *pairs = <int *> malloc(max(total_rows, 1) * 2 * sizeof(int))
    cdef unsigned char *is_zero = <unsigned char *> malloc(msgs)
    # per-tuple scratch
    cdef long *combo = <long *> malloc((t - 1) * sizeof(long))
    cdef int *cls_mask = <int *> malloc((t + 1) * sizeof(int))
    cdef unsigned char *cls_val = <unsigned char *> malloc(t + 1)
    if offs == NULL or pairs == NULL or is_zero == NULL or combo == NULL \
            or cls_mask == NULL or cls_val == NULL:
        free(offs); free(pairs); free(is_zero); free(combo)
        free(cls_mask); free(cls_val)
        raise MemoryError

    cdef int idx = 0, mi, pi
    for mi in range(nmasks):
        offs[mi] = idx
        for pair in edge_specs[mi]:
            pairs[2 * idx] = pair[0]
            pairs[2 * idx + 1] = pair[1]
            idx += 1
    offs[nmasks] = idx

    cdef long tuples_visited = 0, cases = 0, violations = 0
    cdef long first_combo0 = -1
    cdef int first_coord = -1, first_mask = -1
    cdef long m, total_prod, ok_prod
    cdef int i, j, nc, found, mask, ok, ok_count, n_opts, j0, jneg
    cdef unsigned char v, d, val
    cdef bint allzero, done

    with nogil:
        for m in range(msgs):
            is_zero[m] = 1
            for i in range(n):
                if table[m * n + i]:
                    is_zero[m] = 0
                    break
        for j in range(t - 1):
            combo[j] = 0
        done = False
        while not done:
            allzero = True
            for j in range(t - 1):
                if not is_zero[combo[j]]:
                    allzero = False
                    break
            if not allzero:
                tuples_visited += 1
                total_prod = 1
                ok_prod = 1
                for i in range(n):
                    # value classes over the t codeword entries (last is 0)
                    nc = 0
                    for j in range(t):
                        v = table[combo[j] * n + i] if j < t - 1 else 0
                        found = -1
                        for pi in range(nc):
                            if cls_val[pi] == v:
                                found = pi
                                break
                        if found < 0:
                            cls_val[nc] = v
                            cls_mask[nc] = 1 << j
                            nc += 1
                        else:
                            cls_mask[found] |= 1 << j
                    n_opts = nc + (1 if nc < q else 0)  # empty edge if a fresh y fits
                    ok_count = 0
                    for pi in range(n_opts):
                        mask = cls_mask[pi] if pi < nc else 0
                        ok = 1
                        for idx in range(offs[mask], offs[mask + 1]):
                            j0 = pairs[2 * idx]
                            jneg = pairs[2 * idx + 1]
                            v = table[combo[j0] * n + i]
                            d = table[combo[jneg] * n + i] if jneg >= 0 else 0
                            val = st[v * q + d]
                            if val:
                                ok = 0
                                if first_coord < 0:
                                    first_combo0 = combo[0]
                                    first_coord = i
                                    first_mask = mask
                                break
                        ok_count += ok
                    total_prod *= n_opts
                    ok_prod *= ok_count
                cases += total_prod
                violations += total_prod - ok_prod
            # advance the tuple odometer
            j = 0
            while True:
                if j == t - 1:
                    done = True
                    break
                combo[j] += 1
                if combo[j] < msgs:
                    break
                combo[j] = 0
                j += 1

    first = None
    if first_coord >= 0:
        first = (first_combo0, first_coord, first_mask)
    free(offs); free(pairs); free(is_zero); free(combo)
    free(cls_mask); free(cls_val)
    return tuples_visited, cases, violations, first

"""Pure-Python backend for the hot kernels.

Mirrors the compiled extension in `_kernels.pyx` operation for operation.
All kernels work on index-encoded field elements packed into bytes-like
objects, with arithmetic supplied as flat lookup tables:

    mul, add, sub : bytes of length q*q, entry [a*q + b]
    inv           : bytes of length q (inv[0] unused)

Only fields with q <= 256 go through this layer; larger fields take the
generic object path in `aelforge.linalg`.
"""

from __future__ import annotations

from itertools import product

BACKEND = "pure"


def rref_inplace(mat: bytearray, rows: int, cols: int, q: int,
                 mul: bytes, inv: bytes, sub: bytes) -> tuple[int, tuple[int, ...]]:
    """Reduce `mat` to reduced row-echelon form. Returns (rank, pivot columns)."""
    rank = 0
    pivots = []
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
                a, b = mat[rank * cols + c], mat[pivot * cols + c]
                mat[rank * cols + c], mat[pivot * cols + c] = b, a
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
        pivots.append(col)
        rank += 1
        if rank == rows:
            break
    return rank, tuple(pivots)


def rank_of(mat: bytes, rows: int, cols: int, q: int,
            mul: bytes, inv: bytes, sub: bytes) -> int:
    work = bytearray(mat)
    rank, _ = rref_inplace(work, rows, cols, q, mul, inv, sub)
    return rank


def matmul(a: bytes, ar: int, ac: int, b: bytes, bc: int, q: int,
           mul: bytes, add: bytes) -> bytes:
    """(ar x ac) times (ac x bc) product."""
    out = bytearray(ar * bc)
    for i in range(ar):
        base = i * ac
        for j in range(bc):
            acc = 0
            for k in range(ac):
                acc = add[acc * q + mul[a[base + k] * q + b[k * bc + j]]]
            out[i * bc + j] = acc
    return bytes(out)


def codeword_table(gen: bytes, k: int, n: int, q: int, add: bytes) -> bytes:
    """All q**k codewords of the row space, row m = message integer m (base-q,
    little-endian digits)."""
    total = q ** k
    out = bytearray(total * n)
    cw = bytearray(n)
    digits = [0] * k
    for m in range(total):
        out[m * n:(m + 1) * n] = cw
        if m == total - 1:
            break
        i = 0
        while True:
            row = gen[i * n:(i + 1) * n]
            for c in range(n):
                cw[c] = add[cw[c] * q + row[c]]
            if digits[i] < q - 1:
                digits[i] += 1
                break
            digits[i] = 0
            i += 1
    return bytes(out)


def min_nonzero_weight(gen: bytes, k: int, n: int, q: int, add: bytes) -> int:
    """Minimum Hamming weight over the q**k - 1 nonzero-message codewords."""
    best = n + 1
    cw = bytearray(n)
    digits = [0] * k
    for _ in range(q ** k - 1):
        i = 0
        while True:
            row = gen[i * n:(i + 1) * n]
            for c in range(n):
                cw[c] = add[cw[c] * q + row[c]]
            if digits[i] < q - 1:
                digits[i] += 1
                break
            digits[i] = 0
            i += 1
        w = sum(1 for c in cw if c)
        if w and w < best:
            best = w
    return best


def rim_agreement_scan(gen: bytes, k: int, n: int, q: int, t: int,
                       mul: bytes, add: bytes, sub: bytes,
                       edge_specs: list[list[tuple[int, int]]]):
    """Exhaustive agreement-pattern sweep for one generator matrix.

    Enumerates all message tuples (m_1..m_{t-1}, m_t=0), all hypergraphs they
    realize coordinate by coordinate, and checks that the substituted
    agreement-constraint rows (layout given per edge bitmask in `edge_specs`,
    entries +G_i / -G_i per the construction rule) annihilate the nonzero
    message-difference vector.  A nonzero vector in the kernel certifies the
    matrix is rank-deficient, which is the property under test.

    Returns (tuples_visited, cases_checked, violations, first_violation).
    """
    msgs = q ** k
    table = codeword_table(gen, k, n, q, add)
    is_zero = [not any(table[m * n:(m + 1) * n]) for m in range(msgs)]
    tuples_visited = 0
    cases = 0
    violations = 0
    first = None

    for combo in product(range(msgs), repeat=t - 1):
        if all(is_zero[m] for m in combo):
            continue  # all codewords equal (to zero): no claim to check
        tuples_visited += 1
        rows = [table[m * n:(m + 1) * n] for m in combo]
        total_prod = 1
        ok_prod = 1
        for i in range(n):
            classes: dict[int, int] = {}
            for j in range(t - 1):
                classes.setdefault(rows[j][i], 0)
                classes[rows[j][i]] |= 1 << j
            classes.setdefault(0, 0)
            classes[0] |= 1 << (t - 1)
            masks = list(classes.values())
            if len(classes) < q:
                masks.append(0)
            ok_count = 0
            for mask in masks:
                ok = True
                for j0, jneg in edge_specs[mask]:
                    v = rows[j0][i]
                    d = 0 if jneg < 0 else rows[jneg][i]
                    if sub[v * q + d]:
                        ok = False
                        if first is None:
                            first = (combo[0], i, mask)
                        break
                if ok:
                    ok_count += 1
            total_prod *= len(masks)
            ok_prod *= ok_count
        cases += total_prod
        violations += total_prod - ok_prod
    return tuples_visited, cases, violations, first

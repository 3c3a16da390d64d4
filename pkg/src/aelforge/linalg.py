"""Exact linear algebra over finite fields.

Matrices and vectors are immutable, row-major, with entries stored as field
indices.  Row reduction and rank dispatch to the fast kernel backend for
fields with q <= 256 and fall back to generic field arithmetic above that.

Conventions:

* vectors are rows; a constraint matrix M acts on a vector x as M @ x
  (column convention), so ``kernel(M) = {x : M x = 0}``;
* a Subspace is canonically represented by its reduced row-echelon basis,
  making equality, hashing and tie-breaking deterministic;
* subspaces are ordered by (dimension, RREF entries) lexicographically;
  "lexicographically first" always refers to this order.

The repo-wide text format for matrices is a header line ``q rows cols``
followed by one row per line of space-separated element indices (extension
fields use the power-basis index encoding).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from . import _core
from .gf import GF, Field
from .guards import check_guard


@dataclass(frozen=True)
class FqVector:
    field: Field
    entries: tuple[int, ...]

    def __post_init__(self):
        if any(not 0 <= e < self.field.q for e in self.entries):
            raise ValueError("entry out of field range")

    def __len__(self) -> int:
        return len(self.entries)

    def weight(self) -> int:
        return sum(1 for e in self.entries if e)

    def add(self, other: "FqVector") -> "FqVector":
        f = self.field
        return FqVector(f, tuple(f.add(a, b) for a, b in zip(self.entries, other.entries)))

    def sub(self, other: "FqVector") -> "FqVector":
        f = self.field
        return FqVector(f, tuple(f.sub(a, b) for a, b in zip(self.entries, other.entries)))

    def scale(self, c: int) -> "FqVector":
        f = self.field
        return FqVector(f, tuple(f.mul(c, a) for a in self.entries))

    def dot(self, other: "FqVector") -> int:
        f = self.field
        acc = 0
        for a, b in zip(self.entries, other.entries):
            acc = f.add(acc, f.mul(a, b))
        return acc


@dataclass(frozen=True)
class FqMatrix:
    field: Field
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match shape")
        if any(not 0 <= e < self.field.q for e in self.entries):
            raise ValueError("entry out of field range")

    @classmethod
    def from_rows(cls, field: Field, rows) -> "FqMatrix":
        rows = [tuple(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(field, len(rows), ncols, tuple(e for r in rows for e in r))

    @classmethod
    def zero(cls, field: Field, rows: int, cols: int) -> "FqMatrix":
        return cls(field, rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, field: Field, n: int) -> "FqMatrix":
        return cls(field, n, n, tuple(1 if i == j else 0
                                      for i in range(n) for j in range(n)))

    def entry(self, i: int, j: int) -> int:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple[int, ...]:
        return self.entries[j::self.cols]

    def row_vectors(self) -> list[FqVector]:
        return [FqVector(self.field, self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "FqMatrix":
        return FqMatrix(self.field, self.cols, self.rows,
                        tuple(self.entry(i, j)
                              for j in range(self.cols) for i in range(self.rows)))

    def stack(self, other: "FqMatrix") -> "FqMatrix":
        if other.cols != self.cols or other.field is not self.field:
            raise ValueError("shape/field mismatch")
        return FqMatrix(self.field, self.rows + other.rows, self.cols,
                        self.entries + other.entries)

    def is_zero(self) -> bool:
        return not any(self.entries)


def _tables(field: Field):
    return field.kernel_tables()


def matmul(a: FqMatrix, b: FqMatrix) -> FqMatrix:
    if a.cols != b.rows or a.field is not b.field:
        raise ValueError("shape/field mismatch")
    t = _tables(a.field)
    if t is not None:
        mul, add, _, _ = t
        out = _core.matmul(bytes(a.entries), a.rows, a.cols,
                           bytes(b.entries), b.cols, a.field.q, mul, add)
        return FqMatrix(a.field, a.rows, b.cols, tuple(out))
    f = a.field
    out = []
    for i in range(a.rows):
        for j in range(b.cols):
            acc = 0
            for k in range(a.cols):
                acc = f.add(acc, f.mul(a.entry(i, k), b.entry(k, j)))
            out.append(acc)
    return FqMatrix(f, a.rows, b.cols, tuple(out))


def matvec(m: FqMatrix, v) -> FqVector:
    """Apply the column convention: (m @ v) for a length-`cols` vector."""
    entries = v.entries if isinstance(v, FqVector) else tuple(v)
    if len(entries) != m.cols:
        raise ValueError("length mismatch")
    f = m.field
    out = []
    for i in range(m.rows):
        acc = 0
        row = m.row(i)
        for a, b in zip(row, entries):
            acc = f.add(acc, f.mul(a, b))
        out.append(acc)
    return FqVector(f, tuple(out))


def vecmat(v, m: FqMatrix) -> FqVector:
    """Row convention product v @ m, for encoding with generator matrices."""
    entries = v.entries if isinstance(v, FqVector) else tuple(v)
    if len(entries) != m.rows:
        raise ValueError("length mismatch")
    f = m.field
    out = []
    for j in range(m.cols):
        acc = 0
        for i, c in enumerate(entries):
            if c:
                acc = f.add(acc, f.mul(c, m.entry(i, j)))
        out.append(acc)
    return FqVector(f, tuple(out))


def rref(m: FqMatrix) -> tuple[FqMatrix, int]:
    """Reduced row-echelon form and rank; the row span is preserved."""
    reduced, rank, _ = _rref_pivots(m)
    return reduced, rank


def _rref_pivots(m: FqMatrix) -> tuple[FqMatrix, int, tuple[int, ...]]:
    t = _tables(m.field)
    if t is not None and m.rows * m.cols:
        mul, _, sub, inv = t
        work = bytearray(bytes(m.entries))
        rank, pivots = _core.rref_inplace(work, m.rows, m.cols, m.field.q,
                                          mul, inv, sub)
        return FqMatrix(m.field, m.rows, m.cols, tuple(work)), rank, pivots
    f = m.field
    work = [list(m.row(i)) for i in range(m.rows)]
    rank = 0
    pivots = []
    for col in range(m.cols):
        pivot = next((r for r in range(rank, m.rows) if work[r][col]), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        lead = work[rank][col]
        if lead != 1:
            fct = f.inv(lead)
            work[rank] = [f.mul(e, fct) for e in work[rank]]
        for r in range(m.rows):
            if r != rank and work[r][col]:
                c = work[r][col]
                work[r] = [f.sub(e, f.mul(c, p)) for e, p in zip(work[r], work[rank])]
        pivots.append(col)
        rank += 1
        if rank == m.rows:
            break
    return FqMatrix.from_rows(f, work) if work else m, rank, tuple(pivots)


def rank(m: FqMatrix) -> int:
    return rref(m)[1]


@dataclass(frozen=True)
class Subspace:
    """A subspace of F_q^ambient_dim with its canonical RREF basis."""

    field: Field
    ambient_dim: int
    basis: FqMatrix  # RREF, no zero rows; shape dim x ambient_dim

    @classmethod
    def from_vectors(cls, field: Field, ambient_dim: int, vectors) -> "Subspace":
        rows = [tuple(v.entries if isinstance(v, FqVector) else v) for v in vectors]
        if not rows:
            return cls(field, ambient_dim, FqMatrix(field, 0, ambient_dim, ()))
        m = FqMatrix.from_rows(field, rows)
        if m.cols != ambient_dim:
            raise ValueError("ambient dimension mismatch")
        reduced, rk = rref(m)
        basis = FqMatrix(field, rk, ambient_dim, reduced.entries[: rk * ambient_dim])
        return cls(field, ambient_dim, basis)

    @classmethod
    def zero(cls, field: Field, ambient_dim: int) -> "Subspace":
        return cls(field, ambient_dim, FqMatrix(field, 0, ambient_dim, ()))

    @classmethod
    def full(cls, field: Field, ambient_dim: int) -> "Subspace":
        return cls(field, ambient_dim, FqMatrix.identity(field, ambient_dim))

    @property
    def dim(self) -> int:
        return self.basis.rows

    def contains(self, v) -> bool:
        entries = tuple(v.entries if isinstance(v, FqVector) else v)
        if self.dim == 0:
            return not any(entries)
        stacked = self.basis.stack(FqMatrix(self.field, 1, self.ambient_dim, entries))
        return rank(stacked) == self.dim

    def vectors(self):
        """Every vector of the subspace; guarded by q**dim."""
        f = self.field
        check_guard("subspace_vectors", f.q ** self.dim)
        basis_rows = [self.basis.row(i) for i in range(self.dim)]
        for coeffs in product(f.elements(), repeat=self.dim):
            acc = [0] * self.ambient_dim
            for c, row in zip(coeffs, basis_rows):
                if c:
                    for j, e in enumerate(row):
                        acc[j] = f.add(acc[j], f.mul(c, e))
            yield FqVector(f, tuple(acc))

    def sort_key(self):
        return (self.dim, self.basis.entries)

    def le(self, other: "Subspace") -> bool:
        """Is self a subspace of other?"""
        if self.dim > other.dim:
            return False
        stacked = other.basis.stack(self.basis)
        return rank(stacked) == other.dim


def kernel(m: FqMatrix) -> Subspace:
    """ker m = {x : m x = 0}, canonical, of dimension cols - rank."""
    f = m.field
    reduced, rk, pivots = _rref_pivots(m)
    free_cols = [c for c in range(m.cols) if c not in pivots]
    basis = []
    for free in free_cols:
        v = [0] * m.cols
        v[free] = 1
        for r, pc in enumerate(pivots):
            v[pc] = f.neg(reduced.entry(r, free))
        basis.append(tuple(v))
    return Subspace.from_vectors(f, m.cols, basis)


def row_space(m: FqMatrix) -> Subspace:
    return Subspace.from_vectors(m.field, m.cols, [m.row(i) for i in range(m.rows)])


def annihilator(s: Subspace) -> Subspace:
    """{y : b . y = 0 for every basis vector b}; dim = ambient - dim s."""
    if s.dim == 0:
        return Subspace.full(s.field, s.ambient_dim)
    return kernel(s.basis)


def matrix_with_kernel(s: Subspace) -> FqMatrix:
    """A square matrix whose kernel is exactly `s`.

    Rows span the annihilator of s, padded with zero rows to ambient x ambient
    so profile matrices keep a uniform shape.
    """
    ann = annihilator(s)
    L = s.ambient_dim
    rows = [ann.basis.row(i) for i in range(ann.dim)]
    rows += [(0,) * L] * (L - len(rows))
    return FqMatrix.from_rows(s.field, rows)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """a intersect b via stacked annihilators; canonical result."""
    if a.field is not b.field or a.ambient_dim != b.ambient_dim:
        raise ValueError("mismatched ambient spaces")
    stacked = annihilator(a).basis.stack(annihilator(b).basis)
    if stacked.rows == 0:
        return Subspace.full(a.field, a.ambient_dim)
    return kernel(stacked)


def map_image(m: FqMatrix, s: Subspace) -> Subspace:
    """Image of subspace `s` under x -> m x (column convention)."""
    if m.cols != s.ambient_dim:
        raise ValueError("map domain mismatch")
    imgs = [matvec(m, s.basis.row(i)) for i in range(s.dim)]
    return Subspace.from_vectors(m.field, m.rows, imgs)


def enumerate_subspaces(field: Field, dim: int) -> list[Subspace]:
    """All subspaces of F_q^dim, sorted by (dimension, RREF entries).

    Enumerates RREF basis matrices directly: pick pivot columns, then fill
    the free entries.  Counts match the Gaussian binomial sums.
    """
    check_guard("subspace_vectors", field.q ** dim)
    q = field.q
    out: list[Subspace] = [Subspace.zero(field, dim)]
    for r in range(1, dim + 1):
        layer = []
        for pivots in combinations(range(dim), r):
            free_positions = [
                (i, j)
                for i in range(r)
                for j in range(pivots[i] + 1, dim)
                if j not in pivots
            ]
            for values in product(field.elements(), repeat=len(free_positions)):
                rows = [[0] * dim for _ in range(r)]
                for i, p in enumerate(pivots):
                    rows[i][p] = 1
                for (i, j), v in zip(free_positions, values):
                    rows[i][j] = v
                basis = FqMatrix.from_rows(field, [tuple(row) for row in rows])
                layer.append(Subspace(field, dim, basis))
        layer.sort(key=lambda s: s.sort_key())
        out.extend(layer)
    return out


def subspace_count(q: int, dim: int) -> int:
    """Sum of Gaussian binomial coefficients [dim choose r]_q."""
    total = 0
    for r in range(dim + 1):
        num = 1
        den = 1
        for i in range(r):
            num *= q ** dim - q ** i
            den *= q ** r - q ** i
        total += num // den
    return total


def is_dist_subspace(u: Subspace) -> bool:
    """Membership in L_Dist: for every coordinate pair i < j some member
    vector separates them.  Equivalent to the difference functional
    x_i - x_j not vanishing on the basis."""
    L = u.ambient_dim
    for i in range(L):
        for j in range(i + 1, L):
            if all(u.basis.entry(r, i) == u.basis.entry(r, j)
                   for r in range(u.dim)):
                return False
    return True


def dist_subspaces(field: Field, dim: int) -> list[Subspace]:
    return [s for s in enumerate_subspaces(field, dim) if is_dist_subspace(s)]


def completion_map(w: Subspace) -> FqMatrix:
    """The canonical full-rank map psi with kernel exactly `w`.

    Extends the RREF basis of w by greedily appended standard vectors, then
    projects onto the coordinates of the completion in that basis.  Returns
    an (ambient - dim w) x ambient matrix.
    """
    f = w.field
    L = w.ambient_dim
    K = w.dim
    rows = [w.basis.row(i) for i in range(K)]
    for j in range(L):
        if len(rows) == L:
            break
        cand = tuple(1 if c == j else 0 for c in range(L))
        m = FqMatrix.from_rows(f, rows + [cand])
        if rank(m) == len(rows) + 1:
            rows.append(cand)
    basis_matrix = FqMatrix.from_rows(f, rows)
    inverse = invert(basis_matrix)
    # x = alpha . basis  =>  alpha = x . inverse; psi keeps alpha[K:]
    psi_rows = [tuple(inverse.entry(i, K + j) for i in range(L)) for j in range(L - K)]
    return FqMatrix.from_rows(f, psi_rows)


def invert(m: FqMatrix) -> FqMatrix:
    if m.rows != m.cols:
        raise ValueError("only square matrices invert")
    n = m.rows
    aug = FqMatrix(m.field, n, 2 * n,
                   tuple(e for i in range(n)
                         for e in m.row(i) + FqMatrix.identity(m.field, n).row(i)))
    reduced, rk = rref(aug)
    if rk < n:
        raise ValueError("matrix is singular")
    return FqMatrix(m.field, n, n,
                    tuple(reduced.entry(i, n + j) for i in range(n) for j in range(n)))


def subfield_flatten(u: FqVector, tower: Field | None = None) -> FqMatrix:
    """Power-basis coordinates of each extension-field entry of `u`.

    For u over GF(q^d) returns the len(u) x d matrix over GF(q) whose row i
    is the coefficient vector of u[i].  If <u, v> = 0 over the extension for
    a base-field vector v, then every column of the result is orthogonal to
    v over the base field.
    """
    field = tower if tower is not None else u.field
    if field.base is None:
        raise ValueError("flattening needs an extension tower")
    if tower is not None and tower is not u.field:
        raise ValueError("vector does not live in the given tower")
    base = field.base
    rows = [field.digits(e) for e in u.entries]
    return FqMatrix.from_rows(base, rows)


# -- repo-wide text format ----------------------------------------------

def matrix_to_text(m: FqMatrix) -> str:
    lines = [f"{m.field.q} {m.rows} {m.cols}"]
    for i in range(m.rows):
        lines.append(" ".join(str(e) for e in m.row(i)))
    return "\n".join(lines) + "\n"


def matrix_from_text(text: str, field: Field | None = None) -> FqMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    q, rows, cols = (int(x) for x in lines[0].split())
    if field is None:
        field = GF(q)
    elif field.q != q:
        raise ValueError(f"field order mismatch: file has q={q}, field has q={field.q}")
    entries = []
    for ln in lines[1:1 + rows]:
        entries.extend(int(x) for x in ln.split())
    return FqMatrix(field, rows, cols, tuple(entries))

"""Agreement hypergraphs, weak partition connectivity, and the symbolic
agreement-constraint matrices used to certify inner codes.

Vertices are 0-based internally; the text format is 1-based.  Hyperedges
keep their coordinate order (one edge per codeword coordinate) and empty
edges are retained with weight 0 so the edge index always matches the
coordinate index.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .gf import Field
from .guards import check_guard, guard_limit
from .linalg import FqMatrix, FqVector, rank
from . import _core


@dataclass(frozen=True)
class Hypergraph:
    t: int
    edges: tuple[frozenset[int], ...]

    def __post_init__(self):
        for e in self.edges:
            if any(v < 0 or v >= self.t for v in e):
                raise ValueError("edge vertex out of range")

    @property
    def n(self) -> int:
        return len(self.edges)

    def weight(self) -> int:
        return sum(edge_weight(e) for e in self.edges)

    def restrict(self, vertices: frozenset[int]) -> "Hypergraph":
        """Sub-hypergraph on a vertex subset, vertices relabeled in order."""
        order = sorted(vertices)
        relabel = {v: i for i, v in enumerate(order)}
        edges = tuple(frozenset(relabel[v] for v in e & vertices) for e in self.edges)
        return Hypergraph(len(order), edges)


def edge_weight(e) -> int:
    return max(len(e) - 1, 0)


def agreement_hypergraph(y: FqVector, cs: list[FqVector]) -> Hypergraph:
    """Edge i = indices of the vectors agreeing with y at coordinate i."""
    n = len(y)
    if any(len(c) != n for c in cs):
        raise ValueError("length mismatch")
    edges = tuple(frozenset(j for j, c in enumerate(cs) if c.entries[i] == y.entries[i])
                  for i in range(n))
    return Hypergraph(len(cs), edges)


def set_partitions(t: int):
    """All partitions of {0..t-1} via restricted-growth strings."""
    if t == 0:
        yield []
        return
    rgs = [0] * t

    def emit():
        parts: dict[int, list[int]] = {}
        for v, block in enumerate(rgs):
            parts.setdefault(block, []).append(v)
        return [parts[b] for b in sorted(parts)]

    while True:
        yield emit()
        # advance to the next restricted-growth string
        i = t - 1
        while i > 0:
            if rgs[i] <= max(rgs[:i]):
                rgs[i] += 1
                for j in range(i + 1, t):
                    rgs[j] = 0
                break
            i -= 1
        else:
            return


def bell_number(t: int) -> int:
    row = [1]
    for _ in range(t):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def is_wpc(h: Hypergraph, r: Fraction, n: int) -> bool:
    """(r, n)-weak partition connectivity, checked over all partitions."""
    if h.t > guard_limit("bell_vertices"):
        check_guard("bell_vertices", h.t)
    r = Fraction(r)
    for partition in set_partitions(h.t):
        p = len(partition)
        if p == 1:
            continue
        block_of = {}
        for b, block in enumerate(partition):
            for v in block:
                block_of[v] = b
        crossing = 0
        for e in h.edges:
            hit = len({block_of[v] for v in e})
            crossing += max(hit - 1, 0)
        if crossing < r * n * (p - 1):
            return False
    return True


def deletion_robustness_check(h: Hypergraph, r: Fraction, eps: Fraction,
                              n: int) -> bool:
    """Every deletion of at most eps*n edges leaves an (r, n)-wpc hypergraph.

    Exhaustive over deletion subsets; a False return signals a bug, since
    (r+eps, n)-wpc hypergraphs always survive such deletions.
    """
    r, eps = Fraction(r), Fraction(eps)
    if not is_wpc(h, r + eps, n):
        raise ValueError("precondition: hypergraph must be (r+eps, n)-wpc")
    budget = int(eps * n)
    m = h.n
    total = sum(_binom(m, k) for k in range(budget + 1))
    check_guard("codeword_tuples", total)
    for k in range(budget + 1):
        for drop in combinations(range(m), k):
            kept = tuple(e for i, e in enumerate(h.edges) if i not in drop)
            if not is_wpc(Hypergraph(h.t, kept), r, n):
                return False
    return True


def _binom(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out


def extract_wpc_subset(y: FqVector, cs: list[FqVector], r: Fraction):
    """Smallest vertex subset J (|J| >= 2) of the agreement hypergraph with
    restricted weight >= (|J|-1) r n whose restriction is (r, n)-wpc.

    Subsets are scanned in (size, lexicographic) order, so the returned J is
    inclusion-minimal: any proper subset satisfying the predicate would have
    been visited first.  Returns None with no qualifying subset (only
    possible when the average-distance precondition fails).
    """
    r = Fraction(r)
    n = len(y)
    h = agreement_hypergraph(y, cs)
    t = h.t
    for size in range(2, t + 1):
        for combo in combinations(range(t), size):
            j = frozenset(combo)
            wt = sum(edge_weight(e & j) for e in h.edges)
            if wt < (size - 1) * r * n:
                continue
            if is_wpc(h.restrict(j), r, n):
                return j
    return None


# -- symbolic agreement-constraint matrices ------------------------------


@dataclass(frozen=True)
class RimMatrix:
    """Symbolic layout: one row per (edge, extra-vertex) pair.

    Row (i, j0, jneg) places +G's column i in segment j0 and -G's column i
    in segment jneg; jneg = -1 means the subtracted vertex is the last one
    (t-1), whose segment is omitted from the column space.
    """

    hypergraph: Hypergraph
    k: int
    rows: tuple[tuple[int, int, int], ...]

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return (self.hypergraph.t - 1) * self.k


def edge_row_specs(t: int, edge) -> list[tuple[int, int]]:
    """(j0, jneg) row pairs for one edge per the construction rule: the
    least vertex carries the + segment and each other vertex a - segment,
    omitted when that vertex is t-1."""
    verts = sorted(edge)
    if len(verts) < 2:
        return []
    j0 = verts[0]
    out = []
    for jl in verts[1:]:
        out.append((j0, -1 if jl == t - 1 else jl))
    return out


def all_edge_row_specs(t: int) -> list[list[tuple[int, int]]]:
    """Row specs for every edge bitmask over [t]; feeds the scan kernel."""
    out = []
    for mask in range(1 << t):
        edge = frozenset(v for v in range(t) if mask >> v & 1)
        out.append(edge_row_specs(t, edge))
    return out


def build_rim(h: Hypergraph, k: int) -> RimMatrix:
    if h.t < 2:
        raise ValueError("need at least 2 vertices")
    rows = []
    for i, e in enumerate(h.edges):
        for j0, jneg in edge_row_specs(h.t, e):
            rows.append((i, j0, jneg))
    return RimMatrix(h, k, tuple(rows))


def substitute_rim(rim: RimMatrix, g: FqMatrix) -> FqMatrix:
    """Replace the symbolic column-i entries by G's column i."""
    h = rim.hypergraph
    if g.rows != rim.k or g.cols != h.n:
        raise ValueError("generator shape must be k x n for this hypergraph")
    f = g.field
    t = h.t
    k = rim.k
    entries = []
    for (i, j0, jneg) in rim.rows:
        row = [0] * ((t - 1) * k)
        for rr in range(k):
            row[j0 * k + rr] = g.entry(rr, i)
        if jneg >= 0:
            for rr in range(k):
                row[jneg * k + rr] = f.sub(row[jneg * k + rr], g.entry(rr, i))
        entries.extend(row)
    return FqMatrix(f, len(rim.rows), (t - 1) * k, tuple(entries))


def rim_full_column_rank(rim: RimMatrix, g: FqMatrix) -> bool:
    sub = substitute_rim(rim, g)
    if sub.cols == 0:
        return True
    return rank(sub) == sub.cols


def rim_contrapositive_scan(g: FqMatrix, t: int):
    """Exhaustive check of the rank statement for one generator matrix.

    For every codeword tuple (not all equal) and every agreement hypergraph
    it realizes, the substituted constraint matrix must annihilate the
    nonzero message-difference vector, certifying it is not of full column
    rank.  Returns (tuples, cases, violations, first_violation); runs on
    the fast kernel backend.
    """
    f = g.field
    tables = f.kernel_tables()
    if tables is None:
        raise ValueError("scan kernels need q <= 256")
    mul, add, sub, _ = tables
    return _core.rim_agreement_scan(bytes(g.entries), g.rows, g.cols, f.q, t,
                                    mul, add, sub, all_edge_row_specs(t))


# -- text format ---------------------------------------------------------


def hypergraph_to_text(h: Hypergraph) -> str:
    lines = [f"{h.t} {h.n}"]
    for e in h.edges:
        lines.append(" ".join(str(v + 1) for v in sorted(e)))
    return "\n".join(lines) + "\n"


def hypergraph_from_text(text: str) -> Hypergraph:
    lines = text.splitlines()
    head = [ln for ln in lines if ln.strip()][0]
    t, n = (int(x) for x in head.split())
    body = lines[lines.index(head) + 1:]
    edges = []
    for ln in body:
        if len(edges) == n:
            break
        edges.append(frozenset(int(x) - 1 for x in ln.split()))
    if len(edges) != n:
        raise ValueError("edge count mismatch")
    return Hypergraph(t, tuple(edges))

"""The local-constraint calculus.

A local profile description pairs exact-rational fractions with L x L
constraint matrices; a code satisfies it when some arrangement of the
matrices over the coordinates puts every row of a witness matrix in the
kernel of its assigned constraint.  This module implements the potential
function, exact threshold rates, the canonical collapse subspace and map,
implied descriptions, and the robust relaxation, all in exact arithmetic.

Threshold rates are computed from the closed form of the definition: the
potential is affine in the rate with slope dim U, so the defining predicate
flips at rational crossing points, one per proper subspace, and the
threshold is their maximum clipped to [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from .gf import GF, Field
from .guards import check_guard
from .linalg import (
    FqMatrix,
    Subspace,
    completion_map,
    dist_subspaces,
    enumerate_subspaces,
    intersect,
    is_dist_subspace,
    kernel,
    map_image,
    matrix_with_kernel,
    matrix_from_text,
    matvec,
)


@dataclass(frozen=True)
class LocalProfileDescription:
    """Unordered list of (fraction, constraint matrix) pairs.

    Fractions are exact rationals summing to 1; matrices are L x L and need
    not be pairwise distinct.
    """

    field: Field
    locality: int
    items: tuple[tuple[Fraction, FqMatrix], ...]

    def __post_init__(self):
        if sum(f for f, _ in self.items) != 1:
            raise ValueError("fractions must sum to exactly 1")
        if any(f < 0 for f, _ in self.items):
            raise ValueError("fractions must be nonnegative")
        for _, m in self.items:
            if m.rows != self.locality or m.cols != self.locality:
                raise ValueError("constraint matrices must be L x L")
            if m.field is not self.field:
                raise ValueError("matrix field mismatch")

    def distinct_matrices(self) -> list[FqMatrix]:
        seen = []
        for _, m in self.items:
            if all(m.entries != s.entries for s in seen):
                seen.append(m)
        return seen

    def realizable_at(self, n: int) -> bool:
        return all((f * n).denominator == 1 for f, _ in self.items)


@dataclass(frozen=True)
class LocalProfile:
    """An ordered arrangement of n constraint matrices."""

    field: Field
    locality: int
    n: int
    matrices: tuple[FqMatrix, ...]

    def __post_init__(self):
        if len(self.matrices) != self.n:
            raise ValueError("profile length mismatch")


@dataclass
class LclProperty:
    """A set of local profile descriptions, given as a per-n generator.

    `descriptions_at(n)` must yield every description realizable at block
    length n (all fractions multiples of 1/n).  `kappa` is the exact
    profile-count exponent as a KappaLog, when known; `t_p` bounds the
    number of distinct matrices per description.
    """

    field: Field
    locality: int
    descriptions_at: object  # callable n -> iterable[LocalProfileDescription]
    kappa: "KappaLog | None" = None
    t_p: int | None = None
    name: str = ""
    lr_spec: object = None  # set by the recovery-family compiler


@dataclass(frozen=True)
class KappaLog:
    """An exact expression sum_i c_i * log_q(a_i) with rational c_i.

    Supports the exact comparison `kappa + log_q(2) < eps/4` by clearing
    denominators and comparing integer powers, so threshold alphabet sizes
    never depend on floating point.
    """

    terms: tuple[tuple[Fraction, int], ...]

    def evaluate(self, q: int) -> float:
        import math

        return sum(float(c) * math.log(a, q) for c, a in self.terms)

    def reasonable_at(self, q: int, eps: Fraction) -> bool:
        """Exact test of kappa_q + log_q 2 < eps/4."""
        # sum c_i log a_i + log 2 < (eps/4) log q
        #   <=>  prod a_i^(4 c_i M) * 2^(4M) < q^(eps M)   for M clearing denoms
        denom = 4 * eps.denominator
        for c, _ in self.terms:
            denom = denom * c.denominator // _gcd(denom, c.denominator)
        lhs = 2 ** (4 * denom)
        for c, a in self.terms:
            exp = 4 * denom * c
            assert exp.denominator == 1
            lhs *= a ** int(exp)
        rhs = q ** int(eps * denom)
        return lhs < rhs


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


# -- satisfaction ------------------------------------------------------


def _max_flow(capacity: dict[tuple[int, int], int], source: int, sink: int,
              n_nodes: int) -> tuple[int, dict[tuple[int, int], int]]:
    """Tiny BFS max-flow; graphs here have at most a few dozen nodes."""
    from collections import deque

    flow: dict[tuple[int, int], int] = {}
    adj: dict[int, list[int]] = {i: [] for i in range(n_nodes)}
    for (u, v) in capacity:
        adj[u].append(v)
        adj[v].append(u)
    total = 0
    while True:
        parent = {source: source}
        queue = deque([source])
        while queue and sink not in parent:
            u = queue.popleft()
            for v in adj[u]:
                residual = capacity.get((u, v), 0) - flow.get((u, v), 0) \
                    + flow.get((v, u), 0)
                if v not in parent and residual > 0:
                    parent[v] = u
                    queue.append(v)
        if sink not in parent:
            return total, flow
        # augment by 1 is enough given unit row capacities, but push the
        # bottleneck anyway
        path = []
        v = sink
        while v != source:
            path.append((parent[v], v))
            v = parent[v]
        bottleneck = min(capacity.get((u, v), 0) - flow.get((u, v), 0)
                         + flow.get((v, u), 0) for u, v in path)
        for u, v in path:
            back = min(flow.get((v, u), 0), bottleneck)
            if back:
                flow[(v, u)] = flow.get((v, u), 0) - back
            fwd = bottleneck - back
            if fwd:
                flow[(u, v)] = flow.get((u, v), 0) + fwd
        total += bottleneck


def satisfies_description(a: FqMatrix, v: LocalProfileDescription):
    """Witness profile for `a` satisfying `v`, or None.

    Solved exactly as a bipartite feasibility problem: rows on one side,
    matrix types with exact count quotas on the other, an edge when the row
    lies in the type's kernel.
    """
    n = a.rows
    if a.cols != v.locality:
        raise ValueError("matrix width must equal the locality")
    quotas = []
    for f, _ in v.items:
        fn = f * n
        if fn.denominator != 1:
            raise ValueError(f"fraction {f} is not a multiple of 1/{n}")
        quotas.append(int(fn))
    kers = [kernel(m) for _, m in v.items]
    eligible = [[t for t, ker in enumerate(kers) if ker.contains(a.row(i))]
                for i in range(n)]
    # nodes: 0 = source, 1..n = rows, n+1..n+T = types, n+T+1 = sink
    T = len(v.items)
    source, sink = 0, n + T + 1
    cap: dict[tuple[int, int], int] = {}
    for i in range(n):
        cap[(source, 1 + i)] = 1
        for t in eligible[i]:
            cap[(1 + i, n + 1 + t)] = 1
    for t, quota in enumerate(quotas):
        cap[(n + 1 + t, sink)] = quota
    total, flow = _max_flow(cap, source, sink, n + T + 2)
    if total < n:
        return None
    assignment = [None] * n
    for i in range(n):
        for t in eligible[i]:
            if flow.get((1 + i, n + 1 + t), 0) == 1:
                assignment[i] = t
                break
    matrices = tuple(v.items[t][1] for t in assignment)
    return LocalProfile(v.field, v.locality, n, matrices)


def code_contains_description(code, v: LocalProfileDescription):
    """A matrix of pairwise distinct codeword columns satisfying `v`, or None.

    Exhaustive over ordered codeword tuples; `code` exposes .codewords()
    yielding index tuples and .field.
    """
    words = list(code.codewords())
    L = v.locality
    count = 1
    for i in range(L):
        count *= max(len(words) - i, 0)
    check_guard("containment_matrices", count)
    if len(words) < L:
        return None
    n = len(words[0]) if words else 0
    for combo in permutations(words, L):
        a = FqMatrix(v.field, n, L, tuple(combo[j][i]
                                          for i in range(n) for j in range(L)))
        if satisfies_description(a, v) is not None:
            return a
    return None


# -- potential and thresholds -----------------------------------------


def potential(v: LocalProfileDescription, u: Subspace, r: Fraction) -> Fraction:
    """Phi(V, U, R) = sum_t f_t dim(ker M_t cap U) - (1 - R) dim U."""
    if u.ambient_dim != v.locality:
        raise ValueError("subspace ambient dimension must equal the locality")
    total = Fraction(0)
    for f, m in v.items:
        total += f * intersect(kernel(m), u).dim
    return total - (1 - Fraction(r)) * u.dim


def threshold_rate_vu(v: LocalProfileDescription, u: Subspace) -> Fraction:
    """Least R in [0,1] with Phi(V,U,R) >= Phi(V,W,R) for all W inside U.

    Phi(V,U,R) - Phi(V,W,R) is affine in R with slope dim U - dim W >= 0,
    so each comparison flips at the rational crossing point
    1 - a_W / (dim U - dim W); the threshold is the max crossing, clipped.
    """
    kers = [(f, kernel(m)) for f, m in v.items]
    dims_u = {id(k): intersect(k, u).dim for _, k in kers}
    best = Fraction(0)
    for w in _subspaces_of(u):
        b = u.dim - w.dim
        if b == 0:
            continue
        a = Fraction(0)
        for f, k in kers:
            a += f * (dims_u[id(k)] - intersect(k, w).dim)
        crossing = 1 - a / b
        if crossing > best:
            best = crossing
    return min(best, Fraction(1))


def _subspaces_of(u: Subspace) -> list[Subspace]:
    """All subspaces W of u (including u itself)."""
    if u.dim == u.ambient_dim:
        return enumerate_subspaces(u.field, u.ambient_dim)
    # enumerate subspaces of the coordinate space F_q^dim and push through
    # the basis of u
    f = u.field
    inner = enumerate_subspaces(f, u.dim)
    out = []
    for s in inner:
        vecs = []
        for i in range(s.dim):
            coeffs = s.basis.row(i)
            acc = [0] * u.ambient_dim
            for c, row_idx in zip(coeffs, range(u.dim)):
                if c:
                    row = u.basis.row(row_idx)
                    for j, e in enumerate(row):
                        acc[j] = f.add(acc[j], f.mul(c, e))
            vecs.append(tuple(acc))
        out.append(Subspace.from_vectors(f, u.ambient_dim, vecs))
    return out


def threshold_rate_v(v: LocalProfileDescription) -> Fraction:
    """R_V: min of R_{V,U} over U in L_Dist."""
    candidates = dist_subspaces(v.field, v.locality)
    return min(threshold_rate_vu(v, u) for u in candidates)


def threshold_rate_property(p: LclProperty, n_hint: int) -> Fraction:
    """R_P at block length n_hint: min over realizable descriptions and
    distinguishing subspaces of the pairwise threshold."""
    dists = dist_subspaces(p.field, p.locality)
    best: Fraction | None = None
    for v in p.descriptions_at(n_hint):
        for u in dists:
            r = threshold_rate_vu(v, u)
            if best is None or r < best:
                best = r
    if best is None:
        raise ValueError(f"property has no descriptions realizable at n={n_hint}")
    return best


def argmax_potential(v: LocalProfileDescription, r: Fraction) -> list[Subspace]:
    """All subspaces maximizing Phi(V, ., r), in canonical order."""
    subs = enumerate_subspaces(v.field, v.locality)
    values = [(potential(v, s, r), s) for s in subs]
    best = max(val for val, _ in values)
    out = [s for val, s in values if val == best]
    out.sort(key=lambda s: s.sort_key())
    return out


def canonical_w(v: LocalProfileDescription) -> Subspace:
    """The canonical collapse subspace W_V.

    Lexicographically first maximizer of Phi(V, ., R_V) outside L_Dist.
    Existence is guaranteed for locality >= 2; a violation signals an
    arithmetic bug and raises.
    """
    r_v = threshold_rate_v(v)
    for s in argmax_potential(v, r_v):
        if not is_dist_subspace(s):
            return s
    raise AssertionError(
        "no maximizer outside L_Dist; impossible for locality >= 2 "
        "(locality 1 has an empty complement)")


def implied_description(v: LocalProfileDescription, psi: FqMatrix) -> LocalProfileDescription:
    """Push every kernel through the full-rank map psi.

    Each image subspace is rematerialized as the padded annihilator matrix,
    the canonical representative with that kernel.
    """
    from .linalg import rank as _rank

    if _rank(psi) != psi.rows:
        raise ValueError("psi must have full row rank")
    items = []
    for f, m in v.items:
        image = map_image(psi, kernel(m))
        items.append((f, matrix_with_kernel(image)))
    return LocalProfileDescription(v.field, psi.rows, tuple(items))


def canonical_implied(v: LocalProfileDescription) -> tuple[FqMatrix, LocalProfileDescription]:
    """(psi_V, V^imp): the canonical map killing W_V and the implied description."""
    w = canonical_w(v)
    psi = completion_map(w)
    return psi, implied_description(v, psi)


# -- robust relaxation --------------------------------------------------


def satisfies_robust(a: FqMatrix, v_imp: LocalProfileDescription,
                     delta: Fraction) -> bool:
    """Does `a` satisfy some member of the delta-robust family of v_imp?

    A member moves mass Delta_t in [0, f_t] (sum <= delta) from each type to
    an unconstrained zero-matrix slot.  Satisfaction at d rows reduces to an
    exact counting feasibility: an assignment of z_t <= floor(f_t d) rows
    into each type's kernel with sum_t z_t >= (1 - delta) d, leftover rows
    landing in the zero slot.
    """
    d = a.rows
    delta = Fraction(delta)
    kers = [kernel(m) for _, m in v_imp.items]
    caps = []
    for f, _ in v_imp.items:
        caps.append(int(f * d))  # floor(f_t * d)
    eligible = [[t for t, ker in enumerate(kers) if ker.contains(a.row(i))]
                for i in range(d)]
    T = len(v_imp.items)
    source, sink = 0, d + T + 1
    cap: dict[tuple[int, int], int] = {}
    for i in range(d):
        cap[(source, 1 + i)] = 1
        for t in eligible[i]:
            cap[(1 + i, d + 1 + t)] = 1
    for t, c in enumerate(caps):
        cap[(d + 1 + t, sink)] = c
    total, _ = _max_flow(cap, source, sink, d + T + 2)
    return Fraction(total) >= (1 - delta) * d


def robust_extreme_members(v: LocalProfileDescription, delta: Fraction):
    """Vertex members of the robust family: all mass on a single type.

    These dominate the potential over the whole family (it is linear in the
    per-type shifts with nonnegative coefficients), so checking them bounds
    every valid member.
    """
    delta = Fraction(delta)
    zero = FqMatrix.zero(v.field, v.locality, v.locality)
    members = []
    for idx in range(len(v.items)):
        items = []
        moved = min(delta, v.items[idx][0])
        for t, (f, m) in enumerate(v.items):
            items.append((f - moved if t == idx else f, m))
        items.append((moved, zero))
        members.append(LocalProfileDescription(v.field, v.locality, tuple(items)))
    if not members:
        members.append(LocalProfileDescription(
            v.field, v.locality, ((Fraction(1), zero),)))
    return members


def check_robust_potential_bound(v: LocalProfileDescription, r: Fraction,
                                 eps: Fraction, delta: Fraction) -> dict:
    """Verify Phi(V_Delta^imp, U', r) <= -eps + delta * L over the robust
    family and every nonzero U'.

    The potential is linear in the mass shifts, so the maximum over the
    simplex {Delta_t >= 0, sum <= delta} is attained with all mass on one
    type; checking those vertices upper-bounds every valid member.
    """
    r, eps, delta = Fraction(r), Fraction(eps), Fraction(delta)
    r_v = threshold_rate_v(v)
    if r > r_v - eps:
        raise ValueError(f"need r <= R_V - eps = {r_v - eps}, got {r}")
    psi, v_imp = canonical_implied(v)
    bound = -eps + delta * v.locality
    worst: Fraction | None = None
    worst_at = None
    for member in robust_extreme_members(v_imp, delta):
        for u in enumerate_subspaces(v_imp.field, v_imp.locality):
            if u.dim == 0:
                continue
            val = potential(member, u, r)
            if worst is None or val > worst:
                worst = val
                worst_at = (member, u)
    return {
        "max_potential": worst,
        "bound": bound,
        "passed": worst is not None and worst <= bound,
        "r": r,
        "r_v": r_v,
        "witness": worst_at,
        "implied_locality": v_imp.locality,
    }


# -- description file format -------------------------------------------


def description_to_text(v: LocalProfileDescription) -> str:
    lines = [f"{v.field.q} {v.locality} {len(v.items)}"]
    for f, m in v.items:
        lines.append(f"{f.numerator} {f.denominator}")
        for i in range(m.rows):
            lines.append(" ".join(str(e) for e in m.row(i)))
    return "\n".join(lines) + "\n"


def description_from_text(text: str, field: Field | None = None) -> LocalProfileDescription:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty description file")
    q, L, T = (int(x) for x in lines[0].split())
    if field is None:
        field = GF(q)
    elif field.q != q:
        raise ValueError("field order mismatch")
    pos = 1
    items = []
    for _ in range(T):
        num, den = (int(x) for x in lines[pos].split())
        pos += 1
        entries = []
        for _ in range(L):
            entries.extend(int(x) for x in lines[pos].split())
            pos += 1
        items.append((Fraction(num, den), FqMatrix(field, L, L, tuple(entries))))
    return LocalProfileDescription(field, L, tuple(items))

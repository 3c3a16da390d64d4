"""d-regular bipartite graphs with per-vertex edge orderings.

The orderings induce a bijection between left and right edge slots:
phi(l, i) = (r, j) when l's i-th edge meets r and is r's j-th edge.  Random
graphs come from the configuration model (a seeded random matching of edge
slots), so parallel edges can occur; neighborhood intersections are counted
with edge multiplicity throughout, which is the quantity the sampling
property bounds.

Sampler certificates are produced by exhaustive subset scans when the
binomial count fits the guard and by a flagged Monte Carlo estimate
otherwise; pipelines reject non-exhaustive certificates.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .guards import check_guard, guard_limit
from .linalg import FqMatrix, FqVector
from .gf import Field
from .util import derive_seed


@dataclass(frozen=True)
class BipartiteSampler:
    n: int
    d: int
    left: tuple[tuple[tuple[int, int], ...], ...]   # left[l][i] = (r, j)
    right: tuple[tuple[tuple[int, int], ...], ...]  # right[r][j] = (l, i)

    def __post_init__(self):
        seen = set()
        for l in range(self.n):
            for i in range(self.d):
                r, j = self.left[l][i]
                if self.right[r][j] != (l, i):
                    raise ValueError("edge tables are not mutually inverse")
                seen.add((r, j))
        if len(seen) != self.n * self.d:
            raise ValueError("phi is not a bijection")

    def phi(self, l: int, i: int) -> tuple[int, int]:
        return self.left[l][i]

    def phi_inv(self, r: int, j: int) -> tuple[int, int]:
        return self.right[r][j]

    def left_neighbor_counts(self, member) -> list[int]:
        """For each left vertex, the number of its edge slots landing in the
        right-set indicated by `member` (multiplicity counted)."""
        return [sum(1 for i in range(self.d) if member(self.left[l][i][0]))
                for l in range(self.n)]


@dataclass(frozen=True)
class SamplerCertificate:
    beta: Fraction
    eta: Fraction
    zeta: Fraction            # tightest certified violator fraction
    verified: bool            # True only for exhaustive scans
    subsets_checked: int
    worst_violators: int
    all_sizes: bool = False   # True when every |Y| >= beta*N was scanned

    def meets(self, beta: Fraction, eta: Fraction, zeta: Fraction) -> bool:
        return (self.verified and self.beta <= beta and self.eta <= eta
                and self.zeta <= zeta)


def complete_bipartite(n: int) -> BipartiteSampler:
    """K_{N,N} with d = N and the canonical ordering Gamma_i(l) = i."""
    left = tuple(tuple((i, l) for i in range(n)) for l in range(n))
    right = tuple(tuple((j, r) for j in range(n)) for r in range(n))
    return BipartiteSampler(n, n, left, right)


def identity_graph(n: int, d: int) -> BipartiteSampler:
    """phi(l, i) = (l, i): d parallel edges straight across."""
    left = tuple(tuple((l, i) for i in range(d)) for l in range(n))
    return BipartiteSampler(n, d, left, left)


def random_biregular(n: int, d: int, seed: int) -> BipartiteSampler:
    """Uniform d-regular bipartite multigraph via a random slot matching."""
    if d > n:
        raise ValueError("degree cannot exceed the side size")
    rng = random.Random(derive_seed(seed, "biregular"))
    slots = list(range(n * d))
    rng.shuffle(slots)
    left = [[None] * d for _ in range(n)]
    right = [[None] * d for _ in range(n)]
    for idx, s in enumerate(slots):
        l, i = divmod(idx, d)
        r, j = divmod(s, d)
        left[l][i] = (r, j)
        right[r][j] = (l, i)
    return BipartiteSampler(n, d,
                            tuple(tuple(row) for row in left),
                            tuple(tuple(row) for row in right))


def _binom(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out


def _violators(g: BipartiteSampler, size: int, eta: Fraction,
               subset) -> int:
    """Left vertices whose slot count into `subset` falls below
    (|Y|/N - eta) d, counted per the sampling property (strict shortfall)."""
    member = set(subset).__contains__
    threshold = (Fraction(size, g.n) - eta) * g.d
    return sum(1 for c in g.left_neighbor_counts(member) if c < threshold)


def verify_sampler(g: BipartiteSampler, beta: Fraction, eta: Fraction,
                   sizes: str = "exact", seed: int = 0) -> SamplerCertificate:
    """Certify the sampling property by scanning right subsets.

    sizes="exact" scans |Y| = beta*N (the property as stated); sizes="up"
    scans every |Y| >= beta*N against that size's own density, which is
    what the assembly pipeline consumes.  Falls back to a seeded Monte
    Carlo estimate (flagged non-exhaustive) when the subset count exceeds
    the guard.
    """
    beta, eta = Fraction(beta), Fraction(eta)
    size0 = beta * g.n
    if size0.denominator != 1:
        raise ValueError("beta*N must be an integer")
    size0 = int(size0)
    size_list = [size0] if sizes == "exact" else list(range(size0, g.n + 1))
    total = sum(_binom(g.n, s) for s in size_list)
    limit = guard_limit("sampler_subsets")
    if total <= limit:
        worst = 0
        checked = 0
        for s in size_list:
            for subset in combinations(range(g.n), s):
                checked += 1
                v = _violators(g, s, eta, subset)
                if v > worst:
                    worst = v
        return SamplerCertificate(beta, eta, Fraction(worst, g.n), True,
                                  checked, worst, all_sizes=(sizes == "up"))
    # Monte Carlo fallback, explicitly non-exhaustive
    rng = random.Random(derive_seed(seed, "sampler-mc"))
    samples = guard_limit("montecarlo_samples")
    worst = 0
    for _ in range(samples):
        s = rng.choice(size_list)
        subset = rng.sample(range(g.n), s)
        v = _violators(g, s, eta, subset)
        if v > worst:
            worst = v
    return SamplerCertificate(beta, eta, Fraction(worst, g.n), False,
                              samples, worst, all_sizes=(sizes == "up"))


# -- row projection and flattening ----------------------------------------


def slot_index(v: int, i: int, d: int) -> int:
    return v * d + i


def project(a: FqMatrix, g: BipartiteSampler) -> FqMatrix:
    """Permute right-slot-indexed rows to left-slot order along phi."""
    if a.rows != g.n * g.d:
        raise ValueError("row count must be N*d")
    rows = []
    for l in range(g.n):
        for i in range(g.d):
            r, j = g.phi(l, i)
            rows.append(a.row(slot_index(r, j, g.d)))
    return FqMatrix.from_rows(a.field, rows)


def project_inverse(a_proj: FqMatrix, g: BipartiteSampler) -> FqMatrix:
    """Inverse row permutation: recover the right-indexed matrix."""
    if a_proj.rows != g.n * g.d:
        raise ValueError("row count must be N*d")
    rows = [None] * (g.n * g.d)
    for l in range(g.n):
        for i in range(g.d):
            r, j = g.phi(l, i)
            rows[slot_index(r, j, g.d)] = a_proj.row(slot_index(l, i, g.d))
    return FqMatrix.from_rows(a_proj.field, rows)


def project_on_vertex(a_proj: FqMatrix, g: BipartiteSampler, l: int) -> FqMatrix:
    """Rows (l, 1..d) of a projected matrix."""
    if not 0 <= l < g.n:
        raise ValueError("vertex out of range")
    rows = [a_proj.row(slot_index(l, i, g.d)) for i in range(g.d)]
    return FqMatrix.from_rows(a_proj.field, rows)


def flatten_vector(h: FqVector) -> FqVector:
    """Blocks of d base-field symbols from a vector over the degree-d tower."""
    tower = h.field
    if tower.base is None:
        raise ValueError("flatten needs an extension tower")
    out = []
    for e in h.entries:
        out.extend(tower.digits(e))
    return FqVector(tower.base, tuple(out))


def unflatten_vector(v: FqVector, tower: Field) -> FqVector:
    d = tower.degree
    if tower.base is None or len(v) % d:
        raise ValueError("length must be a multiple of the tower degree")
    out = []
    for i in range(0, len(v), d):
        out.append(tower.undigits(v.entries[i:i + d]))
    return FqVector(tower, tuple(out))


# -- text format -----------------------------------------------------------


def graph_to_text(g: BipartiteSampler) -> str:
    lines = [f"{g.n} {g.d}"]
    for l in range(g.n):
        lines.append(" ".join(f"({r + 1} {j + 1})" for r, j in g.left[l]))
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> BipartiteSampler:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    n, d = (int(x) for x in lines[0].split())
    left = []
    for ln in lines[1:1 + n]:
        pairs = re.findall(r"\((\d+)\s+(\d+)\)", ln)
        if len(pairs) != d:
            raise ValueError("wrong number of edge pairs")
        left.append(tuple((int(r) - 1, int(j) - 1) for r, j in pairs))
    right = [[None] * d for _ in range(n)]
    for l in range(n):
        for i in range(d):
            r, j = left[l][i]
            right[r][j] = (l, i)
    return BipartiteSampler(n, d, tuple(left),
                            tuple(tuple(row) for row in right))

"""Linear codes: constructions, sampling, concatenation, and the two
brute-force inner-code searches.

Codewords are plain index tuples; enumeration is guarded.  Both searches
run seeded random candidates first and fall back to a lexicographic sweep,
so results are reproducible and exhaustion is reported honestly (None).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from . import _core
from .gf import Field, extension
from .guards import check_guard, guard_limit
from .hypergraphs import Hypergraph, build_rim, is_wpc, rim_full_column_rank
from .lcl import KappaLog, LclProperty, LocalProfileDescription, canonical_implied, satisfies_robust
from .linalg import (
    FqMatrix,
    FqVector,
    annihilator,
    kernel,
    matrix_from_text,
    matrix_to_text,
    matvec,
    rank,
    row_space,
    vecmat,
)
from .util import derive_seed, prime_powers


def hamming_distance(x, y) -> int:
    xs = x.entries if isinstance(x, FqVector) else tuple(x)
    ys = y.entries if isinstance(y, FqVector) else tuple(y)
    if len(xs) != len(ys):
        raise ValueError("length mismatch")
    return sum(1 for a, b in zip(xs, ys) if a != b)


class LinearCode:
    """An F_q-linear code given by a full-rank generator matrix."""

    def __init__(self, generator: FqMatrix, parity: FqMatrix | None = None):
        if generator.rows and rank(generator) != generator.rows:
            raise ValueError("generator must have full row rank")
        self.field = generator.field
        self.generator = generator
        self.n = generator.cols
        self.k = generator.rows
        self._parity = parity
        self._codewords: list[tuple[int, ...]] | None = None

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k, self.n)

    @property
    def parity(self) -> FqMatrix:
        if self._parity is None:
            self._parity = annihilator(row_space(self.generator)).basis
        return self._parity

    def __repr__(self) -> str:
        return f"LinearCode(q={self.field.q}, n={self.n}, k={self.k})"

    def encode(self, message) -> tuple[int, ...]:
        return vecmat(message, self.generator).entries

    def contains(self, word) -> bool:
        entries = word.entries if isinstance(word, FqVector) else tuple(word)
        return not any(matvec(self.parity, entries).entries) if self.parity.rows \
            else len(entries) == self.n

    def size(self) -> int:
        return self.field.q ** self.k

    def codewords(self) -> list[tuple[int, ...]]:
        if self._codewords is None:
            check_guard("codewords", self.size())
            t = self.field.kernel_tables()
            if t is not None and self.k:
                _, add, _, _ = t
                table = _core.codeword_table(bytes(self.generator.entries),
                                             self.k, self.n, self.field.q, add)
                self._codewords = [tuple(table[m * self.n:(m + 1) * self.n])
                                   for m in range(self.size())]
            else:
                out = []
                for msg in product(self.field.elements(), repeat=self.k):
                    out.append(self.encode(msg))
                self._codewords = out
        return self._codewords

    def min_distance(self) -> int:
        """Minimum nonzero codeword weight (equals min distance by linearity)."""
        if self.k == 0:
            raise ValueError("the zero code has no minimum distance")
        check_guard("codewords", self.size())
        t = self.field.kernel_tables()
        if t is not None:
            _, add, _, _ = t
            return _core.min_nonzero_weight(bytes(self.generator.entries),
                                            self.k, self.n, self.field.q, add)
        best = self.n + 1
        for w in self.codewords():
            wt = sum(1 for e in w if e)
            if wt and wt < best:
                best = wt
        return best


def identity_code(field: Field, n: int) -> LinearCode:
    return LinearCode(FqMatrix.identity(field, n))


def from_parity(parity: FqMatrix) -> LinearCode:
    gen = kernel(parity).basis
    return LinearCode(gen, parity=parity)


def sample_rlc(field: Field, n: int, rate: Fraction, seed: int) -> LinearCode:
    """Kernel of a uniformly random ((1-rate) n) x n matrix.

    The dimension is at least rate*n and exceeds it exactly when the random
    matrix is rank-deficient, matching the ensemble's definition.  Rates
    below 0 are allowed (more parity rows than columns); (1-rate)*n must be
    an integer.
    """
    rate = Fraction(rate)
    m = (1 - rate) * n
    if m.denominator != 1:
        raise ValueError("(1-rate)*n must be an integer")
    m = int(m)
    rng = random.Random(derive_seed(seed, "rlc"))
    parity = FqMatrix(field, m, n,
                      tuple(rng.randrange(field.q) for _ in range(m * n)))
    return from_parity(parity)


def rs_outer(field: Field, n: int, k: int) -> LinearCode:
    """Reed-Solomon code on the first n field elements; MDS, distance n-k+1."""
    if n > field.q:
        raise ValueError("block length cannot exceed the field order")
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    rows = []
    for i in range(k):
        rows.append(tuple(field.pow(x, i) for x in range(n)))
    return LinearCode(FqMatrix.from_rows(field, rows))


@dataclass
class ConcatenatedCode:
    """Outer code over GF(q^m) composed with an inner [d, m] code over GF(q).

    The per-symbol bijection is the inner systematic encoder composed with
    the power-basis coordinate map, so it is GF(q)-linear by construction.
    """

    outer: LinearCode
    inner: LinearCode

    def __post_init__(self):
        tower = self.outer.field
        if tower.base is not self.inner.field or tower.degree != self.inner.k:
            raise ValueError(
                "outer alphabet must be the degree-k_in tower over the inner field")
        self.field = self.inner.field
        self.n = self.outer.n * self.inner.n
        self.k = self.outer.k * self.inner.k
        self._decode_block = {w: m for m, w in enumerate(self.inner.codewords())}
        self._generator_q: FqMatrix | None = None
        self._parity_q: FqMatrix | None = None

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k, self.n)

    def phi(self, symbol: int) -> tuple[int, ...]:
        """Bijective GF(q)-linear map from the outer alphabet to inner codewords."""
        msg = self.outer.field.digits(symbol)
        return self.inner.encode(msg)

    def phi_inv(self, block) -> int | None:
        m = self._decode_block.get(tuple(block))
        if m is None:
            return None
        return self.outer.field.undigits(self._digits_of_message(m))

    def _digits_of_message(self, m: int) -> tuple[int, ...]:
        q = self.field.q
        out = []
        for _ in range(self.inner.k):
            out.append(m % q)
            m //= q
        return tuple(out)

    def encode_outer_codeword(self, c) -> tuple[int, ...]:
        entries = c.entries if isinstance(c, FqVector) else tuple(c)
        out: list[int] = []
        for sym in entries:
            out.extend(self.phi(sym))
        return tuple(out)

    @property
    def generator_q(self) -> FqMatrix:
        """GF(q)-basis of the concatenated code, one row per (outer basis
        row, power-basis multiple)."""
        if self._generator_q is None:
            tower = self.outer.field
            rows = []
            for r in range(self.outer.k):
                grow = self.outer.generator.row(r)
                for s in range(tower.degree):
                    alpha_s = tower.undigits(tuple(1 if i == s else 0
                                                   for i in range(tower.degree)))
                    scaled = tuple(tower.mul(alpha_s, e) for e in grow)
                    rows.append(self.encode_outer_codeword(scaled))
            gen = FqMatrix.from_rows(self.field, rows)
            if rank(gen) != len(rows):
                raise AssertionError("concatenated generator lost rank")
            self._generator_q = gen
        return self._generator_q

    @property
    def parity_q(self) -> FqMatrix:
        if self._parity_q is None:
            self._parity_q = annihilator(row_space(self.generator_q)).basis
        return self._parity_q

    def contains(self, word) -> bool:
        entries = word.entries if isinstance(word, FqVector) else tuple(word)
        if len(entries) != self.n:
            return False
        if self.parity_q.rows == 0:
            return True
        return not any(matvec(self.parity_q, entries).entries)

    def size(self) -> int:
        return self.outer.size()

    def codewords(self):
        for c in self.outer.codewords():
            yield self.encode_outer_codeword(c)

    def min_distance(self) -> int:
        return LinearCode(self.generator_q).min_distance()


def concatenate(outer: LinearCode, inner: LinearCode) -> ConcatenatedCode:
    return ConcatenatedCode(outer, inner)


# -- inner-code searches ---------------------------------------------------


def _candidate_generators(field: Field, k: int, n: int, seed: int,
                          random_tries: int):
    """Seeded random full-rank candidates, then the lexicographic sweep.

    Deduplicates nothing: the verified property depends on the generator
    entries, not just the row space.
    """
    q = field.q
    rng = random.Random(derive_seed(seed, "inner-search"))
    for _ in range(random_tries):
        m = FqMatrix(field, k, n, tuple(rng.randrange(q) for _ in range(k * n)))
        if rank(m) == k:
            yield m
    total = q ** (k * n)
    check_guard("search_candidates", total)
    for entries in product(range(q), repeat=k * n):
        m = FqMatrix(field, k, n, entries)
        if rank(m) == k:
            yield m


def wpc_hypergraphs(t: int, n: int, r: Fraction) -> list[Hypergraph]:
    """All t-vertex, n-edge hypergraphs (edges in coordinate order) that are
    (r, n)-weakly-partition-connected."""
    all_edges = [frozenset(v for v in range(t) if mask >> v & 1)
                 for mask in range(1 << t)]
    out = []
    for combo in product(all_edges, repeat=n):
        h = Hypergraph(t, combo)
        if is_wpc(h, r, n):
            out.append(h)
    return out


def verify_rim_property(code: LinearCode, L: int, eps: Fraction,
                        rate: Fraction | None = None) -> bool:
    """Does every (rate + eps/2, d)-wpc agreement hypergraph on <= L+1
    vertices give a substituted constraint matrix of full column rank?"""
    rate = code.rate if rate is None else Fraction(rate)
    d = code.n
    for t in range(2, L + 2):
        for h in wpc_hypergraphs(t, d, rate + Fraction(eps) / 2):
            rim = build_rim(h, code.k)
            if not rim_full_column_rank(rim, code.generator):
                return False
    return True


def search_inner_rim(field: Field, d: int, rate: Fraction, L: int,
                     eps: Fraction, seed: int = 0,
                     random_tries: int = 200) -> LinearCode | None:
    """Brute-force search for an inner code certified against all
    weakly-partition-connected agreement patterns.

    Returns None when the candidate space is exhausted without a witness;
    at small q that is a legitimate outcome, not an error.
    """
    rate = Fraction(rate)
    k = rate * d
    if k.denominator != 1 or not 1 <= int(k) <= d:
        raise ValueError("rate*d must be an integer dimension")
    k = int(k)
    hypergraph_sets = {t: wpc_hypergraphs(t, d, rate + Fraction(eps) / 2)
                       for t in range(2, L + 2)}
    seen: set[tuple[int, ...]] = set()
    for g in _candidate_generators(field, k, d, seed, random_tries):
        if g.entries in seen:
            continue
        seen.add(g.entries)
        ok = True
        for t in range(2, L + 2):
            for h in hypergraph_sets[t]:
                if not rim_full_column_rank(build_rim(h, k), g):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return LinearCode(g)
    return None


def bad_robust_matrix(code: LinearCode, p: LclProperty, delta: Fraction,
                      descriptions=None):
    """A nonzero matrix with codeword columns satisfying some robust implied
    description of `p` at the code's block length, or None.

    Quantifies descriptions over those realizable at 1/d granularity (the
    property generator's output at n = d).
    """
    d = code.n
    words = code.codewords()
    if descriptions is None:
        descriptions = list(p.descriptions_at(d))
    cache: dict[int, tuple] = {}
    for idx, v in enumerate(descriptions):
        if idx not in cache:
            cache[idx] = canonical_implied(v)
        _, v_imp = cache[idx]
        L2 = v_imp.locality
        check_guard("containment_matrices", len(words) ** L2)
        for cols in product(words, repeat=L2):
            b = FqMatrix(code.field, d, L2,
                         tuple(cols[j][i] for i in range(d) for j in range(L2)))
            if b.is_zero():
                continue
            if satisfies_robust(b, v_imp, delta):
                return b, v
    return None


def search_inner_lcl(p: LclProperty, field: Field, d: int, rate: Fraction,
                     delta: Fraction, seed: int = 0,
                     random_tries: int = 200) -> LinearCode | None:
    """Brute-force search for a code containing no nonzero matrix that
    satisfies any robust implied description of the property."""
    rate = Fraction(rate)
    k = rate * d
    if k.denominator != 1 or not 1 <= int(k) <= d:
        raise ValueError("rate*d must be an integer dimension")
    k = int(k)
    descriptions = list(p.descriptions_at(d))
    seen: set[tuple[int, ...]] = set()
    for g in _candidate_generators(field, k, d, seed, random_tries):
        if g.entries in seen:
            continue
        seen.add(g.entries)
        code = LinearCode(g)
        if bad_robust_matrix(code, p, delta, descriptions) is None:
            return code
    return None


def minimal_q(kappa: KappaLog, eps: Fraction) -> int:
    """Smallest prime power with kappa_q + log_q 2 < eps/4, by ascending scan.

    Existence is guaranteed since the left side tends to 0 in q.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    for q in prime_powers():
        if kappa.reasonable_at(q, eps):
            return q


# -- code file format -------------------------------------------------------


def code_to_text(code: LinearCode) -> str:
    head = f"# code {code.field.q} {code.n} {code.k}\n"
    return head + matrix_to_text(code.generator)


def code_from_text(text: str, field: Field | None = None) -> LinearCode:
    return LinearCode(matrix_from_text(text, field))

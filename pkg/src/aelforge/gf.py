"""Exact finite-field arithmetic.

Fields are built in two layers:

* ``GF(q)`` for a prime power q = p**k: an extension of the prime field
  GF(p) by the lowest-lexicographic irreducible polynomial of degree k.
* ``extension(base, degree)``: a tower step GF(q) in GF(q**degree), with
  elements represented as degree-(d-1) polynomials over the base in the
  power basis.  The base field embeds as the constant polynomials, so a
  base element keeps its integer index under embedding.

Elements are plain ints in [0, q): the little-endian base-q digit string of
the index is the coefficient vector over the base field.  Multiplication
goes through exp/log tables (materialized for q <= 2**16); addition is
digit-wise.  "Lowest lexicographic" modulus means the monic degree-k
polynomial whose coefficient vector (c_0, ..., c_{k-1}), read as a
little-endian base-q integer, is smallest among the irreducibles.
"""

from __future__ import annotations

from functools import lru_cache

from .util import factorize, is_prime, prime_power_split

_MAX_TABLE_ORDER = 1 << 16  # exp/log tables beyond this are out of scope
_KERNEL_TABLE_ORDER = 256  # q*q byte tables handed to the fast kernels


class Field:
    """GF(q), either a prime field or an extension of another `Field`."""

    def __init__(self, p: int, base: "Field | None" = None,
                 degree: int = 1, modulus: tuple[int, ...] | None = None):
        self.p = p
        self.base = base
        self.degree = degree
        self.modulus = modulus  # monic, little-endian, length degree+1
        if base is None:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
            self.q = p
        else:
            self.q = base.q ** degree
            if modulus is None or len(modulus) != degree + 1 or modulus[-1] != 1:
                raise ValueError("extension needs a monic modulus of matching degree")
        if self.q > _MAX_TABLE_ORDER:
            raise ValueError(f"field order {self.q} exceeds the 2^16 table bound")
        self._exp: list[int] | None = None
        self._log: list[int] | None = None
        self._kernel_tables: tuple[bytes, bytes, bytes, bytes] | None = None

    # -- representation ------------------------------------------------

    def __repr__(self) -> str:
        if self.base is None:
            return f"GF({self.p})"
        return f"GF({self.base.q}^{self.degree})"

    @property
    def is_prime_field(self) -> bool:
        return self.base is None

    def digits(self, a: int) -> tuple[int, ...]:
        """Coefficient vector of `a` over the base field (power basis)."""
        if self.base is None:
            return (a,)
        qb = self.base.q
        out = []
        for _ in range(self.degree):
            out.append(a % qb)
            a //= qb
        return tuple(out)

    def undigits(self, coeffs) -> int:
        if self.base is None:
            (a,) = coeffs
            return a
        qb = self.base.q
        a = 0
        for c in reversed(list(coeffs)):
            a = a * qb + c
        return a

    def elements(self) -> range:
        return range(self.q)

    # -- arithmetic ------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.base is None:
            return (a + b) % self.p
        qb = self.base.q
        out = 0
        shift = 1
        for _ in range(self.degree):
            out += self.base.add(a % qb, b % qb) * shift
            a //= qb
            b //= qb
            shift *= qb
        return out

    def neg(self, a: int) -> int:
        if self.base is None:
            return (-a) % self.p
        qb = self.base.q
        out = 0
        shift = 1
        for _ in range(self.degree):
            out += self.base.neg(a % qb) * shift
            a //= qb
            shift *= qb
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def _mul_poly(self, a: int, b: int) -> int:
        """Table-free multiply; used to bootstrap the exp/log tables."""
        if self.base is None:
            return (a * b) % self.p
        da = list(self.digits(a))
        db = list(self.digits(b))
        prod = [0] * (2 * self.degree - 1)
        for i, ca in enumerate(da):
            if ca == 0:
                continue
            for j, cb in enumerate(db):
                if cb:
                    prod[i + j] = self.base.add(prod[i + j], self.base._mulq(ca, cb))
        # reduce modulo the defining polynomial
        for deg in range(len(prod) - 1, self.degree - 1, -1):
            lead = prod[deg]
            if lead == 0:
                continue
            prod[deg] = 0
            for i in range(self.degree):
                prod[deg - self.degree + i] = self.base.sub(
                    prod[deg - self.degree + i], self.base._mulq(lead, self.modulus[i]))
        return self.undigits(prod[: self.degree])

    def _mulq(self, a: int, b: int) -> int:
        """Multiply via tables if present, else polynomial arithmetic."""
        if self._exp is not None:
            if a == 0 or b == 0:
                return 0
            return self._exp[self._log[a] + self._log[b]]
        return self._mul_poly(a, b)

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self._exp is None:
            self._build_tables()
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        if self._exp is None:
            self._build_tables()
        return self._exp[(self.q - 1) - self._log[a]]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        out = 1
        base = a
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    # -- tables ----------------------------------------------------------

    def _build_tables(self) -> None:
        g = self._find_primitive()
        q = self.q
        exp = [1] * (2 * (q - 1))
        log = [0] * q
        cur = 1
        for i in range(q - 1):
            exp[i] = cur
            log[cur] = i
            cur = self._mul_poly(cur, g)
        for i in range(q - 1, 2 * (q - 1)):
            exp[i] = exp[i - (q - 1)]
        self._exp = exp
        self._log = log

    def _find_primitive(self) -> int:
        order = self.q - 1
        if order == 1:
            return 1
        prime_divs = list(factorize(order))
        for g in range(2, self.q):
            if all(self._pow_poly(g, order // r) != 1 for r in prime_divs):
                return g
        raise RuntimeError("no primitive element found (broken modulus?)")

    def _pow_poly(self, a: int, e: int) -> int:
        out = 1
        base = a
        while e:
            if e & 1:
                out = self._mul_poly(out, base)
            base = self._mul_poly(base, base)
            e >>= 1
        return out

    def kernel_tables(self) -> tuple[bytes, bytes, bytes, bytes] | None:
        """(mul, add, sub, inv) flat byte tables for the fast kernels.

        None when q > 256; callers then take the generic path.
        """
        if self.q > _KERNEL_TABLE_ORDER:
            return None
        if self._kernel_tables is None:
            q = self.q
            mul = bytearray(q * q)
            add = bytearray(q * q)
            sub = bytearray(q * q)
            inv = bytearray(q)
            for a in range(q):
                for b in range(q):
                    mul[a * q + b] = self.mul(a, b)
                    add[a * q + b] = self.add(a, b)
                    sub[a * q + b] = self.sub(a, b)
                if a:
                    inv[a] = self.inv(a)
            self._kernel_tables = (bytes(mul), bytes(add), bytes(sub), bytes(inv))
        return self._kernel_tables


# -- polynomial helpers over an arbitrary Field (little-endian coeff lists) --

def _poly_trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def _poly_sub(field: Field, f: list[int], g: list[int]) -> list[int]:
    out = [0] * max(len(f), len(g))
    for i, c in enumerate(f):
        out[i] = c
    for i, c in enumerate(g):
        out[i] = field.sub(out[i], c)
    return _poly_trim(out)


def _poly_mulmod(field: Field, f: list[int], g: list[int], mod: list[int]) -> list[int]:
    prod = [0] * (len(f) + len(g) - 1) if f and g else []
    for i, ca in enumerate(f):
        if ca == 0:
            continue
        for j, cb in enumerate(g):
            if cb:
                prod[i + j] = field.add(prod[i + j], field.mul(ca, cb))
    return _poly_mod(field, prod, mod)


def _poly_mod(field: Field, f: list[int], mod: list[int]) -> list[int]:
    f = list(f)
    dm = len(mod) - 1
    inv_lead = field.inv(mod[-1])
    for deg in range(len(f) - 1, dm - 1, -1):
        c = f[deg]
        if c == 0:
            continue
        factor = field.mul(c, inv_lead)
        for i in range(dm + 1):
            f[deg - dm + i] = field.sub(f[deg - dm + i], field.mul(factor, mod[i]))
    return _poly_trim(f)


def _poly_powmod(field: Field, f: list[int], e: int, mod: list[int]) -> list[int]:
    out = [1]
    base = _poly_mod(field, list(f), mod)
    while e:
        if e & 1:
            out = _poly_mulmod(field, out, base, mod)
        base = _poly_mulmod(field, base, base, mod)
        e >>= 1
    return out


def _poly_gcd(field: Field, f: list[int], g: list[int]) -> list[int]:
    f, g = list(f), list(g)
    while g:
        f = _poly_mod(field, f, g)
        f, g = g, f
    return f


def _is_irreducible(field: Field, coeffs: tuple[int, ...]) -> bool:
    """Monic `coeffs` (little-endian, degree e) irreducible over `field`?

    Uses the Frobenius criterion: x^(q^e) = x mod f, and for every prime
    r | e, gcd(x^(q^(e/r)) - x, f) = 1.
    """
    e = len(coeffs) - 1
    if e == 1:
        return True
    mod = list(coeffs)
    x = [0, 1]
    frob = list(x)
    powers = {}
    for i in range(1, e + 1):
        frob = _poly_powmod(field, frob, field.q, mod)
        powers[i] = list(frob)
    if _poly_trim(_poly_sub(field, powers[e], x)) != []:
        return False
    for r in factorize(e):
        diff = _poly_sub(field, powers[e // r], x)
        if len(_poly_gcd(field, mod, diff)) > 1:
            return False
    return True


@lru_cache(maxsize=None)
def _lowest_lex_modulus(base: Field, degree: int) -> tuple[int, ...]:
    qb = base.q
    for code in range(qb ** degree):
        coeffs = []
        c = code
        for _ in range(degree):
            coeffs.append(c % qb)
            c //= qb
        cand = tuple(coeffs) + (1,)
        if _is_irreducible(base, cand):
            return cand
    raise RuntimeError("no irreducible polynomial found")  # cannot happen


@lru_cache(maxsize=None)
def GF(q: int) -> Field:
    """The canonical field of order q (prime power), cached."""
    p, k = prime_power_split(q)
    if k == 1:
        return Field(p)
    return extension(GF(p), k)


@lru_cache(maxsize=None)
def extension(base: Field, degree: int) -> Field:
    """Tower step: GF(base.q ** degree) over `base` in the power basis."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    mod = _lowest_lex_modulus(base, degree)
    return Field(base.p, base=base, degree=degree, modulus=mod)

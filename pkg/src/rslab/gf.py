"""Exact arithmetic in prime and extension finite fields.

A field is described by a :class:`FieldCtx` holding the characteristic ``p``,
the extension degree ``m`` and, for ``m > 1``, a monic irreducible modulus
over GF(p).  Elements are canonical integers in ``[0, q)``: the least
nonnegative residue for prime fields, and for extension fields the base-``p``
packing ``sum(c_i * p**i)`` of the coefficient vector in the power basis of
the modulus.  Everything is exact; no floating point is used anywhere.

The context performs arithmetic on the integer codes directly (``ctx.add``,
``ctx.mul``, ...), which is what the linear-algebra hot loops use.
:class:`FieldElement` is a thin operator-overloading wrapper for everything
else.  Extension fields of order up to 2**16 get exp/log tables, so their
multiplications are two lookups.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, Sequence

MAX_ORDER = 1 << 62  # keeps every intermediate product an exact machine-friendly int
_TABLE_LIMIT = 1 << 16


class NotPrime(ValueError):
    """Characteristic is not a prime number."""


class ReducibleModulus(ValueError):
    """Supplied modulus polynomial factors over the prime field."""


class DegreeMismatch(ValueError):
    """Modulus shape does not match the requested extension degree."""


class OrderTooLarge(ValueError):
    """Field order exceeds the supported cap of 2**62."""


class DivisionByZero(ZeroDivisionError):
    """Division or inversion of the zero element."""


class MixedFields(ValueError):
    """Operands belong to different field contexts."""


class NTooLarge(ValueError):
    """More distinct elements requested than the field contains."""


_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin test (exact for every n below 3.3e24)."""
    if n < 2:
        return False
    for w in _MR_WITNESSES:
        if n % w == 0:
            return n == w
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for w in _MR_WITNESSES:
        x = pow(w, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# Polynomial helpers over an arbitrary field context.
#
# Polynomials are little-endian coefficient lists of raw element codes.  These
# are used to validate/search irreducible moduli, both over GF(p) when
# constructing GF(p^m) and over GF(q) when constructing a tower extension.
# ---------------------------------------------------------------------------


def _ptrim(c: list) -> list:
    while c and c[-1] == 0:
        c.pop()
    return c


def _pmul(F, a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            if bj == 0:
                continue
            out[i + j] = F.add(out[i + j], F.mul(ai, bj))
    return _ptrim(out)


def _prem(F, a: list, mod: list) -> list:
    """Remainder of a modulo mod (mod need not be monic)."""
    a = list(a)
    dm = len(mod) - 1
    lead_inv = F.inv(mod[-1])
    while len(a) - 1 >= dm and a:
        c = F.mul(a[-1], lead_inv)
        shift = len(a) - 1 - dm
        for j, mj in enumerate(mod):
            if mj:
                a[shift + j] = F.sub(a[shift + j], F.mul(c, mj))
        _ptrim(a)
        if not a:
            break
    return a


def _pmulmod(F, a: list, b: list, mod: list) -> list:
    return _prem(F, _pmul(F, a, b), mod)


def _ppowmod(F, base: list, e: int, mod: list) -> list:
    result = [1]
    acc = _prem(F, list(base), mod)
    while e:
        if e & 1:
            result = _pmulmod(F, result, acc, mod)
        acc = _pmulmod(F, acc, acc, mod)
        e >>= 1
    return result


def _psub(F, a: list, b: list) -> list:
    out = [0] * max(len(a), len(b))
    for i, ai in enumerate(a):
        out[i] = ai
    for i, bi in enumerate(b):
        out[i] = F.sub(out[i], bi)
    return _ptrim(out)


def _pgcd(F, a: list, b: list) -> list:
    a, b = list(a), list(b)
    while b:
        a, b = b, _prem(F, a, b)
    return a


def poly_is_irreducible(F, coeffs: Sequence[int]) -> bool:
    """Exact irreducibility test for a monic polynomial over the field F.

    Uses the Frobenius criterion: f of degree m is irreducible over GF(q)
    iff x^(q^m) = x mod f and gcd(x^(q^(m/l)) - x, f) = 1 for every prime
    divisor l of m.
    """
    mod = list(coeffs)
    m = len(mod) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    q = F.order
    x = [0, 1]
    xqm = _ppowmod(F, x, q**m, mod)
    if _psub(F, xqm, x):
        return False
    for ell in _prime_factors(m):
        d = m // ell
        xqd = _ppowmod(F, x, q**d, mod)
        g = _pgcd(F, _psub(F, xqd, x), mod)
        if len(g) != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# Field contexts and elements.
# ---------------------------------------------------------------------------


class FieldCtx:
    """Immutable context for GF(p^m); do not instantiate directly, use make_field."""

    def __init__(self, p: int, m: int, modulus: tuple[int, ...] | None):
        self.p = p
        self.m = m
        self.order = p**m
        self.modulus = modulus
        self._mod = list(modulus) if modulus is not None else None
        self._prime_ctx = self if m == 1 else FieldCtx(p, 1, None)
        self._exp: list[int] | None = None
        self._log: list[int] | None = None
        if m > 1 and self.order <= _TABLE_LIMIT:
            self._build_tables()

    # -- identity ----------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldCtx)
            and self.p == other.p
            and self.m == other.m
            and self.modulus == other.modulus
        )

    def __hash__(self) -> int:
        return hash((self.p, self.m, self.modulus))

    def __repr__(self) -> str:
        if self.m == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.m})"

    # -- element codecs ------------------------------------------------------

    def _unpack(self, a: int) -> list[int]:
        p = self.p
        digits = []
        for _ in range(self.m):
            a, r = divmod(a, p)
            digits.append(r)
        return digits

    def _pack(self, digits: Sequence[int]) -> int:
        a = 0
        for d in reversed(digits):
            a = a * self.p + d
        return a

    def coeffs(self, a: int) -> tuple[int, ...]:
        """Coefficient vector of an element in the power basis (length m)."""
        return tuple(self._unpack(a))

    def from_int(self, c: int) -> int:
        """Embed an integer as a constant (code of c mod p)."""
        return c % self.p

    # -- raw arithmetic on integer codes -------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        da, db = self._unpack(a), self._unpack(b)
        return self._pack([(x + y) % self.p for x, y in zip(da, db)])

    def sub(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a - b) % self.p
        if self.p == 2:
            return a ^ b
        da, db = self._unpack(a), self._unpack(b)
        return self._pack([(x - y) % self.p for x, y in zip(da, db)])

    def neg(self, a: int) -> int:
        return self.sub(0, a)

    def mul(self, a: int, b: int) -> int:
        if self.m == 1:
            return a * b % self.p
        if self._log is not None:
            if a == 0 or b == 0:
                return 0
            n1 = self.order - 1
            return self._exp[(self._log[a] + self._log[b]) % n1]
        return self._mul_generic(a, b)

    def _mul_generic(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        p, m = self.p, self.m
        da, db = self._unpack(a), self._unpack(b)
        t = [0] * (2 * m - 1)
        for i, x in enumerate(da):
            if x == 0:
                continue
            for j, y in enumerate(db):
                if y:
                    t[i + j] = (t[i + j] + x * y) % p
        mod = self._mod
        for i in range(2 * m - 2, m - 1, -1):
            c = t[i]
            if c:
                t[i] = 0
                base = i - m
                for j in range(m):
                    if mod[j]:
                        t[base + j] = (t[base + j] - c * mod[j]) % p
        return self._pack(t[:m])

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero")
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        if self._log is not None:
            n1 = self.order - 1
            return self._exp[(-self._log[a]) % n1]
        # extended Euclid in GF(p)[x] against the modulus
        F = self._prime_ctx
        r0, r1 = list(self._mod), _ptrim(self._unpack(a))
        s0, s1 = [], [1]
        while r1:
            # r0 = q*r1 + r2
            q = self._pdiv(F, r0, r1)
            r0, r1 = r1, _psub(F, r0, _pmul(F, q, r1))
            s0, s1 = s1, _psub(F, s0, _pmul(F, q, s1))
        # r0 = gcd (a nonzero constant); s0 * a = r0 mod modulus
        c_inv = F.inv(r0[0])
        inv_digits = [F.mul(c_inv, x) for x in s0]
        inv_digits += [0] * (self.m - len(inv_digits))
        return self._pack(inv_digits[: self.m])

    @staticmethod
    def _pdiv(F, a: list, b: list) -> list:
        """Quotient of a by b over the prime field (long division)."""
        a = list(a)
        if len(a) < len(b):
            return []
        q = [0] * (len(a) - len(b) + 1)
        lead_inv = F.inv(b[-1])
        for shift in range(len(a) - len(b), -1, -1):
            c = F.mul(a[shift + len(b) - 1], lead_inv)
            if c:
                q[shift] = c
                for j, bj in enumerate(b):
                    if bj:
                        a[shift + j] = F.sub(a[shift + j], F.mul(c, bj))
        return q

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow_(self, a: int, e: int) -> int:
        if e < 0:
            a = self.inv(a)
            e = -e
        if self._log is not None and self.m > 1:
            if a == 0:
                return 0 if e else 1
            n1 = self.order - 1
            return self._exp[(self._log[a] * e) % n1]
        if self.m == 1:
            return pow(a, e, self.p)
        result, acc = 1, a
        while e:
            if e & 1:
                result = self.mul(result, acc)
            acc = self.mul(acc, acc)
            e >>= 1
        return result

    # -- tables ---------------------------------------------------------------

    def _build_tables(self) -> None:
        q = self.order
        n1 = q - 1
        # the class of the modulus root ("x", code p) is usually primitive
        for g in [self.p] + [c for c in range(2, q) if c != self.p]:
            exp = [0] * n1
            cur, ok = 1, True
            for i in range(n1):
                exp[i] = cur
                cur = self._mul_generic(cur, g)
                if cur == 1 and i != n1 - 1:
                    ok = False
                    break
            if ok and cur == 1:
                log = [0] * q
                for i, v in enumerate(exp):
                    log[v] = i
                self._exp, self._log = exp, log
                return
        raise AssertionError("no primitive element found; field construction is broken")

    # -- wrapped elements -----------------------------------------------------

    def element(self, x: int | FieldElement) -> FieldElement:
        if isinstance(x, FieldElement):
            if x.ctx != self:
                raise MixedFields(f"element of {x.ctx!r} used in {self!r}")
            return x
        return FieldElement(self, x % self.p if self.m == 1 else self.from_int(x))

    def element_by_code(self, code: int) -> FieldElement:
        if not 0 <= code < self.order:
            raise ValueError(f"code {code} out of range for {self!r}")
        return FieldElement(self, code)

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, 0)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, 1)

    def elements(self) -> Iterator[FieldElement]:
        for code in range(self.order):
            yield FieldElement(self, code)


@dataclass(frozen=True, slots=True)
class FieldElement:
    """A field element: its context plus the canonical integer code."""

    ctx: FieldCtx
    rep: int

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.ctx != self.ctx:
                raise MixedFields("operands from different fields")
            return other.rep
        if isinstance(other, int):
            return self.ctx.from_int(other)
        return NotImplemented

    def __add__(self, other):
        r = self._coerce(other)
        if r is NotImplemented:
            return NotImplemented
        return FieldElement(self.ctx, self.ctx.add(self.rep, r))

    __radd__ = __add__

    def __sub__(self, other):
        r = self._coerce(other)
        if r is NotImplemented:
            return NotImplemented
        return FieldElement(self.ctx, self.ctx.sub(self.rep, r))

    def __rsub__(self, other):
        r = self._coerce(other)
        if r is NotImplemented:
            return NotImplemented
        return FieldElement(self.ctx, self.ctx.sub(r, self.rep))

    def __mul__(self, other):
        r = self._coerce(other)
        if r is NotImplemented:
            return NotImplemented
        return FieldElement(self.ctx, self.ctx.mul(self.rep, r))

    __rmul__ = __mul__

    def __truediv__(self, other):
        r = self._coerce(other)
        if r is NotImplemented:
            return NotImplemented
        return FieldElement(self.ctx, self.ctx.div(self.rep, r))

    def __rtruediv__(self, other):
        r = self._coerce(other)
        if r is NotImplemented:
            return NotImplemented
        return FieldElement(self.ctx, self.ctx.div(r, self.rep))

    def __pow__(self, e: int):
        return FieldElement(self.ctx, self.ctx.pow_(self.rep, e))

    def __neg__(self):
        return FieldElement(self.ctx, self.ctx.neg(self.rep))

    def __bool__(self) -> bool:
        return self.rep != 0

    def __lt__(self, other: "FieldElement") -> bool:
        # canonical element order = integer-code order
        if not isinstance(other, FieldElement) or other.ctx != self.ctx:
            raise MixedFields("ordering requires a shared field")
        return self.rep < other.rep

    def inverse(self) -> "FieldElement":
        return FieldElement(self.ctx, self.ctx.inv(self.rep))

    def __repr__(self) -> str:
        return f"{self.ctx!r}:{self.rep}"


# ---------------------------------------------------------------------------
# Construction and sampling.
# ---------------------------------------------------------------------------


def make_field(p: int, m: int = 1, modulus: Sequence[int] | None = None) -> FieldCtx:
    """Build GF(p^m).

    For m > 1 the modulus is a little-endian coefficient list of length m+1
    and must be monic and irreducible; when omitted, the lexicographically
    smallest monic irreducible of degree m (by ascending integer encoding of
    the non-leading coefficients) is found deterministically.
    """
    if not isinstance(p, int) or not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if m < 1:
        raise DegreeMismatch("extension degree must be >= 1")
    if p**m > MAX_ORDER:
        raise OrderTooLarge(f"{p}^{m} exceeds the 2^62 order cap")
    if m == 1:
        if modulus is not None:
            raise DegreeMismatch("prime fields take no modulus")
        return FieldCtx(p, 1, None)

    prime_ctx = FieldCtx(p, 1, None)
    if modulus is not None:
        coeffs = [c % p for c in modulus]
        if len(coeffs) != m + 1:
            raise DegreeMismatch(f"modulus must have degree {m}")
        if coeffs[-1] != 1:
            raise DegreeMismatch("modulus must be monic")
        if not poly_is_irreducible(prime_ctx, coeffs):
            raise ReducibleModulus(f"modulus {tuple(coeffs)} factors over GF({p})")
        return FieldCtx(p, m, tuple(coeffs))

    for enc in range(p**m):
        coeffs = _digits(enc, p, m)
        if coeffs[0] == 0:
            continue  # divisible by x
        coeffs = coeffs + [1]
        if poly_is_irreducible(prime_ctx, coeffs):
            return FieldCtx(p, m, tuple(coeffs))
    raise AssertionError("irreducible polynomial search failed")


def _digits(value: int, base: int, width: int) -> list[int]:
    out = []
    for _ in range(width):
        value, r = divmod(value, base)
        out.append(r)
    return out


def sample_distinct(ctx: FieldCtx, n: int, rng: random.Random) -> tuple[FieldElement, ...]:
    """Uniformly random ordered tuple of n distinct field elements.

    Runs a partial Fisher-Yates shuffle over the canonical field enumeration,
    with the permutation stored sparsely, so it is O(n) regardless of q.
    """
    q = ctx.order
    if n > q:
        raise NTooLarge(f"cannot draw {n} distinct elements from a field of {q}")
    perm: dict[int, int] = {}
    out = []
    for i in range(n):
        j = rng.randrange(i, q)
        vi = perm.get(i, i)
        vj = perm.get(j, j)
        perm[i], perm[j] = vj, vi
        out.append(vj)
    return tuple(FieldElement(ctx, code) for code in out)


# ---------------------------------------------------------------------------
# Tower extensions GF(q^e), used by randomized identity testing.
# ---------------------------------------------------------------------------


class TowerField:
    """GF(q^e) built on top of an existing context.

    Elements are tuples of e raw base-field codes (little-endian in the power
    basis of the tower modulus).  Only the operations needed by randomized
    evaluation are provided; the base field embeds as c -> (c, 0, ..., 0).
    """

    def __init__(self, base: FieldCtx, degree: int):
        if degree < 1:
            raise ValueError("tower degree must be >= 1")
        self.base = base
        self.degree = degree
        self.order = base.order**degree
        self.modulus = self._find_modulus() if degree > 1 else (0, 1)

    def _find_modulus(self) -> tuple[int, ...]:
        q, e = self.base.order, self.degree
        for enc in range(q**e):
            coeffs = _digits(enc, q, e)
            if coeffs[0] == 0:
                continue
            coeffs = coeffs + [1]
            if poly_is_irreducible(self.base, coeffs):
                return tuple(coeffs)
        raise AssertionError("tower modulus search failed")

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * self.degree

    @property
    def one(self) -> tuple[int, ...]:
        return (1,) + (0,) * (self.degree - 1)

    def embed(self, code: int) -> tuple[int, ...]:
        return (code,) + (0,) * (self.degree - 1)

    def is_zero(self, a: tuple[int, ...]) -> bool:
        return not any(a)

    def add(self, a, b) -> tuple[int, ...]:
        F = self.base
        return tuple(F.add(x, y) for x, y in zip(a, b))

    def sub(self, a, b) -> tuple[int, ...]:
        F = self.base
        return tuple(F.sub(x, y) for x, y in zip(a, b))

    def mul(self, a, b) -> tuple[int, ...]:
        F = self.base
        e = self.degree
        if e == 1:
            return (F.mul(a[0], b[0]),)
        t = [0] * (2 * e - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                if y:
                    t[i + j] = F.add(t[i + j], F.mul(x, y))
        mod = self.modulus
        for i in range(2 * e - 2, e - 1, -1):
            c = t[i]
            if c:
                t[i] = 0
                for j in range(e):
                    if mod[j]:
                        t[i - e + j] = F.sub(t[i - e + j], F.mul(c, mod[j]))
        return tuple(t[:e])

    def pow_(self, a: tuple[int, ...], e: int) -> tuple[int, ...]:
        result, acc = self.one, a
        while e:
            if e & 1:
                result = self.mul(result, acc)
            acc = self.mul(acc, acc)
            e >>= 1
        return result

    def sample(self, rng: random.Random) -> tuple[int, ...]:
        q = self.base.order
        return tuple(rng.randrange(q) for _ in range(self.degree))

    def sample_distinct(self, count: int, rng: random.Random) -> list[tuple[int, ...]]:
        if count > self.order:
            raise NTooLarge(f"cannot draw {count} distinct points from order {self.order}")
        seen: set[tuple[int, ...]] = set()
        out = []
        while len(out) < count:
            x = self.sample(rng)
            if x not in seen:
                seen.add(x)
                out.append(x)
        return out


def lift_for_testing(ctx: FieldCtx, min_order: int = 1 << 20) -> TowerField:
    """Smallest tower over ctx whose order reaches min_order."""
    e = 1
    order = ctx.order
    while order < min_order:
        order *= ctx.order
        e += 1
    return TowerField(ctx, e)

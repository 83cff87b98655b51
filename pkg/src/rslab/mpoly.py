"""Sparse multivariate polynomials over a finite field.

A :class:`MultiPoly` in variables X1..Xn is a map from exponent vectors
(length-n tuples of nonnegative ints) to nonzero coefficient codes of its
field context.  The zero polynomial is the empty map.  Values are treated as
immutable: every operation returns a fresh polynomial.

Zero testing comes in three flavors: ``symbolic`` reads the term map,
``grid`` evaluates on a (d+1)^u grid of distinct points (exact whenever every
per-variable degree is at most d), and ``randomized`` does Schwartz-Zippel
trials over an extension of order at least 2**20.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .gf import FieldCtx, FieldElement, TowerField, lift_for_testing


class MixedContexts(ValueError):
    """Operands disagree on field context or variable count."""


class IndexOutOfRange(IndexError):
    """Variable index outside [0, nvars)."""


class GridTooLargeForField(ValueError):
    """Grid needs more distinct points per variable than the field has."""


def _coeff_code(ctx: FieldCtx, c) -> int:
    if isinstance(c, FieldElement):
        if c.ctx != ctx:
            raise MixedContexts("coefficient from a different field")
        return c.rep
    return c % ctx.p if ctx.m == 1 else ctx.from_int(c) if isinstance(c, int) else c


class MultiPoly:
    """Immutable sparse polynomial; build with the class constructors below."""

    __slots__ = ("ctx", "nvars", "terms")

    def __init__(self, ctx: FieldCtx, nvars: int, terms: Mapping[tuple[int, ...], int]):
        self.ctx = ctx
        self.nvars = nvars
        self.terms = {e: c for e, c in terms.items() if c != 0}

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, ctx: FieldCtx, nvars: int) -> "MultiPoly":
        return cls(ctx, nvars, {})

    @classmethod
    def const(cls, ctx: FieldCtx, nvars: int, c) -> "MultiPoly":
        code = _coeff_code(ctx, c)
        return cls(ctx, nvars, {(0,) * nvars: code} if code else {})

    @classmethod
    def variable(cls, ctx: FieldCtx, nvars: int, index: int) -> "MultiPoly":
        return cls.monomial(ctx, nvars, index, 1)

    @classmethod
    def monomial(cls, ctx: FieldCtx, nvars: int, index: int, exp: int, coeff=1) -> "MultiPoly":
        if not 0 <= index < nvars:
            raise IndexOutOfRange(f"variable {index} out of range for {nvars} variables")
        e = [0] * nvars
        e[index] = exp
        code = _coeff_code(ctx, coeff)
        return cls(ctx, nvars, {tuple(e): code} if code else {})

    # -- basics --------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MultiPoly)
            and self.ctx == other.ctx
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.ctx, self.nvars, frozenset(self.terms.items())))

    def _check(self, other: "MultiPoly") -> None:
        if self.ctx != other.ctx or self.nvars != other.nvars:
            raise MixedContexts("polynomials live in different rings")

    # -- ring operations ------------------------------------------------------

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        add = self.ctx.add
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = add(out.get(e, 0), c)
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MultiPoly(self.ctx, self.nvars, out)

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        sub = self.ctx.sub
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = sub(out.get(e, 0), c)
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MultiPoly(self.ctx, self.nvars, out)

    def __neg__(self) -> "MultiPoly":
        neg = self.ctx.neg
        return MultiPoly(self.ctx, self.nvars, {e: neg(c) for e, c in self.terms.items()})

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        ctx = self.ctx
        mul, add = ctx.mul, ctx.add
        out: dict[tuple[int, ...], int] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                s = add(out.get(e, 0), mul(ca, cb))
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return MultiPoly(ctx, self.nvars, out)

    def scale(self, c) -> "MultiPoly":
        code = _coeff_code(self.ctx, c)
        if code == 0:
            return MultiPoly.zero(self.ctx, self.nvars)
        mul = self.ctx.mul
        return MultiPoly(self.ctx, self.nvars, {e: mul(code, v) for e, v in self.terms.items()})

    # -- substitution and degrees ----------------------------------------------

    def partial_assign(self, bindings: Mapping[int, int | FieldElement]) -> "MultiPoly":
        """Substitute field values for a subset of the variables.

        Bound variables disappear from every exponent vector (their slot drops
        to zero); the result still formally lives in the same nvars-variable
        ring, so assignments can be chained in any order.
        """
        if not bindings:
            return self
        ctx = self.ctx
        bound: dict[int, int] = {}
        for i, v in bindings.items():
            if not 0 <= i < self.nvars:
                raise IndexOutOfRange(f"variable {i} out of range for {self.nvars} variables")
            bound[i] = _coeff_code(ctx, v)
        mul, add, pw = ctx.mul, ctx.add, ctx.pow_
        out: dict[tuple[int, ...], int] = {}
        for e, c in self.terms.items():
            factor = 1
            ne = list(e)
            for i, val in bound.items():
                exp = e[i]
                if exp:
                    factor = mul(factor, pw(val, exp))
                    ne[i] = 0
            c2 = mul(c, factor)
            if c2 == 0:
                continue
            key = tuple(ne)
            s = add(out.get(key, 0), c2)
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return MultiPoly(ctx, self.nvars, out)

    def degree_in(self, index: int) -> int:
        """Largest exponent of the given variable; -1 for the zero polynomial."""
        if not 0 <= index < self.nvars:
            raise IndexOutOfRange(f"variable {index} out of range for {self.nvars} variables")
        if not self.terms:
            return -1
        return max(e[index] for e in self.terms)

    def max_degree(self) -> int:
        """Largest per-variable degree over all variables (0 for constants, -1 for zero)."""
        if not self.terms:
            return -1
        return max(max(e) if e else 0 for e in self.terms)

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def variables_used(self) -> list[int]:
        used = set()
        for e in self.terms:
            for i, x in enumerate(e):
                if x:
                    used.add(i)
        return sorted(used)

    # -- evaluation --------------------------------------------------------------

    def evaluate(self, point: Iterable[int | FieldElement]) -> int:
        """Full evaluation; returns the raw code of the value."""
        ctx = self.ctx
        vals = [_coeff_code(ctx, v) for v in point]
        if len(vals) != self.nvars:
            raise IndexOutOfRange("point length must equal the variable count")
        mul, add, pw = ctx.mul, ctx.add, ctx.pow_
        # per-variable power cache
        powers: list[dict[int, int]] = [dict() for _ in range(self.nvars)]
        acc = 0
        for e, c in self.terms.items():
            t = c
            for i, exp in enumerate(e):
                if exp:
                    cache = powers[i]
                    v = cache.get(exp)
                    if v is None:
                        v = pw(vals[i], exp)
                        cache[exp] = v
                    t = mul(t, v)
            acc = add(acc, t)
        return acc

    def evaluate_tower(self, tower: TowerField, point: list[tuple[int, ...]]) -> tuple[int, ...]:
        """Evaluate at a point with coordinates in a tower extension."""
        acc = tower.zero
        for e, c in self.terms.items():
            t = tower.embed(c)
            for i, exp in enumerate(e):
                if exp:
                    t = tower.mul(t, tower.pow_(point[i], exp))
            acc = tower.add(acc, t)
        return acc

    # -- canonical text ------------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=lambda t: (sum(t), t), reverse=True):
            c = self.terms[e]
            factors = [f"X{i + 1}" + (f"^{x}" if x > 1 else "") for i, x in enumerate(e) if x]
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            else:
                parts.append("*".join([str(c)] + factors))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"MultiPoly({self})"


# ---------------------------------------------------------------------------
# Zero testing.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZeroTest:
    """Outcome of a zero test; truthiness follows is_zero.

    For the randomized strategy, error_bound is the probability that a
    "zero" answer is wrong; "nonzero" answers are always correct.
    """

    is_zero: bool
    strategy: str
    error_bound: Fraction = Fraction(0)

    def __bool__(self) -> bool:
        return self.is_zero


def is_zero_poly(
    f: MultiPoly,
    strategy: str = "symbolic",
    degree_bound: int | None = None,
    trials: int = 3,
    ext_degree: int | None = None,
    rng: random.Random | None = None,
    min_ext_order: int = 1 << 20,
) -> ZeroTest:
    """Decide whether f is the zero polynomial.

    symbolic: read the normalized term map (always exact).
    grid: evaluate on a (d+1)^u grid of distinct points, d = degree_bound
        (defaults to the max per-variable degree); exact because a nonzero
        polynomial with per-variable degree <= d cannot vanish on such a grid.
    randomized: Schwartz-Zippel trials over an extension of order >= 2**20;
        one-sided, with the reported error bound per the returned metadata.
    """
    if strategy == "symbolic":
        return ZeroTest(f.is_zero, "symbolic")

    if strategy == "grid":
        if f.is_zero:
            return ZeroTest(True, "grid")
        d = degree_bound if degree_bound is not None else f.max_degree()
        if d + 1 > f.ctx.order:
            raise GridTooLargeForField(
                f"grid needs {d + 1} distinct points but the field has {f.ctx.order}"
            )
        used = f.variables_used()
        if not used:
            return ZeroTest(False, "grid")  # nonzero constant
        point = [0] * f.nvars
        for combo in itertools.product(range(d + 1), repeat=len(used)):
            for i, v in zip(used, combo):
                point[i] = v
            if f.evaluate(point) != 0:
                return ZeroTest(False, "grid")
        return ZeroTest(True, "grid")

    if strategy == "randomized":
        if trials < 1:
            raise ValueError("randomized testing needs at least one trial")
        if f.is_zero:
            return ZeroTest(True, "randomized")
        used = f.variables_used()
        if not used:
            return ZeroTest(False, "randomized")
        rng = rng if rng is not None else random.Random(0x5A11)
        if ext_degree is not None:
            tower = TowerField(f.ctx, ext_degree)
        else:
            tower = lift_for_testing(f.ctx, min_ext_order)
        d = degree_bound if degree_bound is not None else f.max_degree()
        per_trial = Fraction(d * len(used), tower.order)
        for _ in range(trials):
            point = [tower.embed(0)] * f.nvars
            for i in used:
                point[i] = tower.sample(rng)
            if not tower.is_zero(f.evaluate_tower(tower, point)):
                return ZeroTest(False, "randomized")
        return ZeroTest(True, "randomized", min(per_trial, Fraction(1)) ** trials)

    raise ValueError(f"unknown strategy {strategy!r}")

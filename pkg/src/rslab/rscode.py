"""Reed-Solomon codes with chosen (possibly random) evaluation points.

A code is the set of evaluations of all polynomials of degree < k at n
distinct field points.  Messages are coefficient vectors, low degree first,
so the generator matrix is the Vandermonde matrix with entry (i, j) equal to
the i-th point raised to the j-th power.

Duality: scaling coordinate i by the inverse of the product of (a_i - a_j)
over the other points makes the code orthogonal to the length-n dimension-
(n-k) code on the same points; `check_duality` verifies the resulting
(n-k) x k product matrix is exactly zero.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .gf import FieldCtx, FieldElement, make_field, sample_distinct
from .linalg import FieldMatrix, PolyMatrix, is_zero_matrix, matmul_field, solve_field
from .mpoly import MultiPoly


class LengthMismatch(ValueError):
    """Message or word length does not fit the code."""


class RepeatedPoints(ValueError):
    """Evaluation points must be pairwise distinct."""


@dataclass(frozen=True)
class PuncturedRSCode:
    ctx: FieldCtx
    n: int
    k: int
    points: tuple[FieldElement, ...]

    def __post_init__(self) -> None:
        if not 1 <= self.k <= self.n <= self.ctx.order:
            raise ValueError(f"need 1 <= k <= n <= q, got k={self.k}, n={self.n}, q={self.ctx.order}")
        if len(self.points) != self.n:
            raise LengthMismatch("point count must equal the block length")
        reps = [p.rep for p in self.points]
        if len(set(reps)) != self.n:
            raise RepeatedPoints("evaluation points must be distinct")
        for p in self.points:
            if p.ctx != self.ctx:
                raise ValueError("points must live in the code's field")

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k, self.n)

    @property
    def design_distance(self) -> Fraction:
        return Fraction(self.n - self.k + 1, self.n)

    def to_json(self) -> dict:
        return {
            "p": self.ctx.p,
            "m": self.ctx.m,
            "modulus": list(self.ctx.modulus) if self.ctx.modulus else None,
            "n": self.n,
            "k": self.k,
            "points": [p.rep for p in self.points],
        }

    @staticmethod
    def from_json(obj: dict) -> "PuncturedRSCode":
        ctx = make_field(obj["p"], obj["m"], obj["modulus"])
        pts = tuple(FieldElement(ctx, code) for code in obj["points"])
        return PuncturedRSCode(ctx, obj["n"], obj["k"], pts)


def vandermonde(code: PuncturedRSCode) -> FieldMatrix:
    """n x k generator matrix: row i holds the powers 0..k-1 of point i."""
    return points_vandermonde(code.ctx, [p.rep for p in code.points], code.k)


def points_vandermonde(ctx: FieldCtx, point_reps: Sequence[int], k: int) -> FieldMatrix:
    rows = []
    for a in point_reps:
        row = [1]
        for _ in range(k - 1):
            row.append(ctx.mul(row[-1], a))
        rows.append(row[:k] if k > 0 else [])
    return FieldMatrix(ctx, len(point_reps), k, rows)


def symbolic_vandermonde(n: int, k: int, ctx: FieldCtx) -> PolyMatrix:
    """n x k matrix of monomials: entry (i, j) is the i-th variable to the j-th power."""
    rows = []
    for i in range(n):
        row = [
            MultiPoly.monomial(ctx, n, i, j) if j else MultiPoly.const(ctx, n, 1)
            for j in range(k)
        ]
        rows.append(row)
    return PolyMatrix(ctx, n, n, k, rows)


def encode(code: PuncturedRSCode, message: Sequence[FieldElement | int]) -> tuple[FieldElement, ...]:
    """Evaluate the message polynomial (coefficients low degree first) at the points."""
    if len(message) != code.k:
        raise LengthMismatch(f"message length {len(message)} != k = {code.k}")
    ctx = code.ctx
    coeffs = [ctx.element(c).rep for c in message]
    out = []
    for p in code.points:
        a = p.rep
        acc = 0
        for c in reversed(coeffs):  # Horner
            acc = ctx.add(ctx.mul(acc, a), c)
        out.append(FieldElement(ctx, acc))
    return tuple(out)


def message_from_codeword(code: PuncturedRSCode, word: Sequence[FieldElement]) -> tuple[FieldElement, ...]:
    """Recover the unique message from a full codeword (solves a k x k system)."""
    if len(word) != code.n:
        raise LengthMismatch("word length must equal the block length")
    v = vandermonde(code).submatrix(range(code.k), range(code.k))
    sol = solve_field(v, [code.ctx.element(w).rep for w in word[: code.k]])
    return tuple(FieldElement(code.ctx, c) for c in sol)


def random_puncture(ctx: FieldCtx, n: int, k: int, rng: random.Random) -> PuncturedRSCode:
    """Code on a uniformly random ordered tuple of n distinct points."""
    return PuncturedRSCode(ctx, n, k, sample_distinct(ctx, n, rng))


def dual_diag(points: Sequence[FieldElement]) -> tuple[FieldElement, ...]:
    """Coordinate scalings v_i = prod over j != i of 1/(a_i - a_j)."""
    if not points:
        return ()
    ctx = points[0].ctx
    reps = [p.rep for p in points]
    if len(set(reps)) != len(reps):
        raise RepeatedPoints("evaluation points must be distinct")
    out = []
    for i, a in enumerate(reps):
        prod = 1
        for j, b in enumerate(reps):
            if j != i:
                prod = ctx.mul(prod, ctx.sub(a, b))
        out.append(FieldElement(ctx, ctx.inv(prod)))
    return tuple(out)


def check_duality(points: Sequence[FieldElement], k: int) -> bool:
    """Exact check that the transposed (n-k)-column Vandermonde, the dual
    diagonal and the k-column Vandermonde multiply to the zero matrix."""
    n = len(points)
    if not 1 <= k <= n - 1:
        raise ValueError("need 1 <= k <= n-1")
    ctx = points[0].ctx
    reps = [p.rep for p in points]
    v_left = points_vandermonde(ctx, reps, n - k).transpose()
    v_right = points_vandermonde(ctx, reps, k)
    diag = dual_diag(points)
    scaled = FieldMatrix(
        ctx, n, k,
        [[ctx.mul(diag[i].rep, v_right.data[i][j]) for j in range(k)] for i in range(n)],
    )
    return is_zero_matrix(matmul_field(v_left, scaled))

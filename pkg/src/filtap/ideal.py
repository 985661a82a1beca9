"""Monomial ideals, filtrations built from them, and membership certificates.

Only monomial ideals are handled, so every membership question reduces to
divisibility of exponent vectors and is decided exactly.  Ideals live in the
graded variables of a space; parameters of a jet are ignored when testing
membership.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ContextMismatch, InputError, SearchExhausted
from .jet import Jet, Monomial, Space, format_monomial


def divides(a: Monomial, b: Monomial) -> bool:
    return all(p <= q for p, q in zip(a, b))


def _minimize(gens: Iterable[Monomial]) -> tuple[Monomial, ...]:
    uniq = sorted(set(gens), key=lambda m: (sum(m), tuple(-e for e in m)))
    kept: list[Monomial] = []
    for g in uniq:
        if not any(divides(k, g) for k in kept):
            kept.append(g)
    return tuple(kept)


def _lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(p, q) for p, q in zip(a, b))


class MonomialIdeal:
    """A finitely generated monomial ideal with a minimal generating set.

    Generators are kept in graded-lex order; that order is also the tie-break
    used when attributing terms to generators in membership certificates.
    """

    __slots__ = ("vars", "gens")

    def __init__(self, vars: Sequence[str], gens: Iterable[Monomial] = ()):
        self.vars = tuple(vars)
        gens = [tuple(g) for g in gens]
        for g in gens:
            if len(g) != len(self.vars) or min(g, default=0) < 0:
                raise ContextMismatch(f"generator {g} does not fit variables {self.vars}")
        self.gens = _minimize(gens)

    @classmethod
    def zero(cls, vars) -> "MonomialIdeal":
        return cls(vars, ())

    @classmethod
    def unit(cls, vars) -> "MonomialIdeal":
        return cls(vars, [(0,) * len(tuple(vars))])

    @classmethod
    def maximal(cls, vars) -> "MonomialIdeal":
        vars = tuple(vars)
        n = len(vars)
        return cls(vars, [tuple(int(i == k) for i in range(n)) for k in range(n)])

    @property
    def space(self) -> Space:
        return Space(self.vars)

    def is_zero(self) -> bool:
        return not self.gens

    def is_unit(self) -> bool:
        return any(sum(g) == 0 for g in self.gens)

    def _check(self, other: "MonomialIdeal"):
        if other.vars != self.vars:
            raise ContextMismatch(f"ideal variables {self.vars} vs {other.vars}")

    def contains_monomial(self, mono: Monomial) -> bool:
        mono = tuple(mono)[:len(self.vars)]
        return any(divides(g, mono) for g in self.gens)

    def first_divisor(self, mono: Monomial):
        mono = tuple(mono)[:len(self.vars)]
        for i, g in enumerate(self.gens):
            if divides(g, mono):
                return i
        return None

    def __add__(self, other: "MonomialIdeal") -> "MonomialIdeal":
        self._check(other)
        return MonomialIdeal(self.vars, self.gens + other.gens)

    def __mul__(self, other: "MonomialIdeal") -> "MonomialIdeal":
        self._check(other)
        return MonomialIdeal(self.vars, [tuple(p + q for p, q in zip(a, b))
                                         for a in self.gens for b in other.gens])

    def __and__(self, other: "MonomialIdeal") -> "MonomialIdeal":
        self._check(other)
        return MonomialIdeal(self.vars, [_lcm(a, b) for a in self.gens for b in other.gens])

    def __pow__(self, k: int) -> "MonomialIdeal":
        if k < 0:
            raise ValueError("negative ideal power")
        result = MonomialIdeal.unit(self.vars)
        for _ in range(k):
            result = result * self
        return result

    def contains(self, other: "MonomialIdeal") -> bool:
        """True iff ``other`` is a subset of ``self``."""
        self._check(other)
        return all(self.contains_monomial(g) for g in other.gens)

    def __eq__(self, other):
        if not isinstance(other, MonomialIdeal):
            return NotImplemented
        return self.vars == other.vars and self.gens == other.gens

    def __hash__(self):
        return hash((self.vars, self.gens))

    def degree_min(self):
        return min((sum(g) for g in self.gens), default=math.inf)

    def generator_jets(self, space: Space, order: int) -> list[Jet]:
        """Generators as exact jets of ``space`` (parameters padded with zeros)."""
        if space.vars != self.vars:
            raise ContextMismatch(f"ideal variables {self.vars} vs {space.vars}")
        pad = (0,) * len(space.params)
        return [Jet.monomial(space, g + pad, 1, order) for g in self.gens]

    def to_text(self) -> str:
        if not self.gens:
            return "()"
        sp = Space(self.vars)
        return "(" + ", ".join(format_monomial(sp, g) or "1" for g in self.gens) + ")"

    def __repr__(self):
        return f"MonomialIdeal{self.to_text()}"


def ideal_sum(a, b):
    return a + b


def ideal_product(a, b):
    return a * b


def ideal_intersection(a, b):
    return a & b


def ideal_power(a, k):
    return a ** k


def contains_ideal(a: MonomialIdeal, b: MonomialIdeal) -> bool:
    return a.contains(b)


# -- membership certificates ------------------------------------------------------

@dataclass
class MembershipCertificate:
    """Witness that ``jet`` lies in ``ideal`` -- or the first monomial that does not.

    On success ``cofactors[i]`` is the jet multiplying generator ``i``, and the
    cofactor-weighted sum of generators reproduces ``jet`` exactly.
    """
    ideal: MonomialIdeal
    jet: Jet
    holds: bool
    cofactors: tuple = ()
    offending: Monomial | None = None

    def recombine(self) -> Jet:
        sp = self.jet.space
        total = Jet.zero(sp, self.jet.order, self.jet.exact)
        for g, cof in zip(self.ideal.generator_jets(sp, self.jet.order), self.cofactors):
            total = total + g * cof
        return total

    def verify(self) -> bool:
        if not self.holds:
            return False
        if len(self.cofactors) != len(self.ideal.gens):
            return False
        return self.recombine().terms == self.jet.terms

    def offending_text(self) -> str | None:
        if self.offending is None:
            return None
        return format_monomial(self.jet.space, self.offending) or "1"


def contains_jet(I: MonomialIdeal, f: Jet) -> MembershipCertificate:
    sp = f.space
    if sp.vars != I.vars:
        raise ContextMismatch(f"ideal variables {I.vars} vs jet variables {sp.vars}")
    nv = len(sp.vars)
    buckets: list[dict] = [{} for _ in I.gens]
    for m, c in f.sorted_terms():
        i = I.first_divisor(m)
        if i is None:
            return MembershipCertificate(I, f, False, (), m)
        g = I.gens[i]
        cof = tuple(e - ge for e, ge in zip(m[:nv], g)) + m[nv:]
        buckets[i][cof] = c
    cofactors = tuple(Jet(sp, b, f.order, f.exact) for b in buckets)
    return MembershipCertificate(I, f, True, cofactors, None)


def reduce_mod(f: Jet, J: MonomialIdeal) -> Jet:
    """Drop every term of ``f`` that lies in ``J``."""
    if f.space.vars != J.vars:
        raise ContextMismatch(f"ideal variables {J.vars} vs jet variables {f.space.vars}")
    if J.is_zero():
        return f
    kept = {m: c for m, c in f.terms.items() if not J.contains_monomial(m)}
    return Jet._raw(f.space, kept, f.order, f.exact)


def support_ideal(f: Jet) -> MonomialIdeal:
    """Smallest monomial ideal containing ``f``."""
    nv = len(f.space.vars)
    return MonomialIdeal(f.space.vars, [m[:nv] for m in f.terms])


# -- filtrations ------------------------------------------------------------------

@dataclass(frozen=True)
class Affine:
    """The index map j -> a*j + b, clamped at zero."""
    a: int = 1
    b: int = 0

    def __call__(self, j: int) -> int:
        return max(self.a * j + self.b, 0)

    def __str__(self):
        if self.a == 0:
            return str(self.b)
        head = "j" if self.a == 1 else f"{self.a}*j"
        if self.b > 0:
            return f"{head}+{self.b}"
        if self.b < 0:
            return f"{head}-{-self.b}"
        return head


@dataclass(frozen=True)
class Powers:
    ideal: MonomialIdeal
    index: Affine = Affine()

    def at(self, j):
        return self.ideal ** self.index(j)

    def __str__(self):
        return f"powers({self.ideal.to_text()}, {self.index})"


@dataclass(frozen=True)
class Fixed:
    ideal: MonomialIdeal

    def at(self, j):
        return self.ideal

    def __str__(self):
        return f"fixed({self.ideal.to_text()})"


@dataclass(frozen=True)
class Scaled:
    base: MonomialIdeal
    ideal: MonomialIdeal
    index: Affine = Affine()

    def at(self, j):
        return self.base * self.ideal ** self.index(j)

    def __str__(self):
        return f"scaled({self.base.to_text()}, {self.ideal.to_text()}, {self.index})"


@dataclass(frozen=True)
class SumRule:
    parts: tuple

    def at(self, j):
        out = self.parts[0].at(j)
        for p in self.parts[1:]:
            out = out + p.at(j)
        return out

    def __str__(self):
        return "sum(" + ", ".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class ProductRule:
    parts: tuple

    def at(self, j):
        out = self.parts[0].at(j)
        for p in self.parts[1:]:
            out = out * p.at(j)
        return out

    def __str__(self):
        return "prod(" + ", ".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class IntersectionRule:
    parts: tuple

    def at(self, j):
        out = self.parts[0].at(j)
        for p in self.parts[1:]:
            out = out & p.at(j)
        return out

    def __str__(self):
        return "cap(" + ", ".join(map(str, self.parts)) + ")"


class Filtration:
    """A rule j -> ideal, materialized and checked descending up to ``j_max``."""

    def __init__(self, rule, vars: Sequence[str], j_max: int = 8):
        self.rule = rule
        self.vars = tuple(vars)
        self.j_max = j_max
        self._cache: dict[int, MonomialIdeal] = {}
        prev = self.ideal_at(0)
        for j in range(1, j_max + 1):
            cur = self.ideal_at(j)
            if not prev.contains(cur):
                raise InputError(f"filtration {rule} is not descending at j={j}", j=j)
            prev = cur

    def ideal_at(self, j: int) -> MonomialIdeal:
        if j < 0:
            raise ValueError("negative filtration index")
        if j not in self._cache:
            ideal = self.rule.at(j)
            if ideal.vars != self.vars:
                raise ContextMismatch(f"rule produces ideals in {ideal.vars}, expected {self.vars}")
            self._cache[j] = ideal
        return self._cache[j]

    def __str__(self):
        return str(self.rule)


@dataclass
class FGCertificate:
    N: int
    N_tilde: int
    q_set: tuple
    ideal_N: MonomialIdeal
    ideal_deep: MonomialIdeal

    def verify(self) -> bool:
        q = MonomialIdeal(self.ideal_N.vars, self.q_set)
        return (all(self.ideal_N.contains_monomial(m) for m in self.q_set)
                and q.contains(self.ideal_deep))


def weak_fg_check(F: Filtration, N: int, search_limit: int = 0) -> FGCertificate:
    if N + search_limit > F.j_max:
        raise InputError(f"filtration materialized to {F.j_max}, check needs {N + search_limit}")
    base = F.ideal_at(N)
    q = MonomialIdeal(F.vars, base.gens)
    for nt in range(search_limit + 1):
        deep = F.ideal_at(N + nt)
        if q.contains(deep):
            return FGCertificate(N, nt, base.gens, base, deep)
    raise SearchExhausted(f"no N~ <= {search_limit} found for N={N}")


@dataclass
class CofinalTable:
    forward: list = field(default_factory=list)   # least d with A_d inside B_j
    backward: list = field(default_factory=list)  # least d with B_d inside A_j
    refusal: tuple | None = None                  # (direction, j)

    @property
    def equivalent(self) -> bool:
        return self.refusal is None


def _least_index(src: Filtration, dst: MonomialIdeal):
    for d in range(src.j_max + 1):
        if dst.contains(src.ideal_at(d)):
            return d
    return None


def filtrations_cofinal(A: Filtration, B: Filtration, range_: int) -> CofinalTable:
    if A.vars != B.vars:
        raise ContextMismatch(f"filtration variables {A.vars} vs {B.vars}")
    table = CofinalTable()
    for j in range(range_ + 1):
        d = _least_index(A, B.ideal_at(j))
        if d is None:
            table.refusal = ("forward", j)
            return table
        table.forward.append(d)
        e = _least_index(B, A.ideal_at(j))
        if e is None:
            table.refusal = ("backward", j)
            return table
        table.backward.append(e)
    return table

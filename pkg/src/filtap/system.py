"""Polynomial systems F(x, y), Jacobians in y, the determinant h and adjugates.

Equations are genuine polynomials in both x and y (exact jets over the full
space), so substituting a jet vector for y never loses information beyond the
order of that jet vector.  An optional monomial quotient ideal J in x is
applied by reduction after evaluation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Sequence

from .errors import (ContextMismatch, InputError, NoQuotient, ResidualNotInIdeal,
                     SystemTooLarge)
from .expr import VarContext, parse_monomial_ideal, parse_polynomial
from .ideal import (Filtration, MembershipCertificate, MonomialIdeal, contains_jet,
                    reduce_mod)
from .jet import Jet, Space, common_order, format_monomial, substitute

MAX_EQUATIONS = 4

Matrix = list  # list of rows, each a list of Jets


@dataclass
class PolySystem:
    ctx: VarContext
    equations: list
    quotient: MonomialIdeal | None = None

    def __post_init__(self):
        self.equations = list(self.equations)
        if not self.equations:
            raise InputError("a system needs at least one equation")
        sp = self.ctx.full_space
        for k, eq in enumerate(self.equations):
            if eq.space != sp:
                raise ContextMismatch(f"equation {k} lives in {eq.space}, expected {sp}")
            if not eq.exact:
                raise InputError(f"equation {k} is not a polynomial (exact jet)")
        if self.quotient is not None and self.quotient.vars != self.ctx.x_vars:
            raise ContextMismatch("quotient ideal must live in the x variables")

    @classmethod
    def from_text(cls, ctx: VarContext, equations: Sequence[str],
                  quotient: str | None = None) -> "PolySystem":
        eqs = [parse_polynomial(e, ctx) for e in equations]
        J = None
        if quotient is not None:
            J = parse_monomial_ideal(quotient, ctx.x_space)
        return cls(ctx, eqs, J)

    @property
    def s(self) -> int:
        return len(self.equations)

    @property
    def n(self) -> int:
        return len(self.ctx.y_vars)

    @property
    def h_vanishes_identically(self) -> bool:
        # more equations than unknowns: J*J^T has rank <= n < s
        return self.s > self.n

    def y_degree(self) -> int:
        nx = len(self.ctx.x_vars)
        ny = self.n
        return max((sum(m[nx:nx + ny]) for eq in self.equations for m in eq.terms),
                   default=0)

    def with_t(self, t_var: str) -> "PolySystem":
        """The same system viewed over a context carrying parameter ``t_var``."""
        if self.ctx.t_var == t_var:
            return self
        if self.ctx.t_var is not None:
            raise ContextMismatch(f"system already has parameter {self.ctx.t_var}")
        ctx = self.ctx.with_t(t_var)
        return PolySystem(ctx, [embed(eq, ctx.full_space) for eq in self.equations],
                          self.quotient)

    def specialize(self, value) -> "PolySystem":
        """Substitute a rational value for the parameter."""
        if self.ctx.t_var is None:
            return self
        ctx = self.ctx.with_t(None)
        target = ctx.full_space
        t = self.ctx.t_var
        eqs = [substitute(eq, {t: Jet.constant(target, value, 0)}, target)
               for eq in self.equations]
        return PolySystem(ctx, eqs, self.quotient)

    def to_texts(self) -> list[str]:
        return [eq.to_expr() for eq in self.equations]


def embed(p: Jet, space: Space) -> Jet:
    """Re-home ``p`` into a space whose names include those of ``p.space``."""
    if p.space == space:
        return p
    idx = []
    for name in p.space.names:
        if name not in space.names:
            raise ContextMismatch(f"cannot embed {p.space} into {space}")
        idx.append(space.index(name))
    if any((i < len(space.vars)) != (k < len(p.space.vars)) for k, i in enumerate(idx)):
        raise ContextMismatch("embedding may not change which names are graded")
    terms = {}
    for m, c in p.terms.items():
        e = [0] * space.width
        for k, i in enumerate(idx):
            e[i] = m[k]
        terms[tuple(e)] = c
    return Jet._raw(space, terms, p.order, p.exact)


def _check_assignment(sys: PolySystem, y_assign: Sequence[Jet]) -> Space:
    if len(y_assign) != sys.n:
        raise ContextMismatch(f"expected {sys.n} jets for {sys.ctx.y_vars}, got {len(y_assign)}")
    spaces = {y.space for y in y_assign}
    if len(spaces) != 1:
        raise ContextMismatch("assignment jets must share one space")
    target = spaces.pop()
    if target.vars != sys.ctx.x_vars:
        raise ContextMismatch(f"assignment lives in {target}, expected x variables {sys.ctx.x_vars}")
    if sys.ctx.t_var is not None and sys.ctx.t_var not in target.params:
        raise ContextMismatch(f"assignment must carry the parameter {sys.ctx.t_var}")
    return target


def _compose(p: Jet, sys: PolySystem, y_assign: Sequence[Jet], target: Space) -> Jet:
    return substitute(p, dict(zip(sys.ctx.y_vars, y_assign)), target)


def evaluate(sys: PolySystem, y_assign: Sequence[Jet], reduce: bool = True) -> list[Jet]:
    """F(x, y_assign), reduced modulo the quotient ideal when one is set."""
    target = _check_assignment(sys, y_assign)
    out = [_compose(eq, sys, y_assign, target) for eq in sys.equations]
    if reduce and sys.quotient is not None:
        out = [reduce_mod(r, sys.quotient) for r in out]
    return out


# -- small exact linear algebra over jets ----------------------------------------

def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    rows, inner, cols = len(A), len(B), len(B[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = A[i][0] * B[0][j]
            for k in range(1, inner):
                acc = acc + A[i][k] * B[k][j]
            row.append(acc)
        out.append(row)
    return out


def transpose(A: Matrix) -> Matrix:
    return [list(col) for col in zip(*A)]


def mat_vec(A: Matrix, v: Sequence[Jet]) -> list[Jet]:
    return [row_dot(row, v) for row in A]


def row_dot(row, v):
    acc = row[0] * v[0]
    for a, b in zip(row[1:], v[1:]):
        acc = acc + a * b
    return acc


def _minor(A: Matrix, i: int, j: int) -> Matrix:
    return [r[:j] + r[j + 1:] for k, r in enumerate(A) if k != i]


def determinant(A: Matrix) -> Jet:
    """Laplace expansion along the first row (square matrices up to 4x4)."""
    s = len(A)
    if s > MAX_EQUATIONS:
        raise SystemTooLarge(f"determinant of a {s}x{s} matrix; at most {MAX_EQUATIONS} supported")
    if s == 1:
        return A[0][0]
    acc = None
    for j in range(s):
        term = A[0][j] * determinant(_minor(A, 0, j))
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def adjugate(A: Matrix) -> Matrix:
    s = len(A)
    if s > MAX_EQUATIONS:
        raise SystemTooLarge(f"adjugate of a {s}x{s} matrix; at most {MAX_EQUATIONS} supported")
    if s == 1:
        return [[Jet.constant(A[0][0].space, 1, A[0][0].order)]]
    out = []
    for i in range(s):
        row = []
        for j in range(s):
            c = determinant(_minor(A, j, i))
            row.append(-c if (i + j) % 2 else c)
        out.append(row)
    return out


def leibniz_determinant(A: Matrix) -> Jet:
    """Permutation-sum determinant; slow, used as an independent cross-check."""
    s = len(A)
    acc = None
    for perm in permutations(range(s)):
        sign = 1
        for a in range(s):
            for b in range(a + 1, s):
                if perm[a] > perm[b]:
                    sign = -sign
        term = A[0][perm[0]]
        for i in range(1, s):
            term = term * A[i][perm[i]]
        if sign < 0:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def identity(space: Space, s: int, order: int, scale: Jet | None = None) -> Matrix:
    one = Jet.constant(space, 1, order) if scale is None else scale
    zero = Jet.zero(space, order)
    return [[one if i == j else zero for j in range(s)] for i in range(s)]


def matrices_equal(A: Matrix, B: Matrix) -> bool:
    return all(a.terms == b.terms for ra, rb in zip(A, B) for a, b in zip(ra, rb))


@dataclass
class JacobianData:
    J: Matrix        # s x n, dF/dy along the assignment
    JJt: Matrix      # s x s
    h: Jet           # det(J J^T)
    adj: Matrix      # adjugate of J J^T
    order: int

    @property
    def M(self) -> Matrix:
        """J^T adj(J J^T), so that J M = h Id."""
        return mat_mul(transpose(self.J), self.adj)

    def identity_holds(self) -> bool:
        s = len(self.JJt)
        return matrices_equal(mat_mul(self.JJt, self.adj),
                              identity(self.h.space, s, self.order, self.h))


def jacobian_matrix(sys: PolySystem, y_assign: Sequence[Jet], order: int | None = None):
    target = _check_assignment(sys, y_assign)
    raw = [[_compose(eq.partial(y), sys, y_assign, target) for y in sys.ctx.y_vars]
           for eq in sys.equations]
    if order is None:
        order = common_order(y_assign)
    if order is None:
        # all exact: choose an order large enough that det(J J^T) is exact
        top = max((e.degree() for row in raw for e in row), default=0)
        order = max(1, 2 * sys.s * top, max(y.order for y in y_assign))
    return [[e.at_order(order) for e in row] for row in raw], order


def jacobian_y(sys: PolySystem, y_assign: Sequence[Jet], order: int | None = None) -> JacobianData:
    """J = dF/dy along ``y_assign``, h = det(J J^T) and adj(J J^T).

    All entries are brought to a single working order (the smallest order of
    the assignment unless ``order`` is given) so the adjugate identity holds
    exactly in the truncated ring.
    """
    if sys.s > MAX_EQUATIONS:
        raise SystemTooLarge(f"{sys.s} equations; at most {MAX_EQUATIONS} supported")
    J, order = jacobian_matrix(sys, y_assign, order)
    if sys.n == 0:
        sp = y_assign[0].space if y_assign else sys.ctx.x_space
        zero = Jet.zero(sp, order)
        JJt = [[zero] * sys.s for _ in range(sys.s)]
    else:
        JJt = mat_mul(J, transpose(J))
    h = determinant(JJt)
    adj = adjugate(JJt)
    data = JacobianData(J, JJt, h, adj, order)
    assert data.identity_holds(), "adjugate identity failed"
    return data


# -- residual checks --------------------------------------------------------------

@dataclass
class FormalCheck:
    ideal: MonomialIdeal
    residuals: list
    certificates: list
    failed_equation: int | None = None

    @property
    def holds(self) -> bool:
        return self.failed_equation is None

    def offending_text(self) -> str | None:
        if self.failed_equation is None:
            return None
        return self.certificates[self.failed_equation].offending_text()

    def require(self):
        if not self.holds:
            raise ResidualNotInIdeal(
                f"residual of equation {self.failed_equation} has monomial "
                f"{self.offending_text()} outside {self.ideal.to_text()}",
                equation=self.failed_equation, monomial=self.offending_text())
        return self


def residual_membership(residuals: Sequence[Jet], ideal: MonomialIdeal) -> FormalCheck:
    certs = []
    failed = None
    for k, r in enumerate(residuals):
        cert = contains_jet(ideal, r)
        certs.append(cert)
        if not cert.holds and failed is None:
            failed = k
    return FormalCheck(ideal, list(residuals), certs, failed)


def formal_solution_check(sys: PolySystem, y_assign: Sequence[Jet], F_filt: Filtration,
                          N: int) -> FormalCheck:
    """Certify that F(x, y_assign) lies in the N-th ideal of the filtration."""
    if N > F_filt.j_max:
        raise InputError(f"filtration materialized to {F_filt.j_max}, asked for {N}")
    return residual_membership(evaluate(sys, y_assign), F_filt.ideal_at(N))


# -- quotient unfolding -------------------------------------------------------------

def _fresh_names(ctx: VarContext, r: int, s: int) -> list[str]:
    taken = set(ctx.all_names)
    prefix = "z"
    while True:
        if s == 1:
            names = [f"{prefix}{a + 1}" for a in range(r)]
        else:
            names = [f"{prefix}{a + 1}_{i + 1}" for a in range(r) for i in range(s)]
        if not taken & set(names):
            return names
        prefix += "z"


@dataclass
class Unfolding:
    original: PolySystem
    system: PolySystem
    z_names: list = field(default_factory=list)

    def project(self, solution: Sequence[Jet]) -> list[Jet]:
        return list(solution[:self.original.n])

    def residual_certificates(self, solution: Sequence[Jet]) -> list[MembershipCertificate]:
        """Certificates that F(x, y*) lies in the quotient ideal."""
        y = self.project(solution)
        raw = evaluate(self.original, y, reduce=False)
        return [contains_jet(self.original.quotient, r) for r in raw]


def quotient_unfold(sys: PolySystem) -> Unfolding:
    """Trade the quotient J = (q_1..q_r) for new unknowns: F_i - sum_a q_a z_{a,i}."""
    J = sys.quotient
    if J is None or J.is_zero():
        raise NoQuotient("the system has no quotient ideal to unfold")
    r, s = len(J.gens), sys.s
    names = _fresh_names(sys.ctx, r, s)
    ctx = sys.ctx.with_y(sys.ctx.y_vars + tuple(names))
    sp = ctx.full_space
    pad = (0,) * len(sp.params)
    eqs = []
    for i, eq in enumerate(sys.equations):
        acc = embed(eq, sp)
        for a, q in enumerate(J.gens):
            zname = names[a] if s == 1 else names[a * s + i]
            mono = list(q + (0,) * len(ctx.y_vars) + pad)
            mono[sp.index(zname)] = 1
            qz = Jet.monomial(sp, tuple(mono))
            top = max(acc.order, qz.order)
            acc = acc.at_order(top) - qz.at_order(top)
        eqs.append(acc)
    return Unfolding(sys, PolySystem(ctx, eqs, None), names)


def describe_monomial(space: Space, mono) -> str:
    return format_monomial(space, mono) or "1"

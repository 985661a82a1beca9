"""Lifting approximate solutions to exact ones with the adjugate substitution.

For a system F(x, y) = 0 and a start y0 whose residual lies in an ideal a
contained in h^2 * m, put h = det(J J^T), M = J^T adj(J J^T) and look for
the correction in the form dy = h * M * z.  Because J M = h Id the equation
F(y0 + dy) = 0 becomes, after dividing by h^2,

    z = -c - Q(z),    c = F(y0) / h^2,
    Q(z) = sum over |k| >= 2 of h^(|k|-2) * F^(k)(y0) * (M z)^k / k!,

a contraction in the m-adic topology solved by fixed-point iteration.  F is a
polynomial in y, so the Taylor sum is finite and exact.  The only series
division is the one producing c, done generator by generator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as _cartesian
from typing import Sequence

from .errors import (CertificateInvalid, ContractionViolated, HDegeneratesAlongT, HZero,
                     InputError, InsufficientOrder, NoConvergence, NotDivisible,
                     OrderBudgetExceeded, PrefixNotApproximate, ResidualNotInIdeal)
from .ideal import Filtration, MonomialIdeal, contains_jet, weak_fg_check
from .jet import Jet, common_order, divide_exact, substitute
from .system import (PolySystem, embed, evaluate, identity, jacobian_matrix, jacobian_y,
                     mat_mul, mat_vec, matrices_equal, quotient_unfold,
                     residual_membership)


@dataclass
class LiftRequest:
    sys: PolySystem
    y_start: list
    residual_ideal: MonomialIdeal
    target_order: int

    def __post_init__(self):
        self.y_start = list(self.y_start)
        if self.target_order < 0:
            raise InputError("target order must be non-negative")
        if self.residual_ideal.vars != self.sys.ctx.x_vars:
            raise InputError("residual ideal must live in the x variables")


@dataclass
class LiftResult:
    sys: PolySystem
    y_start: list
    y_solution: list
    delta_y: list
    h: Jet
    ord_h: int
    working_order: int
    target_order: int
    z_trace: list
    residual_check: object              # FormalCheck of F(y_start) in the ideal
    correction_ideal: MonomialIdeal
    correction_certificates: list
    residual_after: list                # F(y_solution), all zero
    quotient_certificates: list = field(default_factory=list)
    unfolded: object = None

    @property
    def iterations(self) -> int:
        return len(self.z_trace)

    def verify(self) -> bool:
        """Recheck every claim from the stored jets alone."""
        N = self.target_order
        fresh = evaluate(self.sys, self.y_solution)
        if any(not r.at_order(min(r.order, N)).is_zero() for r in fresh):
            return False
        for y0, y, d in zip(self.y_start, self.y_solution, self.delta_y):
            if (y - y0.at_order(N)).terms != d.terms:
                return False
        if not all(c.verify() and c.ideal == self.correction_ideal
                   for c in self.correction_certificates):
            return False
        if not all(c.verify() for c in self.residual_check.certificates):
            return False
        return all(c.verify() for c in self.quotient_certificates)


# -- helpers ------------------------------------------------------------------------

def _monomial_gcd(h: Jet) -> tuple:
    nv = len(h.space.vars)
    exps = [m[:nv] for m in h.terms]
    return tuple(min(col) for col in zip(*exps))


def _unit_part_check(h: Jet) -> tuple:
    """Return the x-monomial g with h = g * unit, or raise.

    The unit must have a nonzero rational constant term; when parameters are
    present a constant term depending on them means h degenerates for some
    parameter values.
    """
    sp = h.space
    nv = len(sp.vars)
    g = _monomial_gcd(h)
    e = sum(g)
    low = h.lowest_form()
    if e != h.ord() or any(m[:nv] != g for m in low):
        raise ResidualNotInIdeal(
            "h is not a monomial times a unit, so no monomial ideal lies in (h^2)",
            h=h.to_expr())
    if any(any(m[nv:]) for m in low):
        raise HDegeneratesAlongT(
            "the leading coefficient of h depends on the parameter",
            h=h.to_expr())
    return g


def _multi_indices(n: int, lo: int, hi: int):
    for k in _cartesian(range(hi + 1), repeat=n):
        if lo <= sum(k) <= hi:
            yield k


def _taylor_coefficients(sys: PolySystem, y0: Sequence[Jet], order: int):
    """F^(k)(y0) / k! for every multi-index k with |k| >= 2, at ``order``."""
    target = y0[0].space
    names = sys.ctx.y_vars
    assign = dict(zip(names, y0))
    out = []
    d = sys.y_degree()
    for i, eq in enumerate(sys.equations):
        row = []
        for k in _multi_indices(sys.n, 2, d):
            p = eq
            fact = 1
            for name, kk in zip(names, k):
                for _ in range(kk):
                    p = p.partial(name)
                fact *= math.factorial(kk)
            if p.is_zero():
                continue
            val = substitute(p, assign, target).at_order(order) * Fraction(1, fact)
            if not val.is_zero():
                row.append((k, val))
        out.append(row)
    return out


def _as_order(jets, order, what):
    try:
        return [j.at_order(order) for j in jets]
    except InsufficientOrder as exc:
        raise OrderBudgetExceeded(
            f"{what} known to order {exc.detail.get('have')}, the lift needs {order}",
            have=exc.detail.get("have"), need=order) from None


def _start_space(sys: PolySystem, y_start):
    if len(y_start) != sys.n:
        raise InputError(f"expected {sys.n} starting jets, got {len(y_start)}")
    return y_start[0].space if y_start else sys.ctx.x_space


# -- the core fixed-point solve -----------------------------------------------------

def _solve(sys: PolySystem, y0: list, ideal: MonomialIdeal, N: int,
           h: Jet, M: list):
    """Run the iteration for given (h, M) with J M = h Id.  y0, h, M at order N + 2e."""
    sp = h.space
    e = h.ord()
    W = N + 2 * e
    g = _unit_part_check(h) if not ideal.is_zero() else _monomial_gcd(h)

    residuals = evaluate(sys, y0)
    check = residual_membership([r.at_order(W) for r in residuals], ideal)
    check.require()

    # c_q = q / h^2 for each generator, then c_i = sum_q a_{i,q} c_q
    h2 = h * h
    cq = []
    for q in ideal.generator_jets(sp, W):
        try:
            cq.append(divide_exact(q, h2, N))
        except NotDivisible as exc:
            raise ResidualNotInIdeal(
                f"generator {q.to_expr()} of the residual ideal is not divisible by h^2",
                degree=exc.degree) from None
    c = []
    for cert in check.certificates:
        acc = Jet.zero(sp, N)
        for a, cqq in zip(cert.cofactors, cq):
            acc = acc + a.at_order(N) * cqq
        c.append(acc)

    hN = h.at_order(N)
    MN = [[m.at_order(N) for m in row] for row in M]
    taylor = _taylor_coefficients(sys, [y.at_order(N) for y in y0], N)
    # fold h^(|k|-2) into the coefficients once
    hpow = {0: Jet.constant(sp, 1, N)}
    for row in taylor:
        for k, _ in row:
            d = sum(k) - 2
            if d not in hpow:
                hpow[d] = hN ** d
    taylor = [[(k, v * hpow[sum(k) - 2]) for k, v in row] for row in taylor]

    def Q(z):
        w = mat_vec(MN, z)
        out = []
        for row in taylor:
            acc = Jet.zero(sp, N)
            for k, coef in row:
                term = coef
                for wi, ki in zip(w, k):
                    if ki:
                        term = term * wi ** ki
                acc = acc + term
            out.append(acc)
        return out

    z = [-ci for ci in c]
    trace = [z]
    for _ in range(N + 2):
        nxt = [-(ci + qi) for ci, qi in zip(c, Q(z))]
        if all(a.terms == b.terms for a, b in zip(nxt, z)):
            break
        z = nxt
        trace.append(z)
    else:
        raise NoConvergence(f"no fixed point after {N + 2} iterations")

    dy = [hN * wi for wi in mat_vec(MN, z)]
    y_sol = [y.at_order(N) + d for y, d in zip(y0, dy)]

    after = evaluate(sys, y_sol)
    if any(not r.is_zero() for r in after):
        raise CertificateInvalid("independent residual re-evaluation is not zero")

    corr = MonomialIdeal(ideal.vars, [tuple(a - 2 * b for a, b in zip(q, g))
                                      for q in ideal.gens]) if not ideal.is_zero() \
        else MonomialIdeal.zero(ideal.vars)
    certs = [contains_jet(corr, d) for d in dy]
    if not all(ct.holds for ct in certs):
        raise CertificateInvalid("correction escaped the predicted ideal")
    return dict(y_solution=y_sol, delta_y=dy, z_trace=trace, residual_check=check,
                correction_ideal=corr, correction_certificates=certs,
                residual_after=after)


def _prepare(req: LiftRequest):
    """Resolve the quotient, working order and (h, M) data for a request."""
    sys, y_start = req.sys, list(req.y_start)
    unfolding = None
    if sys.quotient is not None and not sys.quotient.is_zero():
        unfolding = quotient_unfold(sys)
        sp = _start_space(sys, y_start)
        y_start = y_start + [Jet.zero(sp, y_start[0].order if y_start else 0, True)
                             for _ in unfolding.z_names]
        sys = unfolding.system
    _start_space(sys, y_start)
    return sys, y_start, unfolding


def _h_order(sys, y_start):
    """ord(h) from the start, at whatever order the start is known."""
    data = jacobian_y(sys, y_start)
    if data.h.is_zero():
        if common_order(y_start) is None or sys.h_vanishes_identically:
            raise HZero("h = det(J J^T) vanishes" +
                        (" (more equations than unknowns)" if sys.h_vanishes_identically else ""))
        raise OrderBudgetExceeded(
            f"h vanishes to the supplied order {data.order}; supply the start to higher order")
    return data.h.ord()


def _contraction(ideal: MonomialIdeal, e: int):
    for q in ideal.gens:
        if sum(q) < 2 * e + 1:
            raise ContractionViolated(
                f"generator of degree {sum(q)} but ord(h) = {e} needs degree >= {2 * e + 1}",
                degree=sum(q), ord_h=e)


def _finish(req, sys, y_start_w, unfolding, h, e, W, parts) -> LiftResult:
    qcerts = []
    y_sol, dy = parts["y_solution"], parts["delta_y"]
    ystart = y_start_w
    corr_certs = parts["correction_certificates"]
    if unfolding is not None:
        qcerts = unfolding.residual_certificates(y_sol)
        if not all(c.holds for c in qcerts):
            raise CertificateInvalid("projected solution does not solve the quotient system")
        n = req.sys.n
        y_sol, dy, ystart = y_sol[:n], dy[:n], y_start_w[:n]
        corr_certs = corr_certs[:n]
    return LiftResult(
        sys=req.sys, y_start=ystart, y_solution=y_sol, delta_y=dy, h=h, ord_h=e,
        working_order=W, target_order=req.target_order, z_trace=parts["z_trace"],
        residual_check=parts["residual_check"], correction_ideal=parts["correction_ideal"],
        correction_certificates=corr_certs, residual_after=evaluate(req.sys, y_sol),
        quotient_certificates=qcerts, unfolded=unfolding)


def tougeron_step(req: LiftRequest) -> LiftResult:
    """Lift ``req.y_start`` to an exact solution at ``req.target_order``."""
    sys, y_start, unfolding = _prepare(req)
    N, ideal = req.target_order, req.residual_ideal
    if ideal.is_unit():
        raise ContractionViolated("the residual ideal is the unit ideal")
    e = _h_order(sys, y_start)
    _contraction(ideal, e)
    W = N + 2 * e
    y0 = _as_order(y_start, W, "starting jets")
    data = jacobian_y(sys, y0, W)
    if data.h.ord() != e:
        raise OrderBudgetExceeded("ord(h) changed when the start was raised to the working order")
    parts = _solve(sys, y0, ideal, N, data.h, data.M)
    return _finish(req, sys, y0, unfolding, data.h, e, W, parts)


def ann_coker_step(req: LiftRequest, h_tilde: Jet, B: list) -> LiftResult:
    """Same lift with a user certificate J B = h_tilde Id in place of (h, M)."""
    if req.sys.quotient is not None and not req.sys.quotient.is_zero():
        raise InputError("an explicit certificate cannot be combined with a quotient ideal")
    sys, y_start = req.sys, list(req.y_start)
    N, ideal = req.target_order, req.residual_ideal
    if len(B) != sys.n or any(len(row) != sys.s for row in B):
        raise InputError(f"B must be {sys.n} x {sys.s}")
    if h_tilde.is_zero():
        raise HZero("the supplied h~ is zero")
    if ideal.is_unit():
        raise ContractionViolated("the residual ideal is the unit ideal")
    e = h_tilde.ord()
    _contraction(ideal, e)
    W = N + 2 * e
    y0 = _as_order(y_start, W, "starting jets")
    ht = _as_order([h_tilde], W, "h~")[0]
    Bw = [_as_order(row, W, "B") for row in B]
    J, _ = jacobian_matrix(sys, y0, W)
    if not matrices_equal(mat_mul(J, Bw), identity(ht.space, sys.s, W, ht)):
        raise CertificateInvalid("J * B differs from h~ * Id at the working order")
    parts = _solve(sys, y0, ideal, N, ht, Bw)
    return _finish(req, sys, y0, None, ht, e, W, parts)


# -- general filtrations --------------------------------------------------------------

@dataclass
class GeneralLiftResult:
    lift: LiftResult
    fg_certificate: object
    prefix: list
    prefix_check: object
    shifted: PolySystem
    shift_names: list
    shift_solution: list
    approx_ideal: MonomialIdeal
    approx_certificates: list

    @property
    def y_solution(self):
        return self.lift.y_solution

    def verify(self) -> bool:
        if not self.lift.verify() or not self.fg_certificate.verify():
            return False
        if not all(c.verify() for c in self.approx_certificates):
            return False
        N = self.lift.target_order
        res = evaluate(self.shifted, [w.at_order(N) for w in self.shift_solution])
        return all(r.is_zero() for r in res)


def shifted_system(sys: PolySystem, prefix: Sequence[Jet], q_set: Sequence[tuple]):
    """G(w) = F(x, prefix + sum_a q_a w_a), one block of n unknowns per q_a."""
    if any(not p.exact for p in prefix):
        raise InputError("the prefix must be a polynomial")
    ctx = sys.ctx
    taken = set(ctx.all_names)
    stem = "w"
    while True:
        names = [f"{stem}{a + 1}_{k + 1}" for a in range(len(q_set)) for k in range(sys.n)]
        if not taken & set(names):
            break
        stem += "w"
    new_ctx = ctx.with_y(tuple(names))
    sp = new_ctx.full_space
    pad = (0,) * (len(names) + len(sp.params))
    images = {}
    for k, yname in enumerate(ctx.y_vars):
        acc = embed(prefix[k], sp)
        for a, q in enumerate(q_set):
            mono = list(q + pad)
            mono[sp.index(names[a * sys.n + k])] = 1
            term = Jet.monomial(sp, tuple(mono))
            top = max(acc.order, term.order)
            acc = acc.at_order(top) + term.at_order(top)
        images[yname] = acc
    eqs = [substitute(eq, images, sp) for eq in sys.equations]
    return PolySystem(new_ctx, eqs, sys.quotient), names


def lift_general_filtration(sys: PolySystem, formal_prefix: Sequence[Jet], A: Filtration,
                            N: int, oracle_order: int) -> GeneralLiftResult:
    """Approximate for an arbitrary monomial filtration by reduction to the m-adic lift.

    The prefix must solve the system modulo A_{N+1}; the result is a true
    solution y (at ``oracle_order``) with y - prefix in A_{N+1}, written as
    sum_a q_a w_a over the generators q_a of A_{N+1}, and w solves the
    shifted system G.
    """
    fg = weak_fg_check(A, N + 1)
    deep = A.ideal_at(N + 1)
    prefix = list(formal_prefix)
    _start_space(sys, prefix)
    check = residual_membership(evaluate(sys, prefix), deep)
    if not check.holds:
        raise PrefixNotApproximate(
            f"prefix residual has monomial {check.offending_text()} outside A_{N + 1} = "
            f"{deep.to_text()}", equation=check.failed_equation)
    shifted, names = shifted_system(sys, prefix, fg.q_set)

    y_start = [p.at_order(max(p.order, oracle_order)) for p in prefix]
    _h_order(sys, y_start)    # refuses early when h vanishes
    if deep.is_zero():
        ideal = deep
    else:
        data = jacobian_y(sys, y_start)
        g = _monomial_gcd(data.h)
        ideal = MonomialIdeal(deep.vars, [tuple(a + 2 * b for a, b in zip(q, g))
                                          for q in deep.gens])
    if not residual_membership(evaluate(sys, y_start), ideal).holds:
        raise PrefixNotApproximate(
            f"prefix residual is not inside mono(h)^2 * A_{N + 1} = {ideal.to_text()}")
    lift = tougeron_step(LiftRequest(sys, y_start, ideal, oracle_order))

    certs = [contains_jet(deep, d) for d in lift.delta_y]
    if not all(c.holds for c in certs):
        raise CertificateInvalid("correction is not inside A_{N+1}")
    sol_sp = shifted.ctx.x_space
    w = []
    for a in range(len(fg.q_set)):
        for k in range(sys.n):
            # cofactor of generator a in the k-th correction
            w.append(embed(certs[k].cofactors[a], sol_sp) if certs[k].cofactors
                     else Jet.zero(sol_sp, oracle_order))
    return GeneralLiftResult(lift, fg, prefix, check, shifted, names, w, deep, certs)

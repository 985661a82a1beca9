"""Families of solutions y(x, t), polynomial in a parameter t.

A family connects y(x, 0) and y(x, 1); it is an homotopy for an ideal I when
every member solves the system and y(x, t) - y(x, 0) lies in I for every t.
Since t has degree zero in the jet spaces, "for every t" is checked on each
t-coefficient, and membership in I ignores t altogether.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import ContextMismatch, InputError
from .expr import VarContext
from .ideal import MonomialIdeal, contains_jet, support_ideal
from .jet import Jet, Space, substitute
from .lift import LiftRequest, LiftResult, tougeron_step
from .system import PolySystem, embed, evaluate


@dataclass
class SolutionFamily:
    ctx: VarContext
    family: list
    ideal: MonomialIdeal

    def __post_init__(self):
        self.family = list(self.family)
        if self.ctx.t_var is None:
            raise InputError("a solution family needs a parameter t")
        sp = self.ctx.x_space
        for f in self.family:
            if f.space != sp:
                raise ContextMismatch(f"family member lives in {f.space}, expected {sp}")
        if self.ideal.vars != self.ctx.x_vars:
            raise ContextMismatch("family ideal must live in the x variables")

    @property
    def t(self) -> str:
        return self.ctx.t_var

    def at(self, value) -> list[Jet]:
        """Specialize t to a rational value; the result lives in the x space."""
        return [specialize(f, self.t, value) for f in self.family]

    def t_degree(self) -> int:
        k = self.ctx.x_space.index(self.t)
        return max((m[k] for f in self.family for m in f.terms), default=0)


def specialize(p: Jet, t: str, value) -> Jet:
    sp = p.space
    target = Space(sp.vars, tuple(n for n in sp.params if n != t))
    return substitute(p, {t: Jet.constant(target, value, 0)}, target)


@dataclass
class CheckOutcome:
    name: str
    passed: bool
    witness: str | None = None
    certificates: list = field(default_factory=list)


@dataclass
class HomotopyReport:
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckOutcome:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _first_term(p: Jet) -> str:
    (m, c), = p.sorted_terms()[:1]
    return Jet(p.space, {m: c}, p.order).to_expr()


def verify_homotopy(sys: PolySystem, fam: SolutionFamily, y0: Sequence[Jet],
                    y1: Sequence[Jet]) -> HomotopyReport:
    """Check endpoints, vanishing identically in t, and membership of y(t) - y0."""
    if len(fam.family) != sys.n or len(y0) != sys.n or len(y1) != sys.n:
        raise ContextMismatch("family and endpoints must have one jet per unknown")
    if sys.ctx.x_vars != fam.ctx.x_vars or sys.ctx.y_vars != fam.ctx.y_vars:
        raise ContextMismatch("family and system use different variables")
    tsys = sys.with_t(fam.t)
    checks = []

    bad = None
    for label, value, ends in (("t=0", 0, y0), ("t=1", 1, y1)):
        for k, (f, e) in enumerate(zip(fam.at(value), ends)):
            if f.space != e.space:
                raise ContextMismatch(f"endpoint lives in {e.space}, expected {f.space}")
            if not f.same_value(e) and bad is None:
                diff = f.at_order(min(f.order, e.order)) - e.at_order(min(f.order, e.order))
                bad = f"{label}, {sys.ctx.y_vars[k]}: differs by {_first_term(diff)}"
    checks.append(CheckOutcome("endpoints", bad is None, bad))

    bad = None
    residuals = evaluate(tsys, fam.family)
    for k, r in enumerate(residuals):
        if not r.is_zero() and bad is None:
            bad = f"equation {k}: residual term {_first_term(r)}"
    checks.append(CheckOutcome("solves", bad is None, bad, residuals))

    bad = None
    certs = []
    sp = fam.ctx.x_space
    for k, (f, e) in enumerate(zip(fam.family, y0)):
        e_t = embed(e, sp)
        n = min(f.order, e_t.order)
        cert = contains_jet(fam.ideal, f.at_order(n) - e_t.at_order(n))
        certs.append(cert)
        if not cert.holds and bad is None:
            bad = f"{sys.ctx.y_vars[k]}: monomial {cert.offending_text()} outside {fam.ideal.to_text()}"
    checks.append(CheckOutcome("membership", bad is None, bad, certs))
    return HomotopyReport(checks)


@dataclass
class ParametricLift:
    family: SolutionFamily
    lift: LiftResult


def parametric_lift(req: LiftRequest, family_start: SolutionFamily) -> ParametricLift:
    """Run the lift over jets in (x; t), so the result solves the system for every t.

    The returned family's ideal is the correction ideal plus whatever the
    start itself varies by in t, so it is an homotopy between its endpoints.
    """
    t = family_start.t
    sys = req.sys.with_t(t)
    if sys.ctx.y_vars != family_start.ctx.y_vars or sys.ctx.x_vars != family_start.ctx.x_vars:
        raise ContextMismatch("start family and system use different variables")
    lift = tougeron_step(LiftRequest(sys, family_start.family, req.residual_ideal,
                                     req.target_order))
    sp = family_start.ctx.x_space
    start0 = [embed(y, sp) for y in family_start.at(0)]
    drift = MonomialIdeal.zero(req.residual_ideal.vars)
    for y, y_0 in zip(family_start.family, start0):
        n = min(y.order, y_0.order)
        drift = drift + support_ideal(y.at_order(n) - y_0.at_order(n))
    ideal = lift.correction_ideal + drift
    return ParametricLift(SolutionFamily(family_start.ctx, lift.y_solution, ideal), lift)

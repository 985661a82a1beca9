"""Problem files, task dispatch, report payloads and report verification.

A problem file is JSON::

    {"version": 1, "task": "lift",
     "variables": {"x": ["x"], "y": ["y"], "t": null},
     "equations": ["y^2 - 1 - x"], "quotient": null,
     "params": {"start": ["1"], "residual_ideal": "x", "order": 16}}

All mathematical payloads are strings in the expression grammar; rationals
in reports are written "p/q".  Jets may be given as plain polynomials or in
the ``expr ; order: N`` form.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
from fractions import Fraction

import numpy as np

from . import borel
from .errors import (CertificateMismatch, FiltapError, FlatBoundFailed, ProblemFileError,
                     Refusal)
from .expr import (VarContext, parse_filtration, parse_jet, parse_monomial_ideal,
                   parse_polynomial)
from .homotopy import SolutionFamily, parametric_lift, verify_homotopy
from .ideal import MembershipCertificate, MonomialIdeal, filtrations_cofinal, weak_fg_check
from .jet import Jet
from .lift import (LiftRequest, _monomial_gcd, ann_coker_step, lift_general_filtration,
                   tougeron_step)
from .system import (PolySystem, evaluate, formal_solution_check, identity,
                     jacobian_matrix, jacobian_y, mat_mul, matrices_equal)

VERSION = 1
TASKS = ("lift", "lift_general", "check_formal", "homotopy_verify", "borel_demo",
         "weak_fg", "cofinal")


# -- problem loading ---------------------------------------------------------------

class Problem:
    def __init__(self, data: dict, digest: str, path: str | None = None):
        if not isinstance(data, dict):
            raise ProblemFileError("problem file must hold a JSON object")
        if data.get("version") != VERSION:
            raise ProblemFileError(f"unsupported problem version {data.get('version')!r}")
        self.task = data.get("task")
        if self.task not in TASKS:
            raise ProblemFileError(f"unknown task {self.task!r}; expected one of {', '.join(TASKS)}")
        self.data = data
        self.digest = digest
        self.path = path
        self.params = data.get("params", {})
        if not isinstance(self.params, dict):
            raise ProblemFileError("params must be an object")
        v = data.get("variables", {})
        self.ctx = VarContext(tuple(v.get("x", ())), tuple(v.get("y", ())), v.get("t"))

    @classmethod
    def load(cls, path) -> "Problem":
        try:
            with open(path, "rb") as fh:
                raw = fh.read()
        except OSError as exc:
            raise ProblemFileError(f"cannot read {path}: {exc.strerror}") from None
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ProblemFileError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
        return cls(data, hashlib.sha256(raw).hexdigest(), str(path))

    def param(self, key, default=...):
        if key in self.params:
            return self.params[key]
        if default is ...:
            raise ProblemFileError(f"task {self.task} needs parameter {key!r}")
        return default

    def system(self) -> PolySystem:
        eqs = self.data.get("equations")
        if not eqs:
            raise ProblemFileError("the problem has no equations")
        return PolySystem.from_text(self.ctx, eqs, self.data.get("quotient"))

    def jets(self, texts, order=None, space=None) -> list[Jet]:
        space = space or self.ctx.x_space
        return [read_jet(t, space, order) for t in texts]

    def ideal(self, key) -> MonomialIdeal:
        return parse_monomial_ideal(self.param(key), self.ctx.x_space)

    def filtration(self, key="filtration"):
        rule = self.params.get(key, self.data.get(key))
        if rule is None:
            raise ProblemFileError(f"task {self.task} needs a {key!r}")
        return parse_filtration(rule, self.ctx.x_space, int(self.param("j_max", 8)))


def read_jet(text: str, space, order=None) -> Jet:
    if ";" in text:
        return parse_jet(text, space)
    return parse_polynomial(text, space, order)


def rational(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def jet_texts(jets) -> list[str]:
    return [j.to_text() for j in jets]


def cert_payload(cert: MembershipCertificate) -> dict:
    return {"ideal": cert.ideal.to_text(), "jet": cert.jet.to_text(),
            "holds": cert.holds, "cofactors": jet_texts(cert.cofactors),
            "offending": cert.offending_text()}


# -- running -------------------------------------------------------------------------

def run_problem(problem: Problem, order: int | None = None, trace: bool = False,
                seed: int | None = None, out_dir: str | None = None,
                stem: str = "report") -> dict:
    """Run the problem's task; returns the report dict (never raises FiltapError)."""
    report = {"version": VERSION, "task": problem.task, "problem_sha256": problem.digest}
    if order is not None:
        report["order_override"] = order
    if seed is not None:
        report["seed"] = seed
    try:
        handler = _RUNNERS[problem.task]
        result = handler(problem, order=order, trace=trace, seed=seed,
                         out_dir=out_dir, stem=stem)
        report["status"] = "ok"
        report["result"] = result
    except Refusal as exc:
        report.update(status="refused", reason=exc.reason, message=str(exc),
                      detail=_plain(exc.detail))
    except FiltapError as exc:
        report.update(status="error", reason=exc.reason, message=str(exc),
                      detail=_plain(exc.detail))
    return report


def _plain(detail: dict) -> dict:
    out = {}
    for k, v in detail.items():
        if isinstance(v, Fraction):
            v = rational(v)
        elif isinstance(v, float) and not math.isfinite(v):
            v = str(v)
        out[k] = v
    return out


def _order(problem, override, key="order"):
    return int(override) if override is not None else int(problem.param(key))


def _lift_payload(res, trace) -> dict:
    out = {
        "solution": jet_texts(res.y_solution),
        "delta_y": jet_texts(res.delta_y),
        "h": res.h.to_text(),
        "ord_h": res.ord_h,
        "working_order": res.working_order,
        "target_order": res.target_order,
        "iterations": res.iterations,
        "residual_ideal": res.residual_check.ideal.to_text(),
        "residual_certificates": [cert_payload(c) for c in res.residual_check.certificates],
        "correction_ideal": res.correction_ideal.to_text(),
        "correction_certificates": [cert_payload(c) for c in res.correction_certificates],
        "quotient_certificates": [cert_payload(c) for c in res.quotient_certificates],
    }
    if res.unfolded is not None:
        out["unfolded_equations"] = res.unfolded.system.to_texts()
        out["unfolded_unknowns"] = list(res.unfolded.system.ctx.y_vars)
    if trace:
        out["trace"] = [jet_texts(z) for z in res.z_trace]
    return out


def _lift_inputs(problem, order):
    sys = problem.system()
    N = _order(problem, order)
    start = problem.jets(problem.param("start"))
    ideal = problem.ideal("residual_ideal")
    return sys, start, ideal, N


def run_lift(problem, order=None, trace=False, **_):
    sys, start, ideal, N = _lift_inputs(problem, order)
    req = LiftRequest(sys, start, ideal, N)
    if "h_tilde" in problem.params:
        sp = problem.ctx.x_space
        ht = read_jet(problem.param("h_tilde"), sp)
        B = [[read_jet(e, sp) for e in row] for row in problem.param("B")]
        res = ann_coker_step(req, ht, B)
        out = _lift_payload(res, trace)
        out["method"] = "certificate"
        return out
    if problem.ctx.t_var is not None:
        fam = SolutionFamily(problem.ctx, start, MonomialIdeal.zero(problem.ctx.x_vars))
        pl = parametric_lift(req, fam)
        out = _lift_payload(pl.lift, trace)
        rep = verify_homotopy(sys, pl.family, pl.family.at(0), pl.family.at(1))
        out["method"] = "parametric"
        out["family_ideal"] = pl.family.ideal.to_text()
        out["endpoints"] = {"t=0": jet_texts(pl.family.at(0)), "t=1": jet_texts(pl.family.at(1))}
        out["homotopy_checks"] = {c.name: c.passed for c in rep.checks}
        return out
    res = tougeron_step(req)
    out = _lift_payload(res, trace)
    out["method"] = "adjugate"
    return out


def run_lift_general(problem, order=None, trace=False, **_):
    sys = problem.system()
    A = problem.filtration()
    N = int(problem.param("N"))
    oracle = _order(problem, order)
    prefix = problem.jets(problem.param("start"))
    g = lift_general_filtration(sys, prefix, A, N, oracle)
    out = _lift_payload(g.lift, trace)
    out.update(
        method="general_filtration",
        filtration=str(A.rule),
        N=N,
        fg_certificate={"N": g.fg_certificate.N, "N_tilde": g.fg_certificate.N_tilde,
                        "q_set": MonomialIdeal(A.vars, g.fg_certificate.q_set).to_text()},
        approx_ideal=g.approx_ideal.to_text(),
        approx_certificates=[cert_payload(c) for c in g.approx_certificates],
        prefix_certificates=[cert_payload(c) for c in g.prefix_check.certificates],
        shifted_unknowns=list(g.shift_names),
        shifted_solution=jet_texts(g.shift_solution),
    )
    return out


def run_check_formal(problem, order=None, **_):
    sys = problem.system()
    F = problem.filtration()
    N = int(problem.param("N"))
    y = problem.jets(problem.param("start"), order)
    chk = formal_solution_check(sys, y, F, N)
    out = {"ideal": chk.ideal.to_text(), "holds": chk.holds,
           "certificates": [cert_payload(c) for c in chk.certificates]}
    if not chk.holds:
        chk.require()
    return out


def _homotopy_inputs(problem, order):
    if problem.ctx.t_var is None:
        raise ProblemFileError("homotopy_verify needs a parameter t in variables")
    sys = problem.system()
    N = order if order is not None else problem.params.get("order")
    fam = SolutionFamily(problem.ctx, problem.jets(problem.param("family"), N),
                         problem.ideal("ideal"))
    xs = problem.ctx.with_t(None).x_space
    y0 = problem.jets(problem.param("y0"), N, xs)
    y1 = problem.jets(problem.param("y1"), N, xs)
    return sys, fam, y0, y1


def run_homotopy(problem, order=None, **_):
    plain, fam, y0, y1 = _homotopy_inputs(problem, order)
    rep = verify_homotopy(plain, fam, y0, y1)
    out = {"passed": rep.passed,
           "checks": {c.name: {"passed": c.passed, "witness": c.witness} for c in rep.checks},
           "membership_certificates": [cert_payload(c) for c in rep.check("membership").certificates]}
    expect = problem.params.get("expect")
    if expect is not None:
        out["expected"] = expect
    return out


def run_weak_fg(problem, **_):
    F = problem.filtration()
    N = int(problem.param("N"))
    cert = weak_fg_check(F, N, int(problem.param("search_limit", 0)))
    return {"N": cert.N, "N_tilde": cert.N_tilde,
            "q_set": MonomialIdeal(F.vars, cert.q_set).to_text(),
            "ideal_N": cert.ideal_N.to_text(), "ideal_deep": cert.ideal_deep.to_text(),
            "filtration": str(F.rule)}


def run_cofinal(problem, **_):
    A = problem.filtration("filtration")
    B = problem.filtration("filtration_b")
    rng = int(problem.param("range"))
    table = filtrations_cofinal(A, B, rng)
    return {"forward": table.forward, "backward": table.backward,
            "equivalent": table.equivalent,
            "refusal": None if table.refusal is None
            else {"direction": table.refusal[0], "j": table.refusal[1]},
            "filtration": str(A.rule), "filtration_b": str(B.rule)}


def _num_fn(text):
    """Evaluate a one-variable polynomial text as a numpy function of x."""
    p = parse_polynomial(text, ["x"])
    coeffs = [(m[0], float(c)) for m, c in p.terms.items()]

    def fn(x):
        out = np.zeros_like(x)
        for e, c in coeffs:
            out = out + c * x ** e
        return out
    return fn


def run_borel(problem, seed=None, out_dir=None, stem="report", **_):
    out = {}
    files = {}
    if "cutoff" in problem.params:
        c = problem.params["cutoff"]
        spec = borel.CutoffSpec(tuple(c["Z"]), tuple(c["U"]), tuple(c["widths"]))
        grid = spec.default_grid(int(c.get("points", 4097))).jittered(seed)
        tau = borel.build_cutoff(spec, grid)
        rep = borel.check_derivative_bounds(tau, spec, int(c.get("k_max", len(spec.widths))))
        x = tau.x
        inside_Z = (x >= spec.Z[0]) & (x <= spec.Z[1])
        outside_U = (x <= spec.U[0]) | (x >= spec.U[1])
        out["cutoff"] = {
            "constant": borel.HORMANDER_C, "tolerance": borel.RATIO_TOLERANCE,
            "rows": [{"k": r.k, "max_abs": r.max_abs, "ratio": r.ratio, "passed": r.passed}
                     for r in rep.rows],
            "passed": rep.passed,
            "one_on_Z": bool(np.all(tau.values[inside_Z] == 1.0)),
            "zero_off_U": bool(np.all(tau.values[outside_U] == 0.0)),
            "in_unit_interval": bool(np.all((tau.values >= 0) & (tau.values <= 1))),
        }
        files["cutoff"] = tau
    if "assemble" in problem.params:
        a = problem.params["assemble"]
        grid = borel.Grid1D(float(a["a"]), float(a["b"]), int(a["points"])).jittered(seed)
        gs = [borel.sample(_num_fn(t), grid) for t in a["functions"]]
        res = borel.assemble_borel(gs, tuple(a["Z"]), tuple(a["U"]), int(a.get("k_max", 1)))
        out["assemble"] = {
            "epsilons": res.epsilons,
            "terms": [{"j": t.j, "epsilon": t.epsilon, "bound": t.bound,
                       "widths": list(t.widths), "C_g": t.flat.constants()}
                      for t in res.terms],
            "fits": [{"N": f.N, "slope": f.slope, "K": f.K, "window": list(f.window),
                      "passed": f.passed} for f in res.fits],
            "plateau_points": res.plateau_points,
            "plateau_exact": res.plateau_exact,
            "passed": res.passed,
        }
        files["f"] = res.f
    if not out:
        raise ProblemFileError("borel_demo needs a 'cutoff' or 'assemble' block")
    out["csv"] = {}
    if out_dir is not None:
        for name, sf in files.items():
            fname = f"{stem}.{name}.csv"
            sf.to_csv(os.path.join(out_dir, fname))
            out["csv"][name] = fname
    ok = all(v.get("passed", True) for v in out.values() if isinstance(v, dict) and "passed" in v)
    if not ok:
        raise FlatBoundFailed("numerical bounds failed on this grid")
    return out


_RUNNERS = {
    "lift": run_lift,
    "lift_general": run_lift_general,
    "check_formal": run_check_formal,
    "homotopy_verify": run_homotopy,
    "borel_demo": run_borel,
    "weak_fg": run_weak_fg,
    "cofinal": run_cofinal,
}


# -- verification ------------------------------------------------------------------------

def _need(cond, what):
    if not cond:
        raise CertificateMismatch(what)


def _check_cert(payload: dict, space, expected: Jet | None, label: str) -> MembershipCertificate:
    ideal = parse_monomial_ideal(payload["ideal"], space)
    jet = parse_jet(payload["jet"], space)
    cofs = tuple(parse_jet(c, space) for c in payload["cofactors"])
    cert = MembershipCertificate(ideal, jet, True, cofs)
    _need(cert.verify(), f"{label}: cofactors do not recombine to the certified jet")
    if expected is not None:
        n = min(expected.order, jet.order)
        _need(expected.at_order(n).terms == jet.at_order(n).terms and jet.order >= n,
              f"{label}: certified jet differs from the recomputed one")
    return cert


def verify_report(report: dict, problem: Problem, report_dir: str | None = None) -> None:
    """Raise CertificateMismatch on the first failing identity; ProblemFileError on a pair mismatch."""
    if report.get("problem_sha256") != problem.digest:
        raise ProblemFileError("report was produced from a different problem file")
    if report.get("task") != problem.task:
        raise ProblemFileError("report task differs from the problem task")
    status = report.get("status")
    order = report.get("order_override")
    seed = report.get("seed")
    if status != "ok":
        # refusals carry no certificate; re-derive the outcome instead
        again = run_problem(problem, order=order, seed=seed)
        _need(again.get("status") == status and again.get("reason") == report.get("reason"),
              f"recorded outcome {status}/{report.get('reason')} is not reproduced")
        return
    result = report["result"]
    _VERIFIERS[problem.task](problem, result, order, seed, report_dir)


def _verify_lift(problem, res, order, seed, report_dir):
    sys, start, ideal, N = _lift_inputs(problem, order)
    space = problem.ctx.x_space
    sol = [parse_jet(t, space) for t in res["solution"]]
    _need(len(sol) == sys.n, "solution has the wrong number of components")
    _need(all(s.order >= N for s in sol), "solution is not known to the target order")
    sol = [s.at_order(N) for s in sol]
    for k, r in enumerate(evaluate(sys, sol)):
        _need(r.at_order(N).is_zero(), f"residual of equation {k} is not zero at order {N}")
    delta = [s - y.at_order(N) for s, y in zip(sol, start)]
    for k, (d, t) in enumerate(zip(delta, res["delta_y"])):
        _need(parse_jet(t, space).terms == d.terms, f"delta_y[{k}] does not match solution - start")
    corr = parse_monomial_ideal(res["correction_ideal"], space)
    for k, (d, p) in enumerate(zip(delta, res["correction_certificates"])):
        cert = _check_cert(p, space, d, f"correction certificate {k}")
        _need(cert.ideal == corr, f"correction certificate {k} uses another ideal")
    h = parse_jet(res["h"], space)
    W = res["working_order"]
    e = h.ord()
    _need(W == N + 2 * e, "working order is not target + 2 ord(h)")
    if res.get("method") == "certificate":
        ht = read_jet(problem.param("h_tilde"), space).at_order(W)
        B = [[read_jet(x, space).at_order(W) for x in row] for row in problem.param("B")]
        J, _ = jacobian_matrix(sys, [y.at_order(W) for y in start], W)
        _need(matrices_equal(mat_mul(J, B), identity(space, sys.s, W, ht)),
              "J * B differs from h~ * Id")
        _need(ht.terms == h.terms, "reported h differs from the supplied h~")
    elif sys.quotient is None:
        data = jacobian_y(sys, [y.at_order(W) for y in start], W)
        _need(data.h.terms == h.terms, "reported h differs from det(J J^T)")
    g = _monomial_gcd(h) if not h.is_zero() else None
    if g is not None:
        for q in ideal.gens:
            _need(corr.contains_monomial(tuple(a - 2 * b for a, b in zip(q, g))),
                  "h^2 times the correction ideal does not contain the residual ideal")
    if sys.quotient is None:
        # the start's residual lies in the residual ideal
        resid = evaluate(sys, [y.at_order(W) for y in start])
        for k, (r, p) in enumerate(zip(resid, res["residual_certificates"])):
            cert = _check_cert(p, space, r.at_order(W), f"residual certificate {k}")
            _need(cert.ideal == ideal, f"residual certificate {k} uses another ideal")
    else:
        # the unreduced residual of the solution lies in the quotient ideal
        raw = evaluate(sys, sol, reduce=False)
        for k, (r, p) in enumerate(zip(raw, res["quotient_certificates"])):
            cert = _check_cert(p, space, r, f"quotient certificate {k}")
            _need(cert.ideal == sys.quotient, f"quotient certificate {k} uses another ideal")
        _need(len(res["quotient_certificates"]) == sys.s, "missing quotient certificates")
    if res.get("method") == "parametric":
        fam = SolutionFamily(problem.ctx, sol, parse_monomial_ideal(res["family_ideal"], space))
        rep = verify_homotopy(sys, fam, fam.at(0), fam.at(1))
        _need(rep.passed, "the lifted family is not an homotopy for its ideal")


def _verify_lift_general(problem, res, order, seed, report_dir):
    sys = problem.system()
    A = problem.filtration()
    N = int(problem.param("N"))
    oracle = _order(problem, order)
    space = problem.ctx.x_space
    prefix = problem.jets(problem.param("start"))
    sol = [parse_jet(t, space).at_order(oracle) for t in res["solution"]]
    for k, r in enumerate(evaluate(sys, sol)):
        _need(r.is_zero(), f"residual of equation {k} is not zero")
    deep = A.ideal_at(N + 1)
    _need(parse_monomial_ideal(res["approx_ideal"], space) == deep, "approximation ideal is not A_{N+1}")
    for k, (s, p, pre) in enumerate(zip(sol, res["approx_certificates"], prefix)):
        cert = _check_cert(p, space, s - pre.at_order(oracle), f"approximation certificate {k}")
        _need(cert.ideal == deep, f"approximation certificate {k} uses another ideal")
    q = parse_monomial_ideal(res["fg_certificate"]["q_set"], space)
    _need(all(A.ideal_at(N + 1).contains_monomial(g) for g in q.gens), "q_set is not inside A_{N+1}")
    _need(q.contains(A.ideal_at(N + 1 + res["fg_certificate"]["N_tilde"])),
          "q_set does not generate the deeper ideal")
    for k, (r, p) in enumerate(zip(evaluate(sys, prefix), res["prefix_certificates"])):
        _check_cert(p, space, r, f"prefix certificate {k}")


def _verify_check_formal(problem, res, order, seed, report_dir):
    sys = problem.system()
    F = problem.filtration()
    N = int(problem.param("N"))
    y = problem.jets(problem.param("start"), order)
    ideal = F.ideal_at(N)
    space = problem.ctx.x_space
    for k, (r, p) in enumerate(zip(evaluate(sys, y), res["certificates"])):
        cert = _check_cert(p, space, r, f"certificate {k}")
        _need(cert.ideal == ideal, f"certificate {k} uses another ideal")


def _verify_homotopy(problem, res, order, seed, report_dir):
    plain, fam, y0, y1 = _homotopy_inputs(problem, order)
    rep = verify_homotopy(plain, fam, y0, y1)
    for c in rep.checks:
        _need(res["checks"][c.name]["passed"] == c.passed,
              f"homotopy check {c.name} does not reproduce")
    sp = problem.ctx.x_space
    for k, (p, c) in enumerate(zip(res["membership_certificates"],
                                   rep.check("membership").certificates)):
        if c.holds:
            _check_cert(p, sp, c.jet, f"membership certificate {k}")
    if "expected" in res:
        _need(res["expected"] == res["passed"], "outcome differs from the expected one")


def _verify_weak_fg(problem, res, order, seed, report_dir):
    F = problem.filtration()
    N = res["N"]
    _need(N == int(problem.param("N")), "index differs from the problem")
    q = parse_monomial_ideal(res["q_set"], problem.ctx.x_space)
    _need(all(F.ideal_at(N).contains_monomial(g) for g in q.gens), "q_set is not inside I_N")
    _need(q.contains(F.ideal_at(N + res["N_tilde"])), "q_set does not contain I_{N+N~}")


def _verify_cofinal(problem, res, order, seed, report_dir):
    A = problem.filtration("filtration")
    B = problem.filtration("filtration_b")
    for src, dst, table, name in ((A, B, res["forward"], "forward"),
                                  (B, A, res["backward"], "backward")):
        for j, d in enumerate(table):
            _need(dst.ideal_at(j).contains(src.ideal_at(d)), f"{name}[{j}] = {d} is not contained")
            _need(d == 0 or not dst.ideal_at(j).contains(src.ideal_at(d - 1)),
                  f"{name}[{j}] = {d} is not the least index")
    if res["refusal"] is not None:
        j = res["refusal"]["j"]
        src, dst = (A, B) if res["refusal"]["direction"] == "forward" else (B, A)
        _need(not any(dst.ideal_at(j).contains(src.ideal_at(d)) for d in range(src.j_max + 1)),
              "refusal is contradicted by a containment")


def _verify_borel(problem, res, order, seed, report_dir):
    if "cutoff" in res:
        c = problem.params["cutoff"]
        spec = borel.CutoffSpec(tuple(c["Z"]), tuple(c["U"]), tuple(c["widths"]))
        name = res["csv"].get("cutoff")
        if name is not None and report_dir is not None:
            tau = borel.SampledFunction.from_csv(os.path.join(report_dir, name))
        else:
            grid = spec.default_grid(int(c.get("points", 4097))).jittered(seed)
            tau = borel.build_cutoff(spec, grid)
        rep = borel.check_derivative_bounds(tau, spec, int(c.get("k_max", len(spec.widths))))
        _need(rep.passed, "cutoff derivative bounds fail on the recorded samples")
        for row, rec in zip(rep.rows, res["cutoff"]["rows"]):
            _need(abs(row.ratio - rec["ratio"]) <= 1e-9 * max(1.0, abs(rec["ratio"])),
                  f"derivative ratio for k={row.k} does not reproduce")
        _need(float(np.min(tau.values)) >= 0.0 and float(np.max(tau.values)) <= 1.0,
              "cutoff leaves [0, 1]")
    if "assemble" in res:
        again = run_problem(problem, order=order, seed=seed)
        _need(again.get("status") == "ok", "assembly does not reproduce")
        _need(again["result"]["assemble"] == res["assemble"], "assembly report does not reproduce")
        name = res["csv"].get("f")
        if name is not None and report_dir is not None:
            f = borel.SampledFunction.from_csv(os.path.join(report_dir, name))
            a = problem.params["assemble"]
            grid = borel.Grid1D(float(a["a"]), float(a["b"]), int(a["points"])).jittered(seed)
            gs = [borel.sample(_num_fn(t), grid) for t in a["functions"]]
            res2 = borel.assemble_borel(gs, tuple(a["Z"]), tuple(a["U"]), int(a.get("k_max", 1)))
            _need(np.array_equal(f.values, res2.f.values), "recorded f differs from the assembly")


_VERIFIERS = {
    "lift": _verify_lift,
    "lift_general": _verify_lift_general,
    "check_formal": _verify_check_formal,
    "homotopy_verify": _verify_homotopy,
    "borel_demo": _verify_borel,
    "weak_fg": _verify_weak_fg,
    "cofinal": _verify_cofinal,
}


def dump_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


__all__ = ["Problem", "run_problem", "verify_report", "dump_report", "TASKS"]

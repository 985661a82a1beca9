"""One-dimensional numerics: plateau cutoffs, flatness bounds, and summing
flat pieces into one function.

Everything here is double precision on uniform grids.  A cutoff is the
indicator of a neighbourhood of Z smoothed by box kernels of widths
d_1 > d_2 > ...; each box of width d multiplies the bound on the next
derivative by at most 2/d, so |tau^(k)| <= 2^k / (d_1 ... d_k).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (EpsilonSearchFailed, FlatBoundFailed, GridTooCoarse, InputError,
                     WidthsTooLarge)

HORMANDER_C = 2.0
RATIO_TOLERANCE = 1.15
SLOPE_MARGIN = 0.25
EDGE_POINTS = 8          # finite differences closer than this many steps to Z are skipped


@dataclass(frozen=True)
class Grid1D:
    a: float
    b: float
    n: int

    def __post_init__(self):
        if not (self.b > self.a) or self.n < 2:
            raise InputError("grid needs b > a and at least two samples")

    @property
    def step(self) -> float:
        return (self.b - self.a) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.n)

    def jittered(self, seed: int | None) -> "Grid1D":
        """Shift the grid by a seeded offset of at most a quarter step."""
        if seed is None:
            return self
        off = np.random.default_rng(seed).uniform(-0.25, 0.25) * self.step
        return Grid1D(self.a + off, self.b + off, self.n)


@dataclass
class SampledFunction:
    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n,):
            raise InputError("sample count does not match the grid")
        if not np.all(np.isfinite(self.values)):
            raise InputError("sampled values must be finite")

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "value"])
            for xi, vi in zip(self.x, self.values):
                w.writerow([repr(float(xi)), repr(float(vi))])

    @classmethod
    def from_csv(cls, path) -> "SampledFunction":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))[1:]
        xs = np.array([float(r[0]) for r in rows])
        vs = np.array([float(r[1]) for r in rows])
        return cls(Grid1D(xs[0], xs[-1], len(xs)), vs)


def sample(fn, grid: Grid1D) -> SampledFunction:
    return SampledFunction(grid, fn(grid.x))


def dist_to_interval(x: np.ndarray, Z: Sequence[float]) -> np.ndarray:
    z0, z1 = Z
    return np.maximum(z0 - x, 0.0) + np.maximum(x - z1, 0.0)


def finite_derivative(values: np.ndarray, step: float, k: int):
    """k-th forward difference divided by step^k, centred at the midpoints."""
    d = np.diff(values, k) if k else values
    return d / step ** k


def _midpoints(x: np.ndarray, k: int) -> np.ndarray:
    return x[:len(x) - k] + k * (x[1] - x[0]) / 2 if k else x


# -- cutoffs -----------------------------------------------------------------------

@dataclass(frozen=True)
class CutoffSpec:
    Z: tuple
    U: tuple
    widths: tuple

    def __post_init__(self):
        z0, z1 = self.Z
        u0, u1 = self.U
        if not (u0 < z0 <= z1 < u1):
            raise InputError("Z must be a closed interval inside the open interval U")
        w = tuple(float(d) for d in self.widths)
        object.__setattr__(self, "widths", w)
        if not w or any(d <= 0 for d in w) or any(a <= b for a, b in zip(w, w[1:])):
            raise InputError("widths must be positive and strictly decreasing")
        if sum(w) >= self.gap:
            raise WidthsTooLarge(f"sum of widths {sum(w):g} is not below dist(Z, boundary U) = {self.gap:g}")

    @property
    def gap(self) -> float:
        return min(self.Z[0] - self.U[0], self.U[1] - self.Z[1])

    def default_grid(self, n: int = 4097) -> Grid1D:
        return Grid1D(self.U[0], self.U[1], n)


def _box_width(d: float, step: float) -> int:
    w = math.ceil(d / step - 1e-9)
    return w if w % 2 else w + 1


def _window_sums(counts: np.ndarray, w: int) -> np.ndarray:
    """Exact sums of ``counts`` over centred windows of odd width ``w``.

    Zero padding outside the grid.  The running sum may wrap around in int64,
    but each window sum is below 2**63, so the modular difference is exact.
    """
    r = w // 2
    n = len(counts)
    run = np.concatenate(([0], np.cumsum(counts, dtype=np.int64)))
    idx = np.arange(n)
    return run[np.minimum(idx + r + 1, n)] - run[np.maximum(idx - r, 0)]


def cutoff_stages(spec: CutoffSpec, grid: Grid1D | None = None) -> list[SampledFunction]:
    """The indicator and each successive box smoothing of it.

    Box averages are kept as integer counts over a common denominator, so the
    plateau is exactly 1.0 and every value lies exactly in [0, 1].
    """
    grid = grid or spec.default_grid()
    h = grid.step
    if h > spec.widths[-1] / 8:
        raise GridTooCoarse(f"grid step {h:g} exceeds d_k/8 = {spec.widths[-1] / 8:g}")
    radius = spec.gap / 2
    counts = (dist_to_interval(grid.x, spec.Z) <= radius).astype(np.int64)
    denom = 1
    stages = [SampledFunction(grid, counts.astype(float))]
    for d in spec.widths:
        w = _box_width(d, h)
        if denom * w >= 2 ** 62:
            raise GridTooCoarse("too many grid points per width for exact box sums")
        counts = _window_sums(counts, w)
        denom *= w
        stages.append(SampledFunction(grid, counts / denom))
    return stages


def build_cutoff(spec: CutoffSpec, grid: Grid1D | None = None) -> SampledFunction:
    return cutoff_stages(spec, grid)[-1]


@dataclass
class BoundRow:
    k: int
    max_abs: float
    width_product: float
    ratio: float          # max_abs * d_1...d_k / C^k
    passed: bool


@dataclass
class DerivativeReport:
    rows: list
    tolerance: float = RATIO_TOLERANCE
    constant: float = HORMANDER_C

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def margin(self) -> float:
        return self.tolerance - max(r.ratio for r in self.rows)


def check_derivative_bounds(tau: SampledFunction, spec: CutoffSpec, k_max: int) -> DerivativeReport:
    if k_max < 1 or k_max > len(spec.widths):
        raise InputError(f"k_max must lie in 1..{len(spec.widths)}")
    h = tau.grid.step
    if h > spec.widths[k_max - 1] / 8:
        raise GridTooCoarse(f"grid step {h:g} exceeds d_{k_max}/8")
    rows = []
    for k in range(1, k_max + 1):
        m = float(np.max(np.abs(finite_derivative(tau.values, h, k))))
        prod = float(np.prod(spec.widths[:k]))
        ratio = m * prod / HORMANDER_C ** k
        rows.append(BoundRow(k, m, prod, ratio, ratio <= RATIO_TOLERANCE))
    return DerivativeReport(rows)


# -- flat bounds -----------------------------------------------------------------------

@dataclass
class FlatRow:
    k: int
    C_g: float
    slope: float | None    # None when every sample near Z is exactly zero
    required: float
    passed: bool


@dataclass
class FlatReport:
    j: int
    rows: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def constants(self) -> list[float]:
        return [r.C_g for r in self.rows]


def _loglog_slope(d: np.ndarray, v: np.ndarray):
    keep = (d > 0) & (v > 0)
    if keep.sum() < 3:
        return None
    return float(np.polyfit(np.log(d[keep]), np.log(v[keep]), 1)[0])


def check_flat_bounds(g: SampledFunction, Z: Sequence[float], j: int, k_max: int,
                      fit_fraction: float = 0.1) -> FlatReport:
    """Fit C_g with |g^(k)| <= C_g dist^(j-k), and test the decay rate near Z."""
    if not j > k_max >= 0:
        raise InputError("need j > k_max >= 0")
    h = g.grid.step
    rows = []
    for k in range(k_max + 1):
        der = np.abs(finite_derivative(g.values, h, k))
        dist = dist_to_interval(_midpoints(g.x, k), Z)
        usable = dist >= EDGE_POINTS * h
        ratio = der[usable] / dist[usable] ** (j - k)
        C_g = float(ratio.max()) if ratio.size else 0.0
        top = fit_fraction * float(dist.max())
        near = usable & (dist <= top)
        slope = _loglog_slope(dist[near], der[near])
        need = j - k - SLOPE_MARGIN
        ok = slope is None or slope >= need
        rows.append(FlatRow(k, C_g, slope, need, bool(ok)))
    return FlatReport(j, rows)


# -- assembly ------------------------------------------------------------------------------

@dataclass
class TermReport:
    j: int
    epsilon: float
    bound: float          # largest left-hand side of the 1/j! condition, 0 when vacuous
    widths: tuple
    flat: FlatReport


@dataclass
class OrderFit:
    N: int
    slope: float
    K: float
    window: tuple
    passed: bool


@dataclass
class BorelResult:
    f: SampledFunction
    cutoffs: list
    terms: list
    fits: list
    plateau_points: int
    plateau_exact: bool
    epsilons: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.plateau_exact and all(fit.passed for fit in self.fits)


def split_widths(gap: float, count: int, fill: float = 0.9) -> tuple:
    """Strictly decreasing widths d_i proportional to 2^-i summing to fill*gap."""
    total = 2.0 ** count - 1
    return tuple(fill * gap * 2.0 ** (count - 1 - i) / total for i in range(count))


def _widths_for(eps: float, count: int) -> tuple:
    # eps_{j+1} <= eps_j / 2, so eps_j / 2 is a safe lower bound on the gap
    return split_widths(eps / 2, count)


def epsilon_condition(eps: float, j: int, k_max: int, C_g: Sequence[float], count: int) -> float:
    """Largest over k <= k_max of sum_l C(k,l) C^l C_g,k-l eps^(j-k+l-1) / (d_1..d_l)."""
    d = _widths_for(eps, count)
    worst = 0.0
    for k in range(k_max + 1):
        total = 0.0
        for l in range(k + 1):
            tau_l = 1.0 if l == 0 else HORMANDER_C ** l / float(np.prod(d[:l]))
            total += math.comb(k, l) * tau_l * C_g[k - l] * eps ** (j - k + l - 1)
        worst = max(worst, total)
    return worst


def _choose_epsilon(j, km, C_g, count, lo, hi):
    limit = 1.0 / math.factorial(j)
    if km < 0:
        return hi, 0.0
    if hi < lo or epsilon_condition(lo, j, km, C_g, count) >= limit:
        raise EpsilonSearchFailed(
            f"no eps_{j} in [{lo:g}, {hi:g}] meets the 1/{j}! bound on this grid", j=j)
    if epsilon_condition(hi, j, km, C_g, count) < limit:
        return hi, epsilon_condition(hi, j, km, C_g, count)
    for _ in range(60):
        mid = (lo + hi) / 2
        if epsilon_condition(mid, j, km, C_g, count) < limit:
            lo = mid
        else:
            hi = mid
    return lo, epsilon_condition(lo, j, km, C_g, count)


def assemble_borel(gs: Sequence[SampledFunction], Z: Sequence[float], U: Sequence[float],
                   k_max: int = 1, orders: Sequence[int] | None = None,
                   fit_decades: float = 2.0) -> BorelResult:
    """f = sum_j tau_j g_j, with tau_j = 1 on U_{eps_{j+1}} and 0 off U_{eps_j}.

    g_j must vanish to order j on Z (j is the 1-based position unless
    ``orders`` is given).  For j > k + 1 and every k <= k_max the condition
    sum_l C(k,l) C^l C_g eps_j^(j-k+l-1) / (d_1..d_l) < 1/j! is imposed; eps_j
    is the largest value meeting it, found by bisection, capped at eps_{j-1}/2.
    """
    if not gs:
        raise InputError("need at least one function")
    grid = gs[0].grid
    if any(g.grid != grid for g in gs):
        raise InputError("all functions must share one grid")
    orders = list(orders or range(1, len(gs) + 1))
    if len(orders) != len(gs) or any(b <= a for a, b in zip(orders, orders[1:])) or orders[0] < 1:
        raise InputError("orders must be increasing positive integers")
    h = grid.step
    x = grid.x
    dist = dist_to_interval(x, Z)
    reach = min(Z[0] - U[0], U[1] - Z[1])
    if reach <= 0:
        raise InputError("Z must lie inside U")

    terms = []
    for g, j in zip(gs, orders):
        flat = check_flat_bounds(g, Z, j, min(k_max, j - 1))
        if not flat.passed:
            bad = next(r for r in flat.rows if not r.passed)
            raise FlatBoundFailed(
                f"g_{j} decays like dist^{bad.slope:.2f} in derivative {bad.k}, "
                f"needs at least {bad.required:.2f}", j=j, k=bad.k)
        km = min(k_max, j - 2)
        count = max(1, km)
        smallest = 8 * h / min(_widths_for(1.0, count))    # d_count >= 8 h
        hi = reach if not terms else terms[-1].epsilon / 2
        eps, bound = _choose_epsilon(j, km, flat.constants(), count, smallest, hi)
        if eps < smallest:
            raise EpsilonSearchFailed(f"eps_{j} = {eps:g} is below the grid limit {smallest:g}", j=j)
        terms.append(TermReport(j, eps, bound, _widths_for(eps, count), flat))

    epsilons = [t.epsilon for t in terms] + [terms[-1].epsilon / 2]
    cutoffs = []
    for idx, t in enumerate(terms):
        e_in, e_out = epsilons[idx + 1], epsilons[idx]
        spec = CutoffSpec((Z[0] - e_in, Z[1] + e_in), (Z[0] - e_out, Z[1] + e_out), t.widths)
        cutoffs.append(build_cutoff(spec, grid))

    f = np.zeros_like(x)
    total = np.zeros_like(x)
    for tau, g in zip(cutoffs, gs):
        f = f + tau.values * g.values
        total = total + g.values
    plateau = np.all([tau.values == 1.0 for tau in cutoffs], axis=0)
    plateau_exact = bool(np.array_equal(f[plateau], total[plateau]))

    fits = []
    for N in range(1, len(gs)):
        # f - sum_{j<=N} g_j, summed termwise to avoid cancellation
        res = np.zeros_like(x)
        for tau, g, j in zip(cutoffs, gs, orders):
            res = res + ((tau.values - 1.0) if j <= N else tau.values) * g.values
        top = epsilons[N + 1]
        bottom = max(top * 10.0 ** -fit_decades, EDGE_POINTS * h)
        win = (dist >= bottom) & (dist <= top)
        slope = _loglog_slope(dist[win], np.abs(res[win]))
        inside = (dist > 0) & (dist <= top)
        K = float(np.max(np.abs(res[inside]) / dist[inside] ** (N + 1))) if inside.any() else 0.0
        ok = slope is not None and slope >= N + 1 - SLOPE_MARGIN
        fits.append(OrderFit(N, slope if slope is not None else math.inf, K, (bottom, top), ok))
    return BorelResult(SampledFunction(grid, f), cutoffs, terms, fits,
                       int(plateau.sum()), plateau_exact, epsilons)

"""Closed-form evaluation of the generalization bounds.

Every evaluator returns a BoundReport whose decomposition is self-contained:
summing the stored per-grid-point terms and minimizing reproduces `bound`
bit-for-bit. Bounds quantify "exists f" events, so the headline number is
the worst function's bound; per-function values ride along.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import ChainAnalysis, analyze_chain
from .chain import ChainSpec, Trajectory, lift_prior_product
from .deepnet import NetworkSpec, capacity
from .empirical import (
    GAUSSIAN,
    RADEMACHER,
    ComplexityEstimate,
    FunctionClass,
    gaussian_complexity,
    rademacher_complexity,
)
from .errors import ZetaConstraint
from .mixing import GUARDED
from .rng import AUX_STREAM_BASE, DEFAULT_REPLICAS, DEFAULT_SEED, MASK64, stream

DYADIC_GRID = tuple(2.0**-k for k in range(21))

RAMP_UPPER = "ramp-upper"
RAMP_LOWER = "ramp-lower"
INDICATOR = "indicator"
CUSTOM = "custom-table"

ZETA_LIMIT = 1.5
ZETA_TERMS = 10**6

# Distinct master seed for complexity estimation nested inside a bound or
# verification run, so replica streams never collide with the outer loop.
COMPLEXITY_SEED_SALT = 0x9E3779B97F4A7C15


def complexity_seed(seed: int) -> int:
    return (seed ^ COMPLEXITY_SEED_SALT) & MASK64


@dataclass(frozen=True)
class MarginLoss:
    """Margin surrogate phi with its Lipschitz constant.

    ramp-upper dominates the indicator 1{x<=0} (1 on (-inf,0], linear down to
    0 at 1); ramp-lower is dominated by it (1 below -1, linear up to 0 at 0).
    Custom piecewise-linear tables extend flat beyond their knots.
    """

    kind: str
    lipschitz: float
    xs: tuple | None = None
    ys: tuple | None = None

    @classmethod
    def ramp_upper(cls) -> "MarginLoss":
        return cls(kind=RAMP_UPPER, lipschitz=1.0)

    @classmethod
    def ramp_lower(cls) -> "MarginLoss":
        return cls(kind=RAMP_LOWER, lipschitz=1.0)

    @classmethod
    def indicator(cls) -> "MarginLoss":
        return cls(kind=INDICATOR, lipschitz=math.inf)

    @classmethod
    def from_table(cls, xs, ys, lipschitz: float | None = None) -> "MarginLoss":
        xs = tuple(float(x) for x in xs)
        ys = tuple(float(y) for y in ys)
        if len(xs) != len(ys) or len(xs) < 2:
            raise ValueError("table needs matching xs/ys with >= 2 knots")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("table xs must be strictly increasing")
        if lipschitz is None:
            lipschitz = max(
                abs((y1 - y0) / (x1 - x0))
                for (x0, y0), (x1, y1) in zip(zip(xs, ys), zip(xs[1:], ys[1:]))
            )
        return cls(kind=CUSTOM, lipschitz=float(lipschitz), xs=xs, ys=ys)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == RAMP_UPPER:
            return np.clip(1.0 - x, 0.0, 1.0)
        if self.kind == RAMP_LOWER:
            return np.clip(-x, 0.0, 1.0)
        if self.kind == INDICATOR:
            return (x <= 0.0).astype(float)
        return np.interp(x, self.xs, self.ys)

    def is_upper(self) -> bool:
        """phi(x) >= 1{x<=0} everywhere (checked at knots for tables)."""
        if self.kind in (RAMP_UPPER, INDICATOR):
            return True
        if self.kind == RAMP_LOWER:
            return False
        at0 = float(np.interp(0.0, self.xs, self.ys))
        left = [y for x, y in zip(self.xs, self.ys) if x <= 0.0] + [self.ys[0]]
        return at0 >= 1.0 and min(left) >= 1.0 and min(self.ys) >= 0.0

    def is_lower(self) -> bool:
        if self.kind == RAMP_LOWER:
            return True
        if self.kind in (RAMP_UPPER,):
            return False
        if self.kind == INDICATOR:
            return True
        at0 = float(np.interp(0.0, self.xs, self.ys))
        right = [y for x, y in zip(self.xs, self.ys) if x >= 0.0] + [self.ys[-1]]
        return at0 <= 1.0 and max(right) <= 0.0 and max(self.ys) <= 1.0


def dyadic_family(base: MarginLoss, members: int) -> list:
    """phi_k(x) = phi(x / 2^-k), k = 1..members, for phi that equals 1 on
    (-inf, 0] (the dyadic construction behind the delta-grid bounds)."""
    out = []
    for k in range(1, members + 1):
        d = 2.0**-k
        if base.kind == RAMP_UPPER:
            out.append(MarginLoss.from_table((0.0, d), (1.0, 0.0), lipschitz=1.0 / d))
        else:
            xs = tuple(x * d for x in base.xs)
            out.append(MarginLoss.from_table(xs, base.ys, lipschitz=base.lipschitz / d))
    return out


@dataclass(frozen=True)
class BoundTerms:
    A_n: float
    A_tilde_n: float
    B_n: float
    M: float
    n: int
    lambda_: float
    chi_div: float
    tau_min: float


def symmetrization_terms(
    M: float, n: int, lam: float, chi_div: float, tau_min: float
) -> BoundTerms:
    """A_n, A~_n and B_n = A_n|_{M=1} (same code path, so byte-equal).

    lambda >= 1 degenerates the variance bound; the terms are reported +inf.
    """
    if n < 1:
        raise ValueError("n must be >= 1")

    def a_of(m: float) -> float:
        if lam >= 1.0:
            return math.inf
        gap = n * (1.0 - lam)
        return math.sqrt(2.0 * m / gap + 64.0 * m * m / (gap * gap) * chi_div)

    a_tilde = (M / (2.0 * n)) * (
        math.sqrt(2.0 * tau_min * n * math.log(n)) + math.sqrt(n) + 4.0
    )
    return BoundTerms(
        A_n=a_of(M),
        A_tilde_n=a_tilde,
        B_n=a_of(1.0),
        M=M,
        n=n,
        lambda_=lam,
        chi_div=chi_div,
        tau_min=tau_min,
    )


@dataclass(frozen=True)
class BoundReport:
    theorem: str
    n: int
    t: float
    grid_name: str
    grid: tuple
    decomposition: tuple
    bound: float
    bound_clamped: float
    argmin: float
    confidence: float
    worst_function: str
    per_function: tuple
    inputs: dict = field(default_factory=dict)
    caveats: tuple = field(default=())

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "n": self.n,
            "t": self.t,
            "confidence": self.confidence,
            "bound": self.bound,
            "bound_clamped": self.bound_clamped,
            "grid_name": self.grid_name,
            "argmin": self.argmin,
            "worst_function": self.worst_function,
            "per_function": [{"name": k, "bound": v} for k, v in self.per_function],
            "decomposition": [dict(row) for row in self.decomposition],
            "inputs": dict(self.inputs),
            "caveats": list(self.caveats),
        }


def _loglog_term(delta: float) -> float:
    # log log2(2/delta); exactly 0 at delta = 1
    inner = math.log2(2.0 / delta)
    return math.sqrt(math.log(inner))


def _check_grid(delta_grid) -> tuple:
    grid = tuple(float(d) for d in (delta_grid if delta_grid is not None else DYADIC_GRID))
    if not grid:
        raise ValueError("delta grid is empty")
    if any(not (0.0 < d <= 1.0) for d in grid):
        raise ValueError("delta grid must lie in (0, 1]")
    return grid


def _assemble(
    theorem, grid_name, grid, names, rows_per_f, n, t, confidence, inputs, caveats=()
) -> BoundReport:
    per_function = []
    worst = None
    for i, rows in enumerate(rows_per_f):
        b = min(row["total"] for row in rows)
        per_function.append((names[i], b))
        if worst is None or b > per_function[worst][1]:
            worst = i
    rows = rows_per_f[worst]
    totals = [row["total"] for row in rows]
    bound = min(totals)
    argmin = grid[totals.index(bound)]
    return BoundReport(
        theorem=theorem,
        n=n,
        t=t,
        grid_name=grid_name,
        grid=tuple(grid),
        decomposition=tuple(rows),
        bound=bound,
        bound_clamped=min(max(bound, 0.0), 1.0),
        argmin=argmin,
        confidence=min(max(confidence, 0.0), 1.0),
        worst_function=names[worst],
        per_function=tuple(per_function),
        inputs=inputs,
        caveats=tuple(caveats),
    )


def _complexity_inputs(est: ComplexityEstimate) -> dict:
    return {
        "kind": est.kind,
        "value": est.value,
        "stderr": est.stderr,
        "replicas": est.replicas,
        "method": est.method,
    }


def _markov_inputs(analysis: ChainAnalysis, n: int, guard_mode: str) -> tuple:
    tau = analysis.tau_min(guard_mode)
    terms = symmetrization_terms(
        1.0, n, analysis.lambda_, analysis.chi_div, tau
    )
    return tau, terms.B_n


def _margin_rows(
    grid, emp_of_delta, comp_coeff, comp_value, t, gamma_extra, sqrt_tau_n, b_n, extra, n_f
):
    rows_per_f = [[] for _ in range(n_f)]
    for d in grid:
        emp = emp_of_delta(d)
        comp = comp_coeff(d) * comp_value
        tail = (t + gamma_extra + _loglog_term(d)) * sqrt_tau_n
        for i in range(n_f):
            total = emp[i] + comp + tail + b_n + extra
            rows_per_f[i].append(
                {
                    "delta": d,
                    "empirical": float(emp[i]),
                    "complexity": comp,
                    "loglog": tail,
                    "b_n": b_n,
                    "extra": extra,
                    "total": total,
                }
            )
    return rows_per_f


def bound_thm1(
    fc: FunctionClass,
    analysis: ChainAnalysis,
    traj: Trajectory,
    phi: MarginLoss,
    t: float,
    delta_grid=None,
    flavor: str = RADEMACHER,
    complexity: ComplexityEstimate | None = None,
    replicas: int = DEFAULT_REPLICAS,
    seed: int = DEFAULT_SEED,
    guard_mode: str = GUARDED,
    workers: int = 1,
) -> BoundReport:
    """Margin bound on P{f <= 0} via Rademacher or Gaussian complexity.

    bound = inf_delta [ P_n phi(f/delta) + complexity term
                        + (t + sqrt(log log2 2/delta)) sqrt(tau_min/n) + B_n ]
    with an additional 2/sqrt(n) in the Gaussian flavor; holds with
    confidence 1 - (pi^2/3) exp(-2 t^2).
    """
    if t <= 0:
        raise ValueError("t must be > 0")
    if not phi.is_upper():
        raise ValueError("phi must dominate the indicator 1{x<=0}")
    grid = _check_grid(delta_grid)
    n = len(traj)
    if complexity is None:
        if flavor == RADEMACHER:
            complexity = rademacher_complexity(
                fc, analysis.chain, n, replicas, complexity_seed(seed), workers=workers
            )
        elif flavor == GAUSSIAN:
            complexity = gaussian_complexity(
                fc, analysis.chain, n, replicas, complexity_seed(seed), workers=workers
            )
        else:
            raise ValueError(f"unknown flavor {flavor!r}")
    tau, b_n = _markov_inputs(analysis, n, guard_mode)
    sqrt_tau_n = math.sqrt(tau / n)
    L = phi.lipschitz
    if flavor == RADEMACHER:
        coeff = lambda d: 8.0 * L / d
        extra = 0.0
    else:
        coeff = lambda d: 2.0 * L * math.sqrt(2.0 * math.pi) / d
        extra = 2.0 / math.sqrt(n)
    on_traj = fc.values[:, traj.indices]

    def emp(d):
        return phi(on_traj / d).mean(axis=1)

    rows = _margin_rows(grid, emp, coeff, complexity.value, t, 0.0, sqrt_tau_n, b_n, extra, fc.size)
    confidence = 1.0 - (math.pi**2 / 3.0) * math.exp(-2.0 * t * t)
    inputs = {
        "flavor": flavor,
        "M": fc.M,
        "lambda": analysis.lambda_,
        "chi_div": analysis.chi_div,
        "tau_min": tau,
        "b_n": b_n,
        "complexity": _complexity_inputs(complexity),
        "guard_mode": guard_mode,
    }
    return _assemble(
        "thm1-" + flavor, "delta", grid, fc.names, rows, n, t, confidence, inputs
    )


def bound_family(
    fc: FunctionClass,
    analysis: ChainAnalysis,
    traj: Trajectory,
    phis,
    t: float,
    complexity: ComplexityEstimate | None = None,
    replicas: int = DEFAULT_REPLICAS,
    seed: int = DEFAULT_SEED,
    guard_mode: str = GUARDED,
    workers: int = 1,
) -> BoundReport:
    """Countable-family bound: inf_k [ P_n phi_k(f) + 4 L(phi_k) R_n(F)
    + (t + sqrt(log k)) sqrt(tau_min/n) + B_n ]."""
    phis = list(phis)
    if not phis:
        raise ValueError("family is empty")
    if any(not p.is_upper() for p in phis):
        raise ValueError("every family member must dominate 1{x<=0}")
    if t <= 0:
        raise ValueError("t must be > 0")
    n = len(traj)
    if complexity is None:
        complexity = rademacher_complexity(
            fc, analysis.chain, n, replicas, complexity_seed(seed), workers=workers
        )
    tau, b_n = _markov_inputs(analysis, n, guard_mode)
    sqrt_tau_n = math.sqrt(tau / n)
    on_traj = fc.values[:, traj.indices]
    rows_per_f = [[] for _ in range(fc.size)]
    grid = tuple(range(1, len(phis) + 1))
    for k, phi in zip(grid, phis):
        emp = phi(on_traj).mean(axis=1)
        comp = 4.0 * phi.lipschitz * complexity.value
        tail = (t + math.sqrt(math.log(k))) * sqrt_tau_n
        for i in range(fc.size):
            total = emp[i] + comp + tail + b_n
            rows_per_f[i].append(
                {
                    "k": k,
                    "empirical": float(emp[i]),
                    "complexity": comp,
                    "loglog": tail,
                    "b_n": b_n,
                    "extra": 0.0,
                    "total": total,
                }
            )
    confidence = 1.0 - (math.pi**2 / 3.0) * math.exp(-2.0 * t * t)
    inputs = {
        "family_size": len(phis),
        "M": fc.M,
        "tau_min": tau,
        "b_n": b_n,
        "complexity": _complexity_inputs(complexity),
        "guard_mode": guard_mode,
    }
    return _assemble(
        "family", "k", grid, fc.names, rows_per_f, n, t, confidence, inputs
    )


def bound_two_sided(
    fc: FunctionClass,
    analysis: ChainAnalysis,
    traj: Trajectory,
    t: float,
    delta_grid=None,
    complexity: ComplexityEstimate | None = None,
    replicas: int = DEFAULT_REPLICAS,
    seed: int = DEFAULT_SEED,
    guard_mode: str = GUARDED,
    workers: int = 1,
    band: str = "empirical",
) -> BoundReport:
    """Two-sided bound on |P_n{f<=0} - P{f<=0}|:

    inf_delta [ P_n{|f|<=delta} + Delta_n(F;delta) + t sqrt(tau_min/n) ],
    Delta_n = (8/delta) R_n + sqrt(tau_min log log2(2/delta) / n) + B_n,
    confidence 1 - (2 pi^2/3) exp(-2 t^2). band='population' swaps the
    empirical band for P{|f|<=delta}.
    """
    if t <= 0:
        raise ValueError("t must be > 0")
    grid = _check_grid(delta_grid)
    n = len(traj)
    if complexity is None:
        complexity = rademacher_complexity(
            fc, analysis.chain, n, replicas, complexity_seed(seed), workers=workers
        )
    tau, b_n = _markov_inputs(analysis, n, guard_mode)
    sqrt_tau_n = math.sqrt(tau / n)
    if band == "empirical":
        band_vals = np.abs(fc.values[:, traj.indices])
        band_of = lambda d: (band_vals <= d).mean(axis=1)
    elif band == "population":
        absvals = np.abs(fc.values)
        pi = analysis.stationary.pi
        band_of = lambda d: (absvals <= d) @ pi
    else:
        raise ValueError(f"unknown band {band!r}")
    rows_per_f = [[] for _ in range(fc.size)]
    for d in grid:
        emp = band_of(d)
        delta_term = (
            8.0 / d * complexity.value
            + math.sqrt(tau * math.log(math.log2(2.0 / d)) / n)
            + b_n
        )
        tail = t * sqrt_tau_n
        for i in range(fc.size):
            total = emp[i] + delta_term + tail
            rows_per_f[i].append(
                {
                    "delta": d,
                    "empirical": float(emp[i]),
                    "complexity": delta_term,
                    "loglog": tail,
                    "b_n": b_n,
                    "extra": 0.0,
                    "total": total,
                }
            )
    confidence = 1.0 - (2.0 * math.pi**2 / 3.0) * math.exp(-2.0 * t * t)
    inputs = {
        "band": band,
        "M": fc.M,
        "tau_min": tau,
        "b_n": b_n,
        "complexity": _complexity_inputs(complexity),
        "guard_mode": guard_mode,
    }
    return _assemble(
        "two-sided", "delta", grid, fc.names, rows_per_f, n, t, confidence, inputs
    )


def bound_pac_vc(
    V_H: int,
    C: float,
    alpha: float,
    analysis: ChainAnalysis,
    margin_samples: np.ndarray,
    delta_grid=None,
    n: int | None = None,
    guard_mode: str = GUARDED,
) -> BoundReport:
    """Voting-classifier PAC bound with user-supplied VC dimension V_H and
    complexity constant C (the source leaves C unspecified; default 1).

    bound = inf_delta [ P_n{f~ <= delta} + (8C/delta) sqrt(V_H/n)
            + (t_a + sqrt(log log2 2/delta)) sqrt(tau_min/n) + B_n ],
    t_a = sqrt(log(pi^2/(3 alpha)) / 2); confidence 1 - alpha.
    """
    if V_H < 1:
        raise ValueError("V_H must be >= 1")
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must lie in (0, 1)")
    if C <= 0:
        raise ValueError("C must be > 0")
    samples = np.asarray(margin_samples, dtype=float)
    if n is None:
        n = len(samples)
    grid = _check_grid(delta_grid)
    t_alpha = math.sqrt(0.5 * math.log(math.pi**2 / (3.0 * alpha)))
    tau, b_n = _markov_inputs(analysis, n, guard_mode)
    sqrt_tau_n = math.sqrt(tau / n)

    def emp(d):
        return np.array([(samples <= d).mean()])

    coeff = lambda d: 8.0 * C / d * math.sqrt(V_H / n)
    rows = _margin_rows(grid, emp, coeff, 1.0, t_alpha, 0.0, sqrt_tau_n, b_n, 0.0, 1)
    inputs = {
        "V_H": V_H,
        "C": C,
        "alpha": alpha,
        "t_alpha": t_alpha,
        "tau_min": tau,
        "b_n": b_n,
        "guard_mode": guard_mode,
    }
    return _assemble(
        "pac-vc",
        "delta",
        grid,
        ("voting-margin",),
        rows,
        n,
        t_alpha,
        1.0 - alpha,
        inputs,
        caveats=("complexity constant C is not pinned by theory; supplied by caller",),
    )


def bound_deep_layered(
    L_js,
    b_js,
    G_n_base: ComplexityEstimate | float,
    phi: MarginLoss,
    t: float,
    analysis: ChainAnalysis,
    margin_samples: np.ndarray,
    delta_grid=None,
    n: int | None = None,
    guard_mode: str = GUARDED,
) -> BoundReport:
    """Layered-network bound: Gaussian-flavor margin bound with complexity
    multiplied by prod_j (2 L_j b_j + 1)."""
    L_js = [float(x) for x in L_js]
    b_js = [float(x) for x in b_js]
    if len(L_js) != len(b_js) or not L_js:
        raise ValueError("need matching nonempty per-layer L and b lists")
    if any(x < 0 for x in L_js + b_js):
        raise ValueError("layer constants must be >= 0")
    if t < 0:
        raise ValueError("t must be >= 0")
    if not phi.is_upper():
        raise ValueError("phi must dominate the indicator 1{x<=0}")
    samples = np.asarray(margin_samples, dtype=float)
    if n is None:
        n = len(samples)
    grid = _check_grid(delta_grid)
    g_value = G_n_base.value if isinstance(G_n_base, ComplexityEstimate) else float(G_n_base)
    factor = 1.0
    for L_j, b_j in zip(L_js, b_js):
        factor *= 2.0 * L_j * b_j + 1.0
    tau, b_n = _markov_inputs(analysis, n, guard_mode)
    sqrt_tau_n = math.sqrt(tau / n)

    def emp(d):
        return np.array([float(phi(samples / d).mean())])

    coeff = lambda d: 2.0 * math.sqrt(2.0 * math.pi) * phi.lipschitz / d * factor
    rows = _margin_rows(
        grid, emp, coeff, g_value, t, 0.0, sqrt_tau_n, b_n, 2.0 / math.sqrt(n), 1
    )
    confidence = 1.0 - (math.pi**2 / 3.0) * math.exp(-2.0 * t * t)
    inputs = {
        "layer_factor": factor,
        "L_js": L_js,
        "b_js": b_js,
        "g_n_base": g_value,
        "tau_min": tau,
        "b_n": b_n,
        "guard_mode": guard_mode,
    }
    return _assemble(
        "deep-layered", "delta", grid, ("network-margin",), rows, n, t, confidence, inputs
    )


def riemann_zeta(alpha: float, terms: int = ZETA_TERMS) -> float:
    """zeta(alpha) by direct partial sum plus an Euler-Maclaurin tail
    (integral term and the first two corrections); absolute error < 1e-10
    for alpha > 1."""
    if alpha <= 1.0:
        return math.inf
    k = np.arange(1, terms + 1, dtype=float)
    partial = float(np.sum(k**-alpha))
    N = float(terms)
    tail = (
        N ** (1.0 - alpha) / (alpha - 1.0)
        - 0.5 * N**-alpha
        + (alpha / 12.0) * N ** (-alpha - 1.0)
    )
    return partial + tail


def bound_deep_adaptive(
    net: NetworkSpec,
    alpha: float,
    G_n_base: ComplexityEstimate | float,
    phi: MarginLoss,
    t: float,
    analysis: ChainAnalysis,
    margin_samples: np.ndarray,
    delta_grid=None,
    n: int | None = None,
    guard_mode: str = GUARDED,
) -> BoundReport:
    """Weight-adaptive network bound using Lambda(f) and Gamma_alpha(f);
    requires zeta(alpha) < 3/2 and pays prefactor (3 - 2 zeta(alpha))^-1 in
    the confidence tail."""
    z = riemann_zeta(alpha)
    if z >= ZETA_LIMIT:
        raise ZetaConstraint(f"zeta({alpha}) = {z:.6f} >= 3/2")
    if t < 0:
        raise ValueError("t must be >= 0")
    if not phi.is_upper():
        raise ValueError("phi must dominate the indicator 1{x<=0}")
    samples = np.asarray(margin_samples, dtype=float)
    if n is None:
        n = len(samples)
    grid = _check_grid(delta_grid)
    cap = capacity(net, alpha)
    g_value = G_n_base.value if isinstance(G_n_base, ComplexityEstimate) else float(G_n_base)
    tau, b_n = _markov_inputs(analysis, n, guard_mode)
    sqrt_tau_n = math.sqrt(tau / n)

    def emp(d):
        return np.array([float(phi(samples / d).mean())])

    coeff = lambda d: 2.0 * math.sqrt(2.0 * math.pi) * phi.lipschitz / d * cap.Lambda
    rows = _margin_rows(
        grid, emp, coeff, g_value, t, cap.Gamma_alpha, sqrt_tau_n, b_n, 2.0 / math.sqrt(n), 1
    )
    confidence = 1.0 - (math.pi**2 / 3.0) / (3.0 - 2.0 * z) * math.exp(-2.0 * t * t)
    inputs = {
        "alpha": alpha,
        "zeta_alpha": z,
        "Lambda": cap.Lambda,
        "Gamma_alpha": cap.Gamma_alpha,
        "W_k": list(cap.W_k),
        "gamma_floored": cap.gamma_floored,
        "g_n_base": g_value,
        "tau_min": tau,
        "b_n": b_n,
        "guard_mode": guard_mode,
    }
    caveats = ()
    if cap.gamma_floored:
        caveats = ("some W_k < 1/2 were floored inside Gamma_alpha's log",)
    return _assemble(
        "deep-adaptive", "delta", grid, ("network-margin",), rows, n, t, confidence, inputs, caveats
    )


def bayes_empirical_term(
    fc: FunctionClass,
    prior: np.ndarray,
    traj_indices: np.ndarray,
    phi: MarginLoss,
    delta: float,
    W_samples: int | None = None,
    seed: int = DEFAULT_SEED,
) -> tuple:
    """P_hat_n phi(f/delta) = (1/n) sum_i E_W phi(f(X_i, W)/delta).

    Exact prior sum by default; with W_samples the W-average is Monte Carlo
    and the returned stderr is over the W draws (0 for exact).
    """
    K = fc.n_labels
    nx = fc.n_states // K
    vals = fc.values.reshape(fc.size, nx, K)
    on_traj = vals[:, traj_indices, :]  # (F, n, K)
    tab = phi(on_traj / delta)
    if W_samples is None:
        return tab.mean(axis=1) @ np.asarray(prior, dtype=float), np.zeros(fc.size)
    gen = stream(seed, AUX_STREAM_BASE + 1)
    draws = gen.choice(K, size=W_samples, p=np.asarray(prior, dtype=float))
    per_draw = tab[:, :, draws].mean(axis=1)  # (F, W_samples)
    est = per_draw.mean(axis=1)
    se = per_draw.std(axis=1, ddof=1) / math.sqrt(W_samples) if W_samples > 1 else np.zeros(fc.size)
    return est, se


def bound_bayes(
    fc: FunctionClass,
    chain: ChainSpec,
    prior: np.ndarray,
    traj: Trajectory,
    phi: MarginLoss,
    t: float,
    delta_grid=None,
    W_samples: int | None = None,
    seed: int = DEFAULT_SEED,
    flavor: str = RADEMACHER,
    replicas: int = DEFAULT_REPLICAS,
    guard_mode: str = GUARDED,
    workers: int = 1,
    lifted_analysis: ChainAnalysis | None = None,
) -> BoundReport:
    """Bayesian-predictor bound on P_hat{f <= 0}.

    fc lives on S x W (labeled layout with n_labels = |W|); the empirical
    term prior-averages phi(f(X_i, .)/delta) over W, while every chain-side
    quantity (tau_min, B_n, complexities) comes from the product chain with
    kernel Q(x,x') P_W(w').
    """
    if not fc.labeled or fc.n_labels is None:
        raise ValueError("bound_bayes needs a labeled class over S x W")
    if t <= 0:
        raise ValueError("t must be > 0")
    if not phi.is_upper():
        raise ValueError("phi must dominate the indicator 1{x<=0}")
    prior = np.asarray(prior, dtype=float)
    grid = _check_grid(delta_grid)
    n = len(traj)
    lifted = lift_prior_product(chain, prior)
    analysis = lifted_analysis if lifted_analysis is not None else analyze_chain(lifted)
    if flavor == RADEMACHER:
        complexity = rademacher_complexity(
            fc, lifted, n, replicas, complexity_seed(seed), workers=workers
        )
        coeff = lambda d: 8.0 * phi.lipschitz / d
        extra = 0.0
    elif flavor == GAUSSIAN:
        complexity = gaussian_complexity(
            fc, lifted, n, replicas, complexity_seed(seed), workers=workers
        )
        coeff = lambda d: 2.0 * phi.lipschitz * math.sqrt(2.0 * math.pi) / d
        extra = 2.0 / math.sqrt(n)
    else:
        raise ValueError(f"unknown flavor {flavor!r}")
    tau, b_n = _markov_inputs(analysis, n, guard_mode)
    sqrt_tau_n = math.sqrt(tau / n)
    stderr_worst = 0.0

    def emp(d):
        nonlocal stderr_worst
        est, se = bayes_empirical_term(fc, prior, traj.indices, phi, d, W_samples, seed)
        stderr_worst = max(stderr_worst, float(se.max()))
        return est

    rows = _margin_rows(grid, emp, coeff, complexity.value, t, 0.0, sqrt_tau_n, b_n, extra, fc.size)
    confidence = 1.0 - (math.pi**2 / 3.0) * math.exp(-2.0 * t * t)
    inputs = {
        "flavor": flavor,
        "prior": [float(p) for p in prior],
        "w_average": "exact" if W_samples is None else "monte-carlo",
        "w_samples": 0 if W_samples is None else W_samples,
        "w_stderr_max": stderr_worst,
        "M": fc.M,
        "lambda": analysis.lambda_,
        "chi_div": analysis.chi_div,
        "tau_min": tau,
        "b_n": b_n,
        "complexity": _complexity_inputs(complexity),
        "guard_mode": guard_mode,
    }
    return _assemble(
        "bayes-" + flavor, "delta", grid, fc.names, rows, n, t, confidence, inputs
    )


def gamma_margin(values: np.ndarray, weights: np.ndarray, gamma: float, n: int) -> float:
    """gamma-margin: sup{delta in (0,1): delta^(gamma/2) F(delta) <= n^(-1/2+gamma/4)}
    where F(delta) is the (weighted) distribution of the margin values.

    Exact scan over the constant segments of the step function F; the
    constraint function is nondecreasing in delta so the first feasible
    segment from the top carries the supremum. Result lies in [0, 1].
    """
    if not (0.0 < gamma <= 1.0):
        raise ValueError("gamma must lie in (0, 1]")
    if n < 2:
        raise ValueError("n must be >= 2")
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if values.shape != weights.shape:
        raise ValueError("values and weights disagree in shape")
    threshold = n ** (-0.5 + gamma / 4.0)
    order = np.argsort(values, kind="stable")
    v_sorted = values[order]
    w_cum = np.cumsum(weights[order])

    def cdf(x: float) -> float:
        idx = np.searchsorted(v_sorted, x, side="right") - 1
        return 0.0 if idx < 0 else float(w_cum[idx])

    interior = sorted({float(v) for v in values if 0.0 < v < 1.0})
    edges = [0.0] + interior + [1.0]
    for i in range(len(edges) - 2, -1, -1):
        lo, hi = edges[i], edges[i + 1]
        p = cdf(lo)
        if p <= 0.0:
            return hi
        if p <= threshold:
            return hi
        d_max = (threshold / p) ** (2.0 / gamma)
        if d_max >= hi:
            return hi
        if d_max >= lo:
            return d_max
    return 0.0


@dataclass(frozen=True)
class StepCDF:
    """Right-continuous step CDF: value ps[i] on [xs[i], xs[i+1])."""

    xs: np.ndarray
    ps: np.ndarray

    def __init__(self, xs, ps):
        xs = np.asarray(xs, dtype=float)
        ps = np.asarray(ps, dtype=float)
        if xs.ndim != 1 or xs.shape != ps.shape or len(xs) == 0:
            raise ValueError("need matching nonempty xs and ps")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("xs must be strictly increasing")
        if np.any(np.diff(ps) < -1e-12) or np.any(ps < -1e-12):
            raise ValueError("cdf values must be nondecreasing and >= 0")
        if abs(ps[-1] - 1.0) > 1e-9:
            raise ValueError(f"cdf must reach 1, got {ps[-1]!r}")
        xs.setflags(write=False)
        ps.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ps", ps)

    @classmethod
    def from_samples(cls, samples, weights=None) -> "StepCDF":
        samples = np.asarray(samples, dtype=float)
        if weights is None:
            weights = np.full(len(samples), 1.0 / len(samples))
        weights = np.asarray(weights, dtype=float)
        order = np.argsort(samples, kind="stable")
        xs, inverse = np.unique(samples[order], return_inverse=True)
        mass = np.zeros(len(xs))
        np.add.at(mass, inverse, weights[order])
        return cls(xs=xs, ps=np.cumsum(mass) / mass.sum())

    def __call__(self, t: float) -> float:
        idx = int(np.searchsorted(self.xs, t, side="right")) - 1
        return 0.0 if idx < 0 else float(self.ps[idx])


def _levy_ok(F: StepCDF, G: StepCDF, delta: float) -> bool:
    # F(t) <= G(t + delta) + delta need only be checked at F's own jumps:
    # between them F is constant while the right side is nondecreasing.
    for x, p in zip(F.xs, F.ps):
        if p > G(x + delta) + delta:
            return False
    for x, p in zip(G.xs, G.ps):
        if p > F(x + delta) + delta:
            return False
    return True


def levy_distance(F: StepCDF, G: StepCDF, tol: float = 1e-9) -> float:
    """inf{delta > 0: F(t) <= G(t+delta)+delta and vice versa for all t},
    by bisection with the universal quantifier evaluated at jump points."""
    if _levy_ok(F, G, 0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _levy_ok(F, G, mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class ScalarBound:
    theorem: str
    value: float
    value_clamped: float
    confidence: float
    terms: dict

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "bound": self.value,
            "bound_clamped": self.value_clamped,
            "confidence": self.confidence,
            "terms": dict(self.terms),
        }


def bound_levy(
    analysis: ChainAnalysis,
    n: int,
    M: float,
    t: float,
    e_pn0: float,
    guard_mode: str = GUARDED,
) -> ScalarBound:
    """Bound on sup_f L(F_f, F_{n,f}):
    4 sqrt(E||P_n^0||_F + M/sqrt(n)) + B_n + t sqrt(tau_min/n),
    confidence 1 - 2 exp(-2 t^2)."""
    if e_pn0 < 0 or M < 0 or n < 1:
        raise ValueError("need e_pn0 >= 0, M >= 0, n >= 1")
    tau, b_n = _markov_inputs(analysis, n, guard_mode)
    comp = 4.0 * math.sqrt(e_pn0 + M / math.sqrt(n))
    tail = t * math.sqrt(tau / n)
    value = comp + b_n + tail
    return ScalarBound(
        theorem="levy-lemma",
        value=value,
        value_clamped=min(max(value, 0.0), 1.0),
        confidence=min(max(1.0 - 2.0 * math.exp(-2.0 * t * t), 0.0), 1.0),
        terms={"complexity_sqrt": comp, "b_n": b_n, "tail": tail, "e_pn0": e_pn0, "M": M, "tau_min": tau},
    )


def bound_sup_cdf(
    analysis: ChainAnalysis, n: int, t: float, guard_mode: str = GUARDED
) -> ScalarBound:
    """Bound on sup_f sup_y |P_n(f<=y) - P(f<=y)|: sqrt(B_n) + t sqrt(tau_min/n),
    confidence 1 - 2 exp(-2 t^2)."""
    tau, b_n = _markov_inputs(analysis, n, guard_mode)
    root = math.sqrt(b_n)
    tail = t * math.sqrt(tau / n)
    value = root + tail
    return ScalarBound(
        theorem="sup-cdf",
        value=value,
        value_clamped=min(max(value, 0.0), 1.0),
        confidence=min(max(1.0 - 2.0 * math.exp(-2.0 * t * t), 0.0), 1.0),
        terms={"sqrt_b_n": root, "tail": tail, "b_n": b_n, "tau_min": tau},
    )

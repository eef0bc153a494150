"""Monte-Carlo verification harness for the concentration inequalities.

Each target turns one inequality into an experiment: estimate the left side
over seeded replicas, evaluate the right side once from exact chain
quantities, and report slack = rhs - lhs with pass = slack > -3 stderr.
Vacuous outcomes (tails >= 1, negative lower bounds) are first-class states,
never silent passes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import ChainAnalysis, analyze_chain
from .bounds import (
    MarginLoss,
    StepCDF,
    complexity_seed,
    levy_distance,
    symmetrization_terms,
)
from .chain import ChainSpec, steps_from_uniforms
from .empirical import (
    EXACT_CAP,
    GAUSSIAN,
    RADEMACHER,
    ComplexityEstimate,
    FunctionClass,
    _enumerate_paths,
    _sign_patterns,
    gaussian_complexity,
    rademacher_complexity,
    true_mean,
)
from .errors import CoefficientBoundError, ExactTooLarge
from .mixing import GUARDED
from .rng import DEFAULT_REPLICAS, map_replica_chunks, stream

MIN_REPLICAS = 100

THM1_RADEMACHER = "thm1-rademacher"
THM1_GAUSSIAN = "thm1-gaussian"
TWO_SIDED = "two-sided"
DKW_LEMMA = "dkw-lemma"
LEVY_LEMMA = "levy-lemma"

TAIL_TARGETS = (THM1_RADEMACHER, THM1_GAUSSIAN, TWO_SIDED, DKW_LEMMA, LEVY_LEMMA)


@dataclass(frozen=True)
class VerifyReport:
    target: str
    replicas: int
    seed: int
    lhs_estimate: float
    lhs_stderr: float
    rhs_value: float
    slack: float
    passed: bool
    vacuous: bool = False
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "replicas": self.replicas,
            "seed": self.seed,
            "lhs_estimate": self.lhs_estimate,
            "lhs_stderr": self.lhs_stderr,
            "rhs_value": self.rhs_value,
            "slack": self.slack,
            "pass": self.passed,
            "vacuous": self.vacuous,
            "diagnostics": dict(self.diagnostics),
        }


def _require_replicas(replicas: int):
    if replicas < MIN_REPLICAS:
        raise ValueError(f"replicas must be >= {MIN_REPLICAS}")


def _start_law(analysis: ChainAnalysis, start: str) -> np.ndarray | None:
    if start == "nu":
        return None
    if start == "pi":
        return analysis.stationary.pi
    raise ValueError(f"start must be 'nu' or 'pi', got {start!r}")


def _replica_paths(chain: ChainSpec, n, seed, lo, hi, initial, want_signs=False):
    count = hi - lo
    cum_nu = np.cumsum(chain.nu if initial is None else initial)
    cum_rows = np.cumsum(chain.Q, axis=1)
    U = np.empty((count, n))
    signs = np.empty((count, n)) if want_signs else None
    for r in range(count):
        g = stream(seed, lo + r)
        U[r] = g.random(n)
        if want_signs:
            signs[r] = np.where(g.random(n) < 0.5, 1.0, -1.0)
    paths = steps_from_uniforms(cum_nu, cum_rows, U)
    return (paths, signs) if want_signs else paths


def _freqs(paths: np.ndarray, k: int) -> np.ndarray:
    R, n = paths.shape
    flat = paths + np.arange(R)[:, None] * k
    return np.bincount(flat.ravel(), minlength=R * k).reshape(R, k) / n


def _mean_se(x: np.ndarray) -> tuple:
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(len(x))) if len(x) > 1 else 0.0


def verify_symmetrization(
    chain: ChainSpec,
    fc: FunctionClass,
    n: int,
    replicas: int = DEFAULT_REPLICAS,
    seed: int = 0,
    start: str = "nu",
    analysis: ChainAnalysis | None = None,
    guard_mode: str = GUARDED,
    workers: int = 1,
) -> VerifyReport:
    """Symmetrization sandwich:
    (1/2) E||P_n^0|| - A~_n <= E||P_n - P|| <= 2 E||P_n^0|| + A_n.

    Both expectations are estimated replica-by-replica from the same joint
    draws; the per-replica differences give the slack standard errors
    directly. The lower side is flagged vacuous when its bound is <= 0.
    """
    _require_replicas(replicas)
    analysis = analysis or analyze_chain(chain)
    initial = _start_law(analysis, start)
    terms = symmetrization_terms(
        fc.M, n, analysis.lambda_, analysis.chi_div, analysis.tau_min(guard_mode)
    )
    means = true_mean(fc, analysis.stationary)
    values = fc.values
    k = chain.n_states

    def one_chunk(lo, hi):
        paths, signs = _replica_paths(chain, n, seed, lo, hi, initial, want_signs=True)
        freq = _freqs(paths, k)
        dev = np.abs(freq @ values.T - means[None, :]).max(axis=1)
        fx = values[:, paths]  # (F, r, n)
        pn0 = np.abs(np.einsum("frn,rn->rf", fx, signs) / n).max(axis=1)
        return dev, pn0

    chunks = map_replica_chunks(one_chunk, replicas, workers)
    dev = np.concatenate([c[0] for c in chunks])
    pn0 = np.concatenate([c[1] for c in chunks])
    e_dev, se_dev = _mean_se(dev)
    e_pn0, se_pn0 = _mean_se(pn0)
    upper_gap = 2.0 * pn0 - dev  # rhs - lhs without the A_n constant
    upper_slack, upper_se = _mean_se(upper_gap)
    upper_slack += terms.A_n
    lower_gap = dev - 0.5 * pn0
    lower_slack, lower_se = _mean_se(lower_gap)
    lower_slack += terms.A_tilde_n
    lower_bound_value = 0.5 * e_pn0 - terms.A_tilde_n
    lower_vacuous = lower_bound_value <= 0.0
    passed_upper = upper_slack > -3.0 * upper_se
    passed_lower = lower_vacuous or lower_slack > -3.0 * lower_se
    return VerifyReport(
        target="symmetrization",
        replicas=replicas,
        seed=seed,
        lhs_estimate=e_dev,
        lhs_stderr=se_dev,
        rhs_value=2.0 * e_pn0 + terms.A_n,
        slack=upper_slack,
        passed=bool(passed_upper and passed_lower),
        vacuous=bool(lower_vacuous),
        diagnostics={
            "start": start,
            "e_sup_dev": e_dev,
            "se_sup_dev": se_dev,
            "e_pn0": e_pn0,
            "se_pn0": se_pn0,
            "A_n": terms.A_n,
            "A_tilde_n": terms.A_tilde_n,
            "upper_slack": upper_slack,
            "upper_slack_se": upper_se,
            "lower_slack": lower_slack,
            "lower_slack_se": lower_se,
            "lower_bound_value": lower_bound_value,
            "lower_vacuous": lower_vacuous,
            "M": fc.M,
        },
    )


def verify_variance(
    chain: ChainSpec,
    fc: FunctionClass,
    n: int,
    n0: int = 0,
    replicas: int = DEFAULT_REPLICAS,
    seed: int = 0,
    f_index: int = 0,
    analysis: ChainAnalysis | None = None,
    workers: int = 1,
) -> VerifyReport:
    """Variance bound for the shifted running mean S_{n,n0}(f):
    E|S_{n,n0}(f) - E_pi f|^2 <= 2M/(n(1-lambda))
                                 + 64 M^2/(n^2 (1-lambda)^2) lambda^n0 chi.
    """
    _require_replicas(replicas)
    analysis = analysis or analyze_chain(chain)
    lam, chi = analysis.lambda_, analysis.chi_div
    M = fc.M
    f = fc.values[f_index]
    pf = float(true_mean(fc, analysis.stationary)[f_index])
    k = chain.n_states
    total = n0 + n

    def one_chunk(lo, hi):
        paths = _replica_paths(chain, total, seed, lo, hi, None)
        tail_freq = _freqs(paths[:, n0:], k)
        s = tail_freq @ f
        return (s - pf) ** 2

    sq = np.concatenate(map_replica_chunks(one_chunk, replicas, workers))
    lhs, se = _mean_se(sq)
    if lam >= 1.0:
        rhs = math.inf
    else:
        gap = n * (1.0 - lam)
        rhs = 2.0 * M / gap + 64.0 * M * M / (gap * gap) * lam**n0 * chi
    slack = rhs - lhs
    return VerifyReport(
        target="variance",
        replicas=replicas,
        seed=seed,
        lhs_estimate=lhs,
        lhs_stderr=se,
        rhs_value=rhs,
        slack=slack,
        passed=bool(slack > -3.0 * se),
        diagnostics={
            "n": n,
            "n0": n0,
            "M": M,
            "lambda": lam,
            "chi_div": chi,
            "function": fc.names[f_index],
        },
    )


def _wilson_bounds(successes: int, trials: int, z: float = 3.0) -> tuple:
    if trials == 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def spot_check_coefficients(
    chain: ChainSpec,
    statistic,
    c: np.ndarray,
    n: int,
    seed: int,
    checks: int = 100,
):
    """Flip one coordinate of random trajectories to a random other state and
    confirm |f(x) - f(x')| <= c_i."""
    k = chain.n_states
    if k < 2:
        return
    gen = stream(seed, 2**32 + 17)
    paths = _replica_paths(chain, n, seed ^ 0xA5A5, 0, checks, None)
    for r in range(checks):
        x = paths[r].copy()
        i = int(gen.integers(n))
        other = int(gen.integers(k - 1))
        y = x.copy()
        y[i] = other if other < x[i] else other + 1
        gap = abs(float(statistic(x)) - float(statistic(y)))
        if gap > c[i] + 1e-12:
            raise CoefficientBoundError(
                f"statistic moved by {gap} on a flip at {i}, declared c_i = {c[i]}"
            )


def verify_mcdiarmid(
    chain: ChainSpec,
    c,
    statistic,
    t_grid,
    n: int,
    replicas: int = DEFAULT_REPLICAS,
    seed: int = 0,
    analysis: ChainAnalysis | None = None,
    guard_mode: str = GUARDED,
    spot_checks: int = 100,
) -> VerifyReport:
    """Markov McDiarmid tail: P(|f(X) - Ef| >= t) <= 2 exp(-2t^2/(||c||^2 tau)).

    The mean is estimated from the same replicas (negligible bias at >= 1e4
    replicas). Pass per t uses a z=3 Wilson interval on the empirical tail.
    tau_min = 0 (literal mode) makes every t > 0 bound zero and is flagged.
    """
    _require_replicas(replicas)
    analysis = analysis or analyze_chain(chain)
    tau = analysis.tau_min(guard_mode)
    c = np.asarray(c, dtype=float) * np.ones(n)
    if len(c) != n:
        raise ValueError("coefficient vector must have length n")
    spot_check_coefficients(chain, statistic, c, n, seed, spot_checks)
    c_norm_sq = float(np.sum(c * c))
    paths = np.concatenate(
        map_replica_chunks(
            lambda lo, hi: _replica_paths(chain, n, seed, lo, hi, None), replicas
        )
    )
    stats = np.array([float(statistic(paths[r])) for r in range(replicas)])
    mean = stats.mean()
    dev = np.abs(stats - mean)
    rows = []
    degenerate = tau <= 0.0
    worst_slack, worst_se = math.inf, 0.0
    all_pass = True
    for t in t_grid:
        t = float(t)
        if degenerate:
            bound = 2.0 if t <= 0 else 0.0
        else:
            bound = 2.0 * math.exp(-2.0 * t * t / (c_norm_sq * tau))
        hits = int(np.sum(dev >= t))
        freq = hits / replicas
        lo_w, hi_w = _wilson_bounds(hits, replicas)
        se = math.sqrt(max(freq * (1 - freq), 1e-300) / replicas)
        vac = bound >= 1.0
        ok = vac or lo_w <= bound
        all_pass = all_pass and ok
        if bound - freq < worst_slack:
            worst_slack, worst_se = bound - freq, se
        rows.append(
            {
                "t": t,
                "bound": min(bound, 1.0),
                "bound_raw": bound,
                "empirical": freq,
                "wilson_lower": lo_w,
                "wilson_upper": hi_w,
                "vacuous": vac,
                "pass": ok,
            }
        )
    return VerifyReport(
        target="mcdiarmid",
        replicas=replicas,
        seed=seed,
        lhs_estimate=float(dev.mean()),
        lhs_stderr=float(dev.std(ddof=1) / math.sqrt(replicas)),
        rhs_value=min((r["bound_raw"] for r in rows), default=math.inf),
        slack=worst_slack,
        passed=bool(all_pass),
        vacuous=bool(degenerate or all(r["vacuous"] for r in rows)),
        diagnostics={
            "tau_min": tau,
            "guard_mode": guard_mode,
            "c_norm_sq": c_norm_sq,
            "guaranteed_failure": degenerate,
            "per_t": rows,
            "mean_estimate": float(mean),
        },
    )


def _precompute_complexity(
    fc: FunctionClass, chain: ChainSpec, n: int, kind: str, replicas: int, seed: int, workers: int
) -> ComplexityEstimate:
    if kind == RADEMACHER:
        if (chain.n_states**n) * (2**n) <= EXACT_CAP:
            return rademacher_complexity(fc, chain, n, exact=True)
        return rademacher_complexity(
            fc, chain, n, max(replicas, DEFAULT_REPLICAS), complexity_seed(seed), workers=workers
        )
    return gaussian_complexity(
        fc, chain, n, max(replicas, DEFAULT_REPLICAS), complexity_seed(seed), workers=workers
    )


def _loglog(delta: float) -> float:
    return math.sqrt(math.log(math.log2(2.0 / delta)))


def verify_theorem_tail(
    target: str,
    chain: ChainSpec,
    fc: FunctionClass,
    n: int,
    t: float,
    replicas: int = DEFAULT_REPLICAS,
    seed: int = 0,
    delta_grid=None,
    analysis: ChainAnalysis | None = None,
    guard_mode: str = GUARDED,
    workers: int = 1,
) -> VerifyReport:
    """Empirical violation frequency of a high-probability bound vs its tail.

    Bound-side quantities (lambda, tau_min, B_n, complexities) are computed
    once, outside the replica loop; each replica only contributes its own
    empirical terms. Pass when frequency <= tail + 3 binomial stderr; tails
    clamped at 1 are flagged vacuous and never counted as evidence.
    """
    _require_replicas(replicas)
    if target not in TAIL_TARGETS:
        raise ValueError(f"unknown target {target!r}")
    analysis = analysis or analyze_chain(chain)
    tau = analysis.tau_min(guard_mode)
    terms = symmetrization_terms(1.0, n, analysis.lambda_, analysis.chi_div, tau)
    b_n = terms.B_n
    sqrt_tau_n = math.sqrt(tau / n)
    pi = analysis.stationary.pi
    values = fc.values
    k = chain.n_states
    grid = tuple(delta_grid) if delta_grid is not None else tuple(2.0**-j for j in range(21))
    phi = MarginLoss.ramp_upper()
    diagnostics = {
        "tau_min": tau,
        "b_n": b_n,
        "guard_mode": guard_mode,
        "n": n,
    }

    if target in (THM1_RADEMACHER, THM1_GAUSSIAN):
        kind = RADEMACHER if target == THM1_RADEMACHER else GAUSSIAN
        comp = _precompute_complexity(fc, chain, n, kind, replicas, seed, workers)
        if kind == RADEMACHER:
            coeffs = np.array([8.0 / d * comp.value for d in grid])
            extra = 0.0
        else:
            coeffs = np.array([2.0 * math.sqrt(2 * math.pi) / d * comp.value for d in grid])
            extra = 2.0 / math.sqrt(n)
        consts = np.array(
            [c + (t + _loglog(d)) * sqrt_tau_n + b_n + extra for c, d in zip(coeffs, grid)]
        )
        # phi tables per delta: (D, F, S)
        tbl = np.stack([phi(values / d) for d in grid])
        p_le0 = (values <= 0.0) @ pi  # (F,)
        tail = (math.pi**2 / 3.0) * math.exp(-2.0 * t * t)
        diagnostics["complexity"] = {"kind": comp.kind, "value": comp.value, "method": comp.method}

        def chunk_hits(lo, hi):
            paths = _replica_paths(chain, n, seed, lo, hi, None)
            freq = _freqs(paths, k)
            emp = np.einsum("rs,dfs->rdf", freq, tbl)
            rhs = (emp + consts[None, :, None]).min(axis=1)  # (r, F)
            return (p_le0[None, :] > rhs).any(axis=1)

    elif target == TWO_SIDED:
        comp = _precompute_complexity(fc, chain, n, RADEMACHER, replicas, seed, workers)
        delta_terms = np.array(
            [
                8.0 / d * comp.value + math.sqrt(tau * math.log(math.log2(2.0 / d)) / n) + b_n
                for d in grid
            ]
        )
        band_tbl = np.stack([(np.abs(values) <= d).astype(float) for d in grid])
        ind0 = (values <= 0.0).astype(float)  # (F, S)
        p_le0 = ind0 @ pi
        tail = (2.0 * math.pi**2 / 3.0) * math.exp(-2.0 * t * t)
        diagnostics["complexity"] = {"kind": comp.kind, "value": comp.value, "method": comp.method}

        def chunk_hits(lo, hi):
            paths = _replica_paths(chain, n, seed, lo, hi, None)
            freq = _freqs(paths, k)
            emp0 = freq @ ind0.T  # (r, F)
            band = np.einsum("rs,dfs->rdf", freq, band_tbl)
            rhs = (band + delta_terms[None, :, None]).min(axis=1) + t * sqrt_tau_n
            return (np.abs(emp0 - p_le0[None, :]) > rhs).any(axis=1)

    elif target == DKW_LEMMA:
        rhs_const = math.sqrt(b_n) + t * sqrt_tau_n
        tail = 2.0 * math.exp(-2.0 * t * t)
        # indicator tables 1{f <= y} at every attained level y, per function
        ind = [
            np.stack([(values[f] <= y).astype(float) for y in np.unique(values[f])])
            for f in range(fc.size)
        ]
        truth = [tbl @ pi for tbl in ind]
        diagnostics["rhs_const"] = rhs_const

        def chunk_hits(lo, hi):
            paths = _replica_paths(chain, n, seed, lo, hi, None)
            freq = _freqs(paths, k)
            worst = np.zeros(hi - lo)
            for f in range(fc.size):
                gaps = np.abs(freq @ ind[f].T - truth[f][None, :]).max(axis=1)
                worst = np.maximum(worst, gaps)
            return worst > rhs_const

    else:  # LEVY_LEMMA
        comp = _precompute_complexity(fc, chain, n, RADEMACHER, replicas, seed, workers)
        rhs_const = (
            4.0 * math.sqrt(comp.value + fc.M / math.sqrt(n)) + b_n + t * sqrt_tau_n
        )
        tail = 2.0 * math.exp(-2.0 * t * t)
        sorted_vals = [np.unique(values[f]) for f in range(fc.size)]
        truth_cdfs = [
            StepCDF(xs=v, ps=np.cumsum([pi[values[f] == x].sum() for x in v]))
            for f, v in enumerate(sorted_vals)
        ]
        diagnostics["rhs_const"] = rhs_const
        diagnostics["complexity"] = {"kind": comp.kind, "value": comp.value, "method": comp.method}

        def chunk_hits(lo, hi):
            paths = _replica_paths(chain, n, seed, lo, hi, None)
            hits = np.zeros(hi - lo, dtype=bool)
            for r in range(hi - lo):
                worst = 0.0
                for f in range(fc.size):
                    emp = StepCDF.from_samples(values[f][paths[r]])
                    worst = max(worst, levy_distance(truth_cdfs[f], emp))
                hits[r] = worst >= rhs_const
            return hits

    hits = np.concatenate(map_replica_chunks(chunk_hits, replicas, workers))
    count = int(hits.sum())
    freq = count / replicas
    se = math.sqrt(max(freq * (1 - freq), 1e-300) / replicas)
    vacuous = tail >= 1.0
    tail_clamped = min(tail, 1.0)
    slack = tail_clamped - freq
    passed = vacuous or freq <= tail + 3.0 * se
    diagnostics.update({"tail": tail, "tail_clamped": tail_clamped, "violations": count})
    return VerifyReport(
        target=target,
        replicas=replicas,
        seed=seed,
        lhs_estimate=freq,
        lhs_stderr=se,
        rhs_value=tail_clamped,
        slack=slack,
        passed=bool(passed),
        vacuous=bool(vacuous),
        diagnostics=diagnostics,
    )


def verify_replica_identity(
    chain: ChainSpec,
    fc: FunctionClass,
    n: int,
    seed: int = 0,
    tolerance: float = 1e-12,
) -> VerifyReport:
    """Exact check of the sign-symmetrization identity for independent copies:

    E_eps E_{X,Y} sup_f |sum_i eps_i (f(X_i) - f(Y_i))|
        = E_{X,Y} sup_f |sum_i (f(X_i) - f(Y_i))|.

    Full enumeration over trajectory pairs and sign patterns; equality must
    hold within `tolerance`.
    """
    k = chain.n_states
    if (k ** (2 * n)) * (2**n) > EXACT_CAP:
        raise ExactTooLarge(
            f"|S|^(2n) 2^n = {(k ** (2 * n)) * (2 ** n)} exceeds {EXACT_CAP}"
        )
    paths, probs = _enumerate_paths(chain, n)
    signs = _sign_patterns(n)  # (E, n)
    fx = fc.values[:, paths]  # (F, T, n)
    # diffs over ordered trajectory pairs: (F, T, T, n)
    diff = fx[:, :, None, :] - fx[:, None, :, :]
    plain = np.abs(diff.sum(axis=3)).max(axis=0)  # (T, T)
    signed = np.einsum("ftsn,en->ftse", diff, signs)
    signed = np.abs(signed).max(axis=0).mean(axis=2)  # (T, T)
    w = probs[:, None] * probs[None, :]
    lhs = float((w * signed).sum())
    rhs = float((w * plain).sum())
    gap = abs(lhs - rhs)
    return VerifyReport(
        target="replica-identity",
        replicas=len(probs) ** 2 * signs.shape[0],
        seed=seed,
        lhs_estimate=lhs,
        lhs_stderr=0.0,
        rhs_value=rhs,
        slack=tolerance - gap,
        passed=bool(gap <= tolerance),
        diagnostics={
            "max_deviation": gap,
            "tolerance": tolerance,
            "n": n,
            "pairs": len(probs) ** 2,
            "sign_patterns": int(signs.shape[0]),
        },
    )

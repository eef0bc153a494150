"""Function classes over chain states and their empirical-process statistics.

Covers the true mean Pf, the empirical mean P_n f, the sup deviation
||P_n - P||_F, Rademacher/Gaussian complexities (joint Monte Carlo over
trajectory and multipliers, plus exact enumeration on small instances),
multiclass margins, truncation, and metric entropy in d_{P_n,2}.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .chain import (
    ChainSpec,
    StationaryResult,
    Trajectory,
    stationary,
    steps_from_uniforms,
)
from .errors import ExactTooLarge
from .rng import DEFAULT_REPLICAS, map_replica_chunks, stream

RADEMACHER = "rademacher"
GAUSSIAN = "gaussian"

MONTE_CARLO = "monte-carlo"
EXACT = "exact-enumeration"

EXACT_CAP = 2**24
BOUND_SLACK = 1e-12


def _frozen(a) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class FunctionClass:
    """Finitely many bounded functions tabulated on states.

    For `labeled` classes the states are (x, y) pairs of a lifted chain in
    row-major state-then-label order and `n_labels` gives |Y|.
    """

    values: np.ndarray
    names: tuple
    M: float
    labeled: bool = False
    n_labels: int | None = None

    def __init__(self, values, names=None, M=None, labeled=False, n_labels=None):
        vals = _frozen(np.atleast_2d(values))
        if names is None:
            names = tuple(f"f{i}" for i in range(vals.shape[0]))
        sup = float(np.abs(vals).max()) if vals.size else 0.0
        if M is None:
            M = sup
        elif sup > M + BOUND_SLACK:
            raise ValueError(f"function values exceed the declared bound M={M}")
        if labeled:
            if n_labels is None or n_labels < 2:
                raise ValueError("labeled classes need n_labels >= 2")
            if vals.shape[1] % n_labels != 0:
                raise ValueError("column count is not a multiple of n_labels")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "names", tuple(names))
        object.__setattr__(self, "M", float(M))
        object.__setattr__(self, "labeled", bool(labeled))
        object.__setattr__(self, "n_labels", n_labels)

    @property
    def size(self) -> int:
        return self.values.shape[0]

    @property
    def n_states(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class ComplexityEstimate:
    kind: str
    value: float
    stderr: float
    replicas: int
    n: int
    method: str


def _check_states(fc: FunctionClass, n_states: int):
    if fc.n_states != n_states:
        raise ValueError(
            f"class is tabulated on {fc.n_states} states, chain has {n_states}"
        )


def true_mean(fc: FunctionClass, stat: StationaryResult) -> np.ndarray:
    """Pf = sum_x pi(x) f(x), one entry per function."""
    _check_states(fc, len(stat.pi))
    return fc.values @ stat.pi


def empirical_mean(fc: FunctionClass, traj: Trajectory) -> np.ndarray:
    """P_n f = arithmetic mean of f along the trajectory."""
    _check_states(fc, traj.chain.n_states)
    return fc.values[:, traj.indices].mean(axis=1)


def sup_deviation(fc: FunctionClass, traj: Trajectory, stat: StationaryResult) -> float:
    """||P_n - P||_F = max_f |P_n f - Pf|."""
    return float(np.abs(empirical_mean(fc, traj) - true_mean(fc, stat)).max())


def _mc_complexity(
    fc: FunctionClass,
    chain: ChainSpec,
    n: int,
    replicas: int,
    seed: int,
    kind: str,
    stationary_start: bool = False,
    workers: int = 1,
    stat: StationaryResult | None = None,
) -> ComplexityEstimate:
    _check_states(fc, chain.n_states)
    initial = None
    if stationary_start:
        initial = (stat or stationary(chain)).pi
    cum_nu = np.cumsum(chain.nu if initial is None else initial)
    cum_rows = np.cumsum(chain.Q, axis=1)
    values = fc.values

    def one_chunk(lo, hi):
        count = hi - lo
        U = np.empty((count, n))
        mult = np.empty((count, n))
        for r in range(count):
            g = stream(seed, lo + r)
            U[r] = g.random(n)
            if kind == RADEMACHER:
                mult[r] = np.where(g.random(n) < 0.5, 1.0, -1.0)
            else:
                mult[r] = g.standard_normal(n)
        paths = steps_from_uniforms(cum_nu, cum_rows, U)
        # sup_f |n^-1 sum_i eps_i f(X_i)| per replica
        fx = values[:, paths]  # (F, count, n)
        sums = np.einsum("frn,rn->rf", fx, mult) / n
        return np.abs(sums).max(axis=1)

    sup = np.concatenate(map_replica_chunks(one_chunk, replicas, workers))
    value = float(sup.mean())
    se = float(sup.std(ddof=1) / math.sqrt(replicas)) if replicas > 1 else 0.0
    return ComplexityEstimate(
        kind=kind, value=value, stderr=se, replicas=replicas, n=n, method=MONTE_CARLO
    )


def _enumerate_paths(chain: ChainSpec, n: int, initial: np.ndarray | None = None):
    """All |S|^n paths with their chain-law probabilities."""
    k = chain.n_states
    paths = np.array(list(itertools.product(range(k), repeat=n)), dtype=np.int64)
    nu = chain.nu if initial is None else initial
    probs = nu[paths[:, 0]].copy()
    for t in range(1, n):
        probs *= chain.Q[paths[:, t - 1], paths[:, t]]
    return paths, probs


def _sign_patterns(n: int) -> np.ndarray:
    bits = (np.arange(2**n, dtype=np.int64)[:, None] >> np.arange(n)) & 1
    return bits * 2.0 - 1.0


def rademacher_complexity(
    fc: FunctionClass,
    chain: ChainSpec,
    n: int,
    replicas: int = DEFAULT_REPLICAS,
    seed: int = 0,
    exact: bool = False,
    stationary_start: bool = False,
    workers: int = 1,
) -> ComplexityEstimate:
    """R_n(F) = E sup_f |n^-1 sum_i eps_i f(X_i)|, expectation jointly over
    the trajectory and the signs.

    Monte-Carlo replica r draws a fresh trajectory and fresh signs from
    stream (seed, r). Exact mode enumerates all trajectories weighted by the
    chain law and all 2^n sign patterns (cap |S|^n 2^n <= 2^24).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not exact:
        return _mc_complexity(
            fc, chain, n, replicas, seed, RADEMACHER, stationary_start, workers
        )
    k = chain.n_states
    if (k**n) * (2**n) > EXACT_CAP:
        raise ExactTooLarge(f"|S|^n 2^n = {k**n * 2**n} exceeds {EXACT_CAP}")
    initial = stationary(chain).pi if stationary_start else None
    paths, probs = _enumerate_paths(chain, n, initial)
    signs = _sign_patterns(n)  # (E, n)
    best = None
    for f in range(fc.size):
        fx = fc.values[f][paths]  # (T, n)
        sums = np.abs(fx @ signs.T) / n  # (T, E)
        best = sums if best is None else np.maximum(best, sums)
    value = float(probs @ best.mean(axis=1))
    return ComplexityEstimate(
        kind=RADEMACHER, value=value, stderr=0.0, replicas=0, n=n, method=EXACT
    )


def gaussian_complexity(
    fc: FunctionClass,
    chain: ChainSpec,
    n: int,
    replicas: int = DEFAULT_REPLICAS,
    seed: int = 0,
    stationary_start: bool = False,
    workers: int = 1,
) -> ComplexityEstimate:
    """G_n(F) with i.i.d. standard normal multipliers; Monte Carlo only."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _mc_complexity(
        fc, chain, n, replicas, seed, GAUSSIAN, stationary_start, workers
    )


def conditional_rademacher(fc: FunctionClass, indices: np.ndarray, exact_cap: int = EXACT_CAP) -> float:
    """R_hat_n: E_eps sup_f |n^-1 sum_i eps_i f(X_i)| for a FIXED trajectory,
    by exact enumeration of the 2^n sign patterns."""
    n = len(indices)
    if fc.size * 2**n > exact_cap:
        raise ExactTooLarge(f"|F| 2^n = {fc.size * 2**n} exceeds {exact_cap}")
    signs = _sign_patterns(n)
    fx = fc.values[:, np.asarray(indices)]  # (F, n)
    sums = np.abs(fx @ signs.T) / n  # (F, E)
    return float(sums.max(axis=0).mean())


def multiclass_margin(fc: FunctionClass) -> FunctionClass:
    """Margins m_{f,y}(x) = f(x,y) - max_{y' != y} f(x,y') on lifted states."""
    if not fc.labeled or fc.n_labels is None or fc.n_labels < 2:
        raise ValueError("multiclass margins need a labeled class with |Y| >= 2")
    K = fc.n_labels
    nx = fc.n_states // K
    vals = fc.values.reshape(fc.size, nx, K)
    margins = np.empty_like(vals)
    for y in range(K):
        others = np.delete(vals, y, axis=2).max(axis=2)
        margins[:, :, y] = vals[:, :, y] - others
    return FunctionClass(
        values=margins.reshape(fc.size, nx * K),
        names=tuple(f"m[{name}]" for name in fc.names),
        M=2.0 * fc.M,
        labeled=True,
        n_labels=K,
    )


def margin_slice(fc: FunctionClass, y: int) -> FunctionClass:
    """Restriction f(., y) of every labeled function to one label column."""
    if not fc.labeled:
        raise ValueError("margin_slice needs a labeled class")
    K = fc.n_labels
    nx = fc.n_states // K
    vals = fc.values.reshape(fc.size, nx, K)[:, :, y]
    return FunctionClass(
        values=vals, names=tuple(f"{n}(.,{y})" for n in fc.names), M=fc.M
    )


def label_slices(fc: FunctionClass) -> FunctionClass:
    """The class {f(., y): f in F, y in Y} of all label slices on X."""
    if not fc.labeled:
        raise ValueError("label_slices needs a labeled class")
    K = fc.n_labels
    nx = fc.n_states // K
    vals = fc.values.reshape(fc.size, nx, K)
    flat = np.concatenate([vals[:, :, y] for y in range(K)], axis=0)
    names = tuple(f"{n}(.,{y})" for y in range(K) for n in fc.names)
    return FunctionClass(values=flat, names=names, M=fc.M)


def binary_margin_class(fc: FunctionClass, label_values=(1.0, -1.0)) -> FunctionClass:
    """Binary special case f~(x,y) = y f(x) on the lifted states S x {+1,-1}."""
    cols = [fc.values * y for y in label_values]
    lifted = np.stack(cols, axis=2).reshape(fc.size, fc.n_states * len(label_values))
    return FunctionClass(
        values=lifted,
        names=tuple(f"{n}~" for n in fc.names),
        M=fc.M,
        labeled=True,
        n_labels=len(label_values),
    )


def truncate_class(fc: FunctionClass, M_cut: float) -> FunctionClass:
    """Clamp every value to [-M_cut, M_cut] (the f_M truncation)."""
    if M_cut <= 0:
        raise ValueError("M_cut must be > 0")
    return FunctionClass(
        values=np.clip(fc.values, -M_cut, M_cut),
        names=fc.names,
        M=min(fc.M, M_cut),
        labeled=fc.labeled,
        n_labels=fc.n_labels,
    )


def pn_metric(fc: FunctionClass, weights: np.ndarray) -> np.ndarray:
    """Pairwise d_{P_n,2}(f,g) = (P_n |f-g|^2)^{1/2} under state weights."""
    diff = fc.values[:, None, :] - fc.values[None, :, :]
    return np.sqrt(np.einsum("ijs,s->ij", diff**2, weights))


def _traj_weights(fc: FunctionClass, traj: Trajectory) -> np.ndarray:
    _check_states(fc, traj.chain.n_states)
    return np.bincount(traj.indices, minlength=fc.n_states) / len(traj)


def covering_number(fc: FunctionClass, traj: Trajectory, u: float) -> tuple:
    """Greedy u-cover size N and entropy H = log N in d_{P_n,2}.

    Functions are scanned in class order; a new ball opens when no existing
    center lies within u. Greedy upper-bounds the minimal cover.
    """
    if u <= 0:
        raise ValueError("radius must be > 0")
    w = _traj_weights(fc, traj)
    dist = pn_metric(fc, w)
    centers = []
    for i in range(fc.size):
        if not any(dist[i, c] <= u for c in centers):
            centers.append(i)
    N = max(len(centers), 1)
    return N, math.log(N)


def covering_number_exact(fc: FunctionClass, traj: Trajectory, u: float, cap: int = 12) -> tuple:
    """Minimal internal u-cover via exhaustive set cover (|F| <= cap only)."""
    if u <= 0:
        raise ValueError("radius must be > 0")
    if fc.size > cap:
        raise ExactTooLarge(f"exact set cover limited to |F| <= {cap}")
    w = _traj_weights(fc, traj)
    dist = pn_metric(fc, w)
    covered_by = [frozenset(np.nonzero(dist[c] <= u)[0].tolist()) for c in range(fc.size)]
    everything = frozenset(range(fc.size))
    for size in range(1, fc.size + 1):
        for centers in itertools.combinations(range(fc.size), size):
            hit = frozenset().union(*(covered_by[c] for c in centers))
            if hit == everything:
                return size, math.log(size)
    return fc.size, math.log(fc.size)

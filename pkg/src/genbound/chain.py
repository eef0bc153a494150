"""Finite-state Markov chains: validation, stationary analysis, sampling, lifts.

A chain is a row-stochastic kernel Q over an ordered finite state set plus an
initial distribution nu. All arrays are copied and frozen at construction;
every function here is pure, so chains can be shared freely across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ChainValidationError, NotIrreducible
from .rng import stream

ROW_SUM_TOL = 1e-12
STATIONARY_TOL = 1e-10
EDGE_EPS = 1e-15


def _frozen(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ChainSpec:
    """Ordered states, row-stochastic kernel Q, initial distribution nu."""

    states: tuple
    Q: np.ndarray
    nu: np.ndarray

    def __init__(self, states, Q, nu):
        object.__setattr__(self, "states", tuple(states))
        object.__setattr__(self, "Q", _frozen(Q))
        object.__setattr__(self, "nu", _frozen(nu))

    @property
    def n_states(self) -> int:
        return len(self.states)

    def validated(self) -> "ChainSpec":
        violations = validate_chain(self)
        if violations:
            raise ChainValidationError(violations)
        return self


@dataclass(frozen=True)
class StationaryResult:
    pi: np.ndarray
    pi_star: float
    irreducible: bool
    reversible: bool

    def __init__(self, pi, pi_star, irreducible, reversible):
        object.__setattr__(self, "pi", _frozen(pi))
        object.__setattr__(self, "pi_star", float(pi_star))
        object.__setattr__(self, "irreducible", bool(irreducible))
        object.__setattr__(self, "reversible", bool(reversible))


@dataclass(frozen=True)
class Trajectory:
    chain: ChainSpec
    indices: np.ndarray
    seed: int

    def __init__(self, chain, indices, seed):
        object.__setattr__(self, "chain", chain)
        object.__setattr__(self, "indices", _frozen(indices, dtype=np.int64))
        object.__setattr__(self, "seed", int(seed))

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class KernelEstimate:
    """Plug-in transition estimate plus the rows it could not see."""

    chain: ChainSpec
    unvisited_rows: tuple = field(default=())


def validate_chain(spec: ChainSpec) -> list:
    """Return a list of human-readable invariant violations (empty = valid)."""
    violations = []
    k = spec.n_states
    if k < 1:
        return ["state set is empty"]
    if spec.Q.shape != (k, k):
        return [f"Q has shape {spec.Q.shape}, expected ({k}, {k})"]
    if spec.nu.shape != (k,):
        return [f"nu has shape {spec.nu.shape}, expected ({k},)"]
    bad = np.argwhere(~np.isfinite(spec.Q))
    if bad.size:
        i, j = bad[0]
        violations.append(f"Q[{i}][{j}] is not finite")
    bad = np.argwhere(~np.isfinite(spec.nu))
    if bad.size:
        violations.append(f"nu[{bad[0][0]}] is not finite")
    if violations:
        return violations
    neg = np.argwhere(spec.Q < 0)
    for i, j in neg[:4]:
        violations.append(f"Q[{i}][{j}] = {spec.Q[i, j]} is negative")
    for i, s in enumerate(spec.Q.sum(axis=1)):
        if abs(s - 1.0) > ROW_SUM_TOL:
            violations.append(f"row {i} sums to {s!r}")
    neg = np.argwhere(spec.nu < 0)
    for (i,) in neg[:4]:
        violations.append(f"nu[{i}] = {spec.nu[i]} is negative")
    s = spec.nu.sum()
    if abs(s - 1.0) > ROW_SUM_TOL:
        violations.append(f"nu sums to {s!r}")
    return violations


def _strong_components(Q: np.ndarray):
    adj = csr_matrix((Q > EDGE_EPS).astype(np.int8))
    return connected_components(adj, directed=True, connection="strong")


def closed_class_count(spec: ChainSpec) -> tuple:
    """(number of SCCs, number of closed SCCs) of the positive-entry digraph."""
    n_comp, labels = _strong_components(spec.Q)
    closed = np.ones(n_comp, dtype=bool)
    rows, cols = np.nonzero(spec.Q > EDGE_EPS)
    for i, j in zip(rows, cols):
        if labels[i] != labels[j]:
            closed[labels[i]] = False
    return n_comp, int(closed.sum())


def stationary(spec: ChainSpec) -> StationaryResult:
    """Solve pi Q = pi by a direct dense solve; decide irreducibility and
    reversibility.

    Raises NotIrreducible when several closed communicating classes exist
    (pi is then not unique).
    """
    n_comp, n_closed = closed_class_count(spec)
    if n_closed > 1:
        raise NotIrreducible(
            f"{n_closed} closed communicating classes; stationary law not unique"
        )
    k = spec.n_states
    # Rows of (Q^T - I) sum to the zero row, so the last row is redundant and
    # can carry the normalization constraint instead.
    A = spec.Q.T - np.eye(k)
    A[-1, :] = 1.0
    b = np.zeros(k)
    b[-1] = 1.0
    pi = np.linalg.solve(A, b)
    pi = np.where(pi > 0.0, pi, 0.0)
    pi = pi / pi.sum()
    resid = float(np.max(np.abs(pi @ spec.Q - pi)))
    if resid > STATIONARY_TOL:
        raise NotIrreducible(f"pi Q = pi residual {resid:g} exceeds {STATIONARY_TOL:g}")
    flux = pi[:, None] * spec.Q
    reversible = bool(np.max(np.abs(flux - flux.T)) < STATIONARY_TOL)
    return StationaryResult(
        pi=pi,
        pi_star=float(pi.min()),
        irreducible=(n_comp == 1),
        reversible=reversible,
    )


def _cumulative_rows(Q: np.ndarray) -> np.ndarray:
    return np.cumsum(Q, axis=1)


def steps_from_uniforms(cum_nu: np.ndarray, cum_rows: np.ndarray, U: np.ndarray) -> np.ndarray:
    """Walk trajectories from a (replicas, n) uniform matrix.

    Column 0 draws the initial state from nu, column k the k-th transition.
    The inverse-CDF rule is `count of cumulative weights <= u`, identical for
    every caller so that equal seeds give bit-equal paths.
    """
    R, n = U.shape
    k = cum_rows.shape[0]
    paths = np.empty((R, n), dtype=np.int64)
    cur = np.minimum((U[:, 0, None] >= cum_nu[None, :]).sum(axis=1), k - 1)
    paths[:, 0] = cur
    for t in range(1, n):
        rows = cum_rows[cur]
        cur = np.minimum((U[:, t, None] >= rows).sum(axis=1), k - 1)
        paths[:, t] = cur
    return paths


def sample_paths(
    spec: ChainSpec,
    n: int,
    seed: int,
    replicas: int = 1,
    start_index: int = 0,
    initial: np.ndarray | None = None,
) -> np.ndarray:
    """(replicas, n) state-index paths; row r uses stream (seed, start_index+r).

    `initial` overrides nu (used by the stationary-start toggle).
    """
    if n < 1:
        raise ValueError("trajectory length must be >= 1")
    nu = spec.nu if initial is None else np.asarray(initial, dtype=float)
    cum_nu = np.cumsum(nu)
    cum_rows = _cumulative_rows(spec.Q)
    U = np.empty((replicas, n))
    for r in range(replicas):
        U[r] = stream(seed, start_index + r).random(n)
    return steps_from_uniforms(cum_nu, cum_rows, U)


def sample_trajectory(spec: ChainSpec, n: int, seed: int) -> Trajectory:
    """Single trajectory X_1 ~ nu, X_{k+1} ~ Q(X_k, .); deterministic in seed."""
    indices = sample_paths(spec, n, seed, replicas=1)[0]
    return Trajectory(chain=spec, indices=indices, seed=seed)


def lift_hmm(spec: ChainSpec, emission: np.ndarray, labels=None) -> ChainSpec:
    """Labeled chain over S x Y with kernel Q(x,x') g(x',y').

    Lifted states are ordered row-major, state-then-label; the initial law is
    nu(x) g(x,y).
    """
    g = np.asarray(emission, dtype=float)
    k = spec.n_states
    if g.ndim != 2 or g.shape[0] != k:
        raise ChainValidationError([f"emission has shape {g.shape}, expected ({k}, |Y|)"])
    if not np.all(np.isfinite(g)) or np.any(g < 0):
        raise ChainValidationError(["emission entries must be finite and >= 0"])
    rows = g.sum(axis=1)
    bad = np.argwhere(np.abs(rows - 1.0) > ROW_SUM_TOL)
    if bad.size:
        i = bad[0][0]
        raise ChainValidationError([f"emission row {i} sums to {rows[i]!r}"])
    m = g.shape[1]
    if labels is None:
        labels = tuple(range(m))
    states = tuple((s, y) for s in spec.states for y in labels)
    # Qt[(x,y),(x',y')] = Q[x,x'] g[x',y'], independent of y.
    Qt = np.repeat(np.repeat(spec.Q, m, axis=0), m, axis=1) * g.reshape(1, k * m)
    nut = (spec.nu[:, None] * g).reshape(-1)
    return ChainSpec(states=states, Q=Qt, nu=nut)


def lift_prior_product(spec: ChainSpec, prior: np.ndarray, w_labels=None) -> ChainSpec:
    """Product chain over S x W with kernel Q(x,x') P_W(w')."""
    p = np.asarray(prior, dtype=float)
    if p.ndim != 1 or not np.all(np.isfinite(p)) or np.any(p < 0):
        raise ChainValidationError(["prior must be a finite nonnegative vector"])
    if abs(p.sum() - 1.0) > ROW_SUM_TOL:
        raise ChainValidationError([f"prior sums to {p.sum()!r}"])
    emission = np.tile(p, (spec.n_states, 1))
    return lift_hmm(spec, emission, labels=w_labels)


def window_lift(spec: ChainSpec, m: int) -> ChainSpec:
    """First-order chain over length-m state windows (oldest entry first).

    Window state (x_1..x_m) moves to (x_2..x_m, x') with probability
    Q(x_m, x'); the initial law is nu(x_1) Q(x_1,x_2)...Q(x_{m-1},x_m).
    """
    if m < 1:
        raise ValueError("window must be >= 1")
    if m == 1:
        return spec
    k = spec.n_states
    windows = [()]
    for _ in range(m):
        windows = [w + (s,) for w in windows for s in range(k)]
    index = {w: i for i, w in enumerate(windows)}
    K = k**m
    Q = np.zeros((K, K))
    nu = np.zeros(K)
    for w, i in index.items():
        for s in range(k):
            Q[i, index[w[1:] + (s,)]] += spec.Q[w[-1], s]
        p = spec.nu[w[0]]
        for a, b in zip(w[:-1], w[1:]):
            p *= spec.Q[a, b]
        nu[i] = p
    states = tuple(tuple(spec.states[s] for s in w) for w in windows)
    return ChainSpec(states=states, Q=Q, nu=nu)


def estimate_kernel(traj: Trajectory, smoothing: float = 0.0) -> KernelEstimate:
    """Naive plug-in estimate Q_hat from transition counts.

    Q_hat(x,y) = (count(x->y) + a) / (count(x->.) + |S| a); nu_hat is a point
    mass at X_1. Rows never visited with zero smoothing fall back to uniform
    and are reported in `unvisited_rows`.
    """
    if smoothing < 0:
        raise ValueError("smoothing must be >= 0")
    if len(traj) < 2:
        raise ValueError("need at least 2 observations to estimate a kernel")
    spec = traj.chain
    k = spec.n_states
    counts = np.zeros((k, k))
    np.add.at(counts, (traj.indices[:-1], traj.indices[1:]), 1.0)
    totals = counts.sum(axis=1)
    unvisited = tuple(int(i) for i in np.nonzero(totals == 0)[0])
    Q = counts + smoothing
    denom = totals + k * smoothing
    if smoothing == 0:
        for i in unvisited:
            Q[i, :] = 1.0
            denom[i] = k
    Q = Q / denom[:, None]
    nu = np.zeros(k)
    nu[traj.indices[0]] = 1.0
    est = ChainSpec(states=spec.states, Q=Q, nu=nu)
    return KernelEstimate(chain=est, unvisited_rows=unvisited if smoothing == 0 else ())

"""Reductions of higher-order processes to first-order form.

Covers the companion lift for linear recursions, the affine variant with an
offset, the ARMA(m, q) block state-space lift with cumulative-noise
coordinates, and the mixture-of-services triangular coordinate change. Dual
simulations (direct recursion vs lifted system on one shared noise stream)
are the equivalence oracle throughout, so the lift steps accumulate row
products in the same order as the direct recursions.

Offset convention: u = c / (1 - sum a_i) is the fixed point of the affine
recursion and the lifted coordinates store X - u, which is what actually
makes the shifted system linear (the shifted recursion Z_k = sum a_i Z_{k-i}
holds for Z = X - u, not X + u).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .chain import ChainSpec
from .errors import UnitRootOffset, ZeroMixtureWeight
from .rng import stream

UNIT_ROOT_TOL = 1e-12


def _companion(a: np.ndarray) -> np.ndarray:
    m = len(a)
    G = np.zeros((m, m))
    G[0, :] = a
    for i in range(1, m):
        G[i, i - 1] = 1.0
    return G


@dataclass(frozen=True)
class CompanionLift:
    """First-order form Y_{k+1} = G Y_k (+ offset bookkeeping).

    Y stacks the window (newest first) of shifted values X - u.
    """

    G: np.ndarray
    order: int
    coefficients: np.ndarray
    offset: float = 0.0

    def __init__(self, G, order, coefficients, offset=0.0):
        G = np.array(G, dtype=float)
        G.setflags(write=False)
        coeffs = np.array(coefficients, dtype=float)
        coeffs.setflags(write=False)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "order", int(order))
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "offset", float(offset))

    def step(self, y: np.ndarray) -> np.ndarray:
        """One lift step with row-0 accumulation matching the direct recursion."""
        a = self.coefficients
        acc = 0.0
        for i in range(self.order):
            acc += a[i] * y[i]
        out = np.empty_like(y)
        out[0] = acc
        out[1:] = y[:-1]
        return out

    def simulate(self, history, steps: int) -> np.ndarray:
        """X_{m+1}..X_{m+steps} from the lift; history is X_1..X_m (oldest first)."""
        hist = np.asarray(history, dtype=float)
        if len(hist) != self.order:
            raise ValueError(f"history must hold exactly {self.order} values")
        y = hist[::-1] - self.offset
        out = np.empty(steps)
        for k in range(steps):
            y = self.step(y)
            out[k] = y[0] + self.offset
        return out

    def simulate_direct(self, history, steps: int) -> np.ndarray:
        """Direct recursion oracle with identical accumulation order."""
        a = self.coefficients
        u = self.offset
        buf = list((np.asarray(history, dtype=float) - u)[::-1])
        out = np.empty(steps)
        for k in range(steps):
            acc = 0.0
            for i in range(self.order):
                acc += a[i] * buf[i]
            buf = [acc] + buf[:-1]
            out[k] = acc + u
        return out


def companion_lift(a) -> CompanionLift:
    """Companion form of X_k = sum_i a_i X_{k-i}."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or len(a) == 0:
        raise ValueError("need at least one coefficient")
    return CompanionLift(G=_companion(a), order=len(a), coefficients=a, offset=0.0)


def affine_lift(partials, const_part: float) -> CompanionLift:
    """Companion lift of X_k = sum_i a_i X_{k-i} + c on shifted coordinates.

    u = c / (1 - sum a_i); the lift runs on Z = X - u. sum a_i = 1 leaves u
    undefined (unit root).
    """
    a = np.asarray(partials, dtype=float)
    if a.ndim != 1 or len(a) == 0:
        raise ValueError("need at least one coefficient")
    denom = 1.0 - a.sum()
    if abs(denom) <= UNIT_ROOT_TOL:
        raise UnitRootOffset("sum of coefficients is 1; offset u undefined")
    u = const_part / denom
    return CompanionLift(G=_companion(a), order=len(a), coefficients=a, offset=u)


@dataclass(frozen=True)
class ArmaLift:
    """(m+q+1)-dimensional lift of ARMA(m, q) with cumulative noise V_k.

    State: [Z_{k+m-1}..Z_k, V_{k+m-1}..V_{k+m-q-1}] with Z = X - u; the
    innovation enters coordinates 0 and m.
    """

    G: np.ndarray
    m: int
    q: int
    c: float
    a: np.ndarray
    theta: np.ndarray
    sigma: float
    u: float

    def __init__(self, G, m, q, c, a, theta, sigma, u):
        G = np.array(G, dtype=float)
        G.setflags(write=False)
        a = np.array(a, dtype=float)
        a.setflags(write=False)
        theta = np.array(theta, dtype=float)
        theta.setflags(write=False)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "q", int(q))
        object.__setattr__(self, "c", float(c))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "sigma", float(sigma))
        object.__setattr__(self, "u", float(u))

    @property
    def dim(self) -> int:
        return self.m + self.q + 1

    @property
    def noise_positions(self) -> tuple:
        return (0, self.m)

    def simulate(self, noise: np.ndarray) -> np.ndarray:
        """X_1..X_N from the lifted recursion, zero history, shared noise."""
        m, q = self.m, self.q
        a, th = self.a, self.theta
        y = np.zeros(self.dim)
        out = np.empty(len(noise))
        for k, eps in enumerate(noise):
            acc = 0.0
            for i in range(m):
                acc += a[i] * y[i]
            # theta-difference row over [V_new-1 .. V_new-q-1]
            acc += th[0] * y[m]
            for i in range(1, q):
                acc += (th[i] - th[i - 1]) * y[m + i]
            acc += -th[q - 1] * y[m + q]
            acc += eps
            v_new = eps + y[m]
            y = np.concatenate(([acc], y[: m - 1], [v_new], y[m : m + q]))
            out[k] = y[0] + self.u
        return out

    def simulate_direct(self, noise: np.ndarray) -> np.ndarray:
        """Direct ARMA recursion on the same noise stream, zero history."""
        m, q = self.m, self.q
        xs = [self.u] * m  # Z history = 0
        eps_hist = [0.0] * q
        out = np.empty(len(noise))
        for k, eps in enumerate(noise):
            acc = self.c + eps
            for i in range(m):
                acc += self.a[i] * xs[i]
            for i in range(q):
                acc += self.theta[i] * eps_hist[i]
            xs = [acc] + xs[: m - 1]
            eps_hist = [eps] + eps_hist[: q - 1]
            out[k] = acc
        return out

    def gaussian_noise(self, steps: int, seed: int) -> np.ndarray:
        return self.sigma * stream(seed).standard_normal(steps)


def arma_lift(c: float, a, theta, sigma: float = 1.0) -> ArmaLift:
    """Block state-space lift of X_k = c + eps_k + sum a_i X_{k-i} + sum theta_i eps_{k-i}."""
    a = np.asarray(a, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if a.ndim != 1 or len(a) == 0:
        raise ValueError("need m >= 1 autoregressive coefficients")
    if theta.ndim != 1 or len(theta) == 0:
        raise ValueError("need q >= 1 moving-average coefficients")
    denom = 1.0 - a.sum()
    if abs(denom) <= UNIT_ROOT_TOL:
        raise UnitRootOffset("sum of AR coefficients is 1; offset u undefined")
    m, q = len(a), len(theta)
    u = c / denom
    G = np.zeros((m + q + 1, m + q + 1))
    G[:m, :m] = _companion(a)
    # G12 row 0: theta_1, theta_2 - theta_1, ..., theta_q - theta_{q-1}, -theta_q
    G[0, m] = theta[0]
    for i in range(1, q):
        G[0, m + i] = theta[i] - theta[i - 1]
    G[0, m + q] = -theta[q - 1]
    # G22: V_new = eps + V_prev; older V coordinates shift down
    G[m, m] = 1.0
    for i in range(1, q + 1):
        G[m + i, m + i - 1] = 1.0
    return ArmaLift(G=G, m=m, q=q, c=c, a=a, theta=theta, sigma=sigma, u=u)


@dataclass(frozen=True)
class MixtureLift:
    """Triangular coordinate change Z = G X for Y_k = sum_l alpha_l X_k^(l).

    product_chain is the first-order chain of the stacked components; the
    observable Y is coordinate 0 of Z.
    """

    G: np.ndarray
    alphas: np.ndarray
    components: tuple
    product_chain: ChainSpec
    state_values: tuple

    def __init__(self, G, alphas, components, product_chain, state_values):
        G = np.array(G, dtype=float)
        G.setflags(write=False)
        alphas = np.array(alphas, dtype=float)
        alphas.setflags(write=False)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "components", tuple(components))
        object.__setattr__(self, "product_chain", product_chain)
        object.__setattr__(self, "state_values", tuple(state_values))

    @property
    def det(self) -> float:
        return float(np.prod(self.alphas))

    def component_indices(self, product_index: int) -> tuple:
        """Unmix a product-chain state index into per-component indices."""
        sizes = [len(v) for v in self.state_values]
        out = []
        rem = product_index
        for size in reversed(sizes):
            out.append(rem % size)
            rem //= size
        return tuple(reversed(out))

    def observable(self, product_index: int) -> float:
        """Y = sum_l alpha_l x^(l), accumulated left to right."""
        idx = self.component_indices(product_index)
        acc = 0.0
        for l, (al, vals) in enumerate(zip(self.alphas, self.state_values)):
            acc += al * vals[idx[l]]
        return acc

    def z_vector(self, product_index: int) -> np.ndarray:
        """Z = G x with row sums accumulated in the same order as observable()."""
        idx = self.component_indices(product_index)
        x = np.array([vals[i] for vals, i in zip(self.state_values, idx)])
        m = len(self.alphas)
        z = np.empty(m)
        for row in range(m):
            acc = 0.0
            for l in range(row, m):
                acc += self.alphas[l] * x[l]
            z[row] = acc
        return z


def mixture_lift(kernels, alphas) -> MixtureLift:
    """Product chain over S_1 x ... x S_m with the triangular mixing matrix.

    Component states must be numeric (their values enter Y = sum alpha_l X^l).
    """
    alphas = np.asarray(alphas, dtype=float)
    if alphas.ndim != 1 or len(alphas) != len(kernels) or len(kernels) == 0:
        raise ValueError("need one weight per component chain")
    if np.any(alphas == 0.0):
        raise ZeroMixtureWeight("all mixture weights must be nonzero")
    state_values = []
    for spec in kernels:
        spec.validated()
        try:
            state_values.append(tuple(float(s) for s in spec.states))
        except (TypeError, ValueError):
            raise ValueError("mixture component states must be numeric")
    m = len(kernels)
    G = np.zeros((m, m))
    for row in range(m):
        G[row, row:] = alphas[row:]
    Q = kernels[0].Q
    nu = kernels[0].nu
    states = [(s,) for s in kernels[0].states]
    for spec in kernels[1:]:
        Q = np.kron(Q, spec.Q)
        nu = np.kron(nu, spec.nu)
        states = [s + (t,) for s in states for t in spec.states]
    product = ChainSpec(states=tuple(states), Q=Q, nu=nu)
    return MixtureLift(
        G=G,
        alphas=alphas,
        components=tuple(kernels),
        product_chain=product,
        state_values=tuple(state_values),
    )


def lift_function(f_values, window: int) -> np.ndarray:
    """Tabulate f~ over length-`window` state windows (oldest first):
    f~(x_k, ..., x_{k+window-1}) = f(x_k), so indicator sums over the
    original trajectory and over windows agree exactly."""
    f = np.asarray(f_values, dtype=float)
    if window < 1:
        raise ValueError("window must be >= 1")
    k = len(f)
    reps = k ** (window - 1)
    return np.repeat(f, reps)


def window_indices(indices: np.ndarray, window: int, n_states: int) -> np.ndarray:
    """Map a state-index trajectory to lifted window-state indices
    (window i covers positions i..i+window-1, oldest first)."""
    idx = np.asarray(indices, dtype=np.int64)
    n = len(idx) - window + 1
    if n < 1:
        raise ValueError("trajectory shorter than the window")
    out = np.zeros(n, dtype=np.int64)
    for j in range(window):
        out = out * n_states + idx[j : j + n]
    return out


def discretize_ar1(
    phi: float, sigma: float, lo: float, hi: float, bins: int, c: float = 0.0
) -> ChainSpec:
    """Finite-chain surrogate of X' = c + phi X + eps, eps ~ N(0, sigma^2).

    Uniform bins over [lo, hi]; each row is the Gaussian step law from the
    bin center, mass truncated to the range and renormalized. States are the
    bin centers. The initial law is the centered bin's point mass.
    """
    if bins < 2:
        raise ValueError("need at least 2 bins")
    if hi <= lo:
        raise ValueError("empty range")
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    edges = np.linspace(lo, hi, bins + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    z = (edges[None, :] - (c + phi * centers)[:, None]) / (sigma * math.sqrt(2.0))
    cdf = 0.5 * (1.0 + erf(z))
    Q = np.diff(cdf, axis=1)
    mass = Q.sum(axis=1, keepdims=True)
    if np.any(mass <= 0.0):
        raise ValueError("range carries no kernel mass from some bin; widen it")
    Q = Q / mass
    nu = np.zeros(bins)
    nu[int(np.argmin(np.abs(centers)))] = 1.0
    return ChainSpec(states=tuple(float(x) for x in centers), Q=Q, nu=nu)


def discretization_tv(
    phi: float, sigma: float, lo: float, hi: float, bins: int, c: float = 0.0
) -> float:
    """Resolution diagnostic: max-row TV distance between the B-bin one-step
    kernel and the 2B-bin kernel coarsened back to B bins."""
    coarse = discretize_ar1(phi, sigma, lo, hi, bins, c).Q
    fine = discretize_ar1(phi, sigma, lo, hi, 2 * bins, c).Q
    folded_cols = fine.reshape(2 * bins, bins, 2).sum(axis=2)
    folded = 0.5 * (folded_cols[0::2, :] + folded_cols[1::2, :])
    return float(0.5 * np.abs(coarse - folded).sum(axis=1).max())

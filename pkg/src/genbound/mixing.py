"""Total-variation mixing profile d(t), mixing times, and tau_min.

d(t) is the worst-case TV distance between the t-step law from any start
and pi. t_mix(eps) is the first time d drops to eps, t_mix = t_mix(1/4), and
tau_min = inf_eps t_mix(eps) ((2-eps)/(1-eps))^2.

The literal infimum admits eps >= d(0) = 1 - pi_*, where t_mix(eps) = 0 and
tau_min collapses to 0; the guarded mode (default) clamps t_mix(eps) >= 1,
equivalently redefines d(0) := 1, which keeps every downstream tail bound
finite. Both modes are exposed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import ChainSpec, StationaryResult, stationary
from .errors import HorizonUnresolved
from .spectral import absolute_gap

GUARDED = "guarded"
LITERAL = "literal"

CONVERGED_LEVEL = 1e-6
MONOTONE_TOL = 1e-12


@dataclass(frozen=True)
class MixingProfile:
    """Tabulated d(0..T_max) (monotone-smoothed) plus derived quantities."""

    d_values: np.ndarray
    T_max: int
    t_mix_quarter: float
    tau_min: float
    guard_mode: str
    converged: bool

    def __init__(self, d_values, T_max, t_mix_quarter, tau_min, guard_mode, converged):
        d = np.array(d_values, dtype=float)
        d.setflags(write=False)
        object.__setattr__(self, "d_values", d)
        object.__setattr__(self, "T_max", int(T_max))
        object.__setattr__(self, "t_mix_quarter", t_mix_quarter)
        object.__setattr__(self, "tau_min", float(tau_min))
        object.__setattr__(self, "guard_mode", guard_mode)
        object.__setattr__(self, "converged", bool(converged))


def default_horizon(spec: ChainSpec, gamma_star: float | None = None) -> int:
    """10 |S| ceil(1/gamma*) when gamma* > 0; geometric decay makes this
    generous. Periodic chains (gamma* = 0) need a user-supplied horizon."""
    g = absolute_gap(spec) if gamma_star is None else gamma_star
    if g <= 0.0:
        raise ValueError(
            "gamma* = 0: d(t) may not converge, supply T_max explicitly"
        )
    return 10 * spec.n_states * math.ceil(1.0 / g)


def tv_profile(
    spec: ChainSpec, stat: StationaryResult, T_max: int | None = None
) -> np.ndarray:
    """d(t) = max_x TV(Q^t(x,.), pi) for t = 0..T_max, monotone-smoothed.

    Computed by iterated multiplies; d(t) is nonincreasing for these kernels,
    so a running minimum only absorbs 1e-14-level float ripple. The raw ripple
    is asserted small before smoothing.
    """
    if T_max is None:
        T_max = default_horizon(spec)
        raw = []
        P = np.eye(spec.n_states)
        for _ in range(T_max + 1):
            raw.append(0.5 * np.abs(P - stat.pi[None, :]).sum(axis=1).max())
            if raw[-1] < CONVERGED_LEVEL:
                break
            P = P @ spec.Q
        d = np.array(raw)
    else:
        d = np.empty(T_max + 1)
        P = np.eye(spec.n_states)
        for t in range(T_max + 1):
            d[t] = 0.5 * np.abs(P - stat.pi[None, :]).sum(axis=1).max()
            if t < T_max:
                P = P @ spec.Q
    return np.minimum.accumulate(d)


def t_mix(d_values: np.ndarray, epsilon: float, guard_mode: str = GUARDED) -> int:
    """min{t : d(t) <= epsilon}; guarded mode clamps the answer to >= 1.

    Raises HorizonUnresolved when the profile never reaches epsilon; the
    caller may extend T_max.
    """
    if not (0.0 <= epsilon < 1.0 or epsilon == 1.0):
        raise ValueError("epsilon must lie in [0, 1]")
    hits = np.nonzero(d_values <= epsilon)[0]
    if hits.size == 0:
        raise HorizonUnresolved(len(d_values) - 1, epsilon)
    t = int(hits[0])
    if guard_mode == GUARDED:
        return max(t, 1)
    return t


def tau_min(d_values: np.ndarray, guard_mode: str = GUARDED) -> float:
    """Exact minimization of t_mix(eps) ((2-eps)/(1-eps))^2 over eps.

    t_mix(eps) is a right-continuous step function whose jumps sit exactly at
    the attained values eps = d(t), and the factor is increasing in eps, so
    candidates eps in {d(t)} realize the infimum. Guarded mode starts the
    candidate scan at t = 1 (d(0) := 1) and clamps t_mix >= 1.
    """
    start = 1 if guard_mode == GUARDED else 0
    best = math.inf
    for t in range(start, len(d_values)):
        eps = float(d_values[t])
        if eps >= 1.0:
            continue
        s = t_mix(d_values, eps, guard_mode)
        ratio = (2.0 - eps) / (1.0 - eps)
        best = min(best, s * ratio * ratio)
    return best


def tau_min_grid(d_values: np.ndarray, guard_mode: str = GUARDED, step: float = 1e-4) -> float:
    """Dense eps-grid search used as a cross-check oracle for tau_min."""
    best = math.inf
    for eps in np.arange(step, 1.0, step):
        try:
            s = t_mix(d_values, float(eps), guard_mode)
        except HorizonUnresolved:
            continue
        ratio = (2.0 - eps) / (1.0 - eps)
        best = min(best, s * ratio * ratio)
    return best


def gap_mixing_bracket(gamma_star: float, pi_star: float) -> tuple:
    """((1/gamma* - 1) log 2, log(4/pi_*)/gamma*); vacuous (inf, inf) when
    gamma* = 0."""
    if not (0.0 < pi_star <= 1.0):
        raise ValueError("pi_star must lie in (0, 1]")
    if gamma_star <= 0.0:
        return (math.inf, math.inf)
    lower = (1.0 / gamma_star - 1.0) * math.log(2.0)
    upper = math.log(4.0 / pi_star) / gamma_star
    return (lower, upper)


def mixing_profile(
    spec: ChainSpec,
    stat: StationaryResult | None = None,
    T_max: int | None = None,
    guard_mode: str = GUARDED,
) -> MixingProfile:
    """Assemble the full profile; unreached quantities become +inf."""
    if stat is None:
        stat = stationary(spec)
    d = tv_profile(spec, stat, T_max)
    try:
        tmq = float(t_mix(d, 0.25, guard_mode))
    except HorizonUnresolved:
        tmq = math.inf
    return MixingProfile(
        d_values=d,
        T_max=len(d) - 1,
        t_mix_quarter=tmq,
        tau_min=tau_min(d, guard_mode),
        guard_mode=guard_mode,
        converged=bool(d[-1] < CONVERGED_LEVEL),
    )

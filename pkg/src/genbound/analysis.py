"""One-stop chain analysis: stationary law, spectral gaps, mixing profile.

The resulting bundle carries every chain-side input the bound evaluators
need (lambda, chi divergence, tau_min), so Monte-Carlo loops never recompute
them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .chain import ChainSpec, StationaryResult, stationary
from .mixing import GUARDED, LITERAL, MixingProfile, gap_mixing_bracket, mixing_profile
from .spectral import PI_WEIGHTED, SpectralReport, spectral_report


@dataclass(frozen=True)
class ChainAnalysis:
    chain: ChainSpec
    stationary: StationaryResult
    spectral: SpectralReport
    profile: MixingProfile
    tau_min_guarded: float
    tau_min_literal: float

    @property
    def lambda_(self) -> float:
        return self.spectral.lambda_

    @property
    def gamma_star(self) -> float:
        return self.spectral.gamma_star

    @property
    def chi_div(self) -> float:
        return self.spectral.chi_div

    @property
    def t_mix(self) -> float:
        return self.profile.t_mix_quarter

    def tau_min(self, guard_mode: str = GUARDED) -> float:
        return self.tau_min_guarded if guard_mode == GUARDED else self.tau_min_literal


def analyze_chain(
    spec: ChainSpec,
    T_max: int | None = None,
    convention: str = PI_WEIGHTED,
) -> ChainAnalysis:
    spec.validated()
    stat = stationary(spec)
    spec_report = spectral_report(spec, stat, convention)
    profile = mixing_profile(spec, stat, T_max, GUARDED)
    from .mixing import tau_min as _tau

    return ChainAnalysis(
        chain=spec,
        stationary=stat,
        spectral=spec_report,
        profile=profile,
        tau_min_guarded=profile.tau_min,
        tau_min_literal=_tau(profile.d_values, LITERAL),
    )


def analysis_dict(a: ChainAnalysis, profile_head: int = 50) -> dict:
    """Report with the exact field names the CLI contract fixes."""
    bracket = gap_mixing_bracket(a.gamma_star, a.stationary.pi_star) if a.gamma_star > 0 else (math.inf, math.inf)
    return {
        "states": list(map(str, a.chain.states)),
        "pi": [float(x) for x in a.stationary.pi],
        "pi_star": a.stationary.pi_star,
        "irreducible": a.stationary.irreducible,
        "reversible": a.stationary.reversible,
        "lambda": a.spectral.lambda_,
        "gamma_star": a.spectral.gamma_star,
        "spectrum": [{"re": z.real, "im": z.imag} for z in a.spectral.spectrum],
        "chi_div_pi_weighted": a.spectral.chi_div_pi_weighted,
        "chi_div_unweighted": a.spectral.chi_div_unweighted,
        "in_m2": a.spectral.in_M2,
        "norm_convention": a.spectral.norm_convention,
        "d_profile": [float(x) for x in a.profile.d_values[: profile_head]],
        "profile_horizon": a.profile.T_max,
        "profile_converged": a.profile.converged,
        "t_mix": a.profile.t_mix_quarter,
        "tau_min_guarded": a.tau_min_guarded,
        "tau_min_literal": a.tau_min_literal,
        "t_mix_bracket_lower": bracket[0],
        "t_mix_bracket_upper": bracket[1],
    }

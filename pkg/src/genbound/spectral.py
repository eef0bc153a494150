"""Spectral quantities of a finite kernel.

lambda is the L2(pi) operator norm of Q minus the rank-one averaging
operator E_pi, realized on a finite space as the largest singular value of
D^{1/2} (Q - 1 pi^T) D^{-1/2} with D = diag(pi). gamma_star is the absolute
spectral gap. The initial-distribution divergence ||d nu/d pi - 1||_2 is
offered in both the pi-weighted and unweighted conventions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import ChainSpec, StationaryResult, closed_class_count, stationary
from .errors import DivergentDensity, NotIrreducible

UNIT_CLUSTER_TOL = 1e-9

PI_WEIGHTED = "pi-weighted"
UNWEIGHTED = "unweighted"


@dataclass(frozen=True)
class SpectralReport:
    lambda_: float
    gamma_star: float
    spectrum: tuple
    chi_div_pi_weighted: float
    chi_div_unweighted: float
    in_M2: bool
    norm_convention: str

    @property
    def chi_div(self) -> float:
        if self.norm_convention == PI_WEIGHTED:
            return self.chi_div_pi_weighted
        return self.chi_div_unweighted


def _deflated(spec: ChainSpec, pi: np.ndarray) -> np.ndarray:
    return spec.Q - np.outer(np.ones(spec.n_states), pi)


def l2_gap(spec: ChainSpec, stat: StationaryResult) -> float:
    """Largest singular value of D^{1/2}(Q - 1 pi^T)D^{-1/2}."""
    if not stat.irreducible:
        raise NotIrreducible("lambda requires an irreducible chain")
    pi = stat.pi
    if pi.min() <= 0.0:
        raise NotIrreducible("pi must be strictly positive")
    d = np.sqrt(pi)
    A = (d[:, None] * _deflated(spec, pi)) / d[None, :]
    return float(np.linalg.svd(A, compute_uv=False)[0])


def spectrum(spec: ChainSpec) -> np.ndarray:
    """Eigenvalues of Q (the finite-chain spectrum S2), unsorted."""
    return np.linalg.eigvals(spec.Q)


def absolute_gap(spec: ChainSpec) -> float:
    """1 minus the largest non-unit eigenvalue modulus; 0 when eigenvalue 1
    is not simple (clustering tolerance 1e-9).

    When the unit eigenvalue is simple the non-unit spectrum equals the
    spectrum of the deflated kernel Q - 1 pi^T, which is numerically exact
    for i.i.d. chains.
    """
    eigs = spectrum(spec)
    unit_multiplicity = int(np.sum(np.abs(eigs - 1.0) <= UNIT_CLUSTER_TOL))
    if unit_multiplicity != 1:
        return 0.0
    _, n_closed = closed_class_count(spec)
    if n_closed != 1:
        return 0.0
    stat = stationary(spec)
    rest = np.linalg.eigvals(_deflated(spec, stat.pi))
    return float(1.0 - np.abs(rest).max())


def chi_divergence(
    spec: ChainSpec, stat: StationaryResult, convention: str = PI_WEIGHTED
) -> float:
    """||d nu/d pi - 1||_2 under the chosen convention.

    pi-weighted: sqrt(sum_x pi(x) (nu(x)/pi(x) - 1)^2); unweighted drops the
    pi(x) weight. States outside the support of pi must carry no nu mass.
    """
    if convention not in (PI_WEIGHTED, UNWEIGHTED):
        raise ValueError(f"unknown convention {convention!r}")
    pi, nu = stat.pi, spec.nu
    dead = pi <= 0.0
    if np.any(nu[dead] > 0.0):
        raise DivergentDensity("nu puts mass where pi vanishes (nu outside M2)")
    live = ~dead
    ratio = nu[live] / pi[live] - 1.0
    if convention == PI_WEIGHTED:
        return float(np.sqrt(np.sum(pi[live] * ratio**2)))
    return float(np.sqrt(np.sum(ratio**2)))


def in_m2(spec: ChainSpec, stat: StationaryResult) -> bool:
    return bool(np.all(spec.nu[stat.pi <= 0.0] <= 0.0))


def spectral_report(
    spec: ChainSpec, stat: StationaryResult, convention: str = PI_WEIGHTED
) -> SpectralReport:
    member = in_m2(spec, stat)
    chi_pi = chi_divergence(spec, stat, PI_WEIGHTED) if member else float("inf")
    chi_un = chi_divergence(spec, stat, UNWEIGHTED) if member else float("inf")
    return SpectralReport(
        lambda_=l2_gap(spec, stat),
        gamma_star=absolute_gap(spec),
        spectrum=tuple(complex(z) for z in spectrum(spec)),
        chi_div_pi_weighted=chi_pi,
        chi_div_unweighted=chi_un,
        in_M2=member,
        norm_convention=convention,
    )

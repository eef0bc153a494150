"""genbound: finite-state Markov chain analysis and generalization bounds.

Library layout:

- chain:     chain representation, validation, stationary law, sampling, lifts
- spectral:  L2(pi) gap lambda, absolute gap gamma*, chi-square divergence
- mixing:    d(t) profile, mixing times, tau_min, gap/mixing bracket
- analysis:  one-call bundle of the three above
- empirical: function classes, complexities, margins, covering numbers
- bounds:    every closed-form bound evaluator plus margin/Levy utilities
- deepnet:   feed-forward networks over a base class, capacity functionals
- reduce:    companion / affine / ARMA / mixture lifts, AR(1) discretization
- verify:    Monte-Carlo verification harness for the inequalities
- cli:       `genbound` command-line entry point
"""

from .analysis import ChainAnalysis, analyze_chain
from .chain import (
    ChainSpec,
    KernelEstimate,
    StationaryResult,
    Trajectory,
    estimate_kernel,
    lift_hmm,
    lift_prior_product,
    sample_trajectory,
    stationary,
    validate_chain,
    window_lift,
)
from .empirical import (
    ComplexityEstimate,
    FunctionClass,
    covering_number,
    empirical_mean,
    gaussian_complexity,
    multiclass_margin,
    rademacher_complexity,
    sup_deviation,
    true_mean,
    truncate_class,
)
from .bounds import (
    BoundReport,
    BoundTerms,
    MarginLoss,
    StepCDF,
    bound_bayes,
    bound_deep_adaptive,
    bound_deep_layered,
    bound_family,
    bound_levy,
    bound_pac_vc,
    bound_sup_cdf,
    bound_thm1,
    bound_two_sided,
    gamma_margin,
    levy_distance,
    riemann_zeta,
    symmetrization_terms,
)
from .mixing import MixingProfile, gap_mixing_bracket, mixing_profile, t_mix, tau_min, tv_profile
from .spectral import SpectralReport, absolute_gap, chi_divergence, l2_gap, spectral_report
from .deepnet import NetworkCapacity, NetworkSpec, capacity, forward, network_margins
from .reduce import (
    ArmaLift,
    CompanionLift,
    MixtureLift,
    affine_lift,
    arma_lift,
    companion_lift,
    discretize_ar1,
    lift_function,
    mixture_lift,
)
from .verify import (
    VerifyReport,
    verify_mcdiarmid,
    verify_replica_identity,
    verify_symmetrization,
    verify_theorem_tail,
    verify_variance,
)

__version__ = "0.1.0"

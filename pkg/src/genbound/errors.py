"""Exception hierarchy for the genbound toolkit.

Every domain error raised by the library derives from GenboundError so the
CLI can map it to exit code 1 with a machine-readable error object.
"""


class GenboundError(Exception):
    """Base class for all domain errors."""

    code = "domain-error"

    def payload(self):
        return {"code": self.code, "message": str(self)}


class ChainValidationError(GenboundError):
    """Chain spec violates a stochastic-matrix or distribution invariant."""

    code = "invalid-chain"

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))

    def payload(self):
        return {"code": self.code, "violations": self.violations}


class FileFormatError(GenboundError):
    """Input file is malformed; names the offending field/location."""

    code = "bad-file"

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(message)

    def payload(self):
        out = {"code": self.code, "message": str(self)}
        if self.field is not None:
            out["field"] = self.field
        return out


class NotIrreducible(GenboundError):
    """Chain has multiple closed communicating classes; pi is not unique."""

    code = "not-irreducible"


class DivergentDensity(GenboundError):
    """nu is not absolutely continuous w.r.t. pi (nu outside M2)."""

    code = "divergent-density"


class HorizonUnresolved(GenboundError):
    """d(t) never dropped below the requested level within the horizon."""

    code = "horizon-unresolved"

    def __init__(self, t_max, epsilon):
        self.t_max = t_max
        self.epsilon = epsilon
        super().__init__(
            f"d(t) > {epsilon} for all t <= {t_max}; extend the horizon"
        )

    def payload(self):
        return {"code": self.code, "t_max": self.t_max, "epsilon": self.epsilon}


class ExactTooLarge(GenboundError):
    """Exact enumeration exceeds the configured size cap."""

    code = "exact-too-large"


class ZetaConstraint(GenboundError):
    """zeta(alpha) >= 3/2, outside the admissible range."""

    code = "zeta-constraint"


class UnitRootOffset(GenboundError):
    """sum(a_i) = 1 so the affine offset u is undefined."""

    code = "unit-root-offset"


class ZeroMixtureWeight(GenboundError):
    """A mixture weight alpha_l is zero; the mixing matrix is singular."""

    code = "zero-mixture-weight"


class CoefficientBoundError(GenboundError):
    """Statistic violates its declared Hamming-Lipschitz coefficients."""

    code = "coefficient-bound"

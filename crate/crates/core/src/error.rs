//! Crate-wide error type. Every validation failure names the invariant
//! that was violated so callers (and the CLI) can report it verbatim.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix entries must be finite (found NaN or infinity)")]
    NonFiniteEntries,

    #[error(
        "operator is not positive semi-definite: min eigenvalue {min_eig:.3e} below tolerance"
    )]
    NotPositiveSemiDefinite { min_eig: f64 },

    #[error("columns are not orthonormal: residual {0:.3e}")]
    NotOrthonormal(f64),

    #[error("vector is not a unit vector: norm {0:.12}")]
    NotUnitVector(f64),

    #[error("density matrix trace is {0:.12}, expected 1")]
    NotUnitTrace(f64),

    #[error("Kraus operators violate trace preservation: residual {0:.3e}")]
    NotTracePreserving(f64),

    #[error("Kraus operators violate the trace non-increasing bound: excess {0:.3e}")]
    NotTraceNonIncreasing(f64),

    #[error("Choi matrix is not positive semi-definite: min eigenvalue {0:.3e}")]
    ChoiNotPositive(f64),

    #[error("channel does not map the vacuum state to a pure state: purity {0:.12}")]
    VacuumNotPure(f64),

    #[error("environment marginal of the vacuum has support rank {0}, expected 1")]
    VacuumSupportNotRankOne(usize),

    #[error("the two channels do not share the same vacuum vector")]
    VacuumMismatch,

    #[error("POVM elements do not sum to the identity: residual {0:.3e}")]
    PovmIncomplete(f64),

    #[error("channel set is empty")]
    EmptyChannelSet,

    #[error("strategy is inconsistent: {0}")]
    MalformedStrategy(String),

    #[error("trace-preserving channel required, got a trace non-increasing operation")]
    ChannelRequired,

    #[error(
        "interaction probability cross-check failed: sum formula {sum:.12e} vs terminal formula {terminal:.12e}"
    )]
    InteractionSumMismatch { sum: f64, terminal: f64 },

    #[error("reference channel is not isometric on the supplied subspace")]
    NotIsometricOnSubspace,

    #[error("vacuum vector does not lie in the supplied subspace")]
    VacuumOutsideSubspace,

    #[error("spectrum condition violated at t={t:.6}: eigenvalue {re:.6}{im:+.6}i outside the allowed region")]
    SpectrumConditionViolated { t: f64, re: f64, im: f64 },

    #[error("eigenvalue 1 is not isolated: margin {0:.3e} below the required threshold")]
    EigenvalueOneNotIsolated(f64),

    #[error("resolvent is singular at a sampled contour point")]
    SingularResolvent,

    #[error("hamiltonian is not self-adjoint: residual {0:.3e}")]
    NotSelfAdjoint(f64),

    #[error("|<v|exp(-iH)v>| = {0:.12} must be strictly less than 1")]
    NoRepetitionGain(f64),

    #[error("eigenvalue computation failed to converge")]
    EigenSolverFailed,

    #[error("least-squares fit needs at least 3 points, got {0}")]
    TooFewFitPoints(usize),

    #[error("least-squares fit requires strictly positive values")]
    NonPositiveFitValue,

    #[error("Gram system for the commutant projection is singular")]
    GramSystemSingular,

    #[error("twirl group requires dimension >= 2, got {0}")]
    TwirlDimensionTooSmall(usize),

    #[error(
        "no exact averaging set available for a twirl block of dimension {0} (supported: <= 2)"
    )]
    TwirlDesignUnavailable(usize),

    #[error("restrictions of the two maps differ on the subspace: residual {0:.3e}")]
    RestrictionsDiffer(f64),

    #[error("map is not trace-preserving on the subspace: residual {0:.3e}")]
    NotTracePreservingOnSubspace(f64),

    #[error("the channel pair is discriminable; the audited inequality does not apply")]
    FeasiblePairSupplied,

    #[error("rate-limit hypothesis violated: {0}")]
    RateLimitHypothesis(String),

    #[error("degenerate asymptotics: {0}")]
    DegenerateAsymptotics(String),

    #[error("decomposition is invalid: {0}")]
    BadDecomposition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

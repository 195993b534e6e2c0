use thiserror::Error;

use crate::point::Point;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the workbench.
///
/// Variants are grouped by how a caller should react: input problems,
/// contract violations (a stated assumption did not hold), and internal
/// invariant failures (a bug in the engine).
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {0} is outside the hypothesis domain")]
    PointOutsideDomain(Box<Point>),

    #[error("no exact margin test for {hypothesis} under {perturbation}")]
    UnsupportedCombination { hypothesis: &'static str, perturbation: &'static str },

    #[error("empty sample")]
    EmptySample,

    #[error("empty hypothesis class")]
    EmptyClass,

    #[error("VC enumeration guard exceeded: domain has {size} points (limit {limit})")]
    VcGuardExceeded { size: usize, limit: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid hypothesis: {0}")]
    InvalidHypothesis(String),

    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),

    #[error("invalid task: {0}")]
    InvalidTask(String),

    #[error("query budget of {budget} exhausted")]
    BudgetExhausted { budget: usize },

    #[error("hypothesis is not a member of the declared class")]
    NotInClass,

    #[error("version space is empty after pruning")]
    EmptyAfterPruning,

    #[error("cluster has heterogeneous sample labels at {0}")]
    HeterogeneousCluster(Box<Point>),

    #[error("sample is not realizable: {0}")]
    NotRealizable(String),

    #[error("witness set validation failed at {point} for hypothesis {hypothesis}")]
    WitnessValidation { point: Box<Point>, hypothesis: String },

    #[error("inadmissible attack: {0}")]
    InadmissibleAttack(String),

    #[error("properness violation: {0}")]
    PropernessViolation(String),

    #[error("malformed side information: {0}")]
    MalformedSideInfo(String),

    #[error("no rational polygon sits between the two balls: {0}")]
    NoRationalPolygon(String),

    #[error("strategy exceeded its declared maximum of {0} queries")]
    StrategyOverrun(usize),

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),

    #[error("construction check failed: {0}")]
    ConstructionFailed(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Module-qualified code used in reports and CLI diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::PointOutsideDomain(_) => "core.point_outside_domain",
            Error::UnsupportedCombination { .. } => "core.unsupported_combination",
            Error::EmptySample => "core.empty_sample",
            Error::EmptyClass => "learners.empty_class",
            Error::VcGuardExceeded { .. } => "core.vc_guard_exceeded",
            Error::InvalidParameter(_) => "core.invalid_parameter",
            Error::InvalidDistribution(_) => "core.invalid_distribution",
            Error::InvalidHypothesis(_) => "core.invalid_hypothesis",
            Error::InvalidPerturbation(_) => "core.invalid_perturbation",
            Error::InvalidTask(_) => "task.invalid",
            Error::BudgetExhausted { .. } => "oracles.budget_exhausted",
            Error::NotInClass => "oracles.not_in_class",
            Error::EmptyAfterPruning => "learners.empty_after_pruning",
            Error::HeterogeneousCluster(_) => "learners.heterogeneous_cluster",
            Error::NotRealizable(_) => "learners.not_realizable",
            Error::WitnessValidation { .. } => "adversary.witness_validation",
            Error::InadmissibleAttack(_) => "adversary.inadmissible_attack",
            Error::PropernessViolation(_) => "adversary.properness_violation",
            Error::MalformedSideInfo(_) => "learners.malformed_side_info",
            Error::NoRationalPolygon(_) => "certify.no_rational_polygon",
            Error::StrategyOverrun(_) => "games.strategy_overrun",
            Error::InvariantViolation(_) => "games.invariant_violation",
            Error::ConstructionFailed(_) => "constructions.failed",
            Error::Json(_) => "io.json",
            Error::Io(_) => "io.file",
        }
    }

    /// True when the error means a stated assumption (budget, realizability,
    /// perfection of an adversary) did not hold, as opposed to bad input or
    /// an engine bug.
    pub fn is_contract_violation(&self) -> bool {
        matches!(
            self,
            Error::BudgetExhausted { .. }
                | Error::EmptyAfterPruning
                | Error::HeterogeneousCluster(_)
                | Error::NotRealizable(_)
                | Error::WitnessValidation { .. }
                | Error::InadmissibleAttack(_)
                | Error::PropernessViolation(_)
                | Error::NotInClass
                | Error::StrategyOverrun(_)
        )
    }

    pub fn is_internal(&self) -> bool {
        matches!(self, Error::InvariantViolation(_) | Error::ConstructionFailed(_))
    }
}

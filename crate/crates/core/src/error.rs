use core::fmt;

/// Errors raised by the placement and bound computations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A physical parameter was non-positive, non-finite or otherwise out of range.
    InvalidParameter(&'static str),
    /// Antenna coordinates violate ordering or aperture bounds.
    InvalidGeometry(&'static str),
    /// Cartesian source with `p2 <= 0` (behind or on the array line).
    SourceBehindArray,
    /// The (X, X^2) covariance of the array is singular: angle or range is unidentifiable.
    DegenerateGeometry,
    /// `1 - u^2` too small; the polar bounds diverge at endfire.
    EndfireSingularity,
    /// The 2x2 moment matrix is not invertible.
    SingularMoments,
    /// Weights, support or aperture of a placement distribution are inconsistent.
    InvalidDistribution(&'static str),
    /// Operation requires a centro-symmetric distribution.
    NotSymmetric,
    /// Moment-matched support point lies outside `[-a, a]`.
    SupportOverflow { required: f64, half_aperture: f64 },
    /// Requested clusters do not fit inside the aperture at the minimum spacing.
    InfeasibleAperture { required: f64, available: f64 },
    /// Adjacent antennas closer than half a wavelength.
    SpacingViolation {
        left: f64,
        right: f64,
        min_spacing: f64,
    },
    /// Every grid point failed to evaluate.
    AllPointsDegenerate,
    /// The grid contains no point inside the near-field region.
    EmptyGrid,
    /// Exhaustive search would exceed the configured evaluation budget.
    SearchSpaceTooLarge { evaluations: u128, budget: u128 },
    /// No candidate subset satisfies the search constraints.
    NoFeasibleSubset,
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::InvalidGeometry(_) => "invalid_geometry",
            Error::SourceBehindArray => "source_behind_array",
            Error::DegenerateGeometry => "degenerate_geometry",
            Error::EndfireSingularity => "endfire_singularity",
            Error::SingularMoments => "singular_moments",
            Error::InvalidDistribution(_) => "invalid_distribution",
            Error::NotSymmetric => "not_symmetric",
            Error::SupportOverflow { .. } => "support_overflow",
            Error::InfeasibleAperture { .. } => "infeasible_aperture",
            Error::SpacingViolation { .. } => "spacing_violation",
            Error::AllPointsDegenerate => "all_points_degenerate",
            Error::EmptyGrid => "empty_grid",
            Error::SearchSpaceTooLarge { .. } => "search_space_too_large",
            Error::NoFeasibleSubset => "no_feasible_subset",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::InvalidGeometry(what) => write!(f, "invalid array geometry: {what}"),
            Error::SourceBehindArray => {
                f.write_str("source must lie in front of the array (p2 > 0)")
            }
            Error::DegenerateGeometry => {
                f.write_str("degenerate geometry: Var(X) Var(X^2) - Cov(X, X^2)^2 vanishes")
            }
            Error::EndfireSingularity => {
                f.write_str("source too close to endfire (1 - u^2 < 1e-9)")
            }
            Error::SingularMoments => f.write_str("moment matrix is singular"),
            Error::InvalidDistribution(what) => write!(f, "invalid placement distribution: {what}"),
            Error::NotSymmetric => f.write_str("distribution is not centro-symmetric"),
            Error::SupportOverflow {
                required,
                half_aperture,
            } => write!(
                f,
                "moment-matched support {required} exceeds half aperture {half_aperture}"
            ),
            Error::InfeasibleAperture {
                required,
                available,
            } => write!(
                f,
                "aperture too small: clusters need {required} m, only {available} m available"
            ),
            Error::SpacingViolation {
                left,
                right,
                min_spacing,
            } => write!(
                f,
                "antennas at {left} m and {right} m are closer than {min_spacing} m"
            ),
            Error::AllPointsDegenerate => {
                f.write_str("SPEB could not be evaluated at any grid point")
            }
            Error::EmptyGrid => f.write_str("evaluation grid is empty"),
            Error::SearchSpaceTooLarge {
                evaluations,
                budget,
            } => write!(
                f,
                "exhaustive search needs {evaluations} evaluations, budget is {budget}; \
                 enable symmetry pruning or use a coarser pitch"
            ),
            Error::NoFeasibleSubset => f.write_str("no candidate subset satisfies the constraints"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

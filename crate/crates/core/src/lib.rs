//! Near-field position error bounds and worst-case optimal placement for
//! linear movable-antenna arrays.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! * [`geometry`]: arrays, sources and the Fresnel–Rayleigh region,
//! * [`crb`]: closed-form polar CRBs and the squared position error bound,
//! * [`design`]: placement distributions, the three-point optimum and
//!   concrete deployments, plus the ULA / sparse ULA / two-edge baselines,
//! * [`search`]: worst-case evaluation over the region and exhaustive search.
//!
//! ```
//! use maplace_core::prelude::*;
//!
//! let wavelength = 0.01;
//! let a = 25.0 * wavelength;
//! let array = discrete_deployment(25, a, wavelength).unwrap();
//! let params = SensingParams::from_snr_db(wavelength, 1024, 25, 5.0).unwrap();
//! let region = NearFieldRegion::new(a, wavelength).unwrap();
//! let grid = RegionGrid::uniform(region, 41, 41).unwrap();
//! let report = worst_case_speb(&array, &params, &grid).unwrap();
//! assert_eq!(report.worst_case_source, region.broadside_rayleigh_point());
//! ```
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod crb;
pub mod design;
pub mod error;
pub mod geometry;
pub mod search;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::crb::{
        crb_r, crb_u, moments_of_positions, sample_moments, speb, speb_distribution, MomentMatrix,
        SensingParams,
    };
    pub use crate::design::{
        baseline_sparse_ula, baseline_two_edge, baseline_ula, cluster_sizes, discrete_deployment,
        discrete_deployment_with_mass, gamma_param, optimal_q, symmetrize, tchakaloff_reduce,
        three_point_design, ClusterSizes, EdgeMass, PlacementDistribution, ThreePointDesign,
    };
    pub use crate::error::{Error, Result};
    pub use crate::geometry::{
        cartesian_to_polar, effective_aperture, exact_distance, fresnel_distance,
        max_rayleigh_distance, polar_to_cartesian, rayleigh_distance, steering_vector,
        ArrayGeometry, NearFieldRegion, SourcePosition,
    };
    pub use crate::search::{
        boundary_speb_profile, exhaustive_search, worst_case_speb, DesignReport, ExhaustivePlan,
        RegionGrid, SearchConfig, SpebModel,
    };
}

//! Placement distributions and array constructions.
//!
//! A placement distribution is a probability mass function over antenna
//! locations in `[-a, a]`. The worst-case optimal distribution puts mass
//! `(q/2, 1 - q, q/2)` on `{-a, 0, a}` with
//! `q* = 1 + gamma - sqrt(gamma (1 + gamma))`, `gamma = 256 a^2 / lambda^2`.
//! [`discrete_deployment`] turns that into a concrete array honouring the
//! half-wavelength spacing floor.

use alloc::vec::Vec;

use crate::crb::MomentMatrix;
use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Probability mass over candidate antenna locations.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacementDistribution {
    support: Vec<f64>,
    weights: Vec<f64>,
    half_aperture: f64,
}

impl PlacementDistribution {
    /// Sorts the support ascending and validates the pmf.
    pub fn new(support: Vec<f64>, weights: Vec<f64>, half_aperture: f64) -> Result<Self> {
        if !(half_aperture.is_finite() && half_aperture > 0.0) {
            return Err(Error::InvalidParameter("half aperture must be positive"));
        }
        if support.is_empty() || support.len() != weights.len() {
            return Err(Error::InvalidDistribution(
                "support and weights must be non-empty and equal length",
            ));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution("weights must be non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidDistribution("weights must sum to one"));
        }
        let limit = half_aperture * (1.0 + 1e-12);
        if support.iter().any(|x| !x.is_finite() || x.abs() > limit) {
            return Err(Error::InvalidDistribution("support point outside [-a, a]"));
        }
        let mut pairs: Vec<(f64, f64)> = support.into_iter().zip(weights).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidDistribution(
                "support points must be distinct",
            ));
        }
        let (support, weights) = pairs.into_iter().unzip();
        Ok(Self {
            support,
            weights,
            half_aperture,
        })
    }

    /// Empirical distribution of an array: mass `1/N` on every element.
    pub fn from_array(array: &ArrayGeometry) -> Self {
        let n = array.len();
        Self {
            support: array.positions().to_vec(),
            weights: alloc::vec![1.0 / n as f64; n],
            half_aperture: array.half_aperture(),
        }
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn half_aperture(&self) -> f64 {
        self.half_aperture
    }

    fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.support
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.expect(|x| x)
    }

    /// `m2 = E[X^2]`.
    pub fn m2(&self) -> f64 {
        self.expect(|x| x * x)
    }

    /// `m4 = E[X^4]`.
    pub fn m4(&self) -> f64 {
        self.expect(|x| x * x * x * x)
    }

    /// Covariance of `(X, X^2)` from centred sums.
    pub fn moment_matrix(&self) -> MomentMatrix {
        let mean = self.mean();
        let m2 = self.m2();
        let var_x = self.expect(|x| (x - mean) * (x - mean));
        let cov = self.expect(|x| (x - mean) * (x * x - m2));
        let var_x2 = self.expect(|x| (x * x - m2) * (x * x - m2));
        MomentMatrix::new(var_x, cov, var_x2)
    }

    /// Mirror image `w(-zeta)`.
    pub fn reflected(&self) -> Self {
        let mut support: Vec<f64> = self.support.iter().rev().map(|x| -x).collect();
        let weights: Vec<f64> = self.weights.iter().rev().copied().collect();
        // -0.0 -> +0.0
        for x in &mut support {
            if *x == 0.0 {
                *x = 0.0;
            }
        }
        Self {
            support,
            weights,
            half_aperture: self.half_aperture,
        }
    }

    /// Exact reflection symmetry of support and weights.
    pub fn is_symmetric(&self) -> bool {
        let n = self.support.len();
        (0..n).all(|i| {
            let j = n - 1 - i;
            self.support[i] == -self.support[j] && self.weights[i] == self.weights[j]
        })
    }
}

/// Centro-symmetric mixture `(w(zeta) + w(-zeta)) / 2`.
pub fn symmetrize(dist: &PlacementDistribution) -> PlacementDistribution {
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(2 * dist.support.len());
    for (&x, &w) in dist.support.iter().zip(&dist.weights) {
        merged.push((x.abs(), w));
    }
    merged.sort_by(|a, b| a.0.total_cmp(&b.0));

    // accumulate total mass per |zeta|
    let mut magnitudes: Vec<(f64, f64)> = Vec::new();
    for (m, w) in merged {
        match magnitudes.last_mut() {
            Some(last) if last.0 == m => last.1 += w,
            _ => magnitudes.push((m, w)),
        }
    }

    let mut support = Vec::with_capacity(2 * magnitudes.len());
    let mut weights = Vec::with_capacity(2 * magnitudes.len());
    for &(m, w) in magnitudes.iter().rev() {
        if m > 0.0 {
            support.push(-m);
            weights.push(0.5 * w);
        }
    }
    for &(m, w) in &magnitudes {
        if m == 0.0 {
            support.push(0.0);
            weights.push(w);
        } else {
            support.push(m);
            weights.push(0.5 * w);
        }
    }
    PlacementDistribution {
        support,
        weights,
        half_aperture: dist.half_aperture,
    }
}

/// `gamma = 4 d_R,max^2 / a^2 = 256 (a / lambda)^2`.
pub fn gamma_param(half_aperture: f64, wavelength: f64) -> f64 {
    let ratio = half_aperture / wavelength;
    256.0 * ratio * ratio
}

/// Minimiser of `1/q + gamma / (q (1 - q))` over `(0, 1]`.
///
/// Evaluated as `sqrt(1+g) / (sqrt(1+g) + sqrt(g))`, algebraically equal to
/// `1 + g - sqrt(g (1 + g))` but free of cancellation for large `g`.
pub fn optimal_q(gamma: f64) -> f64 {
    let gamma = gamma.max(0.0);
    let s1 = libm::sqrt(1.0 + gamma);
    s1 / (s1 + libm::sqrt(gamma))
}

/// One-dimensional objective `1/q + gamma / (q (1 - q))` (up to `kappa d_R,max^2 / a^2`).
pub fn three_point_objective(q: f64, gamma: f64) -> f64 {
    1.0 / q + gamma / (q * (1.0 - q))
}

/// Which edge mass a three-point design uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeMass {
    /// `q*` from the closed form.
    #[default]
    Exact,
    /// The large-aperture limit `q = 1/2`, i.e. masses `(0.25, 0.5, 0.25)`.
    Asymptotic,
}

/// Three-point distribution `(q/2, 1-q, q/2)` on `{-a, 0, a}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreePointDesign {
    half_aperture: f64,
    edge_mass: f64,
}

impl ThreePointDesign {
    pub fn new(half_aperture: f64, edge_mass: f64) -> Result<Self> {
        if !(half_aperture.is_finite() && half_aperture > 0.0) {
            return Err(Error::InvalidParameter("half aperture must be positive"));
        }
        if !(edge_mass > 0.0 && edge_mass <= 1.0) {
            return Err(Error::InvalidParameter("edge mass must lie in (0, 1]"));
        }
        Ok(Self {
            half_aperture,
            edge_mass,
        })
    }

    pub fn half_aperture(&self) -> f64 {
        self.half_aperture
    }

    pub fn edge_mass(&self) -> f64 {
        self.edge_mass
    }

    /// Masses at `-a`, `0`, `a`.
    pub fn masses(&self) -> [f64; 3] {
        let q = self.edge_mass;
        [q / 2.0, 1.0 - q, q / 2.0]
    }

    /// `Var(X) = q a^2`, `Var(X^2) = q (1-q) a^4`, `Cov = 0`.
    pub fn moments(&self) -> MomentMatrix {
        let a2 = self.half_aperture * self.half_aperture;
        let q = self.edge_mass;
        MomentMatrix::symmetric(q * a2, q * (1.0 - q) * a2 * a2)
    }

    pub fn distribution(&self) -> PlacementDistribution {
        let a = self.half_aperture;
        PlacementDistribution {
            support: alloc::vec![-a, 0.0, a],
            weights: self.masses().to_vec(),
            half_aperture: a,
        }
    }
}

pub fn three_point_design(
    half_aperture: f64,
    wavelength: f64,
    mass: EdgeMass,
) -> Result<ThreePointDesign> {
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(Error::InvalidParameter("wavelength must be positive"));
    }
    let q = match mass {
        EdgeMass::Exact => optimal_q(gamma_param(half_aperture, wavelength)),
        EdgeMass::Asymptotic => 0.5,
    };
    ThreePointDesign::new(half_aperture, q)
}

/// Replaces a centro-symmetric distribution by the three-point one on
/// `{-s, 0, s}` with identical `(m0, m2, m4)`: `s = sqrt(m4/m2)`, edge mass `m2^2/m4`.
pub fn tchakaloff_reduce(dist: &PlacementDistribution) -> Result<PlacementDistribution> {
    if !dist.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let m2 = dist.m2();
    let m4 = dist.m4();
    if m2.is_nan() || m2 <= 0.0 {
        return Err(Error::InvalidDistribution("second moment must be positive"));
    }
    let a = dist.half_aperture;
    let mut s = libm::sqrt(m4 / m2);
    if s > a {
        // rounding on an edge-supported input, not a genuine overflow
        if s <= a * (1.0 + 1e-12) {
            s = a;
        } else {
            return Err(Error::SupportOverflow {
                required: s,
                half_aperture: a,
            });
        }
    }
    let q = (m2 * m2 / m4).min(1.0);
    Ok(PlacementDistribution {
        support: alloc::vec![-s, 0.0, s],
        weights: alloc::vec![q / 2.0, 1.0 - q, q / 2.0],
        half_aperture: a,
    })
}

/// `round(x)` with halves rounded away from zero.
pub fn round_half_away(x: f64) -> f64 {
    libm::round(x)
}

/// Cluster sizes `(left, centre, right)` of a deployment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClusterSizes {
    pub left: usize,
    pub center: usize,
    pub right: usize,
}

/// Edge/centre cluster sizes for `N` antennas and total edge mass `q`.
pub fn cluster_sizes(n: usize, edge_mass: f64) -> ClusterSizes {
    let mut edge = round_half_away(0.5 * edge_mass * n as f64) as usize;
    // keep at least one element in each cluster when N >= 3
    edge = edge.clamp(1, n.saturating_sub(1) / 2);
    ClusterSizes {
        left: edge,
        center: n - 2 * edge,
        right: edge,
    }
}

/// Three-cluster array with `round(0.25 N)` elements at each edge.
pub fn discrete_deployment(n: usize, half_aperture: f64, wavelength: f64) -> Result<ArrayGeometry> {
    discrete_deployment_with_mass(n, half_aperture, wavelength, 0.5)
}

/// Three-cluster array approximating `(q/2, 1-q, q/2)` on `{-a, 0, a}`.
///
/// Edge clusters grow inward from `±a` at `lambda/2` pitch. The centre cluster
/// sits on the origin for odd size, or straddles it at `±lambda/4` for even size.
pub fn discrete_deployment_with_mass(
    n: usize,
    half_aperture: f64,
    wavelength: f64,
    edge_mass: f64,
) -> Result<ArrayGeometry> {
    if n < 3 {
        return Err(Error::InvalidParameter(
            "deployment needs at least three antennas",
        ));
    }
    check_lengths(half_aperture, wavelength)?;
    if !(edge_mass > 0.0 && edge_mass <= 1.0) {
        return Err(Error::InvalidParameter("edge mass must lie in (0, 1]"));
    }
    let d = wavelength / 2.0;
    let a = half_aperture;
    let sizes = cluster_sizes(n, edge_mass);
    let needed = (n - 1) as f64 * d;
    if needed > 2.0 * a * (1.0 + 1e-12) {
        return Err(Error::InfeasibleAperture {
            required: needed,
            available: 2.0 * a,
        });
    }

    let edge_inner = a - (sizes.right - 1) as f64 * d;
    let center_outer = (sizes.center - 1) as f64 * d / 2.0;
    if edge_inner - center_outer < d * (1.0 - 1e-9) {
        return Err(Error::InfeasibleAperture {
            required: 2.0 * (center_outer + d + (sizes.right - 1) as f64 * d),
            available: 2.0 * a,
        });
    }

    // non-negative half of the centre cluster
    let mut center_half: Vec<f64> = if sizes.center % 2 == 1 {
        (0..=(sizes.center / 2)).map(|j| j as f64 * d).collect()
    } else {
        (0..sizes.center / 2)
            .map(|j| (j as f64 + 0.5) * d)
            .collect()
    };
    let right_edge: Vec<f64> = (0..sizes.right).rev().map(|k| a - k as f64 * d).collect();
    center_half.extend(right_edge);

    let mut positions: Vec<f64> = center_half
        .iter()
        .rev()
        .filter(|x| **x > 0.0)
        .map(|x| -x)
        .collect();
    positions.extend(center_half);
    ArrayGeometry::new(positions, a, wavelength)
}

/// Conventional half-wavelength ULA centred in the aperture.
pub fn baseline_ula(n: usize, wavelength: f64, half_aperture: f64) -> Result<ArrayGeometry> {
    check_lengths(half_aperture, wavelength)?;
    if n == 0 {
        return Err(Error::InvalidParameter("antenna count must be positive"));
    }
    let d = wavelength / 2.0;
    let needed = (n - 1) as f64 * d;
    if needed > 2.0 * half_aperture * (1.0 + 1e-12) {
        return Err(Error::InfeasibleAperture {
            required: needed,
            available: 2.0 * half_aperture,
        });
    }
    let centre = (n + 1) as f64 / 2.0;
    let positions = (1..=n).map(|k| (k as f64 - centre) * d).collect();
    ArrayGeometry::new(positions, half_aperture, wavelength)
}

/// Uniform array stretched over the full aperture, endpoints at `±a`.
pub fn baseline_sparse_ula(n: usize, half_aperture: f64, wavelength: f64) -> Result<ArrayGeometry> {
    check_lengths(half_aperture, wavelength)?;
    if n < 2 {
        return Err(Error::InvalidParameter(
            "sparse ULA needs at least two antennas",
        ));
    }
    let span = (n - 1) as f64;
    let pitch = 2.0 * half_aperture / span;
    if pitch < wavelength / 2.0 * (1.0 - 1e-9) {
        return Err(Error::SpacingViolation {
            left: -half_aperture,
            right: -half_aperture + pitch,
            min_spacing: wavelength / 2.0,
        });
    }
    let positions = (0..n)
        .map(|k| half_aperture * ((2 * k) as f64 - span) / span)
        .collect();
    ArrayGeometry::new(positions, half_aperture, wavelength)
}

/// Two half-wavelength clusters anchored at `±a`; the extra element of odd `N` goes left.
pub fn baseline_two_edge(n: usize, half_aperture: f64, wavelength: f64) -> Result<ArrayGeometry> {
    check_lengths(half_aperture, wavelength)?;
    if n < 2 {
        return Err(Error::InvalidParameter(
            "two-edge array needs at least two antennas",
        ));
    }
    let d = wavelength / 2.0;
    let a = half_aperture;
    let left = n.div_ceil(2);
    let right = n / 2;
    let left_inner = -a + (left - 1) as f64 * d;
    let right_inner = a - (right - 1) as f64 * d;
    if right_inner - left_inner < d * (1.0 - 1e-9) {
        return Err(Error::InfeasibleAperture {
            required: (n - 1) as f64 * d,
            available: 2.0 * a,
        });
    }
    let mut positions: Vec<f64> = (0..left).map(|k| -a + k as f64 * d).collect();
    positions.extend((0..right).rev().map(|k| a - k as f64 * d));
    ArrayGeometry::new(positions, a, wavelength)
}

fn check_lengths(half_aperture: f64, wavelength: f64) -> Result<()> {
    if !(half_aperture.is_finite() && half_aperture > 0.0) {
        return Err(Error::InvalidParameter("half aperture must be positive"));
    }
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(Error::InvalidParameter("wavelength must be positive"));
    }
    Ok(())
}

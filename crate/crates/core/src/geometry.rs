//! Linear array geometries, source coordinates and the radiating near-field region.
//!
//! Positions are in meters along the array axis. A source is described by
//! `u = cos(theta)` and its range `r` from the array origin; Cartesian
//! coordinates are derived on demand.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default cap on `|u|`. The region shrinks to nothing at endfire.
pub const DEFAULT_U_MAX: f64 = 0.999;

/// Positions may overshoot the aperture by this relative amount (rounding slack).
const APERTURE_SLACK: f64 = 1e-12;

/// Ordered antenna coordinates inside `[-a, a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    positions: Vec<f64>,
    half_aperture: f64,
    wavelength: f64,
}

impl ArrayGeometry {
    /// Validates ordering and aperture bounds.
    ///
    /// Arrays with fewer than three elements are accepted here; their bounds
    /// are rejected later as [`Error::DegenerateGeometry`].
    pub fn new(positions: Vec<f64>, half_aperture: f64, wavelength: f64) -> Result<Self> {
        check_positive(half_aperture, "half aperture must be positive")?;
        check_positive(wavelength, "wavelength must be positive")?;
        if positions.is_empty() {
            return Err(Error::InvalidGeometry("array has no antennas"));
        }
        let limit = half_aperture * (1.0 + APERTURE_SLACK);
        for &x in &positions {
            if !x.is_finite() || x.abs() > limit {
                return Err(Error::InvalidGeometry("position outside [-a, a]"));
            }
        }
        if positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGeometry(
                "positions must be strictly increasing",
            ));
        }
        Ok(Self {
            positions,
            half_aperture,
            wavelength,
        })
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn half_aperture(&self) -> f64 {
        self.half_aperture
    }

    pub fn aperture(&self) -> f64 {
        2.0 * self.half_aperture
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// True when the position set is invariant under `x -> -x`.
    pub fn is_centro_symmetric(&self, rel_tol: f64) -> bool {
        let tol = rel_tol * self.half_aperture;
        let n = self.positions.len();
        (0..n).all(|i| (self.positions[i] + self.positions[n - 1 - i]).abs() <= tol)
    }

    /// Checks that adjacent antennas are at least `min_spacing` apart.
    ///
    /// A relative slack of `1e-9` absorbs rounding in constructed layouts.
    pub fn check_spacing(&self, min_spacing: f64) -> Result<()> {
        let floor = min_spacing * (1.0 - 1e-9);
        match self.positions.windows(2).find(|w| w[1] - w[0] < floor) {
            Some(w) => Err(Error::SpacingViolation {
                left: w[0],
                right: w[1],
                min_spacing,
            }),
            None => Ok(()),
        }
    }

    /// Copy with every length multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        check_positive(factor, "scale factor must be positive")?;
        Self::new(
            self.positions.iter().map(|x| x * factor).collect(),
            self.half_aperture * factor,
            self.wavelength * factor,
        )
    }
}

/// Source location in polar form: `u = cos(theta)` and range `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourcePosition {
    u: f64,
    r: f64,
}

impl SourcePosition {
    pub fn new(u: f64, r: f64) -> Result<Self> {
        if !u.is_finite() || u.abs() >= 1.0 {
            return Err(Error::InvalidParameter("|u| must be < 1"));
        }
        check_positive(r, "range must be positive")?;
        Ok(Self { u, r })
    }

    pub fn from_cartesian(p1: f64, p2: f64) -> Result<Self> {
        let (u, r) = cartesian_to_polar(p1, p2)?;
        Self::new(u, r)
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `(p1, p2) = (r u, r sqrt(1 - u^2))`.
    pub fn cartesian(&self) -> (f64, f64) {
        polar_to_cartesian(self.u, self.r)
    }
}

pub fn polar_to_cartesian(u: f64, r: f64) -> (f64, f64) {
    (r * u, r * libm::sqrt(1.0 - u * u))
}

/// Inverse of [`polar_to_cartesian`]; requires `p2 > 0`.
pub fn cartesian_to_polar(p1: f64, p2: f64) -> Result<(f64, f64)> {
    if p2.is_nan() || p2 <= 0.0 || !p1.is_finite() || !p2.is_finite() {
        return Err(Error::SourceBehindArray);
    }
    let r = libm::hypot(p1, p2);
    Ok((p1 / r, r))
}

/// `D_eff = 2a sqrt(1 - u^2)`.
pub fn effective_aperture(half_aperture: f64, u: f64) -> f64 {
    2.0 * half_aperture * libm::sqrt((1.0 - u * u).max(0.0))
}

/// `d_R(u) = 2 D^2 (1 - u^2) / lambda`, equal to `2 D_eff^2 / lambda`.
pub fn rayleigh_distance(half_aperture: f64, wavelength: f64, u: f64) -> f64 {
    let d = 2.0 * half_aperture;
    2.0 * d * d * (1.0 - u * u).max(0.0) / wavelength
}

/// Broadside Rayleigh distance `2 D^2 / lambda`.
pub fn max_rayleigh_distance(half_aperture: f64, wavelength: f64) -> f64 {
    rayleigh_distance(half_aperture, wavelength, 0.0)
}

/// `d_F(u) = 0.62 sqrt(D_eff^3 / lambda)`.
pub fn fresnel_distance(half_aperture: f64, wavelength: f64, u: f64) -> f64 {
    let d_eff = effective_aperture(half_aperture, u);
    0.62 * libm::sqrt(d_eff * d_eff * d_eff / wavelength)
}

/// Exact source-to-element distance `sqrt(r^2 - 2 r u x + x^2)`.
pub fn exact_distance(x: f64, source: &SourcePosition) -> f64 {
    let (u, r) = (source.u, source.r);
    libm::sqrt(r * r - 2.0 * r * u * x + x * x)
}

/// Second-order (Fresnel) phase of an element at `x`, common range term removed.
pub fn fresnel_phase(x: f64, source: &SourcePosition, wavelength: f64) -> f64 {
    let (u, r) = (source.u, source.r);
    2.0 * PI / wavelength * (u * x - (1.0 - u * u) / (2.0 * r) * x * x)
}

/// Unit-modulus array response under the uniform spherical wave model.
pub fn steering_vector(array: &ArrayGeometry, source: &SourcePosition) -> Vec<Complex64> {
    array
        .positions
        .iter()
        .map(|&x| {
            let phase = fresnel_phase(x, source, array.wavelength);
            Complex64::new(libm::cos(phase), libm::sin(phase))
        })
        .collect()
}

/// The radiating near-field region `d_F(u) <= r <= d_R(u)`, `|u| <= u_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearFieldRegion {
    half_aperture: f64,
    wavelength: f64,
    u_max: f64,
}

impl NearFieldRegion {
    pub fn new(half_aperture: f64, wavelength: f64) -> Result<Self> {
        Self::with_u_max(half_aperture, wavelength, DEFAULT_U_MAX)
    }

    pub fn with_u_max(half_aperture: f64, wavelength: f64, u_max: f64) -> Result<Self> {
        check_positive(half_aperture, "half aperture must be positive")?;
        check_positive(wavelength, "wavelength must be positive")?;
        if !(0.0..1.0).contains(&u_max) {
            return Err(Error::InvalidParameter("u_max must lie in [0, 1)"));
        }
        Ok(Self {
            half_aperture,
            wavelength,
            u_max,
        })
    }

    pub fn half_aperture(&self) -> f64 {
        self.half_aperture
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    pub fn fresnel(&self, u: f64) -> f64 {
        fresnel_distance(self.half_aperture, self.wavelength, u)
    }

    pub fn rayleigh(&self, u: f64) -> f64 {
        rayleigh_distance(self.half_aperture, self.wavelength, u)
    }

    pub fn max_rayleigh(&self) -> f64 {
        max_rayleigh_distance(self.half_aperture, self.wavelength)
    }

    /// `u` is admissible when it is inside the cap and the radial interval is non-empty.
    pub fn admits(&self, u: f64) -> bool {
        u.abs() <= self.u_max && self.fresnel(u) < self.rayleigh(u)
    }

    pub fn contains(&self, source: &SourcePosition) -> bool {
        let u = source.u;
        self.admits(u) && self.fresnel(u) <= source.r && source.r <= self.rayleigh(u)
    }

    /// Worst-case source for centro-symmetric placements: broadside on the Rayleigh boundary.
    pub fn broadside_rayleigh_point(&self) -> SourcePosition {
        SourcePosition {
            u: 0.0,
            r: self.max_rayleigh(),
        }
    }
}

fn check_positive(value: f64, what: &'static str) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(what))
    }
}

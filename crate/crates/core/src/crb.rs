//! Closed-form polar Cramér–Rao bounds and the squared position error bound (SPEB).
//!
//! Two independent evaluation routes exist:
//!
//! * [`crb_u`], [`crb_r`] and [`speb`] work on an explicit array through the
//!   sample functions `G1(x)`, `G1(x~)` and `G2(x, x~)` with `x~ = x^2`.
//! * [`speb_distribution`] evaluates the quadratic functional
//!   `kappa [ r^2/(1-u^2) e1' Z e1 + v' Z v / (1-u^2)^2 ]` at `Z = Sigma^-1`,
//!   with `v = (2ur, -2r^2)`, for any (X, X^2) covariance matrix `Sigma`.
//!
//! For the empirical distribution of an array the two agree.

use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, SourcePosition};

/// Relative threshold on `det(Sigma) / (Var(X) Var(X^2))` below which the
/// covariance is treated as singular.
pub const DEGENERACY_TOL: f64 = 1e-14;

/// Sources with `1 - u^2` below this are rejected.
pub const ENDFIRE_TOL: f64 = 1e-9;

/// Signal constants entering `kappa = sigma^2 lambda^2 / (8 pi^2 T P N |beta|^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingParams {
    wavelength: f64,
    snapshots: u32,
    transmit_power: f64,
    noise_power: f64,
    channel_gain_sq: f64,
    antennas: usize,
}

impl SensingParams {
    pub fn new(
        wavelength: f64,
        snapshots: u32,
        transmit_power: f64,
        noise_power: f64,
        channel_gain_sq: f64,
        antennas: usize,
    ) -> Result<Self> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(wavelength) {
            return Err(Error::InvalidParameter("wavelength must be positive"));
        }
        if snapshots == 0 || antennas == 0 {
            return Err(Error::InvalidParameter(
                "snapshots and antenna count must be positive",
            ));
        }
        if !positive(transmit_power) || !positive(noise_power) || !positive(channel_gain_sq) {
            return Err(Error::InvalidParameter(
                "powers and channel gain must be positive",
            ));
        }
        let params = Self {
            wavelength,
            snapshots,
            transmit_power,
            noise_power,
            channel_gain_sq,
            antennas,
        };
        if !positive(params.kappa()) {
            return Err(Error::InvalidParameter("kappa is not finite and positive"));
        }
        Ok(params)
    }

    /// Builds parameters from the received SNR `P |beta|^2 / sigma^2` in dB.
    ///
    /// Only that ratio enters `kappa`, so power and noise are normalised to one.
    pub fn from_snr_db(
        wavelength: f64,
        snapshots: u32,
        antennas: usize,
        snr_db: f64,
    ) -> Result<Self> {
        if !snr_db.is_finite() {
            return Err(Error::InvalidParameter("SNR must be finite"));
        }
        Self::new(
            wavelength,
            snapshots,
            1.0,
            1.0,
            libm::pow(10.0, snr_db / 10.0),
            antennas,
        )
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn snapshots(&self) -> u32 {
        self.snapshots
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn snr(&self) -> f64 {
        self.transmit_power * self.channel_gain_sq / self.noise_power
    }

    pub fn kappa(&self) -> f64 {
        self.noise_power * self.wavelength * self.wavelength
            / (8.0
                * PI
                * PI
                * self.snapshots as f64
                * self.transmit_power
                * self.antennas as f64
                * self.channel_gain_sq)
    }

    pub fn with_antennas(mut self, antennas: usize) -> Result<Self> {
        if antennas == 0 {
            return Err(Error::InvalidParameter("antenna count must be positive"));
        }
        self.antennas = antennas;
        Ok(self)
    }

    pub fn with_wavelength(mut self, wavelength: f64) -> Result<Self> {
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::InvalidParameter("wavelength must be positive"));
        }
        self.wavelength = wavelength;
        Ok(self)
    }
}

/// Covariance matrix of `(X, X^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentMatrix {
    pub var_x: f64,
    pub cov_x_x2: f64,
    pub var_x2: f64,
}

impl MomentMatrix {
    pub const fn new(var_x: f64, cov_x_x2: f64, var_x2: f64) -> Self {
        Self {
            var_x,
            cov_x_x2,
            var_x2,
        }
    }

    /// Moments of a centro-symmetric placement, where `Cov(X, X^2) = 0`.
    pub const fn symmetric(var_x: f64, var_x2: f64) -> Self {
        Self {
            var_x,
            cov_x_x2: 0.0,
            var_x2,
        }
    }

    pub fn determinant(&self) -> f64 {
        self.var_x * self.var_x2 - self.cov_x_x2 * self.cov_x_x2
    }

    /// Positive definite with a relative margin of [`DEGENERACY_TOL`].
    pub fn is_nondegenerate(&self) -> bool {
        self.var_x > 0.0
            && self.var_x2 > 0.0
            && self.determinant() > DEGENERACY_TOL * self.var_x * self.var_x2
    }

    /// `Sigma^-1` as `[z11, z12, z22]`.
    pub fn inverse(&self) -> Result<[f64; 3]> {
        if !self.is_nondegenerate() {
            return Err(Error::SingularMoments);
        }
        let det = self.determinant();
        Ok([self.var_x2 / det, -self.cov_x_x2 / det, self.var_x / det])
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(
            self.var_x * factor,
            self.cov_x_x2 * factor,
            self.var_x2 * factor,
        )
    }
}

/// `G1(x)`, `G2(x, x~)`, `G1(x~)` of a position list, using centred sums.
pub fn moments_of_positions(positions: &[f64]) -> MomentMatrix {
    let n = positions.len() as f64;
    let mean = positions.iter().sum::<f64>() / n;
    let mean_sq = positions.iter().map(|x| x * x).sum::<f64>() / n;
    let (mut var_x, mut cov, mut var_x2) = (0.0, 0.0, 0.0);
    for &x in positions {
        let dx = x - mean;
        let dx2 = x * x - mean_sq;
        var_x += dx * dx;
        cov += dx * dx2;
        var_x2 += dx2 * dx2;
    }
    MomentMatrix::new(var_x / n, cov / n, var_x2 / n)
}

pub fn sample_moments(array: &ArrayGeometry) -> MomentMatrix {
    moments_of_positions(array.positions())
}

fn checked_denominator(m: &MomentMatrix) -> Result<f64> {
    if m.is_nondegenerate() {
        Ok(m.determinant())
    } else {
        Err(Error::DegenerateGeometry)
    }
}

fn endfire_factor(source: &SourcePosition) -> Result<f64> {
    let s = 1.0 - source.u() * source.u();
    if s < ENDFIRE_TOL {
        Err(Error::EndfireSingularity)
    } else {
        Ok(s)
    }
}

/// Angle bound `kappa G1(x~) / (G1(x) G1(x~) - G2^2)`; independent of the source.
pub fn crb_u(array: &ArrayGeometry, params: &SensingParams) -> Result<f64> {
    let m = sample_moments(array);
    let den = checked_denominator(&m)?;
    Ok(params.kappa() * m.var_x2 / den)
}

/// Range bound.
pub fn crb_r(
    array: &ArrayGeometry,
    params: &SensingParams,
    source: &SourcePosition,
) -> Result<f64> {
    let m = sample_moments(array);
    crb_r_from_moments(&m, params, source)
}

fn crb_r_from_moments(
    m: &MomentMatrix,
    params: &SensingParams,
    source: &SourcePosition,
) -> Result<f64> {
    let den = checked_denominator(m)?;
    let s = endfire_factor(source)?;
    let (u, r) = (source.u(), source.r());
    let r2 = r * r;
    let num = 4.0 * r2 * r2 * m.var_x + 8.0 * u * r2 * r * m.cov_x_x2 + 4.0 * u * u * r2 * m.var_x2;
    Ok(params.kappa() * num / (s * s * den))
}

/// `SPEB = r^2/(1-u^2) CRB_u + CRB_r`, the trace of the Cartesian bound.
pub fn speb(array: &ArrayGeometry, params: &SensingParams, source: &SourcePosition) -> Result<f64> {
    let m = sample_moments(array);
    let den = checked_denominator(&m)?;
    let s = endfire_factor(source)?;
    let angle = params.kappa() * m.var_x2 / den;
    let range = crb_r_from_moments(&m, params, source)?;
    Ok(source.r() * source.r() / s * angle + range)
}

/// SPEB of a placement distribution through its `(X, X^2)` covariance.
pub fn speb_distribution(
    moments: &MomentMatrix,
    params: &SensingParams,
    source: &SourcePosition,
) -> Result<f64> {
    let [z11, z12, z22] = moments.inverse()?;
    let s = endfire_factor(source)?;
    let (u, r) = (source.u(), source.r());
    let v = [2.0 * u * r, -2.0 * r * r];
    let zv = [z11 * v[0] + z12 * v[1], z12 * v[0] + z22 * v[1]];
    let v_z_v = v[0] * zv[0] + v[1] * zv[1];
    Ok(params.kappa() * (r * r / s * z11 + v_z_v / (s * s)))
}

//! Worst-case SPEB over the near-field region and exhaustive placement search.
//!
//! Everything here is sequential. Work is exposed in independently evaluable
//! pieces ([`scan_points`], [`SubsetSpace::evaluate_range`]) whose partial
//! results merge with a deterministic, order-independent tie-break, so a
//! parallel driver reproduces the sequential answer bit for bit.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::Range;

use crate::crb::{moments_of_positions, speb, speb_distribution, MomentMatrix, SensingParams};
use crate::design::PlacementDistribution;
use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, NearFieldRegion, SourcePosition};

/// Default cap on `subsets x grid points` for [`exhaustive_search`].
pub const DEFAULT_SEARCH_BUDGET: u128 = 50_000_000;

/// Sampled near-field region.
///
/// Uniform grids place `u` at `u_max (2i - (n_u - 1)) / (n_u - 1)` and `r`
/// at `d_F + (d_R - d_F) j / (n_r - 1)`. Going from `n` to `2n - 1` samples
/// keeps every earlier point bit-identical, so refinement nests exactly.
/// Broadside `u = 0` is always sampled and `r = d_R(u)` closes every ray.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionGrid {
    region: NearFieldRegion,
    n_u: usize,
    n_r: usize,
    points: Vec<SourcePosition>,
}

/// Grid metadata carried by reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridInfo {
    pub n_u: usize,
    pub n_r: usize,
    pub u_max: f64,
    pub points: usize,
}

impl RegionGrid {
    pub fn uniform(region: NearFieldRegion, n_u: usize, n_r: usize) -> Result<Self> {
        if n_u == 0 || n_r == 0 {
            return Err(Error::InvalidParameter("grid resolutions must be positive"));
        }
        let mut points = Vec::new();
        for u in u_samples(n_u, region.u_max()) {
            if !region.admits(u) {
                continue;
            }
            for r in radial_samples(&region, u, n_r) {
                let p = SourcePosition::new(u, r)?;
                if region.contains(&p) {
                    points.push(p);
                }
            }
        }
        if points.is_empty() {
            return Err(Error::EmptyGrid);
        }
        Ok(Self {
            region,
            n_u,
            n_r,
            points,
        })
    }

    /// Arbitrary in-region points, e.g. a single probe location.
    pub fn from_points(region: NearFieldRegion, points: Vec<SourcePosition>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if points.iter().any(|p| !region.contains(p)) {
            return Err(Error::InvalidParameter(
                "grid point outside the near-field region",
            ));
        }
        let n = points.len();
        Ok(Self {
            region,
            n_u: n,
            n_r: 1,
            points,
        })
    }

    /// Next nested level: `2n - 1` samples per axis.
    pub fn refined(&self) -> Result<Self> {
        Self::uniform(self.region, 2 * self.n_u - 1, 2 * self.n_r - 1)
    }

    pub fn region(&self) -> &NearFieldRegion {
        &self.region
    }

    pub fn points(&self) -> &[SourcePosition] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn info(&self) -> GridInfo {
        GridInfo {
            n_u: self.n_u,
            n_r: self.n_r,
            u_max: self.region.u_max(),
            points: self.points.len(),
        }
    }
}

/// Angular samples, ascending, always containing `0`.
pub fn u_samples(n_u: usize, u_max: f64) -> Vec<f64> {
    if n_u <= 1 {
        return alloc::vec![0.0];
    }
    let span = (n_u - 1) as f64;
    let mut us: Vec<f64> = (0..n_u)
        .map(|i| {
            let t = (2 * i) as f64 - span;
            let u = u_max * (t / span);
            if u == 0.0 {
                0.0
            } else {
                u
            }
        })
        .collect();
    if n_u.is_multiple_of(2) {
        let mid = n_u / 2;
        us.insert(mid, 0.0);
    }
    us
}

/// Radial samples on `[d_F(u), d_R(u)]`, ascending, last one exactly `d_R(u)`.
pub fn radial_samples(region: &NearFieldRegion, u: f64, n_r: usize) -> Vec<f64> {
    let lo = region.fresnel(u);
    let hi = region.rayleigh(u);
    if n_r <= 1 {
        return alloc::vec![hi];
    }
    let span = (n_r - 1) as f64;
    (0..n_r)
        .map(|j| {
            if j + 1 == n_r {
                hi
            } else {
                (lo + (hi - lo) * (j as f64 / span)).min(hi)
            }
        })
        .collect()
}

/// Anything whose SPEB can be evaluated at a source.
pub trait SpebModel {
    /// Source-independent validity check, run once before a scan.
    fn check(&self) -> Result<()>;

    fn speb_at(&self, params: &SensingParams, source: &SourcePosition) -> Result<f64>;
}

impl SpebModel for ArrayGeometry {
    fn check(&self) -> Result<()> {
        if moments_of_positions(self.positions()).is_nondegenerate() {
            Ok(())
        } else {
            Err(Error::DegenerateGeometry)
        }
    }

    fn speb_at(&self, params: &SensingParams, source: &SourcePosition) -> Result<f64> {
        speb(self, params, source)
    }
}

impl SpebModel for MomentMatrix {
    fn check(&self) -> Result<()> {
        self.inverse().map(|_| ())
    }

    fn speb_at(&self, params: &SensingParams, source: &SourcePosition) -> Result<f64> {
        speb_distribution(self, params, source)
    }
}

impl SpebModel for PlacementDistribution {
    fn check(&self) -> Result<()> {
        self.moment_matrix().check()
    }

    fn speb_at(&self, params: &SensingParams, source: &SourcePosition) -> Result<f64> {
        speb_distribution(&self.moment_matrix(), params, source)
    }
}

/// A candidate maximiser.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorstPoint {
    pub speb: f64,
    pub source: SourcePosition,
}

impl WorstPoint {
    /// Total order: larger SPEB, then smaller `|u|`, then larger `r`, then larger `u`.
    fn rank(&self, other: &Self) -> Ordering {
        self.speb
            .total_cmp(&other.speb)
            .then_with(|| other.source.u().abs().total_cmp(&self.source.u().abs()))
            .then_with(|| self.source.r().total_cmp(&other.source.r()))
            .then_with(|| self.source.u().total_cmp(&other.source.u()))
    }

    fn max(a: Option<Self>, b: Option<Self>) -> Option<Self> {
        match (a, b) {
            (Some(x), Some(y)) => Some(if y.rank(&x) == Ordering::Greater {
                y
            } else {
                x
            }),
            (x, None) => x,
            (None, y) => y,
        }
    }
}

/// Partial result of scanning a slice of grid points.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PartialWorst {
    pub best: Option<WorstPoint>,
    pub evaluated: usize,
    pub failed: usize,
}

impl PartialWorst {
    /// Associative and commutative.
    pub fn merge(self, other: Self) -> Self {
        Self {
            best: WorstPoint::max(self.best, other.best),
            evaluated: self.evaluated + other.evaluated,
            failed: self.failed + other.failed,
        }
    }
}

/// Evaluates SPEB at every point; per-point failures are counted, not raised.
pub fn scan_points<M: SpebModel + ?Sized>(
    model: &M,
    params: &SensingParams,
    points: &[SourcePosition],
) -> PartialWorst {
    let mut acc = PartialWorst::default();
    for p in points {
        match model.speb_at(params, p) {
            Ok(v) if v.is_finite() => {
                acc.evaluated += 1;
                acc.best = WorstPoint::max(
                    acc.best,
                    Some(WorstPoint {
                        speb: v,
                        source: *p,
                    }),
                );
            }
            _ => acc.failed += 1,
        }
    }
    acc
}

/// Worst-case SPEB of a design together with where it occurs.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignReport {
    pub design: String,
    pub worst_case_speb: f64,
    pub worst_case_source: SourcePosition,
    pub grid: GridInfo,
    pub evaluated_points: usize,
}

impl DesignReport {
    /// Root of the SPEB: a lower bound on position RMSE in meters.
    pub fn worst_case_rmse(&self) -> f64 {
        libm::sqrt(self.worst_case_speb)
    }

    pub fn with_design(mut self, design: impl Into<String>) -> Self {
        self.design = design.into();
        self
    }
}

/// Turns a merged scan into a report.
pub fn finish_scan(partial: PartialWorst, grid: &RegionGrid) -> Result<DesignReport> {
    let best = partial.best.ok_or(Error::AllPointsDegenerate)?;
    Ok(DesignReport {
        design: String::new(),
        worst_case_speb: best.speb,
        worst_case_source: best.source,
        grid: grid.info(),
        evaluated_points: partial.evaluated,
    })
}

/// Maximum SPEB over the grid.
pub fn worst_case_speb<M: SpebModel + ?Sized>(
    model: &M,
    params: &SensingParams,
    grid: &RegionGrid,
) -> Result<DesignReport> {
    model.check()?;
    finish_scan(scan_points(model, params, grid.points()), grid)
}

/// SPEB along the Rayleigh boundary `r = d_R(u)` for centro-symmetric moments:
/// `kappa [ d^2 (1 + 3u^2) / Var(X) + 4 d^4 (1 - u^2)^2 / Var(X^2) ]`, `d = d_R,max`.
pub fn boundary_speb_profile(
    moments: &MomentMatrix,
    params: &SensingParams,
    region: &NearFieldRegion,
    u: f64,
) -> f64 {
    let d = region.max_rayleigh();
    let d2 = d * d;
    let s = 1.0 - u * u;
    params.kappa()
        * (d2 * (1.0 + 3.0 * u * u) / moments.var_x + 4.0 * d2 * d2 * s * s / moments.var_x2)
}

/// Per-point coefficients so that
/// `SPEB = kappa / det * (c_var_x2 Var(X^2) + c_cov Cov + c_var_x Var(X))`.
#[derive(Debug, Clone)]
pub struct GridCoefficients {
    coeffs: Vec<[f64; 3]>,
    points: Vec<SourcePosition>,
}

impl GridCoefficients {
    pub fn new(grid: &RegionGrid) -> Self {
        let points = grid.points().to_vec();
        let coeffs = points
            .iter()
            .map(|p| {
                let (u, r) = (p.u(), p.r());
                let s = 1.0 - u * u;
                let r2 = r * r;
                [
                    r2 / s + 4.0 * u * u * r2 / (s * s),
                    8.0 * u * r2 * r / (s * s),
                    4.0 * r2 * r2 / (s * s),
                ]
            })
            .collect();
        Self { coeffs, points }
    }

    /// Worst-case value and location for one set of moments.
    pub fn worst(&self, m: &MomentMatrix, kappa: f64) -> Option<WorstPoint> {
        if !m.is_nondegenerate() {
            return None;
        }
        let scale = kappa / m.determinant();
        let mut best: Option<WorstPoint> = None;
        for (c, p) in self.coeffs.iter().zip(&self.points) {
            let v = scale * (c[0] * m.var_x2 + c[1] * m.cov_x_x2 + c[2] * m.var_x);
            best = WorstPoint::max(
                best,
                Some(WorstPoint {
                    speb: v,
                    source: *p,
                }),
            );
        }
        best
    }
}

/// Exhaustive-search settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub pitch: f64,
    pub symmetry_prune: bool,
    pub budget: u128,
}

impl SearchConfig {
    /// Half-wavelength pitch, no pruning, default budget.
    pub fn new(wavelength: f64) -> Self {
        Self {
            pitch: wavelength / 2.0,
            symmetry_prune: false,
            budget: DEFAULT_SEARCH_BUDGET,
        }
    }
}

/// Candidate grid `a (2k - M) / M`, `k = 0..=M`, with `M = floor(2a / pitch)`.
///
/// The effective pitch `2a / M` is never below the requested one, keeps both
/// endpoints and is exactly mirror-symmetric.
pub fn candidate_positions(half_aperture: f64, pitch: f64) -> Result<Vec<f64>> {
    if !(pitch.is_finite() && pitch > 0.0) {
        return Err(Error::InvalidParameter("candidate pitch must be positive"));
    }
    let intervals = libm::floor(2.0 * half_aperture / pitch + 1e-9);
    if intervals < 1.0 {
        return Err(Error::InvalidParameter(
            "candidate pitch exceeds the aperture",
        ));
    }
    let m = intervals as usize;
    Ok((0..=m)
        .map(|k| {
            let x = half_aperture * (((2 * k) as f64 - m as f64) / m as f64);
            if x == 0.0 {
                0.0
            } else {
                x
            }
        })
        .collect())
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        // c * (n - i) / (i + 1) stays integral at every step
        let num = match c.checked_mul((n - i) as u128) {
            Some(v) => v,
            None => return u128::MAX,
        };
        c = num / (i as u128 + 1);
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SubsetMode {
    /// Any `k` of the candidates.
    Full,
    /// Mirror pairs drawn from the positive candidates, plus the origin when `N` is odd.
    Symmetric { with_center: bool },
}

/// Enumerable space of candidate subsets in lexicographic order.
#[derive(Debug, Clone)]
pub struct SubsetSpace {
    /// Pool the combinations draw from (all candidates, or positive ones).
    pool: Vec<f64>,
    choose: usize,
    mode: SubsetMode,
    count: u128,
}

impl SubsetSpace {
    pub fn new(candidates: &[f64], n: usize, symmetry_prune: bool) -> Result<Self> {
        if n == 0 || n > candidates.len() {
            return Err(Error::NoFeasibleSubset);
        }
        if !symmetry_prune {
            return Ok(Self {
                pool: candidates.to_vec(),
                choose: n,
                mode: SubsetMode::Full,
                count: binomial(candidates.len(), n),
            });
        }
        let positive: Vec<f64> = candidates.iter().copied().filter(|x| *x > 0.0).collect();
        let has_zero = candidates.contains(&0.0);
        let with_center = n % 2 == 1;
        if with_center && !has_zero {
            return Err(Error::NoFeasibleSubset);
        }
        let pairs = n / 2;
        if pairs > positive.len() {
            return Err(Error::NoFeasibleSubset);
        }
        Ok(Self {
            count: binomial(positive.len(), pairs),
            pool: positive,
            choose: pairs,
            mode: SubsetMode::Symmetric { with_center },
        })
    }

    pub fn len(&self) -> u128 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Combination with lexicographic rank `index`.
    fn unrank(&self, mut index: u128) -> Vec<usize> {
        let n = self.pool.len();
        let k = self.choose;
        let mut combo = Vec::with_capacity(k);
        let mut next = 0;
        for slot in 0..k {
            let mut c = next;
            loop {
                let block = binomial(n - c - 1, k - slot - 1);
                if index < block {
                    break;
                }
                index -= block;
                c += 1;
            }
            combo.push(c);
            next = c + 1;
        }
        combo
    }

    fn advance(&self, combo: &mut [usize]) -> bool {
        let n = self.pool.len();
        let k = combo.len();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if combo[i] < n - k + i {
                combo[i] += 1;
                for j in i + 1..k {
                    combo[j] = combo[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }

    fn write_positions(&self, combo: &[usize], out: &mut Vec<f64>) {
        out.clear();
        match self.mode {
            SubsetMode::Full => out.extend(combo.iter().map(|&i| self.pool[i])),
            SubsetMode::Symmetric { with_center } => {
                out.extend(combo.iter().rev().map(|&i| -self.pool[i]));
                if with_center {
                    out.push(0.0);
                }
                out.extend(combo.iter().map(|&i| self.pool[i]));
            }
        }
    }

    /// Positions of the subset with rank `index`, ascending.
    pub fn subset(&self, index: u128) -> Vec<f64> {
        let mut out = Vec::new();
        self.write_positions(&self.unrank(index), &mut out);
        out
    }

    /// Best subset among ranks in `range`.
    pub fn evaluate_range(
        &self,
        range: Range<u128>,
        coeffs: &GridCoefficients,
        kappa: f64,
        min_spacing: f64,
    ) -> Option<SubsetBest> {
        let end = range.end.min(self.count);
        if range.start >= end {
            return None;
        }
        let mut combo = self.unrank(range.start);
        let mut positions = Vec::with_capacity(self.choose * 2 + 1);
        let mut best: Option<SubsetBest> = None;
        let floor = min_spacing * (1.0 - 1e-9);
        let mut index = range.start;
        loop {
            self.write_positions(&combo, &mut positions);
            if positions.windows(2).all(|w| w[1] - w[0] >= floor) {
                if let Some(w) = coeffs.worst(&moments_of_positions(&positions), kappa) {
                    let cand = SubsetBest {
                        value: w.speb,
                        positions: positions.clone(),
                    };
                    best = SubsetBest::min(best, Some(cand));
                }
            }
            index += 1;
            if index >= end || !self.advance(&mut combo) {
                break;
            }
        }
        best
    }
}

/// Best subset seen so far.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetBest {
    pub value: f64,
    pub positions: Vec<f64>,
}

impl SubsetBest {
    /// Smaller worst-case value wins; ties go to the lexicographically smaller position vector.
    pub fn min(a: Option<Self>, b: Option<Self>) -> Option<Self> {
        match (a, b) {
            (Some(x), Some(y)) => {
                let ord = x.value.total_cmp(&y.value).then_with(|| {
                    x.positions
                        .iter()
                        .zip(&y.positions)
                        .map(|(p, q)| p.total_cmp(q))
                        .find(|o| *o != Ordering::Equal)
                        .unwrap_or(Ordering::Equal)
                });
                Some(if ord == Ordering::Greater { y } else { x })
            }
            (x, None) => x,
            (None, y) => y,
        }
    }
}

/// Outcome of [`exhaustive_search`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveResult {
    pub report: DesignReport,
    pub array: ArrayGeometry,
    pub subsets: u128,
}

/// Prepared exhaustive search: the subset space plus precomputed grid terms.
#[derive(Debug, Clone)]
pub struct ExhaustivePlan {
    pub space: SubsetSpace,
    pub coeffs: GridCoefficients,
    pub params: SensingParams,
    pub half_aperture: f64,
    pub wavelength: f64,
}

impl ExhaustivePlan {
    pub fn new(
        n: usize,
        half_aperture: f64,
        wavelength: f64,
        params: &SensingParams,
        grid: &RegionGrid,
        config: &SearchConfig,
    ) -> Result<Self> {
        if config.pitch < wavelength / 2.0 * (1.0 - 1e-9) {
            return Err(Error::InvalidParameter(
                "candidate pitch must be at least lambda/2",
            ));
        }
        let candidates = candidate_positions(half_aperture, config.pitch)?;
        let space = SubsetSpace::new(&candidates, n, config.symmetry_prune)?;
        let evaluations = space.len().saturating_mul(grid.len() as u128);
        if evaluations > config.budget {
            return Err(Error::SearchSpaceTooLarge {
                evaluations,
                budget: config.budget,
            });
        }
        Ok(Self {
            space,
            coeffs: GridCoefficients::new(grid),
            params: params.with_antennas(n)?,
            half_aperture,
            wavelength,
        })
    }

    pub fn evaluate_range(&self, range: Range<u128>) -> Option<SubsetBest> {
        self.space.evaluate_range(
            range,
            &self.coeffs,
            self.params.kappa(),
            self.wavelength / 2.0,
        )
    }

    /// Builds the final report from the merged best subset.
    pub fn finish(&self, best: Option<SubsetBest>, grid: &RegionGrid) -> Result<ExhaustiveResult> {
        let best = best.ok_or(Error::NoFeasibleSubset)?;
        let array = ArrayGeometry::new(best.positions, self.half_aperture, self.wavelength)?;
        let report = worst_case_speb(&array, &self.params, grid)?.with_design("exhaustive");
        Ok(ExhaustiveResult {
            report,
            array,
            subsets: self.space.len(),
        })
    }
}

/// Minimises the worst-case SPEB over all `N`-subsets of the candidate grid.
pub fn exhaustive_search(
    n: usize,
    half_aperture: f64,
    wavelength: f64,
    params: &SensingParams,
    grid: &RegionGrid,
    config: &SearchConfig,
) -> Result<ExhaustiveResult> {
    let plan = ExhaustivePlan::new(n, half_aperture, wavelength, params, grid, config)?;
    let best = plan.evaluate_range(0..plan.space.len());
    plan.finish(best, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{discrete_deployment, ThreePointDesign};
    use alloc::vec;

    const LAMBDA: f64 = 0.01;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn setup(a: f64) -> (NearFieldRegion, SensingParams) {
        (
            NearFieldRegion::new(a, LAMBDA).unwrap(),
            SensingParams::from_snr_db(LAMBDA, 1024, 25, 5.0).unwrap(),
        )
    }

    #[test]
    fn u_samples_contain_broadside_and_nest() {
        for n in 1..40 {
            let us = u_samples(n, 0.999);
            assert!(us.contains(&0.0));
            assert!(us.windows(2).all(|w| w[0] < w[1]));
            let fine = u_samples(2 * n - 1, 0.999);
            assert!(us.iter().all(|u| fine.contains(u)), "n = {n}");
        }
        assert_eq!(u_samples(2, 0.5), vec![-0.5, 0.0, 0.5]);
    }

    #[test]
    fn grid_points_lie_in_region() {
        let (region, _) = setup(25.0 * LAMBDA);
        let grid = RegionGrid::uniform(region, 21, 15).unwrap();
        assert!(grid.points().iter().all(|p| region.contains(p)));
        assert!(grid.points().contains(&region.broadside_rayleigh_point()));
        assert!(grid.len() <= 21 * 15);
        let fine = grid.refined().unwrap();
        assert!(grid.points().iter().all(|p| fine.points().contains(p)));
    }

    #[test]
    fn three_point_worst_case_is_broadside_rayleigh() {
        let a = 25.0 * LAMBDA;
        let (region, params) = setup(a);
        let grid = RegionGrid::uniform(region, 101, 51).unwrap();
        let design =
            crate::design::three_point_design(a, LAMBDA, crate::design::EdgeMass::Exact).unwrap();
        let report = worst_case_speb(&design.moments(), &params, &grid).unwrap();
        assert_eq!(report.worst_case_source, region.broadside_rayleigh_point());
        let m = design.moments();
        let d = region.max_rayleigh();
        let closed = params.kappa() * (d * d / m.var_x + 4.0 * d.powi(4) / m.var_x2);
        assert!(rel(report.worst_case_speb, closed) < 1e-12);
    }

    #[test]
    fn symmetric_arrays_peak_at_broadside() {
        let a = 5.0 * LAMBDA;
        let (region, _) = setup(a);
        let grid = RegionGrid::uniform(region, 41, 41).unwrap();
        for n in [5usize, 8, 13] {
            let params = SensingParams::from_snr_db(LAMBDA, 1024, n, 5.0).unwrap();
            let array = discrete_deployment(n, a, LAMBDA).unwrap();
            let report = worst_case_speb(&array, &params, &grid).unwrap();
            assert_eq!(report.worst_case_source.u(), 0.0);
            assert_eq!(report.worst_case_source.r(), region.max_rayleigh());
        }
    }

    #[test]
    fn single_point_grid() {
        let a = 25.0 * LAMBDA;
        let (region, params) = setup(a);
        let p = SourcePosition::new(0.2, 20.0).unwrap();
        let grid = RegionGrid::from_points(region, vec![p]).unwrap();
        let m = ThreePointDesign::new(a, 0.5).unwrap().moments();
        let report = worst_case_speb(&m, &params, &grid).unwrap();
        assert_eq!(report.worst_case_source, p);
        assert_eq!(
            report.worst_case_speb,
            speb_distribution(&m, &params, &p).unwrap()
        );
        assert!(
            RegionGrid::from_points(region, vec![SourcePosition::new(0.0, 1e4).unwrap()]).is_err()
        );
    }

    #[test]
    fn degenerate_model_is_reported() {
        let a = 25.0 * LAMBDA;
        let (region, params) = setup(a);
        let grid = RegionGrid::uniform(region, 5, 5).unwrap();
        let array = ArrayGeometry::new(vec![-a, a], a, LAMBDA).unwrap();
        assert_eq!(
            worst_case_speb(&array, &params, &grid),
            Err(Error::DegenerateGeometry)
        );
    }

    #[test]
    fn boundary_profile_properties() {
        let a = 25.0 * LAMBDA;
        let (region, params) = setup(a);
        let m = ThreePointDesign::new(a, 0.5).unwrap().moments();
        let d = region.max_rayleigh();
        let t0 = boundary_speb_profile(&m, &params, &region, 0.0);
        let t1 = boundary_speb_profile(&m, &params, &region, 1.0);
        let expected = params.kappa() * 4.0 * d * d * (d * d / m.var_x2 - 0.75 / m.var_x);
        assert!(rel(t0 - t1, expected) < 1e-10);
        assert!(t0 > t1);
        for &u in &[0.1, 0.5, 0.9] {
            assert_eq!(
                boundary_speb_profile(&m, &params, &region, u),
                boundary_speb_profile(&m, &params, &region, -u)
            );
            // matches the full SPEB evaluated on the Rayleigh boundary
            let p = SourcePosition::new(u, region.rayleigh(u)).unwrap();
            let full = speb_distribution(&m, &params, &p).unwrap();
            assert!(rel(boundary_speb_profile(&m, &params, &region, u), full) < 1e-12);
        }
        // convex in u^2 with f'' = 8 d^4 / Var(X^2)
        let f = |v: f64| boundary_speb_profile(&m, &params, &region, v.sqrt()) / params.kappa();
        let h = 1e-2;
        let second = (f(0.5 + h) - 2.0 * f(0.5) + f(0.5 - h)) / (h * h);
        assert!(rel(second, 8.0 * d.powi(4) / m.var_x2) < 1e-6);
    }

    #[test]
    fn candidates_are_symmetric() {
        let c = candidate_positions(5.0 * LAMBDA, LAMBDA / 2.0).unwrap();
        assert_eq!(c.len(), 21);
        assert_eq!((c[0], c[20], c[10]), (-5.0 * LAMBDA, 5.0 * LAMBDA, 0.0));
        for i in 0..21 {
            assert_eq!(c[i], -c[20 - i]);
        }
        // 2a / pitch = 2.5 -> two intervals of a each
        let c = candidate_positions(1.0, 0.8).unwrap();
        assert_eq!(c, vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(21, 5), 20349);
        assert_eq!(binomial(10, 2), 45);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(500, 250), u128::MAX);
    }

    #[test]
    fn unrank_matches_enumeration() {
        let c = candidate_positions(1.0, 0.25).unwrap();
        let space = SubsetSpace::new(&c, 4, false).unwrap();
        let mut combo = space.unrank(0);
        for idx in 0..space.len() {
            assert_eq!(space.unrank(idx), combo, "rank {idx}");
            let more = space.advance(&mut combo);
            assert_eq!(more, idx + 1 < space.len());
        }
    }

    #[test]
    fn three_candidates_three_antennas() {
        let a = 25.0 * LAMBDA;
        let (region, params) = setup(a);
        let grid = RegionGrid::uniform(region, 21, 21).unwrap();
        let mut config = SearchConfig::new(LAMBDA);
        config.pitch = a;
        let result = exhaustive_search(3, a, LAMBDA, &params, &grid, &config).unwrap();
        assert_eq!(result.array.positions(), &[-a, 0.0, a]);
        assert_eq!(result.subsets, 1);
    }

    #[test]
    fn range_partition_is_order_independent() {
        let a = 3.0 * LAMBDA;
        let (region, params) = setup(a);
        let grid = RegionGrid::uniform(region, 15, 15).unwrap();
        let plan =
            ExhaustivePlan::new(4, a, LAMBDA, &params, &grid, &SearchConfig::new(LAMBDA)).unwrap();
        let whole = plan.evaluate_range(0..plan.space.len());
        let n = plan.space.len();
        let mut pieces = None;
        for start in (0..n).step_by(7).collect::<Vec<_>>().into_iter().rev() {
            pieces = SubsetBest::min(pieces, plan.evaluate_range(start..(start + 7).min(n)));
        }
        assert_eq!(whole, pieces);
    }

    #[test]
    fn pruned_search_stays_close_to_full_search() {
        let a = 3.0 * LAMBDA;
        let (region, params) = setup(a);
        let grid = RegionGrid::uniform(region, 21, 21).unwrap();
        let mut config = SearchConfig::new(LAMBDA);
        let full = exhaustive_search(4, a, LAMBDA, &params, &grid, &config).unwrap();
        config.symmetry_prune = true;
        let pruned = exhaustive_search(4, a, LAMBDA, &params, &grid, &config).unwrap();
        // pruning restricts the space; at even N the symmetric sets cannot use the origin
        assert!(full.report.worst_case_speb <= pruned.report.worst_case_speb);
        assert!(pruned.report.worst_case_speb <= 1.05 * full.report.worst_case_speb);
        assert!(pruned.subsets < full.subsets);
        // the mirrored optimum scores the same
        let mirrored: Vec<f64> = full.array.positions().iter().rev().map(|x| -x).collect();
        let mirrored = ArrayGeometry::new(mirrored, a, LAMBDA).unwrap();
        let p4 = params.with_antennas(4).unwrap();
        let again = worst_case_speb(&mirrored, &p4, &grid).unwrap();
        assert!(rel(again.worst_case_speb, full.report.worst_case_speb) < 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let a = 5.0 * LAMBDA;
        let (region, params) = setup(a);
        let grid = RegionGrid::uniform(region, 201, 201).unwrap();
        let err = exhaustive_search(5, a, LAMBDA, &params, &grid, &SearchConfig::new(LAMBDA))
            .unwrap_err();
        assert!(matches!(err, Error::SearchSpaceTooLarge { .. }));
    }
}

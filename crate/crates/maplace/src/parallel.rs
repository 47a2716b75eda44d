//! Deterministic rayon drivers for grid scans and exhaustive search.
//!
//! Work is cut into fixed-size chunks that do not depend on the worker
//! count, and every reduction has a total-order tie-break, so results are
//! bit-identical for any number of threads.

use std::env;

use maplace_core::crb::SensingParams;
use maplace_core::geometry::SourcePosition;
use maplace_core::search::{
    finish_scan, scan_points, DesignReport, ExhaustivePlan, ExhaustiveResult, PartialWorst,
    RegionGrid, SearchConfig, SpebModel, SubsetBest,
};
use rayon::prelude::*;

use crate::error::{CliError, Result};

pub const THREADS_ENV: &str = "MA_PLACEMENT_THREADS";

const POINT_CHUNK: usize = 1024;
const SUBSET_CHUNK: u128 = 512;

pub struct Workers {
    pool: rayon::ThreadPool,
}

impl Workers {
    /// `threads == 0` lets rayon pick.
    pub fn new(threads: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
        Ok(Self { pool })
    }

    /// Reads the worker cap from `MA_PLACEMENT_THREADS`.
    pub fn from_env() -> Result<Self> {
        let threads = match env::var(THREADS_ENV) {
            Ok(v) if !v.trim().is_empty() => v.trim().parse().map_err(|_| {
                CliError::Config(format!(
                    "{THREADS_ENV} must be a non-negative integer, got `{v}`"
                ))
            })?,
            _ => 0,
        };
        Self::new(threads)
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn worst_case<M: SpebModel + Sync + ?Sized>(
        &self,
        model: &M,
        params: &SensingParams,
        grid: &RegionGrid,
    ) -> maplace_core::Result<DesignReport> {
        model.check()?;
        let partial = self.pool.install(|| {
            grid.points()
                .par_chunks(POINT_CHUNK)
                .map(|chunk| scan_points(model, params, chunk))
                .reduce(PartialWorst::default, PartialWorst::merge)
        });
        finish_scan(partial, grid)
    }

    /// SPEB at each point, in input order.
    pub fn speb_map<M: SpebModel + Sync + ?Sized>(
        &self,
        model: &M,
        params: &SensingParams,
        points: &[SourcePosition],
    ) -> Vec<maplace_core::Result<f64>> {
        self.pool.install(|| {
            points
                .par_iter()
                .map(|p| model.speb_at(params, p))
                .collect()
        })
    }

    pub fn exhaustive(
        &self,
        n: usize,
        half_aperture: f64,
        wavelength: f64,
        params: &SensingParams,
        grid: &RegionGrid,
        config: &SearchConfig,
    ) -> maplace_core::Result<ExhaustiveResult> {
        let plan = ExhaustivePlan::new(n, half_aperture, wavelength, params, grid, config)?;
        let total = plan.space.len();
        let chunks = total.div_ceil(SUBSET_CHUNK);
        let best = self.pool.install(|| {
            (0..chunks as u64)
                .into_par_iter()
                .map(|i| {
                    let start = i as u128 * SUBSET_CHUNK;
                    plan.evaluate_range(start..(start + SUBSET_CHUNK).min(total))
                })
                .reduce(|| None, SubsetBest::min)
        });
        plan.finish(best, grid)
    }
}

//! Command implementations. Each returns data; writing is left to the caller.

use std::path::Path;

use maplace_core::crb::SensingParams;
use maplace_core::design::{
    baseline_sparse_ula, baseline_two_edge, baseline_ula, cluster_sizes, discrete_deployment,
    discrete_deployment_with_mass, gamma_param, optimal_q,
};
use maplace_core::geometry::{ArrayGeometry, NearFieldRegion, SourcePosition};
use maplace_core::search::{DesignReport, RegionGrid, SearchConfig, SpebModel};

use crate::config::{DesignKind, Resolved};
use crate::error::{CliError, Result};
use crate::formats::{self, BenchmarkRow, HeatmapRow, Probe, Report};
use crate::parallel::Workers;

pub fn sensing_params(cfg: &Resolved, antennas: usize) -> Result<SensingParams> {
    Ok(SensingParams::from_snr_db(
        cfg.wavelength,
        cfg.snapshots,
        antennas,
        cfg.snr_db,
    )?)
}

pub fn region(cfg: &Resolved) -> Result<NearFieldRegion> {
    Ok(NearFieldRegion::with_u_max(
        cfg.half_aperture,
        cfg.wavelength,
        cfg.u_max,
    )?)
}

pub fn region_grid(cfg: &Resolved) -> Result<RegionGrid> {
    Ok(RegionGrid::uniform(region(cfg)?, cfg.n_u, cfg.n_r)?)
}

/// An array together with its evaluated worst case.
#[derive(Debug, Clone)]
pub struct Evaluated {
    pub array: ArrayGeometry,
    pub report: Report,
}

fn build_report(
    cfg: &Resolved,
    design: DesignKind,
    array: &ArrayGeometry,
    worst: &DesignReport,
    clusters: Option<[usize; 3]>,
) -> Report {
    let gamma = gamma_param(cfg.half_aperture, cfg.wavelength);
    Report {
        design: design.name().to_string(),
        n: array.len(),
        a_m: cfg.half_aperture,
        lambda_m: cfg.wavelength,
        snr_db: cfg.snr_db,
        worst_case_speb_m2: worst.worst_case_speb,
        worst_case_rmse_m: worst.worst_case_rmse(),
        worst_u: worst.worst_case_source.u(),
        worst_r_m: worst.worst_case_source.r(),
        q_star: optimal_q(gamma),
        gamma,
        clusters,
        probe: None,
    }
}

fn deployment_clusters(n: usize, edge_mass: f64) -> [usize; 3] {
    let c = cluster_sizes(n, edge_mass);
    [c.left, c.center, c.right]
}

/// Synthesizes the configured design and evaluates it.
///
/// `input` is only read for [`DesignKind::PositionsFile`].
pub fn cmd_design(cfg: &Resolved, workers: &Workers, input: Option<&Path>) -> Result<Evaluated> {
    let (n, a, lambda) = (cfg.n, cfg.half_aperture, cfg.wavelength);
    let grid = region_grid(cfg)?;
    let (array, clusters) = match cfg.design {
        DesignKind::Proposed => {
            let q = optimal_q(gamma_param(a, lambda));
            (
                discrete_deployment_with_mass(n, a, lambda, q)?,
                Some(deployment_clusters(n, q)),
            )
        }
        DesignKind::ProposedAsymptotic => (
            discrete_deployment(n, a, lambda)?,
            Some(deployment_clusters(n, 0.5)),
        ),
        DesignKind::Ula => (baseline_ula(n, lambda, a)?, None),
        DesignKind::SparseUla => (baseline_sparse_ula(n, a, lambda)?, None),
        DesignKind::TwoEdge => (baseline_two_edge(n, a, lambda)?, None),
        DesignKind::Exhaustive => {
            let params = sensing_params(cfg, n)?;
            let search = SearchConfig {
                pitch: cfg.pitch,
                symmetry_prune: cfg.symmetry_prune,
                budget: cfg.search_budget,
            };
            let found = workers.exhaustive(n, a, lambda, &params, &grid, &search)?;
            (found.array, None)
        }
        DesignKind::PositionsFile => {
            let path = input.ok_or_else(|| {
                CliError::Config("design `positions-file` needs an input positions file".into())
            })?;
            (
                ArrayGeometry::new(formats::read_positions(path)?, a, lambda)?,
                None,
            )
        }
    };
    let params = sensing_params(cfg, array.len())?;
    let worst = workers.worst_case(&array, &params, &grid)?;
    let report = build_report(cfg, cfg.design, &array, &worst, clusters);
    Ok(Evaluated { array, report })
}

/// Worst-case evaluation of given positions, optionally probing one source.
pub fn cmd_evaluate(
    cfg: &Resolved,
    workers: &Workers,
    positions: Vec<f64>,
    enforce_spacing: bool,
    probe: Option<(f64, f64)>,
) -> Result<Report> {
    let array = ArrayGeometry::new(positions, cfg.half_aperture, cfg.wavelength)?;
    if enforce_spacing {
        array.check_spacing(cfg.wavelength / 2.0)?;
    }
    let params = sensing_params(cfg, array.len())?;
    let worst = workers.worst_case(&array, &params, &region_grid(cfg)?)?;
    let mut report = build_report(cfg, DesignKind::PositionsFile, &array, &worst, None);
    if let Some((u, r)) = probe {
        let source = SourcePosition::new(u, r)?;
        let speb = array.speb_at(&params, &source)?;
        report.probe = Some(Probe {
            u,
            r_m: r,
            speb_m2: speb,
            rmse_m: speb.sqrt(),
        });
    }
    Ok(report)
}

/// log10 SPEB over the in-region grid, row-major in `u` then `r`.
pub fn cmd_heatmap(
    cfg: &Resolved,
    workers: &Workers,
    array: &ArrayGeometry,
) -> Result<Vec<HeatmapRow>> {
    let grid = region_grid(cfg)?;
    let params = sensing_params(cfg, array.len())?;
    array.check()?;
    let values = workers.speb_map(array, &params, grid.points());
    let rows = grid
        .points()
        .iter()
        .zip(values)
        .filter_map(|(p, v)| {
            let v = v.ok().filter(|v| v.is_finite() && *v > 0.0)?;
            let (p1, p2) = p.cartesian();
            Some(HeatmapRow {
                u: p.u(),
                r_m: p.r(),
                p1_m: p1,
                p2_m: p2,
                log10_speb: v.log10(),
            })
        })
        .collect();
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    SnrDb,
    N,
    /// Half-aperture in meters.
    A,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::SnrDb => "snr_db",
            SweepVariable::N => "n",
            SweepVariable::A => "a",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "snr_db" | "snr" => Ok(SweepVariable::SnrDb),
            "n" => Ok(SweepVariable::N),
            "a" => Ok(SweepVariable::A),
            _ => Err(CliError::Config(format!("unknown sweep variable `{s}`"))),
        }
    }

    /// Values swept when none are given.
    pub fn default_values(self, cfg: &Resolved) -> Vec<f64> {
        match self {
            SweepVariable::SnrDb => (0..6).map(|k| -5.0 + 5.0 * k as f64).collect(),
            SweepVariable::N => (0..7).map(|k| 8.0 + 4.0 * k as f64).collect(),
            SweepVariable::A => (1..=10).map(|k| 5.0 * k as f64 * cfg.wavelength).collect(),
        }
    }

    fn apply(self, cfg: &Resolved, value: f64) -> Result<Resolved> {
        let mut c = cfg.clone();
        match self {
            SweepVariable::SnrDb => {
                if !value.is_finite() {
                    return Err(CliError::Config(format!(
                        "invalid snr_db sweep value {value}"
                    )));
                }
                c.snr_db = value;
            }
            SweepVariable::N => {
                if !(value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64) {
                    return Err(CliError::Config(format!("invalid antenna count {value}")));
                }
                c.n = value as usize;
            }
            SweepVariable::A => {
                if !(value.is_finite() && value > 0.0) {
                    return Err(CliError::Config(format!("invalid half-aperture {value}")));
                }
                c.half_aperture = value;
                if c.pitch < c.wavelength / 2.0 {
                    c.pitch = c.wavelength / 2.0;
                }
            }
        }
        Ok(c)
    }
}

/// Evaluates every design at every sweep value. Cell failures become rows
/// with an error code; invalid sweep values abort the whole run.
pub fn cmd_benchmark(
    cfg: &Resolved,
    workers: &Workers,
    sweep: SweepVariable,
    values: &[f64],
    designs: &[DesignKind],
) -> Result<Vec<BenchmarkRow>> {
    if designs.contains(&DesignKind::PositionsFile) {
        return Err(CliError::Config(
            "`positions-file` cannot be benchmarked".into(),
        ));
    }
    let cells: Vec<Resolved> = values
        .iter()
        .map(|&v| sweep.apply(cfg, v))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(values.len() * designs.len());
    for (cell, &value) in cells.iter().zip(values) {
        for &design in designs {
            let cell_cfg = Resolved {
                design,
                ..cell.clone()
            };
            let outcome = cmd_design(&cell_cfg, workers, None);
            rows.push(BenchmarkRow {
                design: design.name().to_string(),
                variable: sweep.name().to_string(),
                value,
                worst_case_speb_m2: outcome.as_ref().ok().map(|e| e.report.worst_case_speb_m2),
                error: outcome.err().map(|e| e.code().to_string()),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    fn small() -> Resolved {
        ExperimentConfig {
            wavelength: Some(0.01),
            n_u: Some(41),
            n_r: Some(41),
            ..Default::default()
        }
        .resolve()
        .unwrap()
    }

    #[test]
    fn default_design_has_six_thirteen_six() {
        let cfg = small();
        let out = cmd_design(&cfg, &Workers::new(2).unwrap(), None).unwrap();
        assert_eq!(out.array.len(), 25);
        assert_eq!(out.report.clusters, Some([6, 13, 6]));
        assert_eq!(out.report.worst_u, 0.0);
        assert_eq!(out.report.gamma, 160000.0);
    }

    #[test]
    fn ula_design_has_half_wavelength_pitch() {
        let cfg = Resolved {
            design: DesignKind::Ula,
            ..small()
        };
        let out = cmd_design(&cfg, &Workers::new(1).unwrap(), None).unwrap();
        let xs = out.array.positions();
        assert_eq!(xs.len(), 25);
        assert!(xs.windows(2).all(|w| ((w[1] - w[0]) - 0.005).abs() < 1e-15));
        assert_eq!(out.report.clusters, None);
    }

    #[test]
    fn evaluate_probe_at_broadside_rayleigh_equals_worst_case() {
        let cfg = small();
        let workers = Workers::new(2).unwrap();
        let designed = cmd_design(&cfg, &workers, None).unwrap();
        let d = region(&cfg).unwrap().max_rayleigh();
        let rep = cmd_evaluate(
            &cfg,
            &workers,
            designed.array.positions().to_vec(),
            true,
            Some((0.0, d)),
        )
        .unwrap();
        assert_eq!(rep.probe.unwrap().speb_m2, rep.worst_case_speb_m2);
    }

    #[test]
    fn evaluate_reports_spacing_violation() {
        let cfg = small();
        let err = cmd_evaluate(
            &cfg,
            &Workers::new(1).unwrap(),
            vec![-0.2, 0.0, 0.001, 0.2],
            true,
            None,
        )
        .unwrap_err();
        assert_eq!(err.code(), "spacing_violation");
        assert!(cmd_evaluate(
            &cfg,
            &Workers::new(1).unwrap(),
            vec![-0.2, 0.0, 0.001, 0.2],
            false,
            None
        )
        .is_ok());
    }

    #[test]
    fn benchmark_records_failures_and_continues() {
        let cfg = Resolved {
            n_u: 11,
            n_r: 11,
            ..small()
        };
        let rows = cmd_benchmark(
            &cfg,
            &Workers::new(2).unwrap(),
            SweepVariable::N,
            &[8.0, 200.0],
            &[
                DesignKind::Proposed,
                DesignKind::Ula,
                DesignKind::Exhaustive,
            ],
        )
        .unwrap();
        assert_eq!(rows.len(), 6);
        assert!(rows[0].worst_case_speb_m2.is_some());
        assert_eq!(rows[2].error.as_deref(), Some("search_space_too_large"));
        // 200 antennas at lambda/2 need more than 50 lambda of aperture
        assert_eq!(rows[4].error.as_deref(), Some("infeasible_aperture"));
        assert!(rows
            .iter()
            .all(|r| r.worst_case_speb_m2.is_some() != r.error.is_some()));
    }

    #[test]
    fn benchmark_rejects_bad_sweep_values() {
        let cfg = small();
        let w = Workers::new(1).unwrap();
        assert!(cmd_benchmark(&cfg, &w, SweepVariable::N, &[7.5], &[DesignKind::Ula]).is_err());
        assert!(cmd_benchmark(&cfg, &w, SweepVariable::A, &[-1.0], &[DesignKind::Ula]).is_err());
        assert!(
            cmd_benchmark(&cfg, &w, SweepVariable::N, &[], &[DesignKind::Ula])
                .unwrap()
                .is_empty()
        );
    }
}

//! Seeded randomized property checks, also used by the `verify` command.

use maplace_core::crb::{crb_r, crb_u, speb, speb_distribution, MomentMatrix, SensingParams};
use maplace_core::design::{
    symmetrize, tchakaloff_reduce, three_point_design, EdgeMass, PlacementDistribution,
};
use maplace_core::geometry::{ArrayGeometry, NearFieldRegion, SourcePosition};
use maplace_core::search::{boundary_speb_profile, worst_case_speb, RegionGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normalized(raw: Vec<f64>) -> Vec<f64> {
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Random distribution on `[-a, a]` with 2 to 8 atoms; never symmetric in practice.
pub fn random_distribution<R: Rng>(rng: &mut R, a: f64) -> PlacementDistribution {
    loop {
        let k = rng.random_range(2..=8);
        let support: Vec<f64> = (0..k).map(|_| rng.random_range(-a..=a)).collect();
        let weights = normalized((0..k).map(|_| rng.random_range(0.05..1.0)).collect());
        if let Ok(d) = PlacementDistribution::new(support, weights, a) {
            if d.moment_matrix().is_nondegenerate() {
                return d;
            }
        }
    }
}

/// Random centro-symmetric distribution, optionally with an atom at the origin.
pub fn random_symmetric_distribution<R: Rng>(rng: &mut R, a: f64) -> PlacementDistribution {
    loop {
        let k = rng.random_range(2..=6);
        let half: Vec<f64> = (0..k).map(|_| rng.random_range(0.01 * a..=a)).collect();
        let half_w: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
        let centre = if rng.random_bool(0.5) {
            rng.random_range(0.05..1.0)
        } else {
            0.0
        };
        let total = 2.0 * half_w.iter().sum::<f64>() + centre;
        let mut support = Vec::with_capacity(2 * k + 1);
        let mut weights = Vec::with_capacity(2 * k + 1);
        for (x, w) in half.iter().zip(&half_w) {
            support.push(*x);
            weights.push(w / total);
            support.push(-*x);
            weights.push(w / total);
        }
        if centre > 0.0 {
            support.push(0.0);
            weights.push(centre / total);
        }
        if let Ok(d) = PlacementDistribution::new(support, weights, a) {
            if d.is_symmetric() && d.moment_matrix().is_nondegenerate() {
                return d;
            }
        }
    }
}

/// Random centro-symmetric array with `n` distinct elements in `[-a, a]`.
pub fn random_symmetric_array<R: Rng>(
    rng: &mut R,
    n: usize,
    a: f64,
    wavelength: f64,
) -> ArrayGeometry {
    loop {
        let mut half: Vec<f64> = (0..n / 2).map(|_| rng.random_range(0.0..=a)).collect();
        half.sort_by(f64::total_cmp);
        let mut xs: Vec<f64> = half.iter().rev().map(|x| -x).collect();
        if n % 2 == 1 {
            xs.push(0.0);
        }
        xs.extend(&half);
        if let Ok(arr) = ArrayGeometry::new(xs, a, wavelength) {
            return arr;
        }
    }
}

/// Uniformly random source inside the region.
pub fn random_source<R: Rng>(rng: &mut R, region: &NearFieldRegion) -> SourcePosition {
    loop {
        let u = rng.random_range(-region.u_max()..=region.u_max());
        if !region.admits(u) {
            continue;
        }
        let r = rng.random_range(region.fresnel(u)..=region.rayleigh(u));
        if let Ok(p) = SourcePosition::new(u, r) {
            return p;
        }
    }
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

/// Cartesian trace via the polar-to-Cartesian Jacobian, computed from the
/// individual polar bounds.
pub fn jacobian_trace(crb_u: f64, crb_r: f64, source: &SourcePosition) -> f64 {
    let (u, r) = (source.u(), source.r());
    let s = (1.0 - u * u).sqrt();
    // rows: d(p1, p2) / d(u, r)
    let j = [[r, u], [-r * u / s, s]];
    let d = [crb_u, crb_r];
    (0..2)
        .map(|i| (0..2).map(|k| j[i][k] * j[i][k] * d[k]).sum::<f64>())
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        name,
        passed,
        detail,
    }
}

/// Runs `cases` random instances of each property at `a = 25 lambda`.
pub fn run_checks(seed: u64, cases: usize, params: &SensingParams) -> Vec<Check> {
    let lambda = params.wavelength();
    let a = 25.0 * lambda;
    let region = NearFieldRegion::new(a, lambda).expect("valid region");
    let grid = RegionGrid::uniform(region, 41, 41).expect("valid grid");
    let mut rng = rng(seed);
    let mut out = Vec::new();

    let mut worst = 0.0f64;
    for _ in 0..cases {
        let d = random_distribution(&mut rng, a);
        let f = worst_case_speb(&d, params, &grid).expect("non-degenerate");
        let fs = worst_case_speb(&symmetrize(&d), params, &grid).expect("non-degenerate");
        worst = worst.max((fs.worst_case_speb - f.worst_case_speb) / f.worst_case_speb);
    }
    out.push(check(
        "symmetrization",
        worst <= 1e-12,
        format!("max relative increase {worst:.3e}"),
    ));

    let mut worst = 0.0f64;
    let mut at_broadside = true;
    for _ in 0..cases {
        let d = random_symmetric_distribution(&mut rng, a);
        let m = d.moment_matrix();
        let rep = worst_case_speb(&d, params, &grid).expect("non-degenerate");
        at_broadside &= rep.worst_case_source == region.broadside_rayleigh_point();
        worst = worst.max(rel_err(
            rep.worst_case_speb,
            boundary_speb_profile(&m, params, &region, 0.0),
        ));
    }
    out.push(check(
        "broadside worst case",
        at_broadside && worst <= 1e-10,
        format!("all at broadside: {at_broadside}, max relative error {worst:.3e}"),
    ));

    let mut worst = 0.0f64;
    for _ in 0..cases {
        let d = random_symmetric_distribution(&mut rng, a);
        let t = tchakaloff_reduce(&d).expect("symmetric input");
        let (m, mt) = (d.moment_matrix(), t.moment_matrix());
        for _ in 0..10 {
            let p = random_source(&mut rng, &region);
            let want = speb_distribution(&m, params, &p).expect("valid");
            let got = speb_distribution(&mt, params, &p).expect("valid");
            worst = worst.max(rel_err(got, want));
        }
        worst = worst
            .max(rel_err(t.m2(), d.m2()))
            .max(rel_err(t.m4(), d.m4()));
    }
    out.push(check(
        "three-atom reduction",
        worst <= 1e-10,
        format!("max relative error {worst:.3e}"),
    ));

    let mut ok = true;
    for _ in 0..cases {
        let d = random_distribution(&mut rng, a);
        let (m2, m4) = (d.m2(), d.m4());
        ok &= m2 * m2 <= m4 * (1.0 + 1e-12) && m4 <= a * a * m2 * (1.0 + 1e-12);
    }
    let tp = three_point_design(a, lambda, EdgeMass::Exact).expect("valid");
    let dist = tp.distribution();
    let attained = rel_err(dist.m4(), a * a * dist.m2());
    out.push(check(
        "moment bounds",
        ok && attained <= 1e-14,
        format!("bounds hold: {ok}, three-point m4/(a^2 m2) - 1 = {attained:.3e}"),
    ));

    let mut worst = 0.0f64;
    for _ in 0..cases {
        let n = rng.random_range(3..=16);
        let arr = random_symmetric_array(&mut rng, n, a, lambda);
        let p = random_source(&mut rng, &region);
        let params = params.with_antennas(n).expect("valid");
        let (cu, cr) = match (crb_u(&arr, &params), crb_r(&arr, &params, &p)) {
            (Ok(u), Ok(r)) => (u, r),
            _ => continue,
        };
        let s = speb(&arr, &params, &p).expect("valid");
        worst = worst.max(rel_err(s, jacobian_trace(cu, cr, &p)));
    }
    out.push(check(
        "polar-to-cartesian trace",
        worst <= 1e-10,
        format!("max relative error {worst:.3e}"),
    ));

    let m = MomentMatrix::symmetric(a * a / 3.0, 4.0 * a.powi(4) / 45.0);
    let grid_full = grid.refined().expect("valid grid");
    let coarse = worst_case_speb(&m, params, &grid)
        .expect("valid")
        .worst_case_speb;
    let fine = worst_case_speb(&m, params, &grid_full)
        .expect("valid")
        .worst_case_speb;
    out.push(check(
        "grid refinement",
        fine >= coarse,
        format!("coarse {coarse:.6e}, refined {fine:.6e}"),
    ));

    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_respect_their_contracts() {
        let mut r = rng(7);
        let a = 0.25;
        for _ in 0..200 {
            let d = random_symmetric_distribution(&mut r, a);
            assert!(d.is_symmetric());
            assert!(d.support().iter().all(|x| x.abs() <= a));
            let arr = random_symmetric_array(&mut r, 7, a, 0.01);
            assert!(arr.is_centro_symmetric(0.0));
        }
    }

    #[test]
    fn checks_pass_and_are_reproducible() {
        let params = SensingParams::from_snr_db(0.01, 1024, 25, 5.0).unwrap();
        let first = run_checks(3, 8, &params);
        assert!(first.iter().all(|c| c.passed), "{first:?}");
        assert_eq!(first, run_checks(3, 8, &params));
    }
}

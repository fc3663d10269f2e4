//! The explicit pair w(x) = e^{−1/|x|}|x|^{−(n+1)}, V = Δw/w solving
//! −Δw + Vw = 0 in B(0,1) with w vanishing to infinite order at the origin.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{fd_laplacian, ScalarField};
use crate::geometry::{check_dim, log_grid, norm, unit_sphere_area, Ball, Point};
use crate::growth::{morrey_norm, GrowthFunction, MorreyNormResult};
use crate::maximal_bmo::{bmo_seminorm, doubling_ratio, vanishing_order, SubballSampler, VanishingResult};
use crate::quadrature::{integrate_ball, Integrand, QuadOptions};
use crate::stummel::{classify, modulus_curve, ClassifyThresholds, ModulusCurve, StummelClass};

pub const RESIDUAL_R_MIN: f64 = 0.05;

/// `count` seeded points with RESIDUAL_R_MIN ≤ |x| ≤ r_max.
pub fn sample_shell_points(n: usize, count: usize, r_max: f64, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let len = norm(&v);
        if !(len > 1e-3 && len <= 1.0) {
            continue;
        }
        let r = rng.random_range(RESIDUAL_R_MIN..=r_max);
        out.push(Point::new(v.iter().map(|c| c * r / len).collect()));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualPoint {
    pub x: Point,
    pub closed_form: f64,
    pub finite_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub n: usize,
    pub h: f64,
    pub max_closed_form: f64,
    pub max_finite_difference: f64,
    pub points: Vec<ResidualPoint>,
}

fn relative_residual(lap: f64, vw: f64) -> f64 {
    let scale = lap.abs() + vw.abs();
    if scale == 0.0 {
        0.0
    } else {
        (vw - lap).abs() / scale
    }
}

/// |−Δw + Vw| / (|Δw| + |Vw|) from the closed-form Laplacian and from a
/// central-difference stencil of step `h`.
pub fn verify_pde_residual(n: usize, points: &[Point], h: f64) -> Result<ResidualReport> {
    if !(h > 0.0) {
        return Err(Error::ParameterOutOfRange(format!("step h = {h} must be positive")));
    }
    let (w, v) = crate::fields::make_example_pair(n)?;
    let mut out = Vec::with_capacity(points.len());
    for x in points {
        check_dim(n, x.dim())?;
        let r = x.norm();
        if !(RESIDUAL_R_MIN..1.0).contains(&r) {
            return Err(Error::ParameterOutOfRange(format!("|x| = {r} outside [{RESIDUAL_R_MIN}, 1)")));
        }
        let vw = v.value(x.coords()) * w.value(x.coords());
        let closed_form = relative_residual(w.laplacian(x.coords())?, vw);
        let finite_difference = relative_residual(fd_laplacian(&w, x.coords(), h), vw);
        out.push(ResidualPoint { x: x.clone(), closed_form, finite_difference });
    }
    Ok(ResidualReport {
        n,
        h,
        max_closed_form: out.iter().map(|p| p.closed_form).fold(0.0, f64::max),
        max_finite_difference: out.iter().map(|p| p.finite_difference).fold(0.0, f64::max),
        points: out,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassComparison {
    pub r: f64,
    pub quadrature: f64,
    /// σ_{n−1} e^{−1/r}
    pub exact: f64,
    pub rel_error: f64,
    pub error_estimate: f64,
}

pub fn verify_mass_formula(n: usize, r_list: &[f64], opts: &QuadOptions) -> Result<Vec<MassComparison>> {
    let w = ScalarField::example_w(n);
    let ig = Integrand::field(&w);
    r_list
        .iter()
        .map(|&r| {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::ParameterOutOfRange(format!("mass radius {r} outside (0, 1)")));
            }
            let q = integrate_ball(&ig, &Ball::centered(n, r)?, opts)?;
            let exact = unit_sphere_area(n) * (-1.0 / r).exp();
            Ok(MassComparison {
                r,
                quadrature: q.value,
                exact,
                rel_error: (q.value - exact).abs() / exact,
                error_estimate: q.abs_error_estimate,
            })
        })
        .collect()
}

/// Radii from 0.02 to 0.2.
pub fn default_vanishing_grid() -> Vec<f64> {
    log_grid(0.02, 0.2, 11)
}

pub fn verify_vanishing(n: usize, k_range: &[f64], r_grid: &[f64], opts: &QuadOptions) -> Result<VanishingResult> {
    vanishing_order(&ScalarField::example_w(n), &Point::origin(n), r_grid, k_range, opts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialClass {
    pub alpha: f64,
    pub class: StummelClass,
    pub curve: ModulusCurve,
}

/// The origin and the 3ⁿ lattice {−s, 0, s}ⁿ.
pub fn default_potential_candidates(n: usize, spacing: f64) -> Vec<Point> {
    let mut out = vec![Point::origin(n)];
    for idx in 0..3usize.pow(n as u32) {
        let mut rem = idx;
        let coords: Vec<f64> = (0..n)
            .map(|_| {
                let j = rem % 3;
                rem /= 3;
                (j as f64 - 1.0) * spacing
            })
            .collect();
        if coords.iter().any(|c| *c != 0.0) {
            out.push(Point::new(coords));
        }
    }
    out
}

pub fn classify_potential(
    n: usize,
    alphas: &[f64],
    p: f64,
    r_grid: &[f64],
    x_candidates: &[Point],
    thresholds: &ClassifyThresholds,
    opts: &QuadOptions,
) -> Result<Vec<PotentialClass>> {
    let v = ScalarField::example_v(n);
    alphas
        .iter()
        .map(|&alpha| {
            let curve = modulus_curve(&v, alpha, p, r_grid, x_candidates, opts)?;
            Ok(PotentialClass { alpha, class: classify(&curve, thresholds), curve })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VStarReport {
    pub n: usize,
    pub p: f64,
    /// n − 4p
    pub lambda: f64,
    /// p ≥ n/4: outside the range where Power(n − 4p) is a growth function
    pub observational: bool,
    /// largest average r^{4p−n} ∫_{B(x,r)} |V*|^p over all cells
    pub max_average: f64,
    pub origin_max_average: f64,
    /// (4n+9)^p σ_{n−1}/(n−4p), bounding the averages at x = 0
    pub majorant: Option<f64>,
    pub norm: MorreyNormResult,
}

/// The origin and a k-per-axis lattice on [−1, 1]ⁿ.
pub fn default_vstar_candidates(n: usize, per_axis: usize) -> Vec<Point> {
    let k = per_axis.max(2);
    let mut out = vec![Point::origin(n)];
    for idx in 0..k.pow(n as u32) {
        let mut rem = idx;
        let coords: Vec<f64> = (0..n)
            .map(|_| {
                let j = rem % k;
                rem /= k;
                2.0 * j as f64 / (k - 1) as f64 - 1.0
            })
            .collect();
        if coords.iter().any(|c| *c != 0.0) {
            out.push(Point::new(coords));
        }
    }
    out
}

pub fn verify_vstar_morrey(
    n: usize,
    p: f64,
    r_list: &[f64],
    x_candidates: &[Point],
    opts: &QuadOptions,
) -> Result<VStarReport> {
    let vstar = ScalarField::example_v(n).truncated(Ball::centered(n, 1.0)?)?;
    let lambda = n as f64 - 4.0 * p;
    let norm = morrey_norm(&vstar, p, &GrowthFunction::power(lambda), x_candidates, r_list, opts)?;
    let average = |local: f64| local.powf(p);
    let origin = x_candidates.iter().position(|x| x.norm() == 0.0);
    let origin_max_average =
        origin.map(|i| norm.curve(i).iter().map(|c| average(c.local)).fold(0.0, f64::max)).unwrap_or(0.0);
    let majorant = (lambda > 0.0).then(|| (4.0 * n as f64 + 9.0).powf(p) * unit_sphere_area(n) / lambda);
    Ok(VStarReport {
        n,
        p,
        lambda,
        observational: lambda <= 0.0,
        max_average: if norm.infinite { f64::INFINITY } else { average(norm.value) },
        origin_max_average,
        majorant,
        norm,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupSample {
    pub delta: f64,
    pub seminorm: f64,
    pub witness: Ball,
}

/// BMO seminorm (α = 1) of log(w + δ) on B(0, 1/2) for each δ.
pub fn bmo_blowup_scan(
    n: usize,
    deltas: &[f64],
    sampler: &SubballSampler,
    opts: &QuadOptions,
) -> Result<Vec<BlowupSample>> {
    if deltas.iter().any(|d| !(*d > 0.0)) || deltas.windows(2).any(|d| !(d[1] < d[0])) {
        return Err(Error::ParameterOutOfRange("δ list must be positive and strictly decreasing".into()));
    }
    let ball = Ball::centered(n, 0.5)?;
    deltas
        .iter()
        .map(|&delta| {
            let f = ScalarField::example_w(n).log_shift(delta);
            let b = bmo_seminorm(&f, &ball, 1.0, sampler, opts)?;
            Ok(BlowupSample { delta, seminorm: b.seminorm, witness: b.witness })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoublingSample {
    pub r: f64,
    pub ratio: f64,
    /// e^{1/r}
    pub exact: f64,
}

pub fn doubling_scan(n: usize, r_list: &[f64], opts: &QuadOptions) -> Result<Vec<DoublingSample>> {
    let w = ScalarField::example_w(n);
    r_list
        .par_iter()
        .map(|&r| {
            let ratio = doubling_ratio(&w, &Point::origin(n), r, 1.0, opts)?;
            Ok(DoublingSample { r, ratio, exact: (1.0 / r).exp() })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stummel::stummel_modulus;

    #[test]
    fn residual_is_tiny_in_three_and_four_dimensions() {
        for n in [3, 4] {
            let pts = sample_shell_points(n, 50, 0.95, 7);
            let rep = verify_pde_residual(n, &pts, 1e-4).unwrap();
            assert!(rep.max_closed_form <= 1e-12, "n={n}: {}", rep.max_closed_form);
            assert!(rep.max_finite_difference <= 1e-3, "n={n}: {}", rep.max_finite_difference);
        }
    }

    #[test]
    fn residual_rejects_points_near_origin() {
        let pts = vec![Point::new(vec![0.01, 0.0, 0.0])];
        assert!(verify_pde_residual(3, &pts, 1e-4).is_err());
    }

    #[test]
    fn shell_points_are_seeded() {
        let a = sample_shell_points(3, 5, 0.95, 1);
        assert_eq!(a, sample_shell_points(3, 5, 0.95, 1));
        assert!(a.iter().all(|p| (RESIDUAL_R_MIN..=0.95).contains(&p.norm())));
    }

    #[test]
    fn mass_matches_antiderivative() {
        let rows = verify_mass_formula(3, &[0.1, 0.5, 0.99], &QuadOptions::with_tol(1e-11)).unwrap();
        for row in &rows {
            assert!(row.rel_error <= 1e-8, "{row:?}");
        }
        assert!((rows[1].exact - 1.7006733263505454).abs() < 1e-12);
    }

    #[test]
    fn vanishing_and_contrast() {
        let res = verify_vanishing(3, &[1.0, 2.0, 5.0], &log_grid(0.005, 0.05, 6), &QuadOptions::default()).unwrap();
        assert!(matches!(res.verdict, crate::maximal_bmo::VanishingVerdict::VanishesToOrder { .. }));
        let one = ScalarField::constant(3, 1.0);
        let c = vanishing_order(&one, &Point::origin(3), &default_vanishing_grid(), &[1.0], &QuadOptions::default())
            .unwrap();
        assert!(matches!(c.verdict, crate::maximal_bmo::VanishingVerdict::FailsAtOrder { .. }));
    }

    #[test]
    fn potential_classes_at_the_ends() {
        let cands = default_potential_candidates(3, 0.25);
        let grid = log_grid(1e-5, 1e-1, 5);
        let rows = classify_potential(
            3,
            &[2.0, 5.0],
            1.0,
            &grid,
            &cands,
            &ClassifyThresholds::default(),
            &QuadOptions::singular(),
        )
        .unwrap();
        assert_eq!(rows[0].class, StummelClass::NotInSTilde);
        assert_eq!(rows[1].class, StummelClass::InS);
        let (slope, _) = rows[1].curve.small_r_slope.unwrap();
        assert!((slope - 1.0).abs() < 0.1, "{slope}");
    }

    #[test]
    fn off_center_modulus_diverges_beyond_dimension() {
        // |V| ~ |y|^{-4} is not locally integrable in R³, so any center whose
        // ball reaches the origin without sitting on it diverges.
        let v = ScalarField::example_v(3);
        let x = Point::new(vec![0.05, 0.0, 0.0]);
        let ig = Integrand::field(&v).with_kernel(x.coords(), -2.0);
        let q = integrate_ball(&ig, &Ball::new(x, 0.1).unwrap(), &QuadOptions::singular()).unwrap();
        assert!(q.verdict.is_divergent());
        let at_origin = stummel_modulus(&v, 5.0, 1.0, 0.1, &[Point::origin(3)], &QuadOptions::singular()).unwrap();
        assert!(!at_origin.is_divergent());
    }

    #[test]
    fn vstar_averages_bounded_by_majorant() {
        let cands = default_vstar_candidates(3, 3);
        let rep = verify_vstar_morrey(3, 0.7, &log_grid(1e-3, 1e2, 11), &cands, &QuadOptions::singular()).unwrap();
        assert!(!rep.norm.infinite, "{:?}", rep.norm.large_r_slope);
        assert!(!rep.observational);
        assert!(rep.origin_max_average <= rep.majorant.unwrap());
    }

    #[test]
    fn blowup_grows_and_smooth_contrast_does_not() {
        let sampler = SubballSampler { lattice: 3, radii: 6, min_fraction: 1e-2 };
        let scan = bmo_blowup_scan(3, &[1e-1, 1e-4], &sampler, &QuadOptions::default()).unwrap();
        assert!(scan[0].seminorm.is_finite());
        assert!(scan[1].seminorm > scan[0].seminorm);
        let bump = ScalarField::bump(Point::origin(3), 0.4, 2.0).unwrap();
        let a = ScalarField::sum(vec![bump.clone(), ScalarField::constant(3, 1.0)]).unwrap().log_shift(1e-1);
        let b = ScalarField::sum(vec![bump, ScalarField::constant(3, 1.0)]).unwrap().log_shift(1e-4);
        let ball = Ball::centered(3, 0.5).unwrap();
        let sa = bmo_seminorm(&a, &ball, 1.0, &sampler, &QuadOptions::default()).unwrap().seminorm;
        let sb = bmo_seminorm(&b, &ball, 1.0, &sampler, &QuadOptions::default()).unwrap().seminorm;
        assert!((sa - sb).abs() < 0.1 * sa);
    }

    #[test]
    fn doubling_matches_exponential() {
        for s in doubling_scan(3, &[0.2, 0.1], &QuadOptions::with_tol(1e-10)).unwrap() {
            assert!((s.ratio - s.exact).abs() < 1e-6 * s.exact, "{s:?}");
        }
    }

    #[test]
    fn blowup_rejects_increasing_deltas() {
        assert!(bmo_blowup_scan(3, &[1e-3, 1e-1], &SubballSampler::default(), &QuadOptions::default()).is_err());
    }
}

//! Hardy–Littlewood maximal functions on sample sets, A₁ ratios, BMO_α
//! seminorms, vanishing-order curves and doubling ratios.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{GridData, ScalarField, Singularity};
use crate::geometry::{check_dim, distance, log_grid, unit_ball_volume, Ball, Point};
use crate::growth::{morrey_norm, GrowthFunction, MorreyNormResult};
use crate::quadrature::{integrate_ball, log_log_slope, Integrand, QuadOptions, QuadratureResult, Verdict};

/// Default sup grid for M: 31 log-spaced radii in [10⁻³, 10²].
pub fn default_r_search() -> Vec<f64> {
    log_grid(1e-3, 1e2, 31)
}

fn ball_integral(ig: &Integrand<'_>, x: &Point, r: f64, opts: &QuadOptions) -> QuadratureResult {
    integrate_ball(ig, &Ball { center: x.clone(), radius: r }, opts).expect("dimensions checked")
}

/// Where the maximal function was sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "layout", rename_all = "snake_case")]
pub enum Layout {
    Points,
    /// points `center + ρ·direction` for the listed ρ, with f radial about `center`
    Radial {
        center: Point,
        direction: Vec<f64>,
        radii: Vec<f64>,
    },
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
        resolution: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalField {
    pub points: Vec<Point>,
    /// max over the r-search grid of ball averages of |f|
    pub sampled: Vec<f64>,
    /// max(sampled, |f(x)|), the Lebesgue-point value of M(f)
    pub values: Vec<f64>,
    pub witness_r: Vec<f64>,
    pub r_search: Vec<f64>,
    pub inconclusive: usize,
    pub layout: Layout,
}

impl MaximalField {
    /// M(f) as a field: a radial table or a grid, depending on the layout.
    pub fn to_field(&self) -> Result<ScalarField> {
        match &self.layout {
            Layout::Radial { center, radii, .. } => {
                if self.values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidField("maximal function is infinite on the sample".into()));
                }
                ScalarField::radial_table(center.clone(), radii.clone(), self.values.clone())
            }
            Layout::Box { lower, upper, resolution } => ScalarField::grid(GridData {
                lower: lower.clone(),
                upper: upper.clone(),
                resolution: *resolution,
                samples: self.values.iter().map(|v| if v.is_finite() { *v } else { f64::MAX.sqrt() }).collect(),
            }),
            Layout::Points => Err(Error::InvalidField("scattered samples cannot be turned into a field".into())),
        }
    }
}

fn check_search(r_search: &[f64]) -> Result<()> {
    if r_search.is_empty() || r_search.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::ParameterOutOfRange("radius search grid must be non-empty and positive".into()));
    }
    Ok(())
}

fn maximal_at(f: &ScalarField, x: &Point, r_search: &[f64], opts: &QuadOptions) -> (f64, f64, bool) {
    if f.is_zero() {
        return (0.0, r_search[0], false);
    }
    let ig = Integrand::field_power(f, 1.0);
    let n = f.dim();
    let mut best = (0.0f64, r_search[0]);
    let mut inconclusive = false;
    for &r in r_search {
        let q = ball_integral(&ig, x, r, opts);
        if q.verdict.is_divergent() {
            return (f64::INFINITY, r, inconclusive);
        }
        inconclusive |= q.verdict == Verdict::Inconclusive;
        let avg = q.value / (unit_ball_volume(n) * r.powi(n as i32));
        if avg > best.0 {
            best = (avg, r);
        }
    }
    (best.0, best.1, inconclusive)
}

fn maximal_on(
    f: &ScalarField,
    points: Vec<Point>,
    r_search: &[f64],
    layout: Layout,
    opts: &QuadOptions,
) -> Result<MaximalField> {
    check_search(r_search)?;
    for x in &points {
        check_dim(f.dim(), x.dim())?;
    }
    let rows: Vec<(f64, f64, bool)> = points.par_iter().map(|x| maximal_at(f, x, r_search, opts)).collect();
    let values = rows.iter().zip(&points).map(|(row, x)| row.0.max(f.value(x).abs())).collect();
    Ok(MaximalField {
        sampled: rows.iter().map(|r| r.0).collect(),
        witness_r: rows.iter().map(|r| r.1).collect(),
        inconclusive: rows.iter().filter(|r| r.2).count(),
        values,
        points,
        r_search: r_search.to_vec(),
        layout,
    })
}

/// M(f) at arbitrary points, as the max of ball averages over `r_search`.
pub fn maximal_function(
    f: &ScalarField,
    x_grid: &[Point],
    r_search: &[f64],
    opts: &QuadOptions,
) -> Result<MaximalField> {
    maximal_on(f, x_grid.to_vec(), r_search, Layout::Points, opts)
}

/// M(f) for f radial about `center`, sampled along one ray.
pub fn maximal_function_radial(
    f: &ScalarField,
    center: &Point,
    radii: &[f64],
    r_search: &[f64],
    opts: &QuadOptions,
) -> Result<MaximalField> {
    check_dim(f.dim(), center.dim())?;
    if radii.len() < 2 || radii[0] <= 0.0 || radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::ParameterOutOfRange("ray radii must be positive and increasing".into()));
    }
    let mut direction = vec![0.0; f.dim()];
    direction[0] = 1.0;
    let points =
        radii.iter().map(|&rho| center.translated(&direction.iter().map(|d| d * rho).collect::<Vec<_>>())).collect();
    let layout = Layout::Radial { center: center.clone(), direction, radii: radii.to_vec() };
    maximal_on(f, points, r_search, layout, opts)
}

/// M(f) on the node lattice of a box.
pub fn maximal_function_box(
    f: &ScalarField,
    lower: &[f64],
    upper: &[f64],
    resolution: usize,
    r_search: &[f64],
    opts: &QuadOptions,
) -> Result<MaximalField> {
    let n = f.dim();
    check_dim(n, lower.len())?;
    check_dim(n, upper.len())?;
    if resolution == 0 {
        return Err(Error::ParameterOutOfRange("box resolution must be positive".into()));
    }
    let m = resolution + 1;
    let points = (0..m.pow(n as u32))
        .map(|idx| {
            let mut rem = idx;
            let mut y = vec![0.0; n];
            for i in (0..n).rev() {
                let k = rem % m;
                rem /= m;
                y[i] = lower[i] + (upper[i] - lower[i]) * k as f64 / resolution as f64;
            }
            Point::new(y)
        })
        .collect();
    let layout = Layout::Box { lower: lower.to_vec(), upper: upper.to_vec(), resolution };
    maximal_on(f, points, r_search, layout, opts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct A1Report {
    /// sup over the sample of M(w)(x)/w(x)
    pub constant: f64,
    pub witness: Point,
    pub ratios: Vec<f64>,
}

/// sup M(w)/w over `x_grid` for a given weight field.
pub fn check_a1_weight(w: &ScalarField, x_grid: &[Point], r_search: &[f64], opts: &QuadOptions) -> Result<A1Report> {
    let poles: Vec<Singularity> = w.singularities();
    let xs: Vec<Point> =
        x_grid.iter().filter(|x| !poles.iter().any(|s| distance(&s.point, x) == 0.0)).cloned().collect();
    if xs.is_empty() {
        return Err(Error::ParameterOutOfRange("no sample point away from the weight's poles".into()));
    }
    let mw = maximal_function(w, &xs, r_search, opts)?;
    let ratios: Vec<f64> = mw.values.iter().zip(&xs).map(|(m, x)| m / w.value(x)).collect();
    let (i, constant) =
        ratios.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &r)| if r > acc.1 { (i, r) } else { acc });
    Ok(A1Report { constant, witness: xs[i].clone(), ratios })
}

/// The weight w = (M f)^γ for f radial about `center`, tabulated along a ray.
pub fn maximal_power_weight(
    f: &ScalarField,
    center: &Point,
    gamma: f64,
    radii: &[f64],
    r_search: &[f64],
    opts: &QuadOptions,
) -> Result<ScalarField> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::ParameterOutOfRange(format!("γ = {gamma} must lie in (0, 1)")));
    }
    let m = maximal_function_radial(f, center, radii, r_search, opts)?;
    let values = m.values.iter().map(|v| v.powf(gamma)).collect();
    ScalarField::radial_table(center.clone(), radii.to_vec(), values)
}

/// A₁ check of w = (M f)^γ for radial f: the weight is tabulated on
/// `table_radii` and M(w)/w is evaluated on `x_grid`.
pub fn check_a1(
    f: &ScalarField,
    center: &Point,
    gamma: f64,
    table_radii: &[f64],
    x_grid: &[Point],
    r_search: &[f64],
    opts: &QuadOptions,
) -> Result<A1Report> {
    let w = maximal_power_weight(f, center, gamma, table_radii, r_search, opts)?;
    check_a1_weight(&w, x_grid, r_search, opts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalMorreyReport {
    pub f_norm: MorreyNormResult,
    pub mf_norm: MorreyNormResult,
    pub ratio: f64,
}

/// ‖M f‖ / ‖f‖ in L^{p,φ}, with M f materialized from `mf`.
pub fn check_maximal_morrey_bound(
    f: &ScalarField,
    mf: &MaximalField,
    p: f64,
    phi: &GrowthFunction,
    x_candidates: &[Point],
    r_grid: &[f64],
    opts: &QuadOptions,
) -> Result<MaximalMorreyReport> {
    let field = mf.to_field()?;
    let mut mf_candidates = x_candidates.to_vec();
    for s in field.singularities() {
        if !mf_candidates.iter().any(|x| distance(x, &s.point) == 0.0) {
            mf_candidates.push(s.point);
        }
    }
    let f_norm = morrey_norm(f, p, phi, x_candidates, r_grid, opts)?;
    let mf_norm = morrey_norm(&field, p, phi, &mf_candidates, r_grid, opts)?;
    let ratio = if f_norm.value == 0.0 { 0.0 } else { mf_norm.value / f_norm.value };
    Ok(MaximalMorreyReport { f_norm, mf_norm, ratio })
}

/// Sub-balls B' ⊆ B: centers on a lattice × log-spaced radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SubballSampler {
    /// lattice points per axis
    pub lattice: usize,
    pub radii: usize,
    /// smallest sub-ball radius as a fraction of the radius of B
    pub min_fraction: f64,
}

impl Default for SubballSampler {
    fn default() -> Self {
        SubballSampler { lattice: 5, radii: 12, min_fraction: 1e-2 }
    }
}

impl SubballSampler {
    pub fn refined(&self, factor: usize) -> Self {
        SubballSampler {
            lattice: (self.lattice - 1) * factor + 1,
            radii: (self.radii - 1) * factor + 1,
            min_fraction: self.min_fraction,
        }
    }

    pub fn balls(&self, b: &Ball) -> Vec<Ball> {
        let n = b.dim();
        let c = b.center.coords();
        let k = self.lattice.max(1);
        let radii =
            if self.radii >= 2 { log_grid(b.radius * self.min_fraction, b.radius, self.radii) } else { vec![b.radius] };
        let mut out = Vec::new();
        for idx in 0..k.pow(n as u32) {
            let mut rem = idx;
            let mut x = vec![0.0; n];
            for i in (0..n).rev() {
                let j = rem % k;
                rem /= k;
                let t = if k == 1 { 0.0 } else { 2.0 * j as f64 / (k - 1) as f64 - 1.0 };
                x[i] = c[i] + t * b.radius;
            }
            let room = b.radius - distance(&x, c);
            for &r in &radii {
                if r <= room * (1.0 + 1e-12) {
                    out.push(Ball { center: Point::new(x.clone()), radius: r.min(room) });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubballOscillation {
    pub ball: Ball,
    pub mean: f64,
    pub oscillation: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BmoResult {
    pub ball: Ball,
    pub alpha: f64,
    pub seminorm: f64,
    pub witness: Ball,
    pub subballs: Vec<SubballOscillation>,
}

/// f_{B'} and (|B'|^{−1} ∫_{B'} |f − f_{B'}|^α)^{1/α}.
pub fn mean_oscillation(f: &ScalarField, b: &Ball, alpha: f64, opts: &QuadOptions) -> Result<SubballOscillation> {
    check_dim(f.dim(), b.dim())?;
    let n = f.dim();
    let volume = unit_ball_volume(n) * b.radius.powi(n as i32);
    let q = integrate_ball(&Integrand::field(f), b, opts)?;
    if q.verdict.is_divergent() {
        return Ok(SubballOscillation {
            ball: b.clone(),
            mean: f64::NAN,
            oscillation: f64::INFINITY,
            verdict: q.verdict,
        });
    }
    let mean = q.value / volume;
    let poles =
        f.singularities().into_iter().map(|s| Singularity { exponent: s.exponent * alpha, point: s.point }).collect();
    let ig = Integrand::new(n, move |y| (f.value(y) - mean).abs().powf(alpha), poles, f.symmetry());
    let o = integrate_ball(&ig, b, opts)?;
    let verdict = q.verdict.combine(o.verdict);
    let oscillation =
        if o.verdict.is_divergent() { f64::INFINITY } else { (o.value.max(0.0) / volume).powf(1.0 / alpha) };
    Ok(SubballOscillation { ball: b.clone(), mean, oscillation, verdict })
}

pub fn bmo_seminorm(
    f: &ScalarField,
    b: &Ball,
    alpha: f64,
    sampler: &SubballSampler,
    opts: &QuadOptions,
) -> Result<BmoResult> {
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(Error::ParameterOutOfRange(format!("BMO exponent α = {alpha} must be ≥ 1")));
    }
    check_dim(f.dim(), b.dim())?;
    let balls = sampler.balls(b);
    let subballs: Vec<SubballOscillation> =
        balls.par_iter().map(|bb| mean_oscillation(f, bb, alpha, opts)).collect::<Result<Vec<_>>>()?;
    let best = subballs.iter().fold(&subballs[0], |acc, s| if s.oscillation > acc.oscillation { s } else { acc });
    Ok(BmoResult {
        ball: b.clone(),
        alpha,
        seminorm: best.oscillation,
        witness: best.ball.clone(),
        subballs: subballs.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VanishingCurve {
    pub k: f64,
    /// (r, |B(x₀,r)|^{−k} ∫_{B(x₀,r)} w), ordered by increasing r
    pub samples: Vec<(f64, f64)>,
    /// the curve decreases as r decreases through the smallest decade
    pub decreasing: bool,
    /// log–log slope over the smallest decade (positive means → 0)
    pub slope: Option<f64>,
    pub vanishes: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum VanishingVerdict {
    VanishesToOrder { k_max: f64 },
    FailsAtOrder { k: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VanishingResult {
    pub x0: Point,
    pub curves: Vec<VanishingCurve>,
    pub verdict: VanishingVerdict,
}

/// Slope above which a vanishing curve counts as tending to zero.
pub const VANISHING_SLOPE: f64 = 0.05;

pub fn vanishing_order(
    w: &ScalarField,
    x0: &Point,
    r_grid: &[f64],
    k_range: &[f64],
    opts: &QuadOptions,
) -> Result<VanishingResult> {
    check_dim(w.dim(), x0.dim())?;
    check_search(r_grid)?;
    if k_range.is_empty() {
        return Err(Error::ParameterOutOfRange("empty k range".into()));
    }
    let n = w.dim();
    let mut radii = r_grid.to_vec();
    radii.sort_by(f64::total_cmp);
    let ig = Integrand::field(w);
    let masses: Vec<f64> = radii.par_iter().map(|&r| ball_integral(&ig, x0, r, opts).value).collect();
    let r_min = radii[0];
    let curves: Vec<VanishingCurve> = k_range
        .iter()
        .map(|&k| {
            let samples: Vec<(f64, f64)> = radii
                .iter()
                .zip(&masses)
                .map(|(&r, &m)| (r, m / (unit_ball_volume(n) * r.powi(n as i32)).powf(k)))
                .collect();
            let window: Vec<(f64, f64)> =
                samples.iter().copied().filter(|s| s.0 <= r_min * 10.0 * (1.0 + 1e-9)).collect();
            let decreasing = window.windows(2).all(|p| p[0].1 <= p[1].1);
            let (r, v): (Vec<f64>, Vec<f64>) = window.iter().copied().unzip();
            let slope =
                if v.iter().all(|x| *x == 0.0) { Some(f64::INFINITY) } else { log_log_slope(&r, &v).map(|s| s.0) };
            let vanishes = decreasing && slope.is_some_and(|s| s > VANISHING_SLOPE);
            VanishingCurve { k, samples, decreasing, slope, vanishes }
        })
        .collect();
    let verdict = match curves.iter().find(|c| !c.vanishes) {
        Some(c) => VanishingVerdict::FailsAtOrder { k: c.k },
        None => VanishingVerdict::VanishesToOrder { k_max: k_range.iter().cloned().fold(f64::NEG_INFINITY, f64::max) },
    };
    Ok(VanishingResult { x0: x0.clone(), curves, verdict })
}

/// ∫_{B(x₀,r)} w^β / ∫_{B(x₀,r/2)} w^β
pub fn doubling_ratio(w: &ScalarField, x0: &Point, r: f64, beta: f64, opts: &QuadOptions) -> Result<f64> {
    check_dim(w.dim(), x0.dim())?;
    if !(beta > 0.0 && beta <= 1.0) || !(r > 0.0) {
        return Err(Error::ParameterOutOfRange(format!("need β ∈ (0, 1] and r > 0 (β={beta}, r={r})")));
    }
    let ig = Integrand::field_power(w, beta);
    let outer = ball_integral(&ig, x0, r, opts);
    let inner = ball_integral(&ig, x0, r / 2.0, opts);
    if !(inner.value.abs() > 1e-300) {
        return Err(Error::ZeroDenominator(inner.value));
    }
    Ok(outer.value / inner.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> QuadOptions {
        QuadOptions::default()
    }

    #[test]
    fn constant_maximal_function() {
        let f = ScalarField::constant(3, -2.0);
        let m = maximal_function(
            &f,
            &[Point::origin(3), Point::new(vec![1.0, 2.0, 0.0])],
            &log_grid(0.1, 10.0, 5),
            &opts(),
        )
        .unwrap();
        for v in &m.values {
            assert!((v - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn maximal_of_inverse_distance_is_bracketed() {
        let f = ScalarField::power_at_origin(3, 1.0);
        let x = Point::new(vec![1.0, 0.0, 0.0]);
        let m = maximal_function(&f, &[x], &default_r_search(), &opts()).unwrap();
        assert!(m.values[0] >= 1.0 && m.values[0] <= 3.0, "{}", m.values[0]);
    }

    #[test]
    fn indicator_far_point_lower_bound() {
        let f = ScalarField::constant(3, 1.0).truncated(Ball::centered(3, 1.0).unwrap()).unwrap();
        let x = Point::new(vec![2.0, 0.0, 0.0]);
        let m = maximal_function(&f, &[x], &log_grid(0.5, 10.0, 40), &opts()).unwrap();
        assert!(m.values[0] >= 1.0 / 27.0);
    }

    #[test]
    fn a1_for_constant_weight_is_one() {
        let f = ScalarField::constant(3, 1.0);
        let w =
            maximal_power_weight(&f, &Point::origin(3), 0.5, &log_grid(0.1, 10.0, 5), &log_grid(0.1, 1.0, 3), &opts())
                .unwrap();
        let r = check_a1_weight(&w, &[Point::new(vec![0.5, 0.0, 0.0])], &log_grid(0.1, 1.0, 3), &opts()).unwrap();
        assert!((r.constant - 1.0).abs() < 1e-6);
    }

    #[test]
    fn bmo_of_constant_and_linear() {
        let b = Ball::centered(3, 1.0).unwrap();
        let sampler = SubballSampler { lattice: 3, radii: 3, min_fraction: 0.25 };
        let c = ScalarField::constant(3, 5.0);
        assert!(bmo_seminorm(&c, &b, 1.0, &sampler, &opts()).unwrap().seminorm < 1e-9);
        let lin = ScalarField::coordinate(3, 0);
        let r = bmo_seminorm(&lin, &b, 1.0, &sampler, &opts()).unwrap();
        // (1/|B|)∫_B |y₁| = 3/8 on the unit ball of R³
        assert!((r.seminorm - 0.375).abs() < 1e-6, "{}", r.seminorm);
        assert_eq!(r.witness.radius, 1.0);
    }

    #[test]
    fn sub_balls_stay_inside() {
        let b = Ball::new(Point::new(vec![0.5, -1.0, 2.0]), 2.0).unwrap();
        for bb in SubballSampler::default().balls(&b) {
            assert!(b.contains_ball(&bb));
        }
    }

    #[test]
    fn doubling_of_constant() {
        let one = ScalarField::constant(3, 1.0);
        let d = doubling_ratio(&one, &Point::origin(3), 0.3, 1.0, &opts()).unwrap();
        assert!((d - 8.0).abs() < 1e-9);
    }

    #[test]
    fn vanishing_of_quadratic() {
        let q = ScalarField::radial_power(3, 1.0, -2.0, Point::origin(3)).unwrap();
        let r = vanishing_order(&q, &Point::origin(3), &log_grid(1e-3, 1e-1, 9), &[1.0, 2.0], &opts()).unwrap();
        assert!(r.curves[0].vanishes);
        assert!(!r.curves[1].vanishes);
        assert_eq!(r.verdict, VanishingVerdict::FailsAtOrder { k: 2.0 });
    }
}

//! Stummel p-moduli η_{α,p}V(r) = sup_x (∫_{B(x,r)} |V|^p |x−y|^{α−n} dy)^{1/p}
//! and membership classification.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::geometry::{check_dim, distance, log_grid, Ball, Point};
use crate::quadrature::{fit_line, integrate_ball, Integrand, QuadOptions, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StummelValue {
    /// +∞ when divergent
    pub value: f64,
    pub verdict: Verdict,
    pub witness_x: Point,
    pub error_estimate: f64,
}

impl StummelValue {
    pub fn is_divergent(&self) -> bool {
        self.verdict.is_divergent()
    }
}

fn check_params(v: &ScalarField, alpha: f64, p: f64, x_candidates: &[Point]) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) || !(p >= 1.0 && p.is_finite()) {
        return Err(Error::ParameterOutOfRange(format!("need α > 0 and p ≥ 1 (α={alpha}, p={p})")));
    }
    if x_candidates.is_empty() {
        return Err(Error::ParameterOutOfRange("empty candidate set".into()));
    }
    for x in x_candidates {
        check_dim(v.dim(), x.dim())?;
    }
    for s in v.singularities() {
        if !x_candidates.iter().any(|x| distance(x, &s.point) == 0.0) {
            return Err(Error::ParameterOutOfRange(format!("candidate set misses the pole {:?}", s.point.coords())));
        }
    }
    Ok(())
}

fn kernel_integral(v: &ScalarField, alpha: f64, p: f64, x: &Point, r: f64, opts: &QuadOptions) -> (f64, Verdict, f64) {
    if v.is_zero() {
        return (0.0, Verdict::Convergent, 0.0);
    }
    let n = v.dim() as f64;
    let ig = Integrand::field_power(v, p).with_kernel(x, n - alpha);
    let ball = Ball { center: x.clone(), radius: r };
    let q = integrate_ball(&ig, &ball, opts).expect("dimensions checked");
    if q.verdict.is_divergent() {
        return (f64::INFINITY, q.verdict, f64::INFINITY);
    }
    let eta = q.value.max(0.0).powf(1.0 / p);
    let err = if q.value > 0.0 { eta * q.abs_error_estimate / (p * q.value) } else { 0.0 };
    (eta, q.verdict, err)
}

fn sup_over(cands: &[Point], results: Vec<(f64, Verdict, f64)>) -> StummelValue {
    let mut verdict = Verdict::Convergent;
    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        verdict = verdict.combine(r.1);
        if r.0 > results[best].0 {
            best = i;
        }
    }
    StummelValue {
        value: if verdict.is_divergent() { f64::INFINITY } else { results[best].0 },
        verdict,
        witness_x: cands[best].clone(),
        error_estimate: results[best].2,
    }
}

pub fn stummel_modulus(
    v: &ScalarField,
    alpha: f64,
    p: f64,
    r: f64,
    x_candidates: &[Point],
    opts: &QuadOptions,
) -> Result<StummelValue> {
    check_params(v, alpha, p, x_candidates)?;
    if !(r > 0.0) {
        return Err(Error::ParameterOutOfRange(format!("radius {r} must be positive")));
    }
    let results = x_candidates.par_iter().map(|x| kernel_integral(v, alpha, p, x, r, opts)).collect();
    Ok(sup_over(x_candidates, results))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusSample {
    pub r: f64,
    pub value: f64,
    pub divergent: bool,
    pub verdict: Verdict,
    pub error_estimate: f64,
    pub witness_x: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusCurve {
    pub n: usize,
    pub alpha: f64,
    pub p: f64,
    pub samples: Vec<ModulusSample>,
    /// max over adjacent samples of the doubling factor implied by the local
    /// power law, (η(r₂)/η(r₁))^{ln 2 / ln(r₂/r₁)}
    pub doubling_constant: Option<f64>,
    /// log–log slope and residual over the first two decades of radii
    pub small_r_slope: Option<(f64, f64)>,
    pub all_divergent: bool,
}

pub fn modulus_curve(
    v: &ScalarField,
    alpha: f64,
    p: f64,
    r_grid: &[f64],
    x_candidates: &[Point],
    opts: &QuadOptions,
) -> Result<ModulusCurve> {
    check_params(v, alpha, p, x_candidates)?;
    if r_grid.is_empty() || r_grid.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::ParameterOutOfRange("radius grid must be non-empty and positive".into()));
    }
    let mut radii = r_grid.to_vec();
    radii.sort_by(f64::total_cmp);
    let jobs: Vec<(usize, usize)> =
        (0..radii.len()).flat_map(|i| (0..x_candidates.len()).map(move |j| (i, j))).collect();
    let flat: Vec<(f64, Verdict, f64)> =
        jobs.par_iter().map(|&(i, j)| kernel_integral(v, alpha, p, &x_candidates[j], radii[i], opts)).collect();
    let samples: Vec<ModulusSample> = flat
        .chunks(x_candidates.len())
        .zip(&radii)
        .map(|(chunk, &r)| {
            let s = sup_over(x_candidates, chunk.to_vec());
            ModulusSample {
                r,
                value: s.value,
                divergent: s.verdict.is_divergent(),
                verdict: s.verdict,
                error_estimate: s.error_estimate,
                witness_x: s.witness_x,
            }
        })
        .collect();

    let finite: Vec<&ModulusSample> = samples.iter().filter(|s| !s.divergent && s.value > 0.0).collect();
    let doubling_constant = (finite.len() >= 2).then(|| {
        finite
            .windows(2)
            .map(|w| (w[1].value / w[0].value).powf(2f64.ln() / (w[1].r / w[0].r).ln()))
            .fold(0.0, f64::max)
    });
    let small_r_slope = if finite.len() >= 2 {
        let r0 = finite[0].r;
        let window: Vec<&&ModulusSample> = finite.iter().filter(|s| s.r <= r0 * 100.0 * (1.0 + 1e-9)).collect();
        let (x, y): (Vec<f64>, Vec<f64>) = window.iter().map(|s| (s.r.ln(), s.value.ln())).unzip();
        (x.len() >= 2).then(|| {
            let (slope, _, rms) = fit_line(&x, &y);
            (slope, rms.exp_m1())
        })
    } else {
        None
    };
    Ok(ModulusCurve {
        n: v.dim(),
        alpha,
        p,
        all_divergent: samples.iter().all(|s| s.divergent),
        samples,
        doubling_constant,
        small_r_slope,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StummelClass {
    /// S_{α,p}: finite modulus tending to zero
    InS,
    /// S̃_{α,p} \ S_{α,p} as far as the sampled radii show
    InSTildeOnly,
    NotInSTilde,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyThresholds {
    /// the smallest-r value must fall below this fraction of η(r_max)
    pub drop: f64,
    pub max_residual: f64,
}

impl Default for ClassifyThresholds {
    fn default() -> Self {
        ClassifyThresholds { drop: 1e-3, max_residual: 0.10 }
    }
}

/// Default radii for classification: 11 log-spaced values in [10⁻⁶, 10⁻¹].
pub fn default_classify_grid() -> Vec<f64> {
    log_grid(1e-6, 1e-1, 11)
}

pub fn classify(curve: &ModulusCurve, thresholds: &ClassifyThresholds) -> StummelClass {
    if curve.samples.iter().any(|s| s.divergent) {
        return StummelClass::NotInSTilde;
    }
    if curve.samples.iter().any(|s| s.verdict == Verdict::Inconclusive) {
        return StummelClass::Inconclusive;
    }
    let (first, last) = match (curve.samples.first(), curve.samples.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => return StummelClass::Inconclusive,
    };
    if last.value == 0.0 {
        return StummelClass::InS;
    }
    match curve.small_r_slope {
        Some((slope, residual)) if residual <= thresholds.max_residual => {
            if first.value < thresholds.drop * last.value && slope > 0.0 {
                StummelClass::InS
            } else {
                StummelClass::InSTildeOnly
            }
        }
        Some(_) => StummelClass::Inconclusive,
        None => StummelClass::InSTildeOnly,
    }
}

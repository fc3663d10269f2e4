//! Growth functions φ, their structural conditions, and the generalized
//! Morrey norm sup_{x,r} (φ(r)^{−1} ∫_{B(x,r)} |f|^p)^{1/p}.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::geometry::{distance, log_grid, Ball, Point};
use crate::quadrature::{adaptive, integrate_ball, log_log_slope, AdaptiveOptions, Integrand, QuadOptions, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GrowthFunction {
    /// t^λ
    Power {
        lambda: f64,
    },
    /// log(t^λ + 1)
    LogPower {
        lambda: f64,
    },
    Constant,
    /// (t, φ(t)) knots, log–log interpolated and extended by the end power trends.
    Tabulated {
        knots: Vec<(f64, f64)>,
    },
}

impl GrowthFunction {
    pub fn power(lambda: f64) -> Self {
        GrowthFunction::Power { lambda }
    }

    pub fn log_power(lambda: f64) -> Self {
        GrowthFunction::LogPower { lambda }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GrowthFunction::Power { lambda } | GrowthFunction::LogPower { lambda } if !lambda.is_finite() => {
                Err(Error::ParameterOutOfRange(format!("growth exponent {lambda} is not finite")))
            }
            GrowthFunction::LogPower { lambda } if *lambda == 0.0 => {
                Err(Error::ParameterOutOfRange("log(t^0 + 1) is constant; use `constant`".into()))
            }
            GrowthFunction::Tabulated { knots } => {
                if knots.len() < 2 {
                    return Err(Error::ParameterOutOfRange("a tabulated growth function needs two knots".into()));
                }
                if knots.iter().any(|(t, v)| !(*t > 0.0 && *v > 0.0 && t.is_finite() && v.is_finite())) {
                    return Err(Error::ParameterOutOfRange("tabulated knots must be positive and finite".into()));
                }
                if knots.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                    return Err(Error::ParameterOutOfRange("tabulated knots must be strictly increasing in t".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            GrowthFunction::Power { lambda } => t.powf(*lambda),
            GrowthFunction::LogPower { lambda } => t.powf(*lambda).ln_1p(),
            GrowthFunction::Constant => 1.0,
            GrowthFunction::Tabulated { knots } => {
                let last = knots.len() - 2;
                let i = match knots.iter().position(|k| k.0 > t) {
                    Some(0) => 0,
                    Some(j) => (j - 1).min(last),
                    None => last,
                };
                let (t0, v0) = knots[i];
                let (t1, v1) = knots[i + 1];
                let k = (v1 / v0).ln() / (t1 / t0).ln();
                v0 * (t / t0).powf(k)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionId {
    /// φ(s) ≤ C φ(t) for s ≤ t
    AlmostIncreasing,
    /// φ(s)/s^n ≥ c φ(t)/t^n for s ≤ t
    AlmostDecreasingRatio,
    /// ∫_δ^∞ φ(t) t^{−(n+1)+p(α+1)/2} dt ≤ C δ^{p(1−α)/2}
    Nakai,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthParams {
    pub n: usize,
    pub p: f64,
    pub alpha: f64,
}

/// Sampling ranges for the condition checks. A condition holds when its
/// constant is finite on `base` and grows by less than `stability` when the
/// range is widened to `extended`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConditionGrid {
    pub base: (f64, f64),
    pub extended: (f64, f64),
    pub points_per_decade: usize,
    pub stability: f64,
}

impl Default for ConditionGrid {
    fn default() -> Self {
        ConditionGrid { base: (1e-3, 1e3), extended: (1e-6, 1e6), points_per_decade: 20, stability: 10.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    Pair { s: f64, t: f64 },
    Delta { delta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub id: ConditionId,
    pub holds: bool,
    /// Empirical constant on the base range. For the ratio condition this is
    /// K = max ψ(t)/ψ(s) over s ≤ t with ψ = φ/t^n, i.e. the reciprocal of c.
    pub constant: f64,
    pub witness: Witness,
    pub extended_constant: f64,
    pub note: String,
}

fn grid_points(range: (f64, f64), per_decade: usize) -> Vec<f64> {
    let decades = (range.1 / range.0).log10();
    let count = ((decades * per_decade as f64).ceil() as usize).max(1) + 1;
    log_grid(range.0, range.1, count)
}

/// max over s ≤ t of g(t)/g(s), with the maximizing pair.
fn max_forward_ratio(ts: &[f64], g: impl Fn(f64) -> f64) -> (f64, Witness) {
    let mut best = (0.0f64, Witness::Pair { s: ts[0], t: ts[0] });
    let mut min_so_far = (f64::INFINITY, ts[0]);
    for &t in ts {
        let v = g(t);
        if v < min_so_far.0 {
            min_so_far = (v, t);
        }
        let ratio = v / min_so_far.0;
        if ratio > best.0 {
            best = (ratio, Witness::Pair { s: min_so_far.1, t });
        }
    }
    best
}

fn nakai_constant(phi: &GrowthFunction, params: &GrowthParams, deltas: &[f64]) -> (f64, Witness) {
    let n = params.n as f64;
    let e = -(n + 1.0) + params.p * (params.alpha + 1.0) / 2.0;
    let target = params.p * (1.0 - params.alpha) / 2.0;
    // in u = ln t the integrand is φ(e^u) e^{u(e+1)}
    let g = |u: f64| {
        let t = u.exp();
        phi.eval(t) * (u * (e + 1.0)).exp()
    };
    let opts = AdaptiveOptions { rel_tol: 1e-12, abs_tol: 0.0, max_segments: 200 };
    let top = deltas[deltas.len() - 1];
    let far = top * 1e4;
    let mut tail = {
        let (u1, u0) = (far.ln(), (far / 2.0).ln());
        let k = (g(u1) / g(u0)).ln() / (u1 - u0);
        if k < 0.0 && g(u1).is_finite() {
            adaptive(g, top.ln(), far.ln(), &[], &opts).values[0] + g(u1) / -k
        } else {
            f64::INFINITY
        }
    };
    let mut best = (0.0f64, Witness::Delta { delta: top });
    for (i, &d) in deltas.iter().enumerate().rev() {
        if i + 1 < deltas.len() {
            tail += adaptive(g, d.ln(), deltas[i + 1].ln(), &[], &opts).values[0];
        }
        let c = tail / d.powf(target);
        if !(c <= best.0) {
            best = (c, Witness::Delta { delta: d });
        }
    }
    best
}

pub fn check_condition(
    phi: &GrowthFunction,
    id: ConditionId,
    params: &GrowthParams,
    grid: &ConditionGrid,
) -> Result<ConditionReport> {
    phi.validate()?;
    let n = params.n as f64;
    if id == ConditionId::Nakai
        && !(params.alpha > 1.0 && params.alpha < n && params.p > 1.0 && params.p < n / params.alpha)
    {
        return Err(Error::ParameterOutOfRange(format!(
            "Nakai's condition needs 1 < α < n and 1 < p < n/α (n={}, α={}, p={})",
            params.n, params.alpha, params.p
        )));
    }
    let evaluate = |range: (f64, f64)| {
        let ts = grid_points(range, grid.points_per_decade);
        match id {
            ConditionId::AlmostIncreasing => max_forward_ratio(&ts, |t| 1.0 / phi.eval(t)),
            ConditionId::AlmostDecreasingRatio => max_forward_ratio(&ts, |t| phi.eval(t) / t.powf(n)),
            ConditionId::Nakai => nakai_constant(phi, params, &ts),
        }
    };
    let (constant, witness) = evaluate(grid.base);
    let (extended_constant, _) = evaluate(grid.extended);
    let holds = constant.is_finite() && extended_constant.is_finite() && extended_constant < grid.stability * constant;
    let note = match id {
        ConditionId::AlmostDecreasingRatio => {
            "constant is K = max ψ(t)/ψ(s), ψ = φ/t^n; the lower constant is 1/K".to_string()
        }
        _ => String::new(),
    } + "; holds = finite and less than the stability factor growth on the extended range";
    Ok(ConditionReport {
        id,
        holds,
        constant,
        witness,
        extended_constant,
        note: note.trim_start_matches("; ").to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorreyCell {
    pub x: usize,
    pub r: f64,
    /// (φ(r)^{−1} ∫_{B(x,r)} |f|^p)^{1/p}, +∞ when the integral diverges
    pub local: f64,
    pub error_estimate: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorreyNormResult {
    pub value: f64,
    pub infinite: bool,
    pub witness_x: Point,
    pub witness_r: f64,
    /// Largest log–log slope in r over the last decade of the radius grid.
    pub large_r_slope: Option<f64>,
    /// Log–log slope in r over the first decade at the witness center.
    pub small_r_slope: Option<f64>,
    pub x_candidates: Vec<Point>,
    pub cells: Vec<MorreyCell>,
}

impl MorreyNormResult {
    /// The local-average curve r ↦ local at candidate `x`.
    pub fn curve(&self, x: usize) -> Vec<&MorreyCell> {
        self.cells.iter().filter(|c| c.x == x).collect()
    }
}

/// Default radius grid: 25 log-spaced radii in [10⁻³, 10²].
pub fn default_r_grid() -> Vec<f64> {
    log_grid(1e-3, 1e2, 25)
}

/// The declared poles of `f` followed by `extra` points not already present.
pub fn candidate_set(f: &ScalarField, extra: &[Point]) -> Vec<Point> {
    let mut out: Vec<Point> = f.singularities().into_iter().map(|s| s.point).collect();
    for p in extra {
        if !out.iter().any(|q| distance(q, p) == 0.0) {
            out.push(p.clone());
        }
    }
    if out.is_empty() {
        out.push(Point::origin(f.dim()));
    }
    out
}

/// Slope threshold above which the large-r trend counts as unbounded growth.
pub const GROWTH_SLOPE: f64 = 0.05;

pub fn morrey_norm(
    f: &ScalarField,
    p: f64,
    phi: &GrowthFunction,
    x_candidates: &[Point],
    r_grid: &[f64],
    opts: &QuadOptions,
) -> Result<MorreyNormResult> {
    phi.validate()?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::ParameterOutOfRange(format!("p = {p} must be positive")));
    }
    if x_candidates.is_empty() || r_grid.is_empty() || r_grid.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::ParameterOutOfRange("empty candidate set or non-positive radius".into()));
    }
    for x in x_candidates {
        crate::geometry::check_dim(f.dim(), x.dim())?;
    }
    for s in f.singularities() {
        if !x_candidates.iter().any(|x| distance(x, &s.point) == 0.0) {
            return Err(Error::ParameterOutOfRange(format!("candidate set misses the pole {:?}", s.point.coords())));
        }
    }

    let jobs: Vec<(usize, f64)> = (0..x_candidates.len()).flat_map(|i| r_grid.iter().map(move |&r| (i, r))).collect();
    let cells: Vec<MorreyCell> = jobs
        .par_iter()
        .map(|&(i, r)| {
            let ball = Ball { center: x_candidates[i].clone(), radius: r };
            let q = if f.is_zero() {
                crate::quadrature::QuadratureResult {
                    value: 0.0,
                    abs_error_estimate: 0.0,
                    verdict: Verdict::Convergent,
                    evaluations: 0,
                }
            } else {
                integrate_ball(&Integrand::field_power(f, p), &ball, opts).expect("dimensions checked")
            };
            let scale = phi.eval(r);
            let local = if q.verdict.is_divergent() { f64::INFINITY } else { (q.value.max(0.0) / scale).powf(1.0 / p) };
            let error_estimate = if q.value > 0.0 { local * q.abs_error_estimate / (p * q.value) } else { 0.0 };
            MorreyCell { x: i, r, local, error_estimate, verdict: q.verdict }
        })
        .collect();

    if let Some(bad) = cells.iter().find(|c| c.verdict == Verdict::Inconclusive) {
        return Err(Error::NormInconclusive(format!(
            "ball B({:?}, {}) did not meet the tolerance",
            x_candidates[bad.x].coords(),
            bad.r
        )));
    }

    let mut best = &cells[0];
    for c in &cells {
        if c.local > best.local {
            best = c;
        }
    }
    let r_max = r_grid.iter().cloned().fold(0.0, f64::max);
    let r_min = r_grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let slope_over = |x: usize, lo: f64, hi: f64| {
        let pts: Vec<(f64, f64)> = cells
            .iter()
            .filter(|c| c.x == x && c.r >= lo * (1.0 - 1e-12) && c.r <= hi * (1.0 + 1e-12))
            .map(|c| (c.r, c.local))
            .collect();
        if pts.len() < 2 || pts.iter().any(|p| !p.1.is_finite()) {
            return None;
        }
        let (r, v): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        log_log_slope(&r, &v).map(|(s, _)| s)
    };
    let large_r_slope = (0..x_candidates.len())
        .filter_map(|x| slope_over(x, r_max / 10.0, r_max))
        .fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |a| a.max(s))));
    let small_r_slope = slope_over(best.x, r_min, r_min * 10.0);
    let infinite = cells.iter().any(|c| c.verdict.is_divergent()) || large_r_slope.is_some_and(|s| s > GROWTH_SLOPE);

    Ok(MorreyNormResult {
        value: if infinite { f64::INFINITY } else { best.local },
        infinite,
        witness_x: x_candidates[best.x].clone(),
        witness_r: best.r,
        large_r_slope,
        small_r_slope,
        x_candidates: x_candidates.to_vec(),
        cells,
    })
}

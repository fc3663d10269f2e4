//! Convergence/divergence classification of ε-cutoff integrals.

use serde::{Deserialize, Serialize};

/// Outcome of a (possibly singular) integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Convergent,
    /// The cutoff integral grows like ε^{−growth_exponent}; a logarithmic
    /// divergence is reported with exponent 0 and the flag set.
    Divergent {
        growth_exponent: f64,
        logarithmic: bool,
    },
    Inconclusive,
}

impl Verdict {
    pub fn is_convergent(&self) -> bool {
        matches!(self, Verdict::Convergent)
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, Verdict::Divergent { .. })
    }

    pub fn growth_exponent(&self) -> Option<f64> {
        match self {
            Verdict::Divergent { growth_exponent, .. } => Some(*growth_exponent),
            _ => None,
        }
    }

    /// Worst of two verdicts: divergence dominates, then inconclusiveness.
    pub fn combine(self, other: Verdict) -> Verdict {
        match (self, other) {
            (
                Verdict::Divergent { growth_exponent: a, logarithmic: la },
                Verdict::Divergent { growth_exponent: b, logarithmic: lb },
            ) => {
                if a >= b {
                    Verdict::Divergent { growth_exponent: a, logarithmic: la && a == 0.0 }
                } else {
                    Verdict::Divergent { growth_exponent: b, logarithmic: lb }
                }
            }
            (d @ Verdict::Divergent { .. }, _) | (_, d @ Verdict::Divergent { .. }) => d,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::Convergent,
        }
    }
}

/// Thresholds of the divergence probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeConfig {
    /// log–log slope below which growth counts as power divergence
    pub slope_threshold: f64,
    /// maximal relative residual of the log–log fit
    pub max_residual: f64,
    /// relative Cauchy tolerance for convergence
    pub tol: f64,
    /// relative spread of per-log-unit increments accepted as logarithmic growth
    pub log_spread: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { slope_threshold: -0.05, max_residual: 0.10, tol: 1e-6, log_spread: 0.10 }
    }
}

/// Least-squares line through (x, y); returns (slope, intercept, rms residual).
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rms = (x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum::<f64>()
        / m)
        .sqrt();
    (slope, intercept, rms)
}

/// Log–log slope of `values` against `abscissae`, with the fit residual.
pub fn log_log_slope(abscissae: &[f64], values: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = abscissae
        .iter()
        .zip(values)
        .filter(|(a, v)| **a > 0.0 && **v > 0.0 && v.is_finite())
        .map(|(a, v)| (a.ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    let (slope, _, rms) = fit_line(&x, &y);
    Some((slope, rms.exp_m1()))
}

/// Classifies the family I(ε) = ∫_{|y − pole| > ε} F for decreasing cutoffs.
///
/// Convergent when the per-log-unit increments decay and the extrapolated
/// remainder is within `tol` of the last value; logarithmically divergent when
/// those increments stay level; power divergent when the log–log fit over the
/// smallest two decades has slope below the threshold with a small residual.
pub fn divergence_probe(cutoffs: &[f64], values: &[f64], cfg: &ProbeConfig) -> Verdict {
    if cutoffs.len() != values.len() || cutoffs.len() < 4 {
        return Verdict::Inconclusive;
    }
    let mut pts: Vec<(f64, f64)> = cutoffs.iter().copied().zip(values.iter().copied()).collect();
    if pts.iter().any(|(e, v)| !(*e > 0.0) || !v.is_finite()) {
        return Verdict::Inconclusive;
    }
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (eps_max, eps_min) = (pts[0].0, pts[pts.len() - 1].0);
    if (eps_max / eps_min).log10() < 3.0 - 1e-9 {
        return Verdict::Inconclusive;
    }
    // drop leading cutoffs where nothing has accumulated yet
    let first_live = pts.iter().position(|p| p.1 != 0.0).unwrap_or(pts.len());
    let live = &pts[first_live.saturating_sub(1)..];
    if live.len() < 2 {
        return Verdict::Convergent;
    }

    let per_log: Vec<f64> = live.windows(2).map(|w| (w[1].1 - w[0].1) / (w[0].0 / w[1].0).ln()).collect();
    let last_value = live[live.len() - 1].1;

    // Cauchy: decaying increments with a small extrapolated remainder
    if per_log.len() >= 3 {
        let tail = &per_log[per_log.len() - 3..];
        let scale = last_value.abs().max(f64::MIN_POSITIVE);
        if tail.iter().all(|d| d.abs() <= cfg.tol * scale * 1e-3) {
            return Verdict::Convergent;
        }
        let ratios: Vec<f64> = tail.windows(2).map(|w| w[1] / w[0]).collect();
        if ratios.iter().all(|r| r.is_finite() && *r >= 0.0 && *r < 0.95) {
            let r = ratios.iter().cloned().fold(0.0, f64::max);
            let step = (live[live.len() - 2].0 / live[live.len() - 1].0).ln();
            let remainder = tail[2].abs() * step * r / (1.0 - r);
            if remainder <= cfg.tol * scale {
                return Verdict::Convergent;
            }
        }
        // logarithmic: level increments per log unit
        let (lo, hi) = tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| (lo.min(*d), hi.max(*d)));
        if lo > 0.0 && (hi - lo) <= cfg.log_spread * lo {
            return Verdict::Divergent { growth_exponent: 0.0, logarithmic: true };
        }
    } else if per_log.iter().all(|d| d.abs() <= cfg.tol * last_value.abs()) {
        return Verdict::Convergent;
    }

    // power growth over the smallest two decades of cutoffs
    let window: Vec<(f64, f64)> =
        live.iter().rev().take_while(|p| p.0 <= eps_min * 100.0 * (1.0 + 1e-9)).copied().collect();
    let window = if window.len() >= 3 { window } else { live.iter().rev().take(3).copied().collect() };
    let (e, v): (Vec<f64>, Vec<f64>) = window.into_iter().unzip();
    if let Some((slope, residual)) = log_log_slope(&e, &v) {
        if slope < cfg.slope_threshold && residual < cfg.max_residual {
            return Verdict::Divergent { growth_exponent: -slope, logarithmic: false };
        }
    }
    Verdict::Inconclusive
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cutoffs() -> Vec<f64> {
        (0..=20).map(|k| 0.25f64.powi(k)).collect()
    }

    /// ∫_{ε<|y|<1} |y|^{−a} dy in R³
    fn radial_cutoff(a: f64, eps: f64) -> f64 {
        let b = 3.0 - a;
        if b == 0.0 {
            4.0 * PI * (1.0 / eps).ln()
        } else {
            4.0 * PI * (1.0 - eps.powf(b)) / b
        }
    }

    #[test]
    fn borderline_exponent_is_logarithmic() {
        let e = cutoffs();
        let v: Vec<f64> = e.iter().map(|&x| radial_cutoff(3.0, x)).collect();
        assert_eq!(
            divergence_probe(&e, &v, &ProbeConfig::default()),
            Verdict::Divergent { growth_exponent: 0.0, logarithmic: true }
        );
    }

    #[test]
    fn integrable_exponent_converges() {
        let e = cutoffs();
        let v: Vec<f64> = e.iter().map(|&x| radial_cutoff(2.0, x)).collect();
        assert_eq!(divergence_probe(&e, &v, &ProbeConfig::default()), Verdict::Convergent);
    }

    #[test]
    fn power_divergence_exponent() {
        let e = cutoffs();
        let v: Vec<f64> = e.iter().map(|&x| radial_cutoff(4.0, x)).collect();
        let g = divergence_probe(&e, &v, &ProbeConfig::default()).growth_exponent().unwrap();
        assert!((g - 1.0).abs() < 1e-3);
        let v: Vec<f64> = e.iter().map(|&x| radial_cutoff(3.75, x)).collect();
        let g = divergence_probe(&e, &v, &ProbeConfig::default()).growth_exponent().unwrap();
        assert!((g - 0.75).abs() < 1e-3);
    }

    #[test]
    fn too_few_decades_is_inconclusive() {
        let e = vec![1.0, 0.5, 0.25, 0.125];
        let v: Vec<f64> = e.iter().map(|&x| radial_cutoff(4.0, x)).collect();
        assert_eq!(divergence_probe(&e, &v, &ProbeConfig::default()), Verdict::Inconclusive);
        assert_eq!(divergence_probe(&e[..3], &v[..3], &ProbeConfig::default()), Verdict::Inconclusive);
    }

    #[test]
    fn combine_prefers_divergence() {
        let d = Verdict::Divergent { growth_exponent: 0.5, logarithmic: false };
        assert_eq!(Verdict::Convergent.combine(d), d);
        assert_eq!(Verdict::Inconclusive.combine(Verdict::Convergent), Verdict::Inconclusive);
    }
}

//! Cubature over balls in polar coordinates about each pole.
//!
//! The integrand is split into one piece per interior pole with the smooth
//! partition of unity w_i = d_i^{−m} / Σ_j d_j^{−m}, d_j = |y − p_j|, where m
//! exceeds every pole exponent so each piece is bounded at the foreign poles.
//! Each piece is integrated over the whole ball in polar coordinates about its
//! pole: along every ray the radial integral is taken
//! over geometric shells ε_{k+1} < t < ε_k, so that after the angular
//! integration the shell sums are exactly the ε-cutoff integrals fed to the
//! divergence probe. When the integrand and the cell are rotationally
//! symmetric about an axis through the pole, the angular integral collapses
//! to one polar angle; for fully radial problems it disappears.

use crate::fields::Singularity;
use crate::geometry::{distance, dot, norm, unit_sphere_area, Ball, MAX_DIM};

use super::gauss::{adaptive, adaptive_vec, gauss_legendre, periodic_trapezoid_vec, AdaptiveOptions, VecIntegral};
use super::probe::{divergence_probe, ProbeConfig, Verdict};
use super::{Integrand, QuadOptions, QuadratureResult};

struct Cell {
    origin: Vec<f64>,
    pole_exponent: Option<f64>,
    others: Vec<Vec<f64>>,
    power: i32,
}

impl Cell {
    fn weight(&self, y: &[f64]) -> f64 {
        if self.others.is_empty() {
            return 1.0;
        }
        let own = sq(y, &self.origin);
        let rest: f64 = self.others.iter().map(|p| (own / sq(y, p)).powi(self.power)).sum();
        1.0 / (1.0 + rest)
    }
}

fn sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

enum Reduction {
    Radial,
    Axial(Vec<f64>),
    General(Vec<f64>),
}

pub(super) fn integrate(ig: &Integrand<'_>, ball: &Ball, opts: &QuadOptions) -> QuadratureResult {
    let n = ig.dim();
    let c = ball.center.coords();
    let r = ball.radius;
    let active: Vec<&Singularity> = ig.poles().iter().filter(|p| distance(&p.point, c) <= r * (1.0 + 1e-12)).collect();

    let cells: Vec<Cell> = if active.is_empty() {
        vec![Cell { origin: c.to_vec(), pole_exponent: None, others: Vec::new(), power: 0 }]
    } else {
        let strongest = active.iter().map(|p| p.exponent).fold(0.0, f64::max);
        // w_i uses squared distances, so d^{−m} with m = 2·power
        let power = ((strongest + 2.0) / 2.0).ceil().max(1.0) as i32;
        active
            .iter()
            .enumerate()
            .map(|(i, p)| Cell {
                origin: p.point.to_vec(),
                pole_exponent: Some(p.exponent),
                others: active.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| q.point.to_vec()).collect(),
                power,
            })
            .collect()
    };

    let mut result =
        QuadratureResult { value: 0.0, abs_error_estimate: 0.0, verdict: Verdict::Convergent, evaluations: 0 };
    let mut abs_total = 0.0;
    for cell in &cells {
        let part = integrate_cell(ig, ball, cell, &active, opts, n);
        result.value += part.value;
        result.abs_error_estimate += part.abs_error_estimate;
        result.verdict = result.verdict.combine(part.verdict);
        result.evaluations += part.evaluations;
        abs_total += part.abs_total;
    }
    if result.verdict.is_convergent() && result.abs_error_estimate > opts.tol * abs_total {
        result.verdict = Verdict::Inconclusive;
    }
    if result.verdict.is_divergent() {
        result.abs_error_estimate = f64::INFINITY;
    }
    result
}

struct CellResult {
    value: f64,
    abs_error_estimate: f64,
    abs_total: f64,
    verdict: Verdict,
    evaluations: usize,
}

fn integrate_cell(
    ig: &Integrand<'_>,
    ball: &Ball,
    cell: &Cell,
    active: &[&Singularity],
    opts: &QuadOptions,
    n: usize,
) -> CellResult {
    let c = ball.center.coords();
    let o = &cell.origin[..];
    let offset = distance(o, c);

    let shells = cell.pole_exponent.map(|a| {
        let q = opts.shell_ratio;
        let outer = offset + ball.radius;
        let mut near = f64::INFINITY;
        for p in active {
            let d = distance(&p.point, o);
            if d > 0.0 {
                near = near.min(0.5 * d);
            }
        }
        let gap = ball.radius - offset;
        let interior = gap > 1e-9 * ball.radius;
        let start = if interior { gap } else { outer };
        let near = near.min(start);
        let k_geom = ((1e-2 * near / start).ln() / q.ln()).ceil() as i64 + 4;
        let k_tol = if (n as f64) - a > 0.0 {
            ((opts.tol * 1e-3).ln() / (((n as f64) - a) * q.ln())).ceil() as i64
        } else {
            16
        };
        let k = k_geom.max(k_tol).clamp(12, opts.max_shells as i64) as usize;
        let mut eps = Vec::with_capacity(k + 2);
        if interior {
            eps.push(outer);
        }
        eps.extend((0..=k).map(|j| start * q.powi(j as i32)));
        eps
    });
    let width = shells.as_ref().map_or(1, |s| s.len() - 1);

    let inner =
        AdaptiveOptions { rel_tol: (opts.tol * 0.1).max(1e-13), abs_tol: 0.0, max_segments: opts.inner_max_segments };
    let mut evaluations = 0usize;
    let mut ray = |dir: &[f64], out: &mut [f64]| {
        let rho = exit_distance(o, dir, ball);
        let mut buf = [0.0; MAX_DIM];
        let mut h = |t: f64| {
            for i in 0..n {
                buf[i] = o[i] + t * dir[i];
            }
            let v = ig.eval(&buf[..n]);
            if v == 0.0 {
                0.0
            } else {
                v * cell.weight(&buf[..n]) * t.powi(n as i32 - 1)
            }
        };
        match &shells {
            None => {
                let r = adaptive(&mut h, 0.0, rho, &[], &inner);
                evaluations += r.evaluations;
                out[0] = r.values[0];
            }
            Some(eps) => {
                for k in 0..width {
                    let lo = eps[k + 1];
                    let hi = eps[k].min(rho);
                    out[k] = if hi > lo {
                        let r = adaptive(&mut h, lo, hi, &[], &inner);
                        evaluations += r.evaluations;
                        r.values[0]
                    } else {
                        0.0
                    };
                }
            }
        }
    };

    let outer_opts = AdaptiveOptions { rel_tol: opts.tol * 0.5, abs_tol: 0.0, max_segments: opts.max_segments };
    let reduction = reduction_for(ig, ball, cell, active, n);
    let angular: VecIntegral = if n == 1 {
        let mut plus = vec![0.0; width];
        let mut minus = vec![0.0; width];
        ray(&[1.0], &mut plus);
        ray(&[-1.0], &mut minus);
        let values: Vec<f64> = plus.iter().zip(&minus).map(|(a, b)| a + b).collect();
        let abs_total = values.iter().map(|v| v.abs()).sum();
        VecIntegral { values, abs_total, error: 0.0, evaluations: 0, converged: true }
    } else {
        match reduction {
            Reduction::Radial => {
                let mut dir = vec![0.0; n];
                dir[0] = 1.0;
                let mut out = vec![0.0; width];
                ray(&dir, &mut out);
                let s = unit_sphere_area(n);
                let values: Vec<f64> = out.iter().map(|v| v * s).collect();
                let abs_total = values.iter().map(|v| v.abs()).sum();
                VecIntegral { values, abs_total, error: 0.0, evaluations: 0, converged: true }
            }
            Reduction::Axial(d) => {
                let perp = orthonormal_complement(&d);
                let e = &perp[0];
                let weight = unit_sphere_area(n - 1);
                let kinks = polar_kinks(o, &d, ball);
                let mut dir = vec![0.0; n];
                adaptive_vec(
                    |theta, out: &mut [f64]| {
                        let (s, co) = theta.sin_cos();
                        for i in 0..n {
                            dir[i] = co * d[i] + s * e[i];
                        }
                        ray(&dir, out);
                        let w = weight * s.powi(n as i32 - 2);
                        out.iter_mut().for_each(|v| *v *= w);
                    },
                    width,
                    0.0,
                    std::f64::consts::PI,
                    &kinks,
                    &outer_opts,
                )
            }
            Reduction::General(d) => {
                let perp = orthonormal_complement(&d);
                let kinks = polar_kinks(o, &d, ball);
                let mut dir = vec![0.0; n];
                let mut inner_out = vec![0.0; width];
                let inner_sphere_tol = opts.tol * 0.25;
                let mut phi_ok = true;
                let mut r = adaptive_vec(
                    |theta, out: &mut [f64]| {
                        let (s, co) = theta.sin_cos();
                        let w = s.powi(n as i32 - 2);
                        out.iter_mut().for_each(|v| *v = 0.0);
                        if n == 3 {
                            let r = periodic_trapezoid_vec(
                                |phi, o2: &mut [f64]| {
                                    let (sp, cp) = phi.sin_cos();
                                    for i in 0..3 {
                                        dir[i] = co * d[i] + s * (cp * perp[0][i] + sp * perp[1][i]);
                                    }
                                    ray(&dir, o2);
                                },
                                width,
                                2.0 * std::f64::consts::PI,
                                inner_sphere_tol,
                            );
                            phi_ok &= r.converged;
                            for (v, x) in out.iter_mut().zip(&r.values) {
                                *v = w * x;
                            }
                        } else {
                            let rule = sphere_rule(n - 1, 8);
                            for (pt, pw) in &rule {
                                for i in 0..n {
                                    dir[i] = co * d[i] + s * perp.iter().zip(pt).map(|(e, x)| e[i] * x).sum::<f64>();
                                }
                                ray(&dir, &mut inner_out);
                                for (v, x) in out.iter_mut().zip(&inner_out) {
                                    *v += w * pw * x;
                                }
                            }
                        }
                    },
                    width,
                    0.0,
                    std::f64::consts::PI,
                    &kinks,
                    &outer_opts,
                );
                r.converged &= phi_ok;
                r
            }
        }
    };

    let quad_error = angular.error + inner.rel_tol * angular.abs_total;
    match &shells {
        None => CellResult {
            value: angular.values[0],
            abs_error_estimate: quad_error,
            abs_total: angular.abs_total,
            verdict: if angular.converged { Verdict::Convergent } else { Verdict::Inconclusive },
            evaluations,
        },
        Some(eps) => {
            let mut running = 0.0;
            let cumulative: Vec<f64> = angular
                .values
                .iter()
                .map(|v| {
                    running += v;
                    running
                })
                .collect();
            let probe = ProbeConfig { tol: opts.tol.max(opts.probe.tol), ..opts.probe };
            let mut verdict = divergence_probe(&eps[1..], &cumulative, &probe);
            let last = *cumulative.last().unwrap_or(&0.0);
            match verdict {
                Verdict::Divergent { .. } => CellResult {
                    value: if last < 0.0 { f64::NEG_INFINITY } else { f64::INFINITY },
                    abs_error_estimate: f64::INFINITY,
                    abs_total: f64::INFINITY,
                    verdict,
                    evaluations,
                },
                _ => {
                    let v = &angular.values;
                    let m = v.len();
                    let mut tail = 0.0;
                    let mut tail_err = 0.0;
                    if m >= 3 && v[m - 2] != 0.0 {
                        let ratio = v[m - 1] / v[m - 2];
                        if (0.0..1.0).contains(&ratio) {
                            tail = v[m - 1] * ratio / (1.0 - ratio);
                            let prev = if v[m - 3] != 0.0 { v[m - 2] / v[m - 3] } else { ratio };
                            let alt = if (0.0..1.0).contains(&prev) { v[m - 1] * prev / (1.0 - prev) } else { tail };
                            tail_err = (tail - alt).abs() + 1e-3 * tail.abs();
                        } else {
                            tail_err = v[m - 1].abs();
                        }
                    }
                    if !angular.converged && verdict.is_convergent() {
                        verdict = Verdict::Inconclusive;
                    }
                    CellResult {
                        value: last + tail,
                        abs_error_estimate: quad_error + tail_err,
                        abs_total: angular.abs_total + tail.abs(),
                        verdict,
                        evaluations,
                    }
                }
            }
        }
    }
}

/// Distance from the interior point `o` along the unit vector `dir` to the sphere.
fn exit_distance(o: &[f64], dir: &[f64], ball: &Ball) -> f64 {
    let c = ball.center.coords();
    let mut b = 0.0;
    let mut q = -ball.radius * ball.radius;
    for i in 0..o.len() {
        let d = o[i] - c[i];
        b += d * dir[i];
        q += d * d;
    }
    let disc = b * b - q;
    if disc > 0.0 {
        (-b + disc.sqrt()).max(0.0)
    } else {
        0.0
    }
}

fn unit(v: &[f64]) -> Option<Vec<f64>> {
    let l = norm(v);
    (l > 0.0).then(|| v.iter().map(|x| x / l).collect())
}

fn reduction_for(ig: &Integrand<'_>, ball: &Ball, cell: &Cell, active: &[&Singularity], n: usize) -> Reduction {
    let o = &cell.origin[..];
    let c = ball.center.coords();
    let hint = ig.symmetry();
    let scale = 1.0 + ball.radius + norm(o) + norm(c);
    let toward = |p: &[f64]| unit(&p.iter().zip(o).map(|(a, b)| a - b).collect::<Vec<_>>());
    let on_boundary = (distance(o, c) - ball.radius).abs() <= 1e-12 * ball.radius;
    let nearest_other = cell
        .others
        .iter()
        .min_by(|a, b| distance(a, o).total_cmp(&distance(b, o)))
        .filter(|_| !on_boundary)
        .and_then(|p| toward(p));
    let fallback = nearest_other.or_else(|| toward(c)).unwrap_or_else(|| {
        let mut e = vec![0.0; n];
        e[0] = 1.0;
        e
    });
    if hint.general {
        return Reduction::General(fallback);
    }
    let mut points: Vec<&[f64]> = hint.points.iter().map(|p| &p[..]).collect();
    points.push(c);
    for p in active {
        points.push(p.point.coords());
    }
    let far = points.iter().copied().max_by(|a, b| distance(a, o).total_cmp(&distance(b, o))).unwrap_or(c);
    let axis = if let Some(first) = hint.directions.first() {
        match unit(first) {
            Some(d) => d,
            None => return Reduction::General(fallback),
        }
    } else if distance(far, o) <= 1e-12 * scale {
        return Reduction::Radial;
    } else {
        unit(&far.iter().zip(o).map(|(a, b)| a - b).collect::<Vec<_>>()).unwrap()
    };
    let on_axis = |v: &[f64], tol: f64| {
        let along = dot(v, &axis);
        let off: f64 = v.iter().zip(&axis).map(|(x, a)| (x - along * a).powi(2)).sum::<f64>().sqrt();
        off <= tol
    };
    let directions_ok = hint.directions.iter().all(|d| on_axis(d, 1e-12 * norm(d)));
    let points_ok = points.iter().all(|p| {
        let rel: Vec<f64> = p.iter().zip(o).map(|(a, b)| a - b).collect();
        on_axis(&rel, 1e-10 * scale)
    });
    if directions_ok && points_ok {
        Reduction::Axial(axis)
    } else {
        Reduction::General(fallback)
    }
}

/// Polar angles (from `axis`) at which the exit distance has a kink: only
/// when `o` lies on the sphere and the axis runs through the center.
fn polar_kinks(o: &[f64], axis: &[f64], ball: &Ball) -> Vec<f64> {
    let c = ball.center.coords();
    let rel: Vec<f64> = c.iter().zip(o).map(|(a, b)| a - b).collect();
    let on_sphere = (norm(&rel) - ball.radius).abs() <= 1e-12 * ball.radius;
    if on_sphere && (dot(&rel, axis).abs() - norm(&rel)).abs() <= 1e-12 * ball.radius {
        vec![std::f64::consts::FRAC_PI_2]
    } else {
        Vec::new()
    }
}

/// Orthonormal basis of the complement of the unit vector `d`.
fn orthonormal_complement(d: &[f64]) -> Vec<Vec<f64>> {
    let n = d.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n {
        if basis.len() + 1 == n {
            break;
        }
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        let proj = dot(&v, d);
        for i in 0..n {
            v[i] -= proj * d[i];
        }
        for b in &basis {
            let p = dot(&v, b);
            for i in 0..n {
                v[i] -= p * b[i];
            }
        }
        if let Some(u) = unit(&v).filter(|_| norm(&v) > 1e-8) {
            basis.push(u);
        }
    }
    basis
}

/// Product rule on S^{m−1} ⊂ R^m with `order` nodes per angle.
fn sphere_rule(m: usize, order: usize) -> Vec<(Vec<f64>, f64)> {
    match m {
        1 => vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)],
        2 => (0..4 * order)
            .map(|j| {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / (4 * order) as f64;
                (vec![phi.cos(), phi.sin()], 2.0 * std::f64::consts::PI / (4 * order) as f64)
            })
            .collect(),
        _ => {
            let sub = sphere_rule(m - 1, order);
            let mut out = Vec::new();
            for (x, w) in gauss_legendre(2 * order) {
                let theta = 0.5 * std::f64::consts::PI * (x + 1.0);
                let (s, co) = theta.sin_cos();
                let weight = 0.5 * std::f64::consts::PI * w * s.powi(m as i32 - 2);
                for (p, pw) in &sub {
                    let mut v = Vec::with_capacity(m);
                    v.push(co);
                    v.extend(p.iter().map(|x| s * x));
                    out.push((v, weight * pw));
                }
            }
            out
        }
    }
}

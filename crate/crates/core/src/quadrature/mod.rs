//! Integration over balls of integrands with declared point singularities.

mod ball;
pub mod gauss;
pub mod probe;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{FieldKind, ScalarField, Singularity, SymmetryHint};
use crate::geometry::{check_dim, distance, Ball, Point};

pub use gauss::{adaptive, adaptive_vec, gauss_legendre, AdaptiveOptions, VecIntegral};
pub use probe::{divergence_probe, fit_line, log_log_slope, ProbeConfig, Verdict};

/// Default relative tolerance for smooth integrands.
pub const SMOOTH_TOL: f64 = 1e-6;
/// Default relative tolerance for integrands with kernel singularities.
pub const SINGULAR_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    /// ±∞ when the verdict is divergent.
    pub value: f64,
    pub abs_error_estimate: f64,
    pub verdict: Verdict,
    pub evaluations: usize,
}

impl QuadratureResult {
    pub fn is_convergent(&self) -> bool {
        self.verdict.is_convergent()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub tol: f64,
    /// segment budget of the angular integration
    pub max_segments: usize,
    /// segment budget of each radial shell
    pub inner_max_segments: usize,
    pub shell_ratio: f64,
    pub max_shells: usize,
    pub probe: ProbeConfig,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            tol: SMOOTH_TOL,
            max_segments: 400,
            inner_max_segments: 100,
            shell_ratio: 0.25,
            max_shells: 60,
            probe: ProbeConfig::default(),
        }
    }
}

impl QuadOptions {
    pub fn with_tol(tol: f64) -> Self {
        QuadOptions { tol, ..Default::default() }
    }

    pub fn singular() -> Self {
        Self::with_tol(SINGULAR_TOL)
    }
}

type Func<'a> = Box<dyn Fn(&[f64]) -> f64 + Send + Sync + 'a>;

/// A pointwise integrand together with its poles and symmetry.
pub struct Integrand<'a> {
    dim: usize,
    func: Func<'a>,
    poles: Vec<Singularity>,
    symmetry: SymmetryHint,
}

impl<'a> Integrand<'a> {
    pub fn new(
        dim: usize,
        func: impl Fn(&[f64]) -> f64 + Send + Sync + 'a,
        poles: Vec<Singularity>,
        symmetry: SymmetryHint,
    ) -> Self {
        let mut merged: Vec<Singularity> = Vec::new();
        for s in poles {
            match merged.iter_mut().find(|o| distance(&o.point, &s.point) == 0.0) {
                Some(o) => o.exponent = o.exponent.max(s.exponent),
                None => merged.push(s),
            }
        }
        Integrand { dim, func: Box::new(func), poles: merged, symmetry }
    }

    pub fn field(f: &'a ScalarField) -> Self {
        Self::new(f.dim(), move |y| f.value(y), f.singularities(), f.symmetry())
    }

    /// |f|^p
    pub fn field_power(f: &'a ScalarField, p: f64) -> Self {
        let poles =
            f.singularities().into_iter().map(|s| Singularity { exponent: s.exponent * p, point: s.point }).collect();
        Self::new(f.dim(), move |y| f.value(y).abs().powf(p), poles, f.symmetry())
    }

    /// |∇u|^α
    pub fn gradient_power(u: &'a ScalarField, alpha: f64) -> Self {
        let poles = gradient_poles(u)
            .into_iter()
            .map(|s| Singularity { exponent: s.exponent * alpha, point: s.point })
            .collect();
        Self::new(
            u.dim(),
            move |y| match u.gradient(y) {
                Ok(g) => g.iter().map(|x| x * x).sum::<f64>().sqrt().powf(alpha),
                Err(Error::SingularPoint(_)) => f64::INFINITY,
                Err(_) => 0.0,
            },
            poles,
            u.symmetry(),
        )
    }

    /// Multiplies by |y − pole|^{−s}.
    pub fn with_kernel(self, pole: &[f64], s: f64) -> Self {
        let pole_owned = pole.to_vec();
        let kernel = Integrand::new(
            self.dim,
            move |y| distance(y, &pole_owned).powf(-s),
            if s > 0.0 { vec![Singularity { point: Point::new(pole.to_vec()), exponent: s }] } else { Vec::new() },
            SymmetryHint::radial(pole),
        );
        self.product(kernel)
    }

    /// Pointwise product; exponents of coincident poles add.
    pub fn product(self, other: Integrand<'a>) -> Self {
        let mut poles = self.poles;
        for s in other.poles {
            match poles.iter_mut().find(|o| distance(&o.point, &s.point) == 0.0) {
                Some(o) => o.exponent += s.exponent,
                None => poles.push(s),
            }
        }
        let (f, g) = (self.func, other.func);
        Integrand {
            dim: self.dim,
            func: Box::new(move |y| {
                let a = f(y);
                if a == 0.0 {
                    0.0
                } else {
                    a * g(y)
                }
            }),
            poles,
            symmetry: self.symmetry.merge(other.symmetry),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn poles(&self) -> &[Singularity] {
        &self.poles
    }

    pub fn symmetry(&self) -> &SymmetryHint {
        &self.symmetry
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        (self.func)(y)
    }
}

/// Poles of ∇u: each power pole gains one order, logarithms become |y|^{−1}.
pub fn gradient_poles(u: &ScalarField) -> Vec<Singularity> {
    let mut out = u.singularities();
    for s in &mut out {
        s.exponent += 1.0;
    }
    if matches!(u.kind(), FieldKind::ExampleW) {
        out.clear();
    }
    out
}

/// ∫_B F with the pole-graded polar engine.
pub fn integrate_ball(ig: &Integrand<'_>, ball: &Ball, opts: &QuadOptions) -> Result<QuadratureResult> {
    check_dim(ig.dim(), ball.dim())?;
    if !(opts.tol > 0.0) || !(opts.shell_ratio > 0.0 && opts.shell_ratio < 1.0) {
        return Err(Error::ParameterOutOfRange(format!(
            "tol {} and shell ratio {} must be positive, ratio below 1",
            opts.tol, opts.shell_ratio
        )));
    }
    Ok(ball::integrate(ig, ball, opts))
}

/// ∫_B F(y) |x − y|^{−s} dy
pub fn integrate_singular_kernel(
    ig: Integrand<'_>,
    x: &[f64],
    s: f64,
    ball: &Ball,
    opts: &QuadOptions,
) -> Result<QuadratureResult> {
    check_dim(ig.dim(), x.len())?;
    integrate_ball(&ig.with_kernel(x, s), ball, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::unit_sphere_area;
    use std::f64::consts::PI;

    fn ball(c: &[f64], r: f64) -> Ball {
        Ball::new(Point::new(c.to_vec()), r).unwrap()
    }

    #[test]
    fn constant_volume_in_several_dimensions() {
        for n in 1..=5 {
            let one = ScalarField::constant(n, 1.0);
            let mut c = vec![0.0; n];
            c[0] = 0.3;
            let r = integrate_ball(&Integrand::field(&one), &ball(&c, 1.5), &QuadOptions::default()).unwrap();
            let exact = unit_sphere_area(n) / n as f64 * 1.5f64.powi(n as i32);
            assert!((r.value - exact).abs() < 1e-9 * exact, "n={n}: {} vs {exact}", r.value);
            assert!(r.is_convergent());
        }
    }

    #[test]
    fn integrable_pole_at_center() {
        let f = ScalarField::power_at_origin(3, 2.0);
        let r = integrate_ball(&Integrand::field(&f), &ball(&[0.0; 3], 1.0), &QuadOptions::default()).unwrap();
        assert!(r.is_convergent(), "{:?}", r.verdict);
        assert!((r.value - 4.0 * PI).abs() < 1e-5);
    }

    #[test]
    fn off_center_pole_uses_axial_reduction() {
        // ∫_{B(0,1)} |y − x|^{−1} dy = 2π(1 − |x|²/3)
        let f = ScalarField::radial_power(3, 1.0, 1.0, Point::new(vec![0.0, 0.0, 0.5])).unwrap();
        let r = integrate_ball(&Integrand::field(&f), &ball(&[0.0; 3], 1.0), &QuadOptions::default()).unwrap();
        let exact = 2.0 * PI * (1.0 - 0.25 / 3.0);
        assert!(r.is_convergent());
        assert!((r.value - exact).abs() < 1e-6 * exact, "{} vs {exact}", r.value);
    }

    #[test]
    fn borderline_pole_diverges_logarithmically() {
        let f = ScalarField::power_at_origin(3, 3.0);
        let r = integrate_ball(&Integrand::field(&f), &ball(&[0.0; 3], 1.0), &QuadOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Divergent { growth_exponent: 0.0, logarithmic: true });
        assert!(r.value.is_infinite());
    }

    #[test]
    fn strong_pole_reports_growth() {
        let f = ScalarField::power_at_origin(3, 4.5);
        let r = integrate_ball(&Integrand::field(&f), &ball(&[0.1, 0.0, 0.0], 1.0), &QuadOptions::default()).unwrap();
        let g = r.verdict.growth_exponent().unwrap();
        assert!((g - 1.5).abs() < 0.05, "{g}");
    }

    #[test]
    fn two_poles_general_geometry() {
        // Newton potential of the unit ball from two interior points
        let one = ScalarField::constant(3, 1.0);
        let x1 = [0.3, 0.0, 0.0];
        let x2 = [0.0, -0.4, 0.1];
        let ig = Integrand::field(&one).with_kernel(&x1, 1.0).with_kernel(&x2, 1.0);
        let r = integrate_ball(&ig, &ball(&[0.0; 3], 1.0), &QuadOptions::with_tol(1e-5)).unwrap();
        assert!(r.is_convergent(), "{:?}", r.verdict);
        // symmetric check: swapping the poles gives the same value
        let ig2 = Integrand::field(&one).with_kernel(&x2, 1.0).with_kernel(&x1, 1.0);
        let r2 = integrate_ball(&ig2, &ball(&[0.0; 3], 1.0), &QuadOptions::with_tol(1e-5)).unwrap();
        assert!((r.value - r2.value).abs() < 1e-5 * r.value);
        assert!(r.value > 0.0 && r.value.is_finite());
    }

    #[test]
    fn sum_of_off_axis_poles_matches_newton_potential() {
        let x1 = [0.3, 0.0, 0.0];
        let x2 = [0.0, -0.4, 0.1];
        let poles = [x1, x2].iter().map(|p| Singularity { point: Point::new(p.to_vec()), exponent: 1.0 }).collect();
        let ig =
            Integrand::new(3, move |y| 1.0 / distance(y, &x1) + 1.0 / distance(y, &x2), poles, SymmetryHint::general());
        let r = integrate_ball(&ig, &ball(&[0.0; 3], 1.0), &QuadOptions::with_tol(1e-6)).unwrap();
        let exact = 2.0 * PI * (1.0 - 0.09 / 3.0) + 2.0 * PI * (1.0 - 0.17 / 3.0);
        assert!(r.is_convergent(), "{:?}", r.verdict);
        assert!((r.value - exact).abs() < 1e-5 * exact, "{} vs {exact}", r.value);
    }

    #[test]
    fn pole_on_the_boundary() {
        // ∫_{B(0,1)} |y − e₁|^{−2} dy = 2π in R³
        let f = ScalarField::radial_power(3, 1.0, 2.0, Point::new(vec![1.0, 0.0, 0.0])).unwrap();
        let r = integrate_ball(&Integrand::field(&f), &ball(&[0.0; 3], 1.0), &QuadOptions::default()).unwrap();
        assert!(r.is_convergent(), "{:?}", r.verdict);
        assert!((r.value - 2.0 * PI).abs() < 1e-5, "{}", r.value);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let f = ScalarField::constant(2, 1.0);
        assert!(integrate_ball(&Integrand::field(&f), &ball(&[0.0; 3], 1.0), &QuadOptions::default()).is_err());
    }
}

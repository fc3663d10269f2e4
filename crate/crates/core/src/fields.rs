//! Concrete scalar fields on R^n with closed-form calculus where available.
//!
//! Every analytic kind declares its singular points together with the local
//! power exponent (|f(y)| ~ |y − x₀|^{−a}); the quadrature engine grades its
//! meshes toward these points and never has to discover them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{check_dim, distance, dot, Ball, Point};

/// A declared point singularity: |f(y)| behaves like |y − point|^{−exponent}.
/// An exponent of zero marks a logarithmic singularity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Singularity {
    pub point: Point,
    pub exponent: f64,
}

/// Rotational symmetry information used to reduce ball integrals.
///
/// A field is invariant under every rotation about an axis that passes through
/// all of `points` and is parallel to all of `directions`. `general` means no
/// such axis is known.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SymmetryHint {
    pub points: Vec<Vec<f64>>,
    pub directions: Vec<Vec<f64>>,
    pub general: bool,
}

impl SymmetryHint {
    pub fn radial(center: &[f64]) -> Self {
        SymmetryHint { points: vec![center.to_vec()], ..Default::default() }
    }

    pub fn general() -> Self {
        SymmetryHint { general: true, ..Default::default() }
    }

    pub fn merge(mut self, other: SymmetryHint) -> Self {
        self.points.extend(other.points);
        self.directions.extend(other.directions);
        self.general |= other.general;
        self
    }

    fn translated(mut self, v: &[f64]) -> Self {
        for p in &mut self.points {
            for (a, b) in p.iter_mut().zip(v) {
                *a += b;
            }
        }
        self
    }

    fn scaled(mut self, t: f64) -> Self {
        for p in &mut self.points {
            for a in p.iter_mut() {
                *a *= t;
            }
        }
        self
    }
}

/// Sampled values on a uniform box grid, interpolated multilinearly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridData {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Cells per axis; there are `resolution + 1` nodes per axis.
    pub resolution: usize,
    /// Node values in row-major order (last axis fastest).
    pub samples: Vec<f64>,
}

impl GridData {
    fn nodes_per_axis(&self) -> usize {
        self.resolution + 1
    }

    fn spacing(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / self.resolution as f64
    }

    /// Default finite-difference step: box width / (4 · resolution).
    pub fn default_step(&self) -> f64 {
        let width = (0..self.lower.len()).map(|i| self.upper[i] - self.lower[i]).fold(f64::INFINITY, f64::min);
        width / (4.0 * self.resolution as f64)
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        y.iter().enumerate().all(|(i, &v)| v >= self.lower[i] && v <= self.upper[i])
    }

    fn interpolate(&self, y: &[f64]) -> f64 {
        let n = self.lower.len();
        let m = self.nodes_per_axis();
        let mut base = [0usize; crate::geometry::MAX_DIM];
        let mut frac = [0f64; crate::geometry::MAX_DIM];
        for i in 0..n {
            let s = (y[i] - self.lower[i]) / self.spacing(i);
            let k = (s.floor().max(0.0) as usize).min(self.resolution - 1);
            base[i] = k;
            frac[i] = (s - k as f64).clamp(0.0, 1.0);
        }
        let mut total = 0.0;
        for corner in 0..(1usize << n) {
            let mut weight = 1.0;
            let mut index = 0usize;
            for i in 0..n {
                let bit = (corner >> i) & 1;
                weight *= if bit == 1 { frac[i] } else { 1.0 - frac[i] };
                index = index * m + base[i] + bit;
            }
            if weight != 0.0 {
                total += weight * self.samples[index];
            }
        }
        total
    }
}

/// A radial profile tabulated at increasing radii about `center`.
///
/// Between knots the profile is a power law (log–log linear interpolation);
/// beyond the first and last knot it continues the end-segment power trend.
/// Tables with non-positive values fall back to linear interpolation in r.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialTable {
    pub center: Point,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

impl RadialTable {
    fn log_log(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0)
    }

    fn slope(&self, i: usize) -> f64 {
        (self.values[i + 1] / self.values[i]).ln() / (self.radii[i + 1] / self.radii[i]).ln()
    }

    /// Power-law exponent k of the segment containing r, with g(r) = A r^k.
    fn segment(&self, r: f64) -> (usize, f64) {
        let last = self.radii.len() - 2;
        let i = match self.radii.iter().position(|&k| k > r) {
            Some(0) => 0,
            Some(j) => (j - 1).min(last),
            None => last,
        };
        (i, self.slope(i))
    }

    fn profile(&self, r: f64) -> f64 {
        if self.log_log() {
            let (i, k) = self.segment(r);
            self.values[i] * (r / self.radii[i]).powf(k)
        } else {
            let i = self.segment_linear(r);
            let t = (r - self.radii[i]) / (self.radii[i + 1] - self.radii[i]);
            self.values[i] + t * (self.values[i + 1] - self.values[i])
        }
    }

    fn segment_linear(&self, r: f64) -> usize {
        let last = self.radii.len() - 2;
        let i = match self.radii.iter().position(|&k| k > r) {
            Some(0) => 0,
            Some(j) => (j - 1).min(last),
            None => last,
        };
        i
    }

    fn derivatives(&self, r: f64) -> (f64, f64, f64) {
        let g = self.profile(r);
        if self.log_log() {
            let (_, k) = self.segment(r);
            (g, k * g / r, k * (k - 1.0) * g / (r * r))
        } else {
            let i = self.segment_linear(r);
            let slope = (self.values[i + 1] - self.values[i]) / (self.radii[i + 1] - self.radii[i]);
            (g, slope, 0.0)
        }
    }

    /// Exponent a > 0 when the table extrapolates to a pole at the center.
    pub fn pole_exponent(&self) -> Option<f64> {
        if self.log_log() {
            let k = self.slope(0);
            (k < 0.0).then_some(-k)
        } else {
            None
        }
    }
}

/// The fixed catalog of field kinds.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind {
    /// c · |y − center|^{−exponent}
    RadialPower {
        coefficient: f64,
        exponent: f64,
        center: Point,
    },
    /// exp(−|x|^{−1}) |x|^{−(n+1)}, with the value 1 at the origin.
    ExampleW,
    /// 3(n+1)|x|^{−2} − (n+5)|x|^{−3} + |x|^{−4}, with the value 0 at the origin.
    ExampleV,
    /// (max(0, 1 − |y − center|²/radius²))^power
    Bump {
        center: Point,
        radius: f64,
        power: f64,
    },
    Grid(GridData),
    RadialTable(RadialTable),
    Constant(f64),
    /// gradient · y + offset
    Affine {
        gradient: Vec<f64>,
        offset: f64,
    },
    /// log |y − center|
    LogRadial {
        center: Point,
    },
    Sum(Vec<ScalarField>),
    Scaled(Box<ScalarField>, f64),
    /// y ↦ f(y − shift)
    Translate(Box<ScalarField>, Vec<f64>),
    /// y ↦ f(y / factor)
    Dilate(Box<ScalarField>, f64),
    /// y ↦ log(f(y) + shift)
    LogShift(Box<ScalarField>, f64),
    /// f · χ_Ω
    Truncation(Box<ScalarField>, Ball),
}

/// A real-valued function on R^n. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    dim: usize,
    kind: FieldKind,
}

impl ScalarField {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    pub fn radial_power(n: usize, coefficient: f64, exponent: f64, center: Point) -> Result<Self> {
        check_dim(n, center.dim())?;
        Ok(ScalarField { dim: n, kind: FieldKind::RadialPower { coefficient, exponent, center } })
    }

    /// |y|^{−exponent} centered at the origin.
    pub fn power_at_origin(n: usize, exponent: f64) -> Self {
        ScalarField { dim: n, kind: FieldKind::RadialPower { coefficient: 1.0, exponent, center: Point::origin(n) } }
    }

    pub fn example_w(n: usize) -> Self {
        ScalarField { dim: n, kind: FieldKind::ExampleW }
    }

    pub fn example_v(n: usize) -> Self {
        ScalarField { dim: n, kind: FieldKind::ExampleV }
    }

    pub fn bump(center: Point, radius: f64, power: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidField(format!("bump radius must be positive, got {radius}")));
        }
        if !(power >= 2.0) {
            return Err(Error::InvalidField(format!("bump power must be at least 2, got {power}")));
        }
        Ok(ScalarField { dim: center.dim(), kind: FieldKind::Bump { center, radius, power } })
    }

    pub fn grid(data: GridData) -> Result<Self> {
        let n = data.lower.len();
        if n == 0 || n > crate::geometry::MAX_DIM || data.upper.len() != n {
            return Err(Error::InvalidField("grid box has inconsistent dimension".into()));
        }
        if data.resolution == 0 {
            return Err(Error::InvalidField("grid resolution must be positive".into()));
        }
        if (0..n).any(|i| !(data.upper[i] > data.lower[i])) {
            return Err(Error::InvalidField("grid box must have positive width".into()));
        }
        let expected = data.nodes_per_axis().pow(n as u32);
        if data.samples.len() != expected {
            return Err(Error::InvalidField(format!("grid expects {expected} samples, got {}", data.samples.len())));
        }
        Ok(ScalarField { dim: n, kind: FieldKind::Grid(data) })
    }

    /// Samples `f` on the node lattice of the box.
    pub fn sample_grid(f: &ScalarField, lower: Vec<f64>, upper: Vec<f64>, resolution: usize) -> Result<Self> {
        let n = f.dim;
        check_dim(n, lower.len())?;
        let m = resolution + 1;
        let total = m.pow(n as u32);
        let mut samples = Vec::with_capacity(total);
        let mut y = vec![0.0; n];
        for idx in 0..total {
            let mut rem = idx;
            for i in (0..n).rev() {
                let k = rem % m;
                rem /= m;
                y[i] = lower[i] + (upper[i] - lower[i]) * k as f64 / resolution as f64;
            }
            samples.push(f.value(&y));
        }
        ScalarField::grid(GridData { lower, upper, resolution, samples })
    }

    pub fn radial_table(center: Point, radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.len() < 2 || radii.len() != values.len() {
            return Err(Error::InvalidField("radial table needs at least two (r, value) knots".into()));
        }
        if radii[0] <= 0.0 || radii.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidField("radial table radii must be positive and increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidField("radial table values must be finite".into()));
        }
        Ok(ScalarField { dim: center.dim(), kind: FieldKind::RadialTable(RadialTable { center, radii, values }) })
    }

    pub fn constant(n: usize, c: f64) -> Self {
        ScalarField { dim: n, kind: FieldKind::Constant(c) }
    }

    pub fn affine(gradient: Vec<f64>, offset: f64) -> Self {
        ScalarField { dim: gradient.len(), kind: FieldKind::Affine { gradient, offset } }
    }

    /// The coordinate function y ↦ y_axis.
    pub fn coordinate(n: usize, axis: usize) -> Self {
        let mut g = vec![0.0; n];
        g[axis] = 1.0;
        ScalarField::affine(g, 0.0)
    }

    pub fn log_radial(center: Point) -> Self {
        ScalarField { dim: center.dim(), kind: FieldKind::LogRadial { center } }
    }

    pub fn sum(parts: Vec<ScalarField>) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidField("empty sum".into()))?;
        let n = first.dim;
        for p in &parts {
            check_dim(n, p.dim)?;
        }
        Ok(ScalarField { dim: n, kind: FieldKind::Sum(parts) })
    }

    pub fn scaled(self, c: f64) -> Self {
        ScalarField { dim: self.dim, kind: FieldKind::Scaled(Box::new(self), c) }
    }

    pub fn translated(self, shift: Vec<f64>) -> Result<Self> {
        check_dim(self.dim, shift.len())?;
        Ok(ScalarField { dim: self.dim, kind: FieldKind::Translate(Box::new(self), shift) })
    }

    pub fn dilated(self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) {
            return Err(Error::InvalidField(format!("dilation factor must be positive, got {factor}")));
        }
        Ok(ScalarField { dim: self.dim, kind: FieldKind::Dilate(Box::new(self), factor) })
    }

    pub fn log_shift(self, shift: f64) -> Self {
        ScalarField { dim: self.dim, kind: FieldKind::LogShift(Box::new(self), shift) }
    }

    pub fn truncated(self, region: Ball) -> Result<Self> {
        check_dim(self.dim, region.dim())?;
        Ok(ScalarField { dim: self.dim, kind: FieldKind::Truncation(Box::new(self), region) })
    }

    /// Evaluates the field. Fails at declared poles and outside grid boxes.
    pub fn eval(&self, y: &[f64]) -> Result<f64> {
        check_dim(self.dim, y.len())?;
        self.eval_checked(y)
    }

    fn eval_checked(&self, y: &[f64]) -> Result<f64> {
        match &self.kind {
            FieldKind::Grid(g) => {
                if !g.contains(y) {
                    return Err(Error::OutsideGrid(y.to_vec()));
                }
                Ok(g.interpolate(y))
            }
            FieldKind::Sum(parts) => parts.iter().map(|p| p.eval_checked(y)).sum(),
            FieldKind::Scaled(f, c) => Ok(c * f.eval_checked(y)?),
            FieldKind::Translate(f, v) => {
                let z: Vec<f64> = y.iter().zip(v).map(|(a, b)| a - b).collect();
                f.eval_checked(&z)
            }
            FieldKind::Dilate(f, t) => {
                let z: Vec<f64> = y.iter().map(|a| a / t).collect();
                f.eval_checked(&z)
            }
            FieldKind::LogShift(f, d) => {
                let inner = f.eval_checked(y)? + d;
                if inner > 0.0 {
                    Ok(inner.ln())
                } else {
                    Err(Error::InvalidField(format!("log of non-positive value {inner} at {y:?}")))
                }
            }
            FieldKind::Truncation(f, region) => {
                if region.contains(y) {
                    f.eval_checked(y)
                } else {
                    Ok(0.0)
                }
            }
            _ => {
                let v = self.value(y);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::SingularPoint(y.to_vec()))
                }
            }
        }
    }

    /// Unchecked evaluation used inside quadrature loops: poles give ±∞ and
    /// grid fields are extended by zero outside their box.
    pub fn value(&self, y: &[f64]) -> f64 {
        let n = self.dim;
        match &self.kind {
            FieldKind::RadialPower { coefficient, exponent, center } => {
                coefficient * distance(y, center).powf(-exponent)
            }
            FieldKind::ExampleW => {
                let r = crate::geometry::norm(y);
                // w > 0 everywhere, including the origin
                if r == 0.0 {
                    1.0
                } else {
                    (-1.0 / r).exp() * r.powi(-(n as i32 + 1))
                }
            }
            FieldKind::ExampleV => {
                let r = crate::geometry::norm(y);
                if r == 0.0 {
                    0.0
                } else {
                    example_v_profile(n, r)
                }
            }
            FieldKind::Bump { center, radius, power } => {
                let s = 1.0 - sq_distance(y, center) / (radius * radius);
                if s > 0.0 {
                    s.powf(*power)
                } else {
                    0.0
                }
            }
            FieldKind::Grid(g) => {
                if g.contains(y) {
                    g.interpolate(y)
                } else {
                    0.0
                }
            }
            FieldKind::RadialTable(t) => {
                let r = distance(y, &t.center);
                if r == 0.0 {
                    match t.pole_exponent() {
                        Some(_) => f64::INFINITY,
                        None => t.profile(t.radii[0]),
                    }
                } else {
                    t.profile(r)
                }
            }
            FieldKind::Constant(c) => *c,
            FieldKind::Affine { gradient, offset } => dot(gradient, y) + offset,
            FieldKind::LogRadial { center } => distance(y, center).ln(),
            FieldKind::Sum(parts) => parts.iter().map(|p| p.value(y)).sum(),
            FieldKind::Scaled(f, c) => c * f.value(y),
            FieldKind::Translate(f, v) => {
                let mut buf = [0.0; crate::geometry::MAX_DIM];
                for i in 0..n {
                    buf[i] = y[i] - v[i];
                }
                f.value(&buf[..n])
            }
            FieldKind::Dilate(f, t) => {
                let mut buf = [0.0; crate::geometry::MAX_DIM];
                for i in 0..n {
                    buf[i] = y[i] / t;
                }
                f.value(&buf[..n])
            }
            FieldKind::LogShift(f, d) => (f.value(y) + d).ln(),
            FieldKind::Truncation(f, region) => {
                if region.contains(y) {
                    f.value(y)
                } else {
                    0.0
                }
            }
        }
    }

    /// Closed-form gradient for analytic kinds, central differences for grids.
    pub fn gradient(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, y.len())?;
        let n = self.dim;
        match &self.kind {
            FieldKind::Grid(g) => {
                let h = g.default_step();
                grid_stencil_inside(g, y, h)?;
                Ok(fd_gradient(self, y, h))
            }
            FieldKind::Bump { center, radius, power } => {
                let r2 = radius * radius;
                let s = 1.0 - sq_distance(y, center) / r2;
                if s <= 0.0 {
                    return Ok(vec![0.0; n]);
                }
                let factor = power * s.powf(power - 1.0) * (-2.0 / r2);
                Ok(y.iter().zip(center.iter()).map(|(a, c)| factor * (a - c)).collect())
            }
            FieldKind::Constant(_) => Ok(vec![0.0; n]),
            FieldKind::Affine { gradient, .. } => Ok(gradient.clone()),
            FieldKind::Sum(parts) => {
                let mut total = vec![0.0; n];
                for p in parts {
                    for (t, g) in total.iter_mut().zip(p.gradient(y)?) {
                        *t += g;
                    }
                }
                Ok(total)
            }
            FieldKind::Scaled(f, c) => Ok(f.gradient(y)?.into_iter().map(|g| c * g).collect()),
            FieldKind::Translate(f, v) => {
                let z: Vec<f64> = y.iter().zip(v).map(|(a, b)| a - b).collect();
                f.gradient(&z)
            }
            FieldKind::Dilate(f, t) => {
                let z: Vec<f64> = y.iter().map(|a| a / t).collect();
                Ok(f.gradient(&z)?.into_iter().map(|g| g / t).collect())
            }
            FieldKind::LogShift(f, d) => {
                let inner = f.eval_checked(y)? + d;
                Ok(f.gradient(y)?.into_iter().map(|g| g / inner).collect())
            }
            FieldKind::Truncation(f, region) => {
                if region.contains(y) {
                    f.gradient(y)
                } else {
                    Ok(vec![0.0; n])
                }
            }
            _ => {
                let (center, r) = self.radial_coordinate(y).expect("radial kind");
                let (_, dg, _) = self.radial_derivatives(r)?;
                if r == 0.0 {
                    return Err(Error::SingularPoint(y.to_vec()));
                }
                Ok(y.iter().zip(center).map(|(a, c)| dg * (a - c) / r).collect())
            }
        }
    }

    pub fn laplacian(&self, y: &[f64]) -> Result<f64> {
        check_dim(self.dim, y.len())?;
        let n = self.dim as f64;
        match &self.kind {
            FieldKind::Grid(g) => {
                let h = g.default_step();
                grid_stencil_inside(g, y, h)?;
                Ok(fd_laplacian(self, y, h))
            }
            FieldKind::Bump { center, radius, power } => {
                let r2 = radius * radius;
                let d2 = sq_distance(y, center);
                let s = 1.0 - d2 / r2;
                if s <= 0.0 {
                    return Ok(0.0);
                }
                let grad_s_sq = 4.0 * d2 / (r2 * r2);
                let lap_s = -2.0 * n / r2;
                let second = if *power == 2.0 { 2.0 } else { power * (power - 1.0) * s.powf(power - 2.0) };
                Ok(second * grad_s_sq + power * s.powf(power - 1.0) * lap_s)
            }
            FieldKind::Constant(_) | FieldKind::Affine { .. } => Ok(0.0),
            FieldKind::Sum(parts) => parts.iter().map(|p| p.laplacian(y)).sum(),
            FieldKind::Scaled(f, c) => Ok(c * f.laplacian(y)?),
            FieldKind::Translate(f, v) => {
                let z: Vec<f64> = y.iter().zip(v).map(|(a, b)| a - b).collect();
                f.laplacian(&z)
            }
            FieldKind::Dilate(f, t) => {
                let z: Vec<f64> = y.iter().map(|a| a / t).collect();
                Ok(f.laplacian(&z)? / (t * t))
            }
            FieldKind::LogShift(f, d) => {
                let inner = f.eval_checked(y)? + d;
                let g = f.gradient(y)?;
                Ok(f.laplacian(y)? / inner - dot(&g, &g) / (inner * inner))
            }
            FieldKind::Truncation(f, region) => {
                if region.contains(y) {
                    f.laplacian(y)
                } else {
                    Ok(0.0)
                }
            }
            _ => {
                let (_, r) = self.radial_coordinate(y).expect("radial kind");
                if r == 0.0 {
                    return Err(Error::SingularPoint(y.to_vec()));
                }
                let (_, dg, d2g) = self.radial_derivatives(r)?;
                Ok(d2g + (n - 1.0) * dg / r)
            }
        }
    }

    fn radial_coordinate<'a>(&'a self, y: &[f64]) -> Option<(&'a [f64], f64)> {
        const ORIGIN: [f64; crate::geometry::MAX_DIM] = [0.0; crate::geometry::MAX_DIM];
        let center: &[f64] = match &self.kind {
            FieldKind::RadialPower { center, .. } => center,
            FieldKind::LogRadial { center } => center,
            FieldKind::RadialTable(t) => &t.center,
            FieldKind::ExampleW | FieldKind::ExampleV => &ORIGIN[..self.dim],
            _ => return None,
        };
        Some((center, distance(y, center)))
    }

    /// (g, g′, g″) of the radial profile at distance r from the center.
    fn radial_derivatives(&self, r: f64) -> Result<(f64, f64, f64)> {
        let n = self.dim as f64;
        if r == 0.0 {
            return Err(Error::SingularPoint(vec![0.0; self.dim]));
        }
        Ok(match &self.kind {
            FieldKind::RadialPower { coefficient: c, exponent: a, .. } => {
                let g = c * r.powf(-a);
                (g, -a * g / r, a * (a + 1.0) * g / (r * r))
            }
            FieldKind::LogRadial { .. } => (r.ln(), 1.0 / r, -1.0 / (r * r)),
            FieldKind::RadialTable(t) => t.derivatives(r),
            FieldKind::ExampleW => {
                // g = e^{−1/r} r^{−(n+1)}, g′ = g·h with h = r^{−2} − (n+1) r^{−1}
                let g = (-1.0 / r).exp() * r.powf(-(n + 1.0));
                let h = r.powi(-2) - (n + 1.0) / r;
                let dh = -2.0 * r.powi(-3) + (n + 1.0) * r.powi(-2);
                (g, g * h, g * (h * h + dh))
            }
            FieldKind::ExampleV => {
                let g = example_v_profile(self.dim, r);
                let dg = -6.0 * (n + 1.0) * r.powi(-3) + 3.0 * (n + 5.0) * r.powi(-4) - 4.0 * r.powi(-5);
                let d2g = 18.0 * (n + 1.0) * r.powi(-4) - 12.0 * (n + 5.0) * r.powi(-5) + 20.0 * r.powi(-6);
                (g, dg, d2g)
            }
            _ => unreachable!("not a radial kind"),
        })
    }

    /// Declared poles. Coincident poles of summands keep the strongest exponent.
    pub fn singularities(&self) -> Vec<Singularity> {
        let n = self.dim;
        match &self.kind {
            FieldKind::RadialPower { exponent, center, .. } if *exponent > 0.0 => {
                vec![Singularity { point: center.clone(), exponent: *exponent }]
            }
            FieldKind::ExampleV => vec![Singularity { point: Point::origin(n), exponent: 4.0 }],
            FieldKind::LogRadial { center } => vec![Singularity { point: center.clone(), exponent: 0.0 }],
            FieldKind::RadialTable(t) => t
                .pole_exponent()
                .map(|a| vec![Singularity { point: t.center.clone(), exponent: a }])
                .unwrap_or_default(),
            FieldKind::Sum(parts) => {
                let mut out: Vec<Singularity> = Vec::new();
                for s in parts.iter().flat_map(|p| p.singularities()) {
                    match out.iter_mut().find(|o| distance(&o.point, &s.point) == 0.0) {
                        Some(o) => o.exponent = o.exponent.max(s.exponent),
                        None => out.push(s),
                    }
                }
                out
            }
            FieldKind::Scaled(f, c) if *c != 0.0 => f.singularities(),
            FieldKind::Translate(f, v) => f
                .singularities()
                .into_iter()
                .map(|s| Singularity { point: s.point.translated(v), exponent: s.exponent })
                .collect(),
            FieldKind::Dilate(f, t) => f
                .singularities()
                .into_iter()
                .map(|s| Singularity { point: s.point.scaled(*t), exponent: s.exponent })
                .collect(),
            FieldKind::LogShift(f, _) => {
                f.singularities().into_iter().map(|s| Singularity { point: s.point, exponent: 0.0 }).collect()
            }
            FieldKind::Truncation(f, region) => {
                f.singularities().into_iter().filter(|s| distance(&s.point, &region.center) <= region.radius).collect()
            }
            _ => Vec::new(),
        }
    }

    pub fn symmetry(&self) -> SymmetryHint {
        match &self.kind {
            FieldKind::RadialPower { center, .. }
            | FieldKind::Bump { center, .. }
            | FieldKind::LogRadial { center } => SymmetryHint::radial(center),
            FieldKind::RadialTable(t) => SymmetryHint::radial(&t.center),
            FieldKind::ExampleW | FieldKind::ExampleV => SymmetryHint::radial(&vec![0.0; self.dim]),
            FieldKind::Constant(_) => SymmetryHint::default(),
            FieldKind::Affine { gradient, .. } => {
                if gradient.iter().all(|g| *g == 0.0) {
                    SymmetryHint::default()
                } else {
                    SymmetryHint { directions: vec![gradient.clone()], ..Default::default() }
                }
            }
            FieldKind::Grid(_) => SymmetryHint::general(),
            FieldKind::Sum(parts) => parts.iter().fold(SymmetryHint::default(), |acc, p| acc.merge(p.symmetry())),
            FieldKind::Scaled(f, _) | FieldKind::LogShift(f, _) => f.symmetry(),
            FieldKind::Translate(f, v) => f.symmetry().translated(v),
            FieldKind::Dilate(f, t) => f.symmetry().scaled(*t),
            FieldKind::Truncation(f, region) => f.symmetry().merge(SymmetryHint::radial(&region.center)),
        }
    }

    /// The center when the field is radial about a single point.
    pub fn radial_center(&self) -> Option<Point> {
        let hint = self.symmetry();
        if hint.general || !hint.directions.is_empty() {
            return None;
        }
        match hint.points.split_first() {
            None => Some(Point::origin(self.dim)),
            Some((first, rest)) => rest.iter().all(|p| distance(p, first) == 0.0).then(|| Point::new(first.clone())),
        }
    }

    /// A ball outside of which the field vanishes, when one is known.
    pub fn support(&self) -> Option<Ball> {
        match &self.kind {
            FieldKind::Bump { center, radius, .. } => Some(Ball { center: center.clone(), radius: *radius }),
            FieldKind::Constant(c) if *c == 0.0 => None,
            FieldKind::Truncation(f, region) => match f.support() {
                Some(s) if region.contains_ball(&s) => Some(s),
                _ => Some(region.clone()),
            },
            FieldKind::Sum(parts) => {
                let mut balls = parts.iter().map(|p| p.support());
                let first = balls.next()??;
                balls.try_fold(first, |acc, b| b.map(|b| acc.bounding(&b)))
            }
            FieldKind::Scaled(f, _) => f.support(),
            FieldKind::Translate(f, v) => f.support().map(|b| b.translated(v)),
            FieldKind::Dilate(f, t) => f.support().map(|b| Ball { center: b.center.scaled(*t), radius: b.radius * t }),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            FieldKind::Constant(c) => *c == 0.0,
            FieldKind::Scaled(f, c) => *c == 0.0 || f.is_zero(),
            FieldKind::Sum(parts) => parts.iter().all(|p| p.is_zero()),
            FieldKind::Translate(f, _) | FieldKind::Dilate(f, _) | FieldKind::Truncation(f, _) => f.is_zero(),
            FieldKind::RadialPower { coefficient, .. } => *coefficient == 0.0,
            _ => false,
        }
    }
}

pub(crate) fn example_v_profile(n: usize, r: f64) -> f64 {
    let n = n as f64;
    3.0 * (n + 1.0) * r.powi(-2) - (n + 5.0) * r.powi(-3) + r.powi(-4)
}

fn sq_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn grid_stencil_inside(g: &GridData, y: &[f64], h: f64) -> Result<()> {
    let inside = y.iter().enumerate().all(|(i, &v)| v - h >= g.lower[i] && v + h <= g.upper[i]);
    if inside {
        Ok(())
    } else {
        Err(Error::BoundaryPoint(y.to_vec()))
    }
}

/// Second-order central-difference gradient.
pub fn fd_gradient(f: &ScalarField, y: &[f64], h: f64) -> Vec<f64> {
    let mut z = y.to_vec();
    (0..y.len())
        .map(|i| {
            z[i] = y[i] + h;
            let plus = f.value(&z);
            z[i] = y[i] - h;
            let minus = f.value(&z);
            z[i] = y[i];
            (plus - minus) / (2.0 * h)
        })
        .collect()
}

/// Second-order central-difference Laplacian.
pub fn fd_laplacian(f: &ScalarField, y: &[f64], h: f64) -> f64 {
    let center = f.value(y);
    let mut z = y.to_vec();
    let mut total = 0.0;
    for i in 0..y.len() {
        z[i] = y[i] + h;
        let plus = f.value(&z);
        z[i] = y[i] - h;
        let minus = f.value(&z);
        z[i] = y[i];
        total += plus - 2.0 * center + minus;
    }
    total / (h * h)
}

/// Declarative description of a field, as found in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    RadialPower {
        #[serde(default = "one")]
        coefficient: f64,
        exponent: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    ExampleW,
    ExampleV,
    Bump {
        #[serde(default)]
        center: Option<Vec<f64>>,
        #[serde(default = "one")]
        radius: f64,
        #[serde(default = "two")]
        power: f64,
    },
    Grid(GridData),
    Constant {
        value: f64,
    },
    Affine {
        gradient: Vec<f64>,
        #[serde(default)]
        offset: f64,
    },
    LogRadial {
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    Sum {
        parts: Vec<FieldSpec>,
    },
    Scaled {
        field: Box<FieldSpec>,
        factor: f64,
    },
    Translate {
        field: Box<FieldSpec>,
        shift: Vec<f64>,
    },
    Dilate {
        field: Box<FieldSpec>,
        factor: f64,
    },
    LogShift {
        field: Box<FieldSpec>,
        shift: f64,
    },
    Truncation {
        field: Box<FieldSpec>,
        #[serde(default)]
        center: Option<Vec<f64>>,
        radius: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

const MAX_SPEC_DEPTH: usize = 32;

impl FieldSpec {
    /// Builds the field in dimension `n`; omitted centers default to the origin.
    pub fn build(&self, n: usize) -> Result<ScalarField> {
        if n == 0 || n > crate::geometry::MAX_DIM {
            return Err(Error::ParameterOutOfRange(format!("dimension must be in 1..=6, got {n}")));
        }
        self.build_at_depth(n, 0)
    }

    fn build_at_depth(&self, n: usize, depth: usize) -> Result<ScalarField> {
        if depth > MAX_SPEC_DEPTH {
            return Err(Error::InvalidField("field description nested too deeply".into()));
        }
        let point = |c: &Option<Vec<f64>>| -> Result<Point> {
            match c {
                None => Ok(Point::origin(n)),
                Some(v) => {
                    check_dim(n, v.len())?;
                    if v.iter().any(|x| !x.is_finite()) {
                        return Err(Error::InvalidField("non-finite coordinate".into()));
                    }
                    Ok(Point::new(v.clone()))
                }
            }
        };
        let finite = |x: f64, what: &str| -> Result<f64> {
            if x.is_finite() {
                Ok(x)
            } else {
                Err(Error::InvalidField(format!("{what} must be finite")))
            }
        };
        Ok(match self {
            FieldSpec::RadialPower { coefficient, exponent, center } => ScalarField::radial_power(
                n,
                finite(*coefficient, "coefficient")?,
                finite(*exponent, "exponent")?,
                point(center)?,
            )?,
            FieldSpec::ExampleW => ScalarField::example_w(n),
            FieldSpec::ExampleV => ScalarField::example_v(n),
            FieldSpec::Bump { center, radius, power } => {
                ScalarField::bump(point(center)?, finite(*radius, "radius")?, finite(*power, "power")?)?
            }
            FieldSpec::Grid(data) => {
                check_dim(n, data.lower.len())?;
                if data.samples.iter().chain(&data.lower).chain(&data.upper).any(|x| !x.is_finite()) {
                    return Err(Error::InvalidField("grid data must be finite".into()));
                }
                if data.resolution > 4096 {
                    return Err(Error::InvalidField("grid resolution too large".into()));
                }
                ScalarField::grid(data.clone())?
            }
            FieldSpec::Constant { value } => ScalarField::constant(n, finite(*value, "value")?),
            FieldSpec::Affine { gradient, offset } => {
                check_dim(n, gradient.len())?;
                if gradient.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidField("gradient must be finite".into()));
                }
                ScalarField::affine(gradient.clone(), finite(*offset, "offset")?)
            }
            FieldSpec::LogRadial { center } => ScalarField::log_radial(point(center)?),
            FieldSpec::Sum { parts } => {
                ScalarField::sum(parts.iter().map(|p| p.build_at_depth(n, depth + 1)).collect::<Result<Vec<_>>>()?)?
            }
            FieldSpec::Scaled { field, factor } => {
                field.build_at_depth(n, depth + 1)?.scaled(finite(*factor, "factor")?)
            }
            FieldSpec::Translate { field, shift } => {
                check_dim(n, shift.len())?;
                if shift.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidField("shift must be finite".into()));
                }
                field.build_at_depth(n, depth + 1)?.translated(shift.clone())?
            }
            FieldSpec::Dilate { field, factor } => {
                field.build_at_depth(n, depth + 1)?.dilated(finite(*factor, "factor")?)?
            }
            FieldSpec::LogShift { field, shift } => {
                field.build_at_depth(n, depth + 1)?.log_shift(finite(*shift, "shift")?)
            }
            FieldSpec::Truncation { field, center, radius } => {
                let region = Ball::new(point(center)?, *radius)?;
                field.build_at_depth(n, depth + 1)?.truncated(region)?
            }
        })
    }
}

/// The pair (w, V) of the explicit Schrödinger counterexample: −Δw + Vw = 0
/// on B(0,1) \ {0}, with w vanishing to infinite order at the origin.
pub fn make_example_pair(n: usize) -> Result<(ScalarField, ScalarField)> {
    if !(3..=crate::geometry::MAX_DIM).contains(&n) {
        return Err(Error::ParameterOutOfRange(format!("example pair needs 3 <= n <= 6, got {n}")));
    }
    Ok((ScalarField::example_w(n), ScalarField::example_v(n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn eval_examples() {
        let f = ScalarField::power_at_origin(3, 1.5);
        assert_eq!(f.eval(&[1.0, 0.0, 0.0]).unwrap(), 1.0);
        let w = ScalarField::example_w(3);
        assert_eq!(w.eval(&[0.0, 0.0, 0.0]).unwrap(), 1.0);
        let b = ScalarField::bump(Point::origin(3), 1.0, 2.0).unwrap();
        assert!((b.eval(&[0.5, 0.0, 0.0]).unwrap() - 0.5625).abs() < 1e-15);
    }

    #[test]
    fn eval_rejects_poles_and_bad_dimension() {
        let f = ScalarField::power_at_origin(3, 1.5);
        assert!(matches!(f.eval(&[0.0, 0.0, 0.0]), Err(Error::SingularPoint(_))));
        assert!(matches!(f.eval(&[1.0, 0.0]), Err(Error::DimensionMismatch { .. })));
        let l = ScalarField::log_radial(Point::origin(2));
        assert!(l.eval(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn example_pair_values() {
        let (w, v) = make_example_pair(3).unwrap();
        assert!((v.eval(&[1.0, 0.0, 0.0]).unwrap() - 5.0).abs() < 1e-14);
        assert!((w.eval(&[0.5, 0.0, 0.0]).unwrap() - 16.0 * (-2.0f64).exp()).abs() < 1e-14);
        let (_, v4) = make_example_pair(4).unwrap();
        assert!((v4.eval(&[0.0, 1.0, 0.0, 0.0]).unwrap() - 7.0).abs() < 1e-14);
        assert_eq!(v.eval(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert!(make_example_pair(2).is_err());
    }

    #[test]
    fn example_w_laplacian_matches_potential() {
        for n in [3usize, 4, 5] {
            let (w, v) = make_example_pair(n).unwrap();
            let mut x = vec![0.0; n];
            x[0] = 0.3 / (2f64).sqrt();
            x[1] = 0.3 / (2f64).sqrt();
            let ratio = w.laplacian(&x).unwrap() / w.eval(&x).unwrap();
            assert!(rel(ratio, v.eval(&x).unwrap()) < 1e-12, "n={n}");
        }
    }

    #[test]
    fn example_w_gradient_matches_quoted_form() {
        let w = ScalarField::example_w(3);
        let x = [0.2, -0.1, 0.25];
        let r = crate::geometry::norm(&x);
        let wx = w.eval(&x).unwrap();
        let g = w.gradient(&x).unwrap();
        for i in 0..3 {
            let expected = wx * (-(4.0) * r.powi(-2) * x[i] + r.powi(-3) * x[i]);
            assert!(rel(g[i], expected) < 1e-13);
        }
    }

    #[test]
    fn bump_gradient_example() {
        let b = ScalarField::bump(Point::origin(3), 1.0, 2.0).unwrap();
        let g = b.gradient(&[0.5, 0.0, 0.0]).unwrap();
        assert!((g[0] + 1.5).abs() < 1e-15 && g[1] == 0.0 && g[2] == 0.0);
        assert!(ScalarField::bump(Point::origin(3), 1.0, 1.5).is_err());
    }

    #[test]
    fn finite_difference_laplacian_converges_at_second_order() {
        let w = ScalarField::example_w(3);
        let x = [0.3, 0.0, 0.0];
        let exact = w.laplacian(&x).unwrap();
        let e1 = rel(fd_laplacian(&w, &x, 1e-3), exact);
        assert!(e1 <= 1e-3, "relative error {e1}");
        let errs: Vec<f64> = [4e-3, 2e-3, 1e-3].iter().map(|&h| rel(fd_laplacian(&w, &x, h), exact)).collect();
        for pair in errs.windows(2) {
            let order = (pair[0] / pair[1]).log2();
            assert!((order - 2.0).abs() < 0.2, "observed order {order}");
        }
    }

    #[test]
    fn analytic_kinds_agree_with_finite_differences() {
        let n = 3;
        let fields = vec![
            ScalarField::power_at_origin(n, 1.5),
            ScalarField::example_v(n),
            ScalarField::log_radial(Point::new(vec![0.1, 0.0, -0.2])),
            ScalarField::bump(Point::new(vec![0.2, 0.1, 0.0]), 1.2, 3.0).unwrap(),
            ScalarField::example_w(n).log_shift(0.01),
            ScalarField::bump(Point::origin(n), 1.0, 2.0).unwrap().dilated(2.0).unwrap(),
            ScalarField::example_w(n).translated(vec![0.1, 0.0, 0.0]).unwrap(),
        ];
        let y = [0.31, -0.22, 0.17];
        for f in &fields {
            let g = f.gradient(&y).unwrap();
            let fd = fd_gradient(f, &y, 1e-5);
            for i in 0..n {
                assert!((g[i] - fd[i]).abs() <= 1e-6 * (1.0 + g[i].abs()), "{:?}", f.kind());
            }
            let lap = f.laplacian(&y).unwrap();
            let fd_lap = fd_laplacian(f, &y, 1e-4);
            assert!((lap - fd_lap).abs() <= 1e-4 * (1.0 + lap.abs()), "{:?}: {lap} vs {fd_lap}", f.kind());
        }
    }

    #[test]
    fn grid_interpolation_is_exact_for_multilinear() {
        let f = ScalarField::affine(vec![1.0, -2.0, 0.5], 0.25);
        let g = ScalarField::sample_grid(&f, vec![-1.0; 3], vec![1.0; 3], 8).unwrap();
        let y = [0.123, -0.456, 0.789];
        assert!((g.eval(&y).unwrap() - f.eval(&y).unwrap()).abs() < 1e-13);
        let grad = g.gradient(&y).unwrap();
        assert!((grad[1] + 2.0).abs() < 1e-10);
        assert!(matches!(g.eval(&[2.0, 0.0, 0.0]), Err(Error::OutsideGrid(_))));
        assert!(matches!(g.gradient(&[0.99, 0.0, 0.0]), Err(Error::BoundaryPoint(_))));
    }

    #[test]
    fn radial_table_extrapolates_power_trend() {
        let radii = vec![0.1, 1.0, 10.0];
        let values = vec![10f64.powf(1.5), 1.0, 10f64.powf(-1.5)];
        let t = ScalarField::radial_table(Point::origin(3), radii, values).unwrap();
        assert!(rel(t.eval(&[0.01, 0.0, 0.0]).unwrap(), 1e3) < 1e-12);
        assert!(rel(t.eval(&[0.0, 0.0, 100.0]).unwrap(), 1e-3) < 1e-12);
        assert!((t.singularities()[0].exponent - 1.5).abs() < 1e-12);
    }

    #[test]
    fn spec_builds_nested_fields() {
        let json = r#"{"kind":"sum","parts":[{"kind":"bump","radius":0.5},
            {"kind":"translate","shift":[1,0,0],"field":{"kind":"radial_power","exponent":1.0}}]}"#;
        let spec: FieldSpec = serde_json::from_str(json).unwrap();
        let f = spec.build(3).unwrap();
        assert_eq!(f.singularities()[0].point.coords(), &[1.0, 0.0, 0.0]);
        assert!(FieldSpec::Bump { center: Some(vec![0.0]), radius: 1.0, power: 2.0 }.build(3).is_err());
    }

    #[test]
    fn symmetry_and_support() {
        let b1 = ScalarField::bump(Point::origin(3), 1.0, 2.0).unwrap();
        let b2 = ScalarField::bump(Point::new(vec![2.0, 0.0, 0.0]), 0.5, 2.0).unwrap();
        let s = ScalarField::sum(vec![b1.clone(), b2]).unwrap();
        assert_eq!(s.symmetry().points.len(), 2);
        let sup = s.support().unwrap();
        assert!((sup.radius - 1.75).abs() < 1e-12);
        assert_eq!(b1.radial_center().unwrap().coords(), &[0.0, 0.0, 0.0]);
        assert!(s.radial_center().is_none());
    }
}

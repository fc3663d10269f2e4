//! Points, balls and the measure constants of the unit sphere.

use std::f64::consts::PI;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest dimension handled by the quadrature engine.
pub const MAX_DIM: usize = 6;

/// A point of R^n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn origin(n: usize) -> Self {
        Point(vec![0.0; n])
    }

    /// `scale · e_axis`.
    pub fn on_axis(n: usize, axis: usize, scale: f64) -> Self {
        let mut v = vec![0.0; n];
        v[axis] = scale;
        Point(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn distance(&self, other: &[f64]) -> f64 {
        distance(&self.0, other)
    }

    pub fn translated(&self, v: &[f64]) -> Point {
        Point(self.0.iter().zip(v).map(|(a, b)| a + b).collect())
    }

    pub fn scaled(&self, t: f64) -> Point {
        Point(self.0.iter().map(|a| a * t).collect())
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

/// An open ball B(center, radius).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::ParameterOutOfRange(format!("ball radius must be positive and finite, got {radius}")));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::ParameterOutOfRange("ball center must be finite".into()));
        }
        Ok(Ball { center, radius })
    }

    pub fn centered(n: usize, radius: f64) -> Result<Self> {
        Ball::new(Point::origin(n), radius)
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        distance(&self.center, y) < self.radius
    }

    /// True when `other` lies inside the closure of `self`.
    pub fn contains_ball(&self, other: &Ball) -> bool {
        distance(&self.center, &other.center) + other.radius <= self.radius * (1.0 + 1e-12)
    }

    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim()) * self.radius.powi(self.dim() as i32)
    }

    pub fn translated(&self, v: &[f64]) -> Ball {
        Ball { center: self.center.translated(v), radius: self.radius }
    }

    /// Smallest ball (about the midpoint of the centers) containing both.
    pub fn bounding(&self, other: &Ball) -> Ball {
        let d = distance(&self.center, &other.center);
        if d + other.radius <= self.radius {
            return self.clone();
        }
        if d + self.radius <= other.radius {
            return other.clone();
        }
        let radius = 0.5 * (d + self.radius + other.radius);
        // center sits on the segment at distance radius - self.radius from self.center
        let shift = (radius - self.radius) / d;
        let center = self.center.iter().zip(other.center.iter()).map(|(a, b)| a + shift * (b - a)).collect::<Vec<_>>();
        Ball { center: Point(center), radius }
    }
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Γ(n/2) for a positive integer n.
fn gamma_half_integer(n: usize) -> f64 {
    // Γ(1/2) = √π, Γ(1) = 1, Γ(x + 1) = x Γ(x)
    let (mut g, mut x) = if n.is_multiple_of(2) { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    while 2.0 * x < n as f64 - 0.5 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Surface area σ_{n−1} of the unit sphere S^{n−1} ⊂ R^n.
pub fn unit_sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half_integer(n)
}

/// Volume of the unit ball of R^n.
pub fn unit_ball_volume(n: usize) -> f64 {
    unit_sphere_area(n) / n as f64
}

/// Log-spaced grid of `count` values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
        }
    }
}

/// Dimension check shared by the evaluation entry points.
pub fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_constants() {
        assert!((unit_sphere_area(1) - 2.0).abs() < 1e-15);
        assert!((unit_sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((unit_ball_volume(5) - 8.0 * PI * PI / 15.0).abs() < 1e-13);
    }

    #[test]
    fn bounding_ball_contains_both() {
        let a = Ball::new(Point::new(vec![-1.0, 0.0, 0.0]), 0.5).unwrap();
        let b = Ball::new(Point::new(vec![2.0, 0.0, 0.0]), 1.0).unwrap();
        let c = a.bounding(&b);
        assert!(c.contains_ball(&a) && c.contains_ball(&b));
        assert!((c.radius - 2.25).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_radius() {
        assert!(Ball::centered(3, 0.0).is_err());
        assert!(Ball::centered(3, -1.0).is_err());
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1e-3, 1e2, 25);
        assert_eq!(g.len(), 25);
        assert!((g[0] - 1e-3).abs() < 1e-15);
        assert!((g[24] - 1e2).abs() < 1e-10);
    }
}

//! Declarative run configuration. Every section has complete defaults, so an
//! empty file is a valid configuration.

use hg_core::fields::FieldSpec;
use hg_core::geometry::{log_grid, Ball, Point, MAX_DIM};
use hg_core::growth::{ConditionGrid, GrowthFunction};
use hg_core::maximal_bmo::SubballSampler;
use hg_core::quadrature::{QuadOptions, SINGULAR_TOL};
use hg_core::stummel::ClassifyThresholds;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

/// `count` log-spaced radii between `lo` and `hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogGrid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl LogGrid {
    pub const fn new(lo: f64, hi: f64, count: usize) -> Self {
        LogGrid { lo, hi, count }
    }

    /// Refinement keeps the end points and multiplies the spacing density.
    pub fn points(&self, refine: usize) -> Vec<f64> {
        log_grid(self.lo, self.hi, (self.count - 1) * refine + 1)
    }

    fn validate(&self, what: &str) -> Result<(), ConfigError> {
        if !(self.lo > 0.0 && self.hi > self.lo && self.hi.is_finite()) || self.count < 2 {
            return invalid(format!("{what}: need 0 < lo < hi and count ≥ 2"));
        }
        if self.count > 10_000 {
            return invalid(format!("{what}: count too large"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallSpec {
    #[serde(default)]
    pub center: Option<Vec<f64>>,
    pub radius: f64,
}

impl BallSpec {
    pub fn build(&self, n: usize) -> Ball {
        let center = self.center.clone().map(Point::new).unwrap_or_else(|| Point::origin(n));
        Ball { center, radius: self.radius }
    }

    fn validate(&self, n: usize, what: &str) -> Result<(), ConfigError> {
        if let Some(c) = &self.center {
            check_point(c, n, what)?;
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return invalid(format!("{what}: radius must be positive"));
        }
        Ok(())
    }
}

fn radial(exponent: f64) -> FieldSpec {
    FieldSpec::RadialPower { coefficient: 1.0, exponent, center: None }
}

fn check_point(c: &[f64], n: usize, what: &str) -> Result<(), ConfigError> {
    if c.len() != n {
        return invalid(format!("{what}: expected {n} coordinates, got {}", c.len()));
    }
    if c.iter().any(|x| !x.is_finite()) {
        return invalid(format!("{what}: coordinates must be finite"));
    }
    Ok(())
}

fn check_field(f: &FieldSpec, n: usize, what: &str) -> Result<(), ConfigError> {
    f.build(n).map(|_| ()).or_else(|e| invalid(format!("{what}: {e}")))
}

fn check_phi(phi: &GrowthFunction, what: &str) -> Result<(), ConfigError> {
    phi.validate().or_else(|e| invalid(format!("{what}: {e}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub n: usize,
    pub alpha: f64,
    pub p: f64,
    /// quadrature tolerance; each command has its own default when absent
    pub tol: Option<f64>,
    pub grid_refine: usize,
    pub seed: u64,
    pub morrey: MorreySection,
    pub stummel: StummelSection,
    pub check_phi: CheckPhiSection,
    pub maximal: MaximalSection,
    pub bmo: BmoSection,
    pub fefferman: FeffermanSection,
    pub kernel_lemma: KernelSection,
    pub riesz_bound: RieszSection,
    pub subrep: SubrepSection,
    pub counterexample: CounterexampleSection,
    pub vanishing: VanishingSection,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            n: 3,
            alpha: 1.5,
            p: 1.5,
            tol: None,
            grid_refine: 1,
            seed: 7,
            morrey: MorreySection::default(),
            stummel: StummelSection::default(),
            check_phi: CheckPhiSection::default(),
            maximal: MaximalSection::default(),
            bmo: BmoSection::default(),
            fefferman: FeffermanSection::default(),
            kernel_lemma: KernelSection::default(),
            riesz_bound: RieszSection::default(),
            subrep: SubrepSection::default(),
            counterexample: CounterexampleSection::default(),
            vanishing: VanishingSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MorreySection {
    pub field: FieldSpec,
    /// defaults to Power(n − αp)
    pub phi: Option<GrowthFunction>,
    pub r_grid: LogGrid,
    pub extra_candidates: Vec<Vec<f64>>,
}

impl Default for MorreySection {
    fn default() -> Self {
        MorreySection {
            field: radial(1.5),
            phi: None,
            r_grid: LogGrid::new(1e-3, 1e2, 25),
            extra_candidates: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StummelSection {
    pub field: FieldSpec,
    /// radius of the single modulus evaluation
    pub radius: f64,
    pub r_grid: LogGrid,
    pub extra_candidates: Vec<Vec<f64>>,
    pub thresholds: ClassifyThresholds,
}

impl Default for StummelSection {
    fn default() -> Self {
        StummelSection {
            field: radial(2.0 / 3.0),
            radius: 1.0,
            r_grid: LogGrid::new(1e-6, 1e-1, 11),
            extra_candidates: Vec::new(),
            thresholds: ClassifyThresholds::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckPhiSection {
    /// defaults to Power(n − αp) and LogPower(n − αp)
    pub phis: Option<Vec<GrowthFunction>>,
    pub grid: ConditionGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaximalSection {
    /// radial about `center`; M f is sampled along the first axis
    pub field: FieldSpec,
    pub center: Option<Vec<f64>>,
    pub radii: LogGrid,
    pub r_search: LogGrid,
    /// A₁ checks use |weight_field|^γ
    pub weight_field: FieldSpec,
    pub gamma: f64,
    pub a1_points: LogGrid,
    /// defaults to Power(n − αp)
    pub phi: Option<GrowthFunction>,
    pub morrey_r_grid: LogGrid,
}

impl Default for MaximalSection {
    fn default() -> Self {
        MaximalSection {
            field: radial(1.5),
            center: None,
            radii: LogGrid::new(1e-3, 1e2, 26),
            r_search: LogGrid::new(1e-3, 1e2, 31),
            weight_field: radial(2.0 / 3.0),
            gamma: 0.9,
            a1_points: LogGrid::new(1e-2, 1e1, 7),
            phi: None,
            morrey_r_grid: LogGrid::new(1e-3, 1e2, 25),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BmoSection {
    pub field: FieldSpec,
    pub ball: BallSpec,
    pub exponent: f64,
    pub sampler: SubballSampler,
}

impl Default for BmoSection {
    fn default() -> Self {
        BmoSection {
            field: FieldSpec::LogRadial { center: None },
            ball: BallSpec { center: None, radius: 1.0 },
            exponent: 1.0,
            sampler: SubballSampler::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeffermanForm {
    Morrey,
    Stummel,
    Oscillation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeffermanSection {
    pub forms: Vec<FeffermanForm>,
    /// test functions; the built-in catalog when absent
    pub catalog: Option<Vec<FieldSpec>>,
    pub morrey_field: FieldSpec,
    pub stummel_field: FieldSpec,
    pub morrey_r_grid: LogGrid,
    /// applied to u and V together for the translation check
    pub shift: Option<Vec<f64>>,
}

impl Default for FeffermanSection {
    fn default() -> Self {
        FeffermanSection {
            forms: vec![FeffermanForm::Morrey, FeffermanForm::Stummel, FeffermanForm::Oscillation],
            catalog: None,
            morrey_field: radial(1.5),
            stummel_field: radial(2.0 / 3.0),
            morrey_r_grid: LogGrid::new(1e-3, 1e2, 25),
            shift: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelSection {
    pub ball: BallSpec,
    pub pairs: usize,
    pub min_separation: f64,
}

impl Default for KernelSection {
    fn default() -> Self {
        KernelSection { ball: BallSpec { center: None, radius: 1.0 }, pairs: 40, min_separation: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RieszSection {
    pub field: FieldSpec,
    /// defaults to Power(n − α)
    pub phi: Option<GrowthFunction>,
    pub points: LogGrid,
    pub r_search: LogGrid,
    pub r_grid: LogGrid,
}

impl Default for RieszSection {
    fn default() -> Self {
        RieszSection {
            field: FieldSpec::Truncation { field: Box::new(radial(1.5)), center: None, radius: 1.0 },
            phi: None,
            points: LogGrid::new(1e-2, 1e1, 7),
            r_search: LogGrid::new(1e-3, 1e2, 31),
            r_grid: LogGrid::new(1e-3, 1e2, 25),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SubrepSection {
    pub field: FieldSpec,
    pub ball: BallSpec,
    pub points: usize,
}

impl Default for SubrepSection {
    fn default() -> Self {
        SubrepSection {
            field: FieldSpec::Bump { center: None, radius: 1.0, power: 2.0 },
            ball: BallSpec { center: None, radius: 1.0 },
            points: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CounterexampleSection {
    pub residual_points: usize,
    pub residual_dims: Vec<usize>,
    pub h: f64,
    pub mass_radii: Vec<f64>,
    pub mass_tol: f64,
    pub k_range: Vec<f64>,
    pub vanishing_grid: LogGrid,
    pub alphas: Vec<f64>,
    pub classify_p: f64,
    pub classify_grid: LogGrid,
    pub candidate_spacing: f64,
    pub thresholds: ClassifyThresholds,
    pub vstar_p: Vec<f64>,
    pub vstar_grid: LogGrid,
    pub vstar_lattice: usize,
    pub deltas: Vec<f64>,
    pub sampler: SubballSampler,
    pub doubling_radii: Vec<f64>,
}

impl Default for CounterexampleSection {
    fn default() -> Self {
        CounterexampleSection {
            residual_points: 50,
            residual_dims: vec![3, 4],
            h: 1e-4,
            mass_radii: vec![0.05, 0.1, 0.3, 0.5, 0.9],
            mass_tol: 1e-11,
            k_range: (1..=10).map(f64::from).collect(),
            vanishing_grid: LogGrid::new(0.02, 0.2, 11),
            alphas: vec![1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0],
            classify_p: 1.0,
            classify_grid: LogGrid::new(1e-6, 1e-1, 11),
            candidate_spacing: 0.25,
            thresholds: ClassifyThresholds::default(),
            vstar_p: vec![0.7, 1.0],
            vstar_grid: LogGrid::new(1e-3, 1e2, 11),
            vstar_lattice: 3,
            deltas: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6],
            sampler: SubballSampler { lattice: 3, radii: 8, min_fraction: 1e-2 },
            doubling_radii: vec![0.2, 0.1, 0.05],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VanishingSection {
    pub field: FieldSpec,
    pub x0: Option<Vec<f64>>,
    pub r_grid: LogGrid,
    pub k_range: Vec<f64>,
}

impl Default for VanishingSection {
    fn default() -> Self {
        VanishingSection {
            field: FieldSpec::ExampleW,
            x0: None,
            r_grid: LogGrid::new(0.02, 0.2, 11),
            k_range: (1..=10).map(f64::from).collect(),
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Config = toml::from_str(text)?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_toml(&text)
    }

    /// Quadrature options: `base` unless `tol` is set, tightened by grid_refine².
    pub fn quad(&self, base: f64) -> QuadOptions {
        let r = self.grid_refine as f64;
        QuadOptions::with_tol(self.tol.unwrap_or(base) / (r * r))
    }

    pub fn singular_quad(&self) -> QuadOptions {
        self.quad(SINGULAR_TOL)
    }

    pub fn lambda(&self) -> f64 {
        self.n as f64 - self.alpha * self.p
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let n = self.n;
        if n == 0 || n > MAX_DIM {
            return invalid(format!("n must be in 1..={MAX_DIM}, got {n}"));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return invalid(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.p > 0.0 && self.p.is_finite()) {
            return invalid(format!("p must be positive, got {}", self.p));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t < 0.1) {
                return invalid(format!("tol must lie in (0, 0.1), got {t}"));
            }
        }
        if !(1..=8).contains(&self.grid_refine) {
            return invalid(format!("grid_refine must lie in 1..=8, got {}", self.grid_refine));
        }

        let m = &self.morrey;
        check_field(&m.field, n, "morrey.field")?;
        if let Some(phi) = &m.phi {
            check_phi(phi, "morrey.phi")?;
        }
        m.r_grid.validate("morrey.r_grid")?;
        for c in &m.extra_candidates {
            check_point(c, n, "morrey.extra_candidates")?;
        }

        let s = &self.stummel;
        check_field(&s.field, n, "stummel.field")?;
        if !(s.radius > 0.0 && s.radius.is_finite()) {
            return invalid("stummel.radius must be positive");
        }
        s.r_grid.validate("stummel.r_grid")?;
        for c in &s.extra_candidates {
            check_point(c, n, "stummel.extra_candidates")?;
        }

        if let Some(phis) = &self.check_phi.phis {
            if phis.is_empty() {
                return invalid("check_phi.phis is empty");
            }
            for phi in phis {
                check_phi(phi, "check_phi.phis")?;
            }
        }
        let g = &self.check_phi.grid;
        if !(g.base.0 > 0.0 && g.base.1 > g.base.0 && g.extended.0 > 0.0 && g.extended.1 > g.extended.0)
            || g.points_per_decade == 0
            || g.points_per_decade > 1000
            || !(g.stability > 1.0)
        {
            return invalid("check_phi.grid: ranges must be positive and increasing, stability > 1");
        }

        let mx = &self.maximal;
        check_field(&mx.field, n, "maximal.field")?;
        check_field(&mx.weight_field, n, "maximal.weight_field")?;
        if let Some(c) = &mx.center {
            check_point(c, n, "maximal.center")?;
        }
        mx.radii.validate("maximal.radii")?;
        mx.r_search.validate("maximal.r_search")?;
        mx.a1_points.validate("maximal.a1_points")?;
        mx.morrey_r_grid.validate("maximal.morrey_r_grid")?;
        if !(mx.gamma > 0.0 && mx.gamma < 1.0) {
            return invalid("maximal.gamma must lie in (0, 1)");
        }
        if let Some(phi) = &mx.phi {
            check_phi(phi, "maximal.phi")?;
        }

        let b = &self.bmo;
        check_field(&b.field, n, "bmo.field")?;
        b.ball.validate(n, "bmo.ball")?;
        if !(b.exponent >= 1.0 && b.exponent.is_finite()) {
            return invalid("bmo.exponent must be ≥ 1");
        }
        check_sampler(&b.sampler, "bmo.sampler")?;

        let f = &self.fefferman;
        if f.forms.is_empty() {
            return invalid("fefferman.forms is empty");
        }
        if let Some(cat) = &f.catalog {
            if cat.is_empty() {
                return invalid("the test-function catalog (fefferman.catalog) is empty");
            }
            for u in cat {
                check_field(u, n, "fefferman.catalog")?;
                if u.build(n).ok().and_then(|u| u.support()).is_none() {
                    return invalid("fefferman.catalog: every test function needs a compact support");
                }
            }
        }
        check_field(&f.morrey_field, n, "fefferman.morrey_field")?;
        check_field(&f.stummel_field, n, "fefferman.stummel_field")?;
        f.morrey_r_grid.validate("fefferman.morrey_r_grid")?;
        if let Some(s) = &f.shift {
            check_point(s, n, "fefferman.shift")?;
        }

        let k = &self.kernel_lemma;
        k.ball.validate(n, "kernel_lemma.ball")?;
        if k.pairs == 0 || k.pairs > 10_000 {
            return invalid("kernel_lemma.pairs must lie in 1..=10000");
        }
        if !(k.min_separation > 0.0 && k.min_separation < k.ball.radius) {
            return invalid("kernel_lemma.min_separation must lie in (0, radius)");
        }

        let r = &self.riesz_bound;
        check_field(&r.field, n, "riesz_bound.field")?;
        if let Some(phi) = &r.phi {
            check_phi(phi, "riesz_bound.phi")?;
        }
        r.points.validate("riesz_bound.points")?;
        r.r_search.validate("riesz_bound.r_search")?;
        r.r_grid.validate("riesz_bound.r_grid")?;

        let sr = &self.subrep;
        check_field(&sr.field, n, "subrep.field")?;
        sr.ball.validate(n, "subrep.ball")?;
        if sr.points == 0 || sr.points > 10_000 {
            return invalid("subrep.points must lie in 1..=10000");
        }

        let c = &self.counterexample;
        if c.residual_points == 0 || c.residual_points > 100_000 {
            return invalid("counterexample.residual_points must lie in 1..=100000");
        }
        if c.residual_dims.iter().any(|d| *d < 2 || *d > MAX_DIM) {
            return invalid(format!("counterexample.residual_dims must lie in 2..={MAX_DIM}"));
        }
        if !(c.h > 0.0 && c.h < 0.01) {
            return invalid("counterexample.h must lie in (0, 0.01)");
        }
        if c.mass_radii.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
            return invalid("counterexample.mass_radii must lie in (0, 1)");
        }
        if !(c.mass_tol > 0.0 && c.mass_tol < 0.1) {
            return invalid("counterexample.mass_tol must lie in (0, 0.1)");
        }
        if c.k_range.is_empty() || c.k_range.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
            return invalid("counterexample.k_range must be non-empty and positive");
        }
        c.vanishing_grid.validate("counterexample.vanishing_grid")?;
        if c.alphas.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return invalid("counterexample.alphas must be positive");
        }
        if !(c.classify_p >= 1.0 && c.classify_p.is_finite()) {
            return invalid("counterexample.classify_p must be ≥ 1");
        }
        c.classify_grid.validate("counterexample.classify_grid")?;
        if !(c.candidate_spacing > 0.0 && c.candidate_spacing.is_finite()) {
            return invalid("counterexample.candidate_spacing must be positive");
        }
        if c.vstar_p.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
            return invalid("counterexample.vstar_p must be positive");
        }
        c.vstar_grid.validate("counterexample.vstar_grid")?;
        if !(2..=9).contains(&c.vstar_lattice) {
            return invalid("counterexample.vstar_lattice must lie in 2..=9");
        }
        if c.deltas.iter().any(|d| !(*d > 0.0)) || c.deltas.windows(2).any(|d| !(d[1] < d[0])) {
            return invalid("counterexample.deltas must be positive and strictly decreasing");
        }
        check_sampler(&c.sampler, "counterexample.sampler")?;
        if c.doubling_radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return invalid("counterexample.doubling_radii must be positive");
        }

        let v = &self.vanishing;
        check_field(&v.field, n, "vanishing.field")?;
        if let Some(x) = &v.x0 {
            check_point(x, n, "vanishing.x0")?;
        }
        v.r_grid.validate("vanishing.r_grid")?;
        if v.k_range.is_empty() || v.k_range.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
            return invalid("vanishing.k_range must be non-empty and positive");
        }
        Ok(())
    }
}

fn check_sampler(s: &SubballSampler, what: &str) -> Result<(), ConfigError> {
    if s.lattice == 0 || s.lattice > 33 || s.radii == 0 || s.radii > 200 {
        return invalid(format!("{what}: lattice in 1..=33 and radii in 1..=200"));
    }
    if !(s.min_fraction > 0.0 && s.min_fraction <= 1.0) {
        return invalid(format!("{what}: min_fraction must lie in (0, 1]"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_default() {
        let cfg = Config::from_toml("").unwrap();
        assert_eq!(cfg, Config::default());
        cfg.validate().unwrap();
    }

    #[test]
    fn default_round_trips_through_toml() {
        let text = toml::to_string(&Config::default()).unwrap();
        assert_eq!(Config::from_toml(&text).unwrap(), Config::default());
    }

    #[test]
    fn empty_catalog_is_rejected() {
        let cfg = Config::from_toml("[fefferman]\ncatalog = []\n").unwrap();
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("catalog"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Config::from_toml("dimension = 3\n").is_err());
    }

    #[test]
    fn nested_field_specs_parse() {
        let cfg = Config::from_toml(
            "[morrey]\nfield = { kind = \"radial_power\", exponent = 0.5 }\nphi = { kind = \"log_power\", lambda = 2.0 }\n",
        )
        .unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.morrey.phi, Some(GrowthFunction::log_power(2.0)));
    }

    #[test]
    fn refinement_keeps_end_points() {
        let g = LogGrid::new(1e-3, 1e2, 6).points(2);
        assert_eq!(g.len(), 11);
        assert!((g[0] - 1e-3).abs() < 1e-18 && (g[10] - 1e2).abs() < 1e-12);
    }

    #[test]
    fn bad_dimension_point() {
        let cfg = Config::from_toml("[vanishing]\nx0 = [0.0, 0.0]\n").unwrap();
        assert!(cfg.validate().is_err());
    }
}

use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use hg_core::counterexample as cx;
use hg_core::fields::{FieldSpec, ScalarField};
use hg_core::geometry::{distance, Ball, Point};
use hg_core::growth::{
    candidate_set, check_condition, morrey_norm, ConditionId, GrowthFunction, GrowthParams, MorreyNormResult,
};
use hg_core::inequalities::{
    default_catalog, describe, fefferman_morrey, fefferman_oscillation, fefferman_stummel, kernel_lemma_check,
    riesz_bound_check, subrepresentation_check, InequalityReport,
};
use hg_core::maximal_bmo::{
    bmo_seminorm, check_a1, check_a1_weight, check_maximal_morrey_bound, maximal_function, maximal_function_radial,
    vanishing_order, VanishingResult,
};
use hg_core::quadrature::{Verdict, SMOOTH_TOL};
use hg_core::stummel::{classify, modulus_curve, stummel_modulus, ModulusCurve, StummelClass};

use crate::config::{Config, FeffermanForm};
use crate::output::{num, CurveRow, Outcome, Table};

fn points(cs: &[Vec<f64>]) -> Vec<Point> {
    cs.iter().cloned().map(Point::new).collect()
}

fn point_or_origin(c: &Option<Vec<f64>>, n: usize) -> Point {
    c.clone().map(Point::new).unwrap_or_else(|| Point::origin(n))
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn fmt_point(p: &[f64]) -> String {
    let inner: Vec<String> = p.iter().map(|x| format!("{x:.4}")).collect();
    format!("({})", inner.join(", "))
}

/// Seeded points drawn uniformly from `b` shrunk by `fill`.
fn seeded_points_in(b: &Ball, count: usize, fill: f64, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let n = b.dim();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() >= 1.0 {
            continue;
        }
        out.push(Point::new(b.center.iter().zip(&v).map(|(c, x)| c + fill * b.radius * x).collect()));
    }
    out
}

fn ray(center: &Point, radii: &[f64]) -> Vec<Point> {
    radii
        .iter()
        .map(|&rho| {
            let mut c = center.coords().to_vec();
            c[0] += rho;
            Point::new(c)
        })
        .collect()
}

fn morrey_curve(res: &MorreyNormResult) -> Vec<CurveRow> {
    let i = res.x_candidates.iter().position(|x| *x == res.witness_x).unwrap_or(0);
    res.curve(i)
        .iter()
        .map(|c| CurveRow {
            r: c.r,
            value: c.local,
            divergent: c.verdict.is_divergent(),
            error_estimate: c.error_estimate,
        })
        .collect()
}

fn modulus_rows(curve: &ModulusCurve) -> Vec<CurveRow> {
    curve
        .samples
        .iter()
        .map(|s| CurveRow { r: s.r, value: s.value, divergent: s.divergent, error_estimate: s.error_estimate })
        .collect()
}

fn describe_morrey(res: &MorreyNormResult) -> String {
    if res.infinite {
        format!("+inf (large-r slope {})", res.large_r_slope.map(|s| format!("{s:.4}")).unwrap_or_else(|| "n/a".into()))
    } else {
        format!("{:.6} at x = {}, r = {:.3e}", res.value, fmt_point(&res.witness_x), res.witness_r)
    }
}

pub fn morrey(cfg: &Config) -> Result<Outcome> {
    let s = &cfg.morrey;
    let f = s.field.build(cfg.n)?;
    let phi = s.phi.clone().unwrap_or(GrowthFunction::power(cfg.lambda()));
    let cands = candidate_set(&f, &points(&s.extra_candidates));
    let res = morrey_norm(&f, cfg.p, &phi, &cands, &s.r_grid.points(cfg.grid_refine), &cfg.singular_quad())?;
    let mut o = Outcome::default();
    o.line(format!("Morrey norm (p = {}, phi = {:?}): {}", cfg.p, phi, describe_morrey(&res)));
    o.curve("curve", &morrey_curve(&res));
    o.result = json!({ "phi": to_json(&phi), "norm": to_json(&res) });
    Ok(o)
}

pub fn stummel(cfg: &Config) -> Result<Outcome> {
    let s = &cfg.stummel;
    let v = s.field.build(cfg.n)?;
    let cands = candidate_set(&v, &points(&s.extra_candidates));
    let opts = cfg.singular_quad();
    let at = stummel_modulus(&v, cfg.alpha, cfg.p, s.radius, &cands, &opts)?;
    let curve = modulus_curve(&v, cfg.alpha, cfg.p, &s.r_grid.points(cfg.grid_refine), &cands, &opts)?;
    let class = classify(&curve, &s.thresholds);
    let mut o = Outcome::default();
    o.line(format!("eta_(alpha={}, p={})(r = {}) = {} [{:?}]", cfg.alpha, cfg.p, s.radius, at.value, at.verdict));
    o.line(format!("classification over the r grid: {class:?}"));
    if let Some(d) = curve.doubling_constant {
        o.line(format!("doubling constant estimate: {d:.6}"));
    }
    o.inconclusive = class == StummelClass::Inconclusive || at.verdict == Verdict::Inconclusive;
    o.curve("curve", &modulus_rows(&curve));
    o.result = json!({ "modulus": to_json(&at), "curve": to_json(&curve), "class": to_json(&class) });
    Ok(o)
}

pub fn check_phi(cfg: &Config) -> Result<Outcome> {
    let phis = cfg
        .check_phi
        .phis
        .clone()
        .unwrap_or_else(|| vec![GrowthFunction::power(cfg.lambda()), GrowthFunction::log_power(cfg.lambda())]);
    let params = GrowthParams { n: cfg.n, p: cfg.p, alpha: cfg.alpha };
    let mut o = Outcome::default();
    let mut table = Table::new(&["phi", "condition", "holds", "constant", "extended_constant"]);
    let mut entries = Vec::new();
    for phi in &phis {
        let mut reports = Vec::new();
        let mut all = true;
        for id in [ConditionId::AlmostIncreasing, ConditionId::AlmostDecreasingRatio, ConditionId::Nakai] {
            let label = serde_json::to_string(&id)?.trim_matches('"').to_string();
            match check_condition(phi, id, &params, &cfg.check_phi.grid) {
                Ok(r) => {
                    all &= r.holds;
                    table.push(vec![
                        serde_json::to_string(phi)?,
                        label,
                        r.holds.to_string(),
                        num(r.constant),
                        num(r.extended_constant),
                    ]);
                    reports.push(to_json(&r));
                }
                Err(e) => {
                    all = false;
                    table.push(vec![serde_json::to_string(phi)?, label, "n/a".into(), String::new(), String::new()]);
                    reports.push(json!({ "id": to_json(&id), "error": e.to_string() }));
                }
            }
        }
        o.line(format!("{phi:?}: {}", if all { "all conditions hold" } else { "fails" }));
        entries.push(json!({ "phi": to_json(phi), "all_hold": all, "reports": reports }));
    }
    o.tables.push(("conditions".into(), table));
    o.result = json!({ "params": to_json(&params), "phis": entries });
    Ok(o)
}

pub fn maximal(cfg: &Config) -> Result<Outcome> {
    let s = &cfg.maximal;
    let n = cfg.n;
    let f = s.field.build(n)?;
    let center = point_or_origin(&s.center, n);
    let radii = s.radii.points(cfg.grid_refine);
    let r_search = s.r_search.points(cfg.grid_refine);
    let opts = cfg.singular_quad();
    let mf = maximal_function_radial(&f, &center, &radii, &r_search, &opts)?;
    let violations =
        mf.values.iter().zip(&mf.points).filter(|(m, x)| **m < f.value(x.coords()).abs() * (1.0 - 1e-6)).count();

    let w = s.weight_field.build(n)?;
    let gamma = s.gamma;
    let xs = ray(&center, &s.a1_points.points(cfg.grid_refine));
    // [M(|w|^γ)]^{1/γ}, with |w|^γ tabulated along the ray
    let powered: Vec<f64> = ray(&center, &radii).iter().map(|x| w.value(x.coords()).abs().powf(gamma)).collect();
    let g = ScalarField::radial_table(center.clone(), radii.clone(), powered)?;
    let mg = maximal_function_radial(&g, &center, &radii, &r_search, &opts)?;
    let weight = ScalarField::radial_table(
        center.clone(),
        radii.clone(),
        mg.values.iter().map(|v| v.powf(1.0 / gamma)).collect(),
    )?;
    let a1_literal = check_a1_weight(&weight, &xs, &r_search, &opts)?;
    // (M w)^γ
    let a1_power = check_a1(&w, &center, gamma, &radii, &xs, &r_search, &opts)?;

    let phi = s.phi.clone().unwrap_or(GrowthFunction::power(cfg.lambda()));
    let bound = check_maximal_morrey_bound(
        &f,
        &mf,
        cfg.p,
        &phi,
        &candidate_set(&f, &[]),
        &s.morrey_r_grid.points(cfg.grid_refine),
        &opts,
    )?;

    let mut o = Outcome::default();
    o.line(format!("M f sampled at {} points, {} below |f|", mf.points.len(), violations));
    o.line(format!("A1 constant of [M(|w|^{gamma})]^(1/{gamma}): {:.6}", a1_literal.constant));
    o.line(format!("A1 constant of (M w)^{gamma}: {:.6}", a1_power.constant));
    o.line(format!(
        "||M f|| / ||f|| = {:.6} ({} / {})",
        bound.ratio,
        describe_morrey(&bound.mf_norm),
        describe_morrey(&bound.f_norm)
    ));
    o.inconclusive = mf.inconclusive > 0 || mg.inconclusive > 0;
    let rows: Vec<CurveRow> = radii
        .iter()
        .zip(&mf.values)
        .map(|(&r, &v)| CurveRow { r, value: v, divergent: !v.is_finite(), error_estimate: 0.0 })
        .collect();
    o.curve("profile", &rows);
    o.result = json!({
        "maximal": to_json(&mf),
        "violations": violations,
        "a1_literal": to_json(&a1_literal),
        "a1_power": to_json(&a1_power),
        "morrey_bound": to_json(&bound),
    });
    Ok(o)
}

pub fn bmo(cfg: &Config) -> Result<Outcome> {
    let s = &cfg.bmo;
    let f = s.field.build(cfg.n)?;
    let ball = s.ball.build(cfg.n);
    let sampler = s.sampler.refined(cfg.grid_refine);
    let res = bmo_seminorm(&f, &ball, s.exponent, &sampler, &cfg.quad(SMOOTH_TOL))?;
    let mut o = Outcome::default();
    o.line(format!(
        "BMO_{} seminorm on B({}, {}) = {:.6}, witness B({}, {:.4e}), {} sub-balls",
        s.exponent,
        fmt_point(&ball.center),
        ball.radius,
        res.seminorm,
        fmt_point(&res.witness.center),
        res.witness.radius,
        res.subballs.len()
    ));
    o.inconclusive = res.subballs.iter().any(|b| b.verdict == Verdict::Inconclusive);
    let mut t = Table::new(&["center", "radius", "mean", "oscillation"]);
    for b in &res.subballs {
        t.push(vec![fmt_point(&b.ball.center), num(b.ball.radius), num(b.mean), num(b.oscillation)]);
    }
    o.tables.push(("subballs".into(), t));
    o.result = to_json(&res);
    Ok(o)
}

fn default_shift(n: usize) -> Vec<f64> {
    [0.3, -0.2, 0.1, 0.25, -0.15, 0.05][..n].to_vec()
}

fn shifted(spec: &FieldSpec, shift: &[f64]) -> FieldSpec {
    FieldSpec::Translate { field: Box::new(spec.clone()), shift: shift.to_vec() }
}

#[derive(serde::Serialize)]
struct FeffermanRow {
    report: InequalityReport,
    translated_ratio: f64,
}

pub fn fefferman(cfg: &Config) -> Result<Outcome> {
    let s = &cfg.fefferman;
    let n = cfg.n;
    let catalog = s.catalog.clone().unwrap_or_else(|| default_catalog(n));
    let shift = s.shift.clone().unwrap_or_else(|| default_shift(n));
    let opts = cfg.singular_quad();
    let mut o = Outcome::default();
    let mut table =
        Table::new(&["form", "index", "witness", "lhs", "rhs", "ratio", "translated_ratio", "inconclusive"]);
    let mut forms = serde_json::Map::new();
    for &form in &s.forms {
        let name = serde_json::to_string(&form)?.trim_matches('"').to_string();
        let (v_spec, norm) = match form {
            FeffermanForm::Morrey => {
                let v = s.morrey_field.build(n)?;
                let res = morrey_norm(
                    &v,
                    cfg.p,
                    &GrowthFunction::power(cfg.lambda()),
                    &candidate_set(&v, &[]),
                    &s.morrey_r_grid.points(cfg.grid_refine),
                    &opts,
                )?;
                (s.morrey_field.clone(), Some(res))
            }
            _ => (s.stummel_field.clone(), None),
        };
        let run = |u_spec: &FieldSpec, v_spec: &FieldSpec| -> Result<InequalityReport> {
            let u = u_spec.build(n)?;
            let v = v_spec.build(n)?;
            let witness = describe(u_spec);
            Ok(match form {
                FeffermanForm::Morrey => {
                    let value = norm.as_ref().map(|r| if r.infinite { f64::INFINITY } else { r.value }).unwrap_or(0.0);
                    fefferman_morrey(&u, &v, cfg.alpha, cfg.p, value, &witness, &opts)?
                }
                FeffermanForm::Stummel | FeffermanForm::Oscillation => {
                    let b0 = u.support().expect("catalog entries are compactly supported");
                    let eta = stummel_modulus(
                        &v,
                        cfg.alpha,
                        cfg.p,
                        b0.radius,
                        &candidate_set(&v, std::slice::from_ref(&b0.center)),
                        &opts,
                    )?;
                    if form == FeffermanForm::Stummel {
                        fefferman_stummel(&u, &v, cfg.alpha, cfg.p, &b0, eta.value, &witness, &opts)?
                    } else {
                        fefferman_oscillation(&u, &v, cfg.alpha, cfg.p, &b0, eta.value, &witness, &opts)?
                    }
                }
            })
        };
        let rows: Vec<FeffermanRow> = catalog
            .par_iter()
            .map(|u| -> Result<FeffermanRow> {
                let report = run(u, &v_spec)?;
                let moved = run(&shifted(u, &shift), &shifted(&v_spec, &shift))?;
                Ok(FeffermanRow { report, translated_ratio: moved.ratio })
            })
            .collect::<Result<_>>()?;
        let (best, max_ratio) = rows.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, r)| {
            if r.report.ratio > acc.1 {
                (i, r.report.ratio)
            } else {
                acc
            }
        });
        let max_translation = rows
            .iter()
            .filter(|r| r.report.ratio != 0.0)
            .map(|r| (r.translated_ratio - r.report.ratio).abs() / r.report.ratio.abs())
            .fold(0.0, f64::max);
        let inconclusive = rows.iter().filter(|r| r.report.inconclusive).count();
        o.inconclusive |= inconclusive > 0;
        o.line(format!(
            "{name}: max ratio {max_ratio:.6} over {} test functions (witness {}), translation drift {max_translation:.2e}, {inconclusive} inconclusive",
            rows.len(),
            rows[best].report.witness
        ));
        for (i, r) in rows.iter().enumerate() {
            table.push(vec![
                name.clone(),
                i.to_string(),
                r.report.witness.clone(),
                num(r.report.lhs),
                num(r.report.rhs()),
                num(r.report.ratio),
                num(r.translated_ratio),
                r.report.inconclusive.to_string(),
            ]);
        }
        forms.insert(
            name,
            json!({
                "max_ratio": max_ratio,
                "witness": rows[best].report.witness,
                "max_translation_drift": max_translation,
                "v_norm": norm.as_ref().map(to_json),
                "rows": to_json(&rows),
            }),
        );
    }
    o.tables.push(("catalog".into(), table));
    o.result = json!({ "shift": shift, "forms": forms });
    Ok(o)
}

pub fn kernel_lemma(cfg: &Config) -> Result<Outcome> {
    let s = &cfg.kernel_lemma;
    let ball = s.ball.build(cfg.n);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pairs = Vec::with_capacity(s.pairs);
    while pairs.len() < s.pairs {
        let xz = seeded_points_in(&ball, 2, 0.9, &mut rng);
        if distance(&xz[0], &xz[1]) >= s.min_separation {
            pairs.push((xz[0].clone(), xz[1].clone()));
        }
    }
    let rep = kernel_lemma_check(cfg.n, cfg.alpha, &ball, &pairs, s.min_separation, &cfg.singular_quad())?;
    let mut o = Outcome::default();
    o.line(format!("max normalized kernel integral over {} pairs: {:.6}", rep.pairs.len(), rep.constant));
    o.inconclusive = rep.pairs.iter().any(|p| !p.verdict.is_convergent());
    let mut t = Table::new(&["x", "z", "separation", "integral", "normalized"]);
    for p in &rep.pairs {
        t.push(vec![fmt_point(&p.x), fmt_point(&p.z), num(distance(&p.x, &p.z)), num(p.integral), num(p.normalized)]);
    }
    o.tables.push(("pairs".into(), t));
    o.result = to_json(&rep);
    Ok(o)
}

pub fn riesz_bound(cfg: &Config) -> Result<Outcome> {
    let s = &cfg.riesz_bound;
    let n = cfg.n;
    let v = s.field.build(n)?;
    let phi = s.phi.clone().unwrap_or(GrowthFunction::power(n as f64 - cfg.alpha));
    let opts = cfg.singular_quad();
    let norm = morrey_norm(&v, 1.0, &phi, &candidate_set(&v, &[]), &s.r_grid.points(cfg.grid_refine), &opts)?;
    let xs = ray(&Point::origin(n), &s.points.points(cfg.grid_refine));
    let m = maximal_function(&v, &xs, &s.r_search.points(cfg.grid_refine), &opts)?;
    let value = if norm.infinite { f64::INFINITY } else { norm.value };
    let rep = riesz_bound_check(&v, cfg.alpha, value, &xs, &m.values, &opts)?;
    let mut o = Outcome::default();
    o.line(format!("||V|| in L^(1,phi) = {}", describe_morrey(&norm)));
    o.line(format!("max I1|V| / (||V||^(1/a) M(V)^(1-1/a)) = {:.6}", rep.constant));
    o.inconclusive = rep.points.iter().any(|p| !p.verdict.is_convergent()) || m.inconclusive > 0;
    let rows: Vec<CurveRow> = rep
        .points
        .iter()
        .map(|p| CurveRow { r: p.x.norm(), value: p.ratio, divergent: p.verdict.is_divergent(), error_estimate: 0.0 })
        .collect();
    o.curve("ratio", &rows);
    o.result = json!({ "phi": to_json(&phi), "norm": to_json(&norm), "report": to_json(&rep) });
    Ok(o)
}

pub fn subrep(cfg: &Config) -> Result<Outcome> {
    let s = &cfg.subrep;
    let u = s.field.build(cfg.n)?;
    let ball = s.ball.build(cfg.n);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let xs = seeded_points_in(&ball, s.points, 0.95, &mut rng);
    let rep = subrepresentation_check(&u, &ball, &xs, &cfg.singular_quad())?;
    let mut o = Outcome::default();
    o.line(format!("sub-representation constant over {} points: {:.6}", xs.len(), rep.constant));
    o.inconclusive = rep.points.iter().any(|p| !p.verdict.is_convergent());
    let mut t = Table::new(&["x", "oscillation", "potential", "ratio"]);
    for p in &rep.points {
        t.push(vec![fmt_point(&p.x), num(p.oscillation), num(p.potential), p.ratio.map(num).unwrap_or_default()]);
    }
    o.tables.push(("points".into(), t));
    o.result = to_json(&rep);
    Ok(o)
}

fn vanishing_tables(o: &mut Outcome, res: &VanishingResult) {
    for c in &res.curves {
        let rows: Vec<CurveRow> =
            c.samples.iter().map(|&(r, v)| CurveRow { r, value: v, divergent: false, error_estimate: 0.0 }).collect();
        o.curve(&format!("vanishing_k{}", c.k), &rows);
    }
}

pub fn vanishing(cfg: &Config) -> Result<Outcome> {
    let s = &cfg.vanishing;
    let w = s.field.build(cfg.n)?;
    let x0 = point_or_origin(&s.x0, cfg.n);
    let res = vanishing_order(&w, &x0, &s.r_grid.points(cfg.grid_refine), &s.k_range, &cfg.quad(SMOOTH_TOL))?;
    let mut o = Outcome::default();
    o.line(format!("vanishing at {}: {:?}", fmt_point(&x0), res.verdict));
    vanishing_tables(&mut o, &res);
    o.result = to_json(&res);
    Ok(o)
}

pub fn counterexample(cfg: &Config) -> Result<Outcome> {
    let c = &cfg.counterexample;
    let n = cfg.n;
    let refine = cfg.grid_refine;
    let mut o = Outcome::default();

    let mut residuals = Vec::new();
    let mut rt = Table::new(&["n", "points", "max_closed_form", "max_finite_difference"]);
    for &d in &c.residual_dims {
        let pts = cx::sample_shell_points(d, c.residual_points, 0.95, cfg.seed);
        let rep = cx::verify_pde_residual(d, &pts, c.h)?;
        o.line(format!(
            "n = {d}: PDE residual {:.3e} closed form, {:.3e} finite differences (h = {})",
            rep.max_closed_form, rep.max_finite_difference, c.h
        ));
        rt.push(vec![d.to_string(), pts.len().to_string(), num(rep.max_closed_form), num(rep.max_finite_difference)]);
        residuals.push(rep);
    }
    o.tables.push(("residual".into(), rt));

    let r2 = (refine * refine) as f64;
    let mass = cx::verify_mass_formula(n, &c.mass_radii, &hg_core::quadrature::QuadOptions::with_tol(c.mass_tol / r2))?;
    let mut mt = Table::new(&["r", "quadrature", "exact", "rel_error"]);
    for m in &mass {
        mt.push(vec![num(m.r), num(m.quadrature), num(m.exact), num(m.rel_error)]);
    }
    let worst_mass = mass.iter().map(|m| m.rel_error).fold(0.0, f64::max);
    o.line(format!("mass formula: worst relative error {worst_mass:.3e} over {} radii", mass.len()));
    o.tables.push(("mass".into(), mt));

    let vanishing = cx::verify_vanishing(n, &c.k_range, &c.vanishing_grid.points(refine), &cfg.quad(SMOOTH_TOL))?;
    o.line(format!("vanishing at 0: {:?}", vanishing.verdict));
    vanishing_tables(&mut o, &vanishing);

    let opts = cfg.singular_quad();
    let cands = cx::default_potential_candidates(n, c.candidate_spacing);
    let classes = cx::classify_potential(
        n,
        &c.alphas,
        c.classify_p,
        &c.classify_grid.points(refine),
        &cands,
        &c.thresholds,
        &opts,
    )?;
    let mut ct = Table::new(&["alpha", "class", "small_r_slope", "residual", "all_divergent"]);
    for pc in &classes {
        let (slope, res) = pc.curve.small_r_slope.map(|(s, r)| (num(s), num(r))).unwrap_or_default();
        o.line(format!(
            "alpha = {}: {:?} (small-r slope {})",
            pc.alpha,
            pc.class,
            if slope.is_empty() { "n/a" } else { &slope }
        ));
        ct.push(vec![num(pc.alpha), format!("{:?}", pc.class), slope, res, pc.curve.all_divergent.to_string()]);
        o.curve(&format!("eta_alpha{}", pc.alpha), &modulus_rows(&pc.curve));
        o.inconclusive |= pc.class == StummelClass::Inconclusive;
    }
    o.tables.push(("classification".into(), ct));

    let vcands = cx::default_vstar_candidates(n, (c.vstar_lattice - 1) * refine + 1);
    let mut vstar = Vec::new();
    for &p in &c.vstar_p {
        let rep = cx::verify_vstar_morrey(n, p, &c.vstar_grid.points(refine), &vcands, &opts)?;
        o.line(format!(
            "V* with p = {p}{}: max average {}, at 0 {} (majorant {})",
            if rep.observational { " (observational)" } else { "" },
            rep.max_average,
            rep.origin_max_average,
            rep.majorant.map(num).unwrap_or_else(|| "n/a".into())
        ));
        o.curve(&format!("vstar_p{p}"), &morrey_curve(&rep.norm));
        vstar.push(rep);
    }

    let scan = cx::bmo_blowup_scan(n, &c.deltas, &c.sampler.refined(refine), &cfg.quad(SMOOTH_TOL))?;
    let mut bt = Table::new(&["delta", "seminorm"]);
    for s in &scan {
        bt.push(vec![num(s.delta), num(s.seminorm)]);
    }
    let increasing = scan.windows(2).all(|w| w[1].seminorm > w[0].seminorm);
    o.line(format!(
        "BMO of log(w + delta): {} across {} deltas",
        if increasing { "strictly increasing" } else { "not monotone" },
        scan.len()
    ));
    o.tables.push(("bmo_scan".into(), bt));

    let doubling = cx::doubling_scan(n, &c.doubling_radii, &cfg.quad(1e-10))?;
    let mut dt = Table::new(&["r", "ratio", "exact"]);
    for d in &doubling {
        dt.push(vec![num(d.r), num(d.ratio), num(d.exact)]);
    }
    o.tables.push(("doubling".into(), dt));
    o.line(format!(
        "doubling ratios of w: {}",
        doubling.iter().map(|d| format!("{:.4e}", d.ratio)).collect::<Vec<_>>().join(", ")
    ));

    o.result = json!({
        "residual": to_json(&residuals),
        "mass": to_json(&mass),
        "vanishing": to_json(&vanishing),
        "classification": to_json(&classes),
        "vstar": to_json(&vstar),
        "bmo_scan": to_json(&scan),
        "bmo_increasing": increasing,
        "doubling": to_json(&doubling),
    });
    Ok(o)
}

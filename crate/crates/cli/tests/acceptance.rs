//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit when any fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use hg_core::counterexample as cx;
use hg_core::fields::ScalarField;
use hg_core::geometry::{log_grid, Point};
use hg_core::growth::{
    candidate_set, check_condition, default_r_grid, morrey_norm, ConditionGrid, ConditionId, GrowthFunction,
    GrowthParams,
};
use hg_core::inequalities::fefferman_morrey;
use hg_core::maximal_bmo::SubballSampler;
use hg_core::quadrature::QuadOptions;
use hg_core::stummel::{stummel_modulus, ClassifyThresholds, StummelClass};
use serde_json::Value;
use statrs::function::beta::beta;

const RESIDUAL_CLOSED: f64 = 1e-12;
const RESIDUAL_FD: f64 = 1e-3;
const FD_STEP: f64 = 1e-4;
const MASS_REL: f64 = 1e-8;
const VANISH_DROP: f64 = 1e-6;
const SLOPE_TOL: f64 = 0.1;
const ONE_PERCENT: f64 = 0.01;
const GROWTH_TOL: f64 = 0.1;
const LARGE_R_SLOPE_TOL: f64 = 0.05;
const EXTENSION_FACTOR: f64 = 10.0;
const DILATION_TOL: f64 = 1e-3;
const REFINE_TOL: f64 = 0.10;
const TRANSLATION_TOL: f64 = 1e-4;
const KERNEL_SLACK: f64 = 0.05;
const MAXIMAL_TOL: f64 = 1e-6;
const DOUBLING_GROWTH: f64 = 10.0;
const DOUBLING_REL: f64 = 1e-6;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn hg(args: &[&str], out: &Path, config: Option<&str>) -> (i32, Value) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hg"));
    cmd.args(args).arg("--out").arg(out);
    if let Some(text) = config {
        let path = out.with_extension("toml");
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(&path);
    }
    let status = cmd.output().expect("run hg");
    let code = status.status.code().unwrap_or(-1);
    let stem = args[0].replace('-', "_");
    let json = std::fs::read_to_string(out.join(format!("{stem}.json")))
        .ok()
        .and_then(|t| serde_json::from_str(&t).ok())
        .unwrap_or(Value::Null);
    (code, json)
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::INFINITY)
}

fn c1() -> Verdict {
    let mut worst = (0.0f64, 0.0f64);
    for n in [3, 4] {
        let pts = cx::sample_shell_points(n, 50, 0.95, 7);
        let r = cx::verify_pde_residual(n, &pts, FD_STEP).unwrap();
        worst = (worst.0.max(r.max_closed_form), worst.1.max(r.max_finite_difference));
    }
    verdict(
        worst.0 <= RESIDUAL_CLOSED && worst.1 <= RESIDUAL_FD,
        format!("closed form {:.2e}, finite differences {:.2e}", worst.0, worst.1),
    )
}

fn c2() -> Verdict {
    let rows = cx::verify_mass_formula(3, &[0.05, 0.1, 0.3, 0.5, 0.9], &QuadOptions::with_tol(1e-11)).unwrap();
    let worst = rows.iter().map(|r| r.rel_error).fold(0.0, f64::max);
    verdict(worst <= MASS_REL, format!("worst relative error {worst:.2e}"))
}

fn c3() -> Verdict {
    let ks: Vec<f64> = (1..=10).map(f64::from).collect();
    let res = cx::verify_vanishing(3, &ks, &cx::default_vanishing_grid(), &QuadOptions::default()).unwrap();
    let mut failing = Vec::new();
    for c in &res.curves {
        let monotone = c.samples.windows(2).all(|w| w[0].1 < w[1].1);
        let (first, last) = (c.samples[0].1, c.samples[c.samples.len() - 1].1);
        if !(monotone && first < VANISH_DROP * last) {
            failing.push(format!("k={} (drop {:.1e}, monotone {monotone})", c.k, first / last));
        }
    }
    verdict(failing.is_empty(), if failing.is_empty() { "k = 1..10 all vanish".into() } else { failing.join("; ") })
}

fn c4() -> Verdict {
    let alphas = [1.0, 1.5, 2.0, 4.0, 5.0, 6.0];
    let rows = cx::classify_potential(
        3,
        &alphas,
        1.0,
        &log_grid(1e-6, 1e-1, 11),
        &cx::default_potential_candidates(3, 0.25),
        &ClassifyThresholds::default(),
        &QuadOptions::singular(),
    )
    .unwrap();
    let mut problems = Vec::new();
    for r in &rows {
        let ok = match r.alpha {
            a if a <= 2.0 => r.class == StummelClass::NotInSTilde,
            4.0 => r.curve.samples.iter().all(|s| s.value.is_finite()),
            a => {
                r.class == StummelClass::InS
                    && r.curve.small_r_slope.is_some_and(|(s, _)| (s - (a - 4.0)).abs() <= SLOPE_TOL)
            }
        };
        if !ok {
            problems.push(format!("alpha={} gave {:?}", r.alpha, r.class));
        }
    }
    verdict(problems.is_empty(), if problems.is_empty() { "table reproduced".into() } else { problems.join("; ") })
}

fn c5() -> Verdict {
    let o = QuadOptions::singular();
    let origin = vec![Point::origin(3)];
    let v1 = ScalarField::power_at_origin(3, 1.5);
    let v2 = ScalarField::power_at_origin(3, 1.0 / 1.5);
    let phi = GrowthFunction::power(0.75);
    let n1 = morrey_norm(&v1, 1.5, &phi, &candidate_set(&v1, &[]), &default_r_grid(), &o).unwrap();
    let e1 = stummel_modulus(&v1, 1.5, 1.5, 1.0, &origin, &o).unwrap();
    let e2 = stummel_modulus(&v2, 1.5, 1.5, 1.0, &origin, &o).unwrap();
    let n2 = morrey_norm(&v2, 1.5, &phi, &candidate_set(&v2, &[]), &default_r_grid(), &o).unwrap();
    let norm_ok = rel(n1.value, (4.0 * PI / 0.75).powf(2.0 / 3.0)) <= ONE_PERCENT && n1.witness_x.norm() == 0.0;
    let growth_ok = e1.is_divergent() && e1.verdict.growth_exponent().is_some_and(|g| (g - 0.75).abs() <= GROWTH_TOL);
    let eta_ok = rel(e2.value, (8.0 * PI).powf(2.0 / 3.0)) <= ONE_PERCENT;
    let slope = n2.large_r_slope.unwrap_or(f64::NAN);
    let infinite_ok = n2.infinite && (slope - 5.0 / 6.0).abs() <= LARGE_R_SLOPE_TOL;
    verdict(
        norm_ok && growth_ok && eta_ok && infinite_ok,
        format!(
            "||V1|| {:.5}, eta(V1) growth {:?}, eta(V2,1) {:.5}, ||V2|| infinite {} slope {slope:.4}",
            n1.value,
            e1.verdict.growth_exponent(),
            e2.value,
            n2.infinite
        ),
    )
}

fn c6() -> Verdict {
    let params = GrowthParams { n: 3, p: 1.5, alpha: 1.5 };
    let grid = ConditionGrid::default();
    let ids = [ConditionId::AlmostIncreasing, ConditionId::AlmostDecreasingRatio, ConditionId::Nakai];
    let passes = |phi: &GrowthFunction| ids.iter().all(|id| check_condition(phi, *id, &params, &grid).unwrap().holds);
    let power = GrowthFunction::power(0.75);
    let both = passes(&power) && passes(&GrowthFunction::log_power(0.75));
    let nakai = check_condition(&power, ConditionId::Nakai, &params, &grid).unwrap().constant;
    let nakai_ok = rel(nakai, 2.0 / (1.5 * 0.5)) <= ONE_PERCENT;
    let a2 = check_condition(&GrowthFunction::power(4.0), ConditionId::AlmostDecreasingRatio, &params, &grid).unwrap();
    let fails = !a2.holds && a2.extended_constant >= EXTENSION_FACTOR * a2.constant;
    verdict(
        both && nakai_ok && fails,
        format!(
            "power/log-power pass {both}, Nakai {nakai:.6}, Power(4) a2 {:.3e} -> {:.3e}",
            a2.constant, a2.extended_constant
        ),
    )
}

fn catalog_rows(report: &Value, form: &str) -> Vec<(Value, f64, f64)> {
    report["result"]["forms"][form]["rows"]
        .as_array()
        .map(|rows| {
            rows.iter()
                .map(|r| {
                    let witness: Value =
                        serde_json::from_str(r["report"]["witness"].as_str().unwrap_or("null")).unwrap();
                    (witness, num(&r["report"]["ratio"]), num(&r["translated_ratio"]))
                })
                .collect()
        })
        .unwrap_or_default()
}

fn max_ratio(report: &Value, form: &str) -> f64 {
    num(&report["result"]["forms"][form]["max_ratio"])
}

fn c7(coarse: &Value, fine: &Value) -> Verdict {
    let u = ScalarField::bump(Point::origin(3), 1.0, 2.0).unwrap();
    let v1 = ScalarField::power_at_origin(3, 1.5);
    let norm_exact = (4.0 * PI / 0.75).powf(2.0 / 3.0);
    // ∫(1−|x|²)³|x|^{−3/2} = 2π B(3/4, 4) and ∫|∇u|^{3/2} = 16π B(9/4, 5/2)
    let lhs_oracle = 2.0 * PI * beta(0.75, 4.0);
    let grad_oracle = 16.0 * PI * beta(2.25, 2.5);
    let rep = fefferman_morrey(&u, &v1, 1.5, 1.5, norm_exact, "bump", &QuadOptions::singular()).unwrap();
    let norm = morrey_norm(
        &v1,
        1.5,
        &GrowthFunction::power(0.75),
        &candidate_set(&v1, &[]),
        &default_r_grid(),
        &QuadOptions::singular(),
    )
    .unwrap()
    .value;
    let triple_ok = rel(rep.lhs, lhs_oracle) <= ONE_PERCENT
        && rel(rep.rhs_factors[1].value, grad_oracle) <= ONE_PERCENT
        && rel(norm, norm_exact) <= ONE_PERCENT;

    let rows = catalog_rows(coarse, "morrey");
    let mut spread: f64 = 0.0;
    for power in [2.0, 3.0] {
        let family: Vec<f64> = rows
            .iter()
            .filter(|(w, _, _)| {
                w["kind"] == "bump"
                    && w["power"].as_f64() == Some(power)
                    && w["center"].as_array().is_some_and(|c| c.iter().all(|x| x.as_f64() == Some(0.0)))
            })
            .map(|r| r.1)
            .collect();
        let (lo, hi) = family.iter().fold((f64::INFINITY, 0.0f64), |a, &r| (a.0.min(r), a.1.max(r)));
        if family.len() < 2 {
            spread = f64::INFINITY;
        } else {
            spread = spread.max(hi / lo - 1.0);
        }
    }
    let (m1, m2) = (max_ratio(coarse, "morrey"), max_ratio(fine, "morrey"));
    let stable = rel(m2, m1) <= REFINE_TOL;
    verdict(
        triple_ok && spread <= DILATION_TOL && stable,
        format!(
            "LHS {:.6} (oracle {lhs_oracle:.6}), grad {:.6} (oracle {grad_oracle:.6}), norm {norm:.5}, dilation spread {spread:.1e}, max ratio {m1:.5} -> {m2:.5}",
            rep.lhs, rep.rhs_factors[1].value
        ),
    )
}

fn c8(coarse: &Value, fine: &Value) -> Verdict {
    let mut ok = true;
    let mut detail = Vec::new();
    for form in ["stummel", "oscillation"] {
        let rows = catalog_rows(coarse, form);
        let finite = !rows.is_empty() && rows.iter().all(|r| r.1.is_finite());
        let drift = rows.iter().filter(|r| r.1 != 0.0).map(|r| rel(r.2, r.1)).fold(0.0, f64::max);
        let (m1, m2) = (max_ratio(coarse, form), max_ratio(fine, form));
        ok &= finite && drift <= TRANSLATION_TOL && rel(m2, m1) <= REFINE_TOL;
        detail.push(format!("{form}: finite {finite}, drift {drift:.1e}, max {m1:.5} -> {m2:.5}"));
    }
    verdict(ok, detail.join("; "))
}

fn c9(dir: &Path) -> Verdict {
    let (c1, a) = hg(&["kernel-lemma", "--alpha", "2"], &dir.join("k1"), None);
    let (c2, b) = hg(&["kernel-lemma", "--alpha", "2", "--grid-refine", "2"], &dir.join("k2"), None);
    let (k1, k2) = (num(&a["result"]["constant"]), num(&b["result"]["constant"]));
    let bound = PI.powi(3) * (1.0 + KERNEL_SLACK);
    verdict(
        c1 == 0 && c2 == 0 && k1 <= bound && k2 <= bound && rel(k2, k1) <= REFINE_TOL,
        format!("max normalized product {k1:.5} -> {k2:.5} (bound {:.5})", PI.powi(3)),
    )
}

fn c10(dir: &Path) -> Verdict {
    let (c1, a) = hg(&["maximal"], &dir.join("m1"), None);
    let (c2, b) = hg(&["maximal", "--grid-refine", "2"], &dir.join("m2"), None);
    let lower_ok = [&a, &b].iter().all(|r| {
        let m = &r["result"]["maximal"];
        let values = m["values"].as_array().cloned().unwrap_or_default();
        let pts = m["points"].as_array().cloned().unwrap_or_default();
        let f = ScalarField::power_at_origin(3, 1.5);
        !values.is_empty()
            && values.iter().zip(&pts).all(|(v, p)| {
                let x: Vec<f64> = p.as_array().unwrap().iter().map(|c| c.as_f64().unwrap()).collect();
                num(v) >= f.value(&x) * (1.0 - MAXIMAL_TOL)
            })
    });
    let (a1, a2) = (num(&a["result"]["a1_literal"]["constant"]), num(&b["result"]["a1_literal"]["constant"]));
    let (r1, r2) = (num(&a["result"]["morrey_bound"]["ratio"]), num(&b["result"]["morrey_bound"]["ratio"]));
    let ok = c1 == 0
        && c2 == 0
        && lower_ok
        && a1.is_finite()
        && rel(a2, a1) <= REFINE_TOL
        && r1.is_finite()
        && rel(r2, r1) <= REFINE_TOL;
    verdict(ok, format!("M >= |f| {lower_ok}, A1 {a1:.5} -> {a2:.5}, ||MV1||/||V1|| {r1:.5} -> {r2:.5}"))
}

fn c11() -> Verdict {
    let deltas = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
    let sampler = SubballSampler { lattice: 3, radii: 8, min_fraction: 1e-2 };
    let scan = cx::bmo_blowup_scan(3, &deltas, &sampler, &QuadOptions::default()).unwrap();
    let increasing = scan.windows(2).all(|w| w[1].seminorm > w[0].seminorm);
    let d = cx::doubling_scan(3, &[0.2, 0.1, 0.05], &QuadOptions::with_tol(1e-10)).unwrap();
    let grows = d.windows(2).all(|w| w[1].ratio >= DOUBLING_GROWTH * w[0].ratio);
    let exact = d.iter().all(|s| rel(s.ratio, s.exact) <= DOUBLING_REL);
    verdict(
        increasing && grows && exact,
        format!(
            "seminorms {:?}, doubling {:?}",
            scan.iter().map(|s| format!("{:.4}", s.seminorm)).collect::<Vec<_>>(),
            d.iter().map(|s| format!("{:.4e}", s.ratio)).collect::<Vec<_>>()
        ),
    )
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_some_and(|x| x == "csv"))
        .map(|e| (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap()))
        .collect();
    out.sort();
    out
}

fn c12(dir: &Path) -> Verdict {
    let (a, _) = hg(&["counterexample"], &dir.join("c1"), None);
    let (b, _) = hg(&["counterexample"], &dir.join("c2"), None);
    let (x, y) = (csv_files(&dir.join("c1")), csv_files(&dir.join("c2")));
    verdict(a == b && !x.is_empty() && x == y, format!("{} CSV files compared, exit codes {a}/{b}", x.len()))
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let setup = Instant::now();
    let (_, coarse) = hg(&["fefferman"], &d.join("f1"), None);
    let (_, fine) = hg(&["fefferman", "--grid-refine", "2"], &d.join("f2"), None);
    // the shared catalog runs count against both catalog criteria
    let catalog_time = setup.elapsed();

    type Check<'a> = Box<dyn Fn() -> Verdict + 'a>;
    let criteria: Vec<(u32, &str, Duration, Check)> = vec![
        (1, "counterexample PDE identity", Duration::from_secs(1), Box::new(c1)),
        (2, "mass formula", Duration::from_secs(10), Box::new(c2)),
        (3, "vanishing of infinite order", Duration::from_secs(30), Box::new(c3)),
        (4, "Stummel classification of V", Duration::from_secs(120), Box::new(c4)),
        (5, "V1/V2 independence", Duration::from_secs(120), Box::new(c5)),
        (6, "growth-function conditions", Duration::from_secs(30), Box::new(c6)),
        (7, "Fefferman Morrey form", Duration::from_secs(300), Box::new(|| c7(&coarse, &fine))),
        (8, "Fefferman Stummel and oscillation forms", Duration::from_secs(300), Box::new(|| c8(&coarse, &fine))),
        (9, "kernel lemma", Duration::from_secs(180), Box::new(|| c9(d))),
        (10, "maximal suite", Duration::from_secs(300), Box::new(|| c10(d))),
        (11, "BMO blow-up and doubling", Duration::from_secs(120), Box::new(c11)),
        (12, "determinism", Duration::from_secs(300), Box::new(|| c12(d))),
    ];
    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let v = check();
        let elapsed = start.elapsed() + if id == 7 || id == 8 { catalog_time } else { Duration::ZERO };
        let ok = v.ok && elapsed <= budget;
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {id:>2} ({name}): {} [{:.2}s of {}s]",
            if ok { "PASS" } else { "FAIL" },
            v.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

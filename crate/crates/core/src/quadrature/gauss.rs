//! One-dimensional Gauss–Kronrod building blocks.

/// Kronrod abscissae of the 15-point rule on [−1, 1], descending; the last is 0.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_82,
];

/// 7-point Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_64, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

pub const NODES_PER_RULE: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_segments: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions { rel_tol: 1e-10, abs_tol: 0.0, max_segments: 200 }
    }
}

/// Result of a (vector-valued) adaptive integration.
#[derive(Debug, Clone, PartialEq)]
pub struct VecIntegral {
    pub values: Vec<f64>,
    /// ∫ Σ_k |f_k|, the scale that relative tolerances refer to.
    pub abs_total: f64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
struct Segment {
    a: f64,
    b: f64,
    values: Vec<f64>,
    abs: f64,
    errors: Vec<f64>,
}

impl Segment {
    fn error(&self) -> f64 {
        self.errors.iter().sum()
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// Applies the 15-point Kronrod rule (with the embedded 7-point Gauss rule as
/// error estimate) to every component of `f` on [a, b].
fn kronrod_segment<F>(f: &mut F, dim: usize, a: f64, b: f64, scratch: &mut [Vec<f64>]) -> Segment
where
    F: FnMut(f64, &mut [f64]),
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    // scratch[0] = center, scratch[2j+1], scratch[2j+2] = ± node j
    f(center, &mut scratch[0]);
    for j in 0..7 {
        let dx = half * XGK[j];
        f(center - dx, &mut scratch[2 * j + 1]);
        f(center + dx, &mut scratch[2 * j + 2]);
    }
    let mut values = vec![0.0; dim];
    let mut errors = vec![0.0; dim];
    let mut abs_total = 0.0;
    for k in 0..dim {
        let fc = scratch[0][k];
        let mut kron = WGK[7] * fc;
        let mut gauss = WG[3] * fc;
        let mut res_abs = WGK[7] * fc.abs();
        for j in 0..7 {
            let (m, p) = (scratch[2 * j + 1][k], scratch[2 * j + 2][k]);
            kron += WGK[j] * (m + p);
            res_abs += WGK[j] * (m.abs() + p.abs());
            if j % 2 == 1 {
                gauss += WG[j / 2] * (m + p);
            }
        }
        let mean = 0.5 * kron;
        let mut res_asc = WGK[7] * (fc - mean).abs();
        for j in 0..7 {
            res_asc += WGK[j] * ((scratch[2 * j + 1][k] - mean).abs() + (scratch[2 * j + 2][k] - mean).abs());
        }
        let h = half.abs();
        values[k] = kron * half;
        errors[k] = rescale_error((kron - gauss) * half, res_abs * h, res_asc * h);
        abs_total += res_abs * h;
    }
    Segment { a, b, values, abs: abs_total, errors }
}

/// Globally adaptive vector-valued Gauss–Kronrod integration on [a, b].
///
/// `f(x, out)` must fill `out` (length `dim`). The interval is first split at
/// the interior `breakpoints`; the segment with the largest summed error is
/// bisected until Σ error ≤ max(abs_tol, rel_tol · ∫Σ|f_k|) or the segment
/// budget is exhausted. Selection order is deterministic.
pub fn adaptive_vec<F>(mut f: F, dim: usize, a: f64, b: f64, breakpoints: &[f64], opts: &AdaptiveOptions) -> VecIntegral
where
    F: FnMut(f64, &mut [f64]),
{
    if !(b > a) {
        return VecIntegral { values: vec![0.0; dim], abs_total: 0.0, error: 0.0, evaluations: 0, converged: true };
    }
    let mut scratch = vec![vec![0.0; dim]; NODES_PER_RULE];
    let mut cuts = vec![a];
    let mut interior: Vec<f64> = breakpoints.iter().copied().filter(|&x| x > a && x < b).collect();
    interior.sort_by(f64::total_cmp);
    interior.dedup();
    cuts.extend(interior);
    cuts.push(b);

    let mut segments: Vec<Segment> =
        cuts.windows(2).map(|w| kronrod_segment(&mut f, dim, w[0], w[1], &mut scratch)).collect();
    let mut evaluations = segments.len() * NODES_PER_RULE;

    loop {
        let abs_total: f64 = segments.iter().map(|s| s.abs).sum();
        let error: f64 = segments.iter().map(Segment::error).sum();
        let target = opts.abs_tol.max(opts.rel_tol * abs_total);
        let converged = error <= target;
        if converged || segments.len() >= opts.max_segments {
            let mut values = vec![0.0; dim];
            for s in &segments {
                for (v, x) in values.iter_mut().zip(&s.values) {
                    *v += x;
                }
            }
            return VecIntegral { values, abs_total, error, evaluations, converged };
        }
        let (worst, _) = segments.iter().enumerate().fold((0, f64::NEG_INFINITY), |(bi, be), (i, s)| {
            let e = s.error();
            if e > be {
                (i, e)
            } else {
                (bi, be)
            }
        });
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if !(mid > seg.a && mid < seg.b) {
            // interval exhausted at machine resolution
            segments.push(Segment { errors: vec![0.0; dim], ..seg });
            continue;
        }
        segments.push(kronrod_segment(&mut f, dim, seg.a, mid, &mut scratch));
        segments.push(kronrod_segment(&mut f, dim, mid, seg.b, &mut scratch));
        evaluations += 2 * NODES_PER_RULE;
    }
}

/// Scalar convenience wrapper around [`adaptive_vec`].
pub fn adaptive<F>(mut f: F, a: f64, b: f64, breakpoints: &[f64], opts: &AdaptiveOptions) -> VecIntegral
where
    F: FnMut(f64) -> f64,
{
    adaptive_vec(|x, out: &mut [f64]| out[0] = f(x), 1, a, b, breakpoints, opts)
}

const PERIODIC_START: usize = 16;
const PERIODIC_MAX: usize = 2048;

/// Trapezoid rule on one period [0, period) of a smooth periodic `f`,
/// doubling the node count (reusing old nodes) until successive sums agree
/// to `rel_tol · ∫Σ|f_k|`.
pub fn periodic_trapezoid_vec<F>(mut f: F, dim: usize, period: f64, rel_tol: f64) -> VecIntegral
where
    F: FnMut(f64, &mut [f64]),
{
    let mut buf = vec![0.0; dim];
    let mut sums = vec![0.0; dim];
    let mut abs_sum = 0.0;
    let mut add = |x: f64, sums: &mut [f64], abs_sum: &mut f64| {
        f(x, &mut buf);
        for (s, v) in sums.iter_mut().zip(&buf) {
            *s += v;
            *abs_sum += v.abs();
        }
    };
    let mut m = PERIODIC_START;
    for j in 0..m {
        add(period * j as f64 / m as f64, &mut sums, &mut abs_sum);
    }
    let mut evaluations = m;
    loop {
        let h = period / m as f64;
        let prev: Vec<f64> = sums.iter().map(|s| s * h).collect();
        let m2 = 2 * m;
        for j in 0..m {
            add(period * (2 * j + 1) as f64 / m2 as f64, &mut sums, &mut abs_sum);
        }
        evaluations += m;
        m = m2;
        let h = period / m as f64;
        let values: Vec<f64> = sums.iter().map(|s| s * h).collect();
        let abs_total = abs_sum * h;
        let error: f64 = values.iter().zip(&prev).map(|(a, b)| (a - b).abs()).sum();
        let converged = error <= rel_tol * abs_total;
        if converged || m >= PERIODIC_MAX {
            return VecIntegral { values, abs_total, error, evaluations, converged };
        }
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1] (Newton iteration on P_m).
pub fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

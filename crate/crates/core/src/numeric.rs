//! Small numerical kernels shared by the analytic modules: harmonic numbers,
//! golden-section minimization and adaptive Gauss-Kronrod quadrature.

/// `H(k) = 1 + 1/2 + ... + 1/k`, with `H(0) = 0`.
pub fn harmonic(k: usize) -> f64 {
    // Summed smallest-first for a few extra bits at large k.
    (1..=k).rev().map(|i| 1.0 / i as f64).sum()
}

/// Result of a one-dimensional minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `rel_tol * max(|x|, 1e-12)`.
/// Non-finite objective values are treated as `+inf`, so the search backs
/// away from domain edges where the objective blows up.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, rel_tol: f64) -> Minimum
where
    F: FnMut(f64) -> f64,
{
    let mut eval = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c);
    let mut fd = eval(d);
    let mut iterations = 0;
    while (b - a) > rel_tol * c.abs().max(d.abs()).max(1e-12) && iterations < 500 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d);
        }
        iterations += 1;
    }
    let (x, value) = if fc <= fd { (c, fc) } else { (d, fd) };
    Minimum {
        x,
        value,
        iterations,
    }
}

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss weights.
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
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss-Kronrod (G7/K15) integration of `f` over `[a, b]` to an
/// absolute tolerance.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64) -> f64 {
    let mut stack = vec![(a, b, abs_tol, 0u32)];
    let mut total = 0.0;
    while let Some((lo, hi, tol, depth)) = stack.pop() {
        let (value, err) = kronrod15(&mut f, lo, hi);
        if !value.is_finite() {
            return value;
        }
        if err <= tol.max(1e-13 * value.abs()) || depth >= 30 {
            total += value;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, 0.5 * tol, depth + 1));
            stack.push((mid, hi, 0.5 * tol, depth + 1));
        }
    }
    total
}

/// Integrates `exp(g(u))` over `[0, inf)` for a log-integrand `g` that is
/// eventually decreasing. The upper limit is grown until the remaining tail
/// mass is below `tail_tol`, then the finite range is integrated adaptively.
///
/// Returns `None` when no such cut-off exists (the integral diverges or the
/// tail decays too slowly to certify).
pub(crate) fn integrate_exp_tail<G: Fn(f64) -> f64>(
    g: G,
    abs_tol: f64,
    tail_tol: f64,
) -> Option<f64> {
    let mut upper = 1.0;
    loop {
        let gu = g(upper);
        let h = 1e-6 * upper;
        let slope = (g(upper + h) - g(upper - h)) / (2.0 * h);
        if gu.is_finite() && slope < 0.0 {
            let tail = gu.exp() / slope.abs().min(1.0);
            if tail < tail_tol {
                break;
            }
        }
        upper *= 2.0;
        if upper > 1e7 {
            return None;
        }
    }
    // Split at powers of two so the adaptive rule sees the bulk near 0.
    let mut total = 0.0;
    let mut lo = 0.0;
    let mut hi = 1.0_f64.min(upper);
    loop {
        total += integrate(|u| g(u).exp(), lo, hi, abs_tol);
        if !total.is_finite() {
            return None;
        }
        if hi >= upper {
            break;
        }
        lo = hi;
        hi = (2.0 * hi).min(upper);
    }
    Some(total)
}

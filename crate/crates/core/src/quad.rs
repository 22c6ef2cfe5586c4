//! Quadrature and root-finding kernels shared by the bath and memory modules.

use num_complex::Complex64 as C64;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Values that can be integrated: real or complex.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

// Gauss-Kronrod 10/21 abscissae and weights.
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525478498,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

fn gk21<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[10];
    let mut resg = T::zero();
    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        let s = f1 + f2;
        resk = resk + s * WGK[j];
        if j % 2 == 1 {
            resg = resg + s * WG[j / 2];
        }
    }
    let k = resk * half;
    let g = resg * half;
    (k, (k - g).magnitude())
}

/// Adaptive Gauss-Kronrod quadrature options.
#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 4000 }
    }
}

/// Globally adaptive quadrature over [a, b], subdividing first at the given
/// interior break points. Returns (integral, error estimate).
pub fn integrate<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: QuadOptions,
) -> Result<(T, f64)> {
    if a == b {
        return Ok((T::zero(), 0.0));
    }
    let sign = if a < b { 1.0 } else { -1.0 };
    let (total, err, _) = adaptive(&f, a.min(b), a.max(b), breaks, opts)?;
    Ok((total * sign, err))
}

/// Final partition produced by adaptive refinement of the integral of `f`.
pub fn adaptive_intervals<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: QuadOptions,
) -> Result<Vec<(f64, f64)>> {
    let (_, _, iv) = adaptive(&f, a, b, breaks, opts)?;
    let mut out: Vec<(f64, f64)> = iv.into_iter().map(|(x, y, _, _)| (x, y)).collect();
    out.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(out)
}

type Interval<T> = (f64, f64, T, f64);

fn adaptive<T: QuadValue, F: Fn(f64) -> T>(
    f: &F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    opts: QuadOptions,
) -> Result<(T, f64, Vec<Interval<T>>)> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidArgument("integration bounds must be finite".into()));
    }
    let mut pts = vec![lo];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > lo && x < hi).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    pts.extend(inner);
    pts.push(hi);

    let mut intervals: Vec<Interval<T>> = Vec::new();
    for w in pts.windows(2) {
        let (v, e) = gk21(f, w[0], w[1]);
        intervals.push((w[0], w[1], v, e));
    }
    loop {
        let total = intervals.iter().fold(T::zero(), |acc, iv| acc + iv.2);
        let err: f64 = intervals.iter().map(|iv| iv.3).sum();
        let tol = opts.abs_tol.max(opts.rel_tol * total.magnitude());
        if err <= tol {
            return Ok((total, err, intervals));
        }
        if intervals.len() >= opts.max_intervals {
            return Err(Error::Quadrature {
                context: format!("adaptive quadrature on [{lo}, {hi}]"),
                error: err,
            });
        }
        let (k, _) = intervals
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, iv)| if iv.3 > best.1 { (i, iv.3) } else { best });
        let (a0, b0, _, _) = intervals[k];
        let mid = 0.5 * (a0 + b0);
        if mid <= a0 || mid >= b0 {
            // Interval cannot be split further in floating point.
            intervals[k].3 = 0.0;
            continue;
        }
        let (v1, e1) = gk21(f, a0, mid);
        let (v2, e2) = gk21(f, mid, b0);
        intervals[k] = (a0, mid, v1, e1);
        intervals.push((mid, b0, v2, e2));
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / dp;
            if (z - z1).abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Brent's method on a bracketing interval.
pub fn brent<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::RootFinding(format!("no sign change on [{a}, {b}]")));
    }
    let mut cpt = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            cpt = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = cpt;
            cpt = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (cpt - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == cpt {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Err(Error::RootFinding("Brent iteration limit".into()))
}

/// Composite trapezoid of uniformly spaced samples.
pub fn trapezoid(values: &[f64], dx: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => dx * (0.5 * (values[0] + values[n - 1]) + values[1..n - 1].iter().sum::<f64>()),
    }
}

/// Exponential integral Ei(x) for real x != 0 (principal value for x > 0).
pub fn expint_ei(x: f64) -> f64 {
    const EULER: f64 = 0.577_215_664_901_532_9;
    if x == 0.0 {
        return f64::NEG_INFINITY;
    }
    let ax = x.abs();
    if ax < 40.0 && (x > 0.0 || ax < 2.0) {
        // Power series, convergent everywhere; used where cancellation is mild.
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..400 {
            term *= x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        EULER + ax.ln() + sum
    } else if x > 0.0 {
        // Asymptotic expansion.
        let mut sum = 1.0;
        let mut term = 1.0;
        for k in 1..60 {
            let next = term * k as f64 / x;
            if next.abs() > term.abs() {
                break;
            }
            term = next;
            sum += term;
            if term.abs() < 1e-17 {
                break;
            }
        }
        x.exp() / x * sum
    } else {
        // Ei(-a) = -E1(a), continued fraction for E1.
        let a = ax;
        let mut b = a + 1.0;
        let mut cc = 1.0 / f64::MIN_POSITIVE;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..300 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            cc = b + an / cc;
            let del = cc * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        -h * (-a).exp()
    }
}

/// Gamma function for positive arguments (Lanczos approximation).
pub fn gamma_fn(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma_fn(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = COEF[0];
        let t = x + G + 0.5;
        for (i, &cf) in COEF.iter().enumerate().skip(1) {
            a += cf / (x + i as f64);
        }
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_polynomial_and_breaks() {
        let (v, _) = integrate(|x: f64| x * x, 0.0, 3.0, &[1.0], QuadOptions::default()).unwrap();
        assert!((v - 9.0).abs() < 1e-13);
        let (v, _) = integrate(|x: f64| x.abs(), -1.0, 2.0, &[0.0], QuadOptions::default()).unwrap();
        assert!((v - 2.5).abs() < 1e-13);
    }

    #[test]
    fn gauss_legendre_exactness() {
        let (x, w) = gauss_legendre(12);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(22)).sum();
        assert!((s - 2.0 / 23.0).abs() < 1e-14);
    }

    #[test]
    fn brent_root() {
        let r = brent(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn ei_reference_values() {
        // Reference values of Ei.
        assert!((expint_ei(0.7) - 1.064_907_194_624_29).abs() < 1e-12);
        assert!((expint_ei(-2.5) + 0.024_914_917_870_269_7).abs() < 1e-14);
        assert!((expint_ei(-30.0) / -3.021_552_010_688_81e-15 - 1.0).abs() < 1e-11);
        assert!((expint_ei(5.0) - 40.185_275_355_803_18).abs() < 1e-10);
        assert!((expint_ei(-1.0) + 0.219_383_934_395_520_3).abs() < 1e-13);
        assert!((expint_ei(50.0) / 1.058_563_689_713_169e20 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_values() {
        assert!((gamma_fn(1.5) - 0.886_226_925_452_758).abs() < 1e-13);
        assert!((gamma_fn(5.0) - 24.0).abs() < 1e-11);
    }
}

//! Dormand-Prince 5(4) integrator for complex vector ODEs.

use crate::error::{Error, Result};
use crate::C64;

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-14, max_steps: 5_000_000 }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the 5th- and embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy(out: &mut [C64], y: &[C64], h: f64, terms: &[(f64, &[C64])]) {
    for i in 0..y.len() {
        let mut s = C64::new(0.0, 0.0);
        for (c, k) in terms {
            s += k[i] * *c;
        }
        out[i] = y[i] + s * h;
    }
}

/// Integrate `y' = f(t, y)` from `t0` and return the state at each of
/// `out_times` (ascending, all ≥ `t0`).
pub fn dopri5<F>(mut f: F, t0: f64, y0: &[C64], out_times: &[f64], opts: OdeOptions) -> Result<Vec<Vec<C64>>>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    if out_times.windows(2).any(|w| w[1] < w[0]) || out_times.first().is_some_and(|&t| t < t0) {
        return Err(Error::InvalidArgument("output times must be ascending and >= t0".into()));
    }
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut k1 = vec![C64::new(0.0, 0.0); n];
    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
        (k1.clone(), k1.clone(), k1.clone(), k1.clone(), k1.clone(), k1.clone());
    let mut tmp = k1.clone();
    let mut ynew = k1.clone();
    f(t, &y, &mut k1);

    let scale0: f64 = y.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    let dnorm: f64 = k1.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut h = if dnorm > 0.0 { 0.01 * scale0 / dnorm } else { 1e-3 };
    let span = out_times.last().map_or(0.0, |&tl| tl - t0);
    if span > 0.0 {
        h = h.min(span);
    } else {
        h = h.max(1e-12);
    }

    let mut out = Vec::with_capacity(out_times.len());
    let mut steps = 0usize;
    for &target in out_times {
        while t < target {
            if steps >= opts.max_steps {
                return Err(Error::StepSize(format!("exceeded {} steps before t = {target}", opts.max_steps)));
            }
            steps += 1;
            let last = h >= target - t;
            let hs = if last { target - t } else { h };
            axpy(&mut tmp, &y, hs, &[(A21, &k1)]);
            f(t + C2 * hs, &tmp, &mut k2);
            axpy(&mut tmp, &y, hs, &[(A31, &k1), (A32, &k2)]);
            f(t + C3 * hs, &tmp, &mut k3);
            axpy(&mut tmp, &y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
            f(t + C4 * hs, &tmp, &mut k4);
            axpy(&mut tmp, &y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
            f(t + C5 * hs, &tmp, &mut k5);
            axpy(&mut tmp, &y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
            f(t + hs, &tmp, &mut k6);
            axpy(&mut ynew, &y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            f(t + hs, &ynew, &mut k7);

            let mut err = 0.0;
            for i in 0..n {
                let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * hs;
                let sc = opts.atol + opts.rtol * y[i].norm().max(ynew[i].norm());
                err += (e.norm() / sc).powi(2);
            }
            let err = (err / n.max(1) as f64).sqrt();
            if !err.is_finite() {
                return Err(Error::StepSize(format!("non-finite error estimate at t = {t}")));
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                t = if last { target } else { t + hs };
                std::mem::swap(&mut y, &mut ynew);
                std::mem::swap(&mut k1, &mut k7);
                if !last || fac < 1.0 {
                    h = hs * fac;
                }
            } else {
                h = hs * fac.min(1.0);
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::StepSize(format!("step size underflow at t = {t}")));
                }
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

//! Least-squares fits used by the case studies.

#[derive(Clone, Copy, Debug)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub rms: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    LinearFit { slope, intercept, rms: (ss / n).sqrt() }
}

/// Coefficient `a` of `y ≈ a t² + b t⁴`.
pub fn quadratic_onset(ts: &[f64], ys: &[f64]) -> f64 {
    let (mut s22, mut s24, mut s44, mut s2y, mut s4y) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (t, y) in ts.iter().zip(ys) {
        let (x2, x4) = (t * t, t.powi(4));
        s22 += x2 * x2;
        s24 += x2 * x4;
        s44 += x4 * x4;
        s2y += x2 * y;
        s4y += x4 * y;
    }
    (s2y * s44 - s4y * s24) / (s22 * s44 - s24 * s24)
}

/// Single-exponential fit `y ≈ A e^{−γt}` on `ln y`, for samples with `y > floor`.
/// Returns `(γ, A, rms of the log residual)`.
pub fn exponential_fit(ts: &[f64], ys: &[f64], floor: f64) -> Option<(f64, f64, f64)> {
    let (xs, ls): (Vec<f64>, Vec<f64>) =
        ts.iter().zip(ys).filter(|(_, y)| **y > floor).map(|(t, y)| (*t, y.ln())).unzip();
    if xs.len() < 3 {
        return None;
    }
    let fit = linear_fit(&xs, &ls);
    Some((-fit.slope, fit.intercept.exp(), fit.rms))
}

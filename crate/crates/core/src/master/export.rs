//! CSV and JSON export of trajectories and generators.

use serde_json::json;
use std::fmt::Write;

use super::{GeneratorMatrix, Trajectory};

/// Shortest round-trip decimal representation, switching to exponent form
/// for very large or small magnitudes.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Header `t, re(rho_ij)…, im(rho_ij)…, min_eig`, elements in row-major order.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let d = traj.states.first().map_or(0, |s| s.dim());
    let mut out = String::from("t");
    for part in ["re", "im"] {
        for i in 0..d {
            for j in 0..d {
                let _ = write!(out, ",{part}(rho_{i}{j})");
            }
        }
    }
    out.push_str(",min_eig\n");
    for ((t, s), p) in traj.times.iter().zip(&traj.states).zip(&traj.positivity_min) {
        out.push_str(&format_float(*t));
        let m = s.matrix();
        for i in 0..d {
            for j in 0..d {
                let _ = write!(out, ",{}", format_float(m[(i, j)].re));
            }
        }
        for i in 0..d {
            for j in 0..d {
                let _ = write!(out, ",{}", format_float(m[(i, j)].im));
            }
        }
        let _ = writeln!(out, ",{}", format_float(*p));
    }
    out
}

/// Structured dump: dims, kind and `[re, im]` entries in row-major order of
/// the d²×d² matrix acting on column-stacked ρ.
pub fn generator_json(g: &GeneratorMatrix) -> serde_json::Value {
    let n = g.matrix.nrows();
    let entries: Vec<[f64; 2]> = (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .map(|(r, c)| [g.matrix[(r, c)].re, g.matrix[(r, c)].im])
        .collect();
    json!({
        "dim": g.dim,
        "rows": n,
        "cols": n,
        "kind": g.kind,
        "vectorization": "column-stacked: vec(rho)[i + d*j] = rho[i][j]",
        "entry_order": "row-major over the superoperator, each entry [re, im]",
        "entries": entries,
    })
}

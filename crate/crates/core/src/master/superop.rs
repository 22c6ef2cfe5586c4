//! In-place accumulation of column-stacked superoperators.
//!
//! With `vec(ρ)[i + d j] = ρ_ij`, `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`.

use crate::qops::CMat;
use crate::C64;

/// `out += coef · (Bᵀ ⊗ A)`, the map `X ↦ coef·A X B`.
pub fn add_sandwich(out: &mut CMat, a: &CMat, b: &CMat, coef: C64) {
    let d = a.nrows();
    for l in 0..d {
        for j in 0..d {
            let blj = b[(l, j)] * coef;
            if blj == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..d {
                let col = k + d * l;
                for i in 0..d {
                    let aik = a[(i, k)];
                    if aik != C64::new(0.0, 0.0) {
                        out[(i + d * j, col)] += aik * blj;
                    }
                }
            }
        }
    }
}

/// `out += coef · (I ⊗ A)`, the map `X ↦ coef·A X`.
pub fn add_left(out: &mut CMat, a: &CMat, coef: C64) {
    let d = a.nrows();
    for j in 0..d {
        for k in 0..d {
            for i in 0..d {
                let v = a[(i, k)];
                if v != C64::new(0.0, 0.0) {
                    out[(i + d * j, k + d * j)] += v * coef;
                }
            }
        }
    }
}

/// `out += coef · (Bᵀ ⊗ I)`, the map `X ↦ coef·X B`.
pub fn add_right(out: &mut CMat, b: &CMat, coef: C64) {
    let d = b.nrows();
    for l in 0..d {
        for j in 0..d {
            let v = b[(l, j)];
            if v != C64::new(0.0, 0.0) {
                for i in 0..d {
                    out[(i + d * j, i + d * l)] += v * coef;
                }
            }
        }
    }
}

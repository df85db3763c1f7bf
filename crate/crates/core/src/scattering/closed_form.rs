//! Closed-form resonant scattering matrices used as independent oracles.

use crate::linalg::{pauli, RealMat};

fn assemble(blocks: [[RealMat; 3]; 3]) -> RealMat {
    let mut s = RealMat::zeros(6, 6);
    for (r, row) in blocks.iter().enumerate() {
        for (c, b) in row.iter().enumerate() {
            s.set_block(2 * r, 2 * c, b);
        }
    }
    s
}

/// Lossless loop at `ω = 0` with `C12 = C23 = c`, `C13 = 1` and equal decay rates.
///
/// The `(1 ± sin φ)` prefactors are multiplied through so the expression
/// stays finite at `φ = ∓π/2`.
pub fn symmetric_matched(c: f64, phi: f64) -> RealMat {
    let (s, co) = phi.sin_cos();
    let rc = c.sqrt();
    let (i, x, z, j) = (pauli::id2(), pauli::x(), pauli::z(), pauli::j());
    let d = (1.0 - c).powi(2) + c * c * co * co;

    let f = &i.scale(c * c * co) - &j.scale((1.0 - c) * c);
    let f_bar = &i.scale(c * c * co) + &j.scale(2.0 * c);
    let b_plus = &z.scale(rc * co * (1.0 + c * s)) - &x.scale(rc * (2.0 * c - c * s - 1.0) * (1.0 + s));
    let b_minus =
        &z.scale(-rc * co * (1.0 - c * s)) - &x.scale(rc * (2.0 * c + c * s - 1.0) * (1.0 - s));
    let a = |s: f64, co: f64| {
        &i.scale(c * c * co * (1.0 + s))
            + &j.scale(-c * c * co * co - (1.0 - c) * (1.0 + c * s))
    };
    let c_blk = &z.scale(-rc * (1.0 + s) * (1.0 - c * s)) + &x.scale(rc * co * (1.0 - 2.0 * c - c * s));
    let c_bar = &z.scale(rc * (1.0 - s) * (1.0 + c * s)) + &x.scale(rc * co * (1.0 - 2.0 * c + c * s));

    let diag_outer = f.scale(co);
    let diag_mid = &i.scale(-(1.0 - c * c)) + &f_bar.scale(co);
    assemble([
        [diag_outer.clone(), b_plus, a(s, co)],
        [b_minus, diag_mid, c_blk],
        [a(-s, co), c_bar, diag_outer],
    ])
    .scale(1.0 / d)
}

/// Symmetric matched loop at `φ = +π/2`: thermal noise of mode 1 routed to mode 3.
pub fn rerouting_point(c: f64) -> RealMat {
    let ch = (1.0 + c) / (1.0 - c);
    let sh = 2.0 * c.sqrt() / (1.0 - c);
    let zero = RealMat::zeros(2, 2);
    assemble([
        [zero.clone(), pauli::x().scale(sh), pauli::j().scale(-ch)],
        [zero.clone(), pauli::id2().scale(-ch), pauli::z().scale(-sh)],
        [pauli::j().scale(-1.0), zero.clone(), zero],
    ])
}

/// Resonant two-mode squeezer scattering matrix for `c < 1`.
pub fn tms(c: f64) -> RealMat {
    let ch = (1.0 + c) / (1.0 - c);
    let sh = 2.0 * c.sqrt() / (1.0 - c);
    let mut s = RealMat::zeros(4, 4);
    s.set_block(0, 0, &pauli::id2().scale(-ch));
    s.set_block(2, 2, &pauli::id2().scale(-ch));
    s.set_block(0, 2, &pauli::z().scale(-sh));
    s.set_block(2, 0, &pauli::z().scale(-sh));
    s
}

//! Associated Laguerre polynomials and factorial helpers.

use num_complex::Complex64;

use crate::error::{Result, SpdcError};

/// Largest supported polynomial degree.
pub const MAX_LAGUERRE_DEGREE: u32 = 200;
/// Largest supported polynomial order.
pub const MAX_LAGUERRE_ORDER: u32 = 200;

const LN_FACTORIAL_LEN: usize = 2048;

fn ln_factorial_table() -> &'static [f64] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACTORIAL_LEN);
        t.push(0.0);
        let mut acc = 0.0f64;
        for n in 1..LN_FACTORIAL_LEN {
            acc += (n as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln(n!)`.
///
/// # Panics
/// Panics for `n >= 2048`; callers bound their indices well below this.
pub fn ln_factorial(n: u32) -> f64 {
    ln_factorial_table()[n as usize]
}

/// `n!` as `f64`; infinite for `n > 170`.
pub fn factorial(n: u32) -> f64 {
    if n <= 170 {
        ln_factorial(n).exp().round_ties_even()
    } else {
        f64::INFINITY
    }
}

/// Associated Laguerre polynomial `L_p^alpha(x)` by the upward three-term
/// recurrence `(p+1) L_{p+1} = (2p + 1 + alpha - x) L_p - (p + alpha) L_{p-1}`,
/// which is stable for the nonnegative integer orders used here.
pub fn laguerre(p: u32, alpha: u32, x: f64) -> Result<f64> {
    if p > MAX_LAGUERRE_DEGREE {
        return Err(SpdcError::Range(format!(
            "laguerre degree p={p} exceeds supported maximum {MAX_LAGUERRE_DEGREE}"
        )));
    }
    if alpha > MAX_LAGUERRE_ORDER {
        return Err(SpdcError::Range(format!(
            "laguerre order alpha={alpha} exceeds supported maximum {MAX_LAGUERRE_ORDER}"
        )));
    }
    if !x.is_finite() {
        return Err(SpdcError::Domain(format!("laguerre argument must be finite, got {x}")));
    }
    Ok(laguerre_unchecked(p, alpha, x))
}

pub(crate) fn laguerre_unchecked(p: u32, alpha: u32, x: f64) -> f64 {
    let a = alpha as f64;
    if p == 0 {
        return 1.0;
    }
    let mut lm1 = 1.0; // L_0
    let mut l = 1.0 + a - x; // L_1
    for k in 1..p {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * l - (kf + a) * lm1) / (kf + 1.0);
        lm1 = l;
        l = next;
    }
    l
}

/// Fills `out[p]` with `L_p^alpha(x)` for `p = 0..out.len()` in one upward
/// sweep; used to tabulate radial profiles for a whole block of radial
/// indices at once.
pub(crate) fn laguerre_sequence(alpha: u32, x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let a = alpha as f64;
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = 1.0 + a - x;
    for k in 1..out.len() - 1 {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + 1.0 + a - x) * out[k] - (kf + a) * out[k - 1]) / (kf + 1.0);
    }
}

/// The constant phase `exp(i (p - |l|/2) pi)` carried by each LG mode,
/// evaluated exactly: `(-1)^p (-i)^{|l|}`.
pub(crate) fn lg_phase_const(l: i32, p: u32) -> Complex64 {
    let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
    let quarter = match l.unsigned_abs() % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    };
    sign * quarter
}

/// `sin(x)/x` with `sinc(0) = 1` (unnormalized convention).
#[inline]
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

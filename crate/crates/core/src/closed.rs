//! Analytic amplitudes for the `p1 = p2 = 0` subspace and for pump
//! superpositions.
//!
//! For a pump `LG_0^{l0}` the overlap integral with two zero-radial-order
//! analysis modes evaluates in closed form. With `S = |l0| + |l1| + |l2|`
//! (always even when `l0 = l1 + l2`), `theta = arctan(1 / (i + 2a))` and
//! the common prefactor
//!
//! ```text
//! A0 = sqrt(4 b / pi) (b/a)^{|l0|/2} (2a / (a + 2b))^{S/2 + 1}
//!      2^{(|l0| - |l1| - |l2|)/2 + 1} / sqrt(|l0|! |l1|! |l2|!),
//! ```
//!
//! the amplitudes are
//!
//! ```text
//! l1 l2 >= 0:   C = A0 Gamma(S/2 + 1) theta
//! l1 l2 <  0:   C = A0 (-1)^m sum_{n=0}^{m} (-1)^n
//!                   |l1|! |l2|! / ((|l1|-n)! (|l2|-n)! (n!)^2)
//!                   ((a + 2b)/a)^n Gamma(S/2 - n + 1)
//!                   (1 + i/a)^{-n/2} Gamma(n) sin(n theta),
//! ```
//!
//! with `m = min(|l1|, |l2|)` and the `n = 0` term taken in the limit
//! `Gamma(n) sin(n theta) -> theta`. The branch assignment and the
//! alternating signs are fixed by the overlap-integral quadrature, which is
//! the defining expression; see [`ClosedFormVariant`] for the uncalibrated
//! alternative kept around for comparison. Every mode pair with
//! `l1 l2 >= 0` therefore shares the phase of `theta`, while each pair with
//! `l1 l2 < 0` picks up its own phase from the sum.
//!
//! All real magnitudes are accumulated in log space, so large windings do
//! not overflow intermediate factorials.

use num_complex::Complex64;

use crate::error::{Result, SpdcError};
use crate::quad::{Amplitude, Method};
use crate::setup::{NormalizedParams, PumpSpec};
use crate::special::{factorial, ln_factorial};

/// Largest winding magnitude accepted by the closed form.
pub const MAX_CLOSED_WINDING: u32 = 500;

/// Principal-branch complex arctangent,
/// `arctan(z) = (1/(2i)) ln((1 + iz) / (1 - iz))`.
pub fn complex_arctan(z: Complex64) -> Result<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    let denom = 1.0 - i * z;
    let numer = 1.0 + i * z;
    if denom.norm() == 0.0 || numer.norm() == 0.0 {
        return Err(SpdcError::Domain(format!(
            "arctan branch point at z = {z}"
        )));
    }
    Ok(Complex64::new(0.0, -0.5) * (numer / denom).ln())
}

/// `Gamma(n) sin(n theta)` with the analytic `n = 0` limit `theta`
/// (`Gamma(n) ~ 1/n` cancels `sin(n theta) ~ n theta`).
pub fn gamma_sin_term(n: u32, theta: Complex64) -> Complex64 {
    if n == 0 {
        theta
    } else {
        factorial(n - 1) * (n as f64 * theta).sin()
    }
}

/// Which analytic expression to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClosedFormVariant {
    /// Branch assignment and term signs calibrated against the
    /// overlap-integral quadrature (the definition); agrees with it to
    /// quadrature accuracy on every index pair. Default.
    #[default]
    Calibrated,
    /// Swapped branch assignment and unsigned summation. Coincides with the
    /// calibrated form whenever `min(|l1|, |l2|) = 0` or `l1 l2 >= 0`, but
    /// does not reproduce the overlap integral for opposite-sign winding
    /// pairs; retained for comparison and diagnostics only.
    Uncalibrated,
}

/// Index triple and parameters for a closed-form evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormInputs {
    pub l0: i32,
    pub l1: i32,
    pub l2: i32,
    pub params: NormalizedParams,
}

impl ClosedFormInputs {
    /// Fails unless `l0 = l1 + l2` (any other triple has zero amplitude).
    pub fn new(l1: i32, l2: i32, l0: i32, params: NormalizedParams) -> Result<Self> {
        if l1 + l2 != l0 {
            return Err(SpdcError::Config(format!(
                "winding mismatch: l1 + l2 = {} but l0 = {l0}",
                l1 + l2
            )));
        }
        if l0.unsigned_abs() > MAX_CLOSED_WINDING
            || l1.unsigned_abs() > MAX_CLOSED_WINDING
            || l2.unsigned_abs() > MAX_CLOSED_WINDING
        {
            return Err(SpdcError::Range(format!(
                "winding magnitudes ({l0}, {l1}, {l2}) exceed {MAX_CLOSED_WINDING}"
            )));
        }
        Ok(Self { l0, l1, l2, params })
    }

    /// Convenience constructor with `l0 = l1 + l2`.
    pub fn for_pair(l1: i32, l2: i32, params: NormalizedParams) -> Result<Self> {
        Self::new(l1, l2, l1 + l2, params)
    }

    fn theta(&self) -> Complex64 {
        // arctan(1 / (i + 2a)); 2a = w0^2 k_p / (2L) in physical terms.
        let z = (Complex64::new(2.0 * self.params.a, 1.0)).inv();
        complex_arctan(z).expect("argument is never a branch point for a > 0")
    }

    fn ln_a0(&self) -> f64 {
        let l0 = self.l0.unsigned_abs();
        let l1 = self.l1.unsigned_abs();
        let l2 = self.l2.unsigned_abs();
        let s_half = ((l0 + l1 + l2) / 2) as f64;
        let a = self.params.a;
        let b = self.params.b;
        // The sign factor (-1)^{|l0| - |l1| - |l2|} is always +1: the
        // exponent is even for every triple with l0 = l1 + l2.
        0.5 * (4.0 * b / std::f64::consts::PI).ln()
            + 0.5 * l0 as f64 * (b / a).ln()
            + (s_half + 1.0) * (2.0 * a / (a + 2.0 * b)).ln()
            + (0.5 * (l0 as f64 - l1 as f64 - l2 as f64) + 1.0) * std::f64::consts::LN_2
            - 0.5 * (ln_factorial(l0) + ln_factorial(l1) + ln_factorial(l2))
    }
}

/// Analytic amplitude `C^{l1,l2}_{0,0}`, calibrated variant.
pub fn closed_amplitude(inputs: &ClosedFormInputs) -> Result<Amplitude> {
    closed_amplitude_with(inputs, ClosedFormVariant::Calibrated)
}

/// Analytic amplitude with an explicit variant selection.
pub fn closed_amplitude_with(
    inputs: &ClosedFormInputs,
    variant: ClosedFormVariant,
) -> Result<Amplitude> {
    let l1 = inputs.l1.unsigned_abs();
    let l2 = inputs.l2.unsigned_abs();
    let s_half = (inputs.l0.unsigned_abs() + l1 + l2) / 2;
    let theta = inputs.theta();
    let ln_a0 = inputs.ln_a0();

    let same_sign = (inputs.l1 as i64) * (inputs.l2 as i64) >= 0;
    let single_term = match variant {
        ClosedFormVariant::Calibrated => same_sign,
        ClosedFormVariant::Uncalibrated => !same_sign,
    };

    let value = if single_term {
        (ln_a0 + ln_factorial(s_half)).exp() * theta
    } else {
        let m = l1.min(l2);
        let ln_bracket = ((inputs.params.a + 2.0 * inputs.params.b) / inputs.params.a).ln();
        let root = Complex64::new(1.0, 1.0 / inputs.params.a);
        // Log magnitudes of the real factors, complex factors kept linear.
        let ln_terms: Vec<f64> = (0..=m)
            .map(|n| {
                let mut t = ln_factorial(l1) + ln_factorial(l2)
                    - ln_factorial(l1 - n)
                    - ln_factorial(l2 - n)
                    - 2.0 * ln_factorial(n)
                    + n as f64 * ln_bracket
                    + ln_factorial(s_half - n);
                if n > 0 {
                    t += ln_factorial(n - 1); // Gamma(n)
                }
                t
            })
            .collect();
        let peak = ln_terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = Complex64::new(0.0, 0.0);
        for n in 0..=m {
            let sin_part = if n == 0 {
                theta
            } else {
                (n as f64 * theta).sin()
            };
            let mut term =
                (ln_terms[n as usize] - peak).exp() * sin_part / root.powf(0.5 * n as f64);
            if variant == ClosedFormVariant::Calibrated && (m + n) % 2 == 1 {
                term = -term;
            }
            sum += term;
        }
        (ln_a0 + peak).exp() * sum
    };

    Ok(Amplitude {
        value,
        method: Method::ClosedForm,
        error_estimate: 0.0,
    })
}

/// Coefficients `gamma_n` of the `|n,n>` ladder generated by an even-winding
/// pump superposition `sum_m C_m LG_0^m` (`m = 0, 2, 4, ...`):
///
/// ```text
/// gamma_n = sqrt((2n)!)/n! [2 wbar_p / (wbar_0 (2 wbar_p^2 + 1))]^{2n+2} C_{2n}.
/// ```
///
/// The bracket is real and positive, so `arg gamma_n = arg C_{2n}`: each
/// ladder state inherits the phase of the pump component that feeds it.
/// The expression is ratio-consistent with the closed-form amplitudes at
/// `wbar_0 = 1` (the width at which it was reduced); away from that width
/// the closed-form route is authoritative.
pub fn gamma_superposition(
    pump: &PumpSpec,
    n: u32,
    params: &NormalizedParams,
) -> Result<Complex64> {
    if !pump.all_windings_even() {
        return Err(SpdcError::Config(
            "|n,n> superposition requires a pump with even windings only".into(),
        ));
    }
    if n > MAX_CLOSED_WINDING / 2 {
        return Err(SpdcError::Range(format!(
            "ladder index n={n} exceeds {}",
            MAX_CLOSED_WINDING / 2
        )));
    }
    let c2n = pump.coefficient(2 * n.min(i32::MAX as u32) as i32);
    let bracket = 2.0 * params.wbar_p
        / (params.wbar_0 * (2.0 * params.wbar_p * params.wbar_p + 1.0));
    let ln_mag =
        0.5 * ln_factorial(2 * n) - ln_factorial(n) + (2 * n + 2) as f64 * bracket.ln();
    Ok(ln_mag.exp() * c2n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params_unit() -> NormalizedParams {
        NormalizedParams::from_widths(1.0, 1.0).unwrap()
    }

    fn amp(l1: i32, l2: i32, params: NormalizedParams) -> Complex64 {
        closed_amplitude(&ClosedFormInputs::for_pair(l1, l2, params).unwrap())
            .unwrap()
            .value
    }

    #[test]
    fn arctan_reference_points() {
        assert_eq!(complex_arctan(Complex64::new(0.0, 0.0)).unwrap().norm(), 0.0);
        let v = complex_arctan(Complex64::new(1.0, 0.0)).unwrap();
        assert!((v - std::f64::consts::FRAC_PI_4).norm() < 1e-15);
        assert!(complex_arctan(Complex64::new(0.0, 1.0)).is_err());
        assert!(complex_arctan(Complex64::new(0.0, -1.0)).is_err());
    }

    #[test]
    fn arctan_matches_power_series() {
        // Independent oracle: arctan(z) = sum (-1)^k z^{2k+1} / (2k+1),
        // valid inside the unit disk. z = 1/(i + 2a) at wbar_0 = 1.
        let z = Complex64::new(2.0 * params_unit().a, 1.0).inv();
        let mut series = Complex64::new(0.0, 0.0);
        let mut zp = z;
        for k in 0..60 {
            let term = zp / (2 * k + 1) as f64;
            series += if k % 2 == 0 { term } else { -term };
            zp *= z * z;
        }
        let direct = complex_arctan(z).unwrap();
        assert!((direct - series).norm() < 1e-14);
        // Frozen: theta(a = pi/2).
        let frozen = Complex64::new(0.283455752470505, -0.085059985077454);
        assert!((direct - frozen).norm() < 1e-12);
    }

    #[test]
    fn gamma_sin_term_small_orders() {
        let theta = Complex64::new(0.3, 0.1);
        assert_eq!(gamma_sin_term(0, theta), theta);
        let v1 = gamma_sin_term(1, Complex64::new(std::f64::consts::FRAC_PI_2, 0.0));
        assert!((v1 - 1.0).norm() < 1e-15);
        let v2 = gamma_sin_term(2, theta);
        assert!((v2 - (2.0 * theta).sin()).norm() < 1e-15);
    }

    #[test]
    fn gamma_sin_term_is_continuous_at_zero_order() {
        // Gamma(eps) sin(eps theta) for eps = 1e-6 must approach the n = 0
        // value theta. Gamma(eps) = 1/eps - euler_gamma + O(eps).
        let theta = Complex64::new(0.283455752470505, -0.085059985077454);
        let eps = 1e-6;
        let euler_gamma = 0.577_215_664_901_532_9;
        let gamma_eps = 1.0 / eps - euler_gamma + (euler_gamma * euler_gamma / 2.0
            + std::f64::consts::PI * std::f64::consts::PI / 12.0)
            * eps;
        let approx = gamma_eps * (eps * theta).sin();
        assert!(
            (approx - gamma_sin_term(0, theta)).norm() < 1e-4,
            "limit mismatch: {approx}"
        );
    }

    #[test]
    fn frozen_values_at_unit_widths() {
        // Frozen from the overlap-integral quadrature (reduced and brute
        // paths agree with these to ~1e-14).
        let p = params_unit();
        let cases = [
            (0, 0, 0.534489292635278, -0.160390646015718),
            (1, -1, 0.248946699262033, -0.218442992947410),
            (2, -2, 0.078578978489714, -0.165992001564805),
            (1, 1, 0.335947558483561, -0.100811834165872),
            (2, 1, 0.274300032872845, -0.082312517913487),
        ];
        for (l1, l2, re, im) in cases {
            let v = amp(l1, l2, p);
            assert!(
                (v - Complex64::new(re, im)).norm() < 1e-12,
                "({l1},{l2}) gave {v}"
            );
        }
        let p2 = NormalizedParams::from_widths(2.5, 1.7).unwrap();
        let v = amp(3, -2, p2);
        assert!((v - Complex64::new(0.163999471767716, -0.064441056525505)).norm() < 1e-12);
    }

    #[test]
    fn same_sign_pairs_share_one_phase() {
        let p = params_unit();
        let reference = amp(0, 0, p).arg();
        for (l1, l2) in [(1, 1), (2, 0), (0, 2), (3, 1), (-1, -2), (2, 2), (4, 0)] {
            let d = (amp(l1, l2, p).arg() - reference).rem_euclid(2.0 * std::f64::consts::PI);
            let d = d.min(2.0 * std::f64::consts::PI - d);
            assert!(d < 1e-6, "({l1},{l2}) phase off by {d}");
        }
        // Opposite-sign pairs do not share it.
        let d = (amp(1, -1, p).arg() - reference).abs();
        assert!(d > 1e-3);
    }

    #[test]
    fn exchange_invariance() {
        let p = NormalizedParams::from_widths(1.8, 0.9).unwrap();
        for (l1, l2) in [(3, -1), (2, 1), (4, -2), (0, 3)] {
            let a = amp(l1, l2, p);
            let b = amp(l2, l1, p);
            assert!((a - b).norm() <= 1e-14 * a.norm());
        }
    }

    #[test]
    fn variants_agree_only_where_expected() {
        let p = params_unit();
        let inputs = ClosedFormInputs::for_pair(2, 0, p).unwrap();
        let cal = closed_amplitude_with(&inputs, ClosedFormVariant::Calibrated).unwrap();
        let unc = closed_amplitude_with(&inputs, ClosedFormVariant::Uncalibrated).unwrap();
        // min(|l1|,|l2|) = 0: the two variants coincide.
        assert!((cal.value - unc.value).norm() < 1e-15);

        let inputs = ClosedFormInputs::for_pair(1, -1, p).unwrap();
        let cal = closed_amplitude_with(&inputs, ClosedFormVariant::Calibrated).unwrap();
        let unc = closed_amplitude_with(&inputs, ClosedFormVariant::Uncalibrated).unwrap();
        let rel = (cal.value - unc.value).norm() / cal.value.norm();
        assert!(rel > 0.1, "variants unexpectedly close: {rel}");
    }

    #[test]
    fn inputs_enforce_winding_balance() {
        let p = params_unit();
        assert!(ClosedFormInputs::new(1, 1, 0, p).is_err());
        assert!(ClosedFormInputs::new(1, -1, 0, p).is_ok());
    }

    #[test]
    fn gamma_superposition_reference_cases() {
        let p = params_unit();
        // Gaussian pump, n = 0: bracket^2 with wbar_p = wbar_0 = 1 -> (2/3)^2.
        let g0 = gamma_superposition(&PumpSpec::gaussian(), 0, &p).unwrap();
        assert!((g0 - Complex64::new(4.0 / 9.0, 0.0)).norm() < 1e-14);
        // Missing component: gamma_1 = 0.
        let g1 = gamma_superposition(&PumpSpec::gaussian(), 1, &p).unwrap();
        assert_eq!(g1.norm(), 0.0);
        // Phase of the pump coefficient is inherited.
        let pump = PumpSpec::superposition(vec![
            (0, Complex64::new(1.0, 0.0)),
            (2, Complex64::from_polar(1.0, 1.1)),
        ])
        .unwrap();
        let g1 = gamma_superposition(&pump, 1, &p).unwrap();
        assert!((g1.arg() - 1.1).abs() < 1e-12);
        // Odd windings are rejected.
        let odd = PumpSpec::superposition(vec![
            (0, Complex64::new(1.0, 0.0)),
            (1, Complex64::new(1.0, 0.0)),
        ])
        .unwrap();
        assert!(gamma_superposition(&odd, 0, &p).is_err());
    }
}

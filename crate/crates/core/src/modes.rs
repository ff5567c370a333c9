//! Pointwise integrand building blocks: LG mode functions in the spatial
//! frequency domain, the pump profile, the phase-matching function and the
//! two-photon mode function.
//!
//! The LG mode of winding `l` and radial index `p` at beam width `w0`,
//! evaluated at the transverse frequency `(rho, phi)`, is
//!
//! ```text
//! LG_p^l(rho, phi) = sqrt(w0^2 p! / (2 pi (|l|+p)!))
//!                  * (w0 rho / sqrt(2))^{|l|}
//!                  * L_p^{|l|}(rho^2 w0^2 / 2)
//!                  * exp(-rho^2 w0^2 / 4)
//!                  * exp(i l phi + i (p - |l|/2) pi),
//! ```
//!
//! which carries unit L2 norm over the transverse plane. The phase-matching
//! function of the transverse momentum mismatch `delta = q_s - q_i` is
//!
//! ```text
//! W(delta) = sqrt(2 L / (pi^2 k_p)) sinc(u) exp(-i u),
//! u = |delta|^2 L / (4 k_p),
//! ```
//!
//! with the unnormalized sinc. That convention is the one under which the
//! plane integral of |W|^2 equals 4 and hence the full two-photon mode
//! function `Phi(q_s, q_i) = E0(q_s + q_i) W(q_s - q_i)` is unit-normalized
//! for a unit-normalized pump.

use num_complex::Complex64;

use crate::error::{Result, SpdcError};
use crate::setup::{ModeIndex, PhysicalSetup, TransversePoint};
use crate::special::{laguerre, lg_phase_const, ln_factorial, sinc};

/// Radial factor of the LG mode, including the normalization constant but
/// excluding the azimuthal and constant phases. Real by construction.
pub fn lg_mode_radial(mode: ModeIndex, width: f64, rho: f64) -> Result<f64> {
    if !(width > 0.0) || !width.is_finite() {
        return Err(SpdcError::Domain(format!("beam width must be positive, got {width}")));
    }
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(SpdcError::Domain(format!("rho must be nonnegative, got {rho}")));
    }
    let l_abs = mode.l.unsigned_abs();
    let x = 0.5 * rho * rho * width * width;
    let poly = laguerre(mode.p, l_abs, x)?;
    let norm = (0.5 * width * width / std::f64::consts::PI).sqrt()
        * (0.5 * (ln_factorial(mode.p) - ln_factorial(l_abs + mode.p))).exp();
    // (w rho / sqrt(2))^{|l|} = x^{|l|/2}
    let ring = if l_abs == 0 { 1.0 } else { x.powf(0.5 * l_abs as f64) };
    Ok(norm * ring * poly * (-0.5 * x).exp())
}

/// LG mode function in the spatial frequency domain.
pub fn lg_mode(mode: ModeIndex, width: f64, point: TransversePoint) -> Result<Complex64> {
    let radial = lg_mode_radial(mode, width, point.rho)?;
    let azimuth = Complex64::from_polar(1.0, mode.l as f64 * point.phi);
    Ok(radial * azimuth * lg_phase_const(mode.l, mode.p))
}

/// Pump profile `E0(q) = sum_m C_m LG_0^m(q; w_p)` in the spatial frequency
/// domain. Unit norm whenever the pump coefficients are normalized.
pub fn pump_profile(setup: &PhysicalSetup, point: TransversePoint) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in setup.pump.components() {
        acc += c.coeff * lg_mode(ModeIndex::new(c.winding, 0), setup.pump_width, point)?;
    }
    Ok(acc)
}

/// Phase-matching function of the transverse momentum mismatch.
pub fn phase_match_w(delta: TransversePoint, setup: &PhysicalSetup) -> Complex64 {
    phase_match_w_ratio(delta.rho * delta.rho, setup.crystal_length / setup.pump_wavenumber())
}

/// `W` parameterized by `|delta|^2` and the ratio `L / k_p` it depends on.
pub(crate) fn phase_match_w_ratio(delta_sq: f64, l_over_kp: f64) -> Complex64 {
    let u = 0.25 * delta_sq * l_over_kp;
    let amp = (2.0 * l_over_kp).sqrt() / std::f64::consts::PI;
    let (s, c) = u.sin_cos();
    let si = if u.abs() < 1e-4 { sinc(u) } else { s / u };
    amp * si * Complex64::new(c, -s)
}

/// Two-photon mode function `Phi(q_s, q_i) = E0(q_s + q_i) W(q_s - q_i)`.
pub fn mode_function_phi(
    q_signal: TransversePoint,
    q_idler: TransversePoint,
    setup: &PhysicalSetup,
) -> Result<Complex64> {
    let (sx, sy) = q_signal.to_cartesian();
    let (ix, iy) = q_idler.to_cartesian();
    let pump = pump_profile(setup, TransversePoint::from_cartesian(sx + ix, sy + iy))?;
    let dx = sx - ix;
    let dy = sy - iy;
    let w = phase_match_w_ratio(
        dx * dx + dy * dy,
        setup.crystal_length / setup.pump_wavenumber(),
    );
    Ok(pump * w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::RadialGrid;
    use crate::setup::PumpSpec;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn test_setup(pump: PumpSpec) -> PhysicalSetup {
        PhysicalSetup::new(1.0e-3, 0.4e-6, 1.0, pump, 20e-6, 14e-6).unwrap()
    }

    /// Radial Gauss-Legendre oracle for the plane L2 norm of a mode with
    /// winding l: 2 pi int rho |radial|^2 drho.
    fn lg_plane_norm(l: i32, p: u32, w0: f64) -> f64 {
        let mode = ModeIndex::new(l, p);
        let rmax = 30.0 / w0; // exp(-rho^2 w0^2 / 2) < 1e-195 at the cutoff
        let grid = RadialGrid::new(rmax, 24, 32);
        let mut acc = 0.0;
        for (&r, &w) in grid.nodes.iter().zip(&grid.weights) {
            let v = lg_mode_radial(mode, w0, r).unwrap();
            acc += w * r * v * v;
        }
        2.0 * PI * acc
    }

    #[test]
    fn fundamental_mode_at_origin() {
        let w0 = 14e-6;
        let v = lg_mode(ModeIndex::new(0, 0), w0, TransversePoint::new(0.0, 0.3)).unwrap();
        assert_relative_eq!(v.re, (w0 * w0 / (2.0 * PI)).sqrt(), max_relative = 1e-14);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn vortex_mode_vanishes_on_axis() {
        let v = lg_mode(ModeIndex::new(2, 0), 14e-6, TransversePoint::new(0.0, 1.0)).unwrap();
        assert_eq!(v.norm(), 0.0);
    }

    #[test]
    fn modes_are_unit_normalized() {
        for l in [-10i32, -4, -1, 0, 1, 3, 7, 10] {
            for p in [0u32, 1, 2, 5, 10] {
                let n = lg_plane_norm(l, p, 1.7);
                assert!(
                    (n - 1.0).abs() < 1e-8,
                    "norm of (l={l}, p={p}) deviates: {n}"
                );
            }
        }
    }

    #[test]
    fn modes_are_orthogonal() {
        // Radial overlap of same-l, different-p modes must vanish; different
        // l is orthogonal by the azimuthal phase alone.
        let w0 = 0.9;
        let grid = RadialGrid::new(40.0, 24, 32);
        for l in -10i32..=10 {
            for p1 in 0..=10u32 {
                for p2 in (p1 + 1)..=10 {
                    let mut acc = 0.0;
                    for (&r, &w) in grid.nodes.iter().zip(&grid.weights) {
                        let a = lg_mode_radial(ModeIndex::new(l, p1), w0, r).unwrap();
                        let b = lg_mode_radial(ModeIndex::new(l, p2), w0, r).unwrap();
                        acc += w * r * a * b;
                    }
                    let overlap: f64 = 2.0 * PI * acc;
                    assert!(
                        overlap.abs() < 1e-6,
                        "modes (l={l}) p={p1},{p2} overlap {overlap}"
                    );
                }
            }
        }
    }

    #[test]
    fn pump_profile_single_entry_equals_lg_mode() {
        let setup = test_setup(PumpSpec::gaussian());
        let pt = TransversePoint::new(2.0e4, 0.7);
        let pump = pump_profile(&setup, pt).unwrap();
        let lg = lg_mode(ModeIndex::new(0, 0), setup.pump_width, pt).unwrap();
        assert_relative_eq!(pump.re, lg.re, max_relative = 1e-14);
        assert_relative_eq!(pump.im, lg.im, max_relative = 1e-14);
    }

    #[test]
    fn pump_superposition_sums_pointwise() {
        let c0 = Complex64::new(0.6, 0.0);
        let c2 = Complex64::new(0.0, 0.8);
        let setup = test_setup(PumpSpec::superposition(vec![(0, c0), (2, c2)]).unwrap());
        let pt = TransversePoint::new(1.5e4, -1.1);
        let direct = c0 * lg_mode(ModeIndex::new(0, 0), setup.pump_width, pt).unwrap()
            + c2 * lg_mode(ModeIndex::new(2, 0), setup.pump_width, pt).unwrap();
        let pump = pump_profile(&setup, pt).unwrap();
        assert!((pump - direct).norm() < 1e-14 * direct.norm());
    }

    #[test]
    fn pump_superposition_keeps_unit_norm() {
        // Two orthogonal components with |C|^2 = 1/2 each.
        let inv = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let setup = test_setup(PumpSpec::superposition(vec![(0, inv), (2, inv)]).unwrap());
        let grid = RadialGrid::new(30.0 / setup.pump_width, 24, 32);
        let n_phi = 64;
        let mut acc = 0.0;
        for (&r, &w) in grid.nodes.iter().zip(&grid.weights) {
            for k in 0..n_phi {
                let phi = 2.0 * PI * k as f64 / n_phi as f64;
                let v = pump_profile(&setup, TransversePoint::new(r, phi)).unwrap();
                acc += w * r * v.norm_sqr() * (2.0 * PI / n_phi as f64);
            }
        }
        assert!((acc - 1.0).abs() < 1e-8, "pump norm {acc}");
    }

    #[test]
    fn w_at_zero_mismatch() {
        let setup = test_setup(PumpSpec::gaussian());
        let v = phase_match_w(TransversePoint::new(0.0, 0.0), &setup);
        let expected =
            (2.0 * setup.crystal_length / (PI * PI * setup.pump_wavenumber())).sqrt();
        assert_relative_eq!(v.re, expected, max_relative = 1e-14);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn w_vanishes_at_first_sinc_zero() {
        let setup = test_setup(PumpSpec::gaussian());
        // u = pi  <=>  rho^2 = 4 pi k_p / L
        let rho = (4.0 * PI * setup.pump_wavenumber() / setup.crystal_length).sqrt();
        let v = phase_match_w(TransversePoint::new(rho, 0.2), &setup);
        assert!(v.norm() < 1e-14 * (2.0 * setup.crystal_length / (PI * PI * setup.pump_wavenumber())).sqrt());
    }

    #[test]
    fn phi_factorizes_at_equal_momenta() {
        let setup = test_setup(PumpSpec::gaussian());
        let q = TransversePoint::new(1.3e4, 0.4);
        let phi = mode_function_phi(q, q, &setup).unwrap();
        let (x, y) = q.to_cartesian();
        let pump = pump_profile(&setup, TransversePoint::from_cartesian(2.0 * x, 2.0 * y)).unwrap();
        let w0 = (2.0 * setup.crystal_length / (PI * PI * setup.pump_wavenumber())).sqrt();
        assert!((phi - pump * w0).norm() <= 1e-12 * phi.norm());
    }

    #[test]
    fn phi_is_exchange_symmetric() {
        let setup = test_setup(PumpSpec::single(1));
        let qs = TransversePoint::new(0.9e4, 0.3);
        let qi = TransversePoint::new(2.1e4, -2.0);
        let a = mode_function_phi(qs, qi, &setup).unwrap();
        let b = mode_function_phi(qi, qs, &setup).unwrap();
        assert!((a - b).norm() <= 1e-15 * a.norm().max(1e-300));
    }
}

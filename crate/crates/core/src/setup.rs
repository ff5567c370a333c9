//! Domain types: crystal/pump description, normalized parameters and mode
//! indices.
//!
//! All amplitudes depend on the physical inputs only through the two
//! dimensionless combinations
//!
//! ```text
//! a = w0^2 k_p / (4 L),    b = w_p^2 k_p / (4 L),
//! ```
//!
//! equivalently `a = (pi n_p / 2) wbar_0^2` and `b = (pi n_p / 2) wbar_p^2`
//! with the normalized widths `wbar = w / sqrt(lambda_p L)`. The numerical
//! engines consume [`NormalizedParams`] exclusively; physical inputs are
//! converted once at the boundary, which makes the similarity rule (equal
//! normalized widths give identical spectra) structural rather than
//! approximate.

use num_complex::Complex64;

use crate::error::{Result, SpdcError};

/// Margin `pi n_p wbar_p` below which the thin-crystal assumption
/// (crystal much shorter than the pump diffraction length) is no longer
/// comfortably satisfied. Runs below this value are flagged, not rejected.
pub const PARAXIAL_MARGIN_THRESHOLD: f64 = 10.0;

/// One term of the pump decomposition `E0 = sum_m C_m LG_0^m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpComponent {
    /// Winding number of the component (radial index is 0 by construction).
    pub winding: i32,
    /// Complex coefficient `C_m`.
    pub coeff: Complex64,
}

/// Transverse pump profile as a coherent superposition of zero-radial-order
/// LG modes. Coefficients are normalized so that `sum |C_m|^2 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpSpec {
    components: Vec<PumpComponent>,
}

impl PumpSpec {
    /// A single `LG_0^winding` pump.
    pub fn single(winding: i32) -> Self {
        Self {
            components: vec![PumpComponent {
                winding,
                coeff: Complex64::new(1.0, 0.0),
            }],
        }
    }

    /// A Gaussian pump (`winding = 0`).
    pub fn gaussian() -> Self {
        Self::single(0)
    }

    /// Superposition pump. Coefficients are rescaled to unit total weight;
    /// duplicate windings are rejected.
    pub fn superposition(components: Vec<(i32, Complex64)>) -> Result<Self> {
        if components.is_empty() {
            return Err(SpdcError::Config("pump spec must not be empty".into()));
        }
        let mut windings: Vec<i32> = components.iter().map(|c| c.0).collect();
        windings.sort_unstable();
        windings.dedup();
        if windings.len() != components.len() {
            return Err(SpdcError::Config(
                "pump spec contains duplicate windings".into(),
            ));
        }
        let norm_sq: f64 = components.iter().map(|c| c.1.norm_sqr()).sum();
        if !(norm_sq > 0.0) || !norm_sq.is_finite() {
            return Err(SpdcError::Config(
                "pump coefficients must have positive finite total weight".into(),
            ));
        }
        let scale = norm_sq.sqrt().recip();
        Ok(Self {
            components: components
                .into_iter()
                .map(|(winding, coeff)| PumpComponent {
                    winding,
                    coeff: coeff * scale,
                })
                .collect(),
        })
    }

    pub fn components(&self) -> &[PumpComponent] {
        &self.components
    }

    /// Coefficient of winding `m`, zero when absent.
    pub fn coefficient(&self, winding: i32) -> Complex64 {
        self.components
            .iter()
            .find(|c| c.winding == winding)
            .map(|c| c.coeff)
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// The winding number if the pump is a single LG mode.
    pub fn single_winding(&self) -> Option<i32> {
        match self.components.as_slice() {
            [c] => Some(c.winding),
            _ => None,
        }
    }

    /// True when every component winding is even (`m = 0, 2, 4, ...`),
    /// the precondition of the `|n,n>` superposition construction.
    pub fn all_windings_even(&self) -> bool {
        self.components.iter().all(|c| c.winding.rem_euclid(2) == 0)
    }
}

/// Crystal and beam description in physical units (any consistent length
/// unit; only ratios enter the results).
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalSetup {
    /// Crystal length `L`.
    pub crystal_length: f64,
    /// Pump vacuum wavelength `lambda_p`.
    pub pump_wavelength: f64,
    /// Refractive index `n_p` seen by the pump inside the crystal.
    pub refractive_index: f64,
    /// Pump transverse profile.
    pub pump: PumpSpec,
    /// Pump beam width `w_p`.
    pub pump_width: f64,
    /// Width `w0` of the LG analysis basis.
    pub analysis_width: f64,
}

impl PhysicalSetup {
    pub fn new(
        crystal_length: f64,
        pump_wavelength: f64,
        refractive_index: f64,
        pump: PumpSpec,
        pump_width: f64,
        analysis_width: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("crystal_length", crystal_length),
            ("pump_wavelength", pump_wavelength),
            ("pump_width", pump_width),
            ("analysis_width", analysis_width),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(SpdcError::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(refractive_index >= 1.0) || !refractive_index.is_finite() {
            return Err(SpdcError::Domain(format!(
                "refractive_index must be >= 1, got {refractive_index}"
            )));
        }
        Ok(Self {
            crystal_length,
            pump_wavelength,
            refractive_index,
            pump,
            pump_width,
            analysis_width,
        })
    }

    /// Pump wave number inside the crystal, `k_p = 2 pi n_p / lambda_p`.
    pub fn pump_wavenumber(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.refractive_index / self.pump_wavelength
    }

    /// Normalized pump width `wbar_p = w_p / sqrt(lambda_p L)`.
    pub fn normalized_pump_width(&self) -> f64 {
        self.pump_width / (self.pump_wavelength * self.crystal_length).sqrt()
    }

    /// Normalized analysis width `wbar_0 = w0 / sqrt(lambda_p L)`.
    pub fn normalized_analysis_width(&self) -> f64 {
        self.analysis_width / (self.pump_wavelength * self.crystal_length).sqrt()
    }

    /// Thin-crystal margin `pi n_p wbar_p`; the collinear treatment assumes
    /// this is much larger than one.
    pub fn phase_match_margin(&self) -> f64 {
        std::f64::consts::PI * self.refractive_index * self.normalized_pump_width()
    }

    /// True when [`Self::phase_match_margin`] reaches
    /// [`PARAXIAL_MARGIN_THRESHOLD`].
    pub fn paraxial_ok(&self) -> bool {
        self.phase_match_margin() >= PARAXIAL_MARGIN_THRESHOLD
    }
}

/// The two dimensionless parameters that fully determine all amplitudes,
/// together with the normalized widths they derive from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedParams {
    /// Normalized pump width `wbar_p`.
    pub wbar_p: f64,
    /// Normalized analysis width `wbar_0`.
    pub wbar_0: f64,
    /// `a = w0^2 k_p / (4 L) = (pi n_p / 2) wbar_0^2`.
    pub a: f64,
    /// `b = w_p^2 k_p / (4 L) = (pi n_p / 2) wbar_p^2`.
    pub b: f64,
}

impl NormalizedParams {
    /// From normalized widths at `n_p = 1`.
    pub fn from_widths(wbar_p: f64, wbar_0: f64) -> Result<Self> {
        Self::from_widths_with_index(wbar_p, wbar_0, 1.0)
    }

    /// From normalized widths and an explicit refractive index.
    pub fn from_widths_with_index(wbar_p: f64, wbar_0: f64, n_p: f64) -> Result<Self> {
        if !(wbar_p > 0.0 && wbar_0 > 0.0) || !(wbar_p.is_finite() && wbar_0.is_finite()) {
            return Err(SpdcError::Domain(format!(
                "normalized widths must be positive, got wbar_p={wbar_p}, wbar_0={wbar_0}"
            )));
        }
        if !(n_p >= 1.0) || !n_p.is_finite() {
            return Err(SpdcError::Domain(format!("n_p must be >= 1, got {n_p}")));
        }
        let half_pi_np = 0.5 * std::f64::consts::PI * n_p;
        Ok(Self {
            wbar_p,
            wbar_0,
            a: half_pi_np * wbar_0 * wbar_0,
            b: half_pi_np * wbar_p * wbar_p,
        })
    }

    /// Exact boundary conversion from a physical setup.
    pub fn from_physical(setup: &PhysicalSetup) -> Self {
        let k_p = setup.pump_wavenumber();
        let quarter_l = 4.0 * setup.crystal_length;
        Self {
            wbar_p: setup.normalized_pump_width(),
            wbar_0: setup.normalized_analysis_width(),
            a: setup.analysis_width * setup.analysis_width * k_p / quarter_l,
            b: setup.pump_width * setup.pump_width * k_p / quarter_l,
        }
    }

    /// Width of the analysis modes in the internal scaled frequency units
    /// (spatial frequencies measured in sqrt(k_p / L)).
    pub(crate) fn analysis_width_eff(&self) -> f64 {
        2.0 * self.a.sqrt()
    }

    /// Width of the pump in the internal scaled frequency units.
    pub(crate) fn pump_width_eff(&self) -> f64 {
        2.0 * self.b.sqrt()
    }
}

/// LG mode index: signed winding number `l` and radial index `p >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeIndex {
    pub l: i32,
    pub p: u32,
}

impl ModeIndex {
    pub fn new(l: i32, p: u32) -> Self {
        Self { l, p }
    }
}

/// Signal/idler index pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModePair {
    pub signal: ModeIndex,
    pub idler: ModeIndex,
}

impl ModePair {
    pub fn new(signal: ModeIndex, idler: ModeIndex) -> Self {
        Self { signal, idler }
    }

    pub fn from_indices(l1: i32, p1: u32, l2: i32, p2: u32) -> Self {
        Self::new(ModeIndex::new(l1, p1), ModeIndex::new(l2, p2))
    }

    /// `l1 + l2`, the winding the pump must carry for a nonzero amplitude.
    pub fn total_winding(&self) -> i32 {
        self.signal.l + self.idler.l
    }

    /// The pair with signal and idler exchanged.
    pub fn swapped(&self) -> Self {
        Self::new(self.idler, self.signal)
    }
}

/// Point in the transverse spatial-frequency plane, polar form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransversePoint {
    /// Radial spatial frequency, `>= 0`.
    pub rho: f64,
    /// Azimuth in radians.
    pub phi: f64,
}

impl TransversePoint {
    pub fn new(rho: f64, phi: f64) -> Self {
        Self { rho, phi }
    }

    pub fn from_cartesian(x: f64, y: f64) -> Self {
        Self {
            rho: x.hypot(y),
            phi: y.atan2(x),
        }
    }

    pub fn to_cartesian(self) -> (f64, f64) {
        (self.rho * self.phi.cos(), self.rho * self.phi.sin())
    }
}

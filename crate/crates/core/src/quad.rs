//! Quadrature primitives and configuration shared by the overlap
//! integrators.

use num_complex::Complex64;

use crate::error::{Result, SpdcError};
use crate::setup::NormalizedParams;

/// Gauss-Legendre nodes and weights on `(-1, 1)`, nodes ascending.
/// Newton iteration on the Legendre polynomial with the usual cosine
/// initial guesses; accurate to machine precision for the orders used here.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "at least one quadrature node required");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P'_n(x).
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Composite Gauss-Legendre grid on `[0, r_max]`: `panels` equal panels of
/// `points_per_panel` nodes each.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl RadialGrid {
    pub fn new(r_max: f64, panels: usize, points_per_panel: usize) -> Self {
        assert!(r_max > 0.0 && panels >= 1 && points_per_panel >= 1);
        let (xs, ws) = gauss_legendre(points_per_panel);
        let h = r_max / panels as f64;
        let mut nodes = Vec::with_capacity(panels * points_per_panel);
        let mut weights = Vec::with_capacity(panels * points_per_panel);
        for k in 0..panels {
            let lo = k as f64 * h;
            let mid = lo + 0.5 * h;
            for (&x, &w) in xs.iter().zip(&ws) {
                nodes.push(mid + 0.5 * h * x);
                weights.push(0.5 * h * w);
            }
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Tuning for the overlap integrators.
///
/// Radial integration uses composite Gauss-Legendre panels that are doubled
/// until consecutive results agree to `rel_tolerance`; the azimuthal
/// direction uses the uniform trapezoidal rule, which is spectrally accurate
/// for these periodic integrands and therefore needs no refinement, only a
/// point count that resolves the highest azimuthal structure (see
/// [`QuadratureConfig::angular_count`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Gauss-Legendre nodes per radial panel.
    pub radial_points: usize,
    /// Initial number of radial panels (doubled on each refinement).
    pub radial_panels: usize,
    /// Base number of azimuthal points; raised automatically with the mode
    /// windings and the pump localization.
    pub angular_points: usize,
    /// Radial cutoff in scaled frequency units; `None` picks the value at
    /// which the slowest Gaussian envelope has decayed below 1e-14.
    pub radial_cutoff: Option<f64>,
    /// Refinement target: relative change between consecutive panel
    /// doublings. Must lie in `(0, 1e-2]`.
    pub rel_tolerance: f64,
    /// Maximum number of panel doublings before giving up.
    pub refinement_max: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            radial_points: 24,
            radial_panels: 4,
            angular_points: 64,
            radial_cutoff: None,
            rel_tolerance: 1e-6,
            refinement_max: 3,
        }
    }
}

impl QuadratureConfig {
    /// Settings for the brute-force 4D oracle: a smaller base grid (the cost
    /// scales with the square of the per-dimension point count) and a looser
    /// target that is still an order below the cross-check tolerances.
    pub fn brute_oracle() -> Self {
        Self {
            radial_points: 20,
            radial_panels: 2,
            rel_tolerance: 1e-5,
            refinement_max: 2,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.radial_points == 0 || self.radial_panels == 0 || self.angular_points == 0 {
            return Err(SpdcError::Config(
                "quadrature point counts must be positive".into(),
            ));
        }
        if self.angular_points % 2 != 0 {
            return Err(SpdcError::Config(
                "angular point count must be even".into(),
            ));
        }
        if let Some(c) = self.radial_cutoff {
            if !(c > 0.0) || !c.is_finite() {
                return Err(SpdcError::Config(format!(
                    "radial cutoff must be positive, got {c}"
                )));
            }
        }
        if !(self.rel_tolerance > 0.0 && self.rel_tolerance <= 1e-2) {
            return Err(SpdcError::Config(format!(
                "rel_tolerance must lie in (0, 1e-2], got {}",
                self.rel_tolerance
            )));
        }
        if self.refinement_max == 0 {
            return Err(SpdcError::Config("refinement_max must be positive".into()));
        }
        Ok(())
    }

    /// Radial cutoff in scaled units. The integrand carries Gaussian
    /// envelopes `exp(-a rho^2)` (modes) and `exp(-b |Q|^2)` (pump); the
    /// cutoff places the slower of the two below 1e-14, with margin for the
    /// polynomial factors.
    pub fn cutoff(&self, params: &NormalizedParams) -> f64 {
        self.radial_cutoff.unwrap_or_else(|| {
            let decay = params.a.min(params.b);
            1.15 * (32.3 / decay).sqrt()
        })
    }

    /// Radial cutoff for an amplitude block. The Gaussian-envelope rule
    /// alone truncates high radial orders: `L_p^alpha(x) x^{alpha/2}
    /// exp(-x/2)` stays of order one out to the turning point
    /// `x = 4p + 2 alpha + 2` (with `x = 2 a rho^2`) and only then decays,
    /// so the cutoff must also cover the mode support of the largest
    /// requested indices.
    pub fn cutoff_for_modes(
        &self,
        params: &NormalizedParams,
        l1: i32,
        l2: i32,
        p1_max: u32,
        p2_max: u32,
    ) -> f64 {
        if let Some(c) = self.radial_cutoff {
            return c;
        }
        let extent = |p: u32, l: i32| -> f64 {
            let x_turn = (4 * p + 2 * l.unsigned_abs() + 2) as f64;
            // Airy-regime margin puts the mode below ~1e-14 at the cutoff.
            let x_max = x_turn + 10.0 * x_turn.cbrt() + 20.0;
            (0.5 * x_max / params.a).sqrt()
        };
        self.cutoff(params)
            .max(1.1 * extent(p1_max, l1))
            .max(1.1 * extent(p2_max, l2))
    }

    /// Azimuthal point count for an amplitude with windings `(l1, l2)` and
    /// pump winding `l0`: enough points for the highest azimuthal harmonic
    /// with margin, and enough to resolve the pump peak, which narrows in
    /// the relative angle as `sqrt(a/b)` when the pump is much wider than
    /// the analysis modes.
    pub fn angular_count(&self, l1: i32, l2: i32, l0: i32, params: &NormalizedParams) -> usize {
        let harmonics = 8 * (l1.unsigned_abs() + l2.unsigned_abs() + l0.unsigned_abs()) as usize + 16;
        let pump_peak = (40.0 * (params.b / params.a).sqrt()).ceil() as usize;
        let n = self.angular_points.max(harmonics).max(pump_peak);
        n + n % 2
    }
}

/// How an amplitude value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// 3D integral over `(rho_s, rho_i, psi)` after the analytic global
    /// rotation.
    Reduced3d,
    /// Direct 4D tensor-product quadrature.
    Brute4d,
    /// Analytic expression.
    ClosedForm,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Reduced3d => "reduced3d",
            Method::Brute4d => "brute4d",
            Method::ClosedForm => "closed-form",
        })
    }
}

/// A mode-pair amplitude with its provenance and accuracy estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitude {
    pub value: Complex64,
    pub method: Method,
    /// Relative change of the last refinement step for quadrature methods;
    /// zero for closed-form values.
    pub error_estimate: f64,
}

impl Amplitude {
    pub fn weight(&self) -> f64 {
        self.value.norm_sqr()
    }

    /// Phase in `(-pi, pi]`.
    pub fn phase(&self) -> f64 {
        let arg = self.value.arg();
        if arg <= -std::f64::consts::PI {
            std::f64::consts::PI
        } else {
            arg
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        // n-point rule is exact through degree 2n-1.
        let (x, w) = gauss_legendre(6);
        let integral: f64 = x.iter().zip(&w).map(|(&x, &w)| w * x.powi(10)).sum();
        assert!((integral - 2.0 / 11.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn radial_grid_integrates_gaussian() {
        // int_0^inf rho exp(-rho^2) drho = 1/2
        let grid = RadialGrid::new(8.0, 4, 16);
        let v: f64 = grid
            .nodes
            .iter()
            .zip(&grid.weights)
            .map(|(&r, &w)| w * r * (-r * r).exp())
            .sum();
        assert!((v - 0.5).abs() < 1e-14);
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::default().validate().is_ok());
        assert!(QuadratureConfig::brute_oracle().validate().is_ok());
        let bad = QuadratureConfig {
            rel_tolerance: 0.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let odd = QuadratureConfig {
            angular_points: 63,
            ..Default::default()
        };
        assert!(odd.validate().is_err());
    }

    #[test]
    fn angular_count_scales_with_windings_and_pump() {
        let cfg = QuadratureConfig::default();
        let p1 = NormalizedParams::from_widths(1.0, 1.0).unwrap();
        assert_eq!(cfg.angular_count(0, 0, 0, &p1), 64);
        assert!(cfg.angular_count(10, -10, 0, &p1) >= 176);
        let p5 = NormalizedParams::from_widths(5.0, 1.0).unwrap();
        assert!(cfg.angular_count(0, 0, 0, &p5) >= 200);
    }

    #[test]
    fn method_labels() {
        assert_eq!(Method::Reduced3d.to_string(), "reduced3d");
        assert_eq!(Method::Brute4d.to_string(), "brute4d");
        assert_eq!(Method::ClosedForm.to_string(), "closed-form");
    }
}

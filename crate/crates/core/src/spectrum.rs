//! Aggregation of amplitudes into the spiral spectrum and its summary
//! metrics: cumulative radial weights, entropy of entanglement, Schmidt
//! number and the coverage-window spiral bandwidth.
//!
//! For a fixed pump winding `l0` each signal winding `l1` determines the
//! idler winding `l2 = l0 - l1`, so the restricted `p1 = p2 = 0` expansion
//! is already in Schmidt form: the normalized weights `|C|^2` are Schmidt
//! coefficients, and the entropy of entanglement is their Shannon entropy
//! in bits.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::closed::{closed_amplitude, ClosedFormInputs};
use crate::error::{Result, SpdcError};
use crate::overlap::{l_weights, reduced_block, state_norm};
use crate::quad::QuadratureConfig;
use crate::setup::NormalizedParams;

/// Weights below this threshold are dropped from entropy sums to avoid
/// 0 log 0 noise.
pub const WEIGHT_FLOOR: f64 = 1e-14;

/// Truncation at which the modal norm is essentially exhausted at
/// `wbar_p = wbar_0 = 1` (captured norm >= 0.99; see the acceptance suite).
/// Used as the denominator resolution for subspace fractions.
pub const NORM_L_MAX: u32 = 12;
/// Radial truncation companion of [`NORM_L_MAX`].
pub const NORM_P_MAX: u32 = 10;

/// Joint OAM detection probabilities `P_{l1,l2}` at a fixed truncation.
#[derive(Debug, Clone)]
pub struct SpiralSpectrum {
    pub l0: i32,
    pub params: NormalizedParams,
    pub l_max: u32,
    pub p_max: u32,
    /// Sum of all stored weights.
    pub captured_norm: f64,
    entries: BTreeMap<(i32, i32), f64>,
}

impl SpiralSpectrum {
    /// Weight of the pair `(l1, l2)`; zero for pairs outside the truncation
    /// or violating the selection rule.
    pub fn weight(&self, l1: i32, l2: i32) -> f64 {
        self.entries.get(&(l1, l2)).copied().unwrap_or(0.0)
    }

    /// Entries sorted by `l1` ascending.
    pub fn entries(&self) -> impl Iterator<Item = (i32, i32, f64)> + '_ {
        self.entries.iter().map(|(&(l1, l2), &w)| (l1, l2, w))
    }

    /// Coverage-window bandwidth of the stored weights.
    pub fn spiral_bandwidth(&self, coverage: f64) -> Result<usize> {
        let weights: Vec<(i32, f64)> = self.entries().map(|(l1, _, w)| (l1, w)).collect();
        spiral_bandwidth(&weights, self.l0, coverage)
    }
}

/// Spiral spectrum `P_{l1, l0-l1}` for `l1 in [-l_max, l_max]`, with the
/// radial sums truncated at `p_max`.
pub fn spiral_spectrum(
    params: &NormalizedParams,
    l0: i32,
    l_max: u32,
    p_max: u32,
    cfg: &QuadratureConfig,
) -> Result<SpiralSpectrum> {
    let weights = l_weights(params, l0, l_max, p_max, cfg)?;
    let mut entries = BTreeMap::new();
    let mut captured = 0.0;
    for (l1, w) in weights {
        entries.insert((l1, l0 - l1), w);
        captured += w;
    }
    Ok(SpiralSpectrum {
        l0,
        params: *params,
        l_max,
        p_max,
        captured_norm: captured,
        entries,
    })
}

/// Cumulative radial weight `sum_{p1,p2 <= p_max} |C^{l1,l2}_{p1,p2}|^2`
/// for the pump winding implied by the pair (`l0 = l1 + l2`). Monotone
/// nondecreasing in `p_max` and bounded by the full `P_{l1,l2}`.
pub fn cumulative_p_weight(
    l1: i32,
    l2: i32,
    p_max: u32,
    params: &NormalizedParams,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let block = reduced_block(params, l1 + l2, l1, p_max, p_max, cfg)?;
    Ok(block.weight_sum())
}

/// Where the restricted-subspace coefficients come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoefficientSource {
    /// Analytic amplitudes (O(1) per mode). Default.
    #[default]
    ClosedForm,
    /// Reduced-path quadrature; slower, serves as the oracle.
    Quadrature,
}

/// The two-photon state projected onto `p1 = p2 = 0`.
#[derive(Debug, Clone)]
pub struct RestrictedState {
    pub l0: i32,
    pub params: NormalizedParams,
    pub renormalized: bool,
    /// Share of the full state norm captured by the subspace, reported
    /// against the truncated modal norm at ([`NORM_L_MAX`], [`NORM_P_MAX`]).
    pub subspace_fraction: f64,
    coefficients: BTreeMap<(i32, i32), Complex64>,
}

impl RestrictedState {
    /// Builds a state from explicit coefficients (synthetic states, tests,
    /// external data). With `renormalize` set the coefficients are scaled
    /// to unit total weight; the subspace fraction of a synthetic state is
    /// reported as its raw mass.
    pub fn from_coefficients(
        l0: i32,
        params: NormalizedParams,
        coefficients: Vec<(i32, i32, Complex64)>,
        renormalize: bool,
    ) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(SpdcError::Domain("state must carry at least one mode".into()));
        }
        let raw_mass: f64 = coefficients.iter().map(|(_, _, c)| c.norm_sqr()).sum();
        if !(raw_mass > 0.0) {
            return Err(SpdcError::Domain("state must carry nonzero weight".into()));
        }
        let scale = if renormalize {
            raw_mass.sqrt().recip()
        } else {
            1.0
        };
        let mut map = BTreeMap::new();
        for (l1, l2, c) in coefficients {
            if l1 + l2 != l0 {
                return Err(SpdcError::Config(format!(
                    "pair ({l1}, {l2}) violates the selection rule for l0 = {l0}"
                )));
            }
            map.insert((l1, l2), c * scale);
        }
        Ok(Self {
            l0,
            params,
            renormalized: renormalize,
            subspace_fraction: raw_mass,
            coefficients: map,
        })
    }

    pub fn coefficient(&self, l1: i32, l2: i32) -> Complex64 {
        self.coefficients
            .get(&(l1, l2))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Coefficients sorted by `l1` ascending.
    pub fn coefficients(&self) -> impl Iterator<Item = (i32, i32, Complex64)> + '_ {
        self.coefficients.iter().map(|(&(l1, l2), &c)| (l1, l2, c))
    }

    /// `(l1, |C|^2)` pairs sorted by `l1`.
    pub fn weights(&self) -> Vec<(i32, f64)> {
        self.coefficients()
            .map(|(l1, _, c)| (l1, c.norm_sqr()))
            .collect()
    }

    pub fn spiral_bandwidth(&self, coverage: f64) -> Result<usize> {
        spiral_bandwidth(&self.weights(), self.l0, coverage)
    }
}

/// Builds the restricted state for `l1 in [-l_max, l_max]`.
///
/// With `renormalize` set, the coefficients are scaled to unit total weight
/// (the Schmidt form used by the entropy metrics); otherwise they are the
/// raw overlap amplitudes. The subspace fraction always refers to the raw
/// weights.
pub fn restricted_state(
    params: &NormalizedParams,
    l0: i32,
    l_max: u32,
    renormalize: bool,
    source: CoefficientSource,
    cfg: &QuadratureConfig,
) -> Result<RestrictedState> {
    let ls: Vec<i32> = (-(l_max as i32)..=l_max as i32).collect();
    let coeffs: Vec<(i32, Complex64)> = match source {
        CoefficientSource::ClosedForm => ls
            .iter()
            .map(|&l1| {
                let inputs = ClosedFormInputs::new(l1, l0 - l1, l0, *params)?;
                Ok((l1, closed_amplitude(&inputs)?.value))
            })
            .collect::<Result<_>>()?,
        CoefficientSource::Quadrature => ls
            .par_iter()
            .map(|&l1| {
                reduced_block(params, l0, l1, 0, 0, cfg).map(|b| (l1, b.value(0, 0)))
            })
            .collect::<Result<_>>()?,
    };
    let raw_mass: f64 = coeffs.iter().map(|(_, c)| c.norm_sqr()).sum();
    if !(raw_mass > 0.0) {
        return Err(SpdcError::Domain(
            "restricted subspace carries no weight at this truncation".into(),
        ));
    }
    let denominator = state_norm(params, l0, cfg, NORM_L_MAX, NORM_P_MAX)?;
    let scale = if renormalize {
        raw_mass.sqrt().recip()
    } else {
        1.0
    };
    let mut coefficients = BTreeMap::new();
    for (l1, c) in coeffs {
        coefficients.insert((l1, l0 - l1), c * scale);
    }
    Ok(RestrictedState {
        l0,
        params: *params,
        renormalized: renormalize,
        subspace_fraction: raw_mass / denominator,
        coefficients,
    })
}

fn schmidt_weights(state: &RestrictedState) -> Result<Vec<f64>> {
    if !state.renormalized {
        return Err(SpdcError::Domain(
            "Schmidt metrics require a renormalized state".into(),
        ));
    }
    let weights: Vec<f64> = state
        .coefficients
        .values()
        .map(|c| c.norm_sqr())
        .filter(|&w| w > WEIGHT_FLOOR)
        .collect();
    if weights.is_empty() {
        return Err(SpdcError::Domain("state has no weight above the floor".into()));
    }
    Ok(weights)
}

/// Entropy of entanglement in bits, `E = -sum lambda log2 lambda` over the
/// Schmidt weights `lambda = |C|^2` of a renormalized restricted state.
pub fn entanglement_entropy(state: &RestrictedState) -> Result<f64> {
    let weights = schmidt_weights(state)?;
    Ok(weights.iter().map(|&w| -w * w.log2()).sum::<f64>().max(0.0))
}

/// Schmidt number (participation ratio) `K = 1 / sum lambda^2`; 1 for a
/// single mode, `d` for `d` equal modes.
pub fn schmidt_number(state: &RestrictedState) -> Result<f64> {
    let weights = schmidt_weights(state)?;
    let total: f64 = weights.iter().sum();
    let sum_sq: f64 = weights.iter().map(|&w| (w / total) * (w / total)).sum();
    Ok(sum_sq.recip())
}

/// Smallest number of modes whose weights capture at least `coverage` of
/// the total stored weight. Modes are taken in order of decreasing weight;
/// ties are broken toward the center of the spectrum (smaller
/// `|l1 - l0/2|`, i.e. smaller `|2 l1 - l0|`), then toward smaller `l1`.
pub fn spiral_bandwidth(weights: &[(i32, f64)], l0: i32, coverage: f64) -> Result<usize> {
    if !(coverage > 0.0 && coverage < 1.0) {
        return Err(SpdcError::Domain(format!(
            "coverage must lie in (0, 1), got {coverage}"
        )));
    }
    let total: f64 = weights.iter().map(|(_, w)| w).sum();
    if !(total > 0.0) {
        return Err(SpdcError::Truncation {
            requested: coverage,
            achieved: 0.0,
        });
    }
    let mut sorted: Vec<(i32, f64)> = weights.to_vec();
    sorted.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap()
            .then(((2 * a.0 - l0).abs()).cmp(&(2 * b.0 - l0).abs()))
            .then(a.0.cmp(&b.0))
    });
    let target = coverage * total;
    let mut acc = 0.0;
    for (count, (_, w)) in sorted.iter().enumerate() {
        acc += w;
        if acc >= target {
            return Ok(count + 1);
        }
    }
    // Floating-point shortfall on the last partial sum.
    Err(SpdcError::Truncation {
        requested: coverage,
        achieved: acc / total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed::{closed_amplitude, ClosedFormInputs};

    fn params_unit() -> NormalizedParams {
        NormalizedParams::from_widths(1.0, 1.0).unwrap()
    }

    fn toy_state(weights: &[(i32, f64)]) -> RestrictedState {
        let total: f64 = weights.iter().map(|(_, w)| w).sum();
        let mut coefficients = BTreeMap::new();
        for &(l1, w) in weights {
            coefficients.insert((l1, -l1), Complex64::new((w / total).sqrt(), 0.0));
        }
        RestrictedState {
            l0: 0,
            params: params_unit(),
            renormalized: true,
            subspace_fraction: 1.0,
            coefficients,
        }
    }

    #[test]
    fn entropy_reference_cases() {
        let single = toy_state(&[(0, 1.0)]);
        assert_eq!(entanglement_entropy(&single).unwrap(), 0.0);
        assert_eq!(schmidt_number(&single).unwrap(), 1.0);

        let quart = toy_state(&[(-1, 0.25), (0, 0.25), (1, 0.25), (2, 0.25)]);
        assert!((entanglement_entropy(&quart).unwrap() - 2.0).abs() < 1e-12);
        assert!((schmidt_number(&quart).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_requires_renormalized_state() {
        let mut state = toy_state(&[(0, 0.5), (1, 0.5)]);
        state.renormalized = false;
        assert!(entanglement_entropy(&state).is_err());
        assert!(schmidt_number(&state).is_err());
    }

    #[test]
    fn entropy_is_phase_and_exchange_invariant() {
        let state = toy_state(&[(0, 0.5), (1, 0.3), (2, 0.2)]);
        let e = entanglement_entropy(&state).unwrap();
        let mut rotated = state.clone();
        for c in rotated.coefficients.values_mut() {
            *c *= Complex64::from_polar(1.0, 0.9);
        }
        assert!((entanglement_entropy(&rotated).unwrap() - e).abs() < 1e-13);

        // Exchange (l1, l2) -> (l2, l1) permutes the weights only.
        let mut swapped = BTreeMap::new();
        for (&(l1, l2), &c) in &state.coefficients {
            swapped.insert((l2, l1), c);
        }
        let mut ex = state.clone();
        ex.coefficients = swapped;
        assert!((entanglement_entropy(&ex).unwrap() - e).abs() < 1e-13);
    }

    #[test]
    fn bandwidth_reference_cases() {
        let single = toy_state(&[(0, 1.0)]);
        assert_eq!(single.spiral_bandwidth(0.5).unwrap(), 1);
        assert_eq!(single.spiral_bandwidth(0.999).unwrap(), 1);

        let state = toy_state(&[(-1, 0.2), (0, 0.6), (1, 0.2)]);
        assert_eq!(state.spiral_bandwidth(0.5).unwrap(), 1);
        assert_eq!(state.spiral_bandwidth(0.7).unwrap(), 2);
        assert_eq!(state.spiral_bandwidth(0.99).unwrap(), 3);
        // Nondecreasing in coverage.
        let mut prev = 0;
        for c in [0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
            let w = state.spiral_bandwidth(c).unwrap();
            assert!(w >= prev);
            prev = w;
        }
        assert!(state.spiral_bandwidth(1.2).is_err());
    }

    #[test]
    fn bandwidth_tie_break_prefers_center() {
        // Equal weights: the window should grow outward from l0/2.
        let w = spiral_bandwidth(&[(-2, 0.25), (-1, 0.25), (1, 0.25), (2, 0.25)], 0, 0.4).unwrap();
        assert_eq!(w, 2);
    }

    /// Restricted state assembled directly from the analytic amplitudes,
    /// bypassing the quadrature-based norm denominator.
    fn analytic_state(l0: i32, wp: f64, w0: f64, l_max: i32) -> RestrictedState {
        let params = NormalizedParams::from_widths(wp, w0).unwrap();
        let coeffs: Vec<(i32, i32, Complex64)> = (-l_max..=l_max)
            .map(|l1| {
                let inputs = ClosedFormInputs::new(l1, l0 - l1, l0, params).unwrap();
                (l1, l0 - l1, closed_amplitude(&inputs).unwrap().value)
            })
            .collect();
        RestrictedState::from_coefficients(l0, params, coeffs, true).unwrap()
    }

    #[test]
    fn vortex_pump_weights_peak_next_to_the_center() {
        // For l0 = 1 the largest subspace weights sit on the pairs (0,1)
        // and (1,0).
        let state = analytic_state(1, 1.0, 1.0, 8);
        let weights = state.weights();
        let (best_l1, _) = weights
            .iter()
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        assert!(*best_l1 == 0 || *best_l1 == 1, "peak at l1={best_l1}");
        // And the two sit symmetrically.
        let w0 = state.coefficient(0, 1).norm_sqr();
        let w1 = state.coefficient(1, 0).norm_sqr();
        assert!((w0 - w1).abs() < 1e-12 * w0);
    }

    #[test]
    fn bandwidth_grows_with_pump_winding() {
        let bw0 = analytic_state(0, 1.0, 1.0, 10).spiral_bandwidth(0.99).unwrap();
        let bw2 = analytic_state(2, 1.0, 1.0, 10).spiral_bandwidth(0.99).unwrap();
        assert!(bw2 >= bw0, "W99(l0=2) = {bw2} < W99(l0=0) = {bw0}");
    }

    #[test]
    fn schmidt_number_grows_with_pump_width_and_stays_bounded() {
        let mut prev = 0.0;
        for wp in [1.0, 2.5, 5.0] {
            let state = analytic_state(0, wp, 1.0, 16);
            let k = schmidt_number(&state).unwrap();
            let modes = state
                .weights()
                .iter()
                .filter(|(_, w)| *w > WEIGHT_FLOOR)
                .count();
            assert!(k >= 1.0 && k <= modes as f64 + 1e-9);
            assert!(k > prev, "K({wp}) = {k} not above {prev}");
            prev = k;
        }
    }

    #[test]
    fn restricted_state_closed_form_at_unit_widths() {
        let cfg = QuadratureConfig::default();
        let state = restricted_state(
            &params_unit(),
            0,
            8,
            true,
            CoefficientSource::ClosedForm,
            &cfg,
        )
        .unwrap();
        let total: f64 = state.weights().iter().map(|(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-10);
        assert!(state.subspace_fraction > 0.40);
        // Reflection symmetry of the weights for a Gaussian pump.
        for l in 1..=8 {
            let a = state.coefficient(l, -l).norm_sqr();
            let b = state.coefficient(-l, l).norm_sqr();
            assert!((a - b).abs() < 1e-12 * a.max(1e-300));
        }
    }

    #[test]
    fn spectrum_is_reflection_symmetric_and_bounded() {
        let cfg = QuadratureConfig::default();
        let spec = spiral_spectrum(&params_unit(), 0, 4, 2, &cfg).unwrap();
        assert!(spec.captured_norm <= 1.0 + 1e-3);
        for l in 1..=4 {
            let diff = (spec.weight(l, -l) - spec.weight(-l, l)).abs();
            assert!(diff < 1e-8, "asymmetry {diff} at l={l}");
        }
        // The central pair dominates at unit widths.
        assert!(spec.weight(0, 0) > spec.weight(1, -1));
        let from_cumulative = cumulative_p_weight(0, 0, 2, &params_unit(), &cfg).unwrap();
        assert!((from_cumulative - spec.weight(0, 0)).abs() < 1e-12);
    }

    #[test]
    fn cumulative_weight_is_monotone() {
        let cfg = QuadratureConfig::default();
        let mut prev = 0.0;
        for p_max in 0..=4 {
            let c = cumulative_p_weight(1, -1, p_max, &params_unit(), &cfg).unwrap();
            assert!(c >= prev - 1e-12, "not monotone at p_max={p_max}");
            prev = c;
        }
        // p_max = 0 is the bare (0,0) weight.
        let c0 = cumulative_p_weight(1, -1, 0, &params_unit(), &cfg).unwrap();
        let amp = crate::overlap::amplitude_reduced(
            crate::setup::ModePair::from_indices(1, 0, -1, 0),
            &params_unit(),
            0,
            &cfg,
        )
        .unwrap();
        assert!((c0 - amp.weight()).abs() < 1e-14);
    }
}

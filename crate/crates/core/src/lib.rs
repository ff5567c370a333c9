//! Spatial-mode characterization of the two-photon state produced by
//! collinear spontaneous parametric down-conversion, in the
//! Laguerre-Gaussian / orbital-angular-momentum basis.
//!
//! The crate provides, in dependency order:
//!
//! * [`setup`] — physical and normalized parameter types; all results
//!   depend on the setup only through two dimensionless widths.
//! * [`special`] / [`modes`] — associated Laguerre polynomials, LG mode
//!   functions, the pump profile and the phase-matching function.
//! * [`overlap`] — the mode-pair overlap amplitudes by a reduced 3D
//!   quadrature (fast path) and a brute-force 4D quadrature (oracle),
//!   plus the normalization integrals.
//! * [`closed`] — analytic amplitudes for the `p1 = p2 = 0` subspace and
//!   pump-superposition ladder coefficients.
//! * [`spectrum`] — the spiral spectrum, cumulative radial weights,
//!   entropy of entanglement, Schmidt number and spiral bandwidth.

pub mod closed;
pub mod error;
pub mod modes;
pub mod overlap;
pub mod quad;
pub mod setup;
pub mod special;
pub mod spectrum;

pub use closed::{
    closed_amplitude, closed_amplitude_with, complex_arctan, gamma_sin_term,
    gamma_superposition, ClosedFormInputs, ClosedFormVariant,
};
pub use error::{Result, SpdcError};
pub use modes::{lg_mode, lg_mode_radial, mode_function_phi, phase_match_w, pump_profile};
pub use overlap::{
    amplitude_brute, amplitude_reduced, brute_block, phi_norm, reduced_block, state_norm,
    w_plane_norm, w_plane_norm_physical, AmplitudeBlock,
};
pub use quad::{Amplitude, Method, QuadratureConfig};
pub use setup::{
    ModeIndex, ModePair, NormalizedParams, PhysicalSetup, PumpComponent, PumpSpec,
    TransversePoint, PARAXIAL_MARGIN_THRESHOLD,
};
pub use special::{laguerre, sinc};
pub use spectrum::{
    cumulative_p_weight, entanglement_entropy, restricted_state, schmidt_number,
    spiral_bandwidth, spiral_spectrum, CoefficientSource, RestrictedState, SpiralSpectrum,
};

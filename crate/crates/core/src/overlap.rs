//! Numerical evaluation of the mode-pair overlap amplitudes
//!
//! ```text
//! C^{l1,l2}_{p1,p2} = int dq_s dq_i  Phi(q_s, q_i)
//!                     [LG_{p1}^{l1}(q_s)]* [LG_{p2}^{l2}(q_i)]*
//! ```
//!
//! in two independent ways:
//!
//! * a reduced 3D path over `(rho_s, rho_i, psi = phi_s - phi_i)`, obtained
//!   by carrying out the global-rotation angle analytically (a factor 2 pi
//!   together with the selection rule `l1 + l2 = l0`), and
//! * a brute-force 4D tensor-product quadrature over
//!   `(rho_s, phi_s, rho_i, phi_i)` that serves as the oracle for the
//!   reduced path and for the closed-form expressions.
//!
//! All integrals run in scaled frequency units (momenta divided by
//! `sqrt(k_p / L)`); in those units every integrand depends on the physical
//! setup only through [`NormalizedParams`], the mode widths become
//! `2 sqrt(a)` and `2 sqrt(b)`, and the phase-matching argument is
//! `|delta|^2 / 4`.
//!
//! Evaluation within a single amplitude (or block of amplitudes sharing a
//! winding pair) is strictly sequential with a fixed summation order, so
//! per-amplitude results are bit-reproducible for a fixed configuration;
//! parallelism is applied only across distinct amplitudes.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, SpdcError};
use crate::modes::phase_match_w_ratio;
use crate::quad::{gauss_legendre, Amplitude, Method, QuadratureConfig, RadialGrid};
use crate::setup::{ModePair, NormalizedParams, PhysicalSetup};
use crate::special::{laguerre_sequence, lg_phase_const, ln_factorial, MAX_LAGUERRE_DEGREE, MAX_LAGUERRE_ORDER};

const ABS_CONVERGENCE_FLOOR: f64 = 1e-13;
/// An absolute change below this is always accepted as converged; relative
/// change is meaningless for amplitudes at the numerical-zero floor.
const ABS_CHANGE_FLOOR: f64 = 1e-12;

/// Pump mode `LG_0^{l0}` in scaled units, set up for fast pointwise
/// evaluation: `norm * ((w_p/sqrt(2)) (Qx +- i Qy))^{|l0|} * exp(-b |Q|^2)`
/// times the constant mode phase.
struct CanonicalPump {
    norm: f64,
    b: f64,
    l_abs: u32,
    conjugate: bool,
    scale: f64,
    cphase: Complex64,
}

impl CanonicalPump {
    fn new(params: &NormalizedParams, l0: i32) -> Self {
        let wpe = params.pump_width_eff();
        let l_abs = l0.unsigned_abs();
        Self {
            norm: (wpe * wpe / (2.0 * std::f64::consts::PI)).sqrt()
                * (-0.5 * ln_factorial(l_abs)).exp(),
            b: params.b,
            l_abs,
            conjugate: l0 < 0,
            scale: wpe / std::f64::consts::SQRT_2,
            cphase: lg_phase_const(l0, 0),
        }
    }

    #[inline]
    fn eval(&self, qx: f64, qy: f64) -> Complex64 {
        let gauss = (-self.b * (qx * qx + qy * qy)).exp();
        if self.l_abs == 0 {
            return self.cphase * (self.norm * gauss);
        }
        let z = Complex64::new(
            self.scale * qx,
            if self.conjugate { -self.scale * qy } else { self.scale * qy },
        );
        self.cphase * z.powu(self.l_abs) * (self.norm * gauss)
    }
}

#[inline]
fn w_canonical(delta_sq: f64) -> Complex64 {
    phase_match_w_ratio(delta_sq, 1.0)
}

/// Radial profiles `R_{l,p}(rho)` (normalization included, phases excluded)
/// tabulated on the grid nodes for all `p <= p_max`; layout `[p][node]`.
fn radial_table(l: i32, p_max: u32, width: f64, nodes: &[f64]) -> Vec<Vec<f64>> {
    let l_abs = l.unsigned_abs();
    let count = p_max as usize + 1;
    let base = (0.5 * width * width / std::f64::consts::PI).sqrt();
    let norms: Vec<f64> = (0..count)
        .map(|p| base * (0.5 * (ln_factorial(p as u32) - ln_factorial(l_abs + p as u32))).exp())
        .collect();
    let mut table = vec![vec![0.0; nodes.len()]; count];
    let mut polys = vec![0.0; count];
    for (i, &rho) in nodes.iter().enumerate() {
        let x = 0.5 * rho * rho * width * width;
        laguerre_sequence(l_abs, x, &mut polys);
        // x^{|l|/2} exp(-x/2) in one exponential: the ring factor alone can
        // overflow transiently at large |l| and x.
        let envelope = if l_abs == 0 {
            (-0.5 * x).exp()
        } else if x > 0.0 {
            (0.5 * (l_abs as f64 * x.ln() - x)).exp()
        } else {
            0.0
        };
        for p in 0..count {
            table[p][i] = norms[p] * envelope * polys[p];
        }
    }
    table
}

/// Contracts a radial kernel with the mode radial tables, producing one
/// value per `(p1, p2)` cell (p1-major). `prefactor` carries the measure
/// factors that are not part of the kernel (2 pi for the reduced path).
fn contract_block(
    kern: &[Complex64],
    grid: &RadialGrid,
    r1: &[Vec<f64>],
    r2: &[Vec<f64>],
    l1: i32,
    l2: i32,
    prefactor: Complex64,
) -> Vec<Complex64> {
    let n = grid.len();
    let wr: Vec<f64> = grid
        .nodes
        .iter()
        .zip(&grid.weights)
        .map(|(&r, &w)| r * w)
        .collect();
    // Project the idler index first: proj[p2][i] = sum_j wr_j R2[p2][j] K[i][j].
    let mut proj = vec![vec![Complex64::new(0.0, 0.0); n]; r2.len()];
    for (p2, row) in proj.iter_mut().enumerate() {
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            let kr = &kern[i * n..(i + 1) * n];
            for j in 0..n {
                acc += (wr[j] * r2[p2][j]) * kr[j];
            }
            row[i] = acc;
        }
    }
    let mut out = Vec::with_capacity(r1.len() * r2.len());
    for p1 in 0..r1.len() {
        for (p2, row) in proj.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                acc += (wr[i] * r1[p1][i]) * row[i];
            }
            let cphase = (lg_phase_const(l1, p1 as u32) * lg_phase_const(l2, p2 as u32)).conj();
            out.push(prefactor * cphase * acc);
        }
    }
    out
}

/// A block of amplitudes sharing a winding pair, one value per radial index
/// pair `(p1 <= p1_max, p2 <= p2_max)`.
#[derive(Debug, Clone)]
pub struct AmplitudeBlock {
    pub l1: i32,
    pub l2: i32,
    pub l0: i32,
    pub p1_max: u32,
    pub p2_max: u32,
    pub method: Method,
    values: Vec<Complex64>,
    errors: Vec<f64>,
}

impl AmplitudeBlock {
    fn idx(&self, p1: u32, p2: u32) -> usize {
        assert!(p1 <= self.p1_max && p2 <= self.p2_max, "radial index outside block");
        p1 as usize * (self.p2_max as usize + 1) + p2 as usize
    }

    pub fn value(&self, p1: u32, p2: u32) -> Complex64 {
        self.values[self.idx(p1, p2)]
    }

    pub fn error_estimate(&self, p1: u32, p2: u32) -> f64 {
        self.errors[self.idx(p1, p2)]
    }

    pub fn amplitude(&self, p1: u32, p2: u32) -> Amplitude {
        Amplitude {
            value: self.value(p1, p2),
            method: self.method,
            error_estimate: self.error_estimate(p1, p2),
        }
    }

    /// `sum_{p1,p2} |C|^2` over the block.
    pub fn weight_sum(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }
}

/// Runs the panel-doubling refinement loop around a grid evaluation.
fn refine<F>(eval: F, cfg: &QuadratureConfig) -> Result<(Vec<Complex64>, Vec<f64>)>
where
    F: Fn(usize) -> Vec<Complex64>,
{
    let mut prev = eval(cfg.radial_panels);
    let mut errors = vec![f64::INFINITY; prev.len()];
    for level in 1..=cfg.refinement_max {
        let cur = eval(cfg.radial_panels << level);
        let mut worst = 0.0f64;
        let mut done = true;
        for (k, (&c, &p)) in cur.iter().zip(&prev).enumerate() {
            let change = (c - p).norm();
            let rel = change / c.norm().max(ABS_CONVERGENCE_FLOOR);
            errors[k] = rel;
            if change > (cfg.rel_tolerance * c.norm()).max(ABS_CHANGE_FLOOR) {
                done = false;
            }
            worst = worst.max(rel);
        }
        prev = cur;
        if done {
            return Ok((prev, errors));
        }
    }
    Err(SpdcError::Convergence {
        estimate: errors.iter().cloned().fold(0.0, f64::max),
    })
}

fn check_block_indices(l1: i32, l2: i32, p1_max: u32, p2_max: u32) -> Result<()> {
    if l1.unsigned_abs() > MAX_LAGUERRE_ORDER || l2.unsigned_abs() > MAX_LAGUERRE_ORDER {
        return Err(SpdcError::Range(format!(
            "winding numbers ({l1}, {l2}) exceed the supported magnitude {MAX_LAGUERRE_ORDER}"
        )));
    }
    if p1_max > MAX_LAGUERRE_DEGREE || p2_max > MAX_LAGUERRE_DEGREE {
        return Err(SpdcError::Range(format!(
            "radial indices ({p1_max}, {p2_max}) exceed the supported maximum {MAX_LAGUERRE_DEGREE}"
        )));
    }
    Ok(())
}

fn eval_reduced_once(
    params: &NormalizedParams,
    l0: i32,
    l1: i32,
    l2: i32,
    p1_max: u32,
    p2_max: u32,
    r_max: f64,
    panels: usize,
    points: usize,
    n_psi: usize,
) -> Vec<Complex64> {
    let grid = RadialGrid::new(r_max, panels, points);
    let n = grid.len();
    let w0e = params.analysis_width_eff();
    let r1 = radial_table(l1, p1_max, w0e, &grid.nodes);
    let r2 = radial_table(l2, p2_max, w0e, &grid.nodes);
    let pump = CanonicalPump::new(params, l0);

    let w_psi = 2.0 * std::f64::consts::PI / n_psi as f64;
    let mut cos_psi = Vec::with_capacity(n_psi);
    let mut sin_psi = Vec::with_capacity(n_psi);
    let mut e_il2 = Vec::with_capacity(n_psi);
    for k in 0..n_psi {
        let psi = w_psi * k as f64;
        let (s, c) = psi.sin_cos();
        cos_psi.push(c);
        sin_psi.push(s);
        e_il2.push(Complex64::from_polar(1.0, l2 as f64 * psi));
    }

    // K(rho_s, rho_i) = int dpsi E0(q_s + q_i) W(q_s - q_i) e^{i l2 psi}
    // with q_s = (rho_s, 0) and q_i = rho_i (cos psi, -sin psi).
    let mut kern = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        let rs = grid.nodes[i];
        for j in 0..n {
            let ri = grid.nodes[j];
            let r2sum = rs * rs + ri * ri;
            let cross = 2.0 * rs * ri;
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n_psi {
                let qx = rs + ri * cos_psi[k];
                let qy = -ri * sin_psi[k];
                let dsq = r2sum - cross * cos_psi[k];
                acc += pump.eval(qx, qy) * w_canonical(dsq) * e_il2[k];
            }
            kern[i * n + j] = acc * w_psi;
        }
    }

    let two_pi = Complex64::new(2.0 * std::f64::consts::PI, 0.0);
    contract_block(&kern, &grid, &r1, &r2, l1, l2, two_pi)
}

/// All amplitudes `C^{l1, l0-l1}_{p1, p2}` with `p1 <= p1_max`,
/// `p2 <= p2_max`, evaluated by the reduced 3D path with panel-doubling
/// refinement. The angular kernel is shared across the radial indices of
/// the block, which is what makes spectrum assembly affordable.
pub fn reduced_block(
    params: &NormalizedParams,
    l0: i32,
    l1: i32,
    p1_max: u32,
    p2_max: u32,
    cfg: &QuadratureConfig,
) -> Result<AmplitudeBlock> {
    cfg.validate()?;
    let l2 = l0 - l1;
    check_block_indices(l1, l2, p1_max, p2_max)?;
    let r_max = cfg.cutoff_for_modes(params, l1, l2, p1_max, p2_max);
    let n_psi = cfg.angular_count(l1, l2, l0, params);
    let (values, errors) = refine(
        |panels| {
            eval_reduced_once(
                params, l0, l1, l2, p1_max, p2_max, r_max, panels, cfg.radial_points, n_psi,
            )
        },
        cfg,
    )?;
    Ok(AmplitudeBlock {
        l1,
        l2,
        l0,
        p1_max,
        p2_max,
        method: Method::Reduced3d,
        values,
        errors,
    })
}

/// Overlap amplitude by the reduced path. Pairs violating the selection
/// rule `l1 + l2 = l0` return exactly zero without integrating: the
/// azimuthal integral is a Kronecker delta, not a numerical zero.
pub fn amplitude_reduced(
    pair: ModePair,
    params: &NormalizedParams,
    pump_winding: i32,
    cfg: &QuadratureConfig,
) -> Result<Amplitude> {
    cfg.validate()?;
    if pair.total_winding() != pump_winding {
        return Ok(Amplitude {
            value: Complex64::new(0.0, 0.0),
            method: Method::Reduced3d,
            error_estimate: 0.0,
        });
    }
    let block = reduced_block(
        params,
        pump_winding,
        pair.signal.l,
        pair.signal.p,
        pair.idler.p,
        cfg,
    )?;
    Ok(block.amplitude(pair.signal.p, pair.idler.p))
}

fn eval_brute_once(
    params: &NormalizedParams,
    l0: i32,
    l1: i32,
    l2: i32,
    p1_max: u32,
    p2_max: u32,
    r_max: f64,
    panels: usize,
    points: usize,
    n_phi: usize,
) -> Vec<Complex64> {
    let grid = RadialGrid::new(r_max, panels, points);
    let n = grid.len();
    let w0e = params.analysis_width_eff();
    let r1 = radial_table(l1, p1_max, w0e, &grid.nodes);
    let r2 = radial_table(l2, p2_max, w0e, &grid.nodes);
    let pump = CanonicalPump::new(params, l0);

    let w_phi = 2.0 * std::f64::consts::PI / n_phi as f64;
    let mut cos_phi = Vec::with_capacity(n_phi);
    let mut sin_phi = Vec::with_capacity(n_phi);
    let mut e_m_il1 = Vec::with_capacity(n_phi);
    let mut e_m_il2 = Vec::with_capacity(n_phi);
    for k in 0..n_phi {
        let phi = w_phi * k as f64;
        let (s, c) = phi.sin_cos();
        cos_phi.push(c);
        sin_phi.push(s);
        e_m_il1.push(Complex64::from_polar(1.0, -(l1 as f64) * phi));
        e_m_il2.push(Complex64::from_polar(1.0, -(l2 as f64) * phi));
    }

    let mut kern = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        let rs = grid.nodes[i];
        for j in 0..n {
            let ri = grid.nodes[j];
            let mut acc = Complex64::new(0.0, 0.0);
            for ks in 0..n_phi {
                let qsx = rs * cos_phi[ks];
                let qsy = rs * sin_phi[ks];
                let mut inner = Complex64::new(0.0, 0.0);
                for ki in 0..n_phi {
                    let qix = ri * cos_phi[ki];
                    let qiy = ri * sin_phi[ki];
                    let dx = qsx - qix;
                    let dy = qsy - qiy;
                    inner += pump.eval(qsx + qix, qsy + qiy)
                        * w_canonical(dx * dx + dy * dy)
                        * e_m_il2[ki];
                }
                acc += inner * e_m_il1[ks];
            }
            kern[i * n + j] = acc * (w_phi * w_phi);
        }
    }

    contract_block(&kern, &grid, &r1, &r2, l1, l2, Complex64::new(1.0, 0.0))
}

/// Block counterpart of [`amplitude_brute`]; the angular double sum is
/// shared across the radial indices.
pub fn brute_block(
    params: &NormalizedParams,
    l0: i32,
    l1: i32,
    l2: i32,
    p1_max: u32,
    p2_max: u32,
    cfg: &QuadratureConfig,
) -> Result<AmplitudeBlock> {
    cfg.validate()?;
    check_block_indices(l1, l2, p1_max, p2_max)?;
    let r_max = cfg.cutoff_for_modes(params, l1, l2, p1_max, p2_max);
    let n_phi = cfg.angular_count(l1, l2, l0, params);
    let (values, errors) = refine(
        |panels| {
            eval_brute_once(
                params, l0, l1, l2, p1_max, p2_max, r_max, panels, cfg.radial_points, n_phi,
            )
        },
        cfg,
    )?;
    Ok(AmplitudeBlock {
        l1,
        l2,
        l0,
        p1_max,
        p2_max,
        method: Method::Brute4d,
        values,
        errors,
    })
}

/// Overlap amplitude by direct 4D tensor-product quadrature over
/// `(rho_s, phi_s, rho_i, phi_i)`. Oracle use only: intended for small
/// index magnitudes (`|l| <= 6`, `p <= 4`). No selection-rule shortcut is
/// taken; violating pairs come out at the numerical-orthogonality floor.
pub fn amplitude_brute(
    pair: ModePair,
    params: &NormalizedParams,
    pump_winding: i32,
    cfg: &QuadratureConfig,
) -> Result<Amplitude> {
    let block = brute_block(
        params,
        pump_winding,
        pair.signal.l,
        pair.idler.l,
        pair.signal.p,
        pair.idler.p,
        cfg,
    )?;
    Ok(block.amplitude(pair.signal.p, pair.idler.p))
}

/// Weights `P_{l1, l0-l1} = sum_{p1,p2 <= p_max} |C|^2` for
/// `l1 in [-l_max, l_max]`, evaluated in parallel across winding blocks.
pub(crate) fn l_weights(
    params: &NormalizedParams,
    l0: i32,
    l_max: u32,
    p_max: u32,
    cfg: &QuadratureConfig,
) -> Result<Vec<(i32, f64)>> {
    let ls: Vec<i32> = (-(l_max as i32)..=l_max as i32).collect();
    ls.par_iter()
        .map(|&l1| {
            reduced_block(params, l0, l1, p_max, p_max, cfg).map(|b| (l1, b.weight_sum()))
        })
        .collect()
}

/// Truncated modal norm `sum_{|l1| <= l_max} sum_{p1,p2 <= p_max} |C|^2`
/// under the selection rule. Monotone in both truncation bounds and bounded
/// by one up to quadrature error.
pub fn state_norm(
    params: &NormalizedParams,
    l0: i32,
    cfg: &QuadratureConfig,
    l_max: u32,
    p_max: u32,
) -> Result<f64> {
    Ok(l_weights(params, l0, l_max, p_max, cfg)?
        .iter()
        .map(|(_, w)| w)
        .sum())
}

/// Plane integral of `|W|^2` in scaled units by radial quadrature,
/// `(8/pi) int_0^{u_max} sinc^2(u) du`. The sinc^2 tail decays only
/// algebraically, so the cutoff sits at `u = 2e5` (truncation error about
/// 3e-6 relative) with pi-length panels resolving every oscillation.
pub fn w_plane_norm() -> f64 {
    let (xs, ws) = gauss_legendre(6);
    let u_max = 2.0e5;
    let panels = (u_max / std::f64::consts::PI).ceil() as usize;
    let h = u_max / panels as f64;
    let mut acc = 0.0;
    for k in 0..panels {
        let mid = (k as f64 + 0.5) * h;
        for (&x, &w) in xs.iter().zip(&ws) {
            let u = mid + 0.5 * h * x;
            let s = crate::special::sinc(u);
            acc += 0.5 * h * w * s * s;
        }
    }
    acc * 8.0 / std::f64::consts::PI
}

/// Same integral evaluated through the physical phase-matching function of
/// a concrete setup; exercises the unit conversion at the boundary. The
/// result is 4 regardless of the setup.
pub fn w_plane_norm_physical(setup: &PhysicalSetup) -> f64 {
    let l_over_kp = setup.crystal_length / setup.pump_wavenumber();
    let (xs, ws) = gauss_legendre(6);
    let u_max = 2.0e5;
    let panels = (u_max / std::f64::consts::PI).ceil() as usize;
    let h = u_max / panels as f64;
    let mut acc = 0.0;
    for k in 0..panels {
        let mid = (k as f64 + 0.5) * h;
        for (&x, &w) in xs.iter().zip(&ws) {
            let u = mid + 0.5 * h * x;
            let rho = (4.0 * u / l_over_kp).sqrt();
            let wv = crate::modes::phase_match_w(
                crate::setup::TransversePoint::new(rho, 0.0),
                setup,
            );
            // d^2 delta = 2 pi rho drho = 2 pi (2 / (L/k_p)) du
            acc += 0.5 * h * w * wv.norm_sqr() * 2.0 * std::f64::consts::PI * 2.0 / l_over_kp;
        }
    }
    acc
}

/// Norm of the two-photon mode function, `int int |Phi|^2 dq_s dq_i`, by
/// 4D quadrature with Phi evaluated pointwise. The grid lives in the
/// rotated pair `(Q = q_s + q_i, delta = q_s - q_i)` (Jacobian 1/4) because
/// the pump Gaussian confines `Q` while the sinc^2 tail in `delta` must be
/// followed out to `u = |delta|^2/4 ~ 1200` for the 1e-3 target.
pub fn phi_norm(params: &NormalizedParams, l0: i32) -> f64 {
    let pump = CanonicalPump::new(params, l0);
    let q_max = 1.1 * (32.3 / params.b).sqrt();
    let q_grid = RadialGrid::new(q_max, 6, 16);
    let n_q_phi = 16usize;
    let n_d_phi = 16usize;
    let u_max = 1200.0;
    let u_panels = (u_max / std::f64::consts::PI).ceil() as usize;
    let (uxs, uws) = gauss_legendre(6);
    let hu = u_max / u_panels as f64;

    let mut u_nodes = Vec::with_capacity(u_panels * uxs.len());
    for k in 0..u_panels {
        let mid = (k as f64 + 0.5) * hu;
        for (&x, &w) in uxs.iter().zip(&uws) {
            u_nodes.push((mid + 0.5 * hu * x, 0.5 * hu * w));
        }
    }
    let w_qphi = 2.0 * std::f64::consts::PI / n_q_phi as f64;
    let w_dphi = 2.0 * std::f64::consts::PI / n_d_phi as f64;

    let partials: Vec<f64> = (0..q_grid.len())
        .into_par_iter()
        .map(|iq| {
            let qr = q_grid.nodes[iq];
            let wq = q_grid.weights[iq] * qr;
            let mut acc = 0.0;
            for kq in 0..n_q_phi {
                let aq = w_qphi * kq as f64;
                let (sq, cq) = aq.sin_cos();
                let qx = qr * cq;
                let qy = qr * sq;
                for &(u, wu) in &u_nodes {
                    let dr = 2.0 * u.sqrt();
                    for kd in 0..n_d_phi {
                        let ad = w_dphi * kd as f64;
                        let (sd, cd) = ad.sin_cos();
                        let dx = dr * cd;
                        let dy = dr * sd;
                        // Phi evaluated pointwise at the reconstructed pair.
                        let qsx = 0.5 * (qx + dx);
                        let qsy = 0.5 * (qy + dy);
                        let qix = 0.5 * (qx - dx);
                        let qiy = 0.5 * (qy - dy);
                        let ddx = qsx - qix;
                        let ddy = qsy - qiy;
                        let phi = pump.eval(qsx + qix, qsy + qiy)
                            * w_canonical(ddx * ddx + ddy * ddy);
                        // d^2 delta = rho dr dphi = 2 du dphi
                        acc += wq * w_qphi * 2.0 * wu * w_dphi * phi.norm_sqr();
                    }
                }
            }
            acc
        })
        .collect();
    0.25 * partials.iter().sum::<f64>()
}

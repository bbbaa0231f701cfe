//! Random walks on graphs subordinated to a discrete-time counting process.
//!
//! A walker sits on a node and makes one jump of the underlying chain `H`
//! each time the counting process registers an arrival. The `t`-step
//! transition matrix is therefore the Cox series
//!
//! ```text
//! P(t) = sum_{n <= t} Phi^(n)(t) H^n,
//! ```
//!
//! with `Phi^(n)(t)` the state probabilities of the counting process. Two
//! independent evaluation routes are provided: the direct Cox sum over matrix
//! powers ([`cox_transition`]) and the spectral form
//! `P(t) = sum_m G(t, lambda_m) v_m vbar_m^T` built from the scalar relaxation
//! function [`scalar_g`] ([`walk_panel_spectral`]). The walk inherits the
//! memory structure of the counting process: [`kf_walk_residual`] checks the
//! matrix Kolmogorov-Feller difference equation, [`stationary_approach`]
//! quantifies the algebraic relaxation toward the degree-biased stationary
//! state, and [`ct_walk_limit`] evaluates the well-scaled continuous-time
//! limit. Sibuya-driven walks, which satisfy a pure fractional-difference
//! equation, get their own entry points.

use crate::counting::{self, PdtpParams, StatePanel};
use crate::error::{Error, Result};
use crate::gfcalc::{self, CausalSeq, SeqKind};
use crate::graph::SpectralDecomp;
use crate::numkernel;
use nalgebra::DMatrix;
use statrs::function::gamma::gamma;

/// Eigenvalues closer than this are treated as one degenerate group.
pub const EIGENVALUE_GROUP_TOL: f64 = 1e-12;
/// Largest acceptable absolute error in a continuous-time relaxation factor.
/// The factors are probabilities, so this is six orders of magnitude below
/// full scale; demanding more would shrink the usable time range for no
/// practical gain.
pub const CT_WALK_ABS_TOL: f64 = 1e-6;
/// Tolerated deviation of a transition-matrix row sum from 1.
const ROW_SUM_TOL: f64 = 1e-9;

/// Transition matrices `P(0..=t_max)` of a subordinated walk.
///
/// `p[t]` is row-stochastic with `p[0] = I`; rows index the start node.
#[derive(Debug, Clone)]
pub struct WalkPanel {
    pub p: Vec<DMatrix<f64>>,
    pub step_h: f64,
}

impl WalkPanel {
    pub fn t_max(&self) -> usize {
        self.p.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.p[0].nrows()
    }

    pub fn value(&self, t: usize) -> &DMatrix<f64> {
        &self.p[t]
    }
}

/// Validates that `h` is square and row-stochastic (row sums 1 within
/// `1e-9`, entries nonnegative up to rounding).
pub(crate) fn check_stochastic(h: &DMatrix<f64>) -> Result<()> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(Error::DimMismatch {
            needed: n,
            got: h.ncols(),
        });
    }
    for i in 0..n {
        let mut sum = 0.0;
        for j in 0..n {
            let x = h[(i, j)];
            if x < -1e-12 {
                return Err(Error::invalid_params(format!(
                    "transition entry ({i}, {j}) is negative: {x}"
                )));
            }
            sum += x;
        }
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::invalid_params(format!(
                "transition row {i} sums to {sum}, expected 1"
            )));
        }
    }
    Ok(())
}

/// Cox-series transition panel `P(t) = sum_{n <= t} Phi^(n)(t) H^n`.
///
/// Works for any row-stochastic `h` (graph walks, directed shifts, absorbing
/// chains) and any state panel. The panel must cover arrivals `n` and times
/// `t` up to `t_max`; otherwise the truncated sum would be silently wrong,
/// so the shortfall is reported as [`Error::HorizonShort`].
pub fn cox_transition(
    states: &StatePanel,
    h: &DMatrix<f64>,
    t_max: usize,
) -> Result<WalkPanel> {
    check_stochastic(h)?;
    let available = states.t_max.min(states.n_max);
    if available < t_max {
        return Err(Error::HorizonShort {
            needed: t_max,
            available,
        });
    }
    let n = h.nrows();
    let mut powers = Vec::with_capacity(t_max + 1);
    powers.push(DMatrix::<f64>::identity(n, n));
    for k in 1..=t_max {
        let next = &powers[k - 1] * h;
        powers.push(next);
    }
    let mut p = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        let mut m = DMatrix::<f64>::zeros(n, n);
        for k in 0..=t {
            let w = states.value(k, t);
            if w != 0.0 {
                m += w * &powers[k];
            }
        }
        p.push(m);
    }
    Ok(WalkPanel {
        p,
        step_h: states.step_h,
    })
}

/// Scalar relaxation function `G(t, lambda) = sum_n lambda^n Phi^(n)(t)` of
/// the counting process, evaluated through its generating function
///
/// ```text
/// G(u, lambda) = (D(u) - u) / [(1 - u) (D(u) - lambda u)],
/// ```
///
/// where `D(u) = (1 + (1-u)^alpha / xi)^nu` is the reciprocal of the shifted
/// waiting generating function. `G(t, 1) = 1` for all `t` (stochasticity) and
/// `G(t, 0)` is the survival probability; applied to an eigenvalue of the
/// walk matrix it gives the decay of that spectral component.
pub fn scalar_g(params: &PdtpParams, lambda: f64, t_max: usize) -> Result<Vec<f64>> {
    if !lambda.is_finite() || lambda.abs() > 1.0 + 1e-12 {
        return Err(Error::invalid_params(format!(
            "eigenvalue must lie in [-1, 1], got {lambda}"
        )));
    }
    let lambda = lambda.clamp(-1.0, 1.0);
    let d = counting::d_series(params, t_max + 1)?;
    let mut num = d.clone();
    let mut den = d;
    num.kind = SeqKind::Signed;
    den.kind = SeqKind::Signed;
    if t_max >= 1 {
        num.coeffs[1] -= 1.0;
        den.coeffs[1] -= lambda;
    }
    let ratio = gfcalc::convolve(&num, &gfcalc::series_pow(&den, -1.0)?)?;
    Ok(gfcalc::cumulate(&ratio).coeffs)
}

/// Groups the (descending) eigenvalue ladder into degenerate clusters and
/// attaches each cluster's spectral projector `sum_{m in g} v_m vbar_m^T`.
fn eigen_groups(decomp: &SpectralDecomp) -> Vec<(f64, DMatrix<f64>)> {
    let n = decomp.stationary.len();
    let mut groups: Vec<(f64, DMatrix<f64>)> = Vec::new();
    for m in 0..n {
        let lam = decomp.eigenvalues[m];
        let proj = decomp.right.column(m) * decomp.left.column(m).transpose();
        match groups.last_mut() {
            Some((lead, q)) if (*lead - lam).abs() <= EIGENVALUE_GROUP_TOL => *q += proj,
            _ => groups.push((lam, proj)),
        }
    }
    groups
}

/// Spectral transition panel `P(t) = sum_m G(t, lambda_m) v_m vbar_m^T`.
///
/// Degenerate eigenvalues share one scalar-G evaluation, so the cost is one
/// `O(t_max^2)` series per *distinct* eigenvalue.
pub fn walk_panel_spectral(
    params: &PdtpParams,
    decomp: &SpectralDecomp,
    t_max: usize,
) -> Result<WalkPanel> {
    let n = decomp.stationary.len();
    let mut p = vec![DMatrix::<f64>::zeros(n, n); t_max + 1];
    for (lam, q) in eigen_groups(decomp) {
        let g = scalar_g(params, lam, t_max)?;
        for (t, pt) in p.iter_mut().enumerate() {
            *pt += g[t] * &q;
        }
    }
    Ok(WalkPanel {
        p,
        step_h: params.step_h,
    })
}

/// Residuals of the walk Kolmogorov-Feller difference equation
///
/// ```text
/// sum_k D(k) P(t-k) - H P(t-1) - M(t) I = 0,      P(-1) := 0,
/// ```
///
/// one matrix per `t <= panel.t_max()`. Every entry of every residual should
/// vanish to solver accuracy when `panel` was produced by [`cox_transition`]
/// or [`walk_panel_spectral`] with the same parameters and chain.
pub fn kf_walk_residual(
    params: &PdtpParams,
    panel: &WalkPanel,
    h: &DMatrix<f64>,
) -> Result<Vec<DMatrix<f64>>> {
    check_stochastic(h)?;
    let n = panel.dim();
    if h.nrows() != n {
        return Err(Error::DimMismatch {
            needed: n,
            got: h.nrows(),
        });
    }
    let t_max = panel.t_max();
    let kernels = counting::memory_kernels(params, t_max)?;
    let eye = DMatrix::<f64>::identity(n, n);
    let mut out = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        let mut r = DMatrix::<f64>::zeros(n, n);
        for k in 0..=t {
            r += kernels.d.coeffs[k] * &panel.p[t - k];
        }
        if t >= 1 {
            r -= h * &panel.p[t - 1];
        }
        r -= kernels.m.coeffs[t] * &eye;
        out.push(r);
    }
    Ok(out)
}

/// Relaxation of a subordinated walk toward its stationary distribution.
#[derive(Debug, Clone)]
pub struct StationaryApproach {
    /// Worst-case total-variation distance to stationarity,
    /// `d(t) = max_i (1/2) sum_j |P_ij(t) - pi_j|`, for `t = 0..=t_max`.
    pub distances: Vec<f64>,
    /// Log-log slope of `d(t)` fitted on the requested trailing window;
    /// expected near `-alpha` for the algebraic memory regime.
    pub slope: f64,
    /// Coefficient matrix `C` of the predicted algebraic tail
    /// `P(t) - Pi ~ C t^{-alpha}` with
    /// `C = (nu / xi) / Gamma(1 - alpha) * sum_{m >= 2} v_m vbar_m^T / (1 - lambda_m)`.
    pub asymptote: DMatrix<f64>,
}

/// Distance to stationarity, its fitted decay exponent over
/// `[fit_from, t_max]`, and the predicted algebraic asymptote.
///
/// Requires `alpha < 1` (at `alpha = 1` the relaxation is exponential and
/// the algebraic prediction is meaningless) and a non-bipartite spectrum so
/// that `d(t) -> 0`.
pub fn stationary_approach(
    params: &PdtpParams,
    decomp: &SpectralDecomp,
    t_max: usize,
    fit_from: usize,
) -> Result<StationaryApproach> {
    if params.alpha >= 1.0 {
        return Err(Error::UnsupportedParams {
            message: "algebraic stationary approach requires alpha < 1".into(),
        });
    }
    let groups = eigen_groups(decomp);
    if let Some((bottom, _)) = groups.last() {
        if *bottom <= -1.0 + crate::graph::BIPARTITE_TOL {
            return Err(Error::BipartiteSpectrum { eigenvalue: *bottom });
        }
    }
    let n = decomp.stationary.len();

    let mut decaying: Vec<(Vec<f64>, DMatrix<f64>)> = Vec::new();
    let mut asymptote = DMatrix::<f64>::zeros(n, n);
    let prefactor = params.nu / params.xi / gamma(1.0 - params.alpha);
    for (lam, q) in groups {
        if lam == 1.0 {
            continue;
        }
        decaying.push((scalar_g(params, lam, t_max)?, q.clone()));
        asymptote += (prefactor / (1.0 - lam)) * q;
    }

    let mut distances = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        let mut worst = 0.0f64;
        for i in 0..n {
            let mut tv = 0.0;
            for j in 0..n {
                let mut dev = 0.0;
                for (g, q) in &decaying {
                    dev += g[t] * q[(i, j)];
                }
                tv += dev.abs();
            }
            worst = worst.max(0.5 * tv);
        }
        distances.push(worst);
    }

    let seq = CausalSeq {
        coeffs: distances.clone(),
        step_h: params.step_h,
        kind: SeqKind::Signed,
    };
    let slope = counting::tail_exponent(&seq, fit_from, t_max)?;
    Ok(StationaryApproach {
        distances,
        slope,
        asymptote,
    })
}

/// Transition panel of a walk driven by Sibuya(`alpha`) waiting times:
/// the Cox series over the Sibuya state panel.
pub fn sibuya_walk(alpha: f64, h: &DMatrix<f64>, t_max: usize) -> Result<WalkPanel> {
    let states = counting::sibuya_state_panel(alpha, t_max, t_max)?;
    cox_transition(&states, h, t_max)
}

/// Residuals of the fractional-difference equation satisfied by a
/// Sibuya-driven walk,
///
/// ```text
/// sum_k w_alpha(k) H P(t-k) - (H - I) P(t) - c_alpha(t) I = 0,
/// ```
///
/// where `w_alpha(k) = (-1)^k C(alpha, k)` are the fractional-difference
/// weights and `c_alpha(t) = (-1)^t C(alpha - 1, t)` the fractional-integral
/// boundary weights. Holds for every `t >= 0` including `t = 0`.
pub fn sibuya_kf_residual(
    alpha: f64,
    panel: &WalkPanel,
    h: &DMatrix<f64>,
) -> Result<Vec<DMatrix<f64>>> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid_params(format!(
            "Sibuya exponent must lie in (0, 1], got {alpha}"
        )));
    }
    check_stochastic(h)?;
    let n = panel.dim();
    if h.nrows() != n {
        return Err(Error::DimMismatch {
            needed: n,
            got: h.nrows(),
        });
    }
    let t_max = panel.t_max();
    let diff = gfcalc::frac_diff_coeffs(alpha, t_max + 1);
    let boundary = gfcalc::frac_diff_coeffs(alpha - 1.0, t_max + 1);
    let hp: Vec<DMatrix<f64>> = panel.p.iter().map(|p| h * p).collect();
    let eye = DMatrix::<f64>::identity(n, n);
    let mut out = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        let mut r = DMatrix::<f64>::zeros(n, n);
        for k in 0..=t {
            r += diff.coeffs[k] * &hp[t - k];
        }
        r -= &hp[t] - &panel.p[t];
        r -= boundary.coeffs[t] * &eye;
        out.push(r);
    }
    Ok(out)
}

/// Well-scaled continuous-time limit of the walk transition matrix at time
/// `t`, available for `nu = 1`:
///
/// ```text
/// P(t) = Pi + sum_{m >= 2} E_alpha(-xi0 (1 - lambda_m) t^alpha) v_m vbar_m^T,
/// ```
///
/// the Mittag-Leffler relaxation of each spectral component. For `nu != 1`
/// the per-mode relaxation has no single-function closed form and
/// [`Error::UnsupportedParams`] is returned.
///
/// The entries are probabilities, so each Mittag-Leffler evaluation is
/// accepted only while its absolute error estimate stays below
/// [`CT_WALK_ABS_TOL`]; the alternating series eventually exhausts f64
/// significance as `xi0 (1 - lambda) t^alpha` grows, and that failure is
/// reported as `NON_CONVERGED` instead of returning noise.
pub fn ct_walk_limit(
    alpha: f64,
    nu: f64,
    xi0: f64,
    decomp: &SpectralDecomp,
    t: f64,
) -> Result<DMatrix<f64>> {
    if !(alpha > 0.0 && alpha <= 1.0) || !(xi0 > 0.0) || !xi0.is_finite() {
        return Err(Error::invalid_params(format!(
            "need 0 < alpha <= 1 and xi0 > 0, got alpha = {alpha}, xi0 = {xi0}"
        )));
    }
    if nu != 1.0 {
        return Err(Error::UnsupportedParams {
            message: format!(
                "continuous-time walk limit is Mittag-Leffler only for nu = 1, got nu = {nu}"
            ),
        });
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid_params(format!(
            "time must be finite and nonnegative, got {t}"
        )));
    }
    let n = decomp.stationary.len();
    let mut out = DMatrix::<f64>::zeros(n, n);
    for (lam, q) in eigen_groups(decomp) {
        let x = xi0 * (1.0 - lam) * t.powf(alpha);
        let relax = numkernel::prabhakar_e(alpha, 1.0, 1.0, -x)?;
        if relax.abs_error_estimate > CT_WALK_ABS_TOL {
            return Err(Error::NonConverged {
                partial: relax,
                context: "ct_walk_limit: Mittag-Leffler relaxation lost significance",
            });
        }
        out += relax.value * q;
    }
    Ok(out)
}

/// Relaxed initial condition: the steady state reached by running the
/// geometric resolvent `epsilon sum_{k >= 0} (1 - epsilon)^k H^k`, i.e.
///
/// ```text
/// P(0) = Pi + epsilon sum_{m >= 2} v_m vbar_m^T / (1 - lambda_m (1 - epsilon)).
/// ```
///
/// `epsilon = 1` reproduces the sharp start `P(0) = I`; `epsilon -> 0`
/// relaxes all the way to the stationary projector. Rows always sum to 1.
pub fn initial_defect(decomp: &SpectralDecomp, epsilon: f64) -> Result<DMatrix<f64>> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::invalid_params(format!(
            "defect strength must lie in (0, 1], got {epsilon}"
        )));
    }
    let mut out = decomp.stationary_projector();
    for (lam, q) in eigen_groups(decomp) {
        if lam == 1.0 {
            continue;
        }
        out += (epsilon / (1.0 - lam * (1.0 - epsilon))) * q;
    }
    Ok(out)
}

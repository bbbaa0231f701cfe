//! Discrete-time renewal counting processes of Prabhakar type.
//!
//! The central object is the waiting-time law with generating function
//!
//! ```text
//! theta(u) = u * xi^nu / (xi + (1-u)^alpha)^nu ,   0 < alpha <= 1, nu > 0, xi > 0,
//! ```
//!
//! which interpolates between the Bernoulli process (`alpha = nu = 1`, a
//! geometric waiting time) and heavy-tailed fractional-Bernoulli behavior
//! (`theta(t) ~ t^{-alpha-1}` for `alpha < 1`). This module computes the
//! waiting pmf three independent ways (coefficient extraction, and two
//! hypergeometric-type m-series valid on complementary xi ranges), the
//! state-probability panel `Phi^{(n)}(t) = P(N(t) = n)`, the memory kernels of
//! the associated Kolmogorov-Feller difference equation together with the
//! residual of that equation, expected arrivals, log-log tail-exponent fits,
//! and the Sibuya building blocks (pmf, survival, state panel, hitting
//! probabilities) used by heavy-tailed random walks.

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::gfcalc::{self, CausalSeq, SeqKind};
use crate::numkernel::{KahanSum, SeriesValue};

/// Absolute tolerance for snapping near-integer exponents.
pub(crate) const INTEGER_SNAP_TOL: f64 = 1e-9;

/// Term cap for the branch m-series.
const BRANCH_TERM_CAP: usize = 100_000;
/// Relative term threshold for branch-series truncation.
const BRANCH_REL_TOL: f64 = 1e-20;
/// Consecutive small terms required before a branch series is truncated.
/// A single term can vanish exactly (a rising factorial hitting a nonpositive
/// integer), so one small term is not evidence of convergence.
const BRANCH_STREAK: usize = 3;

/// `ceil(x)` that treats values within [`INTEGER_SNAP_TOL`] of an integer as
/// that integer. Guards against products like `alpha * nu` landing a few ulps
/// above an exact integer and silently shifting the kernel order by one.
pub(crate) fn effective_ceil(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= INTEGER_SNAP_TOL {
        r
    } else {
        x.ceil()
    }
}

/// Parameters of the Prabhakar-type discrete-time renewal process.
///
/// Constructed through [`PdtpParams::new`] (unit grid) or
/// [`PdtpParams::with_scaling`] (grid spacing `h` with the well-scaled rate
/// `xi = xi0 * h^alpha`, the regime in which the process converges to its
/// continuous-time limit as `h -> 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdtpParams {
    /// Memory exponent, `0 < alpha <= 1`. `alpha = 1` removes the memory.
    pub alpha: f64,
    /// Prabhakar power, `nu > 0`. `alpha = nu = 1` is the Bernoulli process.
    pub nu: f64,
    /// Rate-like parameter on the discrete grid, `xi > 0`.
    pub xi: f64,
    /// Continuum rate when constructed through the scaling `xi = xi0 h^alpha`.
    pub xi0: Option<f64>,
    /// Grid spacing (1 unless constructed through the scaling limit).
    pub step_h: f64,
}

impl PdtpParams {
    /// Process on the unit time grid.
    pub fn new(alpha: f64, nu: f64, xi: f64) -> Result<Self> {
        Self {
            alpha,
            nu,
            xi,
            xi0: None,
            step_h: 1.0,
        }
        .validated()
    }

    /// Process on a grid of spacing `h` with the well-scaled rate
    /// `xi = xi0 * h^alpha`.
    pub fn with_scaling(alpha: f64, nu: f64, xi0: f64, h: f64) -> Result<Self> {
        if !(xi0 > 0.0) || !xi0.is_finite() {
            return Err(Error::invalid_params(format!(
                "xi0 must be positive and finite, got {xi0}"
            )));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::invalid_params(format!(
                "step h must be positive and finite, got {h}"
            )));
        }
        Self {
            alpha,
            nu,
            xi: xi0 * h.powf(alpha),
            xi0: Some(xi0),
            step_h: h,
        }
        .validated()
    }

    /// Validates an explicitly supplied `(xi, xi0, h)` triple: the three must
    /// satisfy `xi = xi0 * h^alpha` to within `1e-12 * max(1, xi)`.
    pub fn with_explicit(alpha: f64, nu: f64, xi: f64, xi0: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::invalid_params(format!(
                "step h must be positive and finite, got {h}"
            )));
        }
        let implied = xi0 * h.powf(alpha);
        if (xi - implied).abs() > 1e-12 * xi.abs().max(1.0) {
            return Err(Error::invalid_params(format!(
                "inconsistent scaling: xi = {xi} but xi0 * h^alpha = {implied}"
            )));
        }
        Self {
            alpha,
            nu,
            xi,
            xi0: Some(xi0),
            step_h: h,
        }
        .validated()
    }

    fn validated(self) -> Result<Self> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) || !self.alpha.is_finite() {
            return Err(Error::invalid_params(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if !(self.nu > 0.0) || !self.nu.is_finite() {
            return Err(Error::invalid_params(format!(
                "nu must be positive and finite, got {}",
                self.nu
            )));
        }
        if !(self.xi > 0.0) || !self.xi.is_finite() {
            return Err(Error::invalid_params(format!(
                "xi must be positive and finite, got {}",
                self.xi
            )));
        }
        Ok(self)
    }

    /// Success probability `p = xi / (1 + xi)` of the Bernoulli reduction.
    pub fn p(&self) -> f64 {
        self.xi / (1.0 + self.xi)
    }

    /// Failure probability `q = 1 / (1 + xi)`.
    pub fn q(&self) -> f64 {
        1.0 / (1.0 + self.xi)
    }
}

/// Convergence branch of the waiting-pmf m-series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Expansion in powers of `xi`; converges for `0 < xi < 1`.
    SmallXi,
    /// Expansion in powers of `1/xi`; converges for `xi > 1`.
    LargeXi,
}

/// Which process a state panel was computed for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PanelParams {
    Pdtp(PdtpParams),
    Sibuya { alpha: f64 },
}

/// State probabilities `phi[n][t] = P(N(t) = n)` on a rectangular grid,
/// rows `n = 0..=n_max`, columns `t = 0..=t_max`.
#[derive(Debug, Clone)]
pub struct StatePanel {
    pub phi: Vec<Vec<f64>>,
    pub n_max: usize,
    pub t_max: usize,
    pub step_h: f64,
    pub params: PanelParams,
}

impl StatePanel {
    pub fn value(&self, n: usize, t: usize) -> f64 {
        self.phi[n][t]
    }

    /// `sum_{n <= n_max} phi[n][t]`; equals 1 (up to roundoff) when
    /// `n_max >= t` because at most `t` arrivals fit into `t` steps.
    pub fn column_sum(&self, t: usize) -> f64 {
        let mut acc = KahanSum::new();
        for row in &self.phi {
            acc.add(row[t]);
        }
        acc.value()
    }
}

/// Memory kernels of the Kolmogorov-Feller difference equation.
///
/// With `D(u) = (1 + (1-u)^alpha / xi)^nu` (the reciprocal of the shifted
/// waiting generating function) the equation for the state probabilities reads
///
/// ```text
/// sum_k D(k) Phi^{(n)}(t-k) = Phi^{(n-1)}(t-1) + delta_{n0} M(t),
/// ```
///
/// where `M` has generating function `(D(u) - u) / (1 - u)`. The cumulative
/// kernel `K0(t) = sum_{k<=t} D(k)` and the auxiliary kernel `B` with
/// generating function `xi^nu D(u) (1-u)^{-ceil(alpha nu)}` provide two
/// alternative factorizations of the same operator: `M(t) = K0(t) - 1` for
/// `t >= 1`, and `K0` equals the convolution of `B / xi^nu` with the
/// difference weights of order `ceil(alpha nu) - 1`.
#[derive(Debug, Clone)]
pub struct MemoryKernels {
    /// Renewal-equation kernel `M`; `M(0) = ((1+xi)/xi)^nu`.
    pub m: CausalSeq,
    /// Cumulative kernel `K0 = prefix sums of D`.
    pub k0: CausalSeq,
    /// Auxiliary kernel `B`, coefficients of `xi^nu D(u) (1-u)^{-ceil(alpha nu)}`.
    pub b: CausalSeq,
    /// Inverse-waiting kernel `D`, coefficients of `(1 + (1-u)^alpha / xi)^nu`.
    pub d: CausalSeq,
}

/// Coefficients of the scaled base `A(u) = 1 + (1-u)^alpha / xi`.
///
/// Powers are always taken of this scaled form: its constant term is
/// `(1+xi)/xi`, so `A^{-mu}` starts from `(xi/(1+xi))^mu`, which stays
/// representable for the deep panel rows where the unscaled
/// `(xi + (1-u)^alpha)^{-mu}` route would need the overflowing factor
/// `xi^mu` explicitly.
fn scaled_base(alpha: f64, xi: f64, len: usize, step_h: f64) -> CausalSeq {
    let mut a = gfcalc::frac_diff_coeffs(alpha, len);
    for c in a.coeffs.iter_mut() {
        *c /= xi;
    }
    a.coeffs[0] += 1.0;
    a.step_h = step_h;
    a
}

/// Coefficients of `phi^(mu)(u) = (xi / (xi + (1-u)^alpha))^mu = A(u)^{-mu}`.
///
/// For `mu = nu` this is the generating function of the waiting pmf shifted
/// left by one step. Rows deeper than `mu * ln((1+xi)/xi) ~ 700` underflow at
/// the leading coefficient; such probabilities are below `1e-304` on the
/// stored horizon and come back as exact zeros.
pub(crate) fn phi_mu_coeffs(alpha: f64, xi: f64, mu: f64, len: usize, step_h: f64) -> Result<Vec<f64>> {
    Ok(gfcalc::series_pow(&scaled_base(alpha, xi, len, step_h), -mu)?.coeffs)
}

/// Kernel `D`: coefficients of `(1 + (1-u)^alpha / xi)^nu`.
pub(crate) fn d_series(params: &PdtpParams, len: usize) -> Result<CausalSeq> {
    let base = scaled_base(params.alpha, params.xi, len, params.step_h);
    let mut d = gfcalc::series_pow(&base, params.nu)?;
    d.kind = SeqKind::Kernel;
    Ok(d)
}

/// Waiting-time pmf `theta(0..=t_max)`: `theta(0) = 0` and
/// `theta(t) = phi^{(nu)}(t-1)`, extracted from the generating function by the
/// series-power recurrence (the reference route, stable for every `xi > 0`).
pub fn pdtp_waiting_pmf(params: &PdtpParams, t_max: usize) -> Result<CausalSeq> {
    if t_max < 1 {
        return Err(Error::invalid_params(
            "waiting pmf needs t_max >= 1 (theta is supported on t >= 1)",
        ));
    }
    let phi = phi_mu_coeffs(params.alpha, params.xi, params.nu, t_max, params.step_h)?;
    let mut coeffs = Vec::with_capacity(t_max + 1);
    coeffs.push(0.0);
    coeffs.extend_from_slice(&phi);
    CausalSeq::new(coeffs, params.step_h, SeqKind::Pmf)
}

/// Waiting-time pmf through the hypergeometric-type m-series of the chosen
/// convergence branch: an independent evaluation route used to cross-validate
/// [`pdtp_waiting_pmf`].
///
/// Small-`xi` branch (`0 < xi < 1`):
///
/// ```text
/// phi(t) = xi^nu / t! * sum_m (-1)^m (nu)_m xi^m / m! * (alpha(m+nu))_t
/// ```
///
/// Large-`xi` branch (`xi > 1`):
///
/// ```text
/// phi(t) = (-1)^t / t! * sum_m (-1)^m (nu)_m xi^{-m} / m! * (alpha m - t + 1)_t
/// ```
///
/// Both series alternate, and near the `xi = 1` boundary their intermediate
/// terms exceed the sum by 13+ orders of magnitude; terms and partial sums are
/// therefore carried in double-double precision, which keeps the result
/// accurate to ~1e-15 absolute for `t <= 64`. At `xi = 1` neither expansion
/// converges and [`Error::BranchDomain`] is returned.
pub fn pdtp_waiting_pmf_branch(
    params: &PdtpParams,
    t_max: usize,
    branch: Branch,
) -> Result<CausalSeq> {
    match branch {
        Branch::SmallXi => {
            if !(params.xi > 0.0 && params.xi < 1.0) {
                return Err(Error::BranchDomain {
                    xi: params.xi,
                    branch: "small-xi",
                    domain: "0 < xi < 1",
                });
            }
        }
        Branch::LargeXi => {
            if !(params.xi > 1.0) {
                return Err(Error::BranchDomain {
                    xi: params.xi,
                    branch: "large-xi",
                    domain: "xi > 1",
                });
            }
        }
    }
    if t_max < 1 {
        return Err(Error::invalid_params(
            "waiting pmf needs t_max >= 1 (theta is supported on t >= 1)",
        ));
    }
    let mut coeffs = vec![0.0; t_max + 1];
    for (t, slot) in coeffs.iter_mut().enumerate().skip(1) {
        *slot = match branch {
            Branch::SmallXi => branch_phi_small(params, t - 1)?,
            Branch::LargeXi => branch_phi_large(params, t - 1)?,
        };
    }
    CausalSeq::new(coeffs, params.step_h, SeqKind::Pmf)
}

/// Sums an alternating double-double branch series with the 3-consecutive
/// small-term stopping rule. `rising(m)` returns the rising-factorial part of
/// term `m`; the running weight starts at 1 and is advanced from term `m` to
/// `m + 1` by `weight_update`.
fn sum_branch_series(
    mut weight_update: impl FnMut(usize, Dd) -> Dd,
    mut rising: impl FnMut(usize) -> Dd,
    context: &'static str,
) -> Result<Dd> {
    let mut sum = Dd::ZERO;
    let mut weight = Dd::ONE;
    let mut streak = 0usize;
    for m in 0..BRANCH_TERM_CAP {
        let term = weight.mul(rising(m));
        let term = if m % 2 == 1 { term.neg() } else { term };
        if !term.hi.is_finite() {
            return Err(Error::NonConverged {
                partial: SeriesValue {
                    value: sum.to_f64(),
                    abs_error_estimate: f64::INFINITY,
                    terms_used: m,
                    converged: false,
                },
                context,
            });
        }
        sum = sum.add(term);
        let reference = sum.abs().max(f64::MIN_POSITIVE);
        if m >= 8 && term.abs() <= BRANCH_REL_TOL * reference {
            streak += 1;
            if streak >= BRANCH_STREAK {
                return Ok(sum);
            }
        } else {
            streak = 0;
        }
        weight = weight_update(m, weight);
    }
    Err(Error::NonConverged {
        partial: SeriesValue {
            value: sum.to_f64(),
            abs_error_estimate: f64::NAN,
            terms_used: BRANCH_TERM_CAP,
            converged: false,
        },
        context,
    })
}

fn branch_phi_small(params: &PdtpParams, t: usize) -> Result<f64> {
    let (alpha, nu, xi) = (params.alpha, params.nu, params.xi);
    let sum = sum_branch_series(
        // weight_{m+1} = weight_m * (nu + m) * xi / (m + 1)
        |m, w| {
            w.mul(Dd::exact_sum(nu, m as f64))
                .mul_f64(xi)
                .div_f64((m + 1) as f64)
        },
        // (alpha (m + nu))_t
        |m| {
            let x = Dd::exact_sum(m as f64, nu).mul_f64(alpha);
            let mut r = Dd::ONE;
            for j in 0..t {
                r = r.mul(x.add_f64(j as f64));
            }
            r
        },
        "small-xi waiting-pmf branch series",
    )?;
    let mut v = sum;
    for j in 1..=t {
        v = v.div_f64(j as f64);
    }
    Ok(v.to_f64() * xi.powf(nu))
}

fn branch_phi_large(params: &PdtpParams, t: usize) -> Result<f64> {
    let (alpha, nu, xi) = (params.alpha, params.nu, params.xi);
    let sum = sum_branch_series(
        // weight_{m+1} = weight_m * (nu + m) / (xi * (m + 1))
        |m, w| {
            w.mul(Dd::exact_sum(nu, m as f64))
                .div_f64(xi)
                .div_f64((m + 1) as f64)
        },
        // (alpha m - t + 1)_t
        |m| {
            let x = Dd::exact_prod(alpha, m as f64).add_f64(1.0 - t as f64);
            let mut r = Dd::ONE;
            for j in 0..t {
                r = r.mul(x.add_f64(j as f64));
            }
            r
        },
        "large-xi waiting-pmf branch series",
    )?;
    let mut v = sum;
    for j in 1..=t {
        v = v.div_f64(j as f64);
    }
    Ok(if t % 2 == 1 { -v.to_f64() } else { v.to_f64() })
}

/// Prefix sums `P_mu(k) = sum_{j<=k} phi^{(mu)}(j)`.
fn prefix_of_phi_mu(params: &PdtpParams, mu: f64, len: usize) -> Result<Vec<f64>> {
    let phi = phi_mu_coeffs(params.alpha, params.xi, mu, len, params.step_h)?;
    let mut acc = KahanSum::new();
    Ok(phi
        .into_iter()
        .map(|x| {
            acc.add(x);
            acc.value()
        })
        .collect())
}

/// State-probability panel `Phi^{(n)}(t) = P(N(t) = n)` for
/// `n = 0..=min(n_max, t_max)`, `t = 0..=t_max`, via
///
/// ```text
/// Phi^{(n)}(t) = P_{nu n}(t - n) - P_{nu(n+1)}(t - n - 1),
/// ```
///
/// where `P_mu` are the prefix sums of the `phi^{(mu)}` coefficients and
/// `P_0 = 1`. Rows requested beyond `t_max` are dropped (at most `t` arrivals
/// fit into `t` steps, so those rows vanish identically on the horizon).
/// Column sums telescope to exactly 1 once `n_max >= t`.
pub fn pdtp_state_panel(params: &PdtpParams, n_max: usize, t_max: usize) -> Result<StatePanel> {
    let n_eff = n_max.min(t_max);
    let len = t_max + 1;
    let mut rows = Vec::with_capacity(n_eff + 1);
    // P_{nu * 0} = all ones.
    let mut p_cur: Vec<f64> = vec![1.0; len];
    for n in 0..=n_eff {
        let p_next = prefix_of_phi_mu(params, params.nu * (n as f64 + 1.0), len)?;
        let mut row = vec![0.0; len];
        for (t, slot) in row.iter_mut().enumerate().skip(n) {
            let leading = p_cur[t - n];
            let trailing = if t > n { p_next[t - n - 1] } else { 0.0 };
            *slot = leading - trailing;
        }
        rows.push(row);
        p_cur = p_next;
    }
    Ok(StatePanel {
        phi: rows,
        n_max: n_eff,
        t_max,
        step_h: params.step_h,
        params: PanelParams::Pdtp(*params),
    })
}

/// Survival function `Phi^{(0)}(t) = P(no arrival up to t) = 1 - sum_{k<=t} theta(k)`.
pub fn pdtp_survival(params: &PdtpParams, t_max: usize) -> Result<CausalSeq> {
    let len = t_max + 1;
    let mut coeffs = vec![1.0; len];
    if t_max >= 1 {
        let phi = phi_mu_coeffs(params.alpha, params.xi, params.nu, t_max, params.step_h)?;
        let mut acc = KahanSum::new();
        for t in 1..len {
            acc.add(phi[t - 1]);
            coeffs[t] = 1.0 - acc.value();
        }
    }
    CausalSeq::new(coeffs, params.step_h, SeqKind::Signed)
}

/// Memory kernels `M`, `K0`, `B`, `D` of the Kolmogorov-Feller difference
/// equation, all on `t = 0..=t_max`. See [`MemoryKernels`] for definitions.
pub fn memory_kernels(params: &PdtpParams, t_max: usize) -> Result<MemoryKernels> {
    let len = t_max + 1;
    let d = d_series(params, len)?;
    let mut k0 = gfcalc::cumulate(&d);
    k0.kind = SeqKind::Kernel;
    let mut m = k0.clone();
    for c in m.coeffs.iter_mut().skip(1) {
        *c -= 1.0;
    }
    let ceil_an = effective_ceil(params.alpha * params.nu);
    let iw = gfcalc::frac_diff_coeffs(-ceil_an, len);
    let scale = params.xi.powf(params.nu);
    let mut b = CausalSeq {
        coeffs: gfcalc::conv_raw(&d.coeffs, &iw.coeffs, len),
        step_h: params.step_h,
        kind: SeqKind::Kernel,
    };
    for c in b.coeffs.iter_mut() {
        *c *= scale;
    }
    Ok(MemoryKernels { m, k0, b, d })
}

/// Residual of the Kolmogorov-Feller difference equation,
///
/// ```text
/// residual[n][t] = sum_{k<=t} D(k) Phi^{(n)}(t-k)
///                  - Phi^{(n-1)}(t-1) - delta_{n0} M(t),
/// ```
///
/// which vanishes (to roundoff) when the panel was computed from the same
/// parameters. Kernels are built internally at the panel horizon.
pub fn kf_residual(params: &PdtpParams, panel: &StatePanel) -> Result<Vec<Vec<f64>>> {
    let kernels = memory_kernels(params, panel.t_max)?;
    kf_residual_with(&kernels, panel)
}

/// Same as [`kf_residual`] but with caller-supplied kernels; returns
/// [`Error::DimMismatch`] when the kernel horizon is shorter than the panel's.
pub fn kf_residual_with(kernels: &MemoryKernels, panel: &StatePanel) -> Result<Vec<Vec<f64>>> {
    let needed = panel.t_max + 1;
    if kernels.d.len() < needed {
        return Err(Error::DimMismatch {
            needed,
            got: kernels.d.len(),
        });
    }
    let d = &kernels.d.coeffs;
    let m = &kernels.m.coeffs;
    let mut out = Vec::with_capacity(panel.n_max + 1);
    for n in 0..=panel.n_max {
        let row = &panel.phi[n];
        let mut res = Vec::with_capacity(needed);
        for t in 0..needed {
            let mut acc = KahanSum::new();
            for k in 0..=t {
                acc.add(d[k] * row[t - k]);
            }
            let mut r = acc.value();
            if n == 0 {
                r -= m[t];
            } else if t >= 1 {
                r -= panel.phi[n - 1][t - 1];
            }
            res.push(r);
        }
        out.push(res);
    }
    Ok(out)
}

/// Expected number of arrivals `<N(t)>` via the renewal identity: the arrival
/// rate has generating function `theta / (1 - theta)`, and the expectation is
/// its prefix sum. Grows like `(xi/nu) t^alpha / Gamma(1+alpha)` for large `t`.
pub fn expected_arrivals(params: &PdtpParams, t_max: usize) -> Result<CausalSeq> {
    let theta = pdtp_waiting_pmf(params, t_max)?;
    let mut denom = theta.clone();
    for c in denom.coeffs.iter_mut() {
        *c = -*c;
    }
    denom.coeffs[0] += 1.0;
    denom.kind = SeqKind::Kernel;
    let recip = gfcalc::series_pow(&denom, -1.0)?;
    let rate = gfcalc::conv_raw(&theta.coeffs, &recip.coeffs, t_max + 1);
    let mut acc = KahanSum::new();
    let coeffs = rate
        .into_iter()
        .map(|x| {
            acc.add(x);
            acc.value()
        })
        .collect();
    Ok(CausalSeq {
        coeffs,
        step_h: params.step_h,
        kind: SeqKind::Cumulative,
    })
}

/// Least-squares slope of `ln s(t)` against `ln t` over `t_min..=t_max`
/// (indices; the physical grid offset `ln step_h` shifts the regressor by a
/// constant and leaves the slope unchanged). Returns
/// [`Error::NonpositiveSample`] if any sample in the window is `<= 0`.
pub fn tail_exponent(seq: &CausalSeq, t_min: usize, t_max: usize) -> Result<f64> {
    if t_min < 1 || t_min >= t_max || t_max > seq.t_max() {
        return Err(Error::invalid_params(format!(
            "fit window must satisfy 1 <= t_min < t_max <= {}, got [{t_min}, {t_max}]",
            seq.t_max()
        )));
    }
    let n = (t_max - t_min + 1) as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) =
        (KahanSum::new(), KahanSum::new(), KahanSum::new(), KahanSum::new());
    for t in t_min..=t_max {
        let v = seq.coeffs[t];
        if !(v > 0.0) {
            return Err(Error::NonpositiveSample { t, value: v });
        }
        let x = (t as f64).ln();
        let y = v.ln();
        sx.add(x);
        sy.add(y);
        sxx.add(x * x);
        sxy.add(x * y);
    }
    let denom = sxx.value() - sx.value() * sx.value() / n;
    Ok((sxy.value() - sx.value() * sy.value() / n) / denom)
}

/// Sibuya pmf `w(t) = (-1)^{t-1} C(alpha, t)` on `t = 1..=t_max`
/// (`w(1) = alpha`, `w(t+1) = w(t) (t - alpha)/(t + 1)`), the discrete law
/// with tail exponent `alpha`. `alpha = 1` degenerates to a unit delta at 1.
pub fn sibuya_pmf(alpha: f64, t_max: usize) -> Result<CausalSeq> {
    check_sibuya_alpha(alpha)?;
    if t_max < 1 {
        return Err(Error::invalid_params(
            "Sibuya pmf needs t_max >= 1 (supported on t >= 1)",
        ));
    }
    let mut coeffs = vec![0.0; t_max + 1];
    let mut w = alpha;
    for (t, slot) in coeffs.iter_mut().enumerate().skip(1) {
        *slot = w;
        w *= (t as f64 - alpha) / (t as f64 + 1.0);
    }
    CausalSeq::new(coeffs, 1.0, SeqKind::Pmf)
}

/// Sibuya survival `S(t) = P(step > t) = (-1)^t C(alpha - 1, t)`, computed by
/// the recurrence `S(t) = S(t-1) (t - alpha) / t`, `S(0) = 1`. Decays like
/// `t^{-alpha} / Gamma(1 - alpha)`.
pub fn sibuya_survival(alpha: f64, t_max: usize) -> Result<CausalSeq> {
    check_sibuya_alpha(alpha)?;
    let mut coeffs = Vec::with_capacity(t_max + 1);
    let mut s = 1.0;
    coeffs.push(s);
    for t in 1..=t_max {
        s *= (t as f64 - alpha) / t as f64;
        coeffs.push(s);
    }
    CausalSeq::new(coeffs, 1.0, SeqKind::Signed)
}

/// Sibuya counting panel: `phi[n]` holds the coefficients of
/// `(1-u)^{alpha-1} (1 - (1-u)^alpha)^n`, i.e. the probability of exactly `n`
/// renewals of a Sibuya process up to time `t`. Row 0 is the survival
/// sequence; each further row is a convolution with the step pmf.
pub fn sibuya_state_panel(alpha: f64, n_max: usize, t_max: usize) -> Result<StatePanel> {
    check_sibuya_alpha(alpha)?;
    let n_eff = n_max.min(t_max);
    let len = t_max + 1;
    let w = sibuya_pmf(alpha, t_max.max(1))?;
    let mut rows = Vec::with_capacity(n_eff + 1);
    rows.push(sibuya_survival(alpha, t_max)?.coeffs);
    for n in 1..=n_eff {
        let prev = &rows[n - 1];
        rows.push(gfcalc::conv_raw(prev, &w.coeffs, len));
    }
    Ok(StatePanel {
        phi: rows,
        n_max: n_eff,
        t_max,
        step_h: 1.0,
        params: PanelParams::Sibuya { alpha },
    })
}

/// Probability that a Sibuya-stepped walker ever visits lattice site `r`:
/// `tau(r) = (alpha)_r / r!`, computed by `tau(r) = tau(r-1) (alpha + r - 1)/r`.
/// Decays like `r^{alpha-1} / Gamma(alpha)`; sites are transient for `alpha < 1`.
pub fn sibuya_hitting(alpha: f64, r_max: usize) -> Result<Vec<f64>> {
    check_sibuya_alpha(alpha)?;
    let mut tau = Vec::with_capacity(r_max + 1);
    let mut v = 1.0;
    tau.push(v);
    for r in 1..=r_max {
        v *= (alpha + r as f64 - 1.0) / r as f64;
        tau.push(v);
    }
    Ok(tau)
}

fn check_sibuya_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) || !alpha.is_finite() {
        return Err(Error::invalid_params(format!(
            "Sibuya exponent must lie in (0, 1], got {alpha}"
        )));
    }
    Ok(())
}

/// Waiting pmf of the generalized process in which the first-arrival delay is
/// drawn from `f` instead of the unit shift: coefficients of
/// `f(u) * phi^{(nu)}(u)`. Requires `f(0) = 0` (strictly positive delays);
/// `f = delta at 1` reproduces [`pdtp_waiting_pmf`]. Coefficients of `f`
/// beyond its stored horizon are taken as zero.
pub fn generalized_waiting_pmf(
    f: &CausalSeq,
    params: &PdtpParams,
    t_max: usize,
) -> Result<CausalSeq> {
    if f.coeffs[0] != 0.0 {
        return Err(Error::FNotStrict {
            value_at_zero: f.coeffs[0],
        });
    }
    let scale = f.step_h.abs().max(params.step_h.abs());
    if (f.step_h - params.step_h).abs() > 1e-12 * scale {
        return Err(Error::StepMismatch {
            left: f.step_h,
            right: params.step_h,
        });
    }
    let len = t_max + 1;
    let phi = phi_mu_coeffs(params.alpha, params.xi, params.nu, len, params.step_h)?;
    let mut fx = f.coeffs.clone();
    fx.resize(len, 0.0);
    let coeffs = gfcalc::conv_raw(&fx, &phi, len);
    CausalSeq::new(coeffs, params.step_h, SeqKind::Pmf)
}

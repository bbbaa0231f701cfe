//! Continuous-time limits of the discrete renewal process.
//!
//! Under the well-scaled limit `h -> 0`, `xi = xi0 h^alpha`, the discrete
//! process converges to a generalized fractional counting process whose
//! waiting-time density, state probabilities, and memory kernel are all
//! expressed through the Prabhakar function `E^c_{a,b}`. This module
//! evaluates those limit formulas directly and quantifies the rate of
//! convergence of the discrete quantities toward them on refining grids.

use crate::counting::{self, PdtpParams};
use crate::error::{Error, Result};
use crate::numkernel::{pochhammer_ln, prabhakar_e, SeriesValue};
use statrs::function::gamma::ln_gamma;

/// Term cap for the auxiliary-kernel series at integer `alpha nu`.
const KERNEL_TERM_CAP: usize = 10_000;
/// Term cap for the expected-arrivals layer sum.
const ARRIVAL_TERM_CAP: usize = 10_000;

fn check_ct_params(alpha: f64, nu: f64, xi0: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) || !alpha.is_finite() {
        return Err(Error::invalid_params(format!(
            "alpha must lie in (0, 1], got {alpha}"
        )));
    }
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::invalid_params(format!(
            "nu must be positive and finite, got {nu}"
        )));
    }
    if !(xi0 > 0.0) || !xi0.is_finite() {
        return Err(Error::invalid_params(format!(
            "xi0 must be positive and finite, got {xi0}"
        )));
    }
    Ok(())
}

/// Waiting-time density of the continuous-time limit process,
///
/// ```text
/// f(t) = xi0^nu t^{alpha nu - 1} E^nu_{alpha, alpha nu}(-xi0 t^alpha),   t > 0.
/// ```
///
/// At `alpha = nu = 1` this is the exponential density `xi0 exp(-xi0 t)`; at
/// `alpha = 1`, integer `nu`, the Erlang density. Heavy tail
/// `~ t^{-alpha-1}` for `alpha < 1`.
pub fn prabhakar_density(alpha: f64, nu: f64, xi0: f64, t: f64) -> Result<f64> {
    check_ct_params(alpha, nu, xi0)?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid_params(format!(
            "density is defined for t > 0, got t = {t}"
        )));
    }
    let x = xi0 * t.powf(alpha);
    let e = prabhakar_e(alpha, alpha * nu, nu, -x)?;
    Ok(xi0.powf(nu) * t.powf(alpha * nu - 1.0) * e.value)
}

/// `P(T_k <= t)`: probability that the k-th arrival happened by time `t`,
/// `(xi0 t^alpha)^{k nu} E^{k nu}_{alpha, alpha k nu + 1}(-xi0 t^alpha)`.
fn arrival_time_cdf(alpha: f64, nu: f64, k: usize, x: f64) -> Result<f64> {
    if k == 0 {
        return Ok(1.0);
    }
    let kn = k as f64 * nu;
    let e = prabhakar_e(alpha, alpha * kn + 1.0, kn, -x)?;
    let value = x.powf(kn) * e.value;
    if !value.is_finite() {
        return Err(Error::NonConverged {
            partial: SeriesValue {
                value,
                abs_error_estimate: f64::INFINITY,
                terms_used: e.terms_used,
                converged: false,
            },
            context: "arrival-time cdf prefactor overflowed",
        });
    }
    Ok(value)
}

/// State probability `P(N(t) = n)` of the continuous-time limit process:
/// the difference of consecutive arrival-time distribution functions,
///
/// ```text
/// P(n, t) = x^{n nu} E^{n nu}_{alpha, alpha n nu + 1}(-x)
///         - x^{(n+1) nu} E^{(n+1) nu}_{alpha, alpha (n+1) nu + 1}(-x),
/// ```
///
/// with `x = xi0 t^alpha`. `P(0, t)` is the survival probability; at `nu = 1`
/// the whole panel reduces to the fractional Poisson pmf.
pub fn gfpp_state_prob(alpha: f64, nu: f64, xi0: f64, n: usize, t: f64) -> Result<f64> {
    check_ct_params(alpha, nu, xi0)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid_params(format!(
            "time must be nonnegative and finite, got t = {t}"
        )));
    }
    if t == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let x = xi0 * t.powf(alpha);
    Ok(arrival_time_cdf(alpha, nu, n, x)? - arrival_time_cdf(alpha, nu, n + 1, x)?)
}

/// Fractional Poisson pmf
///
/// ```text
/// P(N(t) = n) = (xi0 t^alpha)^n E^{n+1}_{alpha, alpha n + 1}(-xi0 t^alpha),
/// ```
///
/// the `nu = 1` specialization of [`gfpp_state_prob`] through a different
/// Prabhakar parameter combination (an independent route used in tests).
/// `alpha = 1` is the ordinary Poisson law.
pub fn fractional_poisson_pmf(alpha: f64, xi0: f64, n: usize, t: f64) -> Result<f64> {
    check_ct_params(alpha, 1.0, xi0)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid_params(format!(
            "time must be nonnegative and finite, got t = {t}"
        )));
    }
    if t == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let x = xi0 * t.powf(alpha);
    let e = prabhakar_e(alpha, alpha * n as f64 + 1.0, n as f64 + 1.0, -x)?;
    let value = x.powi(n as i32) * e.value;
    if !value.is_finite() {
        return Err(Error::NonConverged {
            partial: SeriesValue {
                value,
                abs_error_estimate: f64::INFINITY,
                terms_used: e.terms_used,
                converged: false,
            },
            context: "fractional Poisson prefactor overflowed",
        });
    }
    Ok(value)
}

/// Value of the continuous-time auxiliary kernel `B(tau)` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CtKernelValue {
    /// The regular (function) part at `tau`.
    pub value: f64,
    /// True when `alpha nu` is an integer: the kernel then carries an
    /// additional unit-weight Dirac delta at `tau = 0` on top of the regular
    /// part, produced by the `tau^{c-1}/Gamma(c)` term degenerating as
    /// `c -> 0`.
    pub has_delta: bool,
}

/// Continuous-time auxiliary memory kernel
///
/// ```text
/// B(tau) = tau^{c-1} E^{-nu}_{alpha, c}(-xi0 tau^alpha),
///          c = ceil(alpha nu) - alpha nu,
/// ```
///
/// for non-integer `alpha nu`. At integer `alpha nu` (`c = 0`) the `m = 0`
/// term degenerates into a Dirac delta (flagged, not evaluated) and the
/// regular remainder
///
/// ```text
/// sum_{m>=1} ((-nu)_m / m!) (-xi0)^m tau^{alpha m - 1} / Gamma(alpha m)
/// ```
///
/// is summed in log space. The series terminates for integer `nu` and
/// otherwise alternates with Mittag-Leffler-like decay.
pub fn ct_kernel_b(alpha: f64, nu: f64, xi0: f64, tau: f64) -> Result<CtKernelValue> {
    check_ct_params(alpha, nu, xi0)?;
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::invalid_params(format!(
            "kernel argument must satisfy tau > 0, got {tau}"
        )));
    }
    let an = alpha * nu;
    let ceil_an = counting::effective_ceil(an);
    let c = ceil_an - an;
    if c.abs() > counting::INTEGER_SNAP_TOL {
        let e = prabhakar_e(alpha, c, -nu, -xi0 * tau.powf(alpha))?;
        return Ok(CtKernelValue {
            value: tau.powf(c - 1.0) * e.value,
            has_delta: false,
        });
    }
    // Integer alpha nu: unit delta plus the m >= 1 series.
    let ln_tau = tau.ln();
    let ln_xi0 = xi0.ln();
    let mut sum = 0.0f64;
    let mut abs_sum = 0.0f64;
    let mut streak = 0usize;
    for m in 1..=KERNEL_TERM_CAP {
        let (ln_poch, sign_poch) = pochhammer_ln(-nu, m as u32);
        if sign_poch == 0.0 {
            // (-nu)_m terminates for integer nu; all later terms vanish too.
            break;
        }
        let (ln_fact, _) = pochhammer_ln(1.0, m as u32);
        let am = alpha * m as f64;
        let ln_mag =
            ln_poch - ln_fact + m as f64 * ln_xi0 + (am - 1.0) * ln_tau - ln_gamma(am);
        let sign = sign_poch * if m % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign * ln_mag.exp();
        sum += term;
        abs_sum += term.abs();
        if term.abs() <= 1e-17 * abs_sum.max(f64::MIN_POSITIVE) {
            streak += 1;
            if streak >= 3 {
                return Ok(CtKernelValue {
                    value: sum,
                    has_delta: true,
                });
            }
        } else {
            streak = 0;
        }
    }
    if streak > 0 || nu.fract() == 0.0 {
        return Ok(CtKernelValue {
            value: sum,
            has_delta: true,
        });
    }
    Err(Error::NonConverged {
        partial: SeriesValue {
            value: sum,
            abs_error_estimate: f64::NAN,
            terms_used: KERNEL_TERM_CAP,
            converged: false,
        },
        context: "integer-order kernel series",
    })
}

/// Expected arrivals of the continuous-time process with a truncation
/// diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CtExpectedArrivals {
    /// `sum_{k>=1} P(T_k <= t)`, truncated once terms are negligible.
    pub value: f64,
    /// Estimated size of the dropped tail (last term over the geometric
    /// complement of the final term ratio).
    pub remainder_estimate: f64,
    /// Number of layer terms actually summed.
    pub terms_used: usize,
}

/// Expected number of arrivals `<N(t)> = sum_{k>=1} P(T_k <= t)` of the
/// continuous-time process. At `nu = 1` this equals
/// `xi0 t^alpha / Gamma(1 + alpha)` exactly.
pub fn expected_arrivals_ct(alpha: f64, nu: f64, xi0: f64, t: f64) -> Result<CtExpectedArrivals> {
    check_ct_params(alpha, nu, xi0)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid_params(format!(
            "time must be nonnegative and finite, got t = {t}"
        )));
    }
    if t == 0.0 {
        return Ok(CtExpectedArrivals {
            value: 0.0,
            remainder_estimate: 0.0,
            terms_used: 0,
        });
    }
    let x = xi0 * t.powf(alpha);
    let mut value = 0.0f64;
    let mut prev = 1.0f64;
    let mut streak = 0usize;
    for k in 1..=ARRIVAL_TERM_CAP {
        let term = arrival_time_cdf(alpha, nu, k, x)?;
        value += term;
        if term <= 1e-16 * value.max(1.0) {
            streak += 1;
            if streak >= 2 {
                let ratio = (term / prev).min(0.5);
                return Ok(CtExpectedArrivals {
                    value,
                    remainder_estimate: term * ratio / (1.0 - ratio),
                    terms_used: k,
                });
            }
        } else {
            streak = 0;
        }
        prev = term.max(f64::MIN_POSITIVE);
    }
    Err(Error::NonConverged {
        partial: SeriesValue {
            value,
            abs_error_estimate: f64::NAN,
            terms_used: ARRIVAL_TERM_CAP,
            converged: false,
        },
        context: "expected-arrivals layer sum",
    })
}

/// One grid refinement measurement of [`convergence_study`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    /// Physical target time.
    pub t: f64,
    /// Grid spacing.
    pub h: f64,
    /// `max_{n <= n_max} |Phi_h^{(n)}(t/h) - P(n, t)|`, where discrete rows
    /// beyond the horizon count as exact zeros.
    pub state_err: f64,
    /// `|theta_h(t/h)/h - f(t)|`: rescaled waiting pmf vs the limit density.
    pub density_err: f64,
}

/// Measures convergence of the well-scaled discrete process (`xi = xi0
/// h^alpha`) to its continuous-time limit on a set of grids.
///
/// For every spacing `h` and target time `t` (which must sit on the grid:
/// `t/h` integer to within 1e-9, else [`Error::GridMismatch`]), the state
/// probabilities for `n <= n_max` and the rescaled waiting pmf are compared
/// against [`gfpp_state_prob`] and [`prabhakar_density`]. Rows are emitted
/// grid-major: all targets for `hs[0]`, then `hs[1]`, ...
pub fn convergence_study(
    alpha: f64,
    nu: f64,
    xi0: f64,
    targets: &[f64],
    hs: &[f64],
    n_max: usize,
) -> Result<Vec<ConvergenceRow>> {
    check_ct_params(alpha, nu, xi0)?;
    if targets.is_empty() || hs.is_empty() {
        return Err(Error::invalid_params(
            "convergence study needs at least one target time and one grid spacing",
        ));
    }
    let mut rows = Vec::with_capacity(targets.len() * hs.len());
    for &h in hs {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::invalid_params(format!(
                "grid spacing must be positive and finite, got {h}"
            )));
        }
        let mut steps_per_target = Vec::with_capacity(targets.len());
        let mut t_top = 1usize;
        for &t in targets {
            let ratio = t / h;
            let steps = ratio.round();
            if !(t > 0.0) || (ratio - steps).abs() > 1e-9 * steps.max(1.0) || steps < 1.0 {
                return Err(Error::GridMismatch { t, h });
            }
            let steps = steps as usize;
            steps_per_target.push(steps);
            t_top = t_top.max(steps);
        }
        let params = PdtpParams::with_scaling(alpha, nu, xi0, h)?;
        let panel = counting::pdtp_state_panel(&params, n_max, t_top)?;
        let theta = counting::pdtp_waiting_pmf(&params, t_top)?;
        for (&t, &steps) in targets.iter().zip(&steps_per_target) {
            let mut state_err = 0.0f64;
            for n in 0..=n_max {
                let discrete = if n <= panel.n_max {
                    panel.value(n, steps)
                } else {
                    0.0
                };
                let limit = gfpp_state_prob(alpha, nu, xi0, n, t)?;
                state_err = state_err.max((discrete - limit).abs());
            }
            let density_err =
                (theta.coeffs[steps] / h - prabhakar_density(alpha, nu, xi0, t)?).abs();
            rows.push(ConvergenceRow {
                t,
                h,
                state_err,
                density_err,
            });
        }
    }
    Ok(rows)
}

//! Truncated causal-sequence algebra.
//!
//! A [`CausalSeq`] holds the coefficients s(0..=T) of a causal sequence —
//! equivalently, the first T+1 coefficients of its generating function
//! `S(u) = sum_t s(t) u^t`. All operators here are exact on truncations:
//! convolution, convolution powers, count composition, real powers of a
//! series (the workhorse for coefficient extraction of expressions like
//! `(xi + (1-u)^alpha)^(+-nu)`), fractional difference/integral weights of
//! `(1-u)^mu`, and prefix sums.
//!
//! Sequences carry their grid spacing `step_h` so that mixed-grid convolution
//! is rejected, and a `kind` tag so probability-mass inputs are validated
//! while signed kernels are left alone.

use crate::error::{Error, Result};
use crate::numkernel::KahanSum;

/// Interpretation tag for a causal sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeqKind {
    /// Probability mass function: entries >= -1e-12, partial sums <= 1 + 1e-10.
    Pmf,
    /// Non-decreasing prefix-sum sequence derived from a pmf.
    Cumulative,
    /// Convolution kernel (may be signed, e.g. difference weights).
    Kernel,
    /// No structural promise.
    Signed,
}

/// Tolerated negative rounding in pmf coefficients.
pub const PMF_NEG_TOL: f64 = 1e-12;
/// Tolerated excess over 1 in pmf partial sums.
pub const PMF_SUM_TOL: f64 = 1e-10;
/// Relative tolerance for comparing grid steps.
const STEP_REL_TOL: f64 = 1e-12;

/// A truncated real causal sequence s(0..=T) on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalSeq {
    pub coeffs: Vec<f64>,
    pub step_h: f64,
    pub kind: SeqKind,
}

impl CausalSeq {
    /// Wraps coefficients, validating pmf structure when `kind == Pmf`.
    pub fn new(coeffs: Vec<f64>, step_h: f64, kind: SeqKind) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid_params("sequence must have length >= 1"));
        }
        if !(step_h > 0.0) || !step_h.is_finite() {
            return Err(Error::invalid_params(format!(
                "step_h must be positive and finite, got {step_h}"
            )));
        }
        if kind == SeqKind::Pmf {
            let mut partial = KahanSum::new();
            for (t, &x) in coeffs.iter().enumerate() {
                if x < -PMF_NEG_TOL {
                    return Err(Error::invalid_params(format!(
                        "pmf coefficient at t = {t} is {x}"
                    )));
                }
                partial.add(x);
                if partial.value() > 1.0 + PMF_SUM_TOL {
                    return Err(Error::invalid_params(format!(
                        "pmf partial sum exceeds 1 at t = {t}: {}",
                        partial.value()
                    )));
                }
            }
        }
        Ok(Self {
            coeffs,
            step_h,
            kind,
        })
    }

    /// The discrete delta (1, 0, 0, ...): the convolution identity.
    pub fn delta(len: usize, step_h: f64) -> Self {
        let mut coeffs = vec![0.0; len.max(1)];
        coeffs[0] = 1.0;
        Self {
            coeffs,
            step_h,
            kind: SeqKind::Pmf,
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest stored time index T.
    pub fn t_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn same_step(&self, other: &Self) -> bool {
        let scale = self.step_h.abs().max(other.step_h.abs());
        (self.step_h - other.step_h).abs() <= STEP_REL_TOL * scale
    }
}

/// Raw truncated Cauchy product of two coefficient slices, to the shorter
/// length; inner sums are compensated.
pub(crate) fn conv_raw(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let n = len.min(a.len()).min(b.len());
    let mut out = Vec::with_capacity(n);
    for t in 0..n {
        let mut acc = KahanSum::new();
        for j in 0..=t {
            acc.add(a[j] * b[t - j]);
        }
        out.push(acc.value());
    }
    out
}

/// Causal convolution `(a * b)(t) = sum_{j<=t} a(j) b(t-j)`, truncated to the
/// shorter of the two inputs.
pub fn convolve(a: &CausalSeq, b: &CausalSeq) -> Result<CausalSeq> {
    if !a.same_step(b) {
        return Err(Error::StepMismatch {
            left: a.step_h,
            right: b.step_h,
        });
    }
    let kind = if a.kind == SeqKind::Pmf && b.kind == SeqKind::Pmf {
        SeqKind::Pmf
    } else {
        SeqKind::Signed
    };
    Ok(CausalSeq {
        coeffs: conv_raw(&a.coeffs, &b.coeffs, usize::MAX),
        step_h: a.step_h,
        kind,
    })
}

/// n-fold convolution power; `n = 0` is the delta sequence.
pub fn conv_power(a: &CausalSeq, n: usize) -> CausalSeq {
    let mut out = CausalSeq::delta(a.len(), a.step_h);
    out.kind = a.kind;
    for _ in 0..n {
        out.coeffs = conv_raw(&out.coeffs, &a.coeffs, usize::MAX);
    }
    if a.kind != SeqKind::Pmf {
        out.kind = SeqKind::Signed;
    }
    out
}

/// Composes a count distribution with a step-time law:
/// `W(t) = sum_n count_pmf(n) (inner*)^n (t)`.
///
/// Because `inner(0) = 0` is required, `(inner*)^n(t)` vanishes for `n > t`,
/// so the n-sum truncates exactly at the horizon. The index-0 entry of
/// `count_pmf` (mass on "zero steps") contributes `count_pmf(0) * delta`,
/// which is zero for the count laws used here (supported on n >= 1).
pub fn compose_counts(count_pmf: &CausalSeq, inner: &CausalSeq) -> Result<CausalSeq> {
    if inner.coeffs[0] != 0.0 {
        return Err(Error::InnerNotStrict {
            value_at_zero: inner.coeffs[0],
        });
    }
    let len = inner.len();
    let mut out = vec![0.0; len];
    if !count_pmf.coeffs.is_empty() {
        out[0] = count_pmf.coeffs[0];
    }
    let mut power = CausalSeq::delta(len, inner.step_h).coeffs;
    let n_top = count_pmf.len().min(len);
    for n in 1..n_top {
        power = conv_raw(&power, &inner.coeffs, usize::MAX);
        let c = count_pmf.coeffs[n];
        if c != 0.0 {
            // (inner*)^n is supported on t >= n.
            for t in n..len {
                out[t] += c * power[t];
            }
        }
    }
    let kind = if count_pmf.kind == SeqKind::Pmf && inner.kind == SeqKind::Pmf {
        SeqKind::Pmf
    } else {
        SeqKind::Signed
    };
    Ok(CausalSeq {
        coeffs: out,
        step_h: inner.step_h,
        kind,
    })
}

/// Coefficients of `A(u)^gamma` for real `gamma` by the power recurrence
///
/// ```text
/// b_0 = a_0^gamma,
/// k a_0 b_k = sum_{j=1..k} (gamma j - (k - j)) a_j b_{k-j},
/// ```
///
/// exact to truncation order. Requires `a(0) != 0`; for non-integer `gamma`
/// the constant term must be positive (real branch).
pub fn series_pow(a: &CausalSeq, gamma: f64) -> Result<CausalSeq> {
    let a0 = a.coeffs[0];
    if a0 == 0.0 {
        return Err(Error::ZeroConstantTerm);
    }
    if a0 < 0.0 && gamma.fract() != 0.0 {
        return Err(Error::invalid_params(format!(
            "series_pow with non-integer exponent {gamma} requires a positive constant term, got {a0}"
        )));
    }
    let n = a.len();
    let mut b = vec![0.0; n];
    b[0] = a0.powf(gamma);
    for k in 1..n {
        let mut acc = KahanSum::new();
        for j in 1..=k {
            let w = gamma * j as f64 - (k - j) as f64;
            acc.add(w * a.coeffs[j] * b[k - j]);
        }
        b[k] = acc.value() / (k as f64 * a0);
    }
    Ok(CausalSeq {
        coeffs: b,
        step_h: a.step_h,
        kind: SeqKind::Signed,
    })
}

/// Coefficients `(-1)^k C(mu, k)` of `(1 - u)^mu`, k = 0..len-1.
///
/// Positive `mu` gives fractional-difference weights; negative `mu` gives the
/// fractional-integral (repeated-summation) weights, e.g. `mu = -1` is the
/// all-ones summation operator.
pub fn frac_diff_coeffs(mu: f64, len: usize) -> CausalSeq {
    let len = len.max(1);
    let mut c = Vec::with_capacity(len);
    let mut cur = 1.0;
    for k in 0..len {
        c.push(cur);
        cur *= (k as f64 - mu) / (k as f64 + 1.0);
    }
    CausalSeq {
        coeffs: c,
        step_h: 1.0,
        kind: SeqKind::Kernel,
    }
}

/// Prefix sums `G(t) = sum_{k<=t} a(k)`.
pub fn cumulate(a: &CausalSeq) -> CausalSeq {
    let mut acc = KahanSum::new();
    let coeffs = a
        .coeffs
        .iter()
        .map(|&x| {
            acc.add(x);
            acc.value()
        })
        .collect();
    CausalSeq {
        coeffs,
        step_h: a.step_h,
        kind: SeqKind::Cumulative,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn seq(coeffs: &[f64]) -> CausalSeq {
        CausalSeq {
            coeffs: coeffs.to_vec(),
            step_h: 1.0,
            kind: SeqKind::Signed,
        }
    }

    #[test]
    fn delta_is_identity() {
        let b = seq(&[0.3, -0.1, 0.7, 0.2]);
        let d = CausalSeq::delta(4, 1.0);
        let c = convolve(&d, &b).unwrap();
        assert_eq!(c.coeffs, b.coeffs);
    }

    #[test]
    fn shift_action() {
        let b = seq(&[1.0, 2.0, 3.0, 4.0]);
        let s = seq(&[0.0, 1.0, 0.0, 0.0]);
        let c = convolve(&s, &b).unwrap();
        assert_eq!(c.coeffs, vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn coin_self_convolution() {
        let a = CausalSeq::new(vec![0.5, 0.5, 0.0], 1.0, SeqKind::Pmf).unwrap();
        let c = convolve(&a, &a).unwrap();
        assert_eq!(c.coeffs, vec![0.25, 0.5, 0.25]);
        assert_eq!(c.kind, SeqKind::Pmf);
        let p2 = conv_power(&a, 2);
        assert_eq!(p2.coeffs, c.coeffs);
    }

    #[test]
    fn conv_power_zero_is_delta() {
        let a = seq(&[0.9, 0.1, 0.3]);
        let p = conv_power(&a, 0);
        assert_eq!(p.coeffs, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn conv_power_triple_shift() {
        let a = seq(&[0.0, 1.0, 0.0, 0.0]);
        let p = conv_power(&a, 3);
        assert_eq!(p.coeffs, vec![0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn step_mismatch_detected() {
        let a = CausalSeq {
            step_h: 1.0,
            ..seq(&[1.0, 0.0])
        };
        let b = CausalSeq {
            step_h: 0.5,
            ..seq(&[1.0, 0.0])
        };
        assert_eq!(convolve(&a, &b).unwrap_err().code(), "STEP_MISMATCH");
    }

    #[test]
    fn compose_with_unit_count_is_inner() {
        let inner = CausalSeq::new(vec![0.0, 0.6, 0.3, 0.1], 1.0, SeqKind::Pmf).unwrap();
        let count = CausalSeq::new(vec![0.0, 1.0, 0.0, 0.0], 1.0, SeqKind::Pmf).unwrap();
        let w = compose_counts(&count, &inner).unwrap();
        assert_eq!(w.coeffs, inner.coeffs);
        assert_eq!(w.coeffs[0], 0.0);
    }

    #[test]
    fn compose_rejects_lazy_inner() {
        let inner = seq(&[0.2, 0.8]);
        let count = seq(&[0.0, 1.0]);
        assert_eq!(
            compose_counts(&count, &inner).unwrap_err().code(),
            "INNER_NOT_STRICT"
        );
    }

    #[test]
    fn series_pow_identity_exponent() {
        let a = seq(&[2.0, -0.4, 0.3, 0.05]);
        let p = series_pow(&a, 1.0).unwrap();
        for (x, y) in p.coeffs.iter().zip(a.coeffs.iter()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-14);
        }
    }

    #[test]
    fn series_pow_matches_binomial_series() {
        // (1 - u)^alpha expanded two ways.
        let alpha = 0.62;
        let base = seq(&[1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let p = series_pow(&base, alpha).unwrap();
        let w = frac_diff_coeffs(alpha, 8);
        for (k, (x, y)) in p.coeffs.iter().zip(w.coeffs.iter()).enumerate() {
            assert!((x - y).abs() < 1e-14, "k = {k}: {x} vs {y}");
        }
    }

    #[test]
    fn series_pow_geometric_reciprocal() {
        // 1/(2 + u) = 0.5 - 0.25 u + 0.125 u^2 - ...
        let a = seq(&[2.0, 1.0, 0.0, 0.0, 0.0]);
        let p = series_pow(&a, -1.0).unwrap();
        let expected = [0.5, -0.25, 0.125, -0.0625, 0.03125];
        for (x, y) in p.coeffs.iter().zip(expected.iter()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-15);
        }
    }

    #[test]
    fn series_pow_guards() {
        assert_eq!(
            series_pow(&seq(&[0.0, 1.0]), 0.5).unwrap_err().code(),
            "ZERO_CONSTANT_TERM"
        );
        assert_eq!(
            series_pow(&seq(&[-1.0, 1.0]), 0.5).unwrap_err().code(),
            "INVALID_PARAMS"
        );
        // Integer exponents of a negative constant term are fine.
        assert!(series_pow(&seq(&[-1.0, 1.0]), 2.0).is_ok());
    }

    #[test]
    fn frac_diff_first_difference_and_summation() {
        let d1 = frac_diff_coeffs(1.0, 5);
        assert_eq!(d1.coeffs, vec![1.0, -1.0, 0.0, 0.0, 0.0]);
        let half = frac_diff_coeffs(0.5, 3);
        assert_abs_diff_eq!(half.coeffs[1], -0.5, epsilon = 1e-15);
        let int1 = frac_diff_coeffs(-1.0, 5);
        assert_eq!(int1.coeffs, vec![1.0; 5]);
    }

    #[test]
    fn cumulate_examples() {
        let d = CausalSeq::delta(4, 1.0);
        assert_eq!(cumulate(&d).coeffs, vec![1.0; 4]);
        let a = seq(&[0.5, 0.5, 0.0]);
        assert_eq!(cumulate(&a).coeffs, vec![0.5, 1.0, 1.0]);
        assert_eq!(cumulate(&a).kind, SeqKind::Cumulative);
    }

    #[test]
    fn pmf_validation() {
        assert!(CausalSeq::new(vec![0.0, 0.5, 0.5], 1.0, SeqKind::Pmf).is_ok());
        assert_eq!(
            CausalSeq::new(vec![0.0, -0.2, 0.5], 1.0, SeqKind::Pmf)
                .unwrap_err()
                .code(),
            "INVALID_PARAMS"
        );
        assert_eq!(
            CausalSeq::new(vec![0.8, 0.5], 1.0, SeqKind::Pmf)
                .unwrap_err()
                .code(),
            "INVALID_PARAMS"
        );
    }
}

//! Algebraic property tests and frozen cross-route values for the
//! causal-sequence calculus.

use proptest::prelude::*;
use renewal_core::gfcalc::{
    compose_counts, conv_power, convolve, cumulate, frac_diff_coeffs, series_pow, CausalSeq,
    SeqKind,
};
use renewal_core::numkernel::gen_binomial;

fn seq(coeffs: Vec<f64>) -> CausalSeq {
    CausalSeq {
        coeffs,
        step_h: 1.0,
        kind: SeqKind::Signed,
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Sibuya(alpha) step pmf w(t) = (-1)^(t-1) C(alpha, t), w(0) = 0.
fn sibuya_coeffs(alpha: f64, len: usize) -> Vec<f64> {
    (0..len)
        .map(|t| {
            if t == 0 {
                0.0
            } else {
                (if t % 2 == 1 { 1.0 } else { -1.0 }) * gen_binomial(alpha, t as u32)
            }
        })
        .collect()
}

#[test]
fn geometric_count_of_sibuya_steps_frozen_values() {
    // Counting a geometric number (on n >= 1) of Sibuya(alpha) steps gives the
    // type-A fractional Bernoulli waiting law with generating function
    // xi (1 - (1-u)^alpha) / (xi + (1-u)^alpha). Values pinned from 60-digit
    // evaluation of the exact finite sums at alpha = 0.7, xi = 1.3.
    let expected = [
        0.0,
        0.39565217391304347,
        0.17976370510396975,
        0.09849046601462974,
        0.06079649528660918,
        0.04081607357147529,
        0.029155832127641276,
    ];
    let (alpha, xi): (f64, f64) = (0.7, 1.3);
    let len = expected.len();
    let p = xi / (1.0 + xi);
    let q = 1.0 / (1.0 + xi);
    let mut count = vec![0.0; len];
    for (n, c) in count.iter_mut().enumerate().skip(1) {
        *c = p * q.powi(n as i32 - 1);
    }
    let count = CausalSeq::new(count, 1.0, SeqKind::Pmf).unwrap();
    let inner = CausalSeq::new(sibuya_coeffs(alpha, len), 1.0, SeqKind::Pmf).unwrap();
    let w = compose_counts(&count, &inner).unwrap();
    assert_eq!(w.kind, SeqKind::Pmf);
    assert!(max_abs_diff(&w.coeffs, &expected) < 1e-15);

    // Independent route: coefficient extraction of the closed-form generating
    // function via series reciprocal.
    let fdc = frac_diff_coeffs(alpha, len);
    let mut num = vec![0.0; len];
    let mut den = fdc.coeffs.clone();
    for t in 0..len {
        num[t] = -xi * fdc.coeffs[t];
    }
    num[0] += xi;
    den[0] += xi;
    let recip = series_pow(&seq(den), -1.0).unwrap();
    let alt = convolve(&seq(num), &recip).unwrap();
    assert!(max_abs_diff(&w.coeffs, &alt.coeffs) < 1e-14);

    // Mass accountability: the partial sum equals 1 minus a computable tail.
    let total = cumulate(&w).coeffs[len - 1];
    assert!(total < 1.0 && total > 0.7);
}

#[test]
fn fractional_integral_weights_match_rising_factorials() {
    // (1-u)^(-c) for integer c >= 1 has coefficients C(t + c - 1, t).
    for c in 1..5u32 {
        let w = frac_diff_coeffs(-(c as f64), 12);
        for t in 0..12u32 {
            let expected = gen_binomial((t + c - 1) as f64, t);
            assert!(
                (w.coeffs[t as usize] - expected).abs() <= 1e-12 * expected.abs().max(1.0),
                "c = {c}, t = {t}"
            );
        }
    }
}

fn arb_coeffs(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 1..max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn convolution_commutes(a in arb_coeffs(48), b in arb_coeffs(48)) {
        let (sa, sb) = (seq(a), seq(b));
        let ab = convolve(&sa, &sb).unwrap();
        let ba = convolve(&sb, &sa).unwrap();
        prop_assert!(max_abs_diff(&ab.coeffs, &ba.coeffs) <= 1e-12);
    }

    #[test]
    fn convolution_associates(a in arb_coeffs(32), b in arb_coeffs(32), c in arb_coeffs(32)) {
        let (sa, sb, sc) = (seq(a), seq(b), seq(c));
        let left = convolve(&convolve(&sa, &sb).unwrap(), &sc).unwrap();
        let right = convolve(&sa, &convolve(&sb, &sc).unwrap()).unwrap();
        prop_assert!(max_abs_diff(&left.coeffs, &right.coeffs) <= 1e-12);
    }

    #[test]
    fn series_pow_is_additive_in_the_exponent(
        mut a in arb_coeffs(256),
        g1 in -5.0f64..5.0,
        g2 in -5.0f64..5.0,
    ) {
        // Keep the constant term away from zero and bound the tail mass so the
        // truncated powers grow at a controlled geometric rate (otherwise a
        // random length-256 series can overflow f64 under exponent 5).
        a[0] = 0.5 + a[0].abs();
        let tail: f64 = a[1..].iter().map(|x| x.abs()).sum();
        if tail > 1.5 * a[0] {
            let f = 1.5 * a[0] / tail;
            for x in &mut a[1..] {
                *x *= f;
            }
        }
        let s = seq(a);
        let p1 = series_pow(&s, g1).unwrap();
        let p2 = series_pow(&s, g2).unwrap();
        let combined = series_pow(&s, g1 + g2).unwrap();
        let split = convolve(&p1, &p2).unwrap();
        // The achievable accuracy is relative to the magnitudes actually
        // summed in the convolution, so build that bound explicitly.
        let abs1 = seq(p1.coeffs.iter().map(|x| x.abs()).collect());
        let abs2 = seq(p2.coeffs.iter().map(|x| x.abs()).collect());
        let bound = convolve(&abs1, &abs2).unwrap();
        let scale = bound
            .coeffs
            .iter()
            .chain(combined.coeffs.iter())
            .fold(1.0f64, |m, x| m.max(x.abs()));
        prop_assert!(max_abs_diff(&combined.coeffs, &split.coeffs) <= 1e-10 * scale);
    }

    #[test]
    fn fractional_difference_inverts(mu in -3.0f64..3.0, len in 2usize..128) {
        let d = frac_diff_coeffs(mu, len);
        let i = frac_diff_coeffs(-mu, len);
        let composed = convolve(&d, &i).unwrap();
        let delta = CausalSeq::delta(len, 1.0);
        prop_assert!(max_abs_diff(&composed.coeffs, &delta.coeffs) <= 1e-10);
    }

    #[test]
    fn conv_power_matches_repeated_convolution(a in arb_coeffs(24), n in 0usize..5) {
        let s = seq(a);
        let fast = conv_power(&s, n);
        let mut slow = CausalSeq::delta(s.len(), 1.0);
        for _ in 0..n {
            slow = convolve(&slow, &s).unwrap();
        }
        prop_assert!(max_abs_diff(&fast.coeffs, &slow.coeffs) <= 1e-12);
    }
}

//! Minimal double-double (~31 significant digits) arithmetic.
//!
//! The hypergeometric-type m-series for the waiting pmf alternate with
//! intermediate terms up to ~1e10 while the sum is ~1e-3: near the xi = 1
//! boundary they cancel through 13+ digits, which is unrecoverable in plain
//! f64 no matter how the summation is compensated. Evaluating each term and
//! the running sum as an unevaluated pair (hi, lo) keeps ~31 digits and makes
//! the printed series usable as a high-accuracy cross-validation oracle.
//!
//! Only the operations needed by those series are implemented: exact splits
//! (two-sum / two-product via FMA), addition, multiplication, and division by
//! an exactly representable f64.

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd {
        hi: s,
        lo: (a - (s - bb)) + (b - bb),
    }
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> Dd {
    // Requires |a| >= |b| (or a == 0).
    let s = a + b;
    Dd {
        hi: s,
        lo: b - (s - a),
    }
}

#[inline]
fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd {
        hi: p,
        lo: a.mul_add(b, -p),
    }
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[cfg(test)]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact double-double representation of `a + b`.
    #[inline]
    pub fn exact_sum(a: f64, b: f64) -> Dd {
        two_sum(a, b)
    }

    /// Exact double-double representation of `a * b`.
    #[inline]
    pub fn exact_prod(a: f64, b: f64) -> Dd {
        two_prod(a, b)
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        quick_two_sum(s.hi, s.lo + self.lo + o.lo)
    }

    #[inline]
    pub fn add_f64(self, x: f64) -> Dd {
        let s = two_sum(self.hi, x);
        quick_two_sum(s.hi, s.lo + self.lo)
    }

    #[inline]
    pub fn mul(self, o: Dd) -> Dd {
        let p = two_prod(self.hi, o.hi);
        quick_two_sum(p.hi, p.lo + self.hi * o.lo + self.lo * o.hi)
    }

    #[inline]
    pub fn mul_f64(self, x: f64) -> Dd {
        let p = two_prod(self.hi, x);
        quick_two_sum(p.hi, p.lo + self.lo * x)
    }

    /// Division by an exactly known f64 divisor.
    #[inline]
    pub fn div_f64(self, x: f64) -> Dd {
        let q1 = self.hi / x;
        let p = two_prod(q1, x);
        let r = self.add(p.neg());
        let q2 = (r.hi + r.lo) / x;
        quick_two_sum(q1, q2)
    }

    #[inline]
    pub fn abs(self) -> f64 {
        self.hi.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_tiny_residuals() {
        let x = Dd::from_f64(1.0).add_f64(1e-20);
        assert_eq!(x.hi, 1.0);
        assert_eq!(x.lo, 1e-20);
        let y = x.add_f64(-1.0);
        assert_eq!(y.to_f64(), 1e-20);
    }

    #[test]
    fn exact_product_split() {
        let a = 1.0 + 2f64.powi(-30);
        let p = Dd::exact_prod(a, a);
        // (1 + 2^-30)^2 = 1 + 2^-29 + 2^-60 exactly; hi holds 1 + 2^-29.
        assert_eq!(p.hi, 1.0 + 2f64.powi(-29));
        assert_eq!(p.lo, 2f64.powi(-60));
    }

    #[test]
    fn division_round_trips() {
        let x = Dd::exact_prod(std::f64::consts::PI, 1.0 + 2f64.powi(-40));
        let y = x.div_f64(0.7);
        let z = y.mul_f64(0.7);
        let diff = z.add(x.neg());
        assert!(diff.to_f64().abs() < 1e-30);
    }

    #[test]
    fn alternating_cancellation_survives() {
        // sum_{k=0..60} (-1)^k * (1e10 + k*1e-8): pairwise this collapses to
        // 30 * (-1e-8) + 1e10-ish; check against exact integer reasoning.
        let mut s = Dd::ZERO;
        for k in 0..=60 {
            let term = Dd::exact_sum(1e10, k as f64 * 1e-8);
            s = s.add(if k % 2 == 0 { term } else { term.neg() });
        }
        // 31 positive terms (k even: 0,2,..,60), 30 negative.
        // Sum = 1e10 + 1e-8 * (sum_{even} k - sum_{odd} k)
        //     = 1e10 + 1e-8 * (930 - 900) = 1e10 + 30e-8.
        let expected = Dd::exact_sum(1e10, 30e-8);
        let diff = s.add(expected.neg());
        assert!(diff.to_f64().abs() < 1e-18);
    }
}

//! Double-double arithmetic: unevaluated sums `hi + lo` carrying roughly
//! 32 significant digits.
//!
//! Used where a three-term recurrence must be run through a region where
//! the wanted solution is minimal and rounding injects the dominant one;
//! the extra digits push the injected component far below the f64 target
//! accuracy of the final result.

/// Unevaluated sum of two floats, `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// Error-free sum: `a + b = s + e` exactly.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free sum assuming `|a| >= |b|`.
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// Error-free product via fused multiply-add: `a * b = p + e` exactly.
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

impl Dd {
    pub fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, other: Dd) -> Self {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn sub(self, other: Dd) -> Self {
        self.add(Dd {
            hi: -other.hi,
            lo: -other.lo,
        })
    }

    pub fn mul(self, other: Dd) -> Self {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div(self, other: Dd) -> Self {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul(Dd::from(q1)));
        let q2 = r.to_f64() / other.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }

    /// Square root by one Newton correction of the f64 estimate.
    pub fn sqrt(self) -> Self {
        if self.hi == 0.0 {
            return Dd::from(0.0);
        }
        let y = self.hi.sqrt();
        let y_dd = Dd::from(y);
        let r = self.sub(y_dd.mul(y_dd));
        let corr = r.to_f64() / (2.0 * y);
        let (hi, lo) = quick_two_sum(y, corr);
        Dd { hi, lo }
    }

    pub fn sq(self) -> Self {
        self.mul(self)
    }

    pub fn recip(self) -> Self {
        Dd::from(1.0).div(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residuals_are_below_f64_precision() {
        let third = Dd::from(1.0).div(Dd::from(3.0));
        let back = third.mul(Dd::from(3.0)).sub(Dd::from(1.0));
        assert!(back.to_f64().abs() < 1e-30);

        let r2 = Dd::from(2.0).sqrt();
        let resid = r2.sq().sub(Dd::from(2.0));
        assert!(resid.to_f64().abs() < 1e-30);

        let s = Dd::from(1e16).add(Dd::from(1.0)).sub(Dd::from(1e16));
        assert_eq!(s.to_f64(), 1.0);
    }
}

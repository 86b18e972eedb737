//! Signed log-domain scalars.
//!
//! Diagram values in high dimension underflow `f64` long before the dimensions
//! of interest (a loop value can sit near `exp(-1400)`), so every quantity that
//! can shrink geometrically with `d` is carried as `sign * exp(ln_abs)`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogValue {
    /// ln |v|; `f64::NEG_INFINITY` encodes zero.
    pub ln_abs: f64,
    /// -1, 0 or +1.
    pub sign: i8,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue {
        ln_abs: f64::NEG_INFINITY,
        sign: 0,
    };
    pub const ONE: LogValue = LogValue {
        ln_abs: 0.0,
        sign: 1,
    };

    pub fn from_f64(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            LogValue {
                ln_abs: v.abs().ln(),
                sign: if v > 0.0 { 1 } else { -1 },
            }
        }
    }

    /// Value `sign * exp(ln_abs)` without ever forming the exponential.
    pub fn from_ln(ln_abs: f64, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1 || sign == 0);
        if sign == 0 {
            Self::ZERO
        } else {
            LogValue { ln_abs, sign }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Convert back to `f64`; may round to 0 or +/-inf outside the exponent range.
    pub fn to_f64(&self) -> f64 {
        self.sign as f64 * self.ln_abs.exp()
    }

    pub fn abs(&self) -> Self {
        LogValue {
            ln_abs: self.ln_abs,
            sign: self.sign.abs(),
        }
    }

    pub fn neg(&self) -> Self {
        LogValue {
            ln_abs: self.ln_abs,
            sign: -self.sign,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let sign = self.sign * other.sign;
        if sign == 0 {
            Self::ZERO
        } else {
            LogValue {
                ln_abs: self.ln_abs + other.ln_abs,
                sign,
            }
        }
    }

    pub fn div(&self, other: &Self) -> Self {
        assert!(other.sign != 0, "log-domain division by zero");
        if self.sign == 0 {
            Self::ZERO
        } else {
            LogValue {
                ln_abs: self.ln_abs - other.ln_abs,
                sign: self.sign * other.sign,
            }
        }
    }

    pub fn powi(&self, n: i32) -> Self {
        if self.sign == 0 {
            return if n == 0 { Self::ONE } else { Self::ZERO };
        }
        let sign = if self.sign < 0 && n % 2 != 0 { -1 } else { 1 };
        LogValue {
            ln_abs: self.ln_abs * n as f64,
            sign,
        }
    }

    /// Signed addition via log-sum-exp.
    pub fn add(&self, other: &Self) -> Self {
        if self.sign == 0 {
            return *other;
        }
        if other.sign == 0 {
            return *self;
        }
        let (big, small) = if self.ln_abs >= other.ln_abs {
            (self, other)
        } else {
            (other, self)
        };
        let delta = small.ln_abs - big.ln_abs; // <= 0
        if self.sign == other.sign {
            LogValue {
                ln_abs: big.ln_abs + delta.exp().ln_1p(),
                sign: big.sign,
            }
        } else {
            let r = -delta.exp(); // in (-1, 0]
            if r == -1.0 {
                Self::ZERO
            } else {
                LogValue {
                    ln_abs: big.ln_abs + r.ln_1p(),
                    sign: big.sign,
                }
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Total order consistent with the real values represented.
    pub fn cmp_value(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (self.sign, other.sign) {
            (a, b) if a < b => Less,
            (a, b) if a > b => Greater,
            (0, 0) => Equal,
            (1, 1) => self.ln_abs.partial_cmp(&other.ln_abs).unwrap_or(Equal),
            _ => other.ln_abs.partial_cmp(&self.ln_abs).unwrap_or(Equal),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn round_trip_and_basic_ops() {
        let a = LogValue::from_f64(3.5);
        let b = LogValue::from_f64(-0.25);
        assert_relative_eq!(a.to_f64(), 3.5, max_relative = 1e-15);
        assert_relative_eq!(a.mul(&b).to_f64(), -0.875, max_relative = 1e-15);
        assert_relative_eq!(a.add(&b).to_f64(), 3.25, max_relative = 1e-15);
        assert_relative_eq!(a.div(&b).to_f64(), -14.0, max_relative = 1e-15);
        assert_relative_eq!(b.powi(3).to_f64(), -0.015625, max_relative = 1e-15);
        assert!(LogValue::ZERO.add(&a) == a);
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn extreme_magnitudes_stay_finite() {
        let tiny = LogValue::from_ln(-1400.0, 1);
        let sq = tiny.powi(2);
        assert_relative_eq!(sq.ln_abs, -2800.0);
        assert_eq!(tiny.to_f64(), 0.0); // honest underflow on conversion
        let sum = tiny.add(&tiny);
        assert_relative_eq!(sum.ln_abs, -1400.0 + std::f64::consts::LN_2);
    }

    proptest! {
        #[test]
        fn add_matches_f64(x in -1e6f64..1e6, y in -1e6f64..1e6) {
            let s = LogValue::from_f64(x).add(&LogValue::from_f64(y)).to_f64();
            prop_assert!((s - (x + y)).abs() <= 1e-9 * (1.0 + x.abs() + y.abs()));
        }

        #[test]
        fn mul_matches_f64(x in -1e3f64..1e3, y in -1e3f64..1e3) {
            let p = LogValue::from_f64(x).mul(&LogValue::from_f64(y)).to_f64();
            prop_assert!((p - x * y).abs() <= 1e-9 * (1.0 + (x * y).abs()));
        }
    }
}

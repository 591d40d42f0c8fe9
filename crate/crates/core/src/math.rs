//! Log-domain accumulation primitives.
//!
//! Sums of the form `sum_t exp(x_t)` with `x_t` up to several thousand appear
//! everywhere here (every `p`-power pair sum), so all accumulation goes
//! through a streaming max-shifted log-sum-exp. Accumulation order is fixed
//! by the caller; results are deterministic for a fixed push order.

/// Streaming log-sum-exp accumulator: after pushing `x_1..x_n`, `log_total`
/// returns `log(sum_i exp(x_i))` without ever forming the raw exponentials.
#[derive(Clone, Copy, Debug)]
pub struct LogSumAcc {
    max: f64,
    sum: f64,
}

impl LogSumAcc {
    pub fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x <= self.max {
            self.sum += (x - self.max).exp();
        } else {
            // rescale the running sum to the new maximum
            self.sum = self.sum * (self.max - x).exp() + 1.0;
            self.max = x;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.max == f64::NEG_INFINITY
    }

    pub fn log_total(&self) -> f64 {
        if self.is_empty() {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

impl Default for LogSumAcc {
    fn default() -> Self {
        Self::new()
    }
}

/// Signed variant: terms `sign * exp(x)` accumulate into separate positive
/// and negative log-sums which are combined only at the end.
#[derive(Clone, Copy, Debug, Default)]
pub struct SignedLogAcc {
    pos: LogSumAcc,
    neg: LogSumAcc,
}

impl SignedLogAcc {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, log_mag: f64, sign: f64) {
        if sign > 0.0 {
            self.pos.push(log_mag);
        } else if sign < 0.0 {
            self.neg.push(log_mag);
        }
        // sign == 0 contributes nothing
    }

    /// Returns `(sign, log|total|)`; `(0, -inf)` for an empty or exactly
    /// cancelled sum.
    pub fn signed_log_total(&self) -> (f64, f64) {
        let lp = self.pos.log_total();
        let ln = self.neg.log_total();
        if lp == f64::NEG_INFINITY && ln == f64::NEG_INFINITY {
            return (0.0, f64::NEG_INFINITY);
        }
        if lp > ln {
            // log(e^lp - e^ln) = lp + log(1 - e^(ln - lp))
            (1.0, lp + (-((ln - lp).exp())).ln_1p())
        } else if ln > lp {
            (-1.0, ln + (-((lp - ln).exp())).ln_1p())
        } else {
            (0.0, f64::NEG_INFINITY)
        }
    }

    /// Collapses to a plain float. Overflows to +-inf only if the true
    /// magnitude exceeds f64 range.
    pub fn total(&self) -> f64 {
        let (sign, lm) = self.signed_log_total();
        sign * lm.exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logsum_matches_naive_on_moderate_terms() {
        let xs = [0.3, -1.2, 2.5, 0.0, -0.7];
        let mut acc = LogSumAcc::new();
        for &x in &xs {
            acc.push(x);
        }
        let naive: f64 = xs.iter().map(|x| x.exp()).sum::<f64>().ln();
        assert!((acc.log_total() - naive).abs() < 1e-14);
    }

    #[test]
    fn logsum_survives_huge_shifts() {
        let mut acc = LogSumAcc::new();
        acc.push(1234.0);
        acc.push(1232.0);
        // log(exp(1234) + exp(1232)) = 1232 + log(exp(2) + 1)
        let expected = 1232.0 + (2f64.exp() + 1.0).ln();
        assert!((acc.log_total() - expected).abs() < 1e-12);

        let mut acc = LogSumAcc::new();
        acc.push(-1234.0);
        acc.push(-1230.0);
        let expected = -1230.0 + (1.0 + (-4f64).exp()).ln();
        assert!((acc.log_total() - expected).abs() < 1e-12);
    }

    #[test]
    fn logsum_empty_is_neg_inf() {
        let acc = LogSumAcc::new();
        assert_eq!(acc.log_total(), f64::NEG_INFINITY);
        let mut acc = LogSumAcc::new();
        acc.push(f64::NEG_INFINITY);
        assert_eq!(acc.log_total(), f64::NEG_INFINITY);
    }

    #[test]
    fn signed_acc_cancellation_and_sign() {
        let mut acc = SignedLogAcc::new();
        acc.push(1.0_f64.ln(), 1.0);
        acc.push(3.0_f64.ln(), -1.0);
        let (sign, lm) = acc.signed_log_total();
        assert_eq!(sign, -1.0);
        assert!((lm.exp() - 2.0).abs() < 1e-14);

        let mut acc = SignedLogAcc::new();
        acc.push(2.5_f64.ln(), 1.0);
        acc.push(2.5_f64.ln(), -1.0);
        let (sign, lm) = acc.signed_log_total();
        assert_eq!(sign, 0.0);
        assert_eq!(lm, f64::NEG_INFINITY);
        assert_eq!(acc.total(), 0.0);
    }
}

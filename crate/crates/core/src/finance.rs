//! Annualization of capital costs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FinanceError {
    #[error("discount_rate must be non-negative and finite, got {0}")]
    DiscountRate(f64),
    #[error("lifetime_years must be at least 1")]
    Lifetime,
    #[error("fixed_om_fraction must be non-negative and finite, got {0}")]
    FixedOm(f64),
}

/// Discount rate, asset life, and fixed O&M as a fraction of capex per year.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinancialAssumptions {
    pub discount_rate: f64,
    pub lifetime_years: u32,
    pub fixed_om_fraction: f64,
}

impl Default for FinancialAssumptions {
    fn default() -> Self {
        Self {
            discount_rate: 0.08,
            lifetime_years: 20,
            fixed_om_fraction: 0.02,
        }
    }
}

impl FinancialAssumptions {
    pub fn validate(&self) -> Result<(), FinanceError> {
        if !(self.discount_rate.is_finite() && self.discount_rate >= 0.0) {
            return Err(FinanceError::DiscountRate(self.discount_rate));
        }
        if self.lifetime_years < 1 {
            return Err(FinanceError::Lifetime);
        }
        if !(self.fixed_om_fraction.is_finite() && self.fixed_om_fraction >= 0.0) {
            return Err(FinanceError::FixedOm(self.fixed_om_fraction));
        }
        Ok(())
    }

    /// Capital recovery factor `r(1+r)^n / ((1+r)^n - 1)`, or `1/n` at `r = 0`.
    pub fn capital_recovery_factor(&self) -> f64 {
        let n = f64::from(self.lifetime_years);
        let r = self.discount_rate;
        if r == 0.0 {
            return 1.0 / n;
        }
        // (1+r)^n - 1 via expm1 keeps precision for tiny rates.
        let growth_minus_one = (n * r.ln_1p()).exp_m1();
        r * (growth_minus_one + 1.0) / growth_minus_one
    }

    /// Fraction of capex charged per year: CRF plus fixed O&M.
    pub fn annual_charge_rate(&self) -> f64 {
        self.capital_recovery_factor() + self.fixed_om_fraction
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fin(r: f64, n: u32) -> FinancialAssumptions {
        FinancialAssumptions {
            discount_rate: r,
            lifetime_years: n,
            fixed_om_fraction: 0.0,
        }
    }

    #[test]
    fn crf_matches_textbook_values() {
        // Annuity factor for 8%, 20 years.
        assert_relative_eq!(fin(0.08, 20).capital_recovery_factor(), 0.101_852_208_823, max_relative = 1e-10);
        assert_relative_eq!(fin(0.0, 20).capital_recovery_factor(), 0.05);
        assert_relative_eq!(fin(0.1, 1).capital_recovery_factor(), 1.1, max_relative = 1e-12);
    }

    #[test]
    fn crf_is_continuous_at_zero_rate() {
        assert_relative_eq!(fin(1e-9, 25).capital_recovery_factor(), 0.04, max_relative = 1e-6);
    }

    #[test]
    fn validation() {
        assert!(FinancialAssumptions::default().validate().is_ok());
        assert_eq!(fin(-0.01, 10).validate(), Err(FinanceError::DiscountRate(-0.01)));
        assert_eq!(fin(0.05, 0).validate(), Err(FinanceError::Lifetime));
        let mut f = fin(0.05, 10);
        f.fixed_om_fraction = -1.0;
        assert_eq!(f.validate(), Err(FinanceError::FixedOm(-1.0)));
    }
}

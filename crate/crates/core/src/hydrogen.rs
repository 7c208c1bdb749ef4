//! Levelized cost of electrolytic hydrogen.
//!
//! LCOH = annualized capex and fixed O&M spread over the year's output,
//! plus electricity, minus a flat production subsidy. The subsidy is one
//! USD/kg lever applied for the whole plant life.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::electrolysis::{Region, StackTechnology};
use crate::finance::{FinanceError, FinancialAssumptions};

pub const HOURS_PER_YEAR: f64 = 8760.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HydrogenError {
    #[error("utilization must lie in (0, 1], got {0}")]
    ZeroUtilization(f64),
    #[error("specific energy must be positive, got {0} kWh/kg")]
    SpecificEnergy(f64),
    #[error("capex must be non-negative, got {0} USD/kW")]
    Capex(f64),
    #[error("subsidy must be non-negative, got {0} USD/kg")]
    Subsidy(f64),
    #[error("target LCOH must be non-negative, got {0} USD/kg")]
    Target(f64),
    #[error(transparent)]
    Finance(#[from] FinanceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HydrogenPlantAssumptions {
    pub capex_usd_per_kw: f64,
    pub specific_energy_kwh_per_kg: f64,
    pub utilization: f64,
    pub electricity_price_usd_per_kwh: f64,
    pub subsidy_usd_per_kg: f64,
    pub financial: FinancialAssumptions,
}

impl HydrogenPlantAssumptions {
    pub fn validate(&self) -> Result<(), HydrogenError> {
        if !(self.utilization > 0.0 && self.utilization <= 1.0) {
            return Err(HydrogenError::ZeroUtilization(self.utilization));
        }
        if !(self.specific_energy_kwh_per_kg.is_finite() && self.specific_energy_kwh_per_kg > 0.0) {
            return Err(HydrogenError::SpecificEnergy(self.specific_energy_kwh_per_kg));
        }
        if !(self.capex_usd_per_kw.is_finite() && self.capex_usd_per_kw >= 0.0) {
            return Err(HydrogenError::Capex(self.capex_usd_per_kw));
        }
        if !(self.subsidy_usd_per_kg.is_finite() && self.subsidy_usd_per_kg >= 0.0) {
            return Err(HydrogenError::Subsidy(self.subsidy_usd_per_kg));
        }
        self.financial.validate()?;
        Ok(())
    }

    /// Capital plus fixed O&M per kg of hydrogen, USD/kg.
    pub fn capital_contribution(&self) -> Result<f64, HydrogenError> {
        self.validate()?;
        let annual_usd_per_kw = self.capex_usd_per_kw * self.financial.annual_charge_rate();
        let kg_per_kw_year = HOURS_PER_YEAR * self.utilization / self.specific_energy_kwh_per_kg;
        Ok(annual_usd_per_kw / kg_per_kw_year)
    }

    /// Levelized cost, USD/kg. Negative when the subsidy exceeds cost.
    pub fn lcoh(&self) -> Result<f64, HydrogenError> {
        let capital = self.capital_contribution()?;
        Ok(capital + self.electricity_price_usd_per_kwh * self.specific_energy_kwh_per_kg
            - self.subsidy_usd_per_kg)
    }

    /// Electricity price at which [`lcoh`](Self::lcoh) equals `target`,
    /// ignoring the configured electricity price. A negative answer means the
    /// target is out of reach at any non-negative power price.
    pub fn required_electricity_price(&self, target_lcoh: f64) -> Result<f64, HydrogenError> {
        if !(target_lcoh.is_finite() && target_lcoh >= 0.0) {
            return Err(HydrogenError::Target(target_lcoh));
        }
        let capital = self.capital_contribution()?;
        Ok((target_lcoh + self.subsidy_usd_per_kg - capital) / self.specific_energy_kwh_per_kg)
    }

    pub fn with_utilization(&self, utilization: f64) -> Self {
        Self { utilization, ..*self }
    }

    pub fn with_electricity_price(&self, price: f64) -> Self {
        Self {
            electricity_price_usd_per_kwh: price,
            ..*self
        }
    }

    pub fn with_subsidy(&self, subsidy: f64) -> Self {
        Self {
            subsidy_usd_per_kg: subsidy,
            ..*self
        }
    }

    pub fn with_capex(&self, capex: f64) -> Self {
        Self {
            capex_usd_per_kw: capex,
            ..*self
        }
    }
}

/// Hydrogen inputs as stored in a scenario. Capex comes from the
/// electrolysis section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HydrogenConfig {
    pub specific_energy_kwh_per_kg: f64,
    pub financial: FinancialAssumptions,
    /// Production credit applied in the subsidized 2030 case.
    pub subsidy_usd_per_kg: f64,
    /// Stack technology used for each region's hydrogen supply.
    pub reference_tech: BTreeMap<Region, StackTechnology>,
    pub utilization_grid: Vec<f64>,
    pub electricity_price_grid_usd_per_kwh: Vec<f64>,
}

impl Default for HydrogenConfig {
    fn default() -> Self {
        use Region::*;
        use StackTechnology::*;
        Self {
            specific_energy_kwh_per_kg: 55.0,
            financial: FinancialAssumptions::default(),
            subsidy_usd_per_kg: 3.0,
            reference_tech: [
                (Usa, WesternPem),
                (Eu, WesternPem),
                (China, ChineseAlkaline),
                (Row, ChineseAlkaline),
            ]
            .into_iter()
            .collect(),
            utilization_grid: vec![0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
            electricity_price_grid_usd_per_kwh: vec![0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08],
        }
    }
}

impl HydrogenConfig {
    pub fn plant(&self, capex_usd_per_kw: f64, utilization: f64, price: f64, subsidy: f64) -> HydrogenPlantAssumptions {
        HydrogenPlantAssumptions {
            capex_usd_per_kw,
            specific_energy_kwh_per_kg: self.specific_energy_kwh_per_kg,
            utilization,
            electricity_price_usd_per_kwh: price,
            subsidy_usd_per_kg: subsidy,
            financial: self.financial,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn plant() -> HydrogenPlantAssumptions {
        HydrogenPlantAssumptions {
            capex_usd_per_kw: 1000.0,
            specific_energy_kwh_per_kg: 55.0,
            utilization: 1.0,
            electricity_price_usd_per_kwh: 0.0,
            subsidy_usd_per_kg: 0.0,
            financial: FinancialAssumptions::default(),
        }
    }

    #[test]
    fn zero_capex_has_no_capital_cost() {
        assert_eq!(plant().with_capex(0.0).capital_contribution().unwrap(), 0.0);
    }

    #[test]
    fn hand_arithmetic() {
        // 1000 * 0.1314 * 55 / 8760
        let mut p = plant();
        p.financial = FinancialAssumptions {
            discount_rate: 0.0,
            lifetime_years: 10,
            fixed_om_fraction: 0.0314,
        };
        assert_relative_eq!(p.capital_contribution().unwrap(), 0.825, max_relative = 1e-3);
        assert_relative_eq!(
            p.capital_contribution().unwrap(),
            1000.0 * 0.1314 * 55.0 / 8760.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn energy_only_cost() {
        let p = plant().with_capex(0.0).with_electricity_price(0.02);
        assert_relative_eq!(p.lcoh().unwrap(), 1.10, max_relative = 1e-12);
    }

    #[test]
    fn subsidy_shifts_cost_exactly() {
        let p = plant().with_electricity_price(0.03);
        let delta = p.lcoh().unwrap() - p.with_subsidy(3.0).lcoh().unwrap();
        assert_relative_eq!(delta, 3.0, max_relative = 1e-12);
    }

    #[test]
    fn boundary_price_is_zero() {
        let p = plant().with_utilization(0.5);
        let cap = p.capital_contribution().unwrap();
        assert_eq!(p.required_electricity_price(cap).unwrap(), 0.0);
    }

    #[test]
    fn invalid_inputs() {
        assert_eq!(
            plant().with_utilization(0.0).capital_contribution(),
            Err(HydrogenError::ZeroUtilization(0.0))
        );
        assert!(plant().with_utilization(1.5).lcoh().is_err());
        assert!(plant().with_subsidy(-1.0).lcoh().is_err());
        assert!(plant().required_electricity_price(-1.0).is_err());
        let mut p = plant();
        p.specific_energy_kwh_per_kg = 0.0;
        assert!(matches!(p.lcoh(), Err(HydrogenError::SpecificEnergy(_))));
    }

    proptest! {
        #[test]
        fn capital_times_utilization_is_constant(u in 0.01f64..=1.0, capex in 0.0f64..5000.0) {
            let p = plant().with_capex(capex);
            let full = p.capital_contribution().unwrap();
            let part = p.with_utilization(u).capital_contribution().unwrap() * u;
            prop_assert!((part - full).abs() <= 1e-12 * full.max(1.0));
        }

        #[test]
        fn strictly_decreasing_in_utilization(u in 0.01f64..0.99, du in 1e-3f64..0.01, capex in 1.0f64..5000.0) {
            let p = plant().with_capex(capex);
            prop_assert!(p.with_utilization(u + du).capital_contribution().unwrap()
                < p.with_utilization(u).capital_contribution().unwrap());
        }

        #[test]
        fn inverse_round_trips(
            capex in 0.0f64..4000.0, u in 0.05f64..=1.0, sub in 0.0f64..3.0,
            target in 0.0f64..8.0, rate in 0.0f64..0.15,
        ) {
            let mut p = plant().with_capex(capex).with_utilization(u).with_subsidy(sub);
            p.financial.discount_rate = rate;
            let price = p.required_electricity_price(target).unwrap();
            let back = p.with_electricity_price(price).lcoh().unwrap();
            prop_assert!((back - target).abs() <= 1e-9 * target.abs().max(1.0));
        }

        /// Exact finite differences: lcoh is affine in price (slope = specific
        /// energy) and in subsidy (slope = -1).
        #[test]
        fn affine_slopes(price in 0.0f64..0.2, h in 0.001f64..0.05, sub in 0.0f64..3.0) {
            let p = plant().with_electricity_price(price).with_subsidy(sub);
            let dp = (p.with_electricity_price(price + h).lcoh().unwrap() - p.lcoh().unwrap()) / h;
            prop_assert!((dp - 55.0).abs() <= 1e-9 * 55.0 / h);
            let ds = p.with_subsidy(sub + 1.0).lcoh().unwrap() - p.lcoh().unwrap();
            prop_assert!((ds + 1.0).abs() <= 1e-12 * 100.0);
        }
    }
}

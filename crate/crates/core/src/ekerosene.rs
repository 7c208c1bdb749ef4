//! Levelized cost of e-kerosene from electrolytic hydrogen and captured CO2,
//! and the per-passenger fuel premium at a given blend.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::electrolysis::Region;
use crate::range::{Bounds, ProjectionRange};

pub const LITERS_PER_GALLON: f64 = 3.78541;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid e-kerosene input: {0}")]
pub struct EkeroseneError(pub String);

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), EkeroseneError> {
    if ok {
        Ok(())
    } else {
        Err(EkeroseneError(msg()))
    }
}

/// Feedstock intensities and conversion costs per kg of fuel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EkAssumptions {
    pub h2_kg_per_kg: f64,
    pub co2_kg_per_kg: f64,
    pub synthesis_levelized_usd_per_kg: f64,
    pub synthesis_electricity_kwh_per_kg: f64,
    pub electricity_price_usd_per_kwh: f64,
    pub density_kg_per_l: f64,
    pub subsidy_usd_per_gal: f64,
}

impl EkAssumptions {
    pub fn validate(&self) -> Result<(), EkeroseneError> {
        check(self.h2_kg_per_kg > 0.0 && self.h2_kg_per_kg.is_finite(), || {
            format!("h2_kg_per_kg {} must be positive", self.h2_kg_per_kg)
        })?;
        check(self.co2_kg_per_kg > 0.0 && self.co2_kg_per_kg.is_finite(), || {
            format!("co2_kg_per_kg {} must be positive", self.co2_kg_per_kg)
        })?;
        check(self.density_kg_per_l > 0.7 && self.density_kg_per_l <= 0.85, || {
            format!("density_kg_per_l {} outside (0.7, 0.85]", self.density_kg_per_l)
        })?;
        check(self.subsidy_usd_per_gal >= 0.0 && self.subsidy_usd_per_gal.is_finite(), || {
            format!("subsidy_usd_per_gal {} must be non-negative", self.subsidy_usd_per_gal)
        })?;
        for (name, v) in [
            ("synthesis_levelized_usd_per_kg", self.synthesis_levelized_usd_per_kg),
            ("synthesis_electricity_kwh_per_kg", self.synthesis_electricity_kwh_per_kg),
            ("electricity_price_usd_per_kwh", self.electricity_price_usd_per_kwh),
        ] {
            check(v >= 0.0 && v.is_finite(), || format!("{name} {v} must be non-negative"))?;
        }
        Ok(())
    }

    pub fn kg_per_gallon(&self) -> f64 {
        self.density_kg_per_l * LITERS_PER_GALLON
    }

    /// Production cost, USD per gallon, net of subsidy.
    ///
    /// `h2_cost` is USD/kg H2; `co2_cost` is USD/t CO2.
    pub fn lcoek(&self, h2_cost: f64, co2_cost: f64) -> Result<f64, EkeroseneError> {
        self.validate()?;
        let per_kg = self.h2_kg_per_kg * h2_cost
            + self.co2_kg_per_kg * (co2_cost / 1000.0)
            + self.synthesis_levelized_usd_per_kg
            + self.synthesis_electricity_kwh_per_kg * self.electricity_price_usd_per_kwh;
        Ok(per_kg * self.kg_per_gallon() - self.subsidy_usd_per_gal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlightAssumptions {
    pub distance_km: f64,
    pub fuel_burn_l_per_pax_km: f64,
    pub blend: f64,
    pub fossil_price_usd_per_gal: f64,
}

impl FlightAssumptions {
    pub fn validate(&self) -> Result<(), EkeroseneError> {
        check((0.0..=1.0).contains(&self.blend), || format!("blend {} outside [0, 1]", self.blend))?;
        for (name, v) in [
            ("distance_km", self.distance_km),
            ("fuel_burn_l_per_pax_km", self.fuel_burn_l_per_pax_km),
            ("fossil_price_usd_per_gal", self.fossil_price_usd_per_gal),
        ] {
            check(v > 0.0 && v.is_finite(), || format!("{name} {v} must be positive"))?;
        }
        Ok(())
    }

    pub fn gallons_per_passenger(&self) -> f64 {
        self.distance_km * self.fuel_burn_l_per_pax_km / LITERS_PER_GALLON
    }

    /// Extra fuel cost per passenger from blending e-kerosene at `lcoek`
    /// USD/gal. Negative when e-kerosene is cheaper than fossil fuel.
    pub fn premium(&self, lcoek: f64) -> Result<f64, EkeroseneError> {
        self.validate()?;
        Ok(self.blend * (lcoek - self.fossil_price_usd_per_gal) * self.gallons_per_passenger())
    }
}

/// Stoichiometric inputs as stored in a scenario; effective intensities are
/// the stoichiometric ones times the conversion multiplier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EkeroseneConfig {
    pub h2_stoichiometric_kg_per_kg: f64,
    pub co2_stoichiometric_kg_per_kg: f64,
    pub conversion_multiplier: f64,
    pub synthesis_levelized_usd_per_kg: f64,
    pub synthesis_electricity_kwh_per_kg: f64,
    /// Applies to both electrolysis feeding the synthesis and the synthesis itself.
    pub electricity_price_usd_per_kwh: f64,
    pub density_kg_per_l: f64,
    /// Utilization of the electrolyzers supplying hydrogen.
    pub h2_utilization: f64,
    /// Production subsidy for the US case, USD/gal.
    pub us_subsidy_usd_per_gal: f64,
    pub flight: FlightConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlightConfig {
    /// Region whose projected fuel cost sets the premium.
    pub region: Region,
    pub distance_km: f64,
    pub fuel_burn_l_per_pax_km: Bounds,
    pub blend: f64,
    pub fossil_price_usd_per_gal: Bounds,
}

impl Default for EkeroseneConfig {
    fn default() -> Self {
        Self {
            h2_stoichiometric_kg_per_kg: 0.43,
            co2_stoichiometric_kg_per_kg: 3.12,
            conversion_multiplier: 1.1,
            synthesis_levelized_usd_per_kg: 0.55,
            synthesis_electricity_kwh_per_kg: 0.8,
            electricity_price_usd_per_kwh: 0.05,
            density_kg_per_l: 0.8,
            h2_utilization: 0.7,
            us_subsidy_usd_per_gal: 1.75,
            flight: FlightConfig::default(),
        }
    }
}

impl Default for FlightConfig {
    fn default() -> Self {
        Self {
            region: Region::Usa,
            distance_km: 5570.0,
            fuel_burn_l_per_pax_km: ProjectionRange::new(0.028, 0.032, 0.036).expect("ordered"),
            blend: 0.05,
            fossil_price_usd_per_gal: ProjectionRange::new(1.0, 2.125, 3.25).expect("ordered"),
        }
    }
}

impl EkeroseneConfig {
    pub fn assumptions(&self, subsidy_usd_per_gal: f64) -> Result<EkAssumptions, EkeroseneError> {
        check(self.conversion_multiplier >= 1.0 && self.conversion_multiplier.is_finite(), || {
            format!("conversion_multiplier {} must be at least 1", self.conversion_multiplier)
        })?;
        check(self.h2_utilization > 0.0 && self.h2_utilization <= 1.0, || {
            format!("h2_utilization {} outside (0, 1]", self.h2_utilization)
        })?;
        let ek = EkAssumptions {
            h2_kg_per_kg: self.h2_stoichiometric_kg_per_kg * self.conversion_multiplier,
            co2_kg_per_kg: self.co2_stoichiometric_kg_per_kg * self.conversion_multiplier,
            synthesis_levelized_usd_per_kg: self.synthesis_levelized_usd_per_kg,
            synthesis_electricity_kwh_per_kg: self.synthesis_electricity_kwh_per_kg,
            electricity_price_usd_per_kwh: self.electricity_price_usd_per_kwh,
            density_kg_per_l: self.density_kg_per_l,
            subsidy_usd_per_gal,
        };
        ek.validate()?;
        Ok(ek)
    }

    pub fn flight(&self, burn: f64, fossil_price: f64) -> FlightAssumptions {
        FlightAssumptions {
            distance_km: self.flight.distance_km,
            fuel_burn_l_per_pax_km: burn,
            blend: self.flight.blend,
            fossil_price_usd_per_gal: fossil_price,
        }
    }
}

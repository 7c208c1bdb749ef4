//! Liquid-solvent direct air capture: capital learning, capture cost, net
//! removal after upstream methane leakage, and the investment needed to hit
//! a net removal cost target.
//!
//! On-site combustion CO2 is assumed co-captured, so the only debit against
//! gross capture is methane leaked upstream of the plant, converted to CO2
//! equivalent at the chosen GWP horizon. Leak rates are fractions of produced
//! gas, so delivering one unit of gas leaks `L / (1 - L)` units.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curves::{CurveError, LearningCurve};
use crate::finance::{FinanceError, FinancialAssumptions};
use crate::range::{Bounds, InvalidRange, ProjectionRange};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DacError {
    #[error("invalid DAC parameter: {0}")]
    Invalid(String),
    #[error("net removal fraction {0} is not positive: leakage cancels the captured CO2")]
    NonPositiveRemoval(f64),
    #[error("target {target} USD/t unreachable: non-learning costs alone are {floor} USD/t")]
    UnreachableTarget { target: f64, floor: f64 },
    #[error("target {target} USD/t is above the current net removal cost {current} USD/t")]
    TargetAboveCurrent { target: f64, current: f64 },
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Finance(#[from] FinanceError),
    #[error(transparent)]
    Range(#[from] InvalidRange),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GwpHorizon {
    Gwp20,
    Gwp100,
}

impl fmt::Display for GwpHorizon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GwpHorizon::Gwp20 => "gwp20",
            GwpHorizon::Gwp100 => "gwp100",
        })
    }
}

/// Methane global warming potentials relative to CO2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GwpValues {
    pub gwp20: f64,
    pub gwp100: f64,
}

impl Default for GwpValues {
    fn default() -> Self {
        // Fossil methane.
        Self {
            gwp20: 82.5,
            gwp100: 29.8,
        }
    }
}

impl GwpValues {
    pub fn get(&self, horizon: GwpHorizon) -> f64 {
        match horizon {
            GwpHorizon::Gwp20 => self.gwp20,
            GwpHorizon::Gwp100 => self.gwp100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeakageSpec {
    pub leak_rate: f64,
    pub gwp: f64,
    pub horizon: GwpHorizon,
}

impl LeakageSpec {
    pub fn new(leak_rate: f64, horizon: GwpHorizon, gwp: &GwpValues) -> Result<Self, DacError> {
        let spec = Self {
            leak_rate,
            gwp: gwp.get(horizon),
            horizon,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), DacError> {
        if !(0.0..1.0).contains(&self.leak_rate) {
            return Err(DacError::Invalid(format!("leak_rate {} outside [0, 1)", self.leak_rate)));
        }
        if !(self.gwp.is_finite() && self.gwp > 0.0) {
            return Err(DacError::Invalid(format!("gwp {} must be positive", self.gwp)));
        }
        Ok(())
    }

    /// Gas leaked per unit of gas delivered.
    pub fn leaked_per_delivered(&self) -> f64 {
        self.leak_rate / (1.0 - self.leak_rate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DacCostModel {
    pub capital_curve: LearningCurve,
    pub financial: FinancialAssumptions,
    pub capacity_factor: f64,
    pub non_learning_opex_usd_per_t: f64,
    pub gas_intensity_gj_per_t: f64,
    pub methane_t_per_gj: f64,
}

impl DacCostModel {
    pub fn validate(&self) -> Result<(), DacError> {
        self.financial.validate()?;
        if !(self.capacity_factor > 0.0 && self.capacity_factor <= 1.0) {
            return Err(DacError::Invalid(format!(
                "capacity_factor {} outside (0, 1]",
                self.capacity_factor
            )));
        }
        for (name, v) in [
            ("non_learning_opex_usd_per_t", self.non_learning_opex_usd_per_t),
            ("gas_intensity_gj_per_t", self.gas_intensity_gj_per_t),
            ("methane_t_per_gj", self.methane_t_per_gj),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(DacError::Invalid(format!("{name} {v} must be non-negative")));
            }
        }
        Ok(())
    }

    /// Annualized capital and fixed O&M per tonne captured, per unit of
    /// capex (USD per t/yr).
    pub fn capital_charge_per_tonne(&self) -> f64 {
        self.financial.annual_charge_rate() / self.capacity_factor
    }

    /// Capex per t/yr once cumulative capacity reaches `cumulative_capacity`.
    pub fn capital_cost(&self, cumulative_capacity: f64) -> Result<f64, DacError> {
        Ok(self.capital_curve.project_cost(cumulative_capacity)?)
    }

    /// Gross capture cost, USD per tonne CO2 captured.
    pub fn capture_cost(&self, cumulative_capacity: f64) -> Result<f64, DacError> {
        self.validate()?;
        let capex = self.capital_cost(cumulative_capacity)?;
        Ok(capex * self.capital_charge_per_tonne() + self.non_learning_opex_usd_per_t)
    }

    /// Net tonnes removed per tonne captured. Zero or negative when leaked
    /// methane outweighs the capture.
    pub fn net_removal_fraction(&self, leakage: &LeakageSpec) -> f64 {
        let methane_per_tonne = self.gas_intensity_gj_per_t * self.methane_t_per_gj * leakage.leaked_per_delivered();
        1.0 - methane_per_tonne * leakage.gwp
    }

    fn positive_fraction(&self, leakage: &LeakageSpec) -> Result<f64, DacError> {
        leakage.validate()?;
        let fraction = self.net_removal_fraction(leakage);
        if fraction <= 0.0 {
            return Err(DacError::NonPositiveRemoval(fraction));
        }
        Ok(fraction)
    }

    /// Cost per tonne of net atmospheric removal.
    pub fn net_removal_cost(&self, cumulative_capacity: f64, leakage: &LeakageSpec) -> Result<f64, DacError> {
        let fraction = self.positive_fraction(leakage)?;
        Ok(self.capture_cost(cumulative_capacity)? / fraction)
    }

    /// Capacity and gross learning investment needed before the net removal
    /// cost falls to `target_net_cost`.
    pub fn target_analysis(&self, leakage: &LeakageSpec, target_net_cost: f64) -> Result<TargetOutcome, DacError> {
        self.validate()?;
        let fraction = self.positive_fraction(leakage)?;
        let curve = &self.capital_curve;
        let current = self.net_removal_cost(curve.initial_capacity(), leakage)?;

        let required_capture = target_net_cost * fraction;
        if !(required_capture > self.non_learning_opex_usd_per_t) {
            return Err(DacError::UnreachableTarget {
                target: target_net_cost,
                floor: self.non_learning_opex_usd_per_t / fraction,
            });
        }
        let required_capex =
            (required_capture - self.non_learning_opex_usd_per_t) / self.capital_charge_per_tonne();

        let initial = curve.initial_cost();
        if required_capex >= initial * (1.0 - 1e-12) {
            if required_capex > initial * (1.0 + 1e-9) {
                return Err(DacError::TargetAboveCurrent {
                    target: target_net_cost,
                    current,
                });
            }
            return Ok(TargetOutcome {
                required_capacity_t_per_yr: curve.initial_capacity(),
                learning_investment_usd: 0.0,
            });
        }

        let capacity = curve.capacity_for_cost(required_capex)?;
        let investment = curve.cumulative_investment(curve.initial_capacity(), capacity)?;
        Ok(TargetOutcome {
            required_capacity_t_per_yr: capacity,
            learning_investment_usd: investment,
        })
    }

    fn sweep_point(&self, leakage: &LeakageSpec, target: f64) -> SweepPoint {
        match self.target_analysis(leakage, target) {
            Ok(outcome) => SweepPoint::Reached(outcome),
            Err(DacError::TargetAboveCurrent { .. }) => SweepPoint::AlreadyMet(TargetOutcome {
                required_capacity_t_per_yr: self.capital_curve.initial_capacity(),
                learning_investment_usd: 0.0,
            }),
            Err(e) => SweepPoint::Unreachable { reason: e.to_string() },
        }
    }

    /// Target analysis over a decreasing grid of targets at two leakage
    /// bounds. Per-target failures are recorded, not propagated.
    pub fn target_sweep(
        &self,
        leakage_lo: &LeakageSpec,
        leakage_hi: &LeakageSpec,
        target_grid: &[f64],
    ) -> Result<Vec<SweepRow>, DacError> {
        if target_grid.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(DacError::Invalid("target grid must be strictly decreasing".into()));
        }
        Ok(target_grid
            .iter()
            .map(|&target| SweepRow {
                target_usd_per_t: target,
                low_leakage: self.sweep_point(leakage_lo, target),
                high_leakage: self.sweep_point(leakage_hi, target),
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetOutcome {
    pub required_capacity_t_per_yr: f64,
    pub learning_investment_usd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SweepPoint {
    Reached(TargetOutcome),
    /// Target is at or above today's net removal cost.
    AlreadyMet(TargetOutcome),
    Unreachable { reason: String },
}

impl SweepPoint {
    pub fn outcome(&self) -> Option<&TargetOutcome> {
        match self {
            SweepPoint::Reached(o) | SweepPoint::AlreadyMet(o) => Some(o),
            SweepPoint::Unreachable { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub target_usd_per_t: f64,
    pub low_leakage: SweepPoint,
    pub high_leakage: SweepPoint,
}

/// Gas intensity implied by two leakage anchors, and a compromise value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GasIntensityFit {
    /// Solves `capture / fraction(anchor_leak, gwp100) = anchor_net_cost`.
    pub from_net_cost_anchor: f64,
    /// Solves `fraction(cancel_leak, gwp20) = 0`.
    pub from_cancellation_anchor: f64,
    /// Minimizes the summed squared relative distance to both.
    pub least_squares: f64,
}

pub struct LeakageAnchors {
    pub capture_cost: f64,
    pub net_cost: f64,
    pub net_cost_leak_rate: f64,
    pub net_cost_gwp: f64,
    pub cancellation_leak_rate: f64,
    pub cancellation_gwp: f64,
}

pub fn fit_gas_intensity(anchors: &LeakageAnchors, methane_t_per_gj: f64) -> GasIntensityFit {
    let per_gas = |leak: f64, gwp: f64| methane_t_per_gj * leak / (1.0 - leak) * gwp;
    let g1 = (1.0 - anchors.capture_cost / anchors.net_cost)
        / per_gas(anchors.net_cost_leak_rate, anchors.net_cost_gwp);
    let g2 = 1.0 / per_gas(anchors.cancellation_leak_rate, anchors.cancellation_gwp);
    let least_squares = (1.0 / g1 + 1.0 / g2) / (1.0 / (g1 * g1) + 1.0 / (g2 * g2));
    GasIntensityFit {
        from_net_cost_anchor: g1,
        from_cancellation_anchor: g2,
        least_squares,
    }
}

/// Leakage sensitivity bounds as stored in a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeakageConfig {
    pub leak_rate: Bounds,
    pub horizon: GwpHorizon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DacConfig {
    pub capital_cost_usd_per_t_per_yr: f64,
    pub current_capacity_t_per_yr: f64,
    /// Cumulative capacity at the horizon if the announced pipeline is built.
    pub pipeline_capacity_t_per_yr: f64,
    pub learning_rate: Bounds,
    /// Learning rate typical of modular, mass-manufactured technologies,
    /// swept alongside the base case.
    pub high_learning_rate: f64,
    pub capacity_factor: f64,
    pub non_learning_opex_usd_per_t: f64,
    pub gas_intensity_gj_per_t: f64,
    pub methane_t_per_gj: f64,
    pub financial: FinancialAssumptions,
    pub gwp: GwpValues,
    pub leakage: LeakageConfig,
    pub target_grid_usd_per_t: Vec<f64>,
}

impl Default for DacConfig {
    fn default() -> Self {
        Self {
            capital_cost_usd_per_t_per_yr: 2600.0,
            current_capacity_t_per_yr: 0.5e6,
            pipeline_capacity_t_per_yr: 3.5e6,
            learning_rate: ProjectionRange::new(0.045, 0.12, 0.16).expect("ordered"),
            high_learning_rate: 0.20,
            capacity_factor: 0.9,
            non_learning_opex_usd_per_t: 44.0,
            gas_intensity_gj_per_t: 9.25,
            methane_t_per_gj: 0.019,
            financial: FinancialAssumptions {
                discount_rate: 0.08,
                lifetime_years: 20,
                fixed_om_fraction: 0.05,
            },
            gwp: GwpValues::default(),
            leakage: LeakageConfig {
                leak_rate: ProjectionRange::new(0.002, 0.01, 0.037).expect("ordered"),
                horizon: GwpHorizon::Gwp100,
            },
            target_grid_usd_per_t: vec![450.0, 400.0, 350.0, 300.0, 250.0, 200.0, 150.0, 100.0],
        }
    }
}

impl DacConfig {
    pub fn model(&self, learning_rate: f64) -> Result<DacCostModel, DacError> {
        let model = DacCostModel {
            capital_curve: LearningCurve::new(
                self.capital_cost_usd_per_t_per_yr,
                self.current_capacity_t_per_yr,
                learning_rate,
            )?,
            financial: self.financial,
            capacity_factor: self.capacity_factor,
            non_learning_opex_usd_per_t: self.non_learning_opex_usd_per_t,
            gas_intensity_gj_per_t: self.gas_intensity_gj_per_t,
            methane_t_per_gj: self.methane_t_per_gj,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn base_model(&self) -> Result<DacCostModel, DacError> {
        self.model(self.learning_rate.mid)
    }

    pub fn leakage_at(&self, leak_rate: f64) -> Result<LeakageSpec, DacError> {
        LeakageSpec::new(leak_rate, self.leakage.horizon, &self.gwp)
    }

    /// Horizon capex per t/yr across the learning-rate bounds.
    pub fn capital_envelope(&self) -> Result<ProjectionRange, DacError> {
        let at = |lr: f64| self.model(lr)?.capital_cost(self.pipeline_capacity_t_per_yr);
        Ok(ProjectionRange::new(
            at(self.learning_rate.hi)?,
            at(self.learning_rate.mid)?,
            at(self.learning_rate.lo)?,
        )?)
    }

    /// Net removal cost at the pipeline capacity and base learning rate,
    /// across the leakage bounds.
    pub fn net_removal_envelope(&self, capacity: f64) -> Result<ProjectionRange, DacError> {
        let model = self.base_model()?;
        let at = |leak: f64| model.net_removal_cost(capacity, &self.leakage_at(leak)?);
        let b = self.leakage.leak_rate;
        Ok(ProjectionRange::new(at(b.lo)?, at(b.mid)?, at(b.hi)?)?)
    }
}

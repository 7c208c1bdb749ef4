//! Full scenario projection: every section evaluated independently, with
//! (lo, mid, hi) envelopes taken at the corners of the sensitivity box.

use std::fmt;
use std::str::FromStr;
use std::thread;

use serde::{Deserialize, Serialize};

use crate::dac::{DacConfig, DacError, SweepRow};
use crate::ekerosene::EkeroseneConfig;
use crate::electrolysis::{CostBreakdown, ElectrolysisConfig, Region, StackTechnology};
use crate::hydrogen::HydrogenConfig;
use crate::range::ProjectionRange;
use crate::scenario::Scenario;
use crate::ENGINE_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionName {
    Electrolysis,
    Hydrogen,
    Dac,
    Ekerosene,
}

impl SectionName {
    pub const ALL: [SectionName; 4] = [
        SectionName::Electrolysis,
        SectionName::Hydrogen,
        SectionName::Dac,
        SectionName::Ekerosene,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SectionName::Electrolysis => "electrolysis",
            SectionName::Hydrogen => "hydrogen",
            SectionName::Dac => "dac",
            SectionName::Ekerosene => "ekerosene",
        }
    }
}

impl fmt::Display for SectionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SectionName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SectionName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| format!("unknown section `{s}`"))
    }
}

/// One section's outcome. A failed section carries its error message and
/// leaves the other sections untouched.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Section<T> {
    Ok { data: T },
    Failed { error: String },
}

impl<T> Section<T> {
    fn from_result<E: fmt::Display>(r: Result<T, E>) -> Self {
        match r {
            Ok(data) => Section::Ok { data },
            Err(e) => Section::Failed { error: e.to_string() },
        }
    }

    pub fn data(&self) -> Option<&T> {
        match self {
            Section::Ok { data } => Some(data),
            Section::Failed { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElectrolyzerRow {
    pub region: Region,
    pub tech: StackTechnology,
    pub current: CostBreakdown,
    /// Base-case projection at the horizon.
    pub projected: CostBreakdown,
    pub projected_total_usd_per_kw: ProjectionRange,
    pub decline_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElectrolysisResults {
    pub global_deployment_kw: f64,
    pub decline_min_fraction: f64,
    pub decline_max_fraction: f64,
    pub rows: Vec<ElectrolyzerRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HydrogenCase {
    Current,
    Horizon,
    HorizonSubsidized,
}

impl HydrogenCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            HydrogenCase::Current => "current",
            HydrogenCase::Horizon => "horizon",
            HydrogenCase::HorizonSubsidized => "horizon_subsidized",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LcohPoint {
    pub region: Region,
    pub tech: StackTechnology,
    pub case: HydrogenCase,
    pub capex_usd_per_kw: f64,
    pub utilization: f64,
    pub electricity_price_usd_per_kwh: f64,
    pub capital_usd_per_kg: f64,
    pub lcoh_usd_per_kg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HydrogenResults {
    pub subsidy_usd_per_kg: f64,
    pub points: Vec<LcohPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DacSweep {
    pub learning_rate: f64,
    pub low_leak_rate: f64,
    pub high_leak_rate: f64,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DacResults {
    pub current_capital_usd_per_t_per_yr: f64,
    pub current_capture_cost_usd_per_t: f64,
    pub pipeline_capacity_t_per_yr: f64,
    pub capital_usd_per_t_per_yr: ProjectionRange,
    pub capture_cost_usd_per_t: ProjectionRange,
    pub net_removal_fraction: ProjectionRange,
    pub net_removal_cost_usd_per_t: ProjectionRange,
    pub sweeps: Vec<DacSweep>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EkeroseneRow {
    pub region: Region,
    pub h2_current_usd_per_kg: f64,
    pub h2_horizon_usd_per_kg: f64,
    pub co2_current_usd_per_t: f64,
    pub co2_horizon_usd_per_t: f64,
    pub lcoek_current_usd_per_gal: f64,
    pub lcoek_horizon_usd_per_gal: f64,
    pub reduction_usd_per_gal: f64,
    /// Horizon cost with hydrogen credit and fuel subsidy, USA only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lcoek_horizon_subsidized_usd_per_gal: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EkeroseneResults {
    pub rows: Vec<EkeroseneRow>,
    pub flight_region: Region,
    pub flight_lcoek_usd_per_gal: f64,
    pub flight_premium_usd_per_passenger: ProjectionRange,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionResults {
    pub engine_version: String,
    pub scenario: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub electrolysis: Option<Section<ElectrolysisResults>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hydrogen: Option<Section<HydrogenResults>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dac: Option<Section<DacResults>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ekerosene: Option<Section<EkeroseneResults>>,
    pub effective_config: Scenario,
}

impl ProjectionResults {
    pub fn failed_sections(&self) -> Vec<SectionName> {
        let mut out = Vec::new();
        if matches!(self.electrolysis, Some(Section::Failed { .. })) {
            out.push(SectionName::Electrolysis);
        }
        if matches!(self.hydrogen, Some(Section::Failed { .. })) {
            out.push(SectionName::Hydrogen);
        }
        if matches!(self.dac, Some(Section::Failed { .. })) {
            out.push(SectionName::Dac);
        }
        if matches!(self.ekerosene, Some(Section::Failed { .. })) {
            out.push(SectionName::Ekerosene);
        }
        out
    }
}

pub fn project_electrolysis(cfg: &ElectrolysisConfig) -> Result<ElectrolysisResults, crate::electrolysis::ElectrolysisError> {
    let model = cfg.base_model()?;
    let mut rows = Vec::new();
    for region in Region::ALL {
        for tech in StackTechnology::ALL {
            rows.push(ElectrolyzerRow {
                region,
                tech,
                current: model.current_capital_cost(region, tech),
                projected: model.project_capital_cost(region, tech)?,
                projected_total_usd_per_kw: cfg.envelope(region, tech)?,
                decline_fraction: model.total_decline(region, tech)?,
            });
        }
    }
    let declines = rows.iter().map(|r| r.decline_fraction);
    Ok(ElectrolysisResults {
        global_deployment_kw: model.global_deployment(),
        decline_min_fraction: declines.clone().fold(f64::INFINITY, f64::min),
        decline_max_fraction: declines.fold(f64::NEG_INFINITY, f64::max),
        rows,
    })
}

/// Installed capex of each region's reference technology, current and at
/// the horizon in the base case, USD/kW.
fn reference_capex(
    electrolysis: &ElectrolysisConfig,
    hydrogen: &HydrogenConfig,
) -> Result<Vec<(Region, StackTechnology, f64, f64)>, String> {
    let model = electrolysis.base_model().map_err(|e| e.to_string())?;
    Region::ALL
        .into_iter()
        .map(|region| {
            let tech = *hydrogen
                .reference_tech
                .get(&region)
                .ok_or_else(|| format!("no reference technology for {region}"))?;
            let current = model.current_capital_cost(region, tech).total_usd_per_kw;
            let horizon = model
                .project_capital_cost(region, tech)
                .map_err(|e| e.to_string())?
                .total_usd_per_kw;
            Ok((region, tech, current, horizon))
        })
        .collect()
}

pub fn project_hydrogen(electrolysis: &ElectrolysisConfig, cfg: &HydrogenConfig) -> Result<HydrogenResults, String> {
    let mut points = Vec::new();
    for (region, tech, current, horizon) in reference_capex(electrolysis, cfg)? {
        for (case, capex, subsidy) in [
            (HydrogenCase::Current, current, 0.0),
            (HydrogenCase::Horizon, horizon, 0.0),
            (HydrogenCase::HorizonSubsidized, horizon, cfg.subsidy_usd_per_kg),
        ] {
            for &u in &cfg.utilization_grid {
                for &price in &cfg.electricity_price_grid_usd_per_kwh {
                    let plant = cfg.plant(capex, u, price, subsidy);
                    points.push(LcohPoint {
                        region,
                        tech,
                        case,
                        capex_usd_per_kw: capex,
                        utilization: u,
                        electricity_price_usd_per_kwh: price,
                        capital_usd_per_kg: plant.capital_contribution().map_err(|e| e.to_string())?,
                        lcoh_usd_per_kg: plant.lcoh().map_err(|e| e.to_string())?,
                    });
                }
            }
        }
    }
    Ok(HydrogenResults {
        subsidy_usd_per_kg: cfg.subsidy_usd_per_kg,
        points,
    })
}

pub fn project_dac(cfg: &DacConfig) -> Result<DacResults, DacError> {
    let base = cfg.base_model()?;
    let x0 = cfg.current_capacity_t_per_yr;
    let pipeline = cfg.pipeline_capacity_t_per_yr;
    let capital = cfg.capital_envelope()?;
    let charge = base.capital_charge_per_tonne();
    let opex = cfg.non_learning_opex_usd_per_t;
    let capture = capital.map(|c| c * charge + opex)?;

    let leak = cfg.leakage.leak_rate;
    // Fraction falls as leakage rises.
    let fraction = ProjectionRange::new(
        base.net_removal_fraction(&cfg.leakage_at(leak.hi)?),
        base.net_removal_fraction(&cfg.leakage_at(leak.mid)?),
        base.net_removal_fraction(&cfg.leakage_at(leak.lo)?),
    )?;

    let low = cfg.leakage_at(leak.lo)?;
    let high = cfg.leakage_at(leak.hi)?;
    let mut sweeps = Vec::new();
    for lr in [cfg.learning_rate.mid, cfg.high_learning_rate] {
        sweeps.push(DacSweep {
            learning_rate: lr,
            low_leak_rate: leak.lo,
            high_leak_rate: leak.hi,
            rows: cfg.model(lr)?.target_sweep(&low, &high, &cfg.target_grid_usd_per_t)?,
        });
    }

    Ok(DacResults {
        current_capital_usd_per_t_per_yr: cfg.capital_cost_usd_per_t_per_yr,
        current_capture_cost_usd_per_t: base.capture_cost(x0)?,
        pipeline_capacity_t_per_yr: pipeline,
        capital_usd_per_t_per_yr: capital,
        capture_cost_usd_per_t: capture,
        net_removal_fraction: fraction,
        net_removal_cost_usd_per_t: cfg.net_removal_envelope(pipeline)?,
        sweeps,
    })
}

pub fn project_ekerosene(scenario: &Scenario) -> Result<EkeroseneResults, String> {
    let ek: &EkeroseneConfig = &scenario.ekerosene;
    let h = &scenario.hydrogen;
    let dac = scenario.dac.base_model().map_err(|e| e.to_string())?;
    let co2_current = dac
        .capture_cost(scenario.dac.current_capacity_t_per_yr)
        .map_err(|e| e.to_string())?;
    let co2_horizon = dac
        .capture_cost(scenario.dac.pipeline_capacity_t_per_yr)
        .map_err(|e| e.to_string())?;
    let plain = ek.assumptions(0.0).map_err(|e| e.to_string())?;
    let subsidized = ek.assumptions(ek.us_subsidy_usd_per_gal).map_err(|e| e.to_string())?;
    let price = ek.electricity_price_usd_per_kwh;
    let lcoh = |capex: f64, subsidy: f64| {
        h.plant(capex, ek.h2_utilization, price, subsidy)
            .lcoh()
            .map_err(|e| e.to_string())
    };

    let mut rows = Vec::new();
    for (region, _, capex_now, capex_horizon) in reference_capex(&scenario.electrolysis, h)? {
        let h2_current = lcoh(capex_now, 0.0)?;
        let h2_horizon = lcoh(capex_horizon, 0.0)?;
        let current = plain.lcoek(h2_current, co2_current).map_err(|e| e.to_string())?;
        let horizon = plain.lcoek(h2_horizon, co2_horizon).map_err(|e| e.to_string())?;
        let subsidized_cost = if region == Region::Usa {
            let h2 = lcoh(capex_horizon, h.subsidy_usd_per_kg)?;
            Some(subsidized.lcoek(h2, co2_horizon).map_err(|e| e.to_string())?)
        } else {
            None
        };
        rows.push(EkeroseneRow {
            region,
            h2_current_usd_per_kg: h2_current,
            h2_horizon_usd_per_kg: h2_horizon,
            co2_current_usd_per_t: co2_current,
            co2_horizon_usd_per_t: co2_horizon,
            lcoek_current_usd_per_gal: current,
            lcoek_horizon_usd_per_gal: horizon,
            reduction_usd_per_gal: current - horizon,
            lcoek_horizon_subsidized_usd_per_gal: subsidized_cost,
        });
    }

    let f = &ek.flight;
    let lcoek = rows
        .iter()
        .find(|r| r.region == f.region)
        .map(|r| r.lcoek_horizon_usd_per_gal)
        .ok_or_else(|| format!("no e-kerosene cost for {}", f.region))?;
    // Premium is affine in burn and fossil price, so extremes sit at corners.
    let mut corners = Vec::new();
    for burn in [f.fuel_burn_l_per_pax_km.lo, f.fuel_burn_l_per_pax_km.hi] {
        for fossil in [f.fossil_price_usd_per_gal.lo, f.fossil_price_usd_per_gal.hi] {
            corners.push(ek.flight(burn, fossil).premium(lcoek).map_err(|e| e.to_string())?);
        }
    }
    let mid = ek
        .flight(f.fuel_burn_l_per_pax_km.mid, f.fossil_price_usd_per_gal.mid)
        .premium(lcoek)
        .map_err(|e| e.to_string())?;
    let lo = corners.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = corners.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    Ok(EkeroseneResults {
        rows,
        flight_region: f.region,
        flight_lcoek_usd_per_gal: lcoek,
        flight_premium_usd_per_passenger: ProjectionRange::new(lo, mid, hi).map_err(|e| e.to_string())?,
    })
}

/// Evaluate the requested sections, each on its own thread.
pub fn run_projection(scenario: &Scenario, sections: &[SectionName]) -> ProjectionResults {
    let wants = |s| sections.contains(&s);
    thread::scope(|scope| {
        let electrolysis = wants(SectionName::Electrolysis)
            .then(|| scope.spawn(|| Section::from_result(project_electrolysis(&scenario.electrolysis))));
        let hydrogen = wants(SectionName::Hydrogen).then(|| {
            scope.spawn(|| Section::from_result(project_hydrogen(&scenario.electrolysis, &scenario.hydrogen)))
        });
        let dac = wants(SectionName::Dac).then(|| scope.spawn(|| Section::from_result(project_dac(&scenario.dac))));
        let ekerosene =
            wants(SectionName::Ekerosene).then(|| scope.spawn(|| Section::from_result(project_ekerosene(scenario))));
        ProjectionResults {
            engine_version: ENGINE_VERSION.to_string(),
            scenario: scenario.name.clone(),
            electrolysis: electrolysis.map(|h| h.join().expect("section thread panicked")),
            hydrogen: hydrogen.map(|h| h.join().expect("section thread panicked")),
            dac: dac.map(|h| h.join().expect("section thread panicked")),
            ekerosene: ekerosene.map(|h| h.join().expect("section thread panicked")),
            effective_config: scenario.clone(),
        }
    })
}

pub fn run_full_projection(scenario: &Scenario) -> ProjectionResults {
    run_projection(scenario, &SectionName::ALL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario;

    #[test]
    fn zero_growth_projects_current_values() {
        let s = scenario::bundled("zero-growth").unwrap();
        let r = run_full_projection(&s);
        assert!(r.failed_sections().is_empty(), "{:?}", r.failed_sections());
        for row in &r.electrolysis.unwrap().data().unwrap().rows {
            assert_eq!(row.projected, row.current);
            assert!(row.projected_total_usd_per_kw.is_degenerate());
            assert_eq!(row.decline_fraction, 0.0);
        }
        let dac = r.dac.unwrap();
        let dac = dac.data().unwrap();
        assert!(dac.capital_usd_per_t_per_yr.is_degenerate());
        assert_eq!(dac.capital_usd_per_t_per_yr.mid, 2600.0);
        assert_eq!(dac.capture_cost_usd_per_t.mid, dac.current_capture_cost_usd_per_t);
        for row in &r.ekerosene.unwrap().data().unwrap().rows {
            assert_eq!(row.reduction_usd_per_gal, 0.0);
        }
    }

    #[test]
    fn degenerate_bounds_collapse_everywhere() {
        let mut s = Scenario::default();
        let pin = |b: &mut ProjectionRange| *b = ProjectionRange::point(b.mid);
        pin(&mut s.electrolysis.stack_learning_rate);
        for r in s.electrolysis.regions.values_mut() {
            pin(&mut r.deployment_kw);
            pin(&mut r.bop_learning_rate);
        }
        pin(&mut s.dac.learning_rate);
        pin(&mut s.dac.leakage.leak_rate);
        pin(&mut s.ekerosene.flight.fuel_burn_l_per_pax_km);
        pin(&mut s.ekerosene.flight.fossil_price_usd_per_gal);
        s.validate().unwrap();
        let r = run_full_projection(&s);
        for row in &r.electrolysis.unwrap().data().unwrap().rows {
            assert!(row.projected_total_usd_per_kw.is_degenerate());
            assert_eq!(row.projected_total_usd_per_kw.mid, row.projected.total_usd_per_kw);
        }
        let dac = r.dac.unwrap();
        let dac = dac.data().unwrap();
        for range in [
            dac.capital_usd_per_t_per_yr,
            dac.capture_cost_usd_per_t,
            dac.net_removal_fraction,
            dac.net_removal_cost_usd_per_t,
        ] {
            assert!(range.is_degenerate(), "{range}");
        }
        assert!(r.ekerosene.unwrap().data().unwrap().flight_premium_usd_per_passenger.is_degenerate());
    }

    #[test]
    fn failing_section_is_isolated() {
        let mut s = Scenario::default();
        // Leakage that cancels all removal breaks only the DAC section's
        // net-removal figures; the other sections still evaluate.
        s.dac.leakage.leak_rate = ProjectionRange::new(0.002, 0.01, 0.2).unwrap();
        let r = run_full_projection(&s);
        assert_eq!(r.failed_sections(), [SectionName::Dac]);
        assert!(r.electrolysis.unwrap().data().is_some());
        assert!(r.hydrogen.unwrap().data().is_some());
        assert!(r.ekerosene.unwrap().data().is_some());
    }

    #[test]
    fn section_subset() {
        let r = run_projection(&Scenario::default(), &[SectionName::Dac]);
        assert!(r.dac.is_some());
        assert!(r.electrolysis.is_none() && r.hydrogen.is_none() && r.ekerosene.is_none());
        let json = serde_json::to_value(&r).unwrap();
        assert!(json.get("electrolysis").is_none());
    }

    #[test]
    fn envelopes_are_ordered() {
        let r = run_full_projection(&Scenario::default());
        for row in &r.electrolysis.unwrap().data().unwrap().rows {
            let e = row.projected_total_usd_per_kw;
            assert!(e.lo <= e.mid && e.mid <= e.hi);
            assert!(e.contains(row.projected.total_usd_per_kw));
        }
    }
}

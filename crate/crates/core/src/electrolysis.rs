//! Electrolyzer project capital cost: global stack learning plus local
//! balance-of-plant and EPC learning.
//!
//! Each of the four stack technologies rides its own global curve, driven by
//! the cumulative capacity of that technology worldwide. BoP&EPC costs ride a
//! regional curve driven by all electrolysis capacity installed in the region,
//! whatever the stack type, at a region-specific learning rate.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curves::{CurveError, LearningCurve};
use crate::range::{Bounds, Corner, InvalidRange, ProjectionRange};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StackTechnology {
    WesternPem,
    ChinesePem,
    WesternAlkaline,
    ChineseAlkaline,
}

impl StackTechnology {
    pub const ALL: [StackTechnology; 4] = [
        StackTechnology::WesternPem,
        StackTechnology::ChinesePem,
        StackTechnology::WesternAlkaline,
        StackTechnology::ChineseAlkaline,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            StackTechnology::WesternPem => "western_pem",
            StackTechnology::ChinesePem => "chinese_pem",
            StackTechnology::WesternAlkaline => "western_alkaline",
            StackTechnology::ChineseAlkaline => "chinese_alkaline",
        }
    }

    pub fn is_pem(&self) -> bool {
        matches!(self, StackTechnology::WesternPem | StackTechnology::ChinesePem)
    }

    pub fn is_western(&self) -> bool {
        matches!(self, StackTechnology::WesternPem | StackTechnology::WesternAlkaline)
    }
}

impl fmt::Display for StackTechnology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StackTechnology {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        StackTechnology::ALL
            .into_iter()
            .find(|t| t.as_str() == norm)
            .ok_or_else(|| format!("unknown stack technology `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Usa,
    Eu,
    China,
    Row,
}

impl Region {
    pub const ALL: [Region; 4] = [Region::Usa, Region::Eu, Region::China, Region::Row];

    pub fn as_str(&self) -> &'static str {
        match self {
            Region::Usa => "usa",
            Region::Eu => "eu",
            Region::China => "china",
            Region::Row => "row",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Region {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.to_ascii_lowercase();
        Region::ALL
            .into_iter()
            .find(|r| r.as_str() == norm)
            .ok_or_else(|| format!("unknown region `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ElectrolysisError {
    #[error("missing {0}")]
    Missing(String),
    #[error("market shares must each lie in [0, 1] and sum to 1, got sum {0}")]
    MarketShares(f64),
    #[error("regional deployment sums to {regional} kW but global deployment is {global} kW")]
    DeploymentMismatch { regional: f64, global: f64 },
    #[error("global deployment {global} kW is below current stack capacity {current} kW")]
    NegativeGrowth { global: f64, current: f64 },
    #[error("{context}: {source}")]
    Curve {
        context: String,
        #[source]
        source: CurveError,
    },
    #[error(transparent)]
    Range(#[from] InvalidRange),
}

fn curve_err(context: impl Into<String>) -> impl FnOnce(CurveError) -> ElectrolysisError {
    let context = context.into();
    move |source| ElectrolysisError::Curve { context, source }
}

/// Installed project cost split into stack and BoP&EPC, USD/kW.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub stack_usd_per_kw: f64,
    pub bop_epc_usd_per_kw: f64,
    pub total_usd_per_kw: f64,
}

impl CostBreakdown {
    pub fn new(stack: f64, bop_epc: f64) -> Self {
        Self {
            stack_usd_per_kw: stack,
            bop_epc_usd_per_kw: bop_epc,
            total_usd_per_kw: stack + bop_epc,
        }
    }
}

/// Fully specified electrolyzer cost model at the projection horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct ElectrolyzerCostModel {
    stack_curves: BTreeMap<StackTechnology, LearningCurve>,
    bop_epc_curves: BTreeMap<(Region, StackTechnology), LearningCurve>,
    market_shares: BTreeMap<StackTechnology, f64>,
    regional_deployment: BTreeMap<Region, f64>,
    global_deployment: f64,
}

impl ElectrolyzerCostModel {
    pub fn new(
        stack_curves: BTreeMap<StackTechnology, LearningCurve>,
        bop_epc_curves: BTreeMap<(Region, StackTechnology), LearningCurve>,
        market_shares: BTreeMap<StackTechnology, f64>,
        regional_deployment: BTreeMap<Region, f64>,
        global_deployment: f64,
    ) -> Result<Self, ElectrolysisError> {
        for tech in StackTechnology::ALL {
            if !stack_curves.contains_key(&tech) {
                return Err(ElectrolysisError::Missing(format!("stack curve for {tech}")));
            }
            if !market_shares.contains_key(&tech) {
                return Err(ElectrolysisError::Missing(format!("market share for {tech}")));
            }
            for region in Region::ALL {
                if !bop_epc_curves.contains_key(&(region, tech)) {
                    return Err(ElectrolysisError::Missing(format!(
                        "BoP&EPC curve for {region}/{tech}"
                    )));
                }
            }
        }
        for region in Region::ALL {
            if !regional_deployment.contains_key(&region) {
                return Err(ElectrolysisError::Missing(format!("deployment for {region}")));
            }
        }

        let share_sum: f64 = market_shares.values().sum();
        let shares_in_unit = market_shares.values().all(|s| (0.0..=1.0).contains(s));
        if !shares_in_unit || (share_sum - 1.0).abs() > 1e-9 {
            return Err(ElectrolysisError::MarketShares(share_sum));
        }

        let regional: f64 = regional_deployment.values().sum();
        if !(global_deployment.is_finite() && global_deployment > 0.0)
            || (regional - global_deployment).abs() > 1e-6 * global_deployment
        {
            return Err(ElectrolysisError::DeploymentMismatch {
                regional,
                global: global_deployment,
            });
        }

        Ok(Self {
            stack_curves,
            bop_epc_curves,
            market_shares,
            regional_deployment,
            global_deployment,
        })
    }

    pub fn stack_curve(&self, tech: StackTechnology) -> &LearningCurve {
        &self.stack_curves[&tech]
    }

    pub fn bop_epc_curve(&self, region: Region, tech: StackTechnology) -> &LearningCurve {
        &self.bop_epc_curves[&(region, tech)]
    }

    pub fn market_share(&self, tech: StackTechnology) -> f64 {
        self.market_shares[&tech]
    }

    pub fn regional_deployment(&self, region: Region) -> f64 {
        self.regional_deployment[&region]
    }

    pub fn global_deployment(&self) -> f64 {
        self.global_deployment
    }

    fn current_stack_capacity(&self) -> f64 {
        self.stack_curves.values().map(|c| c.initial_capacity()).sum()
    }

    /// Global cumulative capacity of `tech` at the horizon: its current
    /// capacity plus its market share of all new global deployment.
    pub fn stack_capacity_at_horizon(&self, tech: StackTechnology) -> Result<f64, ElectrolysisError> {
        let current = self.current_stack_capacity();
        let growth = self.global_deployment - current;
        if growth < -1e-9 * current {
            return Err(ElectrolysisError::NegativeGrowth {
                global: self.global_deployment,
                current,
            });
        }
        let initial = self.stack_curves[&tech].initial_capacity();
        Ok(initial + self.market_shares[&tech] * growth.max(0.0))
    }

    pub fn current_capital_cost(&self, region: Region, tech: StackTechnology) -> CostBreakdown {
        CostBreakdown::new(
            self.stack_curves[&tech].initial_cost(),
            self.bop_epc_curves[&(region, tech)].initial_cost(),
        )
    }

    pub fn project_capital_cost(
        &self,
        region: Region,
        tech: StackTechnology,
    ) -> Result<CostBreakdown, ElectrolysisError> {
        let stack_capacity = self.stack_capacity_at_horizon(tech)?;
        let stack = self.stack_curves[&tech]
            .project_cost(stack_capacity)
            .map_err(curve_err(format!("stack {tech}")))?;
        let bop = self.bop_epc_curves[&(region, tech)]
            .project_cost(self.regional_deployment[&region])
            .map_err(curve_err(format!("BoP&EPC {region}")))?;
        Ok(CostBreakdown::new(stack, bop))
    }

    /// Fractional fall in total installed cost, current to horizon.
    pub fn total_decline(&self, region: Region, tech: StackTechnology) -> Result<f64, ElectrolysisError> {
        let current = self.current_capital_cost(region, tech).total_usd_per_kw;
        let projected = self.project_capital_cost(region, tech)?.total_usd_per_kw;
        Ok(1.0 - projected / current)
    }
}

/// Nested PEM/alkaline and Western/Chinese split, a convenient way to
/// build the per-stack share map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketSplit {
    /// Share of new deployment going to PEM rather than alkaline stacks.
    pub pem_share: f64,
    /// Western share within PEM.
    pub western_share_pem: f64,
    /// Western share within alkaline.
    pub western_share_alkaline: f64,
}

impl Default for MarketSplit {
    fn default() -> Self {
        Self {
            pem_share: 0.5,
            western_share_pem: 0.5,
            western_share_alkaline: 0.5,
        }
    }
}

impl MarketSplit {
    pub fn shares(&self) -> BTreeMap<StackTechnology, f64> {
        StackTechnology::ALL
            .into_iter()
            .map(|tech| {
                let class = if tech.is_pem() { self.pem_share } else { 1.0 - self.pem_share };
                let within = match (tech.is_pem(), tech.is_western()) {
                    (true, true) => self.western_share_pem,
                    (true, false) => 1.0 - self.western_share_pem,
                    (false, true) => self.western_share_alkaline,
                    (false, false) => 1.0 - self.western_share_alkaline,
                };
                (tech, class * within)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StackConfig {
    pub current_cost_usd_per_kw: f64,
    pub current_capacity_kw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub current_capacity_kw: f64,
    /// Cumulative installed capacity in the region at the horizon.
    pub deployment_kw: Bounds,
    pub bop_learning_rate: Bounds,
    pub bop_epc_cost_usd_per_kw: BTreeMap<StackTechnology, f64>,
}

/// Electrolysis inputs with sensitivity bounds, as stored in a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElectrolysisConfig {
    pub stack_learning_rate: Bounds,
    /// Share of new global deployment going to each stack; must sum to 1.
    pub market_share: BTreeMap<StackTechnology, f64>,
    pub stacks: BTreeMap<StackTechnology, StackConfig>,
    pub regions: BTreeMap<Region, RegionConfig>,
}

impl Default for ElectrolysisConfig {
    fn default() -> Self {
        use Region::*;
        use StackTechnology::*;
        let stacks = [
            (WesternPem, 1000.0, 0.15e6),
            (ChinesePem, 600.0, 0.05e6),
            (WesternAlkaline, 800.0, 0.4e6),
            (ChineseAlkaline, 250.0, 1.0e6),
        ]
        .into_iter()
        .map(|(t, cost, cap)| {
            (
                t,
                StackConfig {
                    current_cost_usd_per_kw: cost,
                    current_capacity_kw: cap,
                },
            )
        })
        .collect();
        // (region, current kW, 2030 kW, BoP&EPC learning rate, PEM and alkaline BoP&EPC USD/kW)
        let regions = [
            (Usa, 0.2e6, 35e6, 0.065, 1800.0, 1900.0),
            (Eu, 0.3e6, 40e6, 0.11, 1600.0, 1700.0),
            (China, 0.9e6, 55e6, 0.175, 700.0, 750.0),
            (Row, 0.2e6, 20e6, 0.11, 1300.0, 1400.0),
        ]
        .into_iter()
        .map(|(r, current, deploy, lr, pem, alk)| {
            let costs = StackTechnology::ALL
                .into_iter()
                .map(|t| (t, if t.is_pem() { pem } else { alk }))
                .collect();
            let cfg = RegionConfig {
                current_capacity_kw: current,
                deployment_kw: ProjectionRange::new(0.5 * deploy, deploy, 1.5 * deploy).expect("ordered"),
                bop_learning_rate: ProjectionRange::new(lr - 0.03, lr, lr + 0.03).expect("ordered"),
                bop_epc_cost_usd_per_kw: costs,
            };
            (r, cfg)
        })
        .collect();
        Self {
            stack_learning_rate: ProjectionRange::new(0.12, 0.16, 0.20).expect("ordered"),
            market_share: MarketSplit::default().shares(),
            stacks,
            regions,
        }
    }
}

impl ElectrolysisConfig {
    /// Model with learning rates taken at `learning` and deployments at
    /// `deployment` corners of the sensitivity box.
    pub fn model(&self, learning: Corner, deployment: Corner) -> Result<ElectrolyzerCostModel, ElectrolysisError> {
        let stack_lr = self.stack_learning_rate.pick(learning);
        let mut stack_curves = BTreeMap::new();
        for tech in StackTechnology::ALL {
            let s = self
                .stacks
                .get(&tech)
                .ok_or_else(|| ElectrolysisError::Missing(format!("stacks.{tech}")))?;
            let curve = LearningCurve::new(s.current_cost_usd_per_kw, s.current_capacity_kw, stack_lr)
                .map_err(curve_err(format!("stacks.{tech}")))?;
            stack_curves.insert(tech, curve);
        }

        let mut bop_epc_curves = BTreeMap::new();
        let mut regional_deployment = BTreeMap::new();
        for region in Region::ALL {
            let r = self
                .regions
                .get(&region)
                .ok_or_else(|| ElectrolysisError::Missing(format!("regions.{region}")))?;
            let lr = r.bop_learning_rate.pick(learning);
            for tech in StackTechnology::ALL {
                let cost = *r.bop_epc_cost_usd_per_kw.get(&tech).ok_or_else(|| {
                    ElectrolysisError::Missing(format!("regions.{region}.bop_epc_cost_usd_per_kw.{tech}"))
                })?;
                let curve = LearningCurve::new(cost, r.current_capacity_kw, lr)
                    .map_err(curve_err(format!("regions.{region}")))?;
                bop_epc_curves.insert((region, tech), curve);
            }
            regional_deployment.insert(region, r.deployment_kw.pick(deployment));
        }

        let global = regional_deployment.values().sum();
        ElectrolyzerCostModel::new(
            stack_curves,
            bop_epc_curves,
            self.market_share.clone(),
            regional_deployment,
            global,
        )
    }

    pub fn base_model(&self) -> Result<ElectrolyzerCostModel, ElectrolysisError> {
        self.model(Corner::Mid, Corner::Mid)
    }

    /// Envelope of projected total cost for one region and stack.
    ///
    /// Projected cost falls monotonically in every learning rate and every
    /// deployment quantity, so the extremes sit at the two all-low and
    /// all-high corners of the box.
    pub fn envelope(&self, region: Region, tech: StackTechnology) -> Result<ProjectionRange, ElectrolysisError> {
        let total = |corner| -> Result<f64, ElectrolysisError> {
            Ok(self
                .model(corner, corner)?
                .project_capital_cost(region, tech)?
                .total_usd_per_kw)
        };
        let hi = total(Corner::Lo)?;
        let mid = total(Corner::Mid)?;
        let lo = total(Corner::Hi)?;
        Ok(ProjectionRange::new(lo, mid, hi)?)
    }

    /// Sum of current capacity across regions, kW.
    pub fn current_regional_capacity(&self) -> f64 {
        self.regions.values().map(|r| r.current_capacity_kw).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn synthetic(stack_lr: f64, bop_lr: f64, regional_growth: f64) -> ElectrolysisConfig {
        // Every stack and every region starts at 1 kW; four equal shares put
        // a quarter of new global deployment on each stack.
        let stacks = StackTechnology::ALL
            .into_iter()
            .map(|t| (t, StackConfig { current_cost_usd_per_kw: 500.0, current_capacity_kw: 1.0 }))
            .collect();
        let regions = Region::ALL
            .into_iter()
            .map(|r| {
                (
                    r,
                    RegionConfig {
                        current_capacity_kw: 1.0,
                        deployment_kw: Bounds::point(regional_growth),
                        bop_learning_rate: Bounds::point(bop_lr),
                        bop_epc_cost_usd_per_kw: StackTechnology::ALL.into_iter().map(|t| (t, 1000.0)).collect(),
                    },
                )
            })
            .collect();
        ElectrolysisConfig {
            stack_learning_rate: Bounds::point(stack_lr),
            market_share: MarketSplit::default().shares(),
            stacks,
            regions,
        }
    }

    #[test]
    fn zero_growth_keeps_current_costs() {
        let cfg = synthetic(0.2, 0.1, 1.0);
        let model = cfg.base_model().unwrap();
        for region in Region::ALL {
            for tech in StackTechnology::ALL {
                assert_eq!(
                    model.project_capital_cost(region, tech).unwrap(),
                    model.current_capital_cost(region, tech)
                );
                assert_eq!(model.stack_capacity_at_horizon(tech).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn hand_computed_two_power_laws() {
        // Stack capacity x4 at 20% -> 0.64; region x2 at 10% -> 0.90.
        let mut cfg = synthetic(0.2, 0.1, 4.0);
        for r in cfg.regions.values_mut() {
            r.current_capacity_kw = 2.0;
            r.deployment_kw = Bounds::point(4.0);
        }
        // Regional 4 kW each -> global 16 kW; stack current sum 4 kW; each stack
        // gets 1 + 0.25 * 12 = 4 kW.
        let model = cfg.base_model().unwrap();
        let got = model.project_capital_cost(Region::Eu, StackTechnology::ChinesePem).unwrap();
        assert_relative_eq!(got.stack_usd_per_kw, 500.0 * 0.64, max_relative = 1e-12);
        assert_relative_eq!(got.bop_epc_usd_per_kw, 1000.0 * 0.9, max_relative = 1e-12);
        assert_eq!(got.total_usd_per_kw, got.stack_usd_per_kw + got.bop_epc_usd_per_kw);
    }

    #[test]
    fn allocation_rule() {
        let cfg = synthetic(0.2, 0.1, 3.0);
        let model = cfg.base_model().unwrap();
        // G = 12 - 4 = 8 kW of new deployment, share 0.25 each.
        for tech in StackTechnology::ALL {
            assert_relative_eq!(model.stack_capacity_at_horizon(tech).unwrap(), 1.0 + 0.25 * 8.0);
        }
    }

    #[test]
    fn negative_growth_rejected() {
        let mut cfg = synthetic(0.2, 0.1, 1.0);
        for s in cfg.stacks.values_mut() {
            s.current_capacity_kw = 2.0;
        }
        let model = cfg.base_model().unwrap();
        assert!(matches!(
            model.stack_capacity_at_horizon(StackTechnology::WesternPem),
            Err(ElectrolysisError::NegativeGrowth { .. })
        ));
    }

    #[test]
    fn invalid_shares_rejected() {
        let mut cfg = synthetic(0.2, 0.1, 1.0);
        cfg.market_share.insert(StackTechnology::WesternPem, 0.45);
        assert!(matches!(cfg.base_model(), Err(ElectrolysisError::MarketShares(_))));
    }

    #[test]
    fn deployment_mismatch_rejected() {
        let model = synthetic(0.2, 0.1, 2.0).base_model().unwrap();
        let err = ElectrolyzerCostModel::new(
            model.stack_curves.clone(),
            model.bop_epc_curves.clone(),
            model.market_shares.clone(),
            model.regional_deployment.clone(),
            9.0,
        );
        assert!(matches!(err, Err(ElectrolysisError::DeploymentMismatch { .. })));
    }

    #[test]
    fn regional_regression_propagates() {
        let mut cfg = synthetic(0.2, 0.1, 2.0);
        cfg.regions.get_mut(&Region::Usa).unwrap().deployment_kw = Bounds::point(0.5);
        cfg.regions.get_mut(&Region::Eu).unwrap().deployment_kw = Bounds::point(3.5);
        let model = cfg.base_model().unwrap();
        assert!(matches!(
            model.project_capital_cost(Region::Usa, StackTechnology::WesternPem),
            Err(ElectrolysisError::Curve { source: CurveError::CapacityRegression { .. }, .. })
        ));
        assert!(model.project_capital_cost(Region::Eu, StackTechnology::WesternPem).is_ok());
    }

    #[test]
    fn degenerate_envelope_collapses() {
        let cfg = synthetic(0.2, 0.1, 5.0);
        let point = cfg
            .base_model()
            .unwrap()
            .project_capital_cost(Region::China, StackTechnology::WesternAlkaline)
            .unwrap()
            .total_usd_per_kw;
        let env = cfg.envelope(Region::China, StackTechnology::WesternAlkaline).unwrap();
        assert_eq!((env.lo, env.mid, env.hi), (point, point, point));
    }

    #[test]
    fn wider_learning_range_widens_envelope() {
        let narrow = synthetic(0.2, 0.1, 5.0);
        let mut wide = narrow.clone();
        wide.stack_learning_rate = Bounds::new(0.15, 0.2, 0.25).unwrap();
        let a = narrow.envelope(Region::Usa, StackTechnology::ChinesePem).unwrap();
        let b = wide.envelope(Region::Usa, StackTechnology::ChinesePem).unwrap();
        assert!(b.lo <= a.lo && b.hi >= a.hi);
        assert_eq!(a.mid, b.mid);
    }

    #[test]
    fn market_split_sums_to_one() {
        let split = MarketSplit { pem_share: 0.3, western_share_pem: 0.8, western_share_alkaline: 0.1 };
        let shares = split.shares();
        assert_relative_eq!(shares.values().sum::<f64>(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(shares[&StackTechnology::WesternPem], 0.24);
        assert_relative_eq!(shares[&StackTechnology::ChineseAlkaline], 0.63);
    }

    #[test]
    fn names_parse() {
        assert_eq!("western-pem".parse::<StackTechnology>().unwrap(), StackTechnology::WesternPem);
        assert_eq!("CHINA".parse::<Region>().unwrap(), Region::China);
        assert!("mars".parse::<Region>().is_err());
    }
}

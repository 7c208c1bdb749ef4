//! Scenario documents: loading, default filling, validation and the bundled
//! calibrations.
//!
//! A scenario file is TOML. Any key may be omitted; omitted values come from
//! [`Scenario::default`], which is the calibrated base case. Tables merge key
//! by key, arrays and scalars replace. Unknown keys are rejected.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dac::DacConfig;
use crate::ekerosene::EkeroseneConfig;
use crate::electrolysis::{ElectrolysisConfig, Region, StackTechnology};
use crate::finance::FinancialAssumptions;
use crate::hydrogen::HydrogenConfig;
use crate::range::{Bounds, Corner};

pub const SCHEMA_VERSION: u32 = 1;

const BUNDLED: [(&str, &str); 2] = [
    ("base-2030", include_str!("../scenarios/base-2030.toml")),
    ("zero-growth", include_str!("../scenarios/zero-growth.toml")),
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("unknown scenario `{0}`")]
    Unknown(String),
}

impl ScenarioError {
    fn invalid(field: impl Into<String>, message: impl fmt::Display) -> Self {
        ScenarioError::Validation {
            field: field.into(),
            message: message.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    pub description: String,
    /// Currency year of every USD figure.
    pub base_year: i32,
    pub horizon_year: i32,
    pub electrolysis: ElectrolysisConfig,
    pub hydrogen: HydrogenConfig,
    pub dac: DacConfig,
    pub ekerosene: EkeroseneConfig,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            name: "default".into(),
            description: String::new(),
            base_year: 2023,
            horizon_year: 2030,
            electrolysis: ElectrolysisConfig::default(),
            hydrogen: HydrogenConfig::default(),
            dac: DacConfig::default(),
            ekerosene: EkeroseneConfig::default(),
        }
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn merge_toml(base: &mut toml::Value, over: toml::Value) {
    match (base, over) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge_toml(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn merge_json(base: &mut serde_json::Value, over: serde_json::Value) {
    match (base, over) {
        (serde_json::Value::Object(b), serde_json::Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge_json(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn path_error<E: fmt::Display>(err: serde_path_to_error::Error<E>) -> ScenarioError {
    let field = err.path().to_string();
    ScenarioError::invalid(if field == "." { "scenario".into() } else { field }, err.inner())
}

impl Scenario {
    /// Parse a TOML document, fill defaults and validate.
    pub fn from_toml_str(text: &str) -> Result<Self, ScenarioError> {
        let table: toml::Table = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
            ScenarioError::Parse {
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        let mut merged = toml::Value::try_from(Scenario::default()).expect("defaults serialize");
        merge_toml(&mut merged, toml::Value::Table(table));
        let scenario: Scenario = serde_path_to_error::deserialize(merged).map_err(path_error)?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn from_path(path: &Path) -> Result<Self, ScenarioError> {
        let text = fs::read_to_string(path).map_err(|e| ScenarioError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::from_toml_str(&text)
    }

    /// Apply a partial JSON document on top of this scenario and validate.
    pub fn with_json_overrides(&self, overrides: serde_json::Value) -> Result<Self, ScenarioError> {
        let mut merged = serde_json::to_value(self).expect("scenario serializes");
        merge_json(&mut merged, overrides);
        let scenario: Scenario = serde_path_to_error::deserialize(merged).map_err(path_error)?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ScenarioError::invalid(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        if self.name.trim().is_empty() {
            return Err(ScenarioError::invalid("name", "must not be empty"));
        }
        if self.horizon_year < self.base_year {
            return Err(ScenarioError::invalid(
                "horizon_year",
                format!("{} is before base_year {}", self.horizon_year, self.base_year),
            ));
        }
        self.validate_electrolysis()?;
        self.validate_hydrogen()?;
        self.validate_dac()?;
        self.validate_ekerosene()
    }

    fn validate_electrolysis(&self) -> Result<(), ScenarioError> {
        let e = &self.electrolysis;
        learning_bounds("electrolysis.stack_learning_rate", &e.stack_learning_rate)?;
        for tech in StackTechnology::ALL {
            let field = format!("electrolysis.market_share.{tech}");
            let share = *e.market_share.get(&tech).ok_or_else(|| ScenarioError::invalid(&field, "missing"))?;
            if !(0.0..=1.0).contains(&share) {
                return Err(ScenarioError::invalid(field, format!("{share} outside [0, 1]")));
            }
        }
        let sum: f64 = e.market_share.values().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(ScenarioError::invalid(
                "electrolysis.market_share",
                format!("shares sum to {sum}, expected 1"),
            ));
        }
        for tech in StackTechnology::ALL {
            let field = format!("electrolysis.stacks.{tech}");
            let s = e.stacks.get(&tech).ok_or_else(|| ScenarioError::invalid(&field, "missing"))?;
            positive(&format!("{field}.current_cost_usd_per_kw"), s.current_cost_usd_per_kw)?;
            positive(&format!("{field}.current_capacity_kw"), s.current_capacity_kw)?;
        }
        for region in Region::ALL {
            let field = format!("electrolysis.regions.{region}");
            let r = e.regions.get(&region).ok_or_else(|| ScenarioError::invalid(&field, "missing"))?;
            positive(&format!("{field}.current_capacity_kw"), r.current_capacity_kw)?;
            learning_bounds(&format!("{field}.bop_learning_rate"), &r.bop_learning_rate)?;
            if r.deployment_kw.lo < r.current_capacity_kw {
                return Err(ScenarioError::invalid(
                    format!("{field}.deployment_kw.lo"),
                    format!(
                        "{} kW is below current capacity {} kW",
                        r.deployment_kw.lo, r.current_capacity_kw
                    ),
                ));
            }
            for tech in StackTechnology::ALL {
                let f = format!("{field}.bop_epc_cost_usd_per_kw.{tech}");
                let cost = *r.bop_epc_cost_usd_per_kw.get(&tech).ok_or_else(|| ScenarioError::invalid(&f, "missing"))?;
                positive(&f, cost)?;
            }
        }
        for corner in [Corner::Lo, Corner::Mid, Corner::Hi] {
            let model = e
                .model(corner, corner)
                .map_err(|err| ScenarioError::invalid("electrolysis", err))?;
            for tech in StackTechnology::ALL {
                model
                    .stack_capacity_at_horizon(tech)
                    .map_err(|err| ScenarioError::invalid("electrolysis.regions", err))?;
            }
        }
        Ok(())
    }

    fn validate_hydrogen(&self) -> Result<(), ScenarioError> {
        let h = &self.hydrogen;
        positive("hydrogen.specific_energy_kwh_per_kg", h.specific_energy_kwh_per_kg)?;
        non_negative("hydrogen.subsidy_usd_per_kg", h.subsidy_usd_per_kg)?;
        financial("hydrogen.financial", &h.financial)?;
        for region in Region::ALL {
            if !h.reference_tech.contains_key(&region) {
                return Err(ScenarioError::invalid(format!("hydrogen.reference_tech.{region}"), "missing"));
            }
        }
        if h.utilization_grid.is_empty() {
            return Err(ScenarioError::invalid("hydrogen.utilization_grid", "must not be empty"));
        }
        for (i, &u) in h.utilization_grid.iter().enumerate() {
            if !(u > 0.0 && u <= 1.0) {
                return Err(ScenarioError::invalid(
                    format!("hydrogen.utilization_grid[{i}]"),
                    format!("{u} outside (0, 1]"),
                ));
            }
        }
        if h.electricity_price_grid_usd_per_kwh.is_empty() {
            return Err(ScenarioError::invalid(
                "hydrogen.electricity_price_grid_usd_per_kwh",
                "must not be empty",
            ));
        }
        for (i, &p) in h.electricity_price_grid_usd_per_kwh.iter().enumerate() {
            non_negative(&format!("hydrogen.electricity_price_grid_usd_per_kwh[{i}]"), p)?;
        }
        Ok(())
    }

    fn validate_dac(&self) -> Result<(), ScenarioError> {
        let d = &self.dac;
        positive("dac.capital_cost_usd_per_t_per_yr", d.capital_cost_usd_per_t_per_yr)?;
        positive("dac.current_capacity_t_per_yr", d.current_capacity_t_per_yr)?;
        if !(d.pipeline_capacity_t_per_yr >= d.current_capacity_t_per_yr) || !d.pipeline_capacity_t_per_yr.is_finite() {
            return Err(ScenarioError::invalid(
                "dac.pipeline_capacity_t_per_yr",
                format!(
                    "{} is below current capacity {}",
                    d.pipeline_capacity_t_per_yr, d.current_capacity_t_per_yr
                ),
            ));
        }
        learning_bounds("dac.learning_rate", &d.learning_rate)?;
        learning_rate("dac.high_learning_rate", d.high_learning_rate)?;
        if !(d.capacity_factor > 0.0 && d.capacity_factor <= 1.0) {
            return Err(ScenarioError::invalid(
                "dac.capacity_factor",
                format!("{} outside (0, 1]", d.capacity_factor),
            ));
        }
        non_negative("dac.non_learning_opex_usd_per_t", d.non_learning_opex_usd_per_t)?;
        non_negative("dac.gas_intensity_gj_per_t", d.gas_intensity_gj_per_t)?;
        non_negative("dac.methane_t_per_gj", d.methane_t_per_gj)?;
        financial("dac.financial", &d.financial)?;
        positive("dac.gwp.gwp20", d.gwp.gwp20)?;
        positive("dac.gwp.gwp100", d.gwp.gwp100)?;
        for (name, v) in [("lo", d.leakage.leak_rate.lo), ("hi", d.leakage.leak_rate.hi)] {
            if !(0.0..1.0).contains(&v) {
                return Err(ScenarioError::invalid(
                    format!("dac.leakage.leak_rate.{name}"),
                    format!("{v} outside [0, 1)"),
                ));
            }
        }
        let grid = &d.target_grid_usd_per_t;
        for (i, &t) in grid.iter().enumerate() {
            positive(&format!("dac.target_grid_usd_per_t[{i}]"), t)?;
        }
        if grid.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(ScenarioError::invalid("dac.target_grid_usd_per_t", "must be strictly decreasing"));
        }
        Ok(())
    }

    fn validate_ekerosene(&self) -> Result<(), ScenarioError> {
        let k = &self.ekerosene;
        non_negative("ekerosene.us_subsidy_usd_per_gal", k.us_subsidy_usd_per_gal)?;
        k.assumptions(k.us_subsidy_usd_per_gal)
            .map_err(|e| ScenarioError::invalid("ekerosene", e))?;
        let f = &k.flight;
        positive("ekerosene.flight.distance_km", f.distance_km)?;
        positive("ekerosene.flight.fuel_burn_l_per_pax_km.lo", f.fuel_burn_l_per_pax_km.lo)?;
        positive("ekerosene.flight.fossil_price_usd_per_gal.lo", f.fossil_price_usd_per_gal.lo)?;
        if !(0.0..=1.0).contains(&f.blend) {
            return Err(ScenarioError::invalid("ekerosene.flight.blend", format!("{} outside [0, 1]", f.blend)));
        }
        Ok(())
    }
}

fn positive(field: &str, v: f64) -> Result<(), ScenarioError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ScenarioError::invalid(field, format!("{v} must be positive")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<(), ScenarioError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(ScenarioError::invalid(field, format!("{v} must be non-negative")))
    }
}

fn learning_rate(field: &str, v: f64) -> Result<(), ScenarioError> {
    if (0.0..1.0).contains(&v) {
        Ok(())
    } else {
        Err(ScenarioError::invalid(field, format!("learning rate {v} outside [0, 1)")))
    }
}

fn learning_bounds(field: &str, b: &Bounds) -> Result<(), ScenarioError> {
    learning_rate(&format!("{field}.lo"), b.lo)?;
    learning_rate(&format!("{field}.hi"), b.hi)
}

fn financial(field: &str, f: &FinancialAssumptions) -> Result<(), ScenarioError> {
    f.validate().map_err(|e| ScenarioError::invalid(field, e))
}

/// Name and description of a loadable scenario.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioInfo {
    pub name: String,
    pub description: String,
    pub bundled: bool,
}

/// Names of the scenarios compiled into the engine.
pub fn bundled_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(name, _)| *name)
}

pub fn bundled_text(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn bundled(name: &str) -> Result<Scenario, ScenarioError> {
    let text = bundled_text(name).ok_or_else(|| ScenarioError::Unknown(name.to_string()))?;
    Scenario::from_toml_str(text)
}

/// Scenario files in `dir` (by file stem), or none when `dir` is absent.
fn custom_files(dir: Option<&Path>) -> Vec<(String, PathBuf)> {
    let Some(entries) = dir.and_then(|d| fs::read_dir(d).ok()) else {
        return Vec::new();
    };
    let mut files: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .filter_map(|p| Some((p.file_stem()?.to_str()?.to_string(), p)))
        .collect();
    files.sort();
    files
}

/// Bundled scenarios followed by loadable files in `custom_dir`. A custom
/// file named like a bundled scenario is skipped, as are files that fail to
/// load.
pub fn list_scenarios(custom_dir: Option<&Path>) -> Vec<ScenarioInfo> {
    let mut out: Vec<ScenarioInfo> = bundled_names()
        .map(|name| {
            let s = bundled(name).expect("bundled scenarios are valid");
            ScenarioInfo {
                name: name.to_string(),
                description: s.description,
                bundled: true,
            }
        })
        .collect();
    for (name, path) in custom_files(custom_dir) {
        if bundled_text(&name).is_some() {
            continue;
        }
        if let Ok(s) = Scenario::from_path(&path) {
            out.push(ScenarioInfo {
                name,
                description: s.description,
                bundled: false,
            });
        }
    }
    out
}

/// Look a scenario up by name, bundled first, then in `custom_dir`.
pub fn resolve(name: &str, custom_dir: Option<&Path>) -> Result<Scenario, ScenarioError> {
    if bundled_text(name).is_some() {
        return bundled(name);
    }
    match custom_files(custom_dir).into_iter().find(|(n, _)| n == name) {
        Some((_, path)) => Scenario::from_path(&path),
        None => Err(ScenarioError::Unknown(name.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scenarios_load() {
        for name in bundled_names() {
            let s = bundled(name).unwrap();
            assert_eq!(s.name, name);
        }
    }

    #[test]
    fn empty_document_is_the_default() {
        assert_eq!(Scenario::from_toml_str("").unwrap(), Scenario::default());
    }

    #[test]
    fn base_file_spells_out_the_defaults() {
        let base = bundled("base-2030").unwrap();
        let mut expected = Scenario::default();
        expected.name = base.name.clone();
        expected.description = base.description.clone();
        assert_eq!(base, expected);
    }

    #[test]
    fn echo_reloads_identically() {
        let s = bundled("zero-growth").unwrap();
        assert_eq!(Scenario::from_toml_str(&s.to_toml_string()).unwrap(), s);
    }

    #[test]
    fn partial_table_merges_with_defaults() {
        let s = Scenario::from_toml_str("[electrolysis.regions.usa]\ncurrent_capacity_kw = 0.25e6\n").unwrap();
        let d = Scenario::default();
        let usa = &s.electrolysis.regions[&Region::Usa];
        assert_eq!(usa.current_capacity_kw, 0.25e6);
        assert_eq!(usa.deployment_kw, d.electrolysis.regions[&Region::Usa].deployment_kw);
        assert_eq!(s.dac, d.dac);
    }

    #[test]
    fn syntax_error_has_position() {
        let err = Scenario::from_toml_str("name = \"x\"\n\n[dac\n").unwrap_err();
        match err {
            ScenarioError::Parse { line, column, .. } => {
                assert_eq!(line, 3);
                assert!(column >= 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_key_names_its_path() {
        let err = Scenario::from_toml_str("[dac]\nlearning_rat = 0.1\n").unwrap_err();
        match err {
            ScenarioError::Validation { field, message } => {
                assert_eq!(field, "dac.learning_rat");
                assert!(message.contains("learning_rat"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn share_sum_rejected() {
        let err = Scenario::from_toml_str("[electrolysis.market_share]\nwestern_pem = 0.45\n").unwrap_err();
        assert!(matches!(err, ScenarioError::Validation { ref field, .. } if field == "electrolysis.market_share"));
    }

    #[test]
    fn negative_learning_rate_names_field() {
        let s = Scenario::default();
        let err = s
            .with_json_overrides(serde_json::json!({"dac": {"learning_rate": {"lo": -0.1}}}))
            .unwrap_err();
        assert!(matches!(err, ScenarioError::Validation { ref field, .. } if field == "dac.learning_rate.lo"));
    }

    #[test]
    fn wrong_type_names_field() {
        let err = Scenario::default()
            .with_json_overrides(serde_json::json!({"hydrogen": {"subsidy_usd_per_kg": "three"}}))
            .unwrap_err();
        assert!(matches!(err, ScenarioError::Validation { ref field, .. } if field == "hydrogen.subsidy_usd_per_kg"));
    }

    #[test]
    fn schema_version_checked() {
        let err = Scenario::from_toml_str("schema_version = 2\n").unwrap_err();
        assert!(matches!(err, ScenarioError::Validation { ref field, .. } if field == "schema_version"));
    }

    #[test]
    fn regressing_deployment_rejected() {
        let err = Scenario::from_toml_str("[electrolysis.regions.eu.deployment_kw]\nlo = 1.0\nmid = 2.0\nhi = 3.0\n")
            .unwrap_err();
        assert!(matches!(err, ScenarioError::Validation { ref field, .. } if field == "electrolysis.regions.eu.deployment_kw.lo"));
    }

    #[test]
    fn resolve_prefers_bundled_then_dir() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("mine.toml"), "name = \"mine\"\n").unwrap();
        fs::write(dir.path().join("broken.toml"), "name = [\n").unwrap();
        assert_eq!(resolve("mine", Some(dir.path())).unwrap().name, "mine");
        assert!(matches!(resolve("nope", Some(dir.path())), Err(ScenarioError::Unknown(_))));
        let names: Vec<_> = list_scenarios(Some(dir.path())).into_iter().map(|i| i.name).collect();
        assert_eq!(names, ["base-2030", "zero-growth", "mine"]);
        let bundled_only: Vec<_> = list_scenarios(None).into_iter().map(|i| i.name).collect();
        assert_eq!(bundled_only, ["base-2030", "zero-growth"]);
    }
}

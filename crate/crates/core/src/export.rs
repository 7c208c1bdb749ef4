//! Writing result bundles as JSON or as a directory of CSV tables.
//!
//! Column and key order is fixed by the result types, and floats are
//! written in shortest round-trip form, so identical results give identical
//! bytes.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::dac::SweepPoint;
use crate::projection::{ProjectionResults, Section};
use crate::range::ProjectionRange;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format `{s}`, expected csv or json")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

pub fn to_json(results: &ProjectionResults) -> Result<String, ExportError> {
    let mut out = serde_json::to_string_pretty(results)?;
    out.push('\n');
    Ok(out)
}

pub fn from_json(text: &str) -> Result<ProjectionResults, ExportError> {
    Ok(serde_json::from_str(text)?)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExportError + '_ {
    move |source| ExportError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Write the bundle into `dir`, returning the files written in order.
pub fn export(results: &ProjectionResults, dir: &Path, format: Format) -> Result<Vec<PathBuf>, ExportError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let files = match format {
        Format::Json => vec![("results.json".to_string(), to_json(results)?)],
        Format::Csv => csv_tables(results)?,
    };
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body).map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}

fn num(v: f64) -> String {
    v.to_string()
}

fn range_cells(r: &ProjectionRange) -> [String; 3] {
    [num(r.lo), num(r.mid), num(r.hi)]
}

fn table(header: &[&str], rows: Vec<Vec<String>>) -> Result<String, ExportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn status<T>(section: &Option<Section<T>>) -> Option<(&'static str, String)> {
    match section {
        None => None,
        Some(Section::Ok { .. }) => Some(("ok", String::new())),
        Some(Section::Failed { error }) => Some(("failed", error.clone())),
    }
}

/// CSV tables as (file name, contents), one per evaluated section plus a
/// status table and the effective configuration.
pub fn csv_tables(results: &ProjectionResults) -> Result<Vec<(String, String)>, ExportError> {
    let mut files = Vec::new();

    let statuses = [
        ("electrolysis", status(&results.electrolysis)),
        ("hydrogen", status(&results.hydrogen)),
        ("dac", status(&results.dac)),
        ("ekerosene", status(&results.ekerosene)),
    ];
    let rows = statuses
        .into_iter()
        .filter_map(|(name, s)| s.map(|(st, err)| vec![name.to_string(), st.to_string(), err]))
        .collect();
    files.push(("status.csv".into(), table(&["section", "status", "error"], rows)?));

    if let Some(Section::Ok { data }) = &results.electrolysis {
        let rows = data
            .rows
            .iter()
            .map(|r| {
                let mut row = vec![
                    r.region.to_string(),
                    r.tech.to_string(),
                    num(r.current.stack_usd_per_kw),
                    num(r.current.bop_epc_usd_per_kw),
                    num(r.current.total_usd_per_kw),
                    num(r.projected.stack_usd_per_kw),
                    num(r.projected.bop_epc_usd_per_kw),
                    num(r.projected.total_usd_per_kw),
                ];
                row.extend(range_cells(&r.projected_total_usd_per_kw));
                row.push(num(r.decline_fraction));
                row
            })
            .collect();
        let header = [
            "region",
            "tech",
            "current_stack_usd_per_kw",
            "current_bop_epc_usd_per_kw",
            "current_total_usd_per_kw",
            "projected_stack_usd_per_kw",
            "projected_bop_epc_usd_per_kw",
            "projected_total_usd_per_kw",
            "projected_total_lo_usd_per_kw",
            "projected_total_mid_usd_per_kw",
            "projected_total_hi_usd_per_kw",
            "decline_fraction",
        ];
        files.push(("electrolysis.csv".into(), table(&header, rows)?));
    }

    if let Some(Section::Ok { data }) = &results.hydrogen {
        let rows = data
            .points
            .iter()
            .map(|p| {
                vec![
                    p.region.to_string(),
                    p.tech.to_string(),
                    p.case.as_str().to_string(),
                    num(p.capex_usd_per_kw),
                    num(p.utilization),
                    num(p.electricity_price_usd_per_kwh),
                    num(p.capital_usd_per_kg),
                    num(p.lcoh_usd_per_kg),
                ]
            })
            .collect();
        let header = [
            "region",
            "tech",
            "case",
            "capex_usd_per_kw",
            "utilization_fraction",
            "electricity_price_usd_per_kwh",
            "capital_usd_per_kg",
            "lcoh_usd_per_kg",
        ];
        files.push(("hydrogen_lcoh.csv".into(), table(&header, rows)?));
    }

    if let Some(Section::Ok { data }) = &results.dac {
        let mut summary = Vec::new();
        for (metric, r) in [
            ("capital_usd_per_t_per_yr", &data.capital_usd_per_t_per_yr),
            ("capture_cost_usd_per_t", &data.capture_cost_usd_per_t),
            ("net_removal_fraction", &data.net_removal_fraction),
            ("net_removal_cost_usd_per_t", &data.net_removal_cost_usd_per_t),
        ] {
            let mut row = vec![metric.to_string()];
            row.extend(range_cells(r));
            summary.push(row);
        }
        files.push(("dac_summary.csv".into(), table(&["metric", "lo", "mid", "hi"], summary)?));

        let mut rows = Vec::new();
        for sweep in &data.sweeps {
            for row in &sweep.rows {
                for (leakage, rate, point) in [
                    ("low", sweep.low_leak_rate, &row.low_leakage),
                    ("high", sweep.high_leak_rate, &row.high_leakage),
                ] {
                    let (status, capacity, investment) = match point {
                        SweepPoint::Reached(o) => ("reached", num(o.required_capacity_t_per_yr), num(o.learning_investment_usd)),
                        SweepPoint::AlreadyMet(o) => {
                            ("already_met", num(o.required_capacity_t_per_yr), num(o.learning_investment_usd))
                        }
                        SweepPoint::Unreachable { .. } => ("unreachable", String::new(), String::new()),
                    };
                    rows.push(vec![
                        num(sweep.learning_rate),
                        num(row.target_usd_per_t),
                        leakage.to_string(),
                        num(rate),
                        status.to_string(),
                        capacity,
                        investment,
                    ]);
                }
            }
        }
        let header = [
            "learning_rate_fraction",
            "target_usd_per_t",
            "leakage",
            "leak_rate_fraction",
            "status",
            "required_capacity_t_per_yr",
            "learning_investment_usd",
        ];
        files.push(("dac_sweep.csv".into(), table(&header, rows)?));
    }

    if let Some(Section::Ok { data }) = &results.ekerosene {
        let rows = data
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.region.to_string(),
                    num(r.h2_current_usd_per_kg),
                    num(r.h2_horizon_usd_per_kg),
                    num(r.co2_current_usd_per_t),
                    num(r.co2_horizon_usd_per_t),
                    num(r.lcoek_current_usd_per_gal),
                    num(r.lcoek_horizon_usd_per_gal),
                    num(r.reduction_usd_per_gal),
                    r.lcoek_horizon_subsidized_usd_per_gal.map(num).unwrap_or_default(),
                ]
            })
            .collect();
        let header = [
            "region",
            "h2_current_usd_per_kg",
            "h2_horizon_usd_per_kg",
            "co2_current_usd_per_t",
            "co2_horizon_usd_per_t",
            "lcoek_current_usd_per_gal",
            "lcoek_horizon_usd_per_gal",
            "reduction_usd_per_gal",
            "lcoek_horizon_subsidized_usd_per_gal",
        ];
        files.push(("ekerosene.csv".into(), table(&header, rows)?));

        let mut row = vec![data.flight_region.to_string(), num(data.flight_lcoek_usd_per_gal)];
        row.extend(range_cells(&data.flight_premium_usd_per_passenger));
        let header = [
            "region",
            "lcoek_usd_per_gal",
            "premium_lo_usd_per_passenger",
            "premium_mid_usd_per_passenger",
            "premium_hi_usd_per_passenger",
        ];
        files.push(("flight_premium.csv".into(), table(&header, vec![row])?));
    }

    files.push(("effective_config.toml".into(), results.effective_config.to_toml_string()));
    Ok(files)
}

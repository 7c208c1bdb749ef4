use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use costcurve::dac::{DacError, GwpHorizon, LeakageSpec};
use costcurve::electrolysis::{Region, StackTechnology};
use costcurve::export::{self, Format};
use costcurve::projection::{run_full_projection, ProjectionResults, Section};
use costcurve::scenario::{self, Scenario, ScenarioError};
use serde_json::json;

#[derive(Parser)]
#[command(name = "costcurve", version, about = "Experience-curve cost projections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every projection and export the result bundle.
    Project {
        #[command(flatten)]
        scenario: ScenarioArg,
        /// Directory for exported files.
        #[arg(long, default_value = "costcurve-out")]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: Format,
        /// Print the full bundle as JSON instead of the summary.
        #[arg(long)]
        json: bool,
    },
    /// Capacity and learning investment needed to reach a net removal cost.
    DacTarget {
        #[command(flatten)]
        scenario: ScenarioArg,
        /// Net removal cost target, USD/tCO2.
        #[arg(long)]
        target: f64,
        /// Upstream methane leak rate as a fraction of produced gas
        /// (default: the scenario's low bound).
        #[arg(long)]
        leakage: Option<f64>,
        /// GWP horizon in years (default: the scenario's).
        #[arg(long, value_parser = ["20", "100"])]
        gwp: Option<String>,
        /// Capital learning rate (default: the scenario's base rate).
        #[arg(long)]
        learning_rate: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Levelized cost of hydrogen for one region, or the electricity price
    /// that hits a target.
    Lcoh {
        #[command(flatten)]
        scenario: ScenarioArg,
        #[arg(long)]
        region: Region,
        /// Stack technology (default: the region's reference technology).
        #[arg(long)]
        tech: Option<StackTechnology>,
        #[arg(long, default_value_t = 1.0)]
        utilization: f64,
        /// USD/kWh.
        #[arg(long, default_value_t = 0.0)]
        electricity_price: f64,
        /// USD/kg.
        #[arg(long, default_value_t = 0.0)]
        subsidy: f64,
        #[arg(long, value_enum, default_value_t = Year::Current)]
        year: Year,
        /// Solve for the electricity price giving `--target`.
        #[arg(long, requires = "target")]
        solve_electricity: bool,
        /// Target LCOH, USD/kg.
        #[arg(long)]
        target: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// List bundled scenarios and those in the scenario directory.
    Scenarios {
        #[arg(long, env = "COSTCURVE_SCENARIO_DIR")]
        scenario_dir: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct ScenarioArg {
    /// Scenario file, or the name of a bundled or directory scenario.
    #[arg(long, default_value = "base-2030")]
    scenario: String,
    /// Directory searched for named scenarios.
    #[arg(long, env = "COSTCURVE_SCENARIO_DIR")]
    scenario_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Year {
    Current,
    #[value(name = "2030", alias = "horizon")]
    Horizon,
}

enum Failure {
    Internal(String),
    Invalid(String),
    Unreachable(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Internal(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Unreachable(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Internal(m) | Failure::Invalid(m) | Failure::Unreachable(m) => m,
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn load(arg: &ScenarioArg) -> Result<Scenario, Failure> {
    let s = &arg.scenario;
    let looks_like_path = s.ends_with(".toml") || s.contains('/') || s.contains('\\');
    if looks_like_path || Path::new(s).is_file() {
        return Ok(Scenario::from_path(Path::new(s))?);
    }
    Ok(scenario::resolve(s, arg.scenario_dir.as_deref())?)
}

fn pct(v: f64) -> String {
    format!("{:.1}%", 100.0 * v)
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("json value serializes"));
}

fn summary(r: &ProjectionResults) {
    println!("scenario {} (engine {})", r.scenario, r.engine_version);
    match &r.electrolysis {
        Some(Section::Ok { data }) => {
            println!(
                "electrolysis: total capex decline {} to {} across {} region/stack pairs",
                pct(data.decline_min_fraction),
                pct(data.decline_max_fraction),
                data.rows.len()
            );
            println!(
                "  {:<6} {:<17} {:>14} {:>14} {:>22}  {:>7}",
                "region", "tech", "current USD/kW", "2030 USD/kW", "2030 range USD/kW", "decline"
            );
            for row in &data.rows {
                let e = row.projected_total_usd_per_kw;
                println!(
                    "  {:<6} {:<17} {:>14.0} {:>14.0} {:>22}  {:>7}",
                    row.region.as_str(),
                    row.tech.as_str(),
                    row.current.total_usd_per_kw,
                    row.projected.total_usd_per_kw,
                    format!("{:.0} to {:.0}", e.lo, e.hi),
                    pct(row.decline_fraction)
                );
            }
        }
        Some(Section::Failed { error }) => println!("electrolysis: failed: {error}"),
        None => {}
    }
    match &r.hydrogen {
        Some(Section::Ok { data }) => {
            let best = data
                .points
                .iter()
                .map(|p| p.lcoh_usd_per_kg)
                .fold(f64::INFINITY, f64::min);
            println!(
                "hydrogen: {} grid points, lowest LCOH {:.2} USD/kg (subsidy {:.2} USD/kg)",
                data.points.len(),
                best,
                data.subsidy_usd_per_kg
            );
        }
        Some(Section::Failed { error }) => println!("hydrogen: failed: {error}"),
        None => {}
    }
    match &r.dac {
        Some(Section::Ok { data }) => {
            let c = data.capital_usd_per_t_per_yr;
            let n = data.net_removal_cost_usd_per_t;
            println!(
                "dac: capital {:.0} -> {:.0} to {:.0} USD/(t/yr) at {:.2} Mt/yr; capture {:.1} USD/t today; net removal {:.0} to {:.0} USD/t",
                data.current_capital_usd_per_t_per_yr,
                c.lo,
                c.hi,
                data.pipeline_capacity_t_per_yr / 1e6,
                data.current_capture_cost_usd_per_t,
                n.lo,
                n.hi
            );
        }
        Some(Section::Failed { error }) => println!("dac: failed: {error}"),
        None => {}
    }
    match &r.ekerosene {
        Some(Section::Ok { data }) => {
            for row in &data.rows {
                println!(
                    "ekerosene {:<6} {:.2} -> {:.2} USD/gal",
                    row.region.as_str(),
                    row.lcoek_current_usd_per_gal,
                    row.lcoek_horizon_usd_per_gal
                );
            }
            let p = data.flight_premium_usd_per_passenger;
            println!("flight premium: {:.1} to {:.1} USD/passenger", p.lo, p.hi);
        }
        Some(Section::Failed { error }) => println!("ekerosene: failed: {error}"),
        None => {}
    }
}

fn project(scenario: &ScenarioArg, out: &Path, format: Format, as_json: bool) -> Result<(), Failure> {
    let s = load(scenario)?;
    let results = run_full_projection(&s);
    let written = export::export(&results, out, format).map_err(|e| Failure::Internal(e.to_string()))?;
    if as_json {
        print!("{}", export::to_json(&results).map_err(|e| Failure::Internal(e.to_string()))?);
    } else {
        summary(&results);
        for path in written {
            println!("wrote {}", path.display());
        }
    }
    let failed = results.failed_sections();
    if !failed.is_empty() {
        let names: Vec<_> = failed.iter().map(|s| s.as_str()).collect();
        return Err(Failure::Internal(format!("sections failed: {}", names.join(", "))));
    }
    Ok(())
}

fn dac_target(
    scenario: &ScenarioArg,
    target: f64,
    leakage: Option<f64>,
    gwp: Option<&str>,
    learning_rate: Option<f64>,
    as_json: bool,
) -> Result<(), Failure> {
    let s = load(scenario)?;
    let cfg = &s.dac;
    let horizon = match gwp {
        Some("20") => GwpHorizon::Gwp20,
        Some(_) => GwpHorizon::Gwp100,
        None => cfg.leakage.horizon,
    };
    let leak_rate = leakage.unwrap_or(cfg.leakage.leak_rate.lo);
    let lr = learning_rate.unwrap_or(cfg.learning_rate.mid);
    let invalid = |e: DacError| Failure::Invalid(e.to_string());
    let leak = LeakageSpec::new(leak_rate, horizon, &cfg.gwp).map_err(invalid)?;
    let model = cfg.model(lr).map_err(invalid)?;
    if !(target.is_finite() && target > 0.0) {
        return Err(Failure::Invalid(format!("target {target} USD/t must be positive")));
    }

    let (status, outcome) = match model.target_analysis(&leak, target) {
        Ok(o) => ("reached", o),
        Err(DacError::TargetAboveCurrent { current, .. }) => {
            if !as_json {
                println!("target is above today's net removal cost of {current:.1} USD/t");
            }
            (
                "already_met",
                costcurve::dac::TargetOutcome {
                    required_capacity_t_per_yr: cfg.current_capacity_t_per_yr,
                    learning_investment_usd: 0.0,
                },
            )
        }
        Err(e @ (DacError::UnreachableTarget { .. } | DacError::NonPositiveRemoval(_))) => {
            let reason = e.to_string();
            if as_json {
                print_json(&json!({
                    "status": "unreachable",
                    "target_usd_per_t": target,
                    "leak_rate_fraction": leak_rate,
                    "gwp_horizon": horizon,
                    "learning_rate_fraction": lr,
                    "reason": reason,
                }));
            } else {
                println!("unreachable: {reason}");
            }
            return Err(Failure::Unreachable(reason));
        }
        Err(e) => return Err(Failure::Internal(e.to_string())),
    };

    if as_json {
        print_json(&json!({
            "status": status,
            "target_usd_per_t": target,
            "leak_rate_fraction": leak_rate,
            "gwp_horizon": horizon,
            "learning_rate_fraction": lr,
            "required_capacity_t_per_yr": outcome.required_capacity_t_per_yr,
            "learning_investment_usd": outcome.learning_investment_usd,
        }));
    } else {
        println!(
            "target {target:.1} USD/t at {} leakage ({horizon}), learning rate {}",
            pct(leak_rate),
            pct(lr)
        );
        println!("required capacity: {:.4e} t/yr", outcome.required_capacity_t_per_yr);
        println!("learning investment: {:.4e} USD", outcome.learning_investment_usd);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn lcoh(
    scenario: &ScenarioArg,
    region: Region,
    tech: Option<StackTechnology>,
    utilization: f64,
    price: f64,
    subsidy: f64,
    year: Year,
    solve: Option<f64>,
    as_json: bool,
) -> Result<(), Failure> {
    let s = load(scenario)?;
    let tech = tech.unwrap_or(s.hydrogen.reference_tech[&region]);
    let model = s.electrolysis.base_model().map_err(|e| Failure::Invalid(e.to_string()))?;
    let capex = match year {
        Year::Current => model.current_capital_cost(region, tech).total_usd_per_kw,
        Year::Horizon => model
            .project_capital_cost(region, tech)
            .map_err(|e| Failure::Invalid(e.to_string()))?
            .total_usd_per_kw,
    };
    let plant = s.hydrogen.plant(capex, utilization, price, subsidy);
    let invalid = |e: costcurve::hydrogen::HydrogenError| Failure::Invalid(e.to_string());
    let capital = plant.capital_contribution().map_err(invalid)?;
    let year_label = match year {
        Year::Current => "current",
        Year::Horizon => "2030",
    };

    if let Some(target) = solve {
        let required = plant.required_electricity_price(target).map_err(invalid)?;
        if as_json {
            print_json(&json!({
                "region": region,
                "tech": tech,
                "year": year_label,
                "capex_usd_per_kw": capex,
                "utilization_fraction": utilization,
                "subsidy_usd_per_kg": subsidy,
                "capital_usd_per_kg": capital,
                "target_lcoh_usd_per_kg": target,
                "required_electricity_price_usd_per_kwh": required,
            }));
        } else {
            println!("{region} {tech} {year_label}: capex {capex:.0} USD/kW, capital {capital:.3} USD/kg");
            println!("required electricity price: {required:.5} USD/kWh for {target:.2} USD/kg");
            if required < 0.0 {
                println!("target is out of reach at any non-negative electricity price");
            }
        }
        return Ok(());
    }

    let value = plant.lcoh().map_err(invalid)?;
    if as_json {
        print_json(&json!({
            "region": region,
            "tech": tech,
            "year": year_label,
            "capex_usd_per_kw": capex,
            "utilization_fraction": utilization,
            "electricity_price_usd_per_kwh": price,
            "subsidy_usd_per_kg": subsidy,
            "capital_usd_per_kg": capital,
            "lcoh_usd_per_kg": value,
        }));
    } else {
        println!("{region} {tech} {year_label}: capex {capex:.0} USD/kW");
        println!("capital contribution: {capital:.3} USD/kg");
        println!("lcoh: {value:.3} USD/kg");
        if value < 0.0 {
            println!("note: subsidy exceeds cost");
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Project {
            scenario,
            out,
            format,
            json,
        } => project(&scenario, &out, format, json),
        Command::DacTarget {
            scenario,
            target,
            leakage,
            gwp,
            learning_rate,
            json,
        } => dac_target(&scenario, target, leakage, gwp.as_deref(), learning_rate, json),
        Command::Lcoh {
            scenario,
            region,
            tech,
            utilization,
            electricity_price,
            subsidy,
            year,
            solve_electricity,
            target,
            json,
        } => {
            let solve = if solve_electricity { target } else { None };
            lcoh(
                &scenario,
                region,
                tech,
                utilization,
                electricity_price,
                subsidy,
                year,
                solve,
                json,
            )
        }
        Command::Scenarios { scenario_dir } => {
            for info in scenario::list_scenarios(scenario_dir.as_deref()) {
                let origin = if info.bundled { "bundled" } else { "custom" };
                println!("{:<20} {:<8} {}", info.name, origin, info.description);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

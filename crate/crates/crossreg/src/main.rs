use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use blowup::VerifyConfig;
use conv_reg::Mollifier;
use crossreg::config::{ScenarioConfig, ScenarioName};
use crossreg::lambda::{core_equilibrium_x, sewing_check, SweepConfig};
use crossreg::param::{param, Param};
use crossreg::planar::{planar_portrait, PlanarParams};
use crossreg::portrait::{render_to_string, Format};
use crossreg::scenario::{emit, run_scenario, write_output, Overrides};
use crossreg::smooth::{sample_field, smoothcheck};
use crossreg::CrossError;
use pws_core::{rational_to_f64, FieldJson, PiecewiseField};

#[derive(Parser)]
#[command(name = "crossreg", version, about = "Regularization of piecewise-smooth vector fields across normal crossings")]
struct Cli {
    /// Write reports into this directory instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Pass threshold for numeric checks.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum PortraitKind {
    Planar,
    Lambda,
}

#[derive(Subcommand)]
enum Cmd {
    /// Regularize the eight normal forms on Σ = {x = 0} and compare with the reference column.
    Table,
    /// Run a scenario from a JSON configuration.
    Scenario {
        #[arg(value_enum)]
        name: ScenarioName,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Phase portrait of the planar cross normal form or the regularized λ-family.
    Portrait {
        #[arg(value_enum)]
        kind: PortraitKind,
        #[arg(long = "C", value_parser = param, default_value = "2")]
        c: Param,
        #[arg(long = "B", value_parser = param, default_value = "1/20")]
        b: Param,
        #[arg(long = "D", value_parser = param, default_value = "1/20")]
        d: Param,
        #[arg(long, value_parser = param, default_value = "2/5", allow_hyphen_values = true)]
        lambda: Param,
        #[arg(long, value_parser = param, default_value = "1/100")]
        eps: Param,
        #[arg(long, default_value_t = 0.25)]
        eta: f64,
        /// Seeds per axis (planar).
        #[arg(long, default_value_t = 5)]
        grid: usize,
        #[arg(long, default_value_t = 20.0)]
        t_end: f64,
    },
    /// Verify smoothness of every chart of the smoothing plan.
    Smoothcheck {
        /// Piecewise field in JSON; without it a sample field with distinct quadratic branches is used.
        #[arg(long)]
        field: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Number of active axes of the sample field (the first k coordinates).
        #[arg(long, default_value_t = 2)]
        active: usize,
        /// Plateau width; 0 selects the box mollifier.
        #[arg(long, default_value_t = 0.25)]
        eta: f64,
    },
    /// Return map of the λ-family: regularized cycle for ε > 0, sewing map with the divergence check at ε = 0.
    Poincare {
        #[arg(long, value_parser = param, allow_hyphen_values = true)]
        lambda: Param,
        #[arg(long, value_parser = param, default_value = "1/100")]
        eps: Param,
        #[arg(long, default_value_t = 0.25)]
        eta: f64,
        /// Section {x = level} for ε = 0; defaults to the core equilibrium abscissa.
        #[arg(long, allow_hyphen_values = true)]
        level: Option<f64>,
        #[arg(long, default_value_t = 1.5)]
        seed: f64,
    },
}

fn run(cli: Cli) -> Result<(), CrossError> {
    let ov = Overrides { tol: cli.tol };
    let (stem, body) = match cli.cmd {
        Cmd::Table => {
            let cfg = ScenarioConfig::new(ScenarioName::Table);
            ("table".to_string(), emit(&cfg, &run_scenario(&cfg, &ov)?, cli.format)?)
        }
        Cmd::Scenario { name, config } => {
            let cfg = match &config {
                Some(p) => ScenarioConfig::load(p)?,
                None => ScenarioConfig::new(name),
            };
            if cfg.scenario != name {
                return Err(CrossError::Config(format!(
                    "configuration is for {}, not {}",
                    cfg.scenario.as_str(),
                    name.as_str()
                )));
            }
            let rep = run_scenario(&cfg, &ov)?;
            let formats = cfg.output.formats.clone().unwrap_or_else(|| vec![cli.format]);
            let dir = cli.out.clone().or_else(|| cfg.output.dir.as_ref().map(PathBuf::from));
            for f in formats {
                let body = emit(&cfg, &rep, f)?;
                match write_output(dir.as_deref(), name.as_str(), f, &body)? {
                    Some(p) => eprintln!("wrote {}", p.display()),
                    None => print!("{body}"),
                }
            }
            return Ok(());
        }
        Cmd::Portrait { kind, c, b, d, lambda, eps, eta, grid, t_end } => {
            let data = match kind {
                PortraitKind::Planar => planar_portrait(&PlanarParams::new(c.0, b.0, d.0)?, grid, t_end)?,
                PortraitKind::Lambda => {
                    let cfg = SweepConfig { eta, ..Default::default() };
                    crossreg::lambda::lambda_portrait(&lambda.0, &eps.0, &cfg)?
                }
            };
            let stem = match kind {
                PortraitKind::Planar => "portrait-planar",
                PortraitKind::Lambda => "portrait-lambda",
            };
            (stem.to_string(), render_to_string(&data, cli.format)?)
        }
        Cmd::Smoothcheck { field, n, active, eta } => {
            let f = match field {
                Some(p) => {
                    let s = std::fs::read_to_string(&p).map_err(|source| CrossError::Io { path: p.display().to_string(), source })?;
                    let j: FieldJson = serde_json::from_str(&s).map_err(|e| CrossError::Config(e.to_string()))?;
                    PiecewiseField::from_json(&j)?
                }
                None => {
                    if active > n || !(1..=3).contains(&active) {
                        return Err(CrossError::Config("the sample field needs 1 <= active <= min(n, 3)".into()));
                    }
                    sample_field(n, active)?
                }
            };
            let m = if eta == 0.0 { Mollifier::box_profile() } else { Mollifier::plateau(eta)? };
            let mut vc = VerifyConfig::default();
            if let Some(t) = cli.tol {
                vc.continuity_tol = t;
            }
            let rep = smoothcheck(f, m, &vc)?;
            let body = match cli.format {
                Format::Json => serde_json::to_string_pretty(&rep)? + "\n",
                Format::Csv => {
                    let mut s = String::from("chart,check,max_residual,estimated_order,pass\n");
                    for c in &rep.charts {
                        for k in &c.checks {
                            s.push_str(&format!(
                                "\"{}\",{},{},{},{}\n",
                                c.chart_id,
                                k.name,
                                crossreg::portrait::num(k.max_residual),
                                k.estimated_order.map(crossreg::portrait::num).unwrap_or_default(),
                                k.pass
                            ));
                        }
                    }
                    s
                }
                Format::Svg => {
                    return Err(CrossError::UnsupportedFormat { format: "svg".into(), report: "smoothcheck".into() })
                }
            };
            ("smoothcheck".to_string(), body)
        }
        Cmd::Poincare { lambda, eps, eta, level, seed } => {
            let body = if rational_to_f64(&eps.0) == 0.0 {
                let level = match level {
                    Some(l) => l,
                    None => core_equilibrium_x(&lambda.0).map(|x| rational_to_f64(&x)).unwrap_or(1.0 / 3.0),
                };
                let rep = sewing_check(&lambda.0, level, seed)?;
                match cli.format {
                    Format::Json => serde_json::to_string_pretty(&rep)? + "\n",
                    _ => return Err(CrossError::UnsupportedFormat { format: "csv/svg".into(), report: "sewing map".into() }),
                }
            } else {
                let cfg = SweepConfig { eta, ..Default::default() };
                let out = crossreg::lambda::locate_cycle(&lambda.0, &eps.0, &cfg)?;
                match cli.format {
                    Format::Json => serde_json::to_string_pretty(&out.row)? + "\n",
                    Format::Csv => {
                        let mut s = String::from("x,y\n");
                        for p in out.orbit.iter().flatten() {
                            s.push_str(&format!("{},{}\n", crossreg::portrait::num(p[0]), crossreg::portrait::num(p[1])));
                        }
                        s
                    }
                    Format::Svg => {
                        render_to_string(&crossreg::lambda::lambda_portrait(&lambda.0, &eps.0, &cfg)?, Format::Svg)?
                    }
                }
            };
            ("poincare".to_string(), body)
        }
    };
    match write_output(cli.out.as_deref(), &stem, cli.format, &body)? {
        Some(p) => eprintln!("wrote {}", p.display()),
        None => print!("{body}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

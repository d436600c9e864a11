//! Scenario dispatch and report emission.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use pws_core::{int, rat, Rational};

use crate::config::{ScenarioConfig, ScenarioName};
use crate::error::CrossError;
use crate::lambda::{lambda_portrait, run_lambda_family, BifurcationReport, SweepConfig};
use crate::planar::{planar_portrait, run_planar_cross, CrossReport, PlanarOptions, PlanarParams};
use crate::portrait::{num, render_to_string, Format};
use crate::spatial::{run_spatial_cross, SpatialReport, Unfolding};
use crate::table::{run_table, TableReport};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "scenario", content = "report", rename_all = "kebab-case")]
pub enum ScenarioReport {
    Table(TableReport),
    LambdaFamily(BifurcationReport),
    PlanarCross(CrossReport),
    SpatialCross(SpatialReport),
}

/// Overrides applied on top of a configuration, e.g. from command line flags.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
}

fn r(p: &Option<crate::Param>, default: Rational) -> Rational {
    p.as_ref().map_or(default, |v| v.0.clone())
}

fn sweep_config(cfg: &ScenarioConfig) -> SweepConfig {
    let p = &cfg.params;
    let d = SweepConfig::default();
    SweepConfig {
        eta: p.eta.as_ref().map_or(d.eta, |e| e.to_f64()),
        seed_offset: p.seed_offset.unwrap_or(d.seed_offset),
        y_max: p.y_max.unwrap_or(d.y_max),
        ..d
    }
}

fn planar_inputs(cfg: &ScenarioConfig, ov: &Overrides) -> Result<(PlanarParams, PlanarOptions), CrossError> {
    let p = &cfg.params;
    let params = PlanarParams::new(r(&p.c_cross, int(2)), r(&p.b_cross, rat(1, 20)), r(&p.d_cross, rat(1, 20)))?;
    let d = PlanarOptions::default();
    let opts = PlanarOptions {
        drift_initial: p.initial.unwrap_or(d.drift_initial),
        t_end: p.t_end.unwrap_or(d.t_end),
        rtol: cfg.tolerances.rtol.unwrap_or(d.rtol),
        drift_tol: ov.tol.or(cfg.tolerances.check).unwrap_or(d.drift_tol),
    };
    Ok((params, opts))
}

fn lambda_grid(cfg: &ScenarioConfig) -> (Vec<Rational>, Vec<Rational>) {
    let p = &cfg.params;
    let lambdas = p.lambda.as_ref().map_or_else(|| vec![rat(2, 5)], |v| v.iter().map(|x| x.0.clone()).collect());
    let epss = p.eps.as_ref().map_or_else(|| vec![rat(1, 100)], |v| v.iter().map(|x| x.0.clone()).collect());
    (lambdas, epss)
}

pub fn run_scenario(cfg: &ScenarioConfig, ov: &Overrides) -> Result<ScenarioReport, CrossError> {
    cfg.validate()?;
    let p = &cfg.params;
    Ok(match cfg.scenario {
        ScenarioName::Table => ScenarioReport::Table(run_table()?),
        ScenarioName::LambdaFamily => {
            let (l, e) = lambda_grid(cfg);
            ScenarioReport::LambdaFamily(run_lambda_family(&l, &e, &sweep_config(cfg))?)
        }
        ScenarioName::PlanarCross => {
            let (params, opts) = planar_inputs(cfg, ov)?;
            ScenarioReport::PlanarCross(run_planar_cross(&params, &opts)?)
        }
        ScenarioName::SpatialCross => ScenarioReport::SpatialCross(run_spatial_cross(&Unfolding {
            a: r(&p.a, int(0)),
            b: r(&p.b, int(0)),
            c: r(&p.c, int(0)),
        })?),
    })
}

fn planar_csv(rep: &CrossReport) -> String {
    let mut s = String::from("x,y,classification,trace,determinant,in_core\n");
    for e in &rep.equilibria {
        let class = serde_json::to_value(e.classification).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            num(e.location[0]),
            num(e.location[1]),
            class,
            num(e.trace),
            num(e.determinant),
            e.in_core
        );
    }
    s
}

fn spatial_csv(rep: &SpatialReport) -> String {
    let mut s = String::from("component,core,core_unnormalized,cusp_jet,unfolding_jet\n");
    for k in 0..3 {
        let _ = writeln!(
            s,
            "{},\"{}\",\"{}\",\"{}\",\"{}\"",
            k + 1,
            rep.core_field[k],
            rep.core_field_unnormalized[k],
            rep.cusp_jet.jet[k],
            rep.unfolding_jet.jet[k]
        );
    }
    s
}

/// Renders a scenario report. SVG draws the scenario's phase portrait.
pub fn emit(cfg: &ScenarioConfig, rep: &ScenarioReport, format: Format) -> Result<String, CrossError> {
    let unsupported = || CrossError::UnsupportedFormat { format: "svg".into(), report: cfg.scenario.as_str().into() };
    Ok(match (format, rep) {
        (Format::Json, _) => serde_json::to_string_pretty(rep)? + "\n",
        (Format::Csv, ScenarioReport::Table(t)) => t.to_csv(),
        (Format::Csv, ScenarioReport::LambdaFamily(b)) => b.cycles_csv(),
        (Format::Csv, ScenarioReport::PlanarCross(c)) => planar_csv(c),
        (Format::Csv, ScenarioReport::SpatialCross(s)) => spatial_csv(s),
        (Format::Svg, ScenarioReport::PlanarCross(_)) => {
            let (params, _) = planar_inputs(cfg, &Overrides::default())?;
            let grid = cfg.params.grid.unwrap_or(5);
            render_to_string(&planar_portrait(&params, grid, cfg.params.t_end.unwrap_or(20.0))?, Format::Svg)?
        }
        (Format::Svg, ScenarioReport::LambdaFamily(_)) => {
            let (l, e) = lambda_grid(cfg);
            let eps = e.iter().min().cloned().unwrap_or(rat(1, 100));
            render_to_string(&lambda_portrait(&l[0], &eps, &sweep_config(cfg))?, Format::Svg)?
        }
        (Format::Svg, _) => return Err(unsupported()),
    })
}

/// Writes `body` to DIR/stem.ext, or returns it for standard output when no directory is given.
pub fn write_output(dir: Option<&Path>, stem: &str, format: Format, body: &str) -> Result<Option<PathBuf>, CrossError> {
    let Some(dir) = dir else {
        return Ok(None);
    };
    std::fs::create_dir_all(dir).map_err(|source| CrossError::Io { path: dir.display().to_string(), source })?;
    let path = dir.join(format!("{stem}.{}", format.extension()));
    std::fs::write(&path, body).map_err(|source| CrossError::Io { path: path.display().to_string(), source })?;
    Ok(Some(path))
}

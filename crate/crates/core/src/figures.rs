//! Data behind the published figure panels, one CSV per panel.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::dynamics::{default_initial_state, simulate, IntegratorConfig};
use crate::error::StrategyError;
use crate::format::fmt_f64;
use crate::model::{ModelParameters, ParamName};
use crate::strategy::{
    intervention_sweep, r0_slice, region_geometry, significance_ranking, unit_grid, SliceAxis,
};

/// Grid intervals for the R0 curves.
pub const CURVE_POINTS: usize = 200;
/// Horizon (days) of the trajectory panels.
pub const TRAJECTORY_HORIZON: f64 = 730.0;

#[derive(Debug, thiserror::Error)]
pub enum FigureError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

impl From<crate::error::DynamicsError> for FigureError {
    fn from(e: crate::error::DynamicsError) -> Self {
        FigureError::Strategy(e.into())
    }
}

/// One panel: a file name and its CSV text.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub name: String,
    pub csv: String,
}

fn table(header: &[String], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn curve_panel(
    name: String,
    base: &ModelParameters,
    vary: SliceAxis,
    fixed: ParamName,
    fixed_values: &[f64],
) -> Result<Panel, FigureError> {
    let grid = unit_grid(CURVE_POINTS);
    let mut header = vec![vary.param().as_str().to_string()];
    let mut columns = Vec::new();
    for &v in fixed_values {
        header.push(format!("r0_{}_{}", fixed.as_str(), v));
        let p = base.with(fixed, v).map_err(StrategyError::from)?;
        columns.push(r0_slice(&p, vary, &grid)?);
    }
    let rows = grid
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            std::iter::once(x)
                .chain(columns.iter().map(|c| c[k].1))
                .collect()
        })
        .collect::<Vec<Vec<f64>>>();
    Ok(Panel {
        name,
        csv: table(&header, &rows),
    })
}

fn region_panel(name: String, base: &ModelParameters, delta: f64) -> Result<Panel, FigureError> {
    let g = region_geometry(base, delta)?;
    let mut csv = String::from("kind,u1,u2\n");
    for (u1, u2) in [(g.l1, 0.0), (0.0, g.l2), (g.l3, 1.0)] {
        let _ = writeln!(csv, "line,{},{}", fmt_f64(u1), fmt_f64(u2));
    }
    for v in &g.feasible_polygon {
        let _ = writeln!(csv, "feasible,{},{}", fmt_f64(v[0]), fmt_f64(v[1]));
    }
    Ok(Panel { name, csv })
}

/// Builds every panel in memory.
pub fn figure_panels() -> Result<Vec<Panel>, FigureError> {
    let mut panels = Vec::new();
    // (figure, delta, u2 values for the u1 curves, u1 values for the u2 curves)
    let threshold_figures: [(u8, f64, [f64; 2], [f64; 2]); 3] = [
        (2, 0.653, [0.861, 0.999995], [0.4, 0.000005]),
        (3, 0.9, [0.861, 0.999995], [0.4, 0.9]),
        (4, 0.93, [0.861, 0.0], [0.4, 0.064]),
    ];
    for (fig, delta, u2s, u1s) in threshold_figures {
        let base = ModelParameters::table1(delta, 0.0).map_err(StrategyError::from)?;
        panels.push(region_panel(format!("fig{fig}_1_region.csv"), &base, delta)?);
        panels.push(curve_panel(
            format!("fig{fig}_2_r0_vs_u1.csv"),
            &base,
            SliceAxis::U1,
            ParamName::U2,
            &u2s,
        )?);
        panels.push(curve_panel(
            format!("fig{fig}_3_r0_vs_u2.csv"),
            &base,
            SliceAxis::U2,
            ParamName::U1,
            &u1s,
        )?);
    }

    let base = ModelParameters::table1(0.653, 0.0).map_err(StrategyError::from)?;
    panels.push(curve_panel(
        "fig5_r0_vs_u2_no_vaccination.csv".into(),
        &base,
        SliceAxis::U2,
        ParamName::U1,
        &[0.0],
    )?);

    for (name, p) in [
        ("fig6_1_sensitivity_disease_free.csv", ModelParameters::disease_free_case()),
        ("fig6_2_sensitivity_endemic.csv", ModelParameters::endemic_case()),
    ] {
        panels.push(Panel {
            name: name.into(),
            csv: significance_ranking(&p)?.to_csv_string(),
        });
    }

    let config = IntegratorConfig::adaptive(TRAJECTORY_HORIZON, 1.0);
    let x0 = default_initial_state();
    let deltas = [0.653, 0.9, 0.93];
    let mut series = Vec::new();
    for d in deltas {
        let p = ModelParameters::table1(d, 0.278).map_err(StrategyError::from)?;
        series.push(simulate(&p, &x0, &config)?);
    }
    let mut header = vec!["t".to_string()];
    header.extend(deltas.iter().map(|d| format!("non_healthy_delta_{d}")));
    let rows: Vec<Vec<f64>> = (0..series[0].len())
        .map(|k| {
            std::iter::once(series[0].times()[k])
                .chain(series.iter().map(|s| s.non_healthy()[k]))
                .collect()
        })
        .collect();
    panels.push(Panel {
        name: "fig7_non_healthy_by_delta.csv".into(),
        csv: table(&header, &rows),
    });

    let p = ModelParameters::endemic_case();
    let boosts = [0.3, 0.6];
    let sweep = intervention_sweep(&p, &x0, &config, &ParamName::INTERVENTIONS, &boosts)?;
    for (i, target) in ParamName::INTERVENTIONS.iter().enumerate() {
        let runs: Vec<_> = sweep.runs.iter().filter(|r| r.target == *target).collect();
        let mut header = vec!["t".to_string(), "baseline".to_string()];
        header.extend(runs.iter().map(|r| format!("boost_{}", r.boost)));
        let rows: Vec<Vec<f64>> = (0..sweep.times.len())
            .map(|k| {
                [sweep.times[k], sweep.baseline_non_healthy[k]]
                    .into_iter()
                    .chain(runs.iter().map(|r| r.non_healthy[k]))
                    .collect()
            })
            .collect();
        panels.push(Panel {
            name: format!("fig8_{}_non_healthy_{}.csv", i + 1, target.as_str()),
            csv: table(&header, &rows),
        });
    }
    Ok(panels)
}

/// Writes every panel into `dir`, creating it if needed.
pub fn write_figures(dir: &Path) -> Result<Vec<PathBuf>, FigureError> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for panel in figure_panels()? {
        let path = dir.join(&panel.name);
        fs::write(&path, panel.csv)?;
        paths.push(path);
    }
    Ok(paths)
}

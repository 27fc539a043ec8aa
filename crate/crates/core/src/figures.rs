//! Datasets behind the efficiency-vs-detuning and travel-time figures.

use rayon::prelude::*;

use crate::beam::BeamParams;
use crate::config::{bundled, RunConfig};
use crate::error::Result;
use crate::sweep::{Param, Scenario};
use crate::transport::two_level_efficiency;
use crate::units::angular;

/// Column-oriented table; `None` marks a configuration the model rejects.
#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub file_name: &'static str,
    /// extra `# key = value` header lines
    pub notes: Vec<(String, String)>,
    pub entries: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Figure {
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

pub const FIG3_POWERS_MW: [f64; 2] = [10.0, 46.0];
pub const FIG3_WAIST: f64 = 650e-6;
pub const FIG5_POWERS_MW: [f64; 3] = [10.0, 15.0, 21.0];

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn bundled_config(name: &str) -> Result<RunConfig> {
    RunConfig::parse(bundled(name).expect("bundled config exists"))
}

/// Two-level score of Cs against detuning at 10 and 46 mW, constant 650 µm waist.
pub fn fig3_cs(points: usize) -> Result<Figure> {
    let cfg = bundled_config("cs_paper")?;
    let sc = &cfg.scenario;
    let detunings = linspace(-8.0, -0.2, points);
    let rows = detunings
        .par_iter()
        .map(|&d| {
            let mut row = vec![Some(d)];
            for p in FIG3_POWERS_MW {
                let beam = BeamParams::new(p * 1e-3, angular(d * 1e9), FIG3_WAIST, 0.0, None, sc.species.wavelength)
                    .and_then(|b| b.with_factors(sc.beam.polarization_factor, sc.beam.transverse_average_factor));
                row.push(beam.ok().map(|b| two_level_efficiency(&b, &sc.species, &sc.geometry, sc.options.f_exponent).score));
            }
            row
        })
        .collect();
    Ok(Figure {
        file_name: "fig3_cs.csv",
        notes: vec![
            ("figure".into(), "two-level score vs detuning, Cs".into()),
            ("waist_um".into(), format!("{}", FIG3_WAIST * 1e6)),
        ],
        entries: cfg.effective_entries(),
        columns: vec!["detuning_GHz".into(), "score_10mW".into(), "score_46mW".into()],
        rows,
    })
}

/// Refined score of Rb against detuning at 10, 15 and 21 mW.
pub fn fig5_rb(points: usize) -> Result<Figure> {
    let cfg = bundled_config("rb_paper")?;
    let detunings = linspace(-3.0, -0.2, points);
    let rows = detunings.par_iter().map(|&d| refined_row(&cfg.scenario, d)).collect();
    Ok(Figure {
        file_name: "fig5_rb.csv",
        notes: vec![("figure".into(), "refined score vs detuning, Rb".into())],
        entries: cfg.effective_entries(),
        columns: vec!["detuning_GHz".into(), "score_10mW".into(), "score_15mW".into(), "score_21mW".into()],
        rows,
    })
}

fn refined_row(base: &Scenario, detuning_ghz: f64) -> Vec<Option<f64>> {
    let mut row = vec![Some(detuning_ghz)];
    for p in FIG5_POWERS_MW {
        let score = base
            .with(Param::Power, p * 1e-3)
            .and_then(|s| s.with(Param::Detuning, angular(detuning_ghz * 1e9)))
            .and_then(|s| s.evaluate());
        row.push(score.ok().map(|r| r.refined_score));
    }
    row
}

/// Rb travel time and arrival velocity against power.
pub fn fig8_rb(points: usize) -> Result<Figure> {
    let cfg = bundled_config("rb_paper")?;
    let powers = linspace(5.0, 21.0, points);
    let rows = powers
        .par_iter()
        .map(|&p| {
            let r = cfg.scenario.with(Param::Power, p * 1e-3).and_then(|s| s.evaluate());
            match r {
                Ok(r) => vec![Some(p), Some(r.travel_time * 1e3), Some(r.v_arrival)],
                Err(_) => vec![Some(p), None, None],
            }
        })
        .collect();
    Ok(Figure {
        file_name: "fig8_rb.csv",
        notes: vec![("figure".into(), "travel time vs power, Rb".into())],
        entries: cfg.effective_entries(),
        columns: vec!["power_mW".into(), "travel_time_ms".into(), "v_arrival_mps".into()],
        rows,
    })
}

/// Grid sizes used by the `figures` command.
pub const DEFAULT_POINTS: [usize; 3] = [400, 200, 33];

pub fn all_figures() -> Result<Vec<Figure>> {
    Ok(vec![fig3_cs(DEFAULT_POINTS[0])?, fig5_rb(DEFAULT_POINTS[1])?, fig8_rb(DEFAULT_POINTS[2])?])
}

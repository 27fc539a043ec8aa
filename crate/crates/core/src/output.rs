//! CSV and JSON serialization of results.
//!
//! Every artifact starts with the tool version and the effective
//! configuration. Floats in CSV use `{:.16e}` (17 significant digits).

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::monte_carlo::{McRecord, McStats};
use crate::mot_rates::{OutgoingFlux, TransferEfficiency};
use crate::sweep::{OptimizeResult, SweepTable};
use crate::transport::{EfficiencyReport, TransportProfile};
use crate::units::kelvin;

pub const TOOL: &str = "pushguide";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Effective configuration as ordered `(key, value)` pairs.
pub type Entries = [(String, String)];

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// `# pushguide <version>` followed by one `# key = value` line per entry.
pub fn header(entries: &Entries) -> String {
    let mut s = format!("# {TOOL} {VERSION}\n");
    for (k, v) in entries {
        let _ = writeln!(s, "# {k} = {v}");
    }
    s
}

fn config_object(entries: &Entries) -> Value {
    let map: Map<String, Value> = entries.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
    Value::Object(map)
}

/// Wraps a payload as `{tool, version, config, <name>: payload}`.
pub fn envelope<T: Serialize>(entries: &Entries, name: &str, payload: &T) -> String {
    let mut map = Map::new();
    map.insert("tool".into(), Value::String(TOOL.into()));
    map.insert("version".into(), Value::String(VERSION.into()));
    map.insert("config".into(), config_object(entries));
    map.insert(name.into(), serde_json::to_value(payload).expect("serializable payload"));
    let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("valid json");
    s.push('\n');
    s
}

/// Report in display units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportView {
    pub v0: f64,
    pub v_arrival: f64,
    pub v_capture: f64,
    pub travel_time_ms: f64,
    pub z_out_cm: Option<f64>,
    pub delta_r_out_um: Option<f64>,
    pub delta_r_arrival_mm: f64,
    pub t_h_out_uk: Option<f64>,
    pub fall_time_ms: Option<f64>,
    pub eta_percent: f64,
    pub two_level_score: f64,
    pub refined_score: f64,
    pub adiabaticity_max: f64,
    pub validity_flags: Vec<&'static str>,
}

impl From<&EfficiencyReport> for ReportView {
    fn from(r: &EfficiencyReport) -> Self {
        ReportView {
            v0: r.v0,
            v_arrival: r.v_arrival,
            v_capture: r.v_capture,
            travel_time_ms: r.travel_time * 1e3,
            z_out_cm: r.z_out.map(|z| z * 1e2),
            delta_r_out_um: r.delta_r_out.map(|x| x * 1e6),
            delta_r_arrival_mm: r.delta_r_arrival * 1e3,
            t_h_out_uk: r.t_h_out.map(|t| t * 1e6),
            fall_time_ms: r.fall_time.map(|t| t * 1e3),
            eta_percent: r.eta * 1e2,
            two_level_score: r.two_level_score,
            refined_score: r.refined_score,
            adiabaticity_max: r.adiabaticity_max,
            validity_flags: r.validity_flags.iter().map(|f| f.as_str()).collect(),
        }
    }
}

pub fn report_json(entries: &Entries, report: &EfficiencyReport) -> String {
    envelope(entries, "report", &ReportView::from(report))
}

/// Human-readable report.
pub fn report_text(report: &EfficiencyReport) -> String {
    let r = ReportView::from(report);
    let o = |x: Option<f64>, p: usize| x.map(|v| format!("{v:.p$}")).unwrap_or_else(|| "-".into());
    let mut s = String::new();
    let _ = writeln!(s, "entrance velocity v0     {:.3} m/s", r.v0);
    let _ = writeln!(s, "arrival velocity         {:.3} m/s (capture {:.2} m/s)", r.v_arrival, r.v_capture);
    let _ = writeln!(s, "travel time              {:.2} ms", r.travel_time_ms);
    let _ = writeln!(s, "guide exit z_out         {} cm", o(r.z_out_cm, 2));
    let _ = writeln!(s, "T_h at exit              {} uK", o(r.t_h_out_uk, 2));
    let _ = writeln!(s, "cloud radius at exit     {} um", o(r.delta_r_out_um, 1));
    let _ = writeln!(s, "cloud radius at MOT2     {:.3} mm", r.delta_r_arrival_mm);
    let _ = writeln!(s, "fall time after exit     {} ms", o(r.fall_time_ms, 2));
    let _ = writeln!(s, "upper-state fraction     {:.3} %", r.eta_percent);
    let _ = writeln!(s, "two-level score          {:.6e}", r.two_level_score);
    let _ = writeln!(s, "refined score            {:.6}", r.refined_score);
    if !r.validity_flags.is_empty() {
        let _ = writeln!(s, "flags                    {}", r.validity_flags.join(", "));
    }
    s
}

pub fn profile_csv(entries: &Entries, profile: &TransportProfile) -> String {
    let mut s = header(entries);
    s.push_str("z_m,v_mps,Th_uK,depth_uK,delta_r_mm,guided\n");
    for p in &profile.samples {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            num(p.z),
            num(p.v),
            num(p.t_h * 1e6),
            num(kelvin(p.depth) * 1e6),
            num(p.delta_r * 1e3),
            u8::from(p.guided)
        );
    }
    s
}

const MC_COLUMNS: &str = "z_m,n,mean_v_mps,stderr_v,Th_kinetic_uK,Th_uK,rms_radius_mm,fraction_bound,Th_bound_uK,\
rms_radius_bound_mm,n_captured,mean_time_ms";

fn mc_row(s: &mut String, r: &McRecord) {
    let _ = writeln!(
        s,
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        num(r.z),
        r.n,
        num(r.mean_vz),
        num(r.stderr_vz),
        num(r.t_h_kinetic * 1e6),
        num(r.t_h_energy * 1e6),
        num(r.rms_radius * 1e3),
        num(r.fraction_bound),
        num(r.t_h_bound * 1e6),
        num(r.rms_radius_bound * 1e3),
        r.n_captured,
        num(r.mean_time * 1e3)
    );
}

/// Per-height ensemble statistics; the last row is z = D.
pub fn mc_csv(entries: &Entries, stats: &McStats) -> String {
    let mut s = header(entries);
    let _ = writeln!(s, "# time_step_s = {}", num(stats.time_step));
    let _ = writeln!(s, "# capture_fraction = {}", num(stats.capture_fraction));
    s.push_str(MC_COLUMNS);
    s.push('\n');
    for r in &stats.records {
        mc_row(&mut s, r);
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSummary {
    pub n_atoms: usize,
    pub time_step_us: f64,
    pub arrived: usize,
    pub mean_v_arrival: f64,
    pub stderr_v_arrival: f64,
    pub rms_radius_arrival_mm: f64,
    pub mean_time_ms: f64,
    pub capture_fraction: f64,
}

impl From<&McStats> for McSummary {
    fn from(s: &McStats) -> Self {
        McSummary {
            n_atoms: s.n_atoms,
            time_step_us: s.time_step * 1e6,
            arrived: s.arrival.n,
            mean_v_arrival: s.arrival.mean_vz,
            stderr_v_arrival: s.arrival.stderr_vz,
            rms_radius_arrival_mm: s.arrival.rms_radius * 1e3,
            mean_time_ms: s.arrival.mean_time * 1e3,
            capture_fraction: s.capture_fraction,
        }
    }
}

pub fn sweep_csv(entries: &Entries, table: &SweepTable) -> String {
    let mut s = header(entries);
    let _ = writeln!(s, "# objective = {}", table.objective.name());
    for k in &table.keys {
        let _ = write!(s, "{k},");
    }
    s.push_str(
        "objective,v0_mps,v_arrival_mps,travel_time_ms,z_out_cm,delta_r_arrival_mm,eta_percent,two_level_score,\
refined_score,flags,error\n",
    );
    for row in &table.rows {
        for c in &row.coords {
            let _ = write!(s, "{},", num(*c));
        }
        let _ = write!(s, "{},", opt(row.objective));
        match &row.report {
            Some(r) => {
                let v = ReportView::from(r);
                let _ = write!(
                    s,
                    "{},{},{},{},{},{},{},{},{},",
                    num(v.v0),
                    num(v.v_arrival),
                    num(v.travel_time_ms),
                    opt(v.z_out_cm),
                    num(v.delta_r_arrival_mm),
                    num(v.eta_percent),
                    num(v.two_level_score),
                    num(v.refined_score),
                    v.validity_flags.join(";")
                );
            }
            None => s.push_str(",,,,,,,,,"),
        }
        let _ = writeln!(s, "{}", row.error.as_deref().unwrap_or("").replace([',', '\n'], ";"));
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct OptimizeView<'a> {
    objective: &'static str,
    keys: &'a [String],
    best: &'a [f64],
    best_objective: f64,
    iterations: usize,
    converged: bool,
    report: ReportView,
    trace: &'a [crate::sweep::TracePoint],
}

pub fn optimize_json(entries: &Entries, result: &OptimizeResult) -> String {
    let view = OptimizeView {
        objective: result.objective.name(),
        keys: &result.keys,
        best: &result.best,
        best_objective: result.best_objective,
        iterations: result.iterations,
        converged: result.converged,
        report: ReportView::from(&result.report),
        trace: &result.trace,
    };
    envelope(entries, "optimize", &view)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatesView {
    pub n1_steady: Option<f64>,
    pub outgoing: Option<OutgoingFlux>,
    pub transfer: Option<TransferEfficiency>,
}

pub fn figure_csv(fig: &crate::figures::Figure) -> String {
    let mut s = header(&fig.entries);
    for (k, v) in &fig.notes {
        let _ = writeln!(s, "# {k} = {v}");
    }
    s.push_str(&fig.columns.join(","));
    s.push('\n');
    for row in &fig.rows {
        let cells: Vec<String> = row.iter().map(|c| opt(*c)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

//! Parameter grids and bounded derivative-free optimization over the
//! transport model.

use rayon::prelude::*;
use serde::Serialize;

use crate::beam::BeamParams;
use crate::error::{Error, Result};
use crate::species::{Geometry, SpeciesParams};
use crate::transport::{refined_efficiency, EfficiencyReport, ModelOptions};
use crate::units::Unit;

/// One fully specified transfer configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub species: SpeciesParams,
    pub beam: BeamParams,
    pub geometry: Geometry,
    pub options: ModelOptions,
}

impl Scenario {
    pub fn evaluate(&self) -> Result<EfficiencyReport> {
        refined_efficiency(&self.beam, &self.species, &self.geometry, &self.options)
    }

    /// Copy with one parameter replaced (SI value), revalidated.
    pub fn with(&self, param: Param, value: f64) -> Result<Scenario> {
        let mut next = self.clone();
        let b = &self.beam;
        let mut beam_args = (b.power, b.detuning, b.waist_min, b.focus_position, b.rayleigh_length);
        match param {
            Param::Power => beam_args.0 = value,
            Param::Detuning => beam_args.1 = value,
            Param::WaistMin => {
                // a supplied Rayleigh length keeps its ratio to π w₀²/λ
                if b.waist_min > 0.0 {
                    beam_args.4 *= (value / b.waist_min).powi(2);
                }
                beam_args.2 = value;
            }
            Param::FocusPosition => beam_args.3 = value,
            Param::RayleighLength => beam_args.4 = value,
            Param::InitialTemperature => {
                next.options.initial_temperature = value;
                next.options.validate()?;
                return Ok(next);
            }
            Param::TrapSeparation | Param::Mot2Radius => {
                let g = &self.geometry;
                let (d, r) = if param == Param::TrapSeparation { (value, g.mot2_radius) } else { (g.trap_separation, value) };
                next.geometry = Geometry::with_gravity(d, r, g.mot1_radius, g.gravity)?;
                return Ok(next);
            }
        }
        let supplied = b.rayleigh_supplied || param == Param::RayleighLength;
        next.beam = BeamParams::new(
            beam_args.0,
            beam_args.1,
            beam_args.2,
            beam_args.3,
            supplied.then_some(beam_args.4),
            self.species.wavelength,
        )?
        .with_factors(b.polarization_factor, b.transverse_average_factor)?;
        Ok(next)
    }
}

/// Parameters that sweeps and the optimizer may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    Power,
    Detuning,
    WaistMin,
    FocusPosition,
    RayleighLength,
    InitialTemperature,
    TrapSeparation,
    Mot2Radius,
}

impl Param {
    /// Parameters the optimizer accepts.
    pub fn optimizable(&self) -> bool {
        matches!(self, Param::Power | Param::Detuning | Param::WaistMin | Param::FocusPosition)
    }
}

/// A parameter addressed by its config key, with the unit its values are in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamKey {
    pub key: String,
    pub param: Param,
    #[serde(skip)]
    pub unit: Unit,
}

impl ParamKey {
    pub fn to_si(&self, v: f64) -> f64 {
        self.unit.to_si(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    TwoLevelScore,
    #[default]
    RefinedScore,
    VArrival,
    TravelTime,
    DeltaRArrival,
}

impl Objective {
    pub fn name(&self) -> &'static str {
        match self {
            Objective::TwoLevelScore => "two_level_score",
            Objective::RefinedScore => "refined_score",
            Objective::VArrival => "v_arrival",
            Objective::TravelTime => "travel_time",
            Objective::DeltaRArrival => "delta_r_arrival",
        }
    }

    /// Scores are maximized; speeds, times and sizes are minimized.
    pub fn maximize(&self) -> bool {
        matches!(self, Objective::TwoLevelScore | Objective::RefinedScore)
    }

    pub fn extract(&self, r: &EfficiencyReport) -> f64 {
        match self {
            Objective::TwoLevelScore => r.two_level_score,
            Objective::RefinedScore => r.refined_score,
            Objective::VArrival => r.v_arrival,
            Objective::TravelTime => r.travel_time,
            Objective::DeltaRArrival => r.delta_r_arrival,
        }
    }

    /// Value to minimize.
    fn cost(&self, r: &EfficiencyReport) -> f64 {
        let v = self.extract(r);
        if self.maximize() {
            -v
        } else {
            v
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "two_level_score" => Objective::TwoLevelScore,
            "refined_score" => Objective::RefinedScore,
            "v_arrival" => Objective::VArrival,
            "travel_time" => Objective::TravelTime,
            "delta_r_arrival" => Objective::DeltaRArrival,
            other => return Err(Error::invalid(format!("unknown objective '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepAxis {
    pub param: ParamKey,
    /// values in the key's unit
    pub values: Vec<f64>,
}

impl SweepAxis {
    /// `steps` evenly spaced values from `lo` to `hi` inclusive.
    pub fn range(param: ParamKey, lo: f64, hi: f64, steps: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid(format!("sweep range for {} needs finite lo < hi", param.key)));
        }
        if steps < 2 {
            return Err(Error::invalid(format!("sweep range for {} needs at least 2 steps", param.key)));
        }
        let values = (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect();
        Ok(SweepAxis { param, values })
    }

    pub fn values(param: ParamKey, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("sweep values for {} must be finite and non-empty", param.key)));
        }
        Ok(SweepAxis { param, values })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub axes: Vec<SweepAxis>,
    pub objective: Objective,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 3 {
            return Err(Error::invalid("a sweep needs 1 to 3 axes"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    /// axis values in their key units
    pub coords: Vec<f64>,
    pub objective: Option<f64>,
    pub report: Option<EfficiencyReport>,
    pub error: Option<String>,
    /// |δ| of the evaluated beam, for tie-breaking
    #[serde(skip)]
    abs_detuning: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub keys: Vec<String>,
    pub objective: Objective,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Best row by the objective's sense; ties go to the smaller |δ|.
    pub fn best(&self) -> Option<&SweepRow> {
        let sign = if self.objective.maximize() { 1.0 } else { -1.0 };
        self.rows
            .iter()
            .filter(|r| r.objective.is_some())
            .reduce(|best, r| {
                let (a, b) = (sign * r.objective.unwrap(), sign * best.objective.unwrap());
                if a > b || (a == b && r.abs_detuning < best.abs_detuning) {
                    r
                } else {
                    best
                }
            })
    }
}

/// Evaluates every grid cell (first axis varies slowest). Cell failures are
/// recorded in their row.
pub fn run_sweep(spec: &SweepSpec, base: &Scenario) -> Result<SweepTable> {
    spec.validate()?;
    let mut cells: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in &spec.axes {
        cells = cells
            .into_iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |&v| {
                    let mut c = prefix.clone();
                    c.push(v);
                    c
                })
            })
            .collect();
    }
    let rows = cells
        .into_par_iter()
        .map(|coords| {
            let scenario = spec
                .axes
                .iter()
                .zip(&coords)
                .try_fold(base.clone(), |s, (axis, &v)| s.with(axis.param.param, axis.param.to_si(v)));
            let abs_detuning = scenario.as_ref().map(|s| s.beam.detuning.abs()).unwrap_or(f64::INFINITY);
            match scenario.and_then(|s| s.evaluate()) {
                Ok(report) => SweepRow {
                    objective: Some(spec.objective.extract(&report)),
                    report: Some(report),
                    error: None,
                    coords,
                    abs_detuning,
                },
                Err(e) => SweepRow { coords, objective: None, report: None, error: Some(e.to_string()), abs_detuning },
            }
        })
        .collect();
    Ok(SweepTable { keys: spec.axes.iter().map(|a| a.param.key.clone()).collect(), objective: spec.objective, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreeParam {
    pub param: ParamKey,
    /// bounds in the key's unit
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeSpec {
    pub free: Vec<FreeParam>,
    pub objective: Objective,
    /// simplex evaluations after seeding
    pub max_evals: usize,
    /// spread of the simplex objective values at convergence
    pub tolerance: f64,
}

impl OptimizeSpec {
    pub const SEEDS_PER_DIMENSION: usize = 8;
    pub const DEFAULT_MAX_EVALS: usize = 500;
    pub const DEFAULT_TOLERANCE: f64 = 1e-4;

    pub fn new(free: Vec<FreeParam>, objective: Objective) -> Self {
        OptimizeSpec { free, objective, max_evals: Self::DEFAULT_MAX_EVALS, tolerance: Self::DEFAULT_TOLERANCE }
    }

    pub fn validate(&self) -> Result<()> {
        if self.free.is_empty() || self.free.len() > 4 {
            return Err(Error::invalid("optimize needs 1 to 4 free parameters"));
        }
        for f in &self.free {
            if !f.param.param.optimizable() {
                return Err(Error::invalid(format!("{} cannot be optimized", f.param.key)));
            }
            if !(f.lo.is_finite() && f.hi.is_finite() && f.lo <= f.hi) {
                return Err(Error::invalid(format!("bounds for {} need finite lo <= hi", f.param.key)));
            }
            let (lo, hi) = (f.param.to_si(f.lo), f.param.to_si(f.hi));
            match f.param.param {
                Param::Power if lo < 0.0 => return Err(Error::invalid("power bounds must be >= 0")),
                Param::Detuning if hi >= 0.0 => return Err(Error::invalid("detuning bounds must be red (< 0)")),
                Param::WaistMin if lo <= 0.0 => return Err(Error::invalid("waist bounds must be > 0")),
                _ => {}
            }
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::invalid("optimize tolerance must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Seed,
    Simplex,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TracePoint {
    pub phase: Phase,
    pub coords: Vec<f64>,
    pub objective: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeResult {
    pub keys: Vec<String>,
    pub objective: Objective,
    pub best: Vec<f64>,
    pub best_objective: f64,
    pub report: EfficiencyReport,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<TracePoint>,
}

struct Problem<'a> {
    spec: &'a OptimizeSpec,
    base: &'a Scenario,
}

impl Problem<'_> {
    /// Unit-cube coordinates to key units.
    fn coords(&self, u: &[f64]) -> Vec<f64> {
        self.spec.free.iter().zip(u).map(|(f, &x)| f.lo + (f.hi - f.lo) * x.clamp(0.0, 1.0)).collect()
    }

    fn evaluate(&self, u: &[f64]) -> (Vec<f64>, Option<(f64, EfficiencyReport)>, f64) {
        let coords = self.coords(u);
        let scenario = self
            .spec
            .free
            .iter()
            .zip(&coords)
            .try_fold(self.base.clone(), |s, (f, &v)| s.with(f.param.param, f.param.to_si(v)));
        let abs_detuning = scenario.as_ref().map(|s| s.beam.detuning.abs()).unwrap_or(f64::INFINITY);
        let result = scenario.and_then(|s| s.evaluate()).ok().map(|r| (self.spec.objective.cost(&r), r));
        (coords, result, abs_detuning)
    }
}

fn cost_of(r: &Option<(f64, EfficiencyReport)>) -> f64 {
    r.as_ref().map(|(c, _)| *c).unwrap_or(f64::INFINITY)
}

/// Grid seeding followed by a bounded Nelder–Mead simplex.
pub fn optimize(spec: &OptimizeSpec, base: &Scenario) -> Result<OptimizeResult> {
    spec.validate()?;
    let n = spec.free.len();
    let problem = Problem { spec, base };
    let objective_value = |cost: f64| if spec.objective.maximize() { -cost } else { cost };
    let mut trace = Vec::new();

    // seed grid in the unit cube; degenerate dimensions get a single value
    let per_dim: Vec<Vec<f64>> = spec
        .free
        .iter()
        .map(|f| {
            if f.hi == f.lo {
                vec![0.0]
            } else {
                let k = OptimizeSpec::SEEDS_PER_DIMENSION;
                (0..k).map(|i| i as f64 / (k - 1) as f64).collect()
            }
        })
        .collect();
    let mut seeds: Vec<Vec<f64>> = vec![Vec::new()];
    for values in &per_dim {
        seeds = seeds
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    let evaluated: Vec<_> = seeds.par_iter().map(|u| problem.evaluate(u)).collect();
    let mut best_seed: Option<(usize, f64, f64)> = None;
    for (i, (coords, result, abs_det)) in evaluated.iter().enumerate() {
        trace.push(TracePoint { phase: Phase::Seed, coords: coords.clone(), objective: result.as_ref().map(|(c, _)| objective_value(*c)) });
        let c = cost_of(result);
        if c.is_finite() {
            let better = match best_seed {
                None => true,
                Some((_, bc, bd)) => c < bc || (c == bc && *abs_det < bd),
            };
            if better {
                best_seed = Some((i, c, *abs_det));
            }
        }
    }
    let Some((seed_index, _, _)) = best_seed else {
        return Err(Error::ModelValidity("every optimizer seed point is invalid".into()));
    };

    // simplex in the unit cube around the best seed, one seed cell wide
    let step = 1.0 / (OptimizeSpec::SEEDS_PER_DIMENSION - 1) as f64;
    let start = seeds[seed_index].clone();
    let mut simplex: Vec<(Vec<f64>, f64, Option<EfficiencyReport>)> = Vec::with_capacity(n + 1);
    let seed_result = evaluated[seed_index].1.clone();
    simplex.push((start.clone(), cost_of(&seed_result), seed_result.map(|(_, r)| r)));
    let mut evals = 0usize;
    let eval = |u: &[f64], trace: &mut Vec<TracePoint>, evals: &mut usize| {
        let (coords, result, _) = problem.evaluate(u);
        *evals += 1;
        trace.push(TracePoint { phase: Phase::Simplex, coords, objective: result.as_ref().map(|(c, _)| objective_value(*c)) });
        (cost_of(&result), result.map(|(_, r)| r))
    };
    let active: Vec<usize> = (0..n).filter(|&i| spec.free[i].hi > spec.free[i].lo).collect();
    for &i in &active {
        let mut u = start.clone();
        u[i] = if u[i] + step <= 1.0 { u[i] + step } else { u[i] - step };
        let (c, r) = eval(&u, &mut trace, &mut evals);
        simplex.push((u, c, r));
    }

    let clip = |u: Vec<f64>| u.into_iter().map(|x| x.clamp(0.0, 1.0)).collect::<Vec<f64>>();
    let mut iterations = 0;
    let mut converged = active.is_empty();
    while !converged && evals < spec.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0].1, simplex[simplex.len() - 1].1);
        if worst.is_finite() && (worst - best).abs() <= spec.tolerance {
            converged = true;
            break;
        }
        iterations += 1;
        let m = simplex.len() - 1;
        let centroid: Vec<f64> =
            (0..n).map(|d| simplex[..m].iter().map(|v| v.0[d]).sum::<f64>() / m as f64).collect();
        let along = |t: f64, from: &[f64]| -> Vec<f64> {
            clip(centroid.iter().zip(from).map(|(c, x)| c + t * (x - c)).collect())
        };
        let worst_point = simplex[m].0.clone();
        let reflected = along(-1.0, &worst_point);
        let (cr, rr) = eval(&reflected, &mut trace, &mut evals);
        if cr < simplex[0].1 {
            let expanded = along(-2.0, &worst_point);
            let (ce, re) = eval(&expanded, &mut trace, &mut evals);
            simplex[m] = if ce < cr { (expanded, ce, re) } else { (reflected, cr, rr) };
        } else if cr < simplex[m - 1].1 {
            simplex[m] = (reflected, cr, rr);
        } else {
            let contracted = if cr < simplex[m].1 { along(-0.5, &worst_point) } else { along(0.5, &worst_point) };
            let (cc, rc) = eval(&contracted, &mut trace, &mut evals);
            if cc < simplex[m].1.min(cr) {
                simplex[m] = (contracted, cc, rc);
            } else {
                let anchor = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    let u = clip(anchor.iter().zip(&v.0).map(|(a, x)| a + 0.5 * (x - a)).collect());
                    let (c, r) = eval(&u, &mut trace, &mut evals);
                    *v = (u, c, r);
                }
            }
        }
        // a collapsed simplex cannot move further
        let size = simplex.iter().map(|v| v.0.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)).fold(0.0, f64::max);
        if size < 1e-12 {
            converged = true;
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (u, cost, report) = simplex.swap_remove(0);
    let report = report.ok_or_else(|| Error::Numerical("optimizer finished on an invalid point".into()))?;
    Ok(OptimizeResult {
        keys: spec.free.iter().map(|f| f.param.key.clone()).collect(),
        objective: spec.objective,
        best: problem.coords(&u),
        best_objective: objective_value(cost),
        report,
        iterations,
        converged,
        trace,
    })
}

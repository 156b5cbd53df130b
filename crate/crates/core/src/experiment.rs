//! End-to-end experiments driven by an [`ExperimentConfig`]: each produces one JSON document
//! plus optional CSV artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analysis::{
    apriori_checks, error_curve, gradient_unit_deviation, interface_drift, refinement_study, sup_error_on_compact,
    AprioriReport, CompactMask, ErrorReport, GradientStats, MaskRecipe, RefinementRow, RescaleRow,
};
use crate::barriers::{choose_barrier_params, sandwich_check, BarrierPair, SandwichReport};
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::io::{curve_to_csv, field_to_csv, mesh_to_csv, to_canonical_json};
use crate::norms::NormSpec;
use crate::oracle::{brute_force_signed_distance, extract_interface, fast_sweeping_distance, lipschitz_certificate};
use crate::problem::{audit_hypotheses, AuditReport, ProblemSpec};
use crate::solver::{rescaled_solve, solve, SolveConfig};

/// One named acceptance condition: `value` compared against `threshold`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
}

impl Check {
    fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), passed: value <= threshold, value, threshold }
    }

    fn within(name: &str, value: f64, [lo, hi]: [f64; 2]) -> Vec<Self> {
        vec![
            Self { name: format!("{name}_min"), passed: value >= lo, value, threshold: lo },
            Self { name: format!("{name}_max"), passed: value <= hi, value, threshold: hi },
        ]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Document<R> {
    pub command: &'static str,
    pub seed: u64,
    pub h: f64,
    pub report: R,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl<R> Document<R> {
    fn new(command: &'static str, cfg: &ExperimentConfig, h: f64, report: R, checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Self { command, seed: cfg.seed, h, report, checks, passed }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// A document and the files to write alongside it, as `(file name, contents)`.
#[derive(Clone, Debug)]
pub struct Outcome<R> {
    pub document: Document<R>,
    pub artifacts: Vec<(String, String)>,
}

impl<R: Serialize> Outcome<R> {
    pub fn json(&self) -> Result<String> {
        to_canonical_json(&self.document)
    }

    /// Writes `<command>.json` and every artifact into `dir`, returning the paths written.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let report = dir.join(format!("{}.json", self.document.command));
        fs::write(&report, self.json()?)?;
        written.push(report);
        for (name, contents) in &self.artifacts {
            let path = dir.join(name);
            fs::write(&path, contents)?;
            written.push(path);
        }
        Ok(written)
    }
}

fn problem_h(problem: &ProblemSpec<f64>) -> f64 {
    problem.grid().max_spacing()
}

fn audit_of(cfg: &ExperimentConfig, problem: &ProblemSpec<f64>) -> Result<AuditReport<f64>> {
    audit_hypotheses(problem, cfg.analysis.audit_band, &cfg.analysis.c_grid)
}

pub fn audit(cfg: &ExperimentConfig) -> Result<Outcome<AuditReport<f64>>> {
    let problem = cfg.build_problem()?;
    let report = audit_of(cfg, &problem)?;
    let checks = vec![Check { name: "hypotheses".into(), passed: report.pass, value: f64::from(u8::from(report.pass)), threshold: 1.0 }];
    Ok(Outcome { document: Document::new("audit", cfg, problem_h(&problem), report, checks), artifacts: Vec::new() })
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub segments: usize,
    pub interface_length: f64,
    /// The norm distances are measured in (dual of the problem norm).
    pub distance_norm: NormSpec<f64>,
    /// `max | |brute force| - fast sweeping |` over all nodes.
    pub max_disagreement: f64,
    pub max_disagreement_cells: f64,
    pub certificate_pairs: usize,
    pub certificate_brute_force: f64,
    pub certificate_fast_sweeping: f64,
}

/// Extracts the interface, computes both distance fields and cross-checks them.
pub fn oracle(cfg: &ExperimentConfig) -> Result<Outcome<OracleReport>> {
    let problem = cfg.build_problem()?;
    let grid = problem.grid();
    let h = problem_h(&problem);
    let dual = problem.norm.dual();
    let mesh = extract_interface(&problem.u0, 0.0)?;
    let brute = brute_force_signed_distance(&mesh, grid, &dual, &problem.u0)?;
    let sweep = fast_sweeping_distance(&mesh, grid, &dual)?;
    let max_disagreement = brute
        .values
        .values()
        .iter()
        .zip(sweep.values.values())
        .map(|(b, s)| (b.abs() - s).abs())
        .fold(0.0, f64::max);
    let pairs = cfg.analysis.certificate_pairs;
    let cert_b = lipschitz_certificate(&brute.values, &dual, pairs, cfg.seed)?;
    let cert_s = lipschitz_certificate(&sweep.values, &dual, pairs, cfg.seed)?;
    let tol = &cfg.analysis.tolerances;
    let checks = vec![
        Check::at_most("oracle_disagreement", max_disagreement, tol.oracle * h),
        Check::at_most("certificate_brute_force", cert_b, 1.0 + tol.certificate * h),
        Check::at_most("certificate_fast_sweeping", cert_s, 1.0 + tol.certificate * h),
    ];
    let report = OracleReport {
        segments: mesh.len(),
        interface_length: mesh.total_length(),
        distance_norm: dual,
        max_disagreement,
        max_disagreement_cells: max_disagreement / h,
        certificate_pairs: pairs,
        certificate_brute_force: cert_b,
        certificate_fast_sweeping: cert_s,
    };
    let mut artifacts = Vec::new();
    if cfg.outputs.fields {
        artifacts.push(("interface.csv".into(), mesh_to_csv(&mesh)));
        artifacts.push(("u0.csv".into(), field_to_csv(&problem.u0)));
        artifacts.push(("distance_brute_force.csv".into(), field_to_csv(&brute.values)));
        artifacts.push(("distance_fast_sweeping.csv".into(), field_to_csv(&sweep.values)));
    }
    Ok(Outcome { document: Document::new("oracle", cfg, h, report, checks), artifacts })
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub dt: f64,
    pub steps: usize,
    pub t_reached: f64,
    pub steady_reached: bool,
    pub slope_cap: f64,
    pub mask_nodes: usize,
    pub audit_pass: bool,
    pub error: ErrorReport<f64>,
    pub error_curve: Vec<(f64, f64)>,
    pub max_drift: f64,
    pub drift: Vec<(f64, f64)>,
    pub gradient: GradientStats<f64>,
    pub sandwich: SandwichReport<f64>,
    pub apriori: AprioriReport<f64>,
}

/// The mask for the gradient estimate: the analysis mask with the audit band removed unless the
/// recipe already excludes one.
fn off_band_recipe(cfg: &ExperimentConfig) -> MaskRecipe<f64> {
    let mut r = cfg.analysis.mask.clone();
    if r.exclude_band.is_none() {
        r.exclude_band = Some(cfg.analysis.audit_band);
    }
    r
}

/// Solves, then measures error, drift, barrier sandwich and the a priori estimates.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome<RunReport>> {
    let problem = cfg.build_problem()?;
    let grid = problem.grid();
    let h = problem_h(&problem);
    let audit = audit_of(cfg, &problem)?;
    let result = solve(&problem, grid, &cfg.scheme, &cfg.run)?;

    let mesh = extract_interface(&problem.u0, 0.0)?;
    let d = brute_force_signed_distance(&mesh, grid, &problem.norm.dual(), &problem.u0)?;
    let mask = CompactMask::build(&cfg.analysis.mask, grid, Some(&problem.u0))?;
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    let last = result.series.last();
    let error = sup_error_on_compact(&last.field, &d, &mask, last.time)?;
    let curve = error_curve(&result.series, &d, &mask)?;
    let drift = interface_drift(&result.series, &mesh);
    let max_drift = drift.iter().map(|p| p.1).fold(0.0, f64::max);
    let gradient = gradient_unit_deviation(&last.field, &problem.norm, &mask)?;

    let tol = &cfg.analysis.tolerances;
    let barrier = choose_barrier_params(&problem, &audit, result.slope_cap)?;
    let sandwich = sandwich_check(&result, &BarrierPair::new(barrier, problem.u0.clone()), tol.barrier * h)?;
    let off_band = CompactMask::build(&off_band_recipe(cfg), grid, Some(&problem.u0))?;
    let apriori = apriori_checks(
        &result,
        &problem.speed,
        &problem.hamiltonian,
        &problem.norm,
        result.slope_cap,
        &off_band,
        tol.apriori * h,
    )?;

    let checks = vec![
        Check::at_most("sup_error", error.sup_error, tol.sup_error * h),
        Check::at_most("interface_drift", max_drift, tol.drift * h),
        Check::at_most("sandwich_violations", sandwich.violations as f64, 0.0),
        Check::at_most("apriori_time_derivative", apriori.c_t, apriori.c_t_bound + apriori.tol),
        Check::at_most("apriori_gradient_violations", apriori.gradient_violations as f64, 0.0),
    ];

    let mut artifacts = Vec::new();
    if cfg.outputs.fields {
        artifacts.push(("interface.csv".into(), mesh_to_csv(&mesh)));
        artifacts.push(("u0.csv".into(), field_to_csv(&problem.u0)));
        artifacts.push(("distance.csv".into(), field_to_csv(&d.values)));
        artifacts.push(("final.csv".into(), field_to_csv(&last.field)));
    }
    if cfg.outputs.curves {
        artifacts.push(("error_curve.csv".into(), curve_to_csv(["t", "sup_error"], &curve)));
        artifacts.push(("drift.csv".into(), curve_to_csv(["t", "hausdorff_drift"], &drift)));
        artifacts.push(("residual.csv".into(), curve_to_csv(["t", "residual"], &result.residual_history)));
    }
    if cfg.outputs.snapshots {
        for (i, s) in result.series.snapshots().iter().enumerate() {
            artifacts.push((format!("snapshot_{i:05}.csv"), field_to_csv(&s.field)));
        }
    }

    let report = RunReport {
        dt: result.dt_used,
        steps: result.steps,
        t_reached: result.t_final,
        steady_reached: result.steady_reached,
        slope_cap: result.slope_cap,
        mask_nodes: mask.count(),
        audit_pass: audit.pass,
        error,
        error_curve: curve,
        max_drift,
        drift,
        gradient,
        sandwich,
        apriori,
    };
    Ok(Outcome { document: Document::new("run", cfg, h, report, checks), artifacts })
}

#[derive(Clone, Debug, Serialize)]
pub struct RefineReport {
    pub rows: Vec<RefinementRow<f64>>,
}

/// Refinement table over `analysis.resolutions`; `h` in the document is the finest spacing.
pub fn study_refine(cfg: &ExperimentConfig) -> Result<Outcome<RefineReport>> {
    let resolutions = &cfg.analysis.resolutions;
    if resolutions.is_empty() {
        return Err(Error::Config("study-refine needs analysis.resolutions".into()));
    }
    let family = cfg.family()?;
    let rows = refinement_study(&family, resolutions, &cfg.scheme, &cfg.run, &cfg.analysis.mask)
        .map_err(|e| match e {
            Error::InvalidParameter(m) => Error::Config(m),
            e => e,
        })?;
    let mut checks = Vec::new();
    for r in &rows {
        if r.failure.is_some() {
            checks.push(Check { name: format!("run_{}", r.points), passed: false, value: f64::NAN, threshold: 0.0 });
        }
        if let Some(o) = r.observed_order {
            checks.extend(Check::within(&format!("order_{}", r.points), o, cfg.analysis.tolerances.order_range));
        }
    }
    let h = rows.last().map_or(f64::NAN, |r| r.h);
    let csv_rows: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.sup_error.map(|e| (r.h, e))).collect();
    let artifacts = if cfg.outputs.curves { vec![("refinement.csv".into(), curve_to_csv(["h", "sup_error"], &csv_rows))] } else { Vec::new() };
    Ok(Outcome { document: Document::new("study-refine", cfg, h, RefineReport { rows }, checks), artifacts })
}

#[derive(Clone, Debug, Serialize)]
pub struct RescaleReport {
    pub rows: Vec<RescaleRow<f64>>,
}

/// `sup_K |u^eps(., 1) - d|` for every configured `epsilon`, one rescaled solve each.
///
/// `run.t_final` is ignored: every rescaled run ends at time 1.
pub fn study_rescale(cfg: &ExperimentConfig) -> Result<Outcome<RescaleReport>> {
    let problem = cfg.build_problem()?;
    let grid = problem.grid();
    let h = problem_h(&problem);
    let mesh = extract_interface(&problem.u0, 0.0)?;
    let d = brute_force_signed_distance(&mesh, grid, &problem.norm.dual(), &problem.u0)?;
    let mask = CompactMask::build(&cfg.analysis.mask, grid, Some(&problem.u0))?;
    let run = SolveConfig { t_final: 1.0, ..cfg.run.clone() };
    let mut rows = Vec::new();
    for &eps in &cfg.analysis.epsilons {
        let r = rescaled_solve(&problem, grid, &cfg.scheme, &run, eps)?;
        let last = r.series.last();
        let rep = sup_error_on_compact(&last.field, &d, &mask, last.time)?;
        let requested = eps.recip();
        let reached = last.time / eps;
        rows.push(RescaleRow {
            epsilon: eps,
            requested_time: requested,
            snapshot_time: reached,
            time_offset: (reached - requested).abs(),
            sup_error: rep.sup_error,
        });
    }
    let mut checks = Vec::new();
    for w in rows.windows(2) {
        if w[1].epsilon < w[0].epsilon {
            checks.push(Check::at_most(&format!("nonincreasing_eps_{}", w[1].epsilon), w[1].sup_error, w[0].sup_error));
        }
    }
    if let Some(smallest) = rows.iter().min_by(|a, b| a.epsilon.total_cmp(&b.epsilon)) {
        checks.push(Check::at_most("smallest_epsilon_error", smallest.sup_error, cfg.analysis.tolerances.sup_error * h));
    }
    let csv_rows: Vec<(f64, f64)> = rows.iter().map(|r| (r.epsilon, r.sup_error)).collect();
    let artifacts = if cfg.outputs.curves { vec![("rescale.csv".into(), curve_to_csv(["epsilon", "sup_error"], &csv_rows))] } else { Vec::new() };
    Ok(Outcome { document: Document::new("study-rescale", cfg, h, RescaleReport { rows }, checks), artifacts })
}

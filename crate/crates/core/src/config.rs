//! Experiment configuration files (JSON).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{MaskRecipe, ProblemFamily};
use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::grid::{Axis, GridSpec};
use crate::norms::{NormConfig, NormSpec};
use crate::problem::{default_c_grid, Hamiltonian, HamiltonianConfig, ProblemSpec};
use crate::solver::{SchemeSpec, SolveConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    pub grid: GridConfig,
    pub scheme: SchemeSpec<f64>,
    pub run: SolveConfig<f64>,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
    /// Seeds every sampled certificate.
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub u0: Expression,
    pub delta: f64,
    pub norm: NormConfig,
    #[serde(default = "default_hamiltonian")]
    pub hamiltonian: HamiltonianConfig,
}

fn default_hamiltonian() -> HamiltonianConfig {
    HamiltonianConfig::ShiftedLinear
}

/// Box and resolution. Without `y` the problem is one-dimensional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<[f64; 2]>,
    pub points: usize,
    /// Points along `y`; defaults to `points`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points_y: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Compact set for error measurements.
    #[serde(default)]
    pub mask: MaskRecipe<f64>,
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    /// Point counts per axis for `study-refine`; each must halve `h`.
    #[serde(default)]
    pub resolutions: Vec<usize>,
    /// Width of `{|u0| <= band}` used by the hypothesis audit.
    #[serde(default = "default_audit_band")]
    pub audit_band: f64,
    /// Scale candidates for the `c u0` witness.
    #[serde(default = "default_c_grid")]
    pub c_grid: Vec<f64>,
    #[serde(default = "default_certificate_pairs")]
    pub certificate_pairs: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// Acceptance thresholds, in grid spacings unless noted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "five")]
    pub sup_error: f64,
    #[serde(default = "two")]
    pub drift: f64,
    #[serde(default = "five")]
    pub barrier: f64,
    #[serde(default = "ten")]
    pub apriori: f64,
    #[serde(default = "two")]
    pub oracle: f64,
    /// The certificate must not exceed `1 + certificate h`.
    #[serde(default = "ten")]
    pub certificate: f64,
    /// Accepted range of observed orders in `study-refine`.
    #[serde(default = "default_order_range")]
    pub order_range: [f64; 2],
}

fn two() -> f64 {
    2.0
}

fn five() -> f64 {
    5.0
}

fn ten() -> f64 {
    10.0
}

fn default_order_range() -> [f64; 2] {
    [0.7, 1.3]
}

fn default_epsilons() -> Vec<f64> {
    vec![1.0, 0.5, 0.25, 0.125]
}

fn default_audit_band() -> f64 {
    0.2
}

fn default_certificate_pairs() -> usize {
    10_000
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            sup_error: five(),
            drift: two(),
            barrier: five(),
            apriori: ten(),
            oracle: two(),
            certificate: ten(),
            order_range: default_order_range(),
        }
    }
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            mask: MaskRecipe::default(),
            epsilons: default_epsilons(),
            resolutions: Vec::new(),
            audit_band: default_audit_band(),
            c_grid: default_c_grid(),
            certificate_pairs: default_certificate_pairs(),
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
    /// CSV dumps of `u0`, distance fields and the final state.
    #[serde(default = "yes")]
    pub fields: bool,
    /// Two-column CSV curves (error, drift, residual against time).
    #[serde(default = "yes")]
    pub curves: bool,
    /// Every stored snapshot as its own CSV.
    #[serde(default)]
    pub snapshots: bool,
}

fn yes() -> bool {
    true
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: PathBuf::from("output"), fields: true, curves: true, snapshots: false }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn dim(&self) -> usize {
        if self.grid.y.is_some() {
            2
        } else {
            1
        }
    }

    /// Checks everything that can be checked without sampling `u0`.
    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.grid.y.is_none() && self.grid.points_y.is_some() {
            return cfg("grid.points_y given without grid.y".into());
        }
        if self.dim() == 1 && self.problem.u0.uses_y() {
            return cfg("u0 uses y on a one-dimensional grid".into());
        }
        if !(self.problem.delta > 0.0) {
            return cfg(format!("problem.delta {} must be positive", self.problem.delta));
        }
        self.grid_spec()?;
        let norm = self.norm()?;
        self.hamiltonian()?;
        self.scheme.validate(&norm).map_err(|e| Error::Config(format!("scheme: {e}")))?;
        self.run.validate().map_err(|e| Error::Config(format!("run: {e}")))?;
        let a = &self.analysis;
        if a.epsilons.iter().any(|e| !(*e > 0.0)) {
            return cfg("analysis.epsilons must be positive".into());
        }
        if !(a.audit_band > 0.0) {
            return cfg("analysis.audit_band must be positive".into());
        }
        if a.c_grid.is_empty() || a.c_grid.iter().any(|c| !(*c > 0.0)) {
            return cfg("analysis.c_grid must hold positive scales".into());
        }
        if a.certificate_pairs == 0 {
            return cfg("analysis.certificate_pairs must be at least 1".into());
        }
        let [lo, hi] = a.tolerances.order_range;
        if !(lo <= hi) {
            return cfg("analysis.tolerances.order_range is not ordered".into());
        }
        Ok(())
    }

    pub fn grid_spec(&self) -> Result<GridSpec<f64>> {
        self.grid_at(self.grid.points, self.grid.points_y)
    }

    /// The configured box at `points` per axis (`points_y` along `y` when given).
    pub fn grid_at(&self, points: usize, points_y: Option<usize>) -> Result<GridSpec<f64>> {
        let [x0, x1] = self.grid.x;
        let mut axes = vec![Axis::new(x0, x1, points)];
        if let Some([y0, y1]) = self.grid.y {
            axes.push(Axis::new(y0, y1, points_y.unwrap_or(points)));
        }
        GridSpec::from_axes(axes).map_err(|e| Error::Config(format!("grid: {e}")))
    }

    pub fn norm(&self) -> Result<NormSpec<f64>> {
        NormSpec::from_config(&self.problem.norm, self.dim()).map_err(|e| Error::Config(format!("norm: {e}")))
    }

    pub fn hamiltonian(&self) -> Result<Hamiltonian<f64>> {
        Hamiltonian::from_config(&self.problem.hamiltonian).map_err(|e| Error::Config(format!("hamiltonian: {e}")))
    }

    /// Samples `u0` on the configured grid. Fails with [`Error::NoInterface`] when `u0` keeps one sign.
    pub fn build_problem(&self) -> Result<ProblemSpec<f64>> {
        ProblemSpec::regularized(
            &self.grid_spec()?,
            self.problem.u0.generator(),
            self.problem.delta,
            self.hamiltonian()?,
            self.norm()?,
        )
    }

    pub fn family(&self) -> Result<ProblemFamily<f64>> {
        let mut bounds = vec![(self.grid.x[0], self.grid.x[1])];
        if let Some([a, b]) = self.grid.y {
            bounds.push((a, b));
        }
        Ok(ProblemFamily {
            generator: self.problem.u0.generator(),
            delta: self.problem.delta,
            hamiltonian: self.hamiltonian()?,
            norm: self.norm()?,
            bounds,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CIRCLE: &str = r#"{
        "problem": {"u0": "x^2 + y^2 - 1", "delta": 0.1, "norm": {"type": "p", "p": 2}},
        "grid": {"x": [-2, 2], "y": [-2, 2], "points": 41},
        "scheme": {"variant": "godunov"},
        "run": {"t_final": 1}
    }"#;

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::from_json(CIRCLE).unwrap();
        assert_eq!(c.problem.hamiltonian, HamiltonianConfig::ShiftedLinear);
        assert_eq!(c.scheme.cfl, 0.5);
        assert_eq!(c.analysis.epsilons, vec![1.0, 0.5, 0.25, 0.125]);
        assert_eq!(c.analysis.tolerances.sup_error, 5.0);
        assert_eq!(c.seed, 0);
        assert_eq!(c.grid_spec().unwrap().len(), 41 * 41);
    }

    #[test]
    fn round_trip() {
        let c = ExperimentConfig::from_json(CIRCLE).unwrap();
        let back = ExperimentConfig::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_keys_rejected() {
        let typo = CIRCLE.replace("\"delta\"", "\"delat\"");
        assert!(matches!(ExperimentConfig::from_json(&typo), Err(Error::Config(_))));
        let nested = CIRCLE.replace(r#""variant": "godunov""#, r#""variant": "godunov", "cfll": 0.4"#);
        assert!(matches!(ExperimentConfig::from_json(&nested), Err(Error::Config(_))));
    }

    #[test]
    fn inconsistent_configs_rejected() {
        let one_d = CIRCLE.replace(r#", "y": [-2, 2]"#, "");
        let err = ExperimentConfig::from_json(&one_d).unwrap_err();
        assert!(err.to_string().contains("uses y"), "{err}");
        let bad_delta = CIRCLE.replace("0.1", "-0.1");
        assert!(ExperimentConfig::from_json(&bad_delta).is_err());
        let ellip = CIRCLE.replace(r#"{"type": "p", "p": 2}"#, r#"{"type": "ellipsoidal", "a": [[2, 1], [1, 2]]}"#);
        assert!(ExperimentConfig::from_json(&ellip).unwrap_err().to_string().contains("lax_friedrichs"));
    }

    #[test]
    fn no_sign_change_is_no_interface() {
        let c = ExperimentConfig::from_json(&CIRCLE.replace("- 1", "+ 1")).unwrap();
        assert!(matches!(c.build_problem(), Err(Error::NoInterface)));
    }
}

//! Problem data for `u_t + f(x) H(||grad u||) = 0`, `u(., 0) = u0`, and a numerical audit of the
//! structural hypotheses on `f`, `u0` and `H`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{central_gradient_norm, sample_function, GridSpec, Point, ScalarField};
use crate::norms::NormSpec;
use crate::real::{fmax, Real};

/// Samples used to scan `H` on `[0, slope_cap]`.
const H_SAMPLES: usize = 4096;

/// A Hamiltonian with `H(1) = 0`, strictly increasing on `[0, inf)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Hamiltonian<T> {
    /// `H(p) = p - 1`
    ShiftedLinear,
    /// `H(p) = p^m - 1`, `m >= 1`
    ShiftedPower { m: T },
}

impl<T: Real> Hamiltonian<T> {
    pub fn shifted_power(m: T) -> Result<Self> {
        if !(m >= T::one()) || !m.is_finite() {
            return Err(Error::InvalidParameter(format!("power exponent {m} must be >= 1")));
        }
        Ok(Hamiltonian::ShiftedPower { m })
    }

    /// Unchecked evaluation for the hot loops; `p` is a norm value.
    #[inline(always)]
    pub fn value(&self, p: T) -> T {
        match *self {
            Hamiltonian::ShiftedLinear => p - T::one(),
            Hamiltonian::ShiftedPower { m } => {
                if m == T::lit(2.0) {
                    p * p - T::one()
                } else {
                    p.powf(m) - T::one()
                }
            }
        }
    }

    /// `H(p)`; negative arguments are rejected since `p` is always a norm.
    pub fn eval(&self, p: T) -> Result<T> {
        if !(p >= T::zero()) {
            return Err(Error::InvalidParameter(format!("Hamiltonian argument {p} is negative")));
        }
        Ok(self.value(p))
    }

    fn samples(cap: T) -> impl Iterator<Item = T> {
        let step = cap / T::from_usize_lossy(H_SAMPLES);
        (0..=H_SAMPLES).map(move |i| T::from_usize_lossy(i) * step)
    }

    /// Largest finite-difference slope of `H` over `[0, cap]`.
    ///
    /// Besides the sample windows a fine backward difference at `cap` is taken, which is where
    /// convex `H` is steepest.
    pub fn max_slope(&self, cap: T) -> T {
        let step = cap / T::from_usize_lossy(H_SAMPLES);
        let pts: Vec<T> = Self::samples(cap).collect();
        let fine = cap * T::lit(1e-7);
        let edge = ((self.value(cap) - self.value(cap - fine)) / fine).abs();
        pts.windows(2)
            .map(|w| ((self.value(w[1]) - self.value(w[0])) / step).abs())
            .fold(edge, fmax)
    }

    /// `inf H` over `[0, cap]` by sampling.
    pub fn infimum(&self, cap: T) -> T {
        Self::samples(cap).map(|p| self.value(p)).fold(T::infinity(), crate::real::fmin)
    }

    /// `max |H|` over `[0, cap]` by sampling.
    pub fn max_abs(&self, cap: T) -> T {
        Self::samples(cap).map(|p| self.value(p).abs()).fold(T::zero(), fmax)
    }

    /// Sampled growth constant `sup |H(p)| / (1 + p)` over `[0, cap]`.
    pub fn growth_constant(&self, cap: T) -> T {
        Self::samples(cap).map(|p| self.value(p).abs() / (T::one() + p)).fold(T::zero(), fmax)
    }

    /// Whether the linear-growth bound `|H(p)| <= C (1 + p)` holds on all of `[0, inf)`.
    pub fn has_linear_growth(&self) -> bool {
        match *self {
            Hamiltonian::ShiftedLinear => true,
            Hamiltonian::ShiftedPower { m } => m == T::one(),
        }
    }

    /// Root of `H` on `[0, cap]` by bisection, if `H` changes sign there.
    pub fn root(&self, cap: T) -> Option<T> {
        let (mut lo, mut hi) = (T::zero(), cap);
        if self.value(lo) > T::zero() || self.value(hi) < T::zero() {
            return None;
        }
        for _ in 0..200 {
            let mid = (lo + hi) / T::lit(2.0);
            if self.value(mid) < T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(hi)
    }

    pub fn to_config(&self) -> HamiltonianConfig {
        match *self {
            Hamiltonian::ShiftedLinear => HamiltonianConfig::ShiftedLinear,
            Hamiltonian::ShiftedPower { m } => HamiltonianConfig::ShiftedPower { m: m.as_f64() },
        }
    }

    pub fn from_config(c: &HamiltonianConfig) -> Result<Self> {
        match *c {
            HamiltonianConfig::ShiftedLinear => Ok(Hamiltonian::ShiftedLinear),
            HamiltonianConfig::ShiftedPower { m } => Self::shifted_power(T::lit(m)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianConfig {
    ShiftedLinear,
    ShiftedPower { m: f64 },
}

/// `f` sampled on the grid, with grid estimates of its Lipschitz constant and sup norm.
#[derive(Clone, Debug, PartialEq)]
pub struct SpeedField<T> {
    pub values: ScalarField<T>,
    /// Regularization width when built from the regularized sign.
    pub delta: Option<T>,
    pub lipschitz_estimate: T,
    pub sup_bound: T,
}

impl<T: Real> SpeedField<T> {
    /// Wraps a user-supplied speed and measures it.
    pub fn from_field(values: ScalarField<T>) -> Self {
        let lipschitz_estimate = edge_lipschitz(&values);
        let sup_bound = values.max_abs();
        Self { values, delta: None, lipschitz_estimate, sup_bound }
    }

    #[inline]
    pub fn get(&self, k: usize) -> T {
        self.values.get(k)
    }
}

/// Regularized sign `f = u0 / sqrt(u0^2 + delta^2)`.
pub fn build_speed_field<T: Real>(u0: &ScalarField<T>, delta: T) -> Result<SpeedField<T>> {
    if !(delta > T::zero()) || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!("delta {delta} must be positive")));
    }
    let values = u0.map(|u| u / (u * u + delta * delta).sqrt())?;
    let mut speed = SpeedField::from_field(values);
    speed.delta = Some(delta);
    Ok(speed)
}

/// Largest `|f(a) - f(b)| / |a - b|` over axis-neighbor node pairs.
fn edge_lipschitz<T: Real>(field: &ScalarField<T>) -> T {
    let grid = field.grid();
    let v = field.values();
    let mut best = T::zero();
    for a in 0..grid.dim() {
        let s = grid.stride(a);
        let h = grid.spacing(a);
        for k in 0..grid.len() {
            if grid.multi_index(k)[a] + 1 < grid.points(a) {
                best = fmax(best, (v[k + s] - v[k]).abs() / h);
            }
        }
    }
    best
}

pub type Generator<T> = Arc<dyn Fn(Point<T>) -> T + Send + Sync>;

/// The full data of one problem instance.
#[derive(Clone)]
pub struct ProblemSpec<T> {
    pub u0: ScalarField<T>,
    /// The analytic initial datum, when known; lets refinement studies resample it.
    pub generator: Option<Generator<T>>,
    pub speed: SpeedField<T>,
    pub hamiltonian: Hamiltonian<T>,
    pub norm: NormSpec<T>,
}

impl<T: Real> fmt::Debug for ProblemSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("grid", self.u0.grid())
            .field("delta", &self.speed.delta)
            .field("hamiltonian", &self.hamiltonian)
            .field("norm", &self.norm)
            .field("has_generator", &self.generator.is_some())
            .finish()
    }
}

impl<T: Real> ProblemSpec<T> {
    pub fn new(u0: ScalarField<T>, speed: SpeedField<T>, hamiltonian: Hamiltonian<T>, norm: NormSpec<T>) -> Result<Self> {
        let dim = u0.grid().dim();
        if norm.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: norm.dim() });
        }
        if speed.values.grid() != u0.grid() {
            return Err(Error::InvalidGrid("speed field and u0 live on different grids".into()));
        }
        if !u0.changes_sign() {
            return Err(Error::NoInterface);
        }
        Ok(Self { u0, generator: None, speed, hamiltonian, norm })
    }

    /// Samples `u0` and builds the regularized-sign speed, keeping the generator.
    pub fn regularized(
        grid: &GridSpec<T>,
        u0: Generator<T>,
        delta: T,
        hamiltonian: Hamiltonian<T>,
        norm: NormSpec<T>,
    ) -> Result<Self> {
        let field = sample_function(grid, |p| u0(p))?;
        let speed = build_speed_field(&field, delta)?;
        let mut problem = Self::new(field, speed, hamiltonian, norm)?;
        problem.generator = Some(u0);
        Ok(problem)
    }

    pub fn grid(&self) -> &GridSpec<T> {
        self.u0.grid()
    }

    /// `||grad u0||` in the problem norm at every node.
    ///
    /// Uses a fine central difference of the generator when available, otherwise grid central
    /// differences.
    pub fn u0_gradient_norm(&self) -> ScalarField<T> {
        let grid = self.grid();
        match &self.generator {
            Some(g) => {
                let eps = grid.min_spacing() * T::lit(1e-3);
                let values = (0..grid.len())
                    .map(|k| {
                        let p = grid.node(k);
                        let mut d = [T::zero(); 2];
                        for (a, da) in d.iter_mut().enumerate().take(grid.dim()) {
                            let (mut lo, mut hi) = (p, p);
                            lo[a] = lo[a] - eps;
                            hi[a] = hi[a] + eps;
                            *da = (g(hi) - g(lo)) / (eps + eps);
                        }
                        self.norm.eval(&d)
                    })
                    .collect();
                ScalarField::new(grid.clone(), values)
                    .unwrap_or_else(|_| central_gradient_norm(&self.u0, &self.norm).expect("dimensions checked"))
            }
            None => central_gradient_norm(&self.u0, &self.norm).expect("dimensions checked"),
        }
    }

    /// Default `slope_cap`: three times the sup of `||grad u0||`.
    pub fn default_slope_cap(&self) -> T {
        T::lit(3.0) * fmax(self.u0_gradient_norm().max_abs(), T::one())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    PassByConstruction,
    Warn,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LipschitzAudit<T> {
    pub lipschitz_estimate: T,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupAudit<T> {
    pub sup_bound: T,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignAudit {
    pub violations: usize,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradientFloorAudit<T> {
    pub band_width: T,
    pub band_nodes: usize,
    /// `inf ||grad u0||` over `{|u0| <= band_width}`.
    pub gradient_floor: T,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradientSupAudit<T> {
    pub gradient_sup: T,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoteAudit {
    pub status: Status,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthAudit<T> {
    pub growth_constant: T,
    pub scanned_up_to: T,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessAudit<T> {
    /// Best scale `c` for the witness `c u0`, if any candidate was admissible.
    pub witness_c: Option<T>,
    /// `max H(c ||grad u0||)` over off-interface nodes for the best `c`.
    pub alpha: Option<T>,
    pub scan: Vec<(T, T)>,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootAudit<T> {
    pub root: Option<T>,
    pub status: Status,
}

/// Grid-sampled estimates for each hypothesis. Estimates are lower bounds of the true constants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport<T> {
    #[serde(rename = "G1")]
    pub g1: LipschitzAudit<T>,
    #[serde(rename = "G2")]
    pub g2: SupAudit<T>,
    #[serde(rename = "G3")]
    pub g3: SignAudit,
    #[serde(rename = "G4")]
    pub g4: GradientFloorAudit<T>,
    #[serde(rename = "G5")]
    pub g5: GradientSupAudit<T>,
    #[serde(rename = "H1")]
    pub h1: NoteAudit,
    #[serde(rename = "H2")]
    pub h2: NoteAudit,
    #[serde(rename = "H3")]
    pub h3: GrowthAudit<T>,
    #[serde(rename = "H4")]
    pub h4: WitnessAudit<T>,
    #[serde(rename = "H5")]
    pub h5: RootAudit<T>,
    pub pass: bool,
    pub warnings: Vec<String>,
}

impl<T: Real> AuditReport<T> {
    /// `M-hat`.
    pub fn gradient_floor(&self) -> T {
        self.g4.gradient_floor
    }

    /// `C1-hat`.
    pub fn speed_bound(&self) -> T {
        self.g2.sup_bound
    }

    /// `C2-hat`.
    pub fn gradient_sup(&self) -> T {
        self.g5.gradient_sup
    }
}

#[inline]
fn sign3<T: Real>(v: T) -> i8 {
    if v > T::zero() {
        1
    } else if v < T::zero() {
        -1
    } else {
        0
    }
}

/// The default scale candidates for the `c u0` witness: `2^-1, ..., 2^-12`.
pub fn default_c_grid<T: Real>() -> Vec<T> {
    (1..=12).map(|k| T::lit(0.5f64.powi(k))).collect()
}

/// `inf ||grad u0||` over `{|u0| <= width}` and the number of band nodes.
pub(crate) fn band_gradient_floor<T: Real>(u0: &ScalarField<T>, grad: &ScalarField<T>, width: T) -> (T, usize) {
    let mut floor = T::infinity();
    let mut count = 0;
    for (k, &u) in u0.values().iter().enumerate() {
        if u.abs() <= width {
            count += 1;
            floor = crate::real::fmin(floor, grad.get(k));
        }
    }
    (floor, count)
}

/// Audits the hypotheses on `f`, `u0` and `H` by grid sampling.
pub fn audit_hypotheses<T: Real>(problem: &ProblemSpec<T>, band_width: T, c_grid: &[T]) -> Result<AuditReport<T>> {
    if !(band_width > T::zero()) {
        return Err(Error::InvalidParameter(format!("band width {band_width} must be positive")));
    }
    let u0 = &problem.u0;
    let grad = problem.u0_gradient_norm();
    let (gradient_floor, band_nodes) = band_gradient_floor(u0, &grad, band_width);
    if band_nodes == 0 {
        return Err(Error::NoInterface);
    }
    let mut warnings = Vec::new();
    let speed = &problem.speed;
    let h = problem.hamiltonian;

    let violations = u0
        .values()
        .iter()
        .zip(speed.values.values())
        .filter(|(&u, &f)| sign3(u) != sign3(f))
        .count();

    let gradient_sup = grad.max_abs();
    let cap = T::lit(3.0) * fmax(gradient_sup, T::one());

    let growth_constant = h.growth_constant(cap);
    let h3_status = if h.has_linear_growth() {
        Status::Pass
    } else {
        warnings.push("H3: shifted_power with m > 1 has superlinear growth; the theory does not cover it".into());
        Status::Warn
    };

    let mut scan = Vec::new();
    let mut best: Option<(T, T)> = None;
    for &c in c_grid {
        if !(c > T::zero() && c < T::one()) {
            warnings.push(format!("H4: candidate c = {c} outside (0, 1) skipped"));
            continue;
        }
        let alpha = u0
            .values()
            .iter()
            .enumerate()
            .filter(|(_, &u)| u != T::zero())
            .map(|(k, _)| h.value(c * grad.get(k)))
            .fold(T::neg_infinity(), fmax);
        scan.push((c, alpha));
        if best.is_none_or(|(_, a)| alpha < a) {
            best = Some((c, alpha));
        }
    }
    let h4_status = match best {
        Some((_, a)) if a < T::zero() => Status::Pass,
        _ => {
            warnings.push("H4: no scale c in the candidate grid gives H(||grad(c u0)||) < 0".into());
            Status::Warn
        }
    };

    let root = h.root(cap);
    let h5_status = match root {
        Some(r) if (r - T::one()).abs() <= T::lit(1e-9) => Status::Pass,
        _ => Status::Fail,
    };

    let g4_status = if gradient_floor > T::zero() { Status::Pass } else { Status::Fail };
    let g3_status = if violations == 0 { Status::Pass } else { Status::Fail };
    let alpha_ok = best.is_some_and(|(_, a)| a < T::zero());
    let pass = gradient_floor > T::zero() && violations == 0 && alpha_ok;

    Ok(AuditReport {
        g1: LipschitzAudit {
            lipschitz_estimate: speed.lipschitz_estimate,
            status: if speed.lipschitz_estimate.is_finite() { Status::Pass } else { Status::Fail },
        },
        g2: SupAudit { sup_bound: speed.sup_bound, status: Status::Pass },
        g3: SignAudit { violations, status: g3_status },
        g4: GradientFloorAudit { band_width, band_nodes, gradient_floor, status: g4_status },
        g5: GradientSupAudit { gradient_sup, status: Status::Pass },
        h1: NoteAudit {
            status: Status::PassByConstruction,
            note: "supported Hamiltonians are continuous on every ball".into(),
        },
        h2: NoteAudit {
            status: Status::PassByConstruction,
            note: "supported Hamiltonians grow without bound".into(),
        },
        h3: GrowthAudit { growth_constant, scanned_up_to: cap, status: h3_status },
        h4: WitnessAudit { witness_c: best.map(|b| b.0), alpha: best.map(|b| b.1), scan, status: h4_status },
        h5: RootAudit { root, status: h5_status },
        pass,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(n: usize) -> ProblemSpec<f64> {
        let grid = GridSpec::<f64>::square(-2.0, 2.0, n).unwrap();
        ProblemSpec::regularized(
            &grid,
            Arc::new(|p: Point<f64>| p[0] * p[0] + p[1] * p[1] - 1.0),
            0.1,
            Hamiltonian::ShiftedLinear,
            NormSpec::euclidean(2),
        )
        .unwrap()
    }

    #[test]
    fn speed_field_examples() {
        let g = GridSpec::<f64>::new_1d(-1.0, 3.0, 5).unwrap();
        let u0 = sample_function(&g, |p| p[0]).unwrap();
        let f = build_speed_field(&u0, 4.0).unwrap();
        assert_eq!(f.get(1), 0.0);
        let u0 = ScalarField::constant(g.clone(), 3.0);
        assert!((build_speed_field(&u0, 4.0).unwrap().get(0) - 0.6).abs() < 1e-15);
        assert!(build_speed_field(&u0, 0.0).is_err());
        assert!(build_speed_field(&u0, -1.0).is_err());
    }

    #[test]
    fn speed_tends_to_sign() {
        let g = GridSpec::<f64>::new_1d(-1.0, 1.0, 21).unwrap();
        let u0 = sample_function(&g, |p| p[0]).unwrap();
        let f = build_speed_field(&u0, 1e-9).unwrap();
        for (k, &u) in u0.values().iter().enumerate() {
            if u.abs() > 1e-3 {
                assert!((f.get(k) - u.signum()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn speed_field_invariants() {
        let p = circle(101);
        let c2 = p.u0_gradient_norm().max_abs();
        for (k, &u) in p.u0.values().iter().enumerate() {
            let f = p.speed.get(k);
            assert!(f.abs() < 1.0);
            assert_eq!(f == 0.0, u == 0.0);
        }
        let delta = p.speed.delta.unwrap();
        assert!(p.speed.lipschitz_estimate <= c2 / delta + 1e-9);
    }

    #[test]
    fn hamiltonian_examples() {
        let lin = Hamiltonian::<f64>::ShiftedLinear;
        assert_eq!(lin.eval(1.0).unwrap(), 0.0);
        assert_eq!(lin.eval(0.0).unwrap(), -1.0);
        assert_eq!(Hamiltonian::shifted_power(2.0).unwrap().eval(3.0).unwrap(), 8.0);
        assert!(lin.eval(-0.5).is_err());
        assert!(Hamiltonian::<f64>::shifted_power(0.5).is_err());
    }

    #[test]
    fn hamiltonian_scans() {
        let lin = Hamiltonian::<f64>::ShiftedLinear;
        assert!((lin.max_slope(3.0) - 1.0).abs() < 1e-9);
        assert_eq!(lin.infimum(3.0), -1.0);
        assert_eq!(lin.growth_constant(100.0), 1.0);
        assert!((lin.root(3.0).unwrap() - 1.0).abs() < 1e-12);
        let sq = Hamiltonian::<f64>::shifted_power(2.0).unwrap();
        assert!((sq.max_slope(3.0) - 6.0).abs() < 1e-2);
        assert_eq!(sq.infimum(3.0), -1.0);
    }

    #[test]
    fn rejects_single_signed() {
        let grid = GridSpec::<f64>::square(-2.0, 2.0, 11).unwrap();
        let r = ProblemSpec::regularized(
            &grid,
            Arc::new(|p: Point<f64>| p[0] * p[0] + 1.0),
            0.1,
            Hamiltonian::ShiftedLinear,
            NormSpec::euclidean(2),
        );
        assert!(matches!(r, Err(Error::NoInterface)));
    }

    #[test]
    fn audit_circle_gradient_floor() {
        let p = circle(201);
        let r = audit_hypotheses(&p, 0.2, &[0.05, 0.1, 0.2]).unwrap();
        // oracle: 2 sqrt(x^2 + y^2) over band nodes
        let grid = p.grid();
        let oracle = (0..grid.len())
            .filter(|&k| p.u0.get(k).abs() <= 0.2)
            .map(|k| {
                let q = grid.node(k);
                2.0 * (q[0] * q[0] + q[1] * q[1]).sqrt()
            })
            .fold(f64::INFINITY, f64::min);
        assert!(r.gradient_floor() >= 1.6);
        assert!((r.gradient_floor() - oracle).abs() < 1e-6);
        assert_eq!(r.g3.violations, 0);
        assert!(r.pass);
        assert_eq!(r.h3.status, Status::Pass);
        assert_eq!(r.h3.growth_constant, 1.0);
    }

    #[test]
    fn audit_witness_scan() {
        let p = circle(201);
        let r = audit_hypotheses(&p, 0.2, &[0.05, 0.1, 0.2]).unwrap();
        let c2 = r.gradient_sup();
        // sup of 2r on [-2, 2]^2 is reached at the corners
        assert!((c2 - 4.0 * 2f64.sqrt()).abs() < 1e-6);
        for &(c, alpha) in &r.h4.scan {
            assert!((alpha - (c * c2 - 1.0)).abs() < 1e-9);
        }
        let c01 = r.h4.scan.iter().find(|s| s.0 == 0.1).unwrap().1;
        assert!(c01 < 0.0);
        assert_eq!(r.h4.witness_c, Some(0.05));
        assert!(r.h4.alpha.unwrap() <= -0.6);
    }

    #[test]
    fn audit_warns_without_witness() {
        let p = circle(101);
        let r = audit_hypotheses(&p, 0.2, &[0.5, 0.9]).unwrap();
        assert_eq!(r.h4.status, Status::Warn);
        assert!(!r.pass);
    }

    #[test]
    fn audit_flags_superlinear_growth() {
        let mut p = circle(51);
        p.hamiltonian = Hamiltonian::shifted_power(2.0).unwrap();
        let r = audit_hypotheses(&p, 0.2, &default_c_grid()).unwrap();
        assert_eq!(r.h3.status, Status::Warn);
        assert!(r.warnings.iter().any(|w| w.starts_with("H3")));
    }

    #[test]
    fn audit_is_deterministic() {
        let p = circle(81);
        let a = serde_json::to_string(&audit_hypotheses(&p, 0.2, &default_c_grid()).unwrap()).unwrap();
        let b = serde_json::to_string(&audit_hypotheses(&p, 0.2, &default_c_grid()).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn audit_rejects_empty_band() {
        let grid = GridSpec::<f64>::new_1d(-1.0, 1.0, 3).unwrap();
        // zero crossing lands between the nodes -1, 0, 1 with |u0| = 0.5 at each
        let u0 = sample_function(&grid, |p| if p[0] < 0.5 { -0.5 } else { 0.5 }).unwrap();
        let speed = build_speed_field(&u0, 0.1).unwrap();
        let p = ProblemSpec::new(u0, speed, Hamiltonian::ShiftedLinear, NormSpec::euclidean(1)).unwrap();
        assert!(matches!(audit_hypotheses(&p, 0.1, &[0.1]), Err(Error::NoInterface)));
    }
}

//! Explicit time marching of `u_t + f(x) H(||grad u||) = 0` with monotone numerical Hamiltonians.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{one_sided_at, GridSpec, ScalarField, TimeSeries};
use crate::norms::NormSpec;
use crate::problem::{Hamiltonian, ProblemSpec};
use crate::real::{fmax, fmin, Real};

const PAR_CHUNK: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeVariant {
    Godunov,
    LaxFriedrichs,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    Euler,
    #[default]
    TvdRk2,
}

/// Spatial discretization choice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
pub struct SchemeSpec<T> {
    pub variant: SchemeVariant,
    #[serde(default = "default_cfl")]
    pub cfl: T,
    /// Per-axis Lax–Friedrichs dissipation; estimated from the problem when absent.
    #[serde(default)]
    pub lf_dissipation: Option<Vec<T>>,
    /// Scale LF dissipation by `min(1, |f| / f_ref)` so that nodes with `f = 0` do not move.
    #[serde(default = "default_true")]
    pub preserve_interface: bool,
}

fn default_cfl<T: Real>() -> T {
    T::lit(0.5)
}

fn default_true() -> bool {
    true
}

impl<T: Real> SchemeSpec<T> {
    pub fn godunov() -> Self {
        Self { variant: SchemeVariant::Godunov, cfl: default_cfl(), lf_dissipation: None, preserve_interface: true }
    }

    pub fn lax_friedrichs() -> Self {
        Self { variant: SchemeVariant::LaxFriedrichs, cfl: default_cfl(), lf_dissipation: None, preserve_interface: true }
    }

    pub fn with_cfl(mut self, cfl: T) -> Self {
        self.cfl = cfl;
        self
    }

    pub fn validate(&self, norm: &NormSpec<T>) -> Result<()> {
        if !(self.cfl > T::zero() && self.cfl <= T::one()) {
            return Err(Error::InvalidParameter(format!("cfl {} must lie in (0, 1]", self.cfl)));
        }
        if self.variant == SchemeVariant::Godunov && !norm.is_axis_separable() {
            return Err(Error::NonSeparableNorm);
        }
        if let Some(d) = &self.lf_dissipation {
            if d.len() != norm.dim() {
                return Err(Error::DimensionMismatch { expected: norm.dim(), got: d.len() });
            }
            if d.iter().any(|s| !(*s >= T::zero()) || !s.is_finite()) {
                return Err(Error::InvalidParameter("lf_dissipation entries must be finite and >= 0".into()));
            }
        }
        Ok(())
    }
}

/// Time-integration controls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
pub struct SolveConfig<T> {
    pub t_final: T,
    #[serde(default = "default_residual_tol")]
    pub residual_tol: T,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    #[serde(default)]
    pub integrator: Integrator,
    /// Initial bound on `||grad u||`; defaults to three times the sup of `||grad u0||`.
    #[serde(default)]
    pub slope_cap: Option<T>,
    /// Fixed time step. Disables the CFL estimate and slope-cap restarts.
    #[serde(default)]
    pub dt: Option<T>,
}

fn default_residual_tol<T: Real>() -> T {
    T::lit(1e-6)
}

fn default_stride() -> usize {
    10
}

impl<T: Real> SolveConfig<T> {
    pub fn new(t_final: T) -> Self {
        Self {
            t_final,
            residual_tol: default_residual_tol(),
            snapshot_stride: default_stride(),
            integrator: Integrator::default(),
            slope_cap: None,
            dt: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_final > T::zero()) || !self.t_final.is_finite() {
            return Err(Error::InvalidParameter(format!("t_final {} must be positive", self.t_final)));
        }
        if !(self.residual_tol > T::zero()) {
            return Err(Error::InvalidParameter(format!("residual_tol {} must be positive", self.residual_tol)));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::InvalidParameter("snapshot_stride must be at least 1".into()));
        }
        if let Some(c) = self.slope_cap {
            if !(c > T::zero()) {
                return Err(Error::InvalidParameter(format!("slope_cap {c} must be positive")));
            }
        }
        if let Some(dt) = self.dt {
            if !(dt > T::zero()) || !dt.is_finite() {
                return Err(Error::InvalidParameter(format!("dt {dt} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult<T> {
    pub series: TimeSeries<T>,
    /// `(time, max |u^{n+1} - u^n| / dt)` after every step.
    pub residual_history: Vec<(T, T)>,
    pub steady_reached: bool,
    /// The CFL step in force at the end of the run.
    pub dt_used: T,
    /// Time actually reached.
    pub t_final: T,
    pub steps: usize,
    pub slope_cap: T,
    /// Largest per-step rate `max |u^{n+1} - u^n| / dt` over the run.
    pub max_rate: T,
}

#[inline]
fn godunov_component<T: Real>(dm: T, dp: T, sign: T) -> T {
    let z = T::zero();
    if sign > z {
        fmax(fmax(dm, z), -fmin(dp, z))
    } else if sign < z {
        fmax(-fmin(dm, z), fmax(dp, z))
    } else {
        z
    }
}

fn check_pairs<T: Real>(pairs: &[(ScalarField<T>, ScalarField<T>)], grid: &GridSpec<T>, norm: &NormSpec<T>) -> Result<()> {
    if pairs.len() != norm.dim() || grid.dim() != norm.dim() {
        return Err(Error::DimensionMismatch { expected: norm.dim(), got: pairs.len() });
    }
    if pairs.iter().any(|(m, p)| m.grid() != grid || p.grid() != grid) {
        return Err(Error::InvalidGrid("difference fields live on different grids".into()));
    }
    Ok(())
}

/// Godunov (Rouy–Tourin) upwind gradient norm from per-axis `(D-, D+)` pairs.
pub fn upwind_grad_norm<T: Real>(
    pairs: &[(ScalarField<T>, ScalarField<T>)],
    speed_sign: &ScalarField<T>,
    norm: &NormSpec<T>,
) -> Result<ScalarField<T>> {
    if !norm.is_axis_separable() {
        return Err(Error::NonSeparableNorm);
    }
    let grid = speed_sign.grid();
    check_pairs(pairs, grid, norm)?;
    let values = (0..grid.len())
        .map(|k| {
            let mut g = [T::zero(); 2];
            for (a, (m, p)) in pairs.iter().enumerate() {
                g[a] = godunov_component(m.get(k), p.get(k), speed_sign.get(k));
            }
            norm.eval(&g)
        })
        .collect();
    ScalarField::new(grid.clone(), values)
}

/// Lax–Friedrichs numerical Hamiltonian `f H(||avg||) - sum_a sigma_a (D+_a - D-_a) / 2`.
///
/// With `preserve_interface`, `sigma_a` is multiplied by `min(1, |f| / f_ref)` node by node.
#[allow(clippy::too_many_arguments)]
pub fn lf_numerical_hamiltonian<T: Real>(
    pairs: &[(ScalarField<T>, ScalarField<T>)],
    f: &ScalarField<T>,
    hamiltonian: &Hamiltonian<T>,
    norm: &NormSpec<T>,
    dissipation: &[T],
    preserve_interface: bool,
    f_ref: T,
) -> Result<ScalarField<T>> {
    let grid = f.grid();
    check_pairs(pairs, grid, norm)?;
    if dissipation.len() != norm.dim() {
        return Err(Error::DimensionMismatch { expected: norm.dim(), got: dissipation.len() });
    }
    let values = (0..grid.len())
        .map(|k| {
            let mut dm = [T::zero(); 2];
            let mut dp = [T::zero(); 2];
            for (a, (m, p)) in pairs.iter().enumerate() {
                dm[a] = m.get(k);
                dp[a] = p.get(k);
            }
            let scale = interface_scale(f.get(k), preserve_interface, f_ref);
            lf_node(&dm, &dp, grid.dim(), f.get(k), hamiltonian, norm, dissipation, scale)
        })
        .collect();
    ScalarField::new(grid.clone(), values)
}

#[inline]
fn interface_scale<T: Real>(f: T, preserve: bool, f_ref: T) -> T {
    if preserve {
        if f_ref > T::zero() {
            fmin(T::one(), f.abs() / f_ref)
        } else {
            T::zero()
        }
    } else {
        T::one()
    }
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn lf_node<T: Real>(
    dm: &[T; 2],
    dp: &[T; 2],
    dim: usize,
    f: T,
    hamiltonian: &Hamiltonian<T>,
    norm: &NormSpec<T>,
    sigma: &[T],
    scale: T,
) -> T {
    let half = T::lit(0.5);
    let mut avg = [T::zero(); 2];
    let mut diss = T::zero();
    for a in 0..dim {
        avg[a] = (dm[a] + dp[a]) * half;
        diss = diss + sigma[a] * scale * (dp[a] - dm[a]) * half;
    }
    f * hamiltonian.value(norm.eval(&avg)) - diss
}

/// Median `|f|` over the nodes outside the regularization band `{|u0| <= delta}`.
///
/// Without a band the median is over nodes with `f != 0`.
pub fn reference_speed<T: Real>(problem: &ProblemSpec<T>) -> T {
    let f = problem.speed.values.values();
    let pick = |keep: &dyn Fn(usize) -> bool| -> Vec<T> {
        (0..f.len()).filter(|&k| keep(k)).map(|k| f[k].abs()).collect()
    };
    let mut vals = match problem.speed.delta {
        Some(d) => pick(&|k| problem.u0.get(k).abs() > d),
        None => Vec::new(),
    };
    if vals.is_empty() {
        vals = pick(&|k| f[k] != T::zero());
    }
    if vals.is_empty() {
        return T::zero();
    }
    vals.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite speeds"));
    let n = vals.len();
    if n % 2 == 1 {
        vals[n / 2]
    } else {
        (vals[n / 2 - 1] + vals[n / 2]) * T::lit(0.5)
    }
}

/// Automatic LF dissipation `sigma_a = C1 * Lambda * ||e_a||`.
pub fn auto_dissipation<T: Real>(problem: &ProblemSpec<T>, slope_cap: T) -> Vec<T> {
    let lambda = problem.hamiltonian.max_slope(slope_cap);
    (0..problem.norm.dim())
        .map(|a| problem.speed.sup_bound * lambda * problem.norm.axis_norm(a))
        .collect()
}

/// CFL-limited step `cfl / (C1 * Lambda * sum_a ||e_a|| / h_a)`, further limited by
/// `cfl / sum_a (sigma_a / h_a)` for Lax–Friedrichs.
///
/// On a uniform grid with a p-norm this is `cfl * h / (n * C1 * Lambda)`.
pub fn cfl_timestep<T: Real>(problem: &ProblemSpec<T>, scheme: &SchemeSpec<T>, grid: &GridSpec<T>, slope_cap: T) -> Result<T> {
    if !(slope_cap > T::zero()) {
        return Err(Error::InvalidParameter(format!("slope_cap {slope_cap} must be positive")));
    }
    let lambda = problem.hamiltonian.max_slope(slope_cap);
    let c1 = problem.speed.sup_bound;
    let dim = grid.dim();
    let rate: T = (0..dim).map(|a| problem.norm.axis_norm(a) / grid.spacing(a)).sum();
    let mut denom = c1 * lambda * rate;
    if scheme.variant == SchemeVariant::LaxFriedrichs {
        let sigma = scheme.lf_dissipation.clone().unwrap_or_else(|| auto_dissipation(problem, slope_cap));
        let lf: T = (0..dim).map(|a| sigma[a] / grid.spacing(a)).sum();
        denom = fmax(denom, lf);
    }
    if !(denom > T::zero()) || !denom.is_finite() {
        return Err(Error::InvalidParameter("speed and Hamiltonian slope give no finite CFL step".into()));
    }
    Ok(scheme.cfl / denom)
}

/// The discrete operator of one problem and scheme at a given slope cap.
#[derive(Clone, Debug)]
pub struct Discretization<'a, T: Real> {
    problem: &'a ProblemSpec<T>,
    scheme: SchemeSpec<T>,
    slope_cap: T,
    sigma: Vec<T>,
    scale: Vec<T>,
    dt: T,
}

impl<'a, T: Real> Discretization<'a, T> {
    pub fn new(problem: &'a ProblemSpec<T>, scheme: &SchemeSpec<T>, slope_cap: T) -> Result<Self> {
        scheme.validate(&problem.norm)?;
        let f_ref = reference_speed(problem);
        let lf = scheme.variant == SchemeVariant::LaxFriedrichs;
        let scale = if lf {
            problem.speed.values.values().iter().map(|&f| interface_scale(f, scheme.preserve_interface, f_ref)).collect()
        } else {
            Vec::new()
        };
        let mut d = Self { problem, scheme: scheme.clone(), slope_cap, sigma: Vec::new(), scale, dt: T::zero() };
        d.set_slope_cap(slope_cap)?;
        Ok(d)
    }

    fn set_slope_cap(&mut self, cap: T) -> Result<()> {
        self.slope_cap = cap;
        self.sigma = match &self.scheme.lf_dissipation {
            Some(s) => s.clone(),
            None => auto_dissipation(self.problem, cap),
        };
        self.dt = cfl_timestep(self.problem, &self.scheme, self.problem.grid(), cap)?;
        Ok(())
    }

    pub fn slope_cap(&self) -> T {
        self.slope_cap
    }

    /// The CFL step at the current slope cap.
    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn dissipation(&self) -> &[T] {
        &self.sigma
    }

    #[inline]
    fn node(&self, u: &[T], k: usize) -> T {
        let grid = self.problem.grid();
        let dim = grid.dim();
        let mut dm = [T::zero(); 2];
        let mut dp = [T::zero(); 2];
        for a in 0..dim {
            (dm[a], dp[a]) = one_sided_at(u, grid, k, a);
        }
        let f = self.problem.speed.get(k);
        let h = &self.problem.hamiltonian;
        match self.scheme.variant {
            SchemeVariant::Godunov => {
                let mut g = [T::zero(); 2];
                for a in 0..dim {
                    g[a] = godunov_component(dm[a], dp[a], f);
                }
                f * h.value(self.problem.norm.eval(&g))
            }
            SchemeVariant::LaxFriedrichs => lf_node(&dm, &dp, dim, f, h, &self.problem.norm, &self.sigma, self.scale[k]),
        }
    }

    /// The numerical Hamiltonian at every node of state `u`.
    pub fn numerical_hamiltonian(&self, u: &[T]) -> Vec<T> {
        let mut out = Vec::with_capacity(u.len());
        (0..u.len()).into_par_iter().with_min_len(PAR_CHUNK).map(|k| self.node(u, k)).collect_into_vec(&mut out);
        out
    }

    /// One forward Euler step `u - dt * H_num(u)`.
    pub fn euler(&self, u: &[T], dt: T) -> Vec<T> {
        let mut out = Vec::with_capacity(u.len());
        (0..u.len())
            .into_par_iter()
            .with_min_len(PAR_CHUNK)
            .map(|k| u[k] - dt * self.node(u, k))
            .collect_into_vec(&mut out);
        out
    }

    /// Largest `||v||` over the box spanned by the one-sided differences, over all nodes.
    pub fn running_slope(&self, u: &[T]) -> T {
        let grid = self.problem.grid();
        let norm = &self.problem.norm;
        (0..u.len())
            .into_par_iter()
            .with_min_len(PAR_CHUNK)
            .map(|k| {
                let mut m = [T::zero(); 2];
                for (a, ma) in m.iter_mut().enumerate().take(grid.dim()) {
                    let (dm, dp) = one_sided_at(u, grid, k, a);
                    *ma = fmax(dm.abs(), dp.abs());
                }
                fmax(norm.eval(&m), norm.eval(&[m[0], -m[1]]))
            })
            .reduce(T::zero, fmax)
    }
}

fn first_non_finite<T: Real>(u: &[T]) -> Option<usize> {
    u.iter().position(|v| !v.is_finite())
}

/// Marches `u0` to `config.t_final` or until the sup-norm residual drops below `residual_tol`.
///
/// The caller is responsible for auditing the hypotheses first.
pub fn solve<T: Real>(problem: &ProblemSpec<T>, grid: &GridSpec<T>, scheme: &SchemeSpec<T>, config: &SolveConfig<T>) -> Result<SolveResult<T>> {
    if grid != problem.grid() {
        return Err(Error::InvalidGrid("solve grid differs from the problem grid".into()));
    }
    config.validate()?;
    let cap = config.slope_cap.unwrap_or_else(|| problem.default_slope_cap());
    let mut disc = Discretization::new(problem, scheme, cap)?;
    let fixed_dt = config.dt;

    let mut u = problem.u0.values().to_vec();
    let mut series = TimeSeries::starting_with(problem.u0.clone());
    let mut residual_history = Vec::new();
    let mut t = T::zero();
    let mut step = 0usize;
    let mut steady = false;
    let mut max_rate = T::zero();
    let eps = T::epsilon() * T::lit(16.0) * config.t_final;

    while config.t_final - t > eps {
        let next = loop {
            let dt = fmin(fixed_dt.unwrap_or(disc.dt()), config.t_final - t);
            if fixed_dt.is_none() {
                let slope = disc.running_slope(&u);
                if slope > disc.slope_cap() {
                    raise_cap(&mut disc, slope)?;
                    continue;
                }
            }
            let stage1 = disc.euler(&u, dt);
            let candidate = match config.integrator {
                Integrator::Euler => stage1,
                Integrator::TvdRk2 => {
                    if let Some(node) = first_non_finite(&stage1) {
                        return Err(Error::NumericalFailure { step, node });
                    }
                    if fixed_dt.is_none() {
                        let slope = disc.running_slope(&stage1);
                        if slope > disc.slope_cap() {
                            raise_cap(&mut disc, slope)?;
                            continue;
                        }
                    }
                    let stage2 = disc.euler(&stage1, dt);
                    let half = T::lit(0.5);
                    u.iter().zip(&stage2).map(|(&a, &b)| half * a + half * b).collect()
                }
            };
            break (candidate, dt);
        };
        let (new_u, dt) = next;
        if let Some(node) = first_non_finite(&new_u) {
            return Err(Error::NumericalFailure { step, node });
        }
        let change = u.iter().zip(&new_u).map(|(&a, &b)| (b - a).abs()).fold(T::zero(), fmax);
        let rate = change / dt;
        t = if config.t_final - (t + dt) <= eps { config.t_final } else { t + dt };
        step += 1;
        u = new_u;
        residual_history.push((t, rate));
        max_rate = fmax(max_rate, rate);
        let done = rate < config.residual_tol || t >= config.t_final;
        if step.is_multiple_of(config.snapshot_stride) || done {
            series.push(t, ScalarField::new(grid.clone(), u.clone())?)?;
        }
        if rate < config.residual_tol {
            steady = true;
            break;
        }
    }
    if series.last().time < t {
        series.push(t, ScalarField::new(grid.clone(), u)?)?;
    }
    Ok(SolveResult {
        series,
        residual_history,
        steady_reached: steady,
        dt_used: fixed_dt.unwrap_or(disc.dt()),
        t_final: t,
        steps: step,
        slope_cap: disc.slope_cap(),
        max_rate,
    })
}

fn raise_cap<T: Real>(disc: &mut Discretization<'_, T>, slope: T) -> Result<()> {
    let mut cap = disc.slope_cap();
    while cap < slope {
        cap = cap + cap;
    }
    disc.set_slope_cap(cap)
}

/// Solution of `eps u_t + f H(||grad u||) = 0`, obtained from `u^eps(x, t) = u(x, t / eps)`.
///
/// One solve to `t_final / eps` is run and relabeled; snapshot times and `dt` are multiplied by
/// `eps` and residuals divided by it.
pub fn rescaled_solve<T: Real>(
    problem: &ProblemSpec<T>,
    grid: &GridSpec<T>,
    scheme: &SchemeSpec<T>,
    config: &SolveConfig<T>,
    epsilon: T,
) -> Result<SolveResult<T>> {
    if !(epsilon > T::zero()) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} must be positive")));
    }
    let mut inner = config.clone();
    inner.t_final = config.t_final / epsilon;
    let r = solve(problem, grid, scheme, &inner)?;
    Ok(SolveResult {
        series: r.series.retimed(epsilon),
        residual_history: r.residual_history.iter().map(|&(t, res)| (t * epsilon, res / epsilon)).collect(),
        steady_reached: r.steady_reached,
        dt_used: r.dt_used * epsilon,
        t_final: r.t_final * epsilon,
        steps: r.steps,
        slope_cap: r.slope_cap,
        max_rate: r.max_rate / epsilon,
    })
}

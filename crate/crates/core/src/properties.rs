//! Sampled structural properties of the discrete schemes: monotonicity, consistency, interface
//! stationarity and the comparison principle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::grid::{sample_function, GridSpec, ScalarField};
use crate::norms::NormSpec;
use crate::problem::{build_speed_field, Hamiltonian, ProblemSpec, SpeedField};
use crate::solver::{cfl_timestep, solve, Discretization, SchemeSpec, SchemeVariant, SolveConfig};

fn norms_for(variant: SchemeVariant) -> Vec<NormSpec<f64>> {
    let all = [
        NormSpec::l1(2),
        NormSpec::euclidean(2),
        NormSpec::linf(2),
        NormSpec::diagonal(&[4.0, 1.0]).expect("positive diagonal"),
        NormSpec::p(2, 3.0).expect("valid exponent"),
        NormSpec::ellipsoidal(&[vec![2.0, 0.5], vec![0.5, 1.0]]).expect("positive definite"),
    ];
    all.into_iter().filter(|n| variant == SchemeVariant::LaxFriedrichs || n.is_axis_separable()).collect()
}

fn scheme_for(variant: SchemeVariant) -> SchemeSpec<f64> {
    match variant {
        SchemeVariant::Godunov => SchemeSpec::godunov(),
        SchemeVariant::LaxFriedrichs => SchemeSpec::lax_friedrichs(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub variant: SchemeVariant,
    pub samples: usize,
    pub probes: usize,
    pub violations: usize,
    /// Largest decrease of the center update caused by raising a neighbor (0 when none).
    pub worst_decrease: f64,
    pub tol: f64,
}

/// Raises each axis neighbor of the center of random 5x5 stencil states and checks that the
/// Euler-updated center value does not decrease, with `dt` at the CFL bound.
///
/// Norm, Hamiltonian, speeds and states are drawn per sample; the slope cap covers both states.
pub fn monotonicity_sampling(variant: SchemeVariant, samples: usize, seed: u64, tol: f64) -> Result<MonotonicityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = GridSpec::<f64>::square(-1.0, 1.0, 5)?;
    let h = grid.spacing(0);
    let center = grid.index(2, 2);
    let neighbors = [grid.index(1, 2), grid.index(3, 2), grid.index(2, 1), grid.index(2, 3)];
    let norms = norms_for(variant);
    let scheme = scheme_for(variant);
    let u0 = sample_function(&grid, |p| p[0] + 0.1)?;
    let (mut probes, mut violations, mut worst) = (0, 0, 0.0f64);
    for _ in 0..samples {
        let norm = norms[rng.gen_range(0..norms.len())];
        let ham = if rng.gen_bool(0.5) {
            Hamiltonian::ShiftedLinear
        } else {
            Hamiltonian::shifted_power(rng.gen_range(1.0..3.0))?
        };
        let fvals: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let speed = SpeedField::from_field(ScalarField::new(grid.clone(), fvals)?);
        let problem = ProblemSpec::new(u0.clone(), speed, ham, norm)?;
        let slope: [f64; 2] = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let amp = rng.gen_range(0.0..2.0) * h;
        let u: Vec<f64> = (0..grid.len())
            .map(|k| {
                let p = grid.node(k);
                slope[0] * p[0] + slope[1] * p[1] + rng.gen_range(-amp..=amp)
            })
            .collect();
        let bumps: Vec<f64> = neighbors.iter().map(|_| rng.gen_range(1e-6..1.0) * h).collect();
        let probe = Discretization::new(&problem, &scheme, 1.0)?;
        let mut cap = probe.running_slope(&u);
        for (&j, &b) in neighbors.iter().zip(&bumps) {
            let mut r = u.clone();
            r[j] += b;
            cap = cap.max(probe.running_slope(&r));
        }
        let disc = Discretization::new(&problem, &scheme, cap * 1.01 + 1e-12)?;
        let dt = disc.dt();
        let base = disc.euler(&u, dt)[center];
        for (&j, &b) in neighbors.iter().zip(&bumps) {
            let mut r = u.clone();
            r[j] += b;
            let raised = disc.euler(&r, dt)[center];
            probes += 1;
            let drop = base - raised;
            if drop > tol {
                violations += 1;
            }
            worst = worst.max(drop);
        }
    }
    Ok(MonotonicityReport { variant, samples, probes, violations, worst_decrease: worst, tol })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub variant: SchemeVariant,
    /// `(h, max |H_num - f H(||grad u||)|)` at interior nodes.
    pub errors: Vec<(f64, f64)>,
    /// `error(h) / error(h/2)` for the first two rows.
    pub ratio: f64,
}

fn consistency_error(variant: SchemeVariant, norm: &NormSpec<f64>, n: usize) -> Result<(f64, f64)> {
    let grid = GridSpec::<f64>::square(-1.0, 1.0, n)?;
    let u = |p: [f64; 2]| (1.3 * p[0]).sin() * (0.7 * p[1]).cos() + 0.4 * p[0] - 0.2 * p[1];
    let grad = |p: [f64; 2]| {
        [1.3 * (1.3 * p[0]).cos() * (0.7 * p[1]).cos() + 0.4, -0.7 * (1.3 * p[0]).sin() * (0.7 * p[1]).sin() - 0.2]
    };
    let f = |p: [f64; 2]| 0.3 + 0.6 * (p[0] + 0.5 * p[1]).sin();
    let u0 = sample_function(&grid, u)?;
    let speed = SpeedField::from_field(sample_function(&grid, f)?);
    let ham = Hamiltonian::ShiftedLinear;
    let problem = ProblemSpec::new(u0.clone(), speed, ham, *norm)?;
    let disc = Discretization::new(&problem, &scheme_for(variant), 3.0)?;
    let num = disc.numerical_hamiltonian(u0.values());
    let h = grid.spacing(0);
    let err = (0..grid.len())
        .filter(|&k| grid.boundary_distance(k) > 0.5 * h)
        .map(|k| {
            let p = grid.node(k);
            (num[k] - f(p) * ham.value(norm.eval(&grad(p)))).abs()
        })
        .fold(0.0, f64::max);
    Ok((h, err))
}

/// Truncation error of the numerical Hamiltonian on a smooth state at `n` and `2n - 1` points.
pub fn consistency_ratio(variant: SchemeVariant, norm: &NormSpec<f64>, n: usize) -> Result<ConsistencyReport> {
    let coarse = consistency_error(variant, norm, n)?;
    let fine = consistency_error(variant, norm, 2 * n - 1)?;
    Ok(ConsistencyReport { variant, errors: vec![coarse, fine], ratio: coarse.1 / fine.1 })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StationarityReport {
    pub variant: SchemeVariant,
    /// Nodes with `f = 0`, times stored snapshots.
    pub checked: usize,
    /// Largest `|u(t) - u0|` over those nodes; exactly 0 when the property holds.
    pub max_change: f64,
}

/// Runs a short TVD-RK2 solve with `f` vanishing on a column and on scattered random nodes, and
/// measures how much the values at those nodes moved.
pub fn interface_stationarity(variant: SchemeVariant, seed: u64) -> Result<StationarityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = GridSpec::<f64>::square(-1.0, 1.0, 21)?;
    let (a, b, c): (f64, f64, f64) = (rng.gen_range(0.5..2.0), rng.gen_range(0.5..3.0), rng.gen_range(-1.0..1.0));
    let u0 = sample_function(&grid, |p| p[0] * (1.5 + (b * p[1]).cos()) + 0.3 * (a * p[1] + c).sin())?;
    let mut f: Vec<f64> = (0..grid.len()).map(|k| grid.node(k)[0].clamp(-1.0, 1.0) * 0.9).collect();
    for _ in 0..20 {
        f[rng.gen_range(0..grid.len())] = 0.0;
    }
    let speed = SpeedField::from_field(ScalarField::new(grid.clone(), f)?);
    let problem = ProblemSpec::new(u0.clone(), speed, Hamiltonian::ShiftedLinear, NormSpec::euclidean(2))?;
    let mut cfg = SolveConfig::new(0.5);
    cfg.snapshot_stride = 1;
    cfg.residual_tol = 1e-300;
    let r = solve(&problem, &grid, &scheme_for(variant), &cfg)?;
    let zeros: Vec<usize> = (0..grid.len()).filter(|&k| problem.speed.get(k) == 0.0).collect();
    let mut max_change = 0.0f64;
    for s in r.series.snapshots() {
        for &k in &zeros {
            max_change = max_change.max((s.field.get(k) - u0.get(k)).abs());
        }
    }
    Ok(StationarityReport { variant, checked: zeros.len() * r.series.len(), max_change })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub variant: SchemeVariant,
    pub snapshots: usize,
    /// `min (v - u)` over all nodes and snapshots.
    pub min_gap: f64,
    pub violations: usize,
    pub tol: f64,
}

/// Solves from `u0` and from a random `v0 >= u0` with the same speed and step, and checks the
/// order is kept at every snapshot.
pub fn comparison_check(variant: SchemeVariant, seed: u64, tol: f64) -> Result<ComparisonReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = GridSpec::<f64>::square(-1.5, 1.5, 31)?;
    let h = grid.spacing(0);
    let (cx, cy, r) = (rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3), rng.gen_range(0.5..0.9));
    let u0 = sample_function(&grid, |p| ((p[0] - cx).powi(2) + (p[1] - cy).powi(2) - r * r) * (1.0 + 0.3 * (2.0 * p[0]).sin()))?;
    let (bx, by, w) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.2..0.6));
    let lift: Vec<f64> = (0..grid.len())
        .map(|k| {
            let p = grid.node(k);
            0.3 * (-((p[0] - bx).powi(2) + (p[1] - by).powi(2)) / (w * w)).exp() + rng.gen_range(0.0..0.5) * h
        })
        .collect();
    let v0 = u0.zip_map(&ScalarField::new(grid.clone(), lift)?, |a, b| a + b)?;
    let speed = build_speed_field(&u0, 0.1)?;
    let norm = norms_for(variant)[rng.gen_range(0..norms_for(variant).len())];
    let pu = ProblemSpec::new(u0, speed.clone(), Hamiltonian::ShiftedLinear, norm)?;
    let pv = ProblemSpec::new(v0, speed, Hamiltonian::ShiftedLinear, norm)?;
    let scheme = scheme_for(variant);
    let dt = cfl_timestep(&pu, &scheme, &grid, 10.0)?;
    let mut cfg = SolveConfig::new(150.0 * dt);
    cfg.dt = Some(dt);
    cfg.snapshot_stride = 1;
    cfg.residual_tol = 1e-300;
    let ru = solve(&pu, &grid, &scheme, &cfg)?;
    let rv = solve(&pv, &grid, &scheme, &cfg)?;
    let mut min_gap = f64::INFINITY;
    let mut violations = 0;
    for (a, b) in ru.series.snapshots().iter().zip(rv.series.snapshots()) {
        debug_assert_eq!(a.time, b.time);
        for (x, y) in a.field.values().iter().zip(b.field.values()) {
            let gap = y - x;
            if gap < -tol {
                violations += 1;
            }
            min_gap = min_gap.min(gap);
        }
    }
    Ok(ComparisonReport { variant, snapshots: ru.series.len().min(rv.series.len()), min_gap, violations, tol })
}

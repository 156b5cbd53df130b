//! Explicit sub- and supersolutions that are frozen in time near the interface.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::ScalarField;
use crate::problem::{band_gradient_floor, AuditReport, ProblemSpec};
use crate::real::{fmax, Real};
use crate::solver::SolveResult;

pub const K1_LIMIT: f64 = 1e6;
pub const K2_SAFETY: f64 = 2.0;
const BISECTION_STEPS: usize = 60;

/// Parameters of the barrier pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BarrierSpec<T> {
    pub sigma: T,
    pub k1: T,
    pub k2: T,
    /// Scale of the witness `c u0`.
    pub c: T,
    /// Gradient floor on `{|u0| <= 2 sigma}`.
    #[serde(rename = "M")]
    pub m: T,
}

impl<T: Real> BarrierSpec<T> {
    /// `(lower, upper)` at a point where `u0 = u` and time `t`.
    pub fn eval(&self, u: T, t: T) -> (T, T) {
        let z = T::zero();
        let upper = if u < z {
            self.c * u
        } else if u <= self.sigma {
            self.k1 * u
        } else {
            let s = u - self.sigma;
            self.k1 * u * (self.k2 * t * s * s).exp()
        };
        let lower = if u > z {
            self.c * u
        } else if u >= -self.sigma {
            self.k1 * u
        } else {
            let s = u + self.sigma;
            self.k1 * u * (self.k2 * t * s * s).exp()
        };
        (lower, upper)
    }
}

/// Chooses `M = M^/2`, the widest `sigma` keeping `||grad u0|| >= M` on `{|u0| <= 2 sigma}`,
/// `k1 = max(2 k_min, 1)` with `k_min` the smallest `k` such that `H(k M) >= 0`,
/// `k2 = 2 C1 |inf_[0, P] H| / (k1 sigma^3)` and `c` from the witness scan.
///
/// `k1` is kept at least 1 so that the barriers are ordered around `u0` at `t = 0`.
pub fn choose_barrier_params<T: Real>(problem: &ProblemSpec<T>, audit: &AuditReport<T>, slope_cap: T) -> Result<BarrierSpec<T>> {
    let m_hat = audit.gradient_floor();
    if !(m_hat > T::zero()) {
        return Err(Error::InvalidParameter("barriers need a positive gradient floor".into()));
    }
    let c = match (audit.h4.witness_c, audit.h4.alpha) {
        (Some(c), Some(alpha)) if alpha < T::zero() => c,
        _ => return Err(Error::InvalidParameter("barriers need an admissible witness c u0".into())),
    };
    if !(slope_cap > T::zero()) {
        return Err(Error::InvalidParameter(format!("slope_cap {slope_cap} must be positive")));
    }
    let m = m_hat / T::lit(2.0);
    let u0 = &problem.u0;
    let grad = problem.u0_gradient_norm();
    let holds = |sigma: T| {
        let (floor, _) = band_gradient_floor(u0, &grad, sigma + sigma);
        floor >= m
    };
    let mut hi = u0.max_abs() / T::lit(2.0);
    let sigma = if holds(hi) {
        hi
    } else {
        let mut lo = T::zero();
        for _ in 0..BISECTION_STEPS {
            let mid = (lo + hi) / T::lit(2.0);
            if holds(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    if !(sigma > T::zero()) {
        return Err(Error::InvalidParameter("no band width keeps the gradient above M".into()));
    }

    let h = &problem.hamiltonian;
    let limit = T::lit(K1_LIMIT);
    let k_min = h
        .root(limit * m)
        .map(|p| p / m)
        .filter(|k| *k <= limit && h.value(*k * m) >= -T::epsilon())
        .ok_or(Error::NotCoercive(slope_cap.as_f64()))?;
    let k1 = fmax(k_min + k_min, T::one());
    let inf_h = h.infimum(slope_cap);
    let k2 = T::lit(K2_SAFETY) * problem.speed.sup_bound * inf_h.abs() / (k1 * sigma * sigma * sigma);
    Ok(BarrierSpec { sigma, k1, k2, c, m })
}

pub fn eval_barriers<T: Real>(spec: &BarrierSpec<T>, u0: &ScalarField<T>, node: usize, t: T) -> (T, T) {
    spec.eval(u0.get(node), t)
}

/// A barrier specification bound to an initial datum.
#[derive(Clone, Debug, PartialEq)]
pub struct BarrierPair<T> {
    pub spec: BarrierSpec<T>,
    pub u0: ScalarField<T>,
}

impl<T: Real> BarrierPair<T> {
    pub fn new(spec: BarrierSpec<T>, u0: ScalarField<T>) -> Self {
        Self { spec, u0 }
    }

    pub fn upper(&self, node: usize, t: T) -> T {
        self.spec.eval(self.u0.get(node), t).1
    }

    pub fn lower(&self, node: usize, t: T) -> T {
        self.spec.eval(self.u0.get(node), t).0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct SandwichReport<T> {
    pub violations: usize,
    pub checked: usize,
    /// Largest `max(lower - u, u - upper)`; positive values exceed the barriers.
    pub worst_gap: T,
    pub worst_location: Option<[T; 2]>,
    pub worst_time: Option<T>,
    pub tol: T,
    pub params: BarrierSpec<T>,
}

/// Counts nodes and snapshots where `lower - tol <= u <= upper + tol` fails.
pub fn sandwich_check<T: Real>(result: &SolveResult<T>, pair: &BarrierPair<T>, tol: T) -> Result<SandwichReport<T>> {
    if !(tol >= T::zero()) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be >= 0")));
    }
    let grid = result.series.grid();
    if grid != pair.u0.grid() {
        return Err(Error::InvalidGrid("barrier datum and trajectory live on different grids".into()));
    }
    let per_snapshot: Vec<(usize, T, usize, T)> = result
        .series
        .snapshots()
        .par_iter()
        .map(|s| {
            let mut count = 0;
            let mut worst = T::neg_infinity();
            let mut at = 0;
            for (k, &u) in s.field.values().iter().enumerate() {
                let (lo, hi) = pair.spec.eval(pair.u0.get(k), s.time);
                let gap = fmax(lo - u, u - hi);
                if gap > tol {
                    count += 1;
                }
                if gap > worst {
                    worst = gap;
                    at = k;
                }
            }
            (count, worst, at, s.time)
        })
        .collect();
    let mut report = SandwichReport {
        violations: 0,
        checked: grid.len() * result.series.len(),
        worst_gap: T::neg_infinity(),
        worst_location: None,
        worst_time: None,
        tol,
        params: pair.spec,
    };
    for (count, worst, at, time) in per_snapshot {
        report.violations += count;
        if worst > report.worst_gap {
            report.worst_gap = worst;
            report.worst_location = Some(grid.node(at));
            report.worst_time = Some(time);
        }
    }
    Ok(report)
}

//! Error measures, estimate checks and convergence studies over computed trajectories.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{central_gradient_at, GridSpec, Point, ScalarField, TimeSeries};
use crate::norms::NormSpec;
use crate::oracle::{brute_force_signed_distance, extract_interface, DistanceField, InterfaceMesh};
use crate::problem::{Generator, Hamiltonian, ProblemSpec, SpeedField};
use crate::real::{fmax, Real};
use crate::solver::{solve, SchemeSpec, SolveConfig, SolveResult};

/// Minimum distance of mask nodes from the box boundary, in grid spacings.
pub const MIN_MARGIN_CELLS: f64 = 5.0;

/// How a compact mask is built. Every present condition must hold at a node.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
pub struct MaskRecipe<T> {
    /// `[r_min, r_max]` for the Euclidean distance to `center`.
    #[serde(default)]
    pub annulus: Option<[T; 2]>,
    #[serde(default)]
    pub center: Option<[T; 2]>,
    /// Drop nodes with `|u0| <= exclude_band`.
    #[serde(default)]
    pub exclude_band: Option<T>,
    /// Distance to the box boundary; defaults to (and may not be below) five spacings.
    #[serde(default)]
    pub margin: Option<T>,
}

impl<T: Real> MaskRecipe<T> {
    pub fn annulus(r_min: T, r_max: T) -> Self {
        Self { annulus: Some([r_min, r_max]), ..Self::default() }
    }

    pub fn interior() -> Self {
        Self::default()
    }

    pub fn excluding_band(mut self, width: T) -> Self {
        self.exclude_band = Some(width);
        self
    }
}

/// A node subset standing in for a compact set.
#[derive(Clone, Debug, PartialEq)]
pub struct CompactMask<T> {
    pub nodes: Vec<bool>,
    pub recipe: MaskRecipe<T>,
    pub margin: T,
    grid: GridSpec<T>,
}

impl<T: Real> CompactMask<T> {
    /// Builds the mask on `grid`. `u0` is required when the recipe excludes a band.
    pub fn build(recipe: &MaskRecipe<T>, grid: &GridSpec<T>, u0: Option<&ScalarField<T>>) -> Result<Self> {
        let min_margin = T::lit(MIN_MARGIN_CELLS) * grid.max_spacing();
        let margin = recipe.margin.unwrap_or(min_margin);
        // tolerate rounding in margins given as multiples of h
        if margin < min_margin * (T::one() - T::lit(1e-9)) {
            return Err(Error::InvalidParameter(format!("mask margin {margin} is below five grid spacings ({min_margin})")));
        }
        if let Some([a, b]) = recipe.annulus {
            if !(a >= T::zero() && b >= a) {
                return Err(Error::InvalidParameter(format!("annulus radii [{a}, {b}] are not ordered")));
            }
        }
        if recipe.exclude_band.is_some() && u0.is_none() {
            return Err(Error::InvalidParameter("band exclusion needs u0".into()));
        }
        if let Some(u) = u0 {
            if u.grid() != grid {
                return Err(Error::InvalidGrid("u0 lives on a different grid than the mask".into()));
            }
        }
        let center = recipe.center.unwrap_or([T::zero(); 2]);
        let nodes = (0..grid.len())
            .map(|k| {
                let p = grid.node(k);
                let inside = recipe.annulus.is_none_or(|[a, b]| {
                    let r = (p[0] - center[0]).hypot(p[1] - center[1]);
                    r >= a && r <= b
                });
                let off_band = match (recipe.exclude_band, u0) {
                    (Some(w), Some(u)) => u.get(k).abs() > w,
                    _ => true,
                };
                inside && off_band && grid.boundary_distance(k) >= margin
            })
            .collect::<Vec<_>>();
        Ok(Self { nodes, recipe: recipe.clone(), margin, grid: grid.clone() })
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn count(&self) -> usize {
        self.nodes.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn contains(&self, k: usize) -> bool {
        self.nodes[k]
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| k)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct ErrorReport<T> {
    pub sup_error: T,
    /// Mean absolute error over the mask.
    pub l1_error: T,
    pub node_of_max: Point<T>,
    pub time: T,
}

/// Max and mean of `|u - d|` over the mask.
pub fn sup_error_on_compact<T: Real>(u: &ScalarField<T>, d: &DistanceField<T>, mask: &CompactMask<T>, time: T) -> Result<ErrorReport<T>> {
    field_error(u, &d.values, mask, time)
}

fn field_error<T: Real>(u: &ScalarField<T>, d: &ScalarField<T>, mask: &CompactMask<T>, time: T) -> Result<ErrorReport<T>> {
    if u.grid() != d.grid() || u.grid() != mask.grid() {
        return Err(Error::InvalidGrid("error fields and mask live on different grids".into()));
    }
    let mut sup = T::zero();
    let mut at = None;
    let mut sum = T::zero();
    let mut count = 0usize;
    for k in mask.indices() {
        let e = (u.get(k) - d.get(k)).abs();
        sum = sum + e;
        count += 1;
        if at.is_none() || e > sup {
            sup = e;
            at = Some(k);
        }
    }
    let at = at.ok_or(Error::EmptyMask)?;
    Ok(ErrorReport { sup_error: sup, l1_error: sum / T::from_usize_lossy(count), node_of_max: u.grid().node(at), time })
}

/// `(time, sup error)` for every snapshot.
pub fn error_curve<T: Real>(series: &TimeSeries<T>, d: &DistanceField<T>, mask: &CompactMask<T>) -> Result<Vec<(T, T)>> {
    series
        .snapshots()
        .par_iter()
        .map(|s| field_error(&s.field, &d.values, mask, s.time).map(|r| (s.time, r.sup_error)))
        .collect()
}

/// Per-snapshot Euclidean Hausdorff distance between the extracted interface and `reference`.
///
/// Snapshots without a sign change report `+inf`.
pub fn interface_drift<T: Real>(series: &TimeSeries<T>, reference: &InterfaceMesh<T>) -> Vec<(T, T)> {
    series
        .snapshots()
        .par_iter()
        .map(|s| {
            let drift = match extract_interface(&s.field, T::zero()) {
                Ok(mesh) => mesh.hausdorff(reference),
                Err(_) => T::infinity(),
            };
            (s.time, drift)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct GradientStats<T> {
    pub median: T,
    pub p95: T,
    pub count: usize,
}

/// Nearest-rank quantile of sorted data.
fn quantile<T: Real>(sorted: &[T], q: f64) -> T {
    let n = sorted.len();
    let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
    sorted[rank - 1]
}

/// Median and 95th percentile of `| ||grad u|| - 1 |` over the mask (central differences).
pub fn gradient_unit_deviation<T: Real>(u: &ScalarField<T>, norm: &NormSpec<T>, mask: &CompactMask<T>) -> Result<GradientStats<T>> {
    if u.grid() != mask.grid() {
        return Err(Error::InvalidGrid("field and mask live on different grids".into()));
    }
    let mut dev: Vec<T> = mask
        .indices()
        .map(|k| (norm.eval(&central_gradient_at(u.values(), u.grid(), k)) - T::one()).abs())
        .collect();
    if dev.is_empty() {
        return Err(Error::EmptyMask);
    }
    dev.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite deviations"));
    Ok(GradientStats { median: quantile(&dev, 0.5), p95: quantile(&dev, 0.95), count: dev.len() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct AprioriReport<T> {
    /// `max |u(t_{i+1}) - u(t_i)| / (t_{i+1} - t_i)` over consecutive snapshots.
    pub c_t: T,
    /// `C1 * max_{p <= slope_cap} |H(p)|`.
    pub c_t_bound: T,
    pub tol: T,
    pub c_t_within_bound: bool,
    /// Mask nodes and snapshots where `||grad u|| |f| > c_t + tol`.
    pub gradient_violations: usize,
    pub gradient_checked: usize,
    pub worst_gradient_excess: T,
    /// `(time, max |u|)` over the mask.
    pub boundedness_trace: Vec<(T, T)>,
}

/// The uniform-in-time estimates on one trajectory.
///
/// The gradient bound is checked on the nodes of `mask`, which should exclude the interface band.
pub fn apriori_checks<T: Real>(
    result: &SolveResult<T>,
    speed: &SpeedField<T>,
    hamiltonian: &Hamiltonian<T>,
    norm: &NormSpec<T>,
    slope_cap: T,
    mask: &CompactMask<T>,
    tol: T,
) -> Result<AprioriReport<T>> {
    let snaps = result.series.snapshots();
    if snaps.len() < 2 {
        return Err(Error::InvalidParameter("a priori checks need at least two snapshots".into()));
    }
    let grid = result.series.grid();
    if speed.values.grid() != grid || mask.grid() != grid {
        return Err(Error::InvalidGrid("trajectory, speed and mask live on different grids".into()));
    }
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    let c_t = snaps
        .par_windows(2)
        .map(|w| {
            let dt = w[1].time - w[0].time;
            let du = w[0].field.values().iter().zip(w[1].field.values()).map(|(a, b)| (*b - *a).abs()).fold(T::zero(), fmax);
            du / dt
        })
        .reduce(T::zero, fmax);
    let c_t_bound = speed.sup_bound * hamiltonian.max_abs(slope_cap);
    let idx: Vec<usize> = mask.indices().collect();
    let per_snap: Vec<(usize, T, T)> = snaps
        .par_iter()
        .map(|s| {
            let mut count = 0;
            let mut worst = T::neg_infinity();
            let mut umax = T::zero();
            for &k in &idx {
                let g = norm.eval(&central_gradient_at(s.field.values(), grid, k));
                let excess = g * speed.get(k).abs() - c_t;
                if excess > tol {
                    count += 1;
                }
                worst = fmax(worst, excess);
                umax = fmax(umax, s.field.get(k).abs());
            }
            (count, worst, umax)
        })
        .collect();
    Ok(AprioriReport {
        c_t,
        c_t_bound,
        tol,
        c_t_within_bound: c_t <= c_t_bound + tol,
        gradient_violations: per_snap.iter().map(|p| p.0).sum(),
        gradient_checked: idx.len() * snaps.len(),
        worst_gradient_excess: per_snap.iter().map(|p| p.1).fold(T::neg_infinity(), fmax),
        boundedness_trace: snaps.iter().zip(&per_snap).map(|(s, p)| (s.time, p.2)).collect(),
    })
}

/// An analytic problem that can be sampled at any resolution on a fixed box.
#[derive(Clone)]
pub struct ProblemFamily<T> {
    pub generator: Generator<T>,
    pub delta: T,
    pub hamiltonian: Hamiltonian<T>,
    pub norm: NormSpec<T>,
    /// `(min, max)` per axis.
    pub bounds: Vec<(T, T)>,
}

impl<T: Real> std::fmt::Debug for ProblemFamily<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemFamily")
            .field("delta", &self.delta)
            .field("hamiltonian", &self.hamiltonian)
            .field("norm", &self.norm)
            .field("bounds", &self.bounds)
            .finish()
    }
}

impl<T: Real> ProblemFamily<T> {
    pub fn grid(&self, points: usize) -> Result<GridSpec<T>> {
        match self.bounds.as_slice() {
            [(a, b)] => GridSpec::new_1d(*a, *b, points),
            [x, y] => GridSpec::new_2d(*x, *y, points, points),
            _ => Err(Error::InvalidGrid(format!("{} axes given, expected 1 or 2", self.bounds.len()))),
        }
    }

    pub fn instantiate(&self, points: usize) -> Result<ProblemSpec<T>> {
        ProblemSpec::regularized(&self.grid(points)?, self.generator.clone(), self.delta, self.hamiltonian, self.norm)
    }
}

/// Solves one instance and measures the final sup-error against the brute-force distance.
pub fn pipeline_error<T: Real>(
    problem: &ProblemSpec<T>,
    scheme: &SchemeSpec<T>,
    config: &SolveConfig<T>,
    recipe: &MaskRecipe<T>,
) -> Result<(SolveResult<T>, DistanceField<T>, ErrorReport<T>)> {
    let grid = problem.grid();
    let result = solve(problem, grid, scheme, config)?;
    let mesh = extract_interface(&problem.u0, T::zero())?;
    let d = brute_force_signed_distance(&mesh, grid, &problem.norm.dual(), &problem.u0)?;
    let mask = CompactMask::build(recipe, grid, Some(&problem.u0))?;
    let last = result.series.last();
    let report = sup_error_on_compact(&last.field, &d, &mask, last.time)?;
    Ok((result, d, report))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct RefinementRow<T> {
    pub points: usize,
    pub h: T,
    pub sup_error: Option<T>,
    /// `log2(e(previous h) / e(h))`, from the previous row.
    pub observed_order: Option<T>,
    pub failure: Option<String>,
}

/// Reruns the pipeline at each resolution; a failing run leaves its row with a failure note.
pub fn refinement_study<T: Real>(
    family: &ProblemFamily<T>,
    resolutions: &[usize],
    scheme: &SchemeSpec<T>,
    config: &SolveConfig<T>,
    recipe: &MaskRecipe<T>,
) -> Result<Vec<RefinementRow<T>>> {
    if resolutions.len() < 3 {
        return Err(Error::InvalidParameter("a refinement study needs at least three resolutions".into()));
    }
    let hs = resolutions.iter().map(|&n| family.grid(n).map(|g| g.max_spacing())).collect::<Result<Vec<T>>>()?;
    for w in hs.windows(2) {
        let ratio = w[0] / w[1];
        if !(ratio > T::lit(1.9) && ratio < T::lit(2.1)) {
            return Err(Error::InvalidParameter(format!("resolutions must halve h (ratio {ratio})")));
        }
    }
    let mut rows: Vec<RefinementRow<T>> = Vec::new();
    for (&n, &h) in resolutions.iter().zip(&hs) {
        let outcome = family.instantiate(n).and_then(|p| pipeline_error(&p, scheme, config, recipe));
        let (sup_error, failure) = match outcome {
            Ok((_, _, rep)) => (Some(rep.sup_error), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let observed_order = match (rows.last().and_then(|r| r.sup_error), sup_error) {
            (Some(prev), Some(cur)) => Some((prev / cur).log2()),
            _ => None,
        };
        rows.push(RefinementRow { points: n, h, sup_error, observed_order, failure });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct RescaleRow<T> {
    pub epsilon: T,
    /// `1 / epsilon`, the unscaled time holding `u^eps(., 1)`.
    pub requested_time: T,
    pub snapshot_time: T,
    pub time_offset: T,
    pub sup_error: T,
}

/// `sup_K |u^eps(., 1) - d|` for each `epsilon`, read from one unscaled trajectory.
///
/// When the run stopped early at a steady state, later times use its last snapshot.
pub fn rescale_convergence<T: Real>(
    result: &SolveResult<T>,
    d: &DistanceField<T>,
    mask: &CompactMask<T>,
    epsilons: &[T],
) -> Result<Vec<RescaleRow<T>>> {
    let slack = T::lit(1e-9) * fmax(result.t_final, T::one());
    epsilons
        .iter()
        .map(|&eps| {
            if !(eps > T::zero()) {
                return Err(Error::InvalidParameter(format!("epsilon {eps} must be positive")));
            }
            let requested = eps.recip();
            if requested > result.t_final + slack && !result.steady_reached {
                return Err(Error::TimeOutOfRange { requested: requested.as_f64() });
            }
            let snap = result.series.nearest(requested);
            let rep = sup_error_on_compact(&snap.field, d, mask, snap.time)?;
            Ok(RescaleRow {
                epsilon: eps,
                requested_time: requested,
                snapshot_time: snap.time,
                time_offset: (snap.time - requested).abs(),
                sup_error: rep.sup_error,
            })
        })
        .collect()
}

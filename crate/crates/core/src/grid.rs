//! Cartesian grids in one and two dimensions, fields sampled on them and the finite differences
//! every other module is built on.
//!
//! Storage is row-major: in 2D the flat index of node `(ix, iy)` is `iy * nx + ix`, so a "row" is
//! a line of constant `y`. One-dimensional grids use the same containers; their points carry a
//! zero second coordinate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::NormSpec;
use crate::real::Real;

/// A point of the computational domain. In 1D the second coordinate is zero.
pub type Point<T> = [T; 2];

/// One closed coordinate interval sampled by `points` equispaced nodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis<T> {
    pub min: T,
    pub max: T,
    pub points: usize,
}

impl<T: Real> Axis<T> {
    pub fn new(min: T, max: T, points: usize) -> Self {
        Self { min, max, points }
    }

    #[inline]
    pub fn spacing(&self) -> T {
        (self.max - self.min) / T::from_usize_lossy(self.points - 1)
    }

    #[inline]
    pub fn coord(&self, i: usize) -> T {
        self.min + T::from_usize_lossy(i) * self.spacing()
    }
}

/// A uniform tensor grid of dimension 1 or 2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<T> {
    axes: Vec<Axis<T>>,
}

impl<T: Real> GridSpec<T> {
    pub fn from_axes(axes: Vec<Axis<T>>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::InvalidGrid(format!("dimension {} not in {{1, 2}}", axes.len())));
        }
        for (a, axis) in axes.iter().enumerate() {
            if axis.points < 3 {
                return Err(Error::InvalidGrid(format!(
                    "axis {a} has {} points, need at least 3",
                    axis.points
                )));
            }
            if !(axis.min.is_finite() && axis.max.is_finite()) || axis.max <= axis.min {
                return Err(Error::InvalidGrid(format!(
                    "axis {a} bounds [{}, {}] are not an increasing finite interval",
                    axis.min, axis.max
                )));
            }
            if !(axis.spacing() > T::zero()) {
                return Err(Error::InvalidGrid(format!("axis {a} has zero spacing")));
            }
        }
        Ok(Self { axes })
    }

    pub fn new_1d(min: T, max: T, points: usize) -> Result<Self> {
        Self::from_axes(vec![Axis::new(min, max, points)])
    }

    pub fn new_2d(x: (T, T), y: (T, T), nx: usize, ny: usize) -> Result<Self> {
        Self::from_axes(vec![Axis::new(x.0, x.1, nx), Axis::new(y.0, y.1, ny)])
    }

    /// Square grid `[min, max]^2` with `points` nodes per axis.
    pub fn square(min: T, max: T, points: usize) -> Result<Self> {
        Self::new_2d((min, max), (min, max), points, points)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis<T>] {
        &self.axes
    }

    #[inline]
    pub fn axis(&self, a: usize) -> &Axis<T> {
        &self.axes[a]
    }

    #[inline]
    pub fn points(&self, a: usize) -> usize {
        self.axes.get(a).map_or(1, |ax| ax.points)
    }

    #[inline]
    pub fn spacing(&self, a: usize) -> T {
        self.axes[a].spacing()
    }

    pub fn min_spacing(&self) -> T {
        self.axes
            .iter()
            .map(Axis::spacing)
            .fold(T::infinity(), |m, h| if h < m { h } else { m })
    }

    pub fn max_spacing(&self) -> T {
        self.axes
            .iter()
            .map(Axis::spacing)
            .fold(T::zero(), |m, h| if h > m { h } else { m })
    }

    /// Number of nodes.
    #[inline]
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat index stride along `axis`.
    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        if axis == 0 {
            1
        } else {
            self.axes[0].points
        }
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.axes[0].points + ix
    }

    /// Per-axis integer coordinates of a flat index (the second is 0 in 1D).
    #[inline]
    pub fn multi_index(&self, k: usize) -> [usize; 2] {
        let nx = self.axes[0].points;
        [k % nx, k / nx]
    }

    #[inline]
    pub fn node(&self, k: usize) -> Point<T> {
        let [ix, iy] = self.multi_index(k);
        let x = self.axes[0].coord(ix);
        let y = if self.dim() == 2 { self.axes[1].coord(iy) } else { T::zero() };
        [x, y]
    }

    /// Smallest distance, in length units, from node `k` to the boundary of the box.
    pub fn boundary_distance(&self, k: usize) -> T {
        let idx = self.multi_index(k);
        let mut best = T::infinity();
        for (a, axis) in self.axes.iter().enumerate() {
            let cells = idx[a].min(axis.points - 1 - idx[a]);
            let d = T::from_usize_lossy(cells) * axis.spacing();
            if d < best {
                best = d;
            }
        }
        best
    }

    /// Index of the node mirrored across the center of `axis`.
    pub fn mirror_index(&self, k: usize, axis: usize) -> usize {
        let mut idx = self.multi_index(k);
        idx[axis] = self.axes[axis].points - 1 - idx[axis];
        self.index(idx[0], idx[1])
    }

    /// Whether `p` lies in the closed box (with a small relative slack for rounding).
    pub fn contains(&self, p: &Point<T>) -> bool {
        self.axes.iter().enumerate().all(|(a, ax)| {
            let slack = ax.spacing() * T::lit(1e-9);
            p[a] >= ax.min - slack && p[a] <= ax.max + slack
        })
    }
}

/// Values of a real function at every node of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField<T> {
    grid: GridSpec<T>,
    values: Vec<T>,
}

impl<T: Real> ScalarField<T> {
    /// Wraps values, rejecting a length mismatch or any non-finite entry.
    pub fn new(grid: GridSpec<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "field has {} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(non_finite(&grid, k, values[k]));
        }
        Ok(Self { grid, values })
    }

    /// Skips the finiteness scan; callers guarantee the invariant.
    pub(crate) fn from_parts(grid: GridSpec<T>, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn constant(grid: GridSpec<T>, value: T) -> Self {
        let n = grid.len();
        Self { grid, values: vec![value; n] }
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    #[inline]
    pub fn get(&self, k: usize) -> T {
        self.values[k]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::InvalidGrid("fields live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::new(self.grid.clone(), values)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| if v.abs() > m { v.abs() } else { m })
    }

    pub fn min_value(&self) -> T {
        self.values.iter().fold(T::infinity(), |m, &v| if v < m { v } else { m })
    }

    pub fn max_value(&self) -> T {
        self.values.iter().fold(T::neg_infinity(), |m, &v| if v > m { v } else { m })
    }

    /// Whether the field takes both strictly positive and strictly negative values.
    pub fn changes_sign(&self) -> bool {
        self.min_value() < T::zero() && self.max_value() > T::zero()
    }

    /// The field reflected across the center of `axis`.
    pub fn mirrored(&self, axis: usize) -> Self {
        let values = (0..self.len()).map(|k| self.values[self.grid.mirror_index(k, axis)]).collect();
        Self::from_parts(self.grid.clone(), values)
    }
}

fn non_finite<T: Real>(grid: &GridSpec<T>, k: usize, value: T) -> Error {
    let p = grid.node(k);
    Error::NonFinite { coord: p[..grid.dim()].iter().map(|c| c.as_f64()).collect(), value: value.as_f64() }
}

/// One stored state `u(., time)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot<T> {
    pub time: T,
    pub field: ScalarField<T>,
}

/// A trajectory `t -> u(., t)` sampled at strictly increasing times, all on one grid.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TimeSeries<T> {
    snapshots: Vec<Snapshot<T>>,
}

impl<T: Real> TimeSeries<T> {
    /// Starts a series at time 0 with the initial data.
    pub fn starting_with(initial: ScalarField<T>) -> Self {
        Self { snapshots: vec![Snapshot { time: T::zero(), field: initial }] }
    }

    pub fn push(&mut self, time: T, field: ScalarField<T>) -> Result<()> {
        let last = self.snapshots.last().expect("series starts at time 0");
        if !(time > last.time) {
            return Err(Error::InvalidParameter(format!(
                "snapshot time {time} does not exceed previous time {}",
                last.time
            )));
        }
        if field.grid() != last.field.grid() {
            return Err(Error::InvalidGrid("snapshot grid differs from the series grid".into()));
        }
        self.snapshots.push(Snapshot { time, field });
        Ok(())
    }

    pub fn snapshots(&self) -> &[Snapshot<T>] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn first(&self) -> &Snapshot<T> {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &Snapshot<T> {
        self.snapshots.last().expect("series is never empty")
    }

    pub fn grid(&self) -> &GridSpec<T> {
        self.first().field.grid()
    }

    /// Snapshot whose time is closest to `t` (earlier wins ties).
    pub fn nearest(&self, t: T) -> &Snapshot<T> {
        let i = self.snapshots.partition_point(|s| s.time < t);
        match (i.checked_sub(1), self.snapshots.get(i)) {
            (Some(j), Some(after)) => {
                let before = &self.snapshots[j];
                if (after.time - t) < (t - before.time) {
                    after
                } else {
                    before
                }
            }
            (Some(j), None) => &self.snapshots[j],
            (None, Some(after)) => after,
            (None, None) => unreachable!("series is never empty"),
        }
    }

    /// Multiplies every time label by `factor`.
    pub fn retimed(&self, factor: T) -> Self {
        Self {
            snapshots: self
                .snapshots
                .iter()
                .map(|s| Snapshot { time: s.time * factor, field: s.field.clone() })
                .collect(),
        }
    }
}

/// Samples `f` at every node. A non-finite sample is rejected with its coordinate.
pub fn sample_function<T: Real>(grid: &GridSpec<T>, f: impl Fn(Point<T>) -> T) -> Result<ScalarField<T>> {
    let mut values = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let v = f(grid.node(k));
        if !v.is_finite() {
            return Err(non_finite(grid, k, v));
        }
        values.push(v);
    }
    Ok(ScalarField::from_parts(grid.clone(), values))
}

/// Backward and forward differences of node `k` along `axis`, with one-sided copies at the edges.
#[inline(always)]
pub(crate) fn one_sided_at<T: Real>(values: &[T], grid: &GridSpec<T>, k: usize, axis: usize) -> (T, T) {
    let n = grid.points(axis);
    let s = grid.stride(axis);
    let i = grid.multi_index(k)[axis];
    let h = grid.spacing(axis);
    let u = values[k];
    let dm = if i > 0 { Some((u - values[k - s]) / h) } else { None };
    let dp = if i + 1 < n { Some((values[k + s] - u) / h) } else { None };
    match (dm, dp) {
        (Some(m), Some(p)) => (m, p),
        (None, Some(p)) => (p, p),
        (Some(m), None) => (m, m),
        (None, None) => unreachable!("axes have at least 3 points"),
    }
}

/// Backward (`D-`) and forward (`D+`) difference fields along `axis`.
pub fn one_sided_differences<T: Real>(field: &ScalarField<T>, axis: usize) -> Result<(ScalarField<T>, ScalarField<T>)> {
    let grid = field.grid();
    if axis >= grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), got: axis + 1 });
    }
    let (dm, dp): (Vec<T>, Vec<T>) = (0..grid.len()).map(|k| one_sided_at(field.values(), grid, k, axis)).unzip();
    Ok((ScalarField::from_parts(grid.clone(), dm), ScalarField::from_parts(grid.clone(), dp)))
}

/// Central-difference gradient at node `k` (one-sided on the box edges).
#[inline]
pub(crate) fn central_gradient_at<T: Real>(values: &[T], grid: &GridSpec<T>, k: usize) -> [T; 2] {
    let mut g = [T::zero(); 2];
    for (a, ga) in g.iter_mut().enumerate().take(grid.dim()) {
        let n = grid.points(a);
        let s = grid.stride(a);
        let i = grid.multi_index(k)[a];
        let h = grid.spacing(a);
        *ga = if i == 0 {
            (values[k + s] - values[k]) / h
        } else if i + 1 == n {
            (values[k] - values[k - s]) / h
        } else {
            (values[k + s] - values[k - s]) / (h + h)
        };
    }
    g
}

/// `||grad u||` under `norm` from central differences, node by node.
pub fn central_gradient_norm<T: Real>(field: &ScalarField<T>, norm: &NormSpec<T>) -> Result<ScalarField<T>> {
    let grid = field.grid();
    if grid.dim() != norm.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), got: norm.dim() });
    }
    let values = (0..grid.len()).map(|k| norm.eval(&central_gradient_at(field.values(), grid, k))).collect();
    ScalarField::new(grid.clone(), values)
}

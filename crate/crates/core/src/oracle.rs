//! Ground-truth distances to the interface `{u0 = 0}`.
//!
//! Two independent constructions are provided: a brute-force minimization over a polygonal
//! reconstruction of the interface, and a fast-sweeping solution of `||grad phi|| = 1` built from
//! local simplex updates. Agreement between the two is what the verification suite checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, Point, ScalarField};
use crate::norms::NormSpec;
use crate::optim::{golden_section, GOLDEN_MAX_ITER, GOLDEN_TOL};
use crate::real::{fmax, fmin, Real};

pub const SWEEP_TOL: f64 = 1e-12;
pub const DEFAULT_SWEEP_CAP: usize = 100;

/// A line segment; 1D crossings and point seeds are stored as degenerate segments.
pub type Segment<T> = [Point<T>; 2];

/// Polygonal approximation of an interface: segments in 2D, crossing points in 1D.
#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceMesh<T> {
    dim: usize,
    segments: Vec<Segment<T>>,
}

impl<T: Real> InterfaceMesh<T> {
    pub fn from_segments(segments: Vec<Segment<T>>) -> Self {
        Self { dim: 2, segments }
    }

    /// Isolated points. In 1D these are crossings; in 2D they act as point sources.
    pub fn from_points(dim: usize, points: Vec<Point<T>>) -> Self {
        Self { dim, segments: points.into_iter().map(|p| [p, p]).collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn segments(&self) -> &[Segment<T>] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// In 1D, the crossing abscissae.
    pub fn points_1d(&self) -> Vec<T> {
        self.segments.iter().map(|s| s[0][0]).collect()
    }

    /// Sum of Euclidean segment lengths.
    pub fn total_length(&self) -> T {
        self.segments.iter().map(|s| (s[1][0] - s[0][0]).hypot(s[1][1] - s[0][1])).sum()
    }

    /// Euclidean distance from `p` to the nearest element.
    pub fn euclidean_distance(&self, p: &Point<T>) -> T {
        self.segments.iter().map(|s| point_segment_distance(p, s)).fold(T::infinity(), fmin)
    }

    fn sample_points(&self) -> impl Iterator<Item = Point<T>> + '_ {
        let half = T::lit(0.5);
        self.segments.iter().flat_map(move |s| {
            let mid = [(s[0][0] + s[1][0]) * half, (s[0][1] + s[1][1]) * half];
            [s[0], mid, s[1]]
        })
    }

    /// Symmetric Hausdorff distance (Euclidean) between two meshes, from element endpoints and
    /// midpoints to the other mesh's elements.
    pub fn hausdorff(&self, other: &Self) -> T {
        if self.is_empty() || other.is_empty() {
            return if self.is_empty() && other.is_empty() { T::zero() } else { T::infinity() };
        }
        if self == other {
            return T::zero();
        }
        let directed = |a: &Self, b: &Self| {
            let pts: Vec<Point<T>> = a.sample_points().collect();
            pts.par_iter().map(|p| b.euclidean_distance(p)).reduce(|| T::zero(), fmax)
        };
        fmax(directed(self, other), directed(other, self))
    }
}

/// Euclidean distance from `p` to the closed segment `s`.
pub fn point_segment_distance<T: Real>(p: &Point<T>, s: &Segment<T>) -> T {
    let (ax, ay) = (s[0][0], s[0][1]);
    let (dx, dy) = (s[1][0] - ax, s[1][1] - ay);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > T::zero() {
        fmin(fmax(((p[0] - ax) * dx + (p[1] - ay) * dy) / len2, T::zero()), T::one())
    } else {
        T::zero()
    };
    (p[0] - (ax + t * dx)).hypot(p[1] - (ay + t * dy))
}

/// A distance field together with the norm it is measured in and the interface it measures from.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceField<T> {
    pub values: ScalarField<T>,
    pub norm: NormSpec<T>,
    pub source: InterfaceMesh<T>,
    pub signed: bool,
}

#[inline]
fn crossing<T: Real>(p0: Point<T>, v0: T, p1: Point<T>, v1: T, level: T) -> Point<T> {
    let t = (level - v0) / (v1 - v0);
    [p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1])]
}

/// Reconstructs `{u0 = level}`: marching squares in 2D, linear roots in 1D.
///
/// A node counts as "above" when its value exceeds `level`. Saddle cells are split according to
/// the sign of the cell-average.
pub fn extract_interface<T: Real>(u0: &ScalarField<T>, level: T) -> Result<InterfaceMesh<T>> {
    let above = |v: T| v > level;
    let (lo, hi) = (u0.min_value(), u0.max_value());
    if !(lo <= level && hi > level) {
        return Err(Error::NoInterface);
    }
    let grid = u0.grid();
    let v = u0.values();
    if grid.dim() == 1 {
        let mut points = Vec::new();
        for i in 0..grid.points(0) - 1 {
            if above(v[i]) != above(v[i + 1]) {
                points.push(crossing(grid.node(i), v[i], grid.node(i + 1), v[i + 1], level));
            }
        }
        return Ok(InterfaceMesh::from_points(1, points));
    }

    let (nx, ny) = (grid.points(0), grid.points(1));
    let mut segments = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let k00 = grid.index(i, j);
            let k10 = grid.index(i + 1, j);
            let k01 = grid.index(i, j + 1);
            let k11 = grid.index(i + 1, j + 1);
            let (b00, b10, b01, b11) = (above(v[k00]), above(v[k10]), above(v[k01]), above(v[k11]));
            let edge = |ka: usize, kb: usize| crossing(grid.node(ka), v[ka], grid.node(kb), v[kb], level);
            // edges: bottom (00-10), right (10-11), top (01-11), left (00-01)
            let bottom = (b00 != b10).then(|| edge(k00, k10));
            let right = (b10 != b11).then(|| edge(k10, k11));
            let top = (b01 != b11).then(|| edge(k01, k11));
            let left = (b00 != b01).then(|| edge(k00, k01));
            match (bottom, right, top, left) {
                (Some(b), Some(r), Some(t), Some(l)) => {
                    let avg = (v[k00] + v[k10] + v[k01] + v[k11]) / T::lit(4.0);
                    if above(avg) == b00 {
                        // 00 and 11 joined through the center: cut off the 10 and 01 corners
                        segments.push([b, r]);
                        segments.push([t, l]);
                    } else {
                        segments.push([b, l]);
                        segments.push([r, t]);
                    }
                }
                crossings => {
                    let pts: Vec<Point<T>> =
                        [crossings.0, crossings.1, crossings.2, crossings.3].into_iter().flatten().collect();
                    if pts.len() == 2 {
                        segments.push([pts[0], pts[1]]);
                    }
                }
            }
        }
    }
    if segments.is_empty() {
        return Err(Error::NoInterface);
    }
    Ok(InterfaceMesh::from_segments(segments))
}

/// `min_t ||p - (a + t (b - a))||` over `t` in `[0, 1]`.
#[inline]
fn norm_to_segment<T: Real>(p: &Point<T>, s: &Segment<T>, norm: &NormSpec<T>) -> T {
    let d0 = [p[0] - s[0][0], p[1] - s[0][1]];
    let e = [s[1][0] - s[0][0], s[1][1] - s[0][1]];
    if e[0] == T::zero() && e[1] == T::zero() {
        return norm.eval(&d0);
    }
    golden_section(
        |t| norm.eval(&[d0[0] - t * e[0], d0[1] - t * e[1]]),
        T::zero(),
        T::one(),
        T::lit(GOLDEN_TOL),
        GOLDEN_MAX_ITER,
    )
    .1
}

/// Unsigned distance from `p` to the mesh in `norm`, with Euclidean pruning.
fn mesh_distance<T: Real>(p: &Point<T>, mesh: &InterfaceMesh<T>, norm: &NormSpec<T>, buf: &mut Vec<(T, usize)>) -> T {
    let c = norm.euclidean_lower_factor();
    buf.clear();
    buf.extend(mesh.segments.iter().enumerate().map(|(i, s)| (point_segment_distance(p, s), i)));
    buf.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).expect("finite distances"));
    let mut best = T::infinity();
    for &(d2, i) in buf.iter() {
        if c * d2 >= best {
            break;
        }
        best = fmin(best, norm_to_segment(p, &mesh.segments[i], norm));
    }
    best
}

/// Signed distance from the mesh in `norm`, evaluated by exhaustive minimization per node.
///
/// The sign is taken from `sign_source` (negative where it is negative).
pub fn brute_force_signed_distance<T: Real>(
    mesh: &InterfaceMesh<T>,
    grid: &GridSpec<T>,
    norm: &NormSpec<T>,
    sign_source: &ScalarField<T>,
) -> Result<DistanceField<T>> {
    if mesh.is_empty() {
        return Err(Error::NoInterface);
    }
    if sign_source.grid() != grid {
        return Err(Error::InvalidGrid("sign source lives on a different grid".into()));
    }
    let values: Vec<T> = (0..grid.len())
        .into_par_iter()
        .map_init(Vec::new, |buf, k| {
            let d = mesh_distance(&grid.node(k), mesh, norm, buf);
            if sign_source.get(k) < T::zero() {
                -d
            } else {
                d
            }
        })
        .collect();
    Ok(DistanceField {
        values: ScalarField::new(grid.clone(), values)?,
        norm: *norm,
        source: mesh.clone(),
        signed: true,
    })
}

/// Index ranges of nodes around an element: the corners of every cell its bounding box touches.
fn seed_range<T: Real>(grid: &GridSpec<T>, s: &Segment<T>, axis: usize) -> (usize, usize) {
    let ax = grid.axis(axis);
    let h = ax.spacing();
    let n = ax.points;
    let lo = fmin(s[0][axis], s[1][axis]);
    let hi = fmax(s[0][axis], s[1][axis]);
    let to_idx = |x: T| ((x - ax.min) / h).to_f64().unwrap_or(0.0);
    let i_lo = to_idx(lo).floor().max(0.0) as usize;
    let i_hi = (to_idx(hi).ceil().max(0.0) as usize).max(i_lo + 1);
    (i_lo.min(n - 1), i_hi.min(n - 1))
}

/// Unsigned distance from the mesh by fast sweeping on `||grad phi||_dual = 1`.
///
/// Nodes around the mesh are seeded with the exact distance and held fixed; every other node is
/// relaxed with the simplex update `min_y phi(y) + ||x - y||` over the segment joining two axis
/// neighbors, `phi` linearly interpolated. Sweeps alternate through the `2^dim` orderings until a
/// sweep changes no value by more than `1e-12`.
pub fn fast_sweeping_distance<T: Real>(
    mesh: &InterfaceMesh<T>,
    grid: &GridSpec<T>,
    norm: &NormSpec<T>,
) -> Result<DistanceField<T>> {
    fast_sweeping_distance_capped(mesh, grid, norm, DEFAULT_SWEEP_CAP)
}

pub fn fast_sweeping_distance_capped<T: Real>(
    mesh: &InterfaceMesh<T>,
    grid: &GridSpec<T>,
    norm: &NormSpec<T>,
    sweep_cap: usize,
) -> Result<DistanceField<T>> {
    if mesh.is_empty() {
        return Err(Error::NoInterface);
    }
    let n = grid.len();
    let mut phi = vec![T::infinity(); n];
    let mut fixed = vec![false; n];
    let mut buf = Vec::new();
    for s in mesh.segments() {
        let (i0, i1) = seed_range(grid, s, 0);
        let (j0, j1) = if grid.dim() == 2 { seed_range(grid, s, 1) } else { (0, 0) };
        for j in j0..=j1 {
            for i in i0..=i1 {
                let k = grid.index(i, j);
                if !fixed[k] {
                    fixed[k] = true;
                    phi[k] = mesh_distance(&grid.node(k), mesh, norm, &mut buf);
                }
            }
        }
    }

    let dim = grid.dim();
    let (nx, ny) = (grid.points(0), grid.points(1));
    let c_low = norm.euclidean_lower_factor();
    let orders: &[(bool, bool)] =
        if dim == 2 { &[(true, true), (false, true), (false, false), (true, false)] } else { &[(true, true), (false, true)] };
    let tol = T::lit(SWEEP_TOL);
    let mut residual = T::infinity();
    for sweep in 0..sweep_cap {
        let (fwd_x, fwd_y) = orders[sweep % orders.len()];
        let mut max_change = T::zero();
        for jj in 0..ny {
            let j = if fwd_y { jj } else { ny - 1 - jj };
            for ii in 0..nx {
                let i = if fwd_x { ii } else { nx - 1 - ii };
                let k = grid.index(i, j);
                if fixed[k] {
                    continue;
                }
                let old = phi[k];
                let new = simplex_update(grid, norm, &phi, i, j, old, c_low);
                if new < old {
                    phi[k] = new;
                    let change = if old.is_finite() { old - new } else { T::infinity() };
                    max_change = fmax(max_change, change);
                }
            }
        }
        residual = max_change;
        if max_change < tol {
            let values = ScalarField::new(grid.clone(), phi).map_err(|_| Error::SweepNotConverged {
                sweeps: sweep + 1,
                residual: f64::INFINITY,
            })?;
            return Ok(DistanceField { values, norm: *norm, source: mesh.clone(), signed: false });
        }
    }
    Err(Error::SweepNotConverged { sweeps: sweep_cap, residual: residual.as_f64() })
}

#[inline]
fn simplex_update<T: Real>(grid: &GridSpec<T>, norm: &NormSpec<T>, phi: &[T], i: usize, j: usize, current: T, c_low: T) -> T {
    let k = grid.index(i, j);
    let x = grid.node(k);
    let mut best = current;
    let neighbors = |axis: usize| -> [Option<usize>; 2] {
        let idx = [i, j][axis];
        let n = grid.points(axis);
        let s = grid.stride(axis);
        [(idx > 0).then(|| k - s), (idx + 1 < n).then(|| k + s)]
    };
    let xs = neighbors(0);
    // single-neighbor candidates
    let edge = |nb: usize, best: &mut T| {
        if phi[nb].is_finite() {
            let y = grid.node(nb);
            let cand = phi[nb] + norm.eval(&[x[0] - y[0], x[1] - y[1]]);
            if cand < *best {
                *best = cand;
            }
        }
    };
    for nb in xs.into_iter().flatten() {
        edge(nb, &mut best);
    }
    if grid.dim() == 1 {
        return best;
    }
    let ys = neighbors(1);
    for nb in ys.into_iter().flatten() {
        edge(nb, &mut best);
    }
    for a in xs.into_iter().flatten() {
        for b in ys.into_iter().flatten() {
            let (pa, pb) = (phi[a], phi[b]);
            if !(pa.is_finite() && pb.is_finite()) {
                continue;
            }
            let ya = grid.node(a);
            let yb = grid.node(b);
            // the candidate is at least min(phi) plus the norm-distance to the segment [ya, yb]
            let lower = fmin(pa, pb) + c_low * point_segment_distance(&x, &[ya, yb]);
            if lower >= best {
                continue;
            }
            let (_, cand) = golden_section(
                |s: T| {
                    let y = [ya[0] + s * (yb[0] - ya[0]), ya[1] + s * (yb[1] - ya[1])];
                    pa + s * (pb - pa) + norm.eval(&[x[0] - y[0], x[1] - y[1]])
                },
                T::zero(),
                T::one(),
                T::lit(GOLDEN_TOL),
                GOLDEN_MAX_ITER,
            );
            if cand < best {
                best = cand;
            }
        }
    }
    best
}

/// Largest `|phi(x) - phi(y)| / ||x - y||` over `sample_pairs` seeded random node pairs.
pub fn lipschitz_certificate<T: Real>(field: &ScalarField<T>, norm: &NormSpec<T>, sample_pairs: usize, seed: u64) -> Result<T> {
    if sample_pairs == 0 {
        return Err(Error::InvalidParameter("sample_pairs must be at least 1".into()));
    }
    let grid = field.grid();
    let n = grid.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = T::zero();
    for _ in 0..sample_pairs {
        let a = rng.gen_range(0..n);
        let mut b = rng.gen_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        let (pa, pb) = (grid.node(a), grid.node(b));
        let dist = norm.eval(&[pa[0] - pb[0], pa[1] - pb[1]]);
        best = fmax(best, (field.get(a) - field.get(b)).abs() / dist);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::sample_function;

    fn circle_field(n: usize) -> ScalarField<f64> {
        let g = GridSpec::<f64>::square(-2.0, 2.0, n).unwrap();
        sample_function(&g, |p| p[0] * p[0] + p[1] * p[1] - 1.0).unwrap()
    }

    #[test]
    fn planar_zero_set() {
        let g = GridSpec::<f64>::square(-1.0, 1.0, 21).unwrap();
        let u0 = sample_function(&g, |p| p[1]).unwrap();
        let mesh = extract_interface(&u0, 0.0).unwrap();
        let h = g.spacing(0);
        assert!((mesh.total_length() - 2.0).abs() <= h);
        assert!(mesh.segments().iter().flatten().all(|p| p[1].abs() < 1e-12));
    }

    #[test]
    fn circle_length() {
        let u0 = circle_field(201);
        let h = u0.grid().spacing(0);
        let mesh = extract_interface(&u0, 0.0).unwrap();
        let len = mesh.total_length();
        assert!((len - 2.0 * std::f64::consts::PI).abs() <= 2.0 * h, "length {len}");
        assert!(mesh.segments().iter().flatten().all(|p| u0.grid().contains(p)));
    }

    #[test]
    fn one_dimensional_root() {
        let g = GridSpec::<f64>::new_1d(-1.0, 1.0, 9).unwrap();
        let u0 = sample_function(&g, |p| p[0] - 0.25).unwrap();
        let mesh = extract_interface(&u0, 0.0).unwrap();
        assert_eq!(mesh.points_1d(), vec![0.25]);
    }

    #[test]
    fn rejects_single_signed() {
        let g = GridSpec::<f64>::square(-1.0, 1.0, 5).unwrap();
        let u0 = sample_function(&g, |p| p[0] * p[0] + 1.0).unwrap();
        assert!(matches!(extract_interface(&u0, 0.0), Err(Error::NoInterface)));
    }

    #[test]
    fn saddle_uses_cell_average() {
        let g = GridSpec::<f64>::square(0.0, 1.0, 3).unwrap();
        // one saddle cell in the lower-left: corners 00 and 11 positive
        let vals = vec![1.0, -1.0, -1.0, -1.0, 3.0, -1.0, -1.0, -1.0, -1.0];
        let mesh = extract_interface(&ScalarField::new(g.clone(), vals).unwrap(), 0.0).unwrap();
        // average 0.5 > 0 keeps the positive diagonal connected: the cell has two segments that
        // cut off the negative corners (0.5, 0) and (0, 0.5)
        let cell: Vec<_> = mesh
            .segments()
            .iter()
            .filter(|s| s.iter().all(|p| p[0] <= 0.5 + 1e-12 && p[1] <= 0.5 + 1e-12))
            .collect();
        assert_eq!(cell.len(), 2);
        for s in cell {
            let mid = [(s[0][0] + s[1][0]) / 2.0, (s[0][1] + s[1][1]) / 2.0];
            // each segment lies near one of the negative corners, not near the origin
            assert!(mid[0] + mid[1] > 0.25);
        }
    }

    #[test]
    fn brute_force_circle() {
        let u0 = circle_field(101);
        let g = u0.grid().clone();
        let h = g.spacing(0);
        let mesh = extract_interface(&u0, 0.0).unwrap();
        let d = brute_force_signed_distance(&mesh, &g, &NormSpec::euclidean(2), &u0).unwrap();
        assert!((d.values.get(g.index(100, 50)) - 1.0).abs() <= 2.0 * h);
        assert!((d.values.get(g.index(50, 50)) + 1.0).abs() <= 2.0 * h);
    }

    #[test]
    fn brute_force_linf_against_theta_scan() {
        let u0 = circle_field(101);
        let g = u0.grid().clone();
        let h = g.spacing(0);
        let mesh = extract_interface(&u0, 0.0).unwrap();
        let d = brute_force_signed_distance(&mesh, &g, &NormSpec::linf(2), &u0).unwrap();
        let scan = (0..1_000_000)
            .map(|i| {
                let th = i as f64 * std::f64::consts::TAU / 1e6;
                (2.0 - th.cos()).abs().max(th.sin().abs())
            })
            .fold(f64::INFINITY, f64::min);
        let got = d.values.get(g.index(100, 50));
        assert!((got - scan).abs() <= 2.0 * h, "{got} vs {scan}");
    }

    #[test]
    fn sweeping_planar_front() {
        let g = GridSpec::<f64>::square(-1.0, 1.0, 41).unwrap();
        let u0 = sample_function(&g, |p| p[1] + 0.013).unwrap();
        let mesh = extract_interface(&u0, 0.0).unwrap();
        let phi = fast_sweeping_distance(&mesh, &g, &NormSpec::euclidean(2)).unwrap();
        let h = g.spacing(0);
        for k in 0..g.len() {
            assert!((phi.values.get(k) - (g.node(k)[1] + 0.013).abs()).abs() <= 2.0 * h);
        }
    }

    #[test]
    fn sweeping_l1_cone() {
        let g = GridSpec::<f64>::square(-1.0, 1.0, 41).unwrap();
        let mesh = InterfaceMesh::from_points(2, vec![[0.0, 0.0]]);
        let phi = fast_sweeping_distance(&mesh, &g, &NormSpec::l1(2)).unwrap();
        let h = g.spacing(0);
        for k in 0..g.len() {
            let p = g.node(k);
            assert!((phi.values.get(k) - (p[0].abs() + p[1].abs())).abs() <= 2.0 * h);
        }
    }

    #[test]
    fn sweeping_matches_brute_force_on_circle() {
        let u0 = circle_field(81);
        let g = u0.grid().clone();
        let h = g.spacing(0);
        let mesh = extract_interface(&u0, 0.0).unwrap();
        let norm = NormSpec::euclidean(2);
        let bf = brute_force_signed_distance(&mesh, &g, &norm, &u0).unwrap();
        let fs = fast_sweeping_distance(&mesh, &g, &norm).unwrap();
        let worst = (0..g.len()).map(|k| (fs.values.get(k) - bf.values.get(k).abs()).abs()).fold(0.0, f64::max);
        assert!(worst <= 2.0 * h, "worst {worst}");
    }

    #[test]
    fn sweeping_one_dimensional() {
        let g = GridSpec::<f64>::new_1d(-1.0, 1.0, 21).unwrap();
        let u0 = sample_function(&g, |p| p[0] - 0.33).unwrap();
        let mesh = extract_interface(&u0, 0.0).unwrap();
        let phi = fast_sweeping_distance(&mesh, &g, &NormSpec::euclidean(1)).unwrap();
        for k in 0..g.len() {
            assert!((phi.values.get(k) - (g.node(k)[0] - 0.33).abs()).abs() < 1e-9);
        }
    }

    #[test]
    fn sweep_cap_reports_residual() {
        let u0 = circle_field(41);
        let mesh = extract_interface(&u0, 0.0).unwrap();
        let r = fast_sweeping_distance_capped(&mesh, u0.grid(), &NormSpec::euclidean(2), 1);
        assert!(matches!(r, Err(Error::SweepNotConverged { sweeps: 1, .. })));
    }

    #[test]
    fn certificate_examples() {
        let g = GridSpec::<f64>::square(-1.0, 1.0, 41).unwrap();
        let d = sample_function(&g, |p| (p[0] - 0.1).hypot(p[1] + 0.2)).unwrap();
        let norm = NormSpec::euclidean(2);
        let c = lipschitz_certificate(&d, &norm, 10_000, 3).unwrap();
        assert!(c <= 1.0 + 1e-9);
        let d2 = d.map(|v| 2.0 * v).unwrap();
        let c2 = lipschitz_certificate(&d2, &norm, 10_000, 3).unwrap();
        assert!((c2 - 2.0 * c).abs() < 1e-12 && c2 > 1.9);
        assert!(lipschitz_certificate(&d, &norm, 0, 3).is_err());
    }

    #[test]
    fn certificate_of_l1_brute_force() {
        let u0 = circle_field(81);
        let g = u0.grid().clone();
        let h = g.spacing(0);
        let mesh = extract_interface(&u0, 0.0).unwrap();
        // distances measured in the l-infinity dual of the l1 problem norm
        let norm = NormSpec::l1(2).dual();
        let d = brute_force_signed_distance(&mesh, &g, &norm, &u0).unwrap();
        assert!(lipschitz_certificate(&d.values, &norm, 10_000, 1).unwrap() <= 1.0 + 10.0 * h);
    }

    #[test]
    fn distance_vanishes_near_interface() {
        let u0 = circle_field(81);
        let g = u0.grid().clone();
        let h = g.spacing(0);
        let mesh = extract_interface(&u0, 0.0).unwrap();
        let d = brute_force_signed_distance(&mesh, &g, &NormSpec::euclidean(2), &u0).unwrap();
        for k in 0..g.len() {
            if mesh.euclidean_distance(&g.node(k)) <= h {
                assert!(d.values.get(k).abs() <= 2.0 * h);
            }
        }
    }

    #[test]
    fn reflection_symmetry() {
        let g = GridSpec::<f64>::square(-2.0, 2.0, 61).unwrap();
        let u0 = sample_function(&g, |p| (p[0] - 0.3).powi(2) + 2.0 * p[1] * p[1] - 1.0).unwrap();
        let mirrored = u0.mirrored(0);
        let norm = NormSpec::euclidean(2);
        let d = brute_force_signed_distance(&extract_interface(&u0, 0.0).unwrap(), &g, &norm, &u0).unwrap();
        let dm = brute_force_signed_distance(&extract_interface(&mirrored, 0.0).unwrap(), &g, &norm, &mirrored).unwrap();
        for k in 0..g.len() {
            assert!((dm.values.get(k) - d.values.get(g.mirror_index(k, 0))).abs() < 1e-12);
        }
    }

    #[test]
    fn hausdorff_examples() {
        let u0 = circle_field(101);
        let h = u0.grid().spacing(0);
        let mesh = extract_interface(&u0, 0.0).unwrap();
        assert_eq!(mesh.hausdorff(&mesh), 0.0);
        let shifted = InterfaceMesh::from_segments(
            mesh.segments().iter().map(|s| [[s[0][0] + h, s[0][1]], [s[1][0] + h, s[1][1]]]).collect(),
        );
        let hd = mesh.hausdorff(&shifted);
        assert!(hd <= h + 1e-12 && hd > 0.9 * h, "{hd}");
    }
}

//! Norms on R^n (n = 1, 2) with closed-form duals.
//!
//! `dual = sup { <x, y> : ||x|| <= 1 }`. For `p`-norms the dual is the Hölder conjugate exponent,
//! for `sqrt(v^T A v)` it is `sqrt(v^T A^-1 v)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{fmax, Real};

/// Exponent of a `p`-norm; `Infinity` is kept distinct from large finite values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent<T> {
    Finite(T),
    Infinity,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormKind<T> {
    P(Exponent<T>),
    /// Symmetric positive-definite matrix. 1D matrices `[[a]]` are stored as `diag(a, 1)`.
    Ellipsoidal([[T; 2]; 2]),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormSpec<T> {
    dim: usize,
    kind: NormKind<T>,
}

impl<T: Real> NormSpec<T> {
    pub fn p(dim: usize, p: T) -> Result<Self> {
        check_dim(dim)?;
        if p.is_infinite() && p > T::zero() {
            return Ok(Self { dim, kind: NormKind::P(Exponent::Infinity) });
        }
        if !(p >= T::one()) {
            return Err(Error::InvalidParameter(format!("p-norm exponent {p} must be >= 1")));
        }
        Ok(Self { dim, kind: NormKind::P(Exponent::Finite(p)) })
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::p(dim, T::lit(2.0)).expect("valid dimension")
    }

    pub fn l1(dim: usize) -> Self {
        Self::p(dim, T::one()).expect("valid dimension")
    }

    pub fn linf(dim: usize) -> Self {
        Self::p(dim, T::infinity()).expect("valid dimension")
    }

    /// `sqrt(v^T A v)` for a symmetric positive-definite `A` given as rows (1x1 or 2x2).
    pub fn ellipsoidal(a: &[Vec<T>]) -> Result<Self> {
        let dim = a.len();
        check_dim(dim)?;
        if a.iter().any(|row| row.len() != dim) {
            return Err(Error::InvalidParameter("ellipsoidal matrix must be square".into()));
        }
        if a.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("ellipsoidal matrix has non-finite entries".into()));
        }
        let m = if dim == 1 {
            [[a[0][0], T::zero()], [T::zero(), T::one()]]
        } else {
            // symmetry up to a relative rounding slack
            let scale = fmax(a[0][1].abs(), a[1][0].abs());
            if (a[0][1] - a[1][0]).abs() > T::lit(1e-12) * fmax(scale, T::one()) {
                return Err(Error::InvalidParameter("ellipsoidal matrix must be symmetric".into()));
            }
            let off = (a[0][1] + a[1][0]) / T::lit(2.0);
            [[a[0][0], off], [off, a[1][1]]]
        };
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if !(m[0][0] > T::zero() && det > T::zero()) {
            return Err(Error::InvalidParameter("ellipsoidal matrix must be positive definite".into()));
        }
        Ok(Self { dim, kind: NormKind::Ellipsoidal(m) })
    }

    pub fn diagonal(diag: &[T]) -> Result<Self> {
        let rows: Vec<Vec<T>> = (0..diag.len())
            .map(|i| (0..diag.len()).map(|j| if i == j { diag[i] } else { T::zero() }).collect())
            .collect();
        Self::ellipsoidal(&rows)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &NormKind<T> {
        &self.kind
    }

    /// The matrix rows as given by the user (1x1 in 1D), if ellipsoidal.
    pub fn matrix(&self) -> Option<Vec<Vec<T>>> {
        match self.kind {
            NormKind::Ellipsoidal(m) if self.dim == 1 => Some(vec![vec![m[0][0]]]),
            NormKind::Ellipsoidal(m) => Some(vec![m[0].to_vec(), m[1].to_vec()]),
            NormKind::P(_) => None,
        }
    }

    /// Norm of `v`; only the first `dim` components are read.
    #[inline]
    pub fn eval(&self, v: &[T; 2]) -> T {
        let x = v[0];
        let y = if self.dim == 2 { v[1] } else { T::zero() };
        match self.kind {
            NormKind::P(Exponent::Infinity) => fmax(x.abs(), y.abs()),
            NormKind::P(Exponent::Finite(p)) => {
                if p == T::one() {
                    x.abs() + y.abs()
                } else if p == T::lit(2.0) {
                    x.hypot(y)
                } else {
                    let m = fmax(x.abs(), y.abs());
                    if m == T::zero() {
                        return T::zero();
                    }
                    let (a, b) = (x.abs() / m, y.abs() / m);
                    m * (a.powf(p) + b.powf(p)).powf(p.recip())
                }
            }
            NormKind::Ellipsoidal(a) => {
                let q = a[0][0] * x * x + (a[0][1] + a[1][0]) * x * y + a[1][1] * y * y;
                fmax(q, T::zero()).sqrt()
            }
        }
    }

    /// The dual norm.
    pub fn dual(&self) -> Self {
        let kind = match self.kind {
            NormKind::P(Exponent::Infinity) => NormKind::P(Exponent::Finite(T::one())),
            NormKind::P(Exponent::Finite(p)) if p == T::one() => NormKind::P(Exponent::Infinity),
            NormKind::P(Exponent::Finite(p)) => NormKind::P(Exponent::Finite(p / (p - T::one()))),
            NormKind::Ellipsoidal(a) => {
                let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
                NormKind::Ellipsoidal([[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]])
            }
        };
        Self { dim: self.dim, kind }
    }

    /// Whether axis-wise Godunov upwinding is valid: `p` in {1, 2, inf} or a diagonal matrix.
    pub fn is_axis_separable(&self) -> bool {
        match self.kind {
            NormKind::P(Exponent::Infinity) => true,
            NormKind::P(Exponent::Finite(p)) => p == T::one() || p == T::lit(2.0),
            NormKind::Ellipsoidal(a) => a[0][1] == T::zero() && a[1][0] == T::zero(),
        }
    }

    /// `||e_axis||`, the Lipschitz constant of the norm along one coordinate.
    pub fn axis_norm(&self, axis: usize) -> T {
        let mut e = [T::zero(); 2];
        e[axis] = T::one();
        self.eval(&e)
    }

    /// A constant `c > 0` with `||v|| >= c |v|_2` for every `v`.
    pub fn euclidean_lower_factor(&self) -> T {
        let n = T::from_usize_lossy(self.dim);
        match self.kind {
            NormKind::P(Exponent::Infinity) => n.sqrt().recip(),
            NormKind::P(Exponent::Finite(p)) if p <= T::lit(2.0) => T::one(),
            NormKind::P(Exponent::Finite(p)) => n.powf(p.recip() - T::lit(0.5)),
            NormKind::Ellipsoidal(a) => {
                if self.dim == 1 {
                    return a[0][0].sqrt();
                }
                let tr = a[0][0] + a[1][1];
                let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
                let disc = fmax(tr * tr / T::lit(4.0) - det, T::zero()).sqrt();
                let lmin = tr / T::lit(2.0) - disc;
                // shrunk slightly so rounding never makes the bound exceed the norm
                (fmax(lmin, T::zero())).sqrt() * (T::one() - T::lit(1e-9))
            }
        }
    }

    pub fn to_config(&self) -> NormConfig {
        match self.kind {
            NormKind::P(Exponent::Infinity) => NormConfig::P { p: PValue::Named("inf".into()), dim: Some(self.dim) },
            NormKind::P(Exponent::Finite(p)) => NormConfig::P { p: PValue::Number(p.as_f64()), dim: Some(self.dim) },
            NormKind::Ellipsoidal(_) => NormConfig::Ellipsoidal {
                a: self.matrix().unwrap().iter().map(|r| r.iter().map(|v| v.as_f64()).collect()).collect(),
            },
        }
    }

    /// Builds a norm from its config form; `dim` applies when the config does not fix one.
    pub fn from_config(config: &NormConfig, dim: usize) -> Result<Self> {
        match config {
            NormConfig::P { p, dim: d } => {
                let d = d.unwrap_or(dim);
                if d != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: d });
                }
                let p = match p {
                    PValue::Number(p) => T::lit(*p),
                    PValue::Named(s) if s == "inf" || s == "infinity" => T::infinity(),
                    PValue::Named(s) => return Err(Error::Config(format!("unknown p-norm exponent {s:?}"))),
                };
                Self::p(d, p)
            }
            NormConfig::Ellipsoidal { a } => {
                if a.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: a.len() });
                }
                let rows: Vec<Vec<T>> = a.iter().map(|r| r.iter().map(|&v| T::lit(v)).collect()).collect();
                Self::ellipsoidal(&rows)
            }
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 1 || dim == 2 {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: 2, got: dim })
    }
}

/// `p` as it appears in config files: a number, or `"inf"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PValue {
    Number(f64),
    Named(String),
}

/// File representation: `{"type": "p", "p": 2}` or `{"type": "ellipsoidal", "a": [[4, 0], [0, 1]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum NormConfig {
    P {
        p: PValue,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    Ellipsoidal { a: Vec<Vec<f64>> },
}

impl<T: Real> Serialize for NormSpec<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_config().serialize(s)
    }
}

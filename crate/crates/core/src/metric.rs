//! Finite metric spaces and the dispersion objective.

use crate::error::{Error, Result};
use crate::Real;

/// `n` points with a dense symmetric distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricInstance<T> {
    n: usize,
    dist: Vec<T>,
    coords: Option<Vec<Vec<T>>>,
}

/// Outcome of [`validate_metric`]. Indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricReport {
    Ok,
    NonZeroDiagonal { i: usize },
    Negative { i: usize, j: usize },
    NotFinite { i: usize, j: usize },
    Asymmetric { i: usize, j: usize },
    /// `d(i, k) > d(i, j) + d(j, k)` beyond tolerance.
    Triangle { i: usize, j: usize, k: usize },
}

impl MetricReport {
    pub fn is_ok(&self) -> bool {
        matches!(self, MetricReport::Ok)
    }
}

impl std::fmt::Display for MetricReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            MetricReport::Ok => write!(f, "ok"),
            MetricReport::NonZeroDiagonal { i } => write!(f, "dist[{i}][{i}] is not zero"),
            MetricReport::Negative { i, j } => write!(f, "dist[{i}][{j}] is negative"),
            MetricReport::NotFinite { i, j } => write!(f, "dist[{i}][{j}] is not finite"),
            MetricReport::Asymmetric { i, j } => write!(f, "dist[{i}][{j}] != dist[{j}][{i}]"),
            MetricReport::Triangle { i, j, k } => {
                write!(f, "triangle inequality violated: dist[{i}][{k}] > dist[{i}][{j}] + dist[{j}][{k}]")
            }
        }
    }
}

impl<T: Real> MetricInstance<T> {
    /// Builds an instance from a square matrix. Only the shape is checked;
    /// use [`validate_metric`] for the axioms.
    pub fn from_matrix(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidInstance("metric needs at least one point".into()));
        }
        let mut dist = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::ShapeMismatch(format!(
                    "dist[{i}] has {} entries, expected {n}",
                    row.len()
                )));
            }
            dist.extend(row);
        }
        Ok(Self { n, dist, coords: None })
    }

    /// Euclidean distances between the given points.
    pub fn from_points(points: Vec<Vec<T>>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::InvalidInstance("metric needs at least one point".into()));
        }
        let dim = points[0].len();
        if let Some(i) = points.iter().position(|p| p.len() != dim) {
            return Err(Error::ShapeMismatch(format!("point {i} has a different dimension")));
        }
        let mut dist = vec![T::zero(); n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = points[i]
                    .iter()
                    .zip(&points[j])
                    .map(|(&a, &b)| (a - b) * (a - b))
                    .sum::<T>()
                    .sqrt();
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        Ok(Self { n, dist, coords: Some(points) })
    }

    pub fn with_coords(mut self, coords: Option<Vec<Vec<T>>>) -> Self {
        self.coords = coords;
        self
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn coords(&self) -> Option<&[Vec<T>]> {
        self.coords.as_deref()
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> T {
        self.dist[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.dist.chunks(self.n).map(<[T]>::to_vec).collect()
    }

    /// Same points with every distance multiplied by `c`.
    pub fn scaled(&self, c: T) -> Self {
        Self {
            n: self.n,
            dist: self.dist.iter().map(|&d| d * c).collect(),
            coords: None,
        }
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> T {
        self.dist.iter().copied().fold(T::zero(), T::max)
    }

    pub fn check_indices(&self, s: &[usize]) -> Result<()> {
        match s.iter().find(|&&x| x >= self.n) {
            Some(&index) => Err(Error::IndexOutOfRange { index, len: self.n }),
            None => Ok(()),
        }
    }

    /// Sum of distances over unordered pairs of `s`.
    pub fn disp(&self, s: &[usize]) -> Result<T> {
        self.check_indices(s)?;
        Ok(self.disp_of(s))
    }

    /// Sum of `d(a, b)` over `a ∈ a_set`, `b ∈ b_set`.
    pub fn disp_cross(&self, a_set: &[usize], b_set: &[usize]) -> Result<T> {
        self.check_indices(a_set)?;
        self.check_indices(b_set)?;
        Ok(self.cross_of(a_set, b_set))
    }

    /// Unchecked [`disp`](Self::disp); panics on out-of-range indices.
    pub fn disp_of(&self, s: &[usize]) -> T {
        let mut total = T::zero();
        for (idx, &a) in s.iter().enumerate() {
            let row = self.row(a);
            for &b in &s[idx + 1..] {
                total += row[b];
            }
        }
        total
    }

    /// Unchecked [`disp_cross`](Self::disp_cross).
    pub fn cross_of(&self, a_set: &[usize], b_set: &[usize]) -> T {
        let mut total = T::zero();
        for &a in a_set {
            let row = self.row(a);
            for &b in b_set {
                total += row[b];
            }
        }
        total
    }

    /// `disp({u}, s)`.
    pub fn point_disp(&self, u: usize, s: &[usize]) -> T {
        let row = self.row(u);
        s.iter().map(|&b| row[b]).sum()
    }
}

/// Checks the metric axioms with absolute tolerance [`Real::tol`]; reports the
/// first violation found in row-major `(i, j, k)` order.
pub fn validate_metric<T: Real>(inst: &MetricInstance<T>) -> MetricReport {
    let n = inst.len();
    let tol = T::tol();
    for i in 0..n {
        if inst.d(i, i).abs() > tol {
            return MetricReport::NonZeroDiagonal { i };
        }
        for j in 0..n {
            let d = inst.d(i, j);
            if !d.is_finite() {
                return MetricReport::NotFinite { i, j };
            }
            if d < T::zero() {
                return MetricReport::Negative { i, j };
            }
            if (d - inst.d(j, i)).abs() > tol {
                return MetricReport::Asymmetric { i, j };
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if inst.d(i, k) > inst.d(i, j) + inst.d(j, k) + tol {
                    return MetricReport::Triangle { i, j, k };
                }
            }
        }
    }
    MetricReport::Ok
}

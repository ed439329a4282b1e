use crate::error::{Error, Result};

/// `n` feature vectors of dimension `d`, stored row-major.
///
/// Every coordinate is finite and `n, d >= 1`; both are checked on
/// construction and the set is immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    data: Vec<f64>,
    n: usize,
    d: usize,
}

impl PointSet {
    pub fn from_flat(data: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if data.is_empty() {
            return Err(Error::invalid("point set must contain at least one point"));
        }
        if data.len() % d != 0 {
            return Err(Error::invalid(format!(
                "{} coordinates do not split into rows of dimension {d}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite coordinate in point {} (dimension {})",
                pos / d,
                pos % d
            )));
        }
        let n = data.len() / d;
        Ok(PointSet { data, n, d })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let d = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * d);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::invalid(format!(
                    "point {i} has dimension {} but point 0 has {d}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(data, d)
    }

    /// One-dimensional points.
    pub fn from_1d(xs: &[f64]) -> Result<Self> {
        Self::from_flat(xs.to_vec(), 1)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.d)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// The coordinates of a one-dimensional set.
    pub fn coords_1d(&self) -> Result<&[f64]> {
        if self.d != 1 {
            return Err(Error::invalid(format!(
                "expected one-dimensional points, got dimension {}",
                self.d
            )));
        }
        Ok(&self.data)
    }

    /// Keeps the first `n` points.
    pub fn truncated(&self, n: usize) -> Result<PointSet> {
        if n == 0 || n > self.n {
            return Err(Error::invalid(format!(
                "cannot truncate {} points to {n}",
                self.n
            )));
        }
        Ok(PointSet {
            data: self.data[..n * self.d].to_vec(),
            n,
            d: self.d,
        })
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n {
            Err(Error::IndexOutOfRange { index: i, n: self.n })
        } else {
            Ok(())
        }
    }
}

#[inline]
pub(crate) fn squared_distance(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum()
}

#[inline]
pub(crate) fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// True when `xs` is sorted ascending (ties allowed).
pub fn is_sorted_ascending(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] <= w[1])
}

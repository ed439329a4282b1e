use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::points::PointSet;

/// Size gates for consumers that touch every pair or every triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest `n` for which the full weight matrix may be built or scanned.
    pub materialize: usize,
    /// Largest `n` for O(n^3) computations unless `force_cubic` is set.
    pub cubic: usize,
    pub force_cubic: bool,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            materialize: 20_000,
            cubic: 5_000,
            force_cubic: false,
        }
    }
}

/// Symmetric weights stored as the strict upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    n: usize,
    upper: Vec<f64>,
}

impl WeightMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut upper = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                upper.push(f(i, j));
            }
        }
        WeightMatrix { n, upper }
    }

    /// Builds from a full square matrix. Entries must be finite and in
    /// `[0, 1]`; `w_ij` and `w_ji` may differ by at most `tol` and are then
    /// averaged. The diagonal is ignored.
    pub fn from_square<R: AsRef<[f64]>>(rows: &[R], tol: f64) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::invalid("weight matrix is empty"));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.as_ref().len() != n {
                return Err(Error::invalid(format!(
                    "weight matrix row {i} has {} entries, expected {n}",
                    row.as_ref().len()
                )));
            }
        }
        let mut upper = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                let a = rows[i].as_ref()[j];
                let b = rows[j].as_ref()[i];
                for (r, c, w) in [(i, j, a), (j, i, b)] {
                    if !(w.is_finite() && (0.0..=1.0).contains(&w)) {
                        return Err(Error::invalid(format!(
                            "weight ({r}, {c}) = {w} is outside [0, 1]"
                        )));
                    }
                }
                if (a - b).abs() > tol {
                    return Err(Error::invalid(format!(
                        "weight matrix is not symmetric at ({i}, {j}): {a} vs {b}"
                    )));
                }
                upper.push(0.5 * (a + b));
            }
        }
        Ok(WeightMatrix { n, upper })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        debug_assert!(a != b, "the diagonal is not stored");
        self.upper[a * self.n - a * (a + 1) / 2 + (b - a - 1)]
    }

    pub fn total(&self) -> f64 {
        self.upper.iter().sum()
    }
}

#[derive(Debug, Clone)]
enum Source<'a> {
    Lazy {
        points: &'a PointSet,
        kernel: Kernel,
    },
    Dense(WeightMatrix),
}

/// Pairwise weights, either computed on demand from points and a kernel or
/// read from an explicit matrix. Index order is the point order.
#[derive(Debug, Clone)]
pub struct SimilarityView<'a> {
    source: Source<'a>,
    limits: Limits,
}

impl<'a> SimilarityView<'a> {
    pub fn lazy(points: &'a PointSet, kernel: Kernel) -> Self {
        SimilarityView {
            source: Source::Lazy { points, kernel },
            limits: Limits::default(),
        }
    }

    pub fn dense(matrix: WeightMatrix) -> SimilarityView<'static> {
        SimilarityView {
            source: Source::Dense(matrix),
            limits: Limits::default(),
        }
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    pub fn n(&self) -> usize {
        match &self.source {
            Source::Lazy { points, .. } => points.len(),
            Source::Dense(m) => m.n(),
        }
    }

    /// The points behind a lazy view.
    pub fn points(&self) -> Option<&'a PointSet> {
        match &self.source {
            Source::Lazy { points, .. } => Some(points),
            Source::Dense(_) => None,
        }
    }

    pub fn kernel(&self) -> Option<&Kernel> {
        match &self.source {
            Source::Lazy { kernel, .. } => Some(kernel),
            Source::Dense(_) => None,
        }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.source, Source::Dense(_))
    }

    /// `w_ij` for `i != j`.
    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        match &self.source {
            Source::Lazy { points, kernel } => kernel.weight(points.point(i), points.point(j)),
            Source::Dense(m) => m.get(i, j),
        }
    }

    /// Errors unless an O(n^2) pass is allowed at this size.
    pub fn require_quadratic(&self, what: &'static str) -> Result<()> {
        let n = self.n();
        if n > self.limits.materialize {
            Err(Error::Refused {
                what,
                n,
                limit: self.limits.materialize,
            })
        } else {
            Ok(())
        }
    }

    /// Errors unless an O(n^3) pass is allowed at this size.
    pub fn require_cubic(&self, what: &'static str) -> Result<()> {
        self.require_quadratic(what)?;
        let n = self.n();
        if n > self.limits.cubic && !self.limits.force_cubic {
            Err(Error::Refused {
                what,
                n,
                limit: self.limits.cubic,
            })
        } else {
            Ok(())
        }
    }

    /// The same weights as an explicit matrix, keeping the limits.
    pub fn materialize(&self) -> Result<SimilarityView<'static>> {
        self.require_quadratic("materialize")?;
        let matrix = match &self.source {
            Source::Dense(m) => m.clone(),
            Source::Lazy { .. } => WeightMatrix::from_fn(self.n(), |i, j| self.weight(i, j)),
        };
        Ok(SimilarityView::dense(matrix).with_limits(self.limits))
    }

    /// Sum of all `w_ij` over `i < j`.
    pub fn total_weight(&self) -> Result<f64> {
        self.require_quadratic("total_weight")?;
        if let Source::Dense(m) = &self.source {
            return Ok(m.total());
        }
        let n = self.n();
        let mut total = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                total += self.weight(i, j);
            }
        }
        Ok(total)
    }
}

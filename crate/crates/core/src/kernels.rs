//! Distance-based similarity kernels.
//!
//! Gaussian weights are reported without the `(sqrt(2 pi) sigma)^-n`
//! normalisation; a common factor never changes an approximation ratio.
//! For `|u - v| / sigma` beyond roughly 38 the weight underflows to `0.0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::points::{is_sorted_ascending, squared_distance, PointSet};
use crate::similarity::SimilarityView;

/// A non-increasing step function of distance with values in `[0, 1]`.
///
/// `g(r) = values[k]` where `k` is the number of thresholds `<= r`, so
/// `values` has one more entry than `thresholds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    thresholds: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(thresholds: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != thresholds.len() + 1 {
            return Err(Error::invalid(
                "a step function needs one more value than thresholds",
            ));
        }
        if thresholds.iter().any(|t| !t.is_finite()) || !is_strictly_increasing(&thresholds) {
            return Err(Error::invalid("thresholds must be finite and increasing"));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::invalid("step values must lie in [0, 1]"));
        }
        if values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::invalid("step values must be non-increasing"));
        }
        Ok(StepFunction { thresholds, values })
    }

    pub fn eval(&self, r: f64) -> f64 {
        let k = self.thresholds.partition_point(|&t| t <= r);
        self.values[k]
    }
}

fn is_strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    Gaussian { sigma: f64 },
    MonotoneTable(StepFunction),
}

impl Kernel {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        Ok(Kernel::Gaussian { sigma })
    }

    /// Weight for a pair at squared Euclidean distance `d2`.
    #[inline]
    pub fn weight_sq(&self, d2: f64) -> f64 {
        match self {
            Kernel::Gaussian { sigma } => (-d2 / (2.0 * sigma * sigma)).exp(),
            Kernel::MonotoneTable(g) => g.eval(d2.sqrt()),
        }
    }

    #[inline]
    pub fn weight(&self, u: &[f64], v: &[f64]) -> f64 {
        self.weight_sq(squared_distance(u, v))
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("bandwidth must be positive, got {sigma}")))
    }
}

/// `exp(-|u - v|^2 / (2 sigma^2))`.
pub fn gaussian_weight(u: &[f64], v: &[f64], sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if u.len() != v.len() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            u.len(),
            v.len()
        )));
    }
    Ok(Kernel::Gaussian { sigma }.weight(u, v))
}

/// Smallest pairwise Gaussian weight of the set, the weight of its diameter
/// pair.
pub fn delta_of(points: &PointSet, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if points.len() < 2 {
        return Err(Error::invalid("delta needs at least two points"));
    }
    let mut diameter2: f64 = 0.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            diameter2 = diameter2.max(squared_distance(points.point(i), points.point(j)));
        }
    }
    Ok(Kernel::Gaussian { sigma }.weight_sq(diameter2))
}

/// Checks `w_ik <= min(w_ij, w_jk)` for every `i < j < k` of a view whose
/// index order is the sorted order of the data.
///
/// The triple condition is equivalent to every row of the upper triangle
/// being non-increasing to the right and every column non-decreasing
/// downwards, so the check is exact and O(n^2). For a lazy view over 1D
/// points the points must be sorted.
pub fn monotone_1d_check(sim: &SimilarityView<'_>) -> Result<bool> {
    if let Some(points) = sim.points() {
        let xs = points.coords_1d()?;
        if !is_sorted_ascending(xs) {
            return Err(Error::invalid("points must be sorted ascending"));
        }
    }
    sim.require_quadratic("monotone_1d_check")?;
    let n = sim.n();
    for i in 0..n {
        for j in i + 1..n.saturating_sub(1) {
            if sim.weight(i, j + 1) > sim.weight(i, j) {
                return Ok(false);
            }
        }
    }
    for k in 0..n {
        for i in 0..k.saturating_sub(1) {
            if sim.weight(i, k) > sim.weight(i + 1, k) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

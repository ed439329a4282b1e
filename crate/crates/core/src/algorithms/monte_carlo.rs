use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::divisive::{projected_random_cut, random_cut};
use crate::error::{Error, Result};
use crate::objectives::f_plus;
use crate::points::PointSet;
use crate::seed::Seed;
use crate::similarity::SimilarityView;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Randomized {
    /// Needs sorted 1D points.
    RandomCut,
    ProjectedRandomCut,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(repeats)`; 0 for one repeat.
    pub stderr: f64,
    pub repeats: usize,
}

impl Estimate {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let k = samples.len();
        if k == 0 {
            return Err(Error::invalid("need at least one sample"));
        }
        let mean = samples.iter().sum::<f64>() / k as f64;
        let stderr = if k > 1 {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
            (var / k as f64).sqrt()
        } else {
            0.0
        };
        Ok(Estimate { mean, stderr, repeats: k })
    }
}

/// Mean F+ of a randomized algorithm over `repeats` runs.
///
/// Run `k` uses `seed.split(k)`. Runs execute in parallel but samples are
/// reduced in run order, so the result does not depend on the thread count.
pub fn expected_f_plus(
    algorithm: Randomized,
    points: &PointSet,
    sim: &SimilarityView<'_>,
    repeats: usize,
    seed: Seed,
) -> Result<Estimate> {
    if repeats == 0 {
        return Err(Error::invalid("repeats must be at least 1"));
    }
    if sim.n() != points.len() {
        return Err(Error::invalid("points and similarity sizes differ"));
    }
    sim.require_quadratic("expected_f_plus")?;
    let xs = match algorithm {
        Randomized::RandomCut => Some(points.coords_1d()?),
        Randomized::ProjectedRandomCut => None,
    };
    let samples = (0..repeats as u64)
        .into_par_iter()
        .map(|k| {
            let s = seed.split(k);
            let tree = match xs {
                Some(xs) => random_cut(xs, s)?,
                None => projected_random_cut(points, s)?,
            };
            f_plus(&tree, sim)
        })
        .collect::<Result<Vec<f64>>>()?;
    Estimate::from_samples(&samples)
}

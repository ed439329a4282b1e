//! Timing of projected random cut against a single pass over the data.

use std::hint::black_box;
use std::path::PathBuf;
use std::time::Instant;

use hcut::algorithms::projected_random_cut;
use hcut::instances::gaussian_cloud;
use hcut::{PointSet, Seed};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{CliError, CliResult};
use crate::ingest::{read_points_prefix, CsvOptions};

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    /// Dimension of the synthetic clouds.
    pub dim: usize,
    pub seed: Seed,
    /// The reported time is the minimum over this many trials.
    pub trials: usize,
    /// A trial repeats the timed work until at least this long has passed.
    pub min_seconds: f64,
    /// Points come from this file instead of a synthetic cloud.
    pub input: Option<(PathBuf, CsvOptions)>,
    /// Count reading and parsing the input as part of each timing.
    pub include_io: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: vec![10_000, 100_000],
            dim: 128,
            seed: Seed(0),
            trials: 3,
            min_seconds: 0.05,
            input: None,
            include_io: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub size: usize,
    pub pass_seconds: f64,
    pub prc_seconds: f64,
}

/// Parses a list such as `10k,100k,1m`.
pub fn parse_sizes(text: &str) -> CliResult<Vec<usize>> {
    let sizes = text
        .split(',')
        .map(|part| {
            let part = part.trim().to_ascii_lowercase();
            let (digits, scale) = match part.strip_suffix('k') {
                Some(d) => (d, 1_000),
                None => match part.strip_suffix('m') {
                    Some(d) => (d, 1_000_000),
                    None => (part.as_str(), 1),
                },
            };
            digits
                .parse::<usize>()
                .ok()
                .and_then(|v| v.checked_mul(scale))
                .filter(|&v| v > 0)
                .ok_or_else(|| CliError::invalid(format!("bad size '{part}'")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    if sizes.is_empty() {
        return Err(CliError::invalid("no sizes given"));
    }
    Ok(sizes)
}

/// The data pass every algorithm needs at least: one dot product per point.
pub fn one_pass(points: &PointSet, g: &[f64]) -> Vec<f64> {
    points
        .rows()
        .map(|v| v.iter().zip(g).map(|(a, b)| a * b).sum())
        .collect()
}

/// Minimum over `trials` of the per-call time of `f`.
pub fn time_min(trials: usize, min_seconds: f64, mut f: impl FnMut()) -> f64 {
    let mut best = f64::INFINITY;
    for _ in 0..trials.max(1) {
        let start = Instant::now();
        let mut calls = 0u32;
        loop {
            f();
            calls += 1;
            if start.elapsed().as_secs_f64() >= min_seconds {
                break;
            }
        }
        best = best.min(start.elapsed().as_secs_f64() / calls as f64);
    }
    best
}

pub fn run_bench(cfg: &BenchConfig) -> CliResult<Vec<BenchRow>> {
    if cfg.trials == 0 || cfg.dim == 0 {
        return Err(CliError::invalid("trials and dimension must be at least 1"));
    }
    let mut rows = Vec::with_capacity(cfg.sizes.len());
    for &size in &cfg.sizes {
        let (points, io_seconds) = match &cfg.input {
            Some((path, opts)) => {
                let load = || read_points_prefix(path, *opts, size).map(|t| t.points);
                let points = load()?;
                let io = if cfg.include_io {
                    time_min(cfg.trials, 0.0, || {
                        black_box(load().ok());
                    })
                } else {
                    0.0
                };
                (points, io)
            }
            None => (gaussian_cloud(size, cfg.dim, cfg.seed)?, 0.0),
        };
        let mut rng = cfg.seed.rng();
        let g: Vec<f64> = (0..points.dim()).map(|_| rng.sample(StandardNormal)).collect();
        let pass = time_min(cfg.trials, cfg.min_seconds, || {
            black_box(one_pass(black_box(&points), &g));
        });
        let prc = time_min(cfg.trials, cfg.min_seconds, || {
            black_box(projected_random_cut(black_box(&points), cfg.seed).expect("valid points"));
        });
        log::info!("size {size}: pass {pass:.6} s, prc {prc:.6} s");
        rows.push(BenchRow {
            size,
            pass_seconds: pass + io_seconds,
            prc_seconds: prc + io_seconds,
        });
    }
    Ok(rows)
}

pub fn render_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("size,pass_seconds,prc_seconds\n");
    for r in rows {
        out.push_str(&format!("{},{:.9},{:.9}\n", r.size, r.pass_seconds, r.prc_seconds));
    }
    out
}

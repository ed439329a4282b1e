//! Objective reports with whichever bounds the size gates allow.

use hcut::algorithms::Estimate;
use hcut::kernels::monotone_1d_check;
use hcut::objectives::{max_upper, one_d_bounds};
use hcut::{Bound, Dendrogram, ObjectiveReport, PointSet, SimilarityView};

use crate::error::CliResult;
use crate::json::{self, Object};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSet {
    Max,
    OneD,
    All,
    None,
}

impl BoundSet {
    fn wants_max(self) -> bool {
        matches!(self, BoundSet::Max | BoundSet::All)
    }

    fn wants_one_d(self) -> bool {
        matches!(self, BoundSet::OneD | BoundSet::All)
    }
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub report: ObjectiveReport,
    /// Requested bounds that were not computed, with the reason.
    pub skipped: Vec<(Bound, String)>,
    pub estimate: Option<Estimate>,
}

/// Both 1D bounds, computed on the sorted coordinates when the data is
/// one-dimensional (the bounds do not depend on the point order) or on the
/// index order of an explicit matrix when it is monotone along it.
fn one_d(sim: &SimilarityView<'_>) -> Result<(f64, f64), String> {
    let fail = |e: hcut::Error| e.to_string();
    match sim.points() {
        Some(points) => {
            let xs = points.coords_1d().map_err(|_| "data is not one-dimensional".to_string())?;
            let mut sorted = xs.to_vec();
            sorted.sort_by(f64::total_cmp);
            let sorted = PointSet::from_1d(&sorted).map_err(fail)?;
            let kernel = sim.kernel().expect("a lazy view has a kernel").clone();
            let view = SimilarityView::lazy(&sorted, kernel).with_limits(sim.limits());
            if !monotone_1d_check(&view).map_err(fail)? {
                return Err("kernel is not monotone in distance".into());
            }
            let b = one_d_bounds(&view).map_err(fail)?;
            Ok((b.max_upper, b.sum_upper))
        }
        None => {
            sim.require_quadratic("one_d_bounds").map_err(fail)?;
            if !monotone_1d_check(sim).map_err(fail)? {
                return Err("weights are not monotone along the index order".into());
            }
            let b = one_d_bounds(sim).map_err(fail)?;
            Ok((b.max_upper, b.sum_upper))
        }
    }
}

pub fn evaluate(tree: &Dendrogram, sim: &SimilarityView<'_>, bounds: BoundSet) -> CliResult<Evaluation> {
    let mut report = ObjectiveReport::evaluate(tree, sim)?;
    let mut skipped = Vec::new();
    if bounds.wants_max() {
        match max_upper(sim) {
            Ok(v) if sim.n() >= 3 => report.add_bound(Bound::MaxUpper, v),
            Ok(_) => skipped.push((Bound::MaxUpper, "fewer than 3 points".to_string())),
            Err(e) => skipped.push((Bound::MaxUpper, e.to_string())),
        }
    }
    if bounds.wants_one_d() {
        match one_d(sim) {
            Ok((max, sum)) => {
                report.add_bound(Bound::OneDMaxUpper, max);
                report.add_bound(Bound::OneDSumUpper, sum);
            }
            Err(reason) => {
                skipped.push((Bound::OneDMaxUpper, reason.clone()));
                skipped.push((Bound::OneDSumUpper, reason));
            }
        }
    }
    Ok(Evaluation {
        report,
        skipped,
        estimate: None,
    })
}

fn bound_map(entries: impl Iterator<Item = (Bound, f64)>) -> Object {
    entries.fold(Object::new(), |o, (b, v)| o.float(b.name(), v))
}

impl Evaluation {
    /// `f_plus`, `f_minus`, `bounds`, `ratios`, `skipped` and, for
    /// repeated randomized runs, `estimate` (with the mean's ratios).
    pub fn to_json(&self) -> String {
        let r = &self.report;
        let mut o = Object::new().float("f_plus", r.f_plus);
        o = match r.f_minus {
            Some(v) => o.float("f_minus", v),
            None => o.null("f_minus"),
        };
        o = o
            .object("bounds", bound_map(r.bounds.iter().map(|(b, v)| (*b, *v))))
            .object("ratios", bound_map(r.ratios.iter().map(|(b, v)| (*b, *v))))
            .raw(
                "skipped",
                json::array(
                    self.skipped
                        .iter()
                        .map(|(b, why)| Object::new().str("bound", b.name()).str("reason", why).render()),
                ),
            );
        if let Some(e) = &self.estimate {
            let ratios = r
                .bounds
                .iter()
                .map(|(b, v)| (*b, if *v > 0.0 { e.mean / v } else { f64::NAN }));
            o = o.object(
                "estimate",
                Object::new()
                    .float("mean", e.mean)
                    .float("stderr", e.stderr)
                    .int("repeats", e.repeats as u64)
                    .object("ratios", bound_map(ratios)),
            );
        }
        o.render()
    }
}

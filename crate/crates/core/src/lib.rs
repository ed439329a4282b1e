//! Hierarchical clustering of Euclidean data under the revenue objective
//! F+ = sum over pairs of w_ij (n - |leaves under their lowest common ancestor|).
//!
//! * [`points`], [`dendrogram`], [`seed`]: inputs, trees and randomness.
//! * [`kernels`], [`similarity`]: Gaussian and monotone similarity weights.
//! * [`objectives`], [`bruteforce`]: F+, F-, upper bounds, the potential
//!   function and an exact optimum for tiny inputs.
//! * [`algorithms`]: random cut, projected random cut, average and single
//!   linkage, greedy cut.
//! * [`instances`]: structured and random instance generators.
//!
//! ```
//! use hcut::{algorithms, objectives, Kernel, PointSet, Seed, SimilarityView};
//!
//! let points = PointSet::from_rows(&[[0.0, 0.0], [0.1, 0.0], [3.0, 3.0], [3.1, 3.0]]).unwrap();
//! let sim = SimilarityView::lazy(&points, Kernel::gaussian(1.0).unwrap());
//! let tree = algorithms::projected_random_cut(&points, Seed(7)).unwrap();
//! let value = objectives::f_plus(&tree, &sim).unwrap();
//! assert!(value <= objectives::max_upper(&sim).unwrap());
//! ```

pub mod algorithms;
pub mod bruteforce;
pub mod dendrogram;
pub mod error;
pub mod instances;
pub mod kernels;
pub mod objectives;
pub mod points;
pub mod seed;
pub mod similarity;
pub mod tree_io;

pub use dendrogram::{Dendrogram, LcaIndex, Node, NodeId, TreeBuilder};
pub use error::{Error, Result};
pub use instances::InstanceSpec;
pub use kernels::{Kernel, StepFunction};
pub use objectives::{Bound, ObjectiveReport};
pub use points::PointSet;
pub use seed::Seed;
pub use similarity::{Limits, SimilarityView, WeightMatrix};

//! Approximate coloring of k-uniform hypergraphs under structural promises.
//!
//! The promises are low discrepancy (a two-coloring leaves every edge nearly
//! balanced), rainbow colorability (some chi-coloring hits every color on every
//! edge) and strong colorability (some chi-coloring makes every edge's vertices
//! pairwise distinct). Everything downstream works off those three:
//!
//! * [`hypergraph`], [`coloring`]: the instance type, promise verifiers and
//!   coloring metrics.
//! * [`forge`]: planted instance generators, the Max-Cut gadget, cloud
//!   composition, and the pairwise-independent rainbow distribution.
//! * [`sdp`]: unit-vector relaxations of the promises, planted solutions, and a
//!   low-rank penalty feasibility solver.
//! * [`cone`]: Gaussian measures of simplicial cones given by Gram matrices,
//!   the analytic measure upper bound, and well-behaved column selection.
//! * [`rounding`]: random hyperplane rounding and threshold independent sets.
//! * [`mincolor`]: degree-reduction passes and the bounded-degree coloring
//!   pipeline built from the pieces above.
//!
//! All randomized routines take explicit seeds and draw from named substreams
//! ([`stream`]), so every result is reproducible bit for bit.

/// Library version, embedded in harness output records.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod coloring;
pub mod cone;
pub mod forge;
pub mod hypergraph;
pub mod io;
pub mod mincolor;
pub mod rounding;
pub mod sdp;
pub mod stream;
pub mod util;

pub use coloring::{Coloring, PromiseKind};
pub use hypergraph::Hypergraph;

//! Hyperplane rounding of vector solutions into two-colorings, plus the
//! threshold variant that extracts an independent set from one side of the
//! cut.
//!
//! All randomness flows through an explicit Gaussian direction so the
//! rounding itself is a pure function; trial orchestration derives one
//! substream per trial from a base seed.

use crate::coloring::{mono_fraction, Coloring, ColoringError};
use crate::cone::{gaussian_measure_mc, ConeError, GramCone, McEstimate};
use crate::hypergraph::Hypergraph;
use crate::sdp::VectorSolution;
use crate::stream::substream_indexed;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RoundingError {
    #[error("{0}")]
    BadParams(String),
    #[error("solution covers {got} vertices, hypergraph has {want}")]
    SizeMismatch { got: usize, want: usize },
    #[error("direction has dimension {got}, solution has {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

/// Trial count and base seed for repeated rounding; `tau` is the one-sided
/// threshold used by [`threshold_independent_set`].
#[derive(Debug, Clone, Copy)]
pub struct RoundingParams {
    pub trials: usize,
    pub tau: f64,
    pub seed: u64,
}

impl Default for RoundingParams {
    fn default() -> Self {
        Self {
            trials: 1,
            tau: 0.0,
            seed: 0,
        }
    }
}

/// Draws a standard Gaussian direction of the given dimension.
pub fn gaussian_direction<R: Rng>(dim: usize, rng: &mut R) -> Vec<f64> {
    (0..dim).map(|_| rng.sample(StandardNormal)).collect()
}

/// Signs every vector against one shared direction: color 0 on the
/// nonnegative side (ties included), color 1 on the negative side.
pub fn hyperplane_round(v: &VectorSolution, r: &[f64]) -> Result<Coloring, RoundingError> {
    if r.len() != v.dim() {
        return Err(RoundingError::DimensionMismatch {
            got: r.len(),
            want: v.dim(),
        });
    }
    let mut coloring = Coloring::new(2, v.n());
    for i in 0..v.n() {
        let dot: f64 = v.row(i).iter().zip(r).map(|(x, y)| x * y).sum();
        coloring.set(i, if dot >= 0.0 { 0 } else { 1 });
    }
    Ok(coloring)
}

/// Per-trial monochromatic fractions from a rounding run, with the best
/// trial singled out.
#[derive(Debug, Clone)]
pub struct RoundStats {
    pub best_fraction: f64,
    pub best_trial: usize,
    pub mean_fraction: f64,
    pub fractions: Vec<f64>,
}

impl RoundStats {
    /// Empirical quantile at q in [0, 1] (nearest-rank on the sorted trials).
    pub fn quantile(&self, q: f64) -> f64 {
        let mut sorted = self.fractions.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let idx = ((q * (sorted.len() - 1) as f64).round() as usize).min(sorted.len() - 1);
        sorted[idx]
    }
}

/// Rounds `trials` times with independent directions and returns the
/// coloring with the smallest weighted monochromatic fraction, earliest
/// trial winning ties. Trial t draws from a substream indexed by t, so a
/// longer run reproduces a shorter run's prefix exactly.
pub fn best_of_rounds(
    h: &Hypergraph,
    v: &VectorSolution,
    params: &RoundingParams,
) -> Result<(Coloring, RoundStats), RoundingError> {
    if params.trials == 0 {
        return Err(RoundingError::BadParams("need at least one trial".into()));
    }
    if v.n() != h.n() {
        return Err(RoundingError::SizeMismatch {
            got: v.n(),
            want: h.n(),
        });
    }
    let mut best: Option<(f64, usize, Coloring)> = None;
    let mut fractions = Vec::with_capacity(params.trials);
    for t in 0..params.trials {
        let mut rng = substream_indexed(params.seed, "round", t as u64);
        let r = gaussian_direction(v.dim(), &mut rng);
        let coloring = hyperplane_round(v, &r)?;
        let frac = mono_fraction(h, &coloring)?;
        fractions.push(frac);
        if best.as_ref().is_none_or(|(bf, _, _)| frac < *bf) {
            best = Some((frac, t, coloring));
        }
    }
    let (best_fraction, best_trial, coloring) = best.unwrap();
    let mean_fraction = fractions.iter().sum::<f64>() / fractions.len() as f64;
    Ok((
        coloring,
        RoundStats {
            best_fraction,
            best_trial,
            mean_fraction,
            fractions,
        },
    ))
}

/// Monte Carlo estimate of the probability that hyperplane rounding leaves
/// the given vertex set monochromatic: twice the Gaussian measure of the
/// cone spanned by its vectors, by sign symmetry of the direction.
pub fn edge_mono_probability_mc(
    v: &VectorSolution,
    vertices: &[usize],
    samples: u64,
    seed: u64,
) -> Result<McEstimate, RoundingError> {
    if vertices.iter().any(|&i| i >= v.n()) {
        return Err(RoundingError::BadParams(format!(
            "vertex out of range for solution on {} rows",
            v.n()
        )));
    }
    let cone = GramCone::normalized(v.gram_of(vertices))?;
    let est = gaussian_measure_mc(&cone, samples, seed)?;
    Ok(McEstimate {
        estimate: 2.0 * est.estimate,
        std_error: 2.0 * est.std_error,
        ..est
    })
}

/// Takes the vertices at margin at least `tau` along the direction, then
/// deletes the lowest-id vertex of every contained hyperedge until no edge
/// survives inside the set. Returns a sorted independent set.
pub fn threshold_independent_set(
    h: &Hypergraph,
    v: &VectorSolution,
    tau: f64,
    r: &[f64],
) -> Result<Vec<usize>, RoundingError> {
    if tau < 0.0 {
        return Err(RoundingError::BadParams(format!(
            "threshold must be nonnegative, got {tau}"
        )));
    }
    if v.n() != h.n() {
        return Err(RoundingError::SizeMismatch {
            got: v.n(),
            want: h.n(),
        });
    }
    if r.len() != v.dim() {
        return Err(RoundingError::DimensionMismatch {
            got: r.len(),
            want: v.dim(),
        });
    }
    let mut member = vec![false; h.n()];
    for i in 0..h.n() {
        let dot: f64 = v.row(i).iter().zip(r).map(|(x, y)| x * y).sum();
        member[i] = dot >= tau;
    }
    // Repair pass: an edge wholly inside the set loses its smallest vertex.
    // A deletion can only shrink the set, so one sweep per edge in id order
    // suffices as long as containment is checked against the current set.
    let mut changed = true;
    while changed {
        changed = false;
        for e in h.edges() {
            if e.iter().all(|&i| member[i]) {
                let low = *e.iter().min().unwrap();
                member[low] = false;
                changed = true;
            }
        }
    }
    debug_assert!(
        h.edges().iter().all(|e| !e.iter().all(|&i| member[i])),
        "repair left a contained edge"
    );
    Ok((0..h.n()).filter(|&i| member[i]).collect())
}

//! Vector relaxations of the three promises, exact solutions built from
//! planted witnesses, and a low-rank penalty solver for everything else.
//!
//! The relaxations all ask for one unit vector per vertex. Discrepancy(l)
//! bounds every edge's vector sum by l; Rainbow(chi) on k-uniform instances
//! additionally lower-bounds pairwise inner products inside edges by
//! -1/(chi-1) and keeps the sum bound with l = k - chi; Strong(chi) pins
//! every inside-edge pair to exactly -1/(chi-1), which already determines the
//! sum norm.

use crate::coloring::{verify_promise, Coloring, ColoringError, PromiseKind};
use crate::hypergraph::Hypergraph;
use crate::stream::substream;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SdpError {
    #[error("{0}")]
    BadParams(String),
    #[error("dimension {d} too small, need at least {need}")]
    DimensionTooSmall { d: usize, need: usize },
    #[error("vector solution covers {got} vertices, instance has {want}")]
    SizeMismatch { got: usize, want: usize },
    #[error("witness does not satisfy the promise (first bad edge {0})")]
    BadWitness(usize),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

/// One unit vector per vertex, stored as rows. Construction does not touch
/// the entries; call [`VectorSolution::renormalize`] to force exact unit rows.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSolution {
    dim: usize,
    rows: Vec<Vec<f64>>,
}

impl VectorSolution {
    pub fn from_rows(dim: usize, rows: Vec<Vec<f64>>) -> Self {
        for r in &rows {
            assert_eq!(r.len(), dim, "row length does not match dimension");
        }
        Self { dim, rows }
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        let rows = (0..m.nrows())
            .map(|i| m.row(i).iter().copied().collect())
            .collect();
        Self {
            dim: m.ncols(),
            rows,
        }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn dot(&self, i: usize, j: usize) -> f64 {
        self.rows[i]
            .iter()
            .zip(&self.rows[j])
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Scales every row to unit norm; near-zero rows become e_0.
    pub fn renormalize(&mut self) {
        for r in &mut self.rows {
            let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-12 {
                r.iter_mut().for_each(|x| *x = 0.0);
                r[0] = 1.0;
            } else {
                r.iter_mut().for_each(|x| *x /= norm);
            }
        }
    }

    /// Gram matrix of the rows indexed by `ids`.
    pub fn gram_of(&self, ids: &[usize]) -> DMatrix<f64> {
        let k = ids.len();
        DMatrix::from_fn(k, k, |i, j| self.dot(ids[i], ids[j]))
    }
}

/// Unit vectors of the regular (chi-1)-simplex, padded to dimension `d`:
/// pairwise inner products exactly -1/(chi-1), sum exactly zero.
pub fn simplex_vectors(chi: usize, d: usize) -> Result<VectorSolution, SdpError> {
    if chi < 2 {
        return Err(SdpError::BadParams(format!(
            "need at least 2 simplex vertices, got {chi}"
        )));
    }
    if d < chi - 1 {
        return Err(SdpError::DimensionTooSmall { d, need: chi - 1 });
    }
    // Center the standard basis of R^chi, normalize, then reflect the
    // all-ones direction onto the last axis so the vectors live in the first
    // chi-1 coordinates.
    let a = 1.0 / (chi as f64).sqrt();
    let mut w: Vec<f64> = vec![a; chi];
    w[chi - 1] -= 1.0;
    let w_sq: f64 = w.iter().map(|x| x * x).sum();
    let scale = ((chi as f64 - 1.0) / chi as f64).sqrt();
    let mut rows = Vec::with_capacity(chi);
    for i in 0..chi {
        let mut u: Vec<f64> = (0..chi)
            .map(|t| (f64::from(t == i) - 1.0 / chi as f64) / scale)
            .collect();
        let proj: f64 = u.iter().zip(&w).map(|(x, y)| x * y).sum::<f64>() * 2.0 / w_sq;
        for (x, y) in u.iter_mut().zip(&w) {
            *x -= proj * y;
        }
        let mut row = vec![0.0; d];
        row[..chi - 1].copy_from_slice(&u[..chi - 1]);
        rows.push(row);
    }
    let mut v = VectorSolution::from_rows(d, rows);
    v.renormalize();
    Ok(v)
}

/// The exact feasible solution a planted witness induces: antipodal unit
/// vectors for Discrepancy, simplex vertices per color class for Rainbow and
/// Strong. The witness is re-verified first.
pub fn planted_solution(
    h: &Hypergraph,
    kind: PromiseKind,
    witness: &Coloring,
) -> Result<VectorSolution, SdpError> {
    let chk = verify_promise(h, witness, kind)?;
    if !chk.ok {
        return Err(SdpError::BadWitness(chk.violations[0]));
    }
    let chi = kind.palette();
    let (d, palette_rows) = match kind {
        PromiseKind::Discrepancy(_) => (1, vec![vec![1.0], vec![-1.0]]),
        PromiseKind::Rainbow(_) | PromiseKind::Strong(_) => {
            let s = simplex_vectors(chi, chi - 1)?;
            (chi - 1, s.rows().to_vec())
        }
    };
    let rows = (0..h.n())
        .map(|v| palette_rows[witness.get(v).expect("verified witness is total")].clone())
        .collect();
    Ok(VectorSolution::from_rows(d, rows))
}

/// How far each constraint family of a relaxation is from satisfied.
/// Violations are in natural units: norms for edge sums, inner products for
/// pairs, row-norm offsets for the unit constraints.
#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    pub tol: f64,
    pub unit_violation: f64,
    pub worst_unit: Option<usize>,
    pub edge_violation: f64,
    pub worst_edge: Option<usize>,
    pub pair_violation: f64,
    pub worst_pair: Option<(usize, usize)>,
}

impl FeasibilityReport {
    pub fn max_violation(&self) -> f64 {
        self.unit_violation
            .max(self.edge_violation)
            .max(self.pair_violation)
    }

    pub fn passes(&self) -> bool {
        self.max_violation() <= self.tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum PairRule {
    None,
    AtLeast(f64),
    Exactly(f64),
}

struct ConstraintSet {
    /// (edge vertices, sum-norm bound) pairs; empty for Strong.
    norm_edges: Vec<(Vec<usize>, f64)>,
    /// Deduplicated vertex pairs appearing together in some edge.
    pairs: Vec<(usize, usize)>,
    rule: PairRule,
}

fn build_constraints(h: &Hypergraph, kind: PromiseKind) -> Result<ConstraintSet, SdpError> {
    kind.check_arity(h.k())?;
    let k = h.k();
    let collect_pairs = |h: &Hypergraph| {
        let mut set = std::collections::BTreeSet::new();
        for e in h.edges() {
            for i in 0..e.len() {
                for j in i + 1..e.len() {
                    set.insert((e[i], e[j]));
                }
            }
        }
        set.into_iter().collect::<Vec<_>>()
    };
    Ok(match kind {
        PromiseKind::Discrepancy(l) => ConstraintSet {
            norm_edges: h.edges().iter().map(|e| (e.clone(), l as f64)).collect(),
            pairs: Vec::new(),
            rule: PairRule::None,
        },
        PromiseKind::Rainbow(chi) => ConstraintSet {
            norm_edges: h
                .edges()
                .iter()
                .map(|e| (e.clone(), (k - chi) as f64))
                .collect(),
            pairs: collect_pairs(h),
            rule: PairRule::AtLeast(-1.0 / (chi as f64 - 1.0)),
        },
        PromiseKind::Strong(chi) => ConstraintSet {
            norm_edges: Vec::new(),
            pairs: collect_pairs(h),
            rule: PairRule::Exactly(-1.0 / (chi as f64 - 1.0)),
        },
    })
}

/// Measures every constraint of the relaxation of `kind` against `v`.
pub fn check_feasible(
    h: &Hypergraph,
    kind: PromiseKind,
    v: &VectorSolution,
    tol: f64,
) -> Result<FeasibilityReport, SdpError> {
    if v.n() != h.n() {
        return Err(SdpError::SizeMismatch {
            got: v.n(),
            want: h.n(),
        });
    }
    let cs = build_constraints(h, kind)?;
    let mut report = FeasibilityReport {
        tol,
        unit_violation: 0.0,
        worst_unit: None,
        edge_violation: 0.0,
        worst_edge: None,
        pair_violation: 0.0,
        worst_pair: None,
    };
    for i in 0..v.n() {
        let off = (v.dot(i, i).sqrt() - 1.0).abs();
        if off > report.unit_violation {
            report.unit_violation = off;
            report.worst_unit = Some(i);
        }
    }
    for (eid, (e, l)) in cs.norm_edges.iter().enumerate() {
        let mut sum = vec![0.0; v.dim()];
        for &i in e {
            for (s, x) in sum.iter_mut().zip(v.row(i)) {
                *s += x;
            }
        }
        let norm = sum.iter().map(|x| x * x).sum::<f64>().sqrt();
        let viol = (norm - l).max(0.0);
        if viol > report.edge_violation {
            report.edge_violation = viol;
            report.worst_edge = Some(eid);
        }
    }
    for &(i, j) in &cs.pairs {
        let dot = v.dot(i, j);
        let viol = match cs.rule {
            PairRule::None => 0.0,
            PairRule::AtLeast(t) => (t - dot).max(0.0),
            PairRule::Exactly(t) => (dot - t).abs(),
        };
        if viol > report.pair_violation {
            report.pair_violation = viol;
            report.worst_pair = Some((i, j));
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Embedding dimension; `None` picks min(n, 2k+2).
    pub dim: Option<usize>,
    /// Stop when no constraint is violated by more than this.
    pub eps: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            dim: None,
            eps: 1e-6,
            max_iters: 20_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub enum SolveOutcome {
    Feasible {
        solution: VectorSolution,
        iterations: usize,
    },
    /// The iteration budget ran out; carries the best iterate found and how
    /// badly it still violates the constraints.
    Infeasible {
        best: VectorSolution,
        report: FeasibilityReport,
        iterations: usize,
    },
}

impl SolveOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, SolveOutcome::Feasible { .. })
    }

    pub fn solution(&self) -> &VectorSolution {
        match self {
            SolveOutcome::Feasible { solution, .. } => solution,
            SolveOutcome::Infeasible { best, .. } => best,
        }
    }
}

/// Penalty solver: minimizes the sum of squared constraint violations
/// (hinge-squared for inequalities) by gradient descent over unit rows, with
/// per-iteration row renormalization, backtracking line search, and geometric
/// penalty growth plus a tiny seeded perturbation whenever the search stalls.
///
/// The iteration budget is split across up to four attempts with fresh
/// deterministic initializations; when the caller leaves `dim` unset the
/// later attempts escalate the embedding dimension toward n, which dissolves
/// the spurious local minima low-rank landscapes can have. Deterministic for
/// fixed (instance, options).
pub fn solve(h: &Hypergraph, kind: PromiseKind, opts: SolveOptions) -> Result<SolveOutcome, SdpError> {
    let d0 = opts.dim.unwrap_or((2 * h.k() + 2).min(h.n())).max(1);
    let n = h.n().max(1);
    let dims = if opts.dim.is_some() {
        vec![d0; 4]
    } else {
        vec![d0, d0, (2 * d0).min(n).max(d0), n]
    };
    let share = (opts.max_iters / dims.len()).max(1);
    let mut total_iters = 0;
    let mut global_best: Option<(VectorSolution, FeasibilityReport)> = None;
    for (attempt, &d) in dims.iter().enumerate() {
        let mut rng = crate::stream::substream_indexed(opts.seed, "sdp-init", attempt as u64);
        let rows: Vec<Vec<f64>> = (0..h.n())
            .map(|_| (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        let mut init = VectorSolution::from_rows(d, rows);
        init.renormalize();
        let sub = SolveOptions {
            max_iters: share,
            ..opts
        };
        match solve_from(h, kind, init, sub)? {
            SolveOutcome::Feasible {
                solution,
                iterations,
            } => {
                return Ok(SolveOutcome::Feasible {
                    solution,
                    iterations: total_iters + iterations,
                })
            }
            SolveOutcome::Infeasible {
                best,
                report,
                iterations,
            } => {
                total_iters += iterations;
                let better = global_best
                    .as_ref()
                    .map_or(true, |(_, r)| report.max_violation() < r.max_violation());
                if better {
                    global_best = Some((best, report));
                }
            }
        }
    }
    let (best, report) = global_best.expect("at least one attempt ran");
    Ok(SolveOutcome::Infeasible {
        best,
        report,
        iterations: total_iters,
    })
}

/// Same solver started from a caller-supplied iterate (renormalized first).
/// A feasible start returns immediately with zero iterations.
pub fn solve_warm(
    h: &Hypergraph,
    kind: PromiseKind,
    init: &VectorSolution,
    opts: SolveOptions,
) -> Result<SolveOutcome, SdpError> {
    if init.n() != h.n() {
        return Err(SdpError::SizeMismatch {
            got: init.n(),
            want: h.n(),
        });
    }
    let mut start = init.clone();
    start.renormalize();
    solve_from(h, kind, start, opts)
}

fn solve_from(
    h: &Hypergraph,
    kind: PromiseKind,
    init: VectorSolution,
    opts: SolveOptions,
) -> Result<SolveOutcome, SdpError> {
    let cs = build_constraints(h, kind)?;
    let d = init.dim();
    let n = init.n();
    let mut x = init;

    let max_violation = |v: &VectorSolution| -> f64 {
        let mut worst = 0.0f64;
        for (e, l) in &cs.norm_edges {
            let mut sum = vec![0.0; d];
            for &i in e {
                for (s, t) in sum.iter_mut().zip(v.row(i)) {
                    *s += t;
                }
            }
            let norm = sum.iter().map(|t| t * t).sum::<f64>().sqrt();
            worst = worst.max(norm - l);
        }
        for &(i, j) in &cs.pairs {
            let dot = v.dot(i, j);
            let viol = match cs.rule {
                PairRule::None => 0.0,
                PairRule::AtLeast(t) => t - dot,
                PairRule::Exactly(t) => (dot - t).abs(),
            };
            worst = worst.max(viol);
        }
        worst.max(0.0)
    };

    let loss = |v: &VectorSolution, rho: f64| -> f64 {
        let mut total = 0.0;
        for (e, l) in &cs.norm_edges {
            let mut sum = vec![0.0; d];
            for &i in e {
                for (s, t) in sum.iter_mut().zip(v.row(i)) {
                    *s += t;
                }
            }
            let c = sum.iter().map(|t| t * t).sum::<f64>() - l * l;
            if c > 0.0 {
                total += c * c;
            }
        }
        for &(i, j) in &cs.pairs {
            let dot = v.dot(i, j);
            match cs.rule {
                PairRule::None => {}
                PairRule::AtLeast(t) => {
                    let c = t - dot;
                    if c > 0.0 {
                        total += c * c;
                    }
                }
                PairRule::Exactly(t) => {
                    let c = dot - t;
                    total += c * c;
                }
            }
        }
        rho * total
    };

    let grad = |v: &VectorSolution, rho: f64| -> Vec<Vec<f64>> {
        let mut g = vec![vec![0.0; d]; n];
        for (e, l) in &cs.norm_edges {
            let mut sum = vec![0.0; d];
            for &i in e {
                for (s, t) in sum.iter_mut().zip(v.row(i)) {
                    *s += t;
                }
            }
            let c = sum.iter().map(|t| t * t).sum::<f64>() - l * l;
            if c > 0.0 {
                for &i in e {
                    for (gi, s) in g[i].iter_mut().zip(&sum) {
                        *gi += rho * 4.0 * c * s;
                    }
                }
            }
        }
        for &(i, j) in &cs.pairs {
            let dot = v.dot(i, j);
            let coeff = match cs.rule {
                PairRule::None => 0.0,
                PairRule::AtLeast(t) => {
                    let c = t - dot;
                    if c > 0.0 {
                        -2.0 * c
                    } else {
                        0.0
                    }
                }
                PairRule::Exactly(t) => 2.0 * (dot - t),
            };
            if coeff != 0.0 {
                for t in 0..d {
                    g[i][t] += rho * coeff * v.row(j)[t];
                    g[j][t] += rho * coeff * v.row(i)[t];
                }
            }
        }
        g
    };

    let step_rows = |v: &VectorSolution, g: &[Vec<f64>], eta: f64| -> VectorSolution {
        let rows = v
            .rows()
            .iter()
            .zip(g)
            .map(|(r, gr)| r.iter().zip(gr).map(|(a, b)| a - eta * b).collect())
            .collect();
        let mut out = VectorSolution::from_rows(d, rows);
        out.renormalize();
        out
    };

    let mut best = x.clone();
    let mut best_viol = max_violation(&x);
    if best_viol <= opts.eps {
        return Ok(SolveOutcome::Feasible {
            solution: x,
            iterations: 0,
        });
    }

    let mut perturb_rng = substream(opts.seed, "sdp-perturb");
    let mut rho = 1.0f64;
    let mut eta = 0.5 / h.k() as f64;
    let mut cur_loss = loss(&x, rho);
    let mut prev: Option<(VectorSolution, Vec<Vec<f64>>)> = None;

    // Endgame: Levenberg-Marquardt on the active residuals. Gradient descent
    // alone decays only polynomially here because the feasible set of the
    // equality-pinned relaxations has empty interior; a second-order local
    // step restores fast convergence once the iterate is close. Unit norms
    // join the residual system so the step can leave the spheres briefly.
    let lm_ok = n * d <= 1600;
    let residuals = |z: &[f64]| -> (Vec<(f64, Vec<(usize, f64)>)>, f64) {
        // Each residual row: (value, sparse jacobian as (column, entry)).
        let row = |i: usize| &z[i * d..(i + 1) * d];
        let mut out = Vec::new();
        let mut sumsq = 0.0;
        for (e, l) in &cs.norm_edges {
            let mut sum = vec![0.0; d];
            for &i in e {
                for (s, t) in sum.iter_mut().zip(row(i)) {
                    *s += t;
                }
            }
            let c = sum.iter().map(|t| t * t).sum::<f64>() - l * l;
            if c > 0.0 {
                let mut jac = Vec::with_capacity(e.len() * d);
                for &i in e {
                    for t in 0..d {
                        jac.push((i * d + t, 2.0 * sum[t]));
                    }
                }
                sumsq += c * c;
                out.push((c, jac));
            }
        }
        for &(i, j) in &cs.pairs {
            let dot: f64 = row(i).iter().zip(row(j)).map(|(a, b)| a * b).sum();
            let (val, sign) = match cs.rule {
                PairRule::None => continue,
                PairRule::AtLeast(t) => {
                    let c = t - dot;
                    if c <= 0.0 {
                        continue;
                    }
                    (c, -1.0)
                }
                PairRule::Exactly(t) => (dot - t, 1.0),
            };
            let mut jac = Vec::with_capacity(2 * d);
            for t in 0..d {
                jac.push((i * d + t, sign * row(j)[t]));
                jac.push((j * d + t, sign * row(i)[t]));
            }
            sumsq += val * val;
            out.push((val, jac));
        }
        for i in 0..n {
            let c = row(i).iter().map(|t| t * t).sum::<f64>() - 1.0;
            let jac = (0..d).map(|t| (i * d + t, 2.0 * row(i)[t])).collect();
            sumsq += c * c;
            out.push((c, jac));
        }
        (out, sumsq)
    };
    let lm_phase = |x: &mut VectorSolution, budget: usize| -> usize {
        let mut z: Vec<f64> = x.rows().iter().flatten().copied().collect();
        let nv = n * d;
        let mut lambda = 1e-4;
        let (mut rows_jac, mut sumsq) = residuals(&z);
        let mut used = 0;
        let mut slow = 0;
        while used < budget {
            used += 1;
            let before = sumsq;
            let mut ata = DMatrix::<f64>::zeros(nv, nv);
            let mut atb = DVector::<f64>::zeros(nv);
            for (val, jac) in &rows_jac {
                for &(a, ja) in jac {
                    atb[a] -= ja * val;
                    for &(b, jb) in jac {
                        ata[(a, b)] += ja * jb;
                    }
                }
            }
            let mut improved = false;
            for _ in 0..8 {
                let mut damped = ata.clone();
                for t in 0..nv {
                    damped[(t, t)] += lambda * (ata[(t, t)] + 1e-12);
                }
                if let Some(chol) = damped.cholesky() {
                    let delta = chol.solve(&atb);
                    let cand: Vec<f64> = z.iter().zip(delta.iter()).map(|(a, b)| a + b).collect();
                    let (cand_rows, cand_sumsq) = residuals(&cand);
                    if cand_sumsq < sumsq {
                        z = cand;
                        rows_jac = cand_rows;
                        sumsq = cand_sumsq;
                        lambda = (lambda * 0.3).max(1e-12);
                        improved = true;
                        break;
                    }
                }
                lambda *= 4.0;
            }
            if !improved || sumsq < 1e-24 {
                break;
            }
            if sumsq > before * 0.99 {
                slow += 1;
                if slow >= 3 {
                    break;
                }
            } else {
                slow = 0;
            }
        }
        for (r, chunk) in x.rows.iter_mut().zip(z.chunks(d)) {
            r.copy_from_slice(chunk);
        }
        x.renormalize();
        used
    };

    let mut iters = 0;
    let mut next_lm = 0usize;
    let mut dead_stalls = 0;
    let mut viol_at_stall = f64::INFINITY;
    while iters < opts.max_iters {
        iters += 1;
        let g = grad(&x, rho);
        // Barzilai-Borwein trial step, safeguarded by monotone backtracking.
        if let Some((px, pg)) = &prev {
            let mut sy = 0.0;
            let mut yy = 0.0;
            for r in 0..n {
                for t in 0..d {
                    let s = x.rows[r][t] - px.rows[r][t];
                    let y = g[r][t] - pg[r][t];
                    sy += s * y;
                    yy += y * y;
                }
            }
            if sy > 0.0 && yy > 0.0 {
                eta = (sy / yy).clamp(1e-10, 1e2);
            }
        }
        let mut step = eta;
        let mut accepted = false;
        for _ in 0..40 {
            let cand = step_rows(&x, &g, step);
            let cl = loss(&cand, rho);
            if cl < cur_loss {
                prev = Some((std::mem::replace(&mut x, cand), g));
                cur_loss = cl;
                eta = step;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        let viol = max_violation(&x);
        if viol < best_viol {
            best_viol = viol;
            best = x.clone();
        }
        if viol <= opts.eps {
            return Ok(SolveOutcome::Feasible {
                solution: x,
                iterations: iters,
            });
        }

        if lm_ok && (!accepted || (viol < 0.25 && iters >= next_lm)) {
            let mut pv = x.clone();
            let budget = opts.max_iters.saturating_sub(iters).min(25);
            iters += lm_phase(&mut pv, budget);
            next_lm = iters + 500;
            let s = max_violation(&pv);
            if s < best_viol {
                best_viol = s;
                best = pv.clone();
            }
            if s <= opts.eps {
                return Ok(SolveOutcome::Feasible {
                    solution: pv,
                    iterations: iters,
                });
            }
            if s < viol {
                x = pv;
                cur_loss = loss(&x, rho);
                prev = None;
            }
        }

        if !accepted {
            // Critical point of the penalty landscape: grow the penalty and
            // nudge the iterate off it, deterministically. Give up on the
            // attempt when repeated stalls stop improving anything; the
            // caller moves on to a fresh initialization.
            if best_viol > viol_at_stall * 0.99 {
                dead_stalls += 1;
                if dead_stalls >= 4 {
                    break;
                }
            } else {
                dead_stalls = 0;
            }
            viol_at_stall = best_viol;
            rho = (rho * 4.0).min(1e8);
            let scale = (best_viol * 0.05).max(1e-8);
            for r in 0..n {
                for t in 0..d {
                    let noise: f64 = perturb_rng.sample(StandardNormal);
                    x.rows[r][t] += scale * noise;
                }
            }
            x.renormalize();
            cur_loss = loss(&x, rho);
            prev = None;
            eta = 0.5 / h.k() as f64;
        }
    }
    let report = check_feasible(h, kind, &best, opts.eps)?;
    Ok(SolveOutcome::Infeasible {
        best,
        report,
        iterations: iters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forge::gen_planted;
    use approx::assert_abs_diff_eq;
    use itertools::Itertools;

    #[test]
    fn simplex_gram_is_exact() {
        for chi in [2usize, 3, 4, 7] {
            let v = simplex_vectors(chi, chi - 1).unwrap();
            let alpha = -1.0 / (chi as f64 - 1.0);
            for i in 0..chi {
                assert!((v.dot(i, i) - 1.0).abs() <= 1e-12);
                for j in i + 1..chi {
                    assert!(
                        (v.dot(i, j) - alpha).abs() <= 1e-12,
                        "chi {chi} pair ({i},{j}): {}",
                        v.dot(i, j)
                    );
                }
            }
            let mut sum = vec![0.0; v.dim()];
            for r in v.rows() {
                for (s, x) in sum.iter_mut().zip(r) {
                    *s += x;
                }
            }
            assert!(sum.iter().map(|x| x * x).sum::<f64>().sqrt() <= 1e-12);
        }
    }

    #[test]
    fn simplex_respects_requested_dimension() {
        let v = simplex_vectors(3, 5).unwrap();
        assert_eq!(v.dim(), 5);
        assert!(v.rows().iter().all(|r| r[2..] == [0.0, 0.0, 0.0]));
        assert!(matches!(
            simplex_vectors(4, 2),
            Err(SdpError::DimensionTooSmall { .. })
        ));
    }

    #[test]
    fn antipodal_pair_at_chi_two() {
        let v = simplex_vectors(2, 1).unwrap();
        assert_abs_diff_eq!(v.dot(0, 1), -1.0, epsilon = 1e-15);
    }

    #[test]
    fn planted_solutions_are_feasible_at_tight_tolerance() {
        let cases = [
            (PromiseKind::Discrepancy(1), 3),
            (PromiseKind::Rainbow(3), 4),
            (PromiseKind::Strong(4), 3),
        ];
        for (kind, k) in cases {
            for seed in 0..5 {
                let inst = gen_planted(kind, k, 30, 50, seed).unwrap();
                let v = planted_solution(&inst.hypergraph, kind, &inst.witness).unwrap();
                let report = check_feasible(&inst.hypergraph, kind, &v, 1e-9).unwrap();
                assert!(report.passes(), "{kind:?}: {report:?}");
            }
        }
    }

    #[test]
    fn planted_discrepancy_edge_sums_have_unit_norm() {
        let inst = gen_planted(PromiseKind::Discrepancy(1), 3, 24, 30, 2).unwrap();
        let v = planted_solution(&inst.hypergraph, PromiseKind::Discrepancy(1), &inst.witness)
            .unwrap();
        for e in inst.hypergraph.edges() {
            let s: f64 = e.iter().map(|&i| v.row(i)[0]).sum();
            assert_abs_diff_eq!(s.abs(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn strong_subset_sums_stay_below_slack() {
        // k vectors of the (k+l)-simplex sum to norm sqrt(k*l/(k+l-1)),
        // which never exceeds l and hits it exactly at l = 1.
        for (k, l) in [(3usize, 1usize), (4, 2), (5, 3)] {
            let chi = k + l;
            let v = simplex_vectors(chi, chi - 1).unwrap();
            for subset in (0..chi).combinations(k) {
                let mut sum = vec![0.0; v.dim()];
                for &i in &subset {
                    for (s, x) in sum.iter_mut().zip(v.row(i)) {
                        *s += x;
                    }
                }
                let norm = sum.iter().map(|x| x * x).sum::<f64>().sqrt();
                let want = (k as f64 * l as f64 / (chi as f64 - 1.0)).sqrt();
                assert_abs_diff_eq!(norm, want, epsilon = 1e-9);
                assert!(norm <= l as f64 + 1e-9);
            }
        }
    }

    #[test]
    fn strong_edge_gram_determinant_identity() {
        let (k, l) = (3usize, 1usize);
        let inst = gen_planted(PromiseKind::Strong(k + l), k, 30, 40, 7).unwrap();
        let v = planted_solution(&inst.hypergraph, PromiseKind::Strong(k + l), &inst.witness)
            .unwrap();
        let alpha = 1.0 / (k as f64 + l as f64 - 1.0);
        let want = (1.0 + alpha).powi(k as i32) * (1.0 - k as f64 * alpha / (1.0 + alpha));
        assert_abs_diff_eq!(want, 16.0 / 27.0, epsilon = 1e-12);
        for e in inst.hypergraph.edges() {
            let det = v.gram_of(e).determinant();
            assert_abs_diff_eq!(det, want, epsilon = 1e-9);
            assert!(det >= l as f64 / (k + l) as f64 - 1e-9);
        }
    }

    #[test]
    fn check_feasible_reports_flat_coloring_violation() {
        let h = Hypergraph::unweighted(3, 3, vec![vec![0, 1, 2]]).unwrap();
        let v = VectorSolution::from_rows(1, vec![vec![1.0]; 3]);
        let report = check_feasible(&h, PromiseKind::Discrepancy(1), &v, 1e-9).unwrap();
        assert_abs_diff_eq!(report.edge_violation, 2.0, epsilon = 1e-12);
        assert!(!report.passes());
        assert_eq!(report.worst_edge, Some(0));
    }

    #[test]
    fn check_feasible_rejects_size_mismatch() {
        let h = Hypergraph::unweighted(2, 3, vec![vec![0, 1]]).unwrap();
        let v = VectorSolution::from_rows(1, vec![vec![1.0]; 2]);
        assert!(matches!(
            check_feasible(&h, PromiseKind::Discrepancy(0), &v, 1e-9),
            Err(SdpError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn warm_start_from_planted_returns_immediately() {
        let kind = PromiseKind::Strong(4);
        let inst = gen_planted(kind, 3, 30, 60, 3).unwrap();
        let v = planted_solution(&inst.hypergraph, kind, &inst.witness).unwrap();
        match solve_warm(&inst.hypergraph, kind, &v, SolveOptions::default()).unwrap() {
            SolveOutcome::Feasible {
                iterations,
                solution,
            } => {
                assert_eq!(iterations, 0);
                assert_eq!(solution.dim(), v.dim());
            }
            other => panic!("warm start failed: {other:?}"),
        }
    }

    #[test]
    fn cold_start_converges_on_small_planted_instances() {
        let opts = SolveOptions {
            eps: 1e-4,
            ..SolveOptions::default()
        };
        let cases = [
            (PromiseKind::Discrepancy(1), 3),
            (PromiseKind::Rainbow(3), 4),
            (PromiseKind::Strong(4), 3),
        ];
        for (kind, k) in cases {
            let inst = gen_planted(kind, k, 20, 30, 1).unwrap();
            let out = solve(&inst.hypergraph, kind, opts).unwrap();
            assert!(out.is_feasible(), "{kind:?} stalled: {out:?}");
            let report = check_feasible(&inst.hypergraph, kind, out.solution(), 1e-4).unwrap();
            assert!(report.passes(), "{kind:?}: {report:?}");
        }
    }

    #[test]
    fn solver_is_deterministic() {
        let kind = PromiseKind::Discrepancy(1);
        let inst = gen_planted(kind, 3, 15, 20, 5).unwrap();
        let opts = SolveOptions {
            eps: 1e-4,
            ..SolveOptions::default()
        };
        let a = solve(&inst.hypergraph, kind, opts).unwrap();
        let b = solve(&inst.hypergraph, kind, opts).unwrap();
        for (ra, rb) in a.solution().rows().iter().zip(b.solution().rows()) {
            for (x, y) in ra.iter().zip(rb) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn impossible_instance_yields_bounded_violation() {
        // All triples of a 5-clique demand 5 unit vectors pairwise at -1/3,
        // but any 5 unit vectors have some pair at -1/4 or above. The
        // instance itself has no strong 4-coloring either: two of the five
        // vertices share a color, and some triple contains both.
        let edges: Vec<Vec<usize>> = (0..5usize).combinations(3).collect();
        let h = Hypergraph::unweighted(3, 5, edges).unwrap();

        let mut colorable = false;
        for code in 0..4u32.pow(5) {
            let mut c = Coloring::new(4, 5);
            let mut x = code;
            for v in 0..5 {
                c.set(v, (x % 4) as usize);
                x /= 4;
            }
            if verify_promise(&h, &c, PromiseKind::Strong(4)).unwrap().ok {
                colorable = true;
                break;
            }
        }
        assert!(!colorable);

        let opts = SolveOptions {
            max_iters: 4000,
            ..SolveOptions::default()
        };
        match solve(&h, PromiseKind::Strong(4), opts).unwrap() {
            SolveOutcome::Infeasible { report, .. } => {
                assert!(
                    report.max_violation() >= 0.05,
                    "violation {}",
                    report.max_violation()
                );
            }
            SolveOutcome::Feasible { solution, .. } => {
                panic!(
                    "claimed feasible with violation {}",
                    check_feasible(&h, PromiseKind::Strong(4), &solution, 1e-6)
                        .unwrap()
                        .max_violation()
                );
            }
        }
    }
}
